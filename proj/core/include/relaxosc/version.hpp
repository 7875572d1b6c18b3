#pragma once

namespace relaxosc {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "relaxosc";

}  // namespace relaxosc
