#pragma once

#include <optional>
#include <string>

#include "relaxosc/model.hpp"

namespace relaxosc {

/// Partially specified model parameters, as read from a config file or CLI
/// flags. Missing fields are filled in by whichever source is merged later.
struct RawModelConfig {
  std::optional<std::string> family;
  std::optional<double> r, k, c, m, a, b;
};

/// Parses flat `key = value` text. Keys: family, r, k, c, m, a, b. Unknown
/// keys are errors; numeric values must be plain decimal notation (no
/// exponent). '#' starts a comment; blank lines are ignored.
/// Throws ConfigError with a line number on malformed input.
RawModelConfig parse_model_config_text(const std::string& text);

/// Overlays `high` on top of `low` field by field (set fields win).
RawModelConfig merge_model_config(const RawModelConfig& low, const RawModelConfig& high);

/// Builds a validated ModelSpec; throws ConfigError when required fields are
/// missing, when `b` is given for a family that does not take it, or when the
/// family token is unknown. Custom responses cannot be built from text.
ModelSpec make_model(const RawModelConfig& raw);

/// Convenience: parse + build.
ModelSpec parse_model_config(const std::string& text);

/// Flat `key = value` round-trip form of a spec (Custom is rejected).
std::string serialize_model_config(const ModelSpec& spec);

const char* family_token(ResponseFamily f);

}  // namespace relaxosc
