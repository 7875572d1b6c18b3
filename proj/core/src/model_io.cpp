#include "relaxosc/model_io.hpp"

#include <cctype>
#include <sstream>

#include "relaxosc/util.hpp"

namespace relaxosc {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Plain decimal: optional sign, digits with at most one dot. No exponent.
bool is_decimal(const std::string& s) {
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  bool digits = false, dot = false;
  for (; i < s.size(); ++i) {
    if (std::isdigit(static_cast<unsigned char>(s[i]))) {
      digits = true;
    } else if (s[i] == '.' && !dot) {
      dot = true;
    } else {
      return false;
    }
  }
  return digits;
}

double parse_decimal(const std::string& v, int line) {
  if (!is_decimal(v))
    throw ConfigError("line " + std::to_string(line) +
                      ": value '" + v + "' is not plain decimal notation");
  return std::stod(v);
}

// Exact plain-decimal form (config files reject exponent notation).
std::string fmt_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17f", v);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    std::size_t last = s.find_last_not_of('0');
    if (s[last] == '.') --last;
    s = s.substr(0, last + 1);
  }
  return s;
}

}  // namespace

const char* family_token(ResponseFamily f) {
  switch (f) {
    case ResponseFamily::HollingII: return "holling2";
    case ResponseFamily::GeneralizedHollingIV: return "holling4g";
    case ResponseFamily::HollingIV: return "holling4";
    case ResponseFamily::Ivlev: return "ivlev";
    case ResponseFamily::Log: return "log";
    case ResponseFamily::Custom: return "custom";
  }
  return "?";
}

RawModelConfig parse_model_config_text(const std::string& text) {
  RawModelConfig cfg;
  std::istringstream in(text);
  std::string lineBuf;
  int lineNo = 0;
  while (std::getline(in, lineBuf)) {
    ++lineNo;
    std::string line = lineBuf;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineNo) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (val.empty())
      throw ConfigError("line " + std::to_string(lineNo) + ": empty value for '" + key + "'");

    if (key == "family") {
      cfg.family = val;
    } else if (key == "r") {
      cfg.r = parse_decimal(val, lineNo);
    } else if (key == "k") {
      cfg.k = parse_decimal(val, lineNo);
    } else if (key == "c") {
      cfg.c = parse_decimal(val, lineNo);
    } else if (key == "m") {
      cfg.m = parse_decimal(val, lineNo);
    } else if (key == "a") {
      cfg.a = parse_decimal(val, lineNo);
    } else if (key == "b") {
      cfg.b = parse_decimal(val, lineNo);
    } else {
      throw ConfigError("line " + std::to_string(lineNo) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

RawModelConfig merge_model_config(const RawModelConfig& low, const RawModelConfig& high) {
  RawModelConfig out = low;
  if (high.family) out.family = high.family;
  if (high.r) out.r = high.r;
  if (high.k) out.k = high.k;
  if (high.c) out.c = high.c;
  if (high.m) out.m = high.m;
  if (high.a) out.a = high.a;
  if (high.b) out.b = high.b;
  return out;
}

ModelSpec make_model(const RawModelConfig& raw) {
  if (!raw.family) throw ConfigError("missing 'family'");
  const std::string& fam = *raw.family;
  auto need = [&](const std::optional<double>& v, const char* name) {
    if (!v) throw ConfigError(std::string("missing '") + name + "'");
    return *v;
  };
  try {
    if (fam == "holling2" || fam == "holling4" || fam == "ivlev" || fam == "log") {
      if (raw.b)
        throw ConfigError("'b' is only valid for family holling4g");
      double r = need(raw.r, "r"), k = need(raw.k, "k"), c = need(raw.c, "c"),
             m = need(raw.m, "m"), a = need(raw.a, "a");
      if (fam == "holling2") return ModelSpec::holling2(r, k, c, m, a);
      if (fam == "holling4") return ModelSpec::holling4(r, k, c, m, a);
      if (fam == "ivlev") return ModelSpec::ivlev(r, k, c, m, a);
      return ModelSpec::log_response(r, k, c, m, a);
    }
    if (fam == "holling4g") {
      return ModelSpec::generalized_holling4(need(raw.r, "r"), need(raw.k, "k"),
                                             need(raw.c, "c"), need(raw.m, "m"),
                                             need(raw.a, "a"), need(raw.b, "b"));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid parameters: ") + e.what());
  }
  if (fam == "custom")
    throw ConfigError("family 'custom' requires library construction, not config text");
  throw ConfigError("unknown family '" + fam + "'");
}

ModelSpec parse_model_config(const std::string& text) {
  return make_model(parse_model_config_text(text));
}

std::string serialize_model_config(const ModelSpec& spec) {
  if (spec.family == ResponseFamily::Custom)
    throw ConfigError("custom responses are not serializable");
  std::ostringstream out;
  out << "family = " << family_token(spec.family) << "\n";
  out << "r = " << fmt_decimal(spec.r) << "\n";
  out << "k = " << fmt_decimal(spec.K) << "\n";
  out << "c = " << fmt_decimal(spec.c) << "\n";
  out << "m = " << fmt_decimal(spec.m) << "\n";
  out << "a = " << fmt_decimal(spec.a) << "\n";
  if (spec.family == ResponseFamily::GeneralizedHollingIV)
    out << "b = " << fmt_decimal(spec.b) << "\n";
  return out.str();
}

}  // namespace relaxosc
