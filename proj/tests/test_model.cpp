#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <relaxosc/model.hpp>
#include <relaxosc/model_io.hpp>
#include <relaxosc/util.hpp>

using namespace relaxosc;

namespace {

ModelSpec h2_cycle() { return ModelSpec::holling2(2.0, 3.0, 0.5, 1.5, 1.0); }

}  // namespace

TEST_CASE("factory validation rejects bad parameter domains") {
  CHECK_THROWS_AS(ModelSpec::holling2(-1.0, 3.0, 0.5, 1.5, 1.0).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(ModelSpec::holling2(2.0, 0.0, 0.5, 1.5, 1.0).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(ModelSpec::holling2(2.0, 3.0, 0.5, 1.5, 0.0).validate(),
                  std::invalid_argument);
  // b must stay above -2 sqrt(a) to keep the denominator positive.
  CHECK_THROWS_AS(
      ModelSpec::generalized_holling4(1.0, 1.0, 0.5, 1.0, 1.0, -2.0).validate(),
      std::invalid_argument);
  CHECK_NOTHROW(
      ModelSpec::generalized_holling4(1.0, 1.0, 0.5, 1.0, 1.0, -1.9).validate());
}

TEST_CASE("response and isocline evaluate the removable origin analytically") {
  ModelSpec spec = h2_cycle();
  PhiValue at0 = response_phi(spec, 0.0);
  CHECK(at0.phi == doctest::Approx(1.5).epsilon(1e-15));  // p'(0) = m/a
  CHECK(ybar(spec) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  CHECK(isocline_eval(spec, 0.0).F == doctest::Approx(4.0 / 3.0).epsilon(1e-15));

  // Same value reached continuously from the right.
  CHECK(isocline_eval(spec, 1e-9).F ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("one-hump classification of the saturating Holling II isocline") {
  IsoclineShape s = classify_isocline(h2_cycle());
  CHECK(s.humpClass == HumpClass::OneHump);
  REQUIRE(s.xHat.has_value());
  REQUIRE(s.xBar.has_value());
  // F = (r/m)(1 - x/K)(a + x) peaks at (K - a)/2 = 1 and returns to F(0) at
  // x = K - a = 2.
  CHECK(*s.xHat == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(*s.xBar == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(s.fPrimeAtZero == doctest::Approx(8.0 / 9.0).epsilon(1e-10));
  CHECK_FALSE(s.boundaryDegenerate);
  CHECK_FALSE(s.xCheck.has_value());
}

TEST_CASE("saturation scale beyond the carrying capacity gives a monotone isocline") {
  IsoclineShape s = classify_isocline(ModelSpec::holling2(2.0, 1.0, 0.5, 1.5, 3.0));
  CHECK(s.humpClass == HumpClass::Monotone);
  CHECK_FALSE(s.xHat.has_value());
  CHECK_FALSE(s.boundaryDegenerate);
}

TEST_CASE("saturation scale equal to the carrying capacity is boundary-degenerate") {
  IsoclineShape s = classify_isocline(ModelSpec::holling2(2.0, 3.0, 0.5, 1.5, 3.0));
  CHECK(s.humpClass == HumpClass::Monotone);
  CHECK(s.boundaryDegenerate);
  CHECK_FALSE(s.notes.empty());
}

TEST_CASE("two-hump classification and landmark identities") {
  ModelSpec spec = ModelSpec::holling4(4.0, 3.0, 0.1, 2.0, 0.75);
  IsoclineShape s = classify_isocline(spec);
  CHECK(s.humpClass == HumpClass::TwoHump);
  REQUIRE(s.xCheck.has_value());
  REQUIRE(s.xHat.has_value());
  REQUIRE(s.xBar.has_value());
  REQUIRE(s.xTilde.has_value());

  // Extrema of (1 - x/3)(1 + 0.75 x^2) solve x^2 - 2x + 4/9 = 0.
  double root = std::sqrt(5.0) / 3.0;
  CHECK(*s.xCheck == doctest::Approx(1.0 - root).epsilon(1e-9));
  CHECK(*s.xHat == doctest::Approx(1.0 + root).epsilon(1e-9));
  // Ascending return to the balance level solves x^2 - 3x + 4/3 = 0.
  CHECK(*s.xBar ==
        doctest::Approx(0.5 * (3.0 - std::sqrt(11.0 / 3.0))).epsilon(1e-9));

  // Landmark identities rather than frozen decimals.
  double yb = ybar(spec);
  CHECK(isocline_eval(spec, *s.xBar).F == doctest::Approx(yb).epsilon(1e-10));
  CHECK(isocline_eval(spec, *s.xHat).dF == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(isocline_eval(spec, *s.xCheck).dF == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(isocline_eval(spec, *s.xTilde).F ==
        doctest::Approx(isocline_eval(spec, *s.xCheck).F).epsilon(1e-10));
  CHECK(*s.xCheck < *s.xBar);
  CHECK(*s.xBar < *s.xHat);
  CHECK(*s.xHat < *s.xTilde);
}

TEST_CASE("custom responses reproduce a built-in family through the function hooks") {
  ModelSpec builtin = h2_cycle();
  CustomResponse fns;
  fns.p = [](double x) { return 1.5 * x / (1.0 + x); };
  fns.dp = [](double x) { return 1.5 / ((1.0 + x) * (1.0 + x)); };
  ModelSpec custom = ModelSpec::custom_response(2.0, 3.0, 0.5, fns);

  for (double x : {0.0, 0.3, 1.0, 2.4}) {
    CHECK(response_eval(custom, x).p ==
          doctest::Approx(response_eval(builtin, x).p).epsilon(1e-14));
    CHECK(isocline_eval(custom, x).F ==
          doctest::Approx(isocline_eval(builtin, x).F).epsilon(1e-12));
    // Custom derivatives come from guarded central differences.
    CHECK(isocline_eval(custom, x).dF ==
          doctest::Approx(isocline_eval(builtin, x).dF).epsilon(1e-5));
  }
}

TEST_CASE("balance function is convex with an involutive conjugation") {
  ModelSpec spec = h2_cycle();  // ybar = 4/3
  double yb = ybar(spec);
  CHECK(H_eval(spec, yb) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(H_eval(spec, 0.4) > 0.0);
  CHECK(H_eval(spec, 3.0) > 0.0);

  // Frozen value computed twice with independent bisections.
  CHECK(H_conjugate(spec, 2.5) == doctest::Approx(0.602316863849).epsilon(1e-9));

  ModelSpec unit = ModelSpec::holling2(1.0, 4.0, 0.5, 1.0, 1.0);  // ybar = 1
  CHECK(H_conjugate(unit, 2.0) == doctest::Approx(0.406375739960).epsilon(1e-9));

  for (double y : {0.05, 0.4, 0.9, 1.3334, 2.0, 4.0, 9.0}) {
    double z = H_conjugate(spec, y);
    CHECK(H_eval(spec, z) == doctest::Approx(H_eval(spec, y)).epsilon(1e-10));
    CHECK(std::abs(H_conjugate(spec, z) - y) <= 1e-10 * std::max(1.0, y));
    CHECK(((y <= yb && z >= yb) || (y >= yb && z <= yb)));
  }
  CHECK(H_conjugate(spec, yb) == doctest::Approx(yb).epsilon(1e-12));
}

TEST_CASE("config text round-trips through the serializer") {
  ModelSpec spec = ModelSpec::holling4(4.0, 3.0, 0.1, 2.0, 0.75);
  std::string text = serialize_model_config(spec);
  ModelSpec back = parse_model_config(text);
  CHECK(back.family == spec.family);
  CHECK(back.r == spec.r);
  CHECK(back.K == spec.K);
  CHECK(back.c == spec.c);
  CHECK(back.m == spec.m);
  CHECK(back.a == spec.a);

  // Values that would print in exponent notation under %g must still
  // round-trip as plain decimals.
  ModelSpec tiny = ModelSpec::holling2(2.0, 3.0, 1e-5, 1.5, 1.0);
  CHECK(parse_model_config(serialize_model_config(tiny)).c == 1e-5);
}

TEST_CASE("config parser rejects malformed input with useful errors") {
  CHECK_THROWS_AS(parse_model_config_text("growth = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_model_config_text("r = 1e-2\n"), ConfigError);
  CHECK_THROWS_AS(parse_model_config_text("r 2\n"), ConfigError);
  CHECK_NOTHROW(parse_model_config_text("# comment\n\nr = 2\n"));

  // Line numbers are reported.
  try {
    parse_model_config_text("r = 2\nbogus = 1\n");
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }

  // Missing required fields and family/parameter mismatches.
  RawModelConfig raw = parse_model_config_text("family = holling2\nr = 2\n");
  CHECK_THROWS_AS(make_model(raw), ConfigError);
  CHECK_THROWS_AS(
      parse_model_config(
          "family = holling2\nr = 2\nk = 3\nc = 0.5\nm = 1.5\na = 1\nb = 2\n"),
      ConfigError);
  CHECK_THROWS_AS(parse_model_config("family = nosuch\nr = 1\n"), ConfigError);
}

TEST_CASE("later config sources override earlier ones field by field") {
  RawModelConfig file = parse_model_config_text(
      "family = holling2\nr = 2\nk = 3\nc = 0.5\nm = 1.5\na = 1\n");
  RawModelConfig flags;
  flags.a = 3.0;
  flags.k = 1.0;
  ModelSpec merged = make_model(merge_model_config(file, flags));
  CHECK(merged.a == 3.0);
  CHECK(merged.K == 1.0);
  CHECK(merged.r == 2.0);  // untouched fields survive
}

TEST_CASE("custom responses cannot be serialized to config text") {
  CustomResponse fns;
  fns.p = [](double x) { return x; };
  fns.dp = [](double) { return 1.0; };
  ModelSpec custom = ModelSpec::custom_response(1.0, 1.0, 0.5, fns);
  CHECK_THROWS_AS(serialize_model_config(custom), ConfigError);
}

TEST_CASE("double formatting round-trips") {
  for (double v : {1.0 / 3.0, 0.75, 1e-5, 4.519149918021867}) {
    CHECK(std::stod(fmt17(v)) == v);
  }
}
