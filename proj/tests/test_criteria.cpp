#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include <json.hpp>
#include <relaxosc/criteria.hpp>
#include <relaxosc/model.hpp>

using namespace relaxosc;

namespace {

ModelSpec h2_cycle() { return ModelSpec::holling2(2.0, 3.0, 0.5, 1.5, 1.0); }
ModelSpec h2_monotone() { return ModelSpec::holling2(2.0, 1.0, 0.5, 1.5, 3.0); }
ModelSpec h2_degenerate() { return ModelSpec::holling2(2.0, 3.0, 0.5, 1.5, 3.0); }
ModelSpec h4_pair() { return ModelSpec::holling4(4.0, 3.0, 0.1, 2.0, 0.75); }
ModelSpec ivlev_cycle() { return ModelSpec::ivlev(2.0, 3.0, 0.5, 1.5, 1.0); }
ModelSpec ivlev_monotone() { return ModelSpec::ivlev(2.0, 3.0, 0.5, 1.5, 0.5); }
ModelSpec log_cycle() { return ModelSpec::log_response(1.0, 1.0, 0.5, 1.0, 5.0); }
ModelSpec h4g_cycle() {
  return ModelSpec::generalized_holling4(1.0, 2.0, 0.5, 1.0, 1.0, 1.0);
}

bool notes_mention(const std::vector<std::string>& notes, const char* needle) {
  for (const auto& n : notes)
    if (n.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

// Root positions below were frozen from two independent fixed-step RK4
// sweeps with endpoint bisection, run at steps 2e-5 and 1e-5 in the
// predator density (agreement ~1e-9 or better before freezing).

TEST_CASE("scan finds the single falling root of the one-hump instance") {
  ChiScanResult scan = scan_chi_roots(h2_cycle(), 200, 1e-8);
  REQUIRE(scan.roots.size() == 1);
  CHECK(scan.roots[0].x0 == doctest::Approx(2.4419588356).epsilon(5e-7));
  CHECK(scan.roots[0].lambda == doctest::Approx(-1.8199818723).epsilon(1e-6));
  CHECK(scan.roots[0].crossingSign == -1);

  // Sample grid spans the anchor range and chi changes sign exactly once.
  REQUIRE(scan.samples.size() == 200);
  CHECK(scan.samples.front().x0 == doctest::Approx(1e-3 * 3.0).epsilon(1e-12));
  CHECK(scan.samples.back().x0 ==
        doctest::Approx((1.0 - 1e-3) * 3.0).epsilon(1e-12));
  int flips = 0;
  for (std::size_t i = 1; i < scan.samples.size(); ++i)
    if ((scan.samples[i].chi < 0.0) != (scan.samples[i - 1].chi < 0.0)) ++flips;
  CHECK(flips == 1);
}

TEST_CASE("two-hump instance carries an unstable/stable root pair") {
  ChiScanResult scan = scan_chi_roots(h4_pair(), 400, 1e-8);
  REQUIRE(scan.roots.size() == 2);
  CHECK(scan.roots[0].x0 == doctest::Approx(0.69731492).epsilon(1e-6));
  CHECK(scan.roots[0].lambda == doctest::Approx(0.182460417).epsilon(1e-5));
  CHECK(scan.roots[0].crossingSign == 1);
  CHECK(scan.roots[1].x0 == doctest::Approx(2.72239731).epsilon(1e-6));
  CHECK(scan.roots[1].lambda == doctest::Approx(-2.494286492).epsilon(1e-5));
  CHECK(scan.roots[1].crossingSign == -1);

  RootClassification cls = classify_roots(h4_pair(), scan);
  CHECK(cls.verdict == Verdict::CyclesPredicted);
  CHECK(cls.cycleCount == 2);
  REQUIRE(cls.roots.size() == 2);
  CHECK(cls.roots[0].label == "unstable");
  CHECK(cls.roots[1].label == "stable");
  CHECK(notes_mention(cls.notes, "concave"));
}

TEST_CASE("small-coupling limits bracket the finite-coupling roots") {
  SmallCLimits lim = small_c_limits(h4_pair());
  CHECK(lim.twoCyclesInLimit);
  REQUIRE(lim.stableLimit.has_value());
  REQUIRE(lim.unstableLimit.has_value());
  CHECK(*lim.stableLimit == doctest::Approx(2.668213).epsilon(1e-5));
  CHECK(*lim.unstableLimit == doctest::Approx(0.679907).epsilon(1e-5));

  // At c = 0.1 the scan roots sit near, but not on, their c -> 0 limits.
  ChiScanResult scan = scan_chi_roots(h4_pair(), 200, 1e-8);
  REQUIRE(scan.roots.size() == 2);
  CHECK(std::abs(scan.roots[0].x0 - *lim.unstableLimit) < 0.05);
  CHECK(std::abs(scan.roots[1].x0 - *lim.stableLimit) < 0.08);

  // One-hump instance: the limit is the descending balance crossing.
  SmallCLimits one = small_c_limits(h2_cycle());
  CHECK_FALSE(one.twoCyclesInLimit);
  REQUIRE(one.stableLimit.has_value());
  IsoclineShape shape = classify_isocline(h2_cycle());
  REQUIRE(shape.xBar.has_value());
  CHECK(*one.stableLimit == doctest::Approx(*shape.xBar).epsilon(1e-12));
}

TEST_CASE("monotone isoclines yield the globally stable verdict") {
  for (const ModelSpec& spec : {h2_monotone(), ivlev_monotone()}) {
    AnalysisReport rep = predict_dynamics(spec, 120, 1e-8);
    CHECK(rep.classification.verdict == Verdict::GloballyStableEquilibrium);
    CHECK(rep.scan.roots.empty());
    for (const auto& s : rep.scan.samples) CHECK(s.chi < 0.0);
  }
}

TEST_CASE("degenerate boundary slope blocks the equilibrium verdict") {
  // a = K makes F'(0) = 0: chi stays negative but the verdict must hedge.
  AnalysisReport rep = predict_dynamics(h2_degenerate(), 120, 1e-8);
  CHECK(rep.shape.boundaryDegenerate);
  CHECK(rep.scan.roots.empty());
  CHECK(rep.classification.verdict == Verdict::Inconclusive);
  CHECK(notes_mention(rep.classification.notes, "vanishes at the origin"));
}

TEST_CASE("each response family reproduces its frozen stable root") {
  struct Case {
    ModelSpec spec;
    double x0, lambda;
  } cases[] = {
      {ivlev_cycle(), 1.670402349, -0.452048446},
      {log_cycle(), 0.63082632, -0.565661892},
      {h4g_cycle(), 1.855236064, -4.167523644},
  };
  for (const Case& cs : cases) {
    ChiScanResult scan = scan_chi_roots(cs.spec, 200, 1e-8);
    REQUIRE(scan.roots.size() == 1);
    CHECK(scan.roots[0].x0 == doctest::Approx(cs.x0).epsilon(1e-6));
    CHECK(scan.roots[0].lambda == doctest::Approx(cs.lambda).epsilon(1e-5));
    RootClassification cls = classify_roots(cs.spec, scan);
    CHECK(cls.verdict == Verdict::CyclesPredicted);
    REQUIRE(cls.roots.size() == 1);
    CHECK(cls.roots[0].label == "stable");
  }
}

TEST_CASE("two-hump balance gap and its threshold shape value") {
  CHECK(holling4_q(4.0) ==
        doctest::Approx(-0.002886967062054241).epsilon(1e-9));
  double ks = holling4_kappa_star();
  CHECK(ks == doctest::Approx(4.519149918021867).epsilon(1e-8));
  CHECK(std::abs(holling4_q(ks)) <= 1e-9);
  // The root is insensitive to the bisection tolerance once tight.
  CHECK(std::abs(holling4_kappa_star(1e-10) - holling4_kappa_star(1e-13)) <=
        1e-8);
  CHECK(holling4_q(5.0) > 0.0);
}

TEST_CASE("balance gap scales linearly with the isocline amplitude") {
  // For p = m x / (a x^2 + 1) and K = 1 the isocline is (r/m) times the
  // normalized one, so the hump balance gap is (r/m) times the normalized
  // gap; this ties the threshold function to the general-parameter model.
  for (double kappa : {3.7, 4.2, 5.0, 6.75}) {
    ModelSpec spec = ModelSpec::holling4(3.0, 1.0, 0.5, 7.0, kappa);
    IsoclineShape shape = classify_isocline(spec);
    REQUIRE(shape.humpClass == HumpClass::TwoHump);
    double qLocal = H_eval(spec, isocline_eval(spec, *shape.xHat).F) -
                    H_eval(spec, isocline_eval(spec, *shape.xCheck).F);
    CHECK(std::abs(qLocal - (3.0 / 7.0) * holling4_q(kappa)) <= 1e-12);
  }
}

TEST_CASE("shape parameter controls the hump count at unit capacity") {
  CHECK(classify_isocline(ModelSpec::holling4(1.0, 1.0, 0.5, 1.0, 2.9))
            .humpClass == HumpClass::Monotone);
  CHECK(classify_isocline(ModelSpec::holling4(1.0, 1.0, 0.5, 1.0, 3.0))
            .humpClass == HumpClass::Monotone);
  CHECK(classify_isocline(ModelSpec::holling4(1.0, 1.0, 0.5, 1.0, 3.1))
            .humpClass == HumpClass::TwoHump);
}

TEST_CASE("wiggly custom response is reported as unsupported") {
  CustomResponse fns;
  fns.p = [](double x) { return x * (1.0 + 0.3 * std::sin(8.0 * x)); };
  fns.dp = [](double x) {
    return 1.0 + 0.3 * std::sin(8.0 * x) + 2.4 * x * std::cos(8.0 * x);
  };
  ModelSpec spec = ModelSpec::custom_response(2.0, 3.0, 0.5, fns);
  CHECK(classify_isocline(spec).humpClass == HumpClass::Unsupported);
  AnalysisReport rep = predict_dynamics(spec, 120, 1e-8);
  CHECK(rep.classification.verdict == Verdict::Inconclusive);
  CHECK(rep.scan.samples.empty());
  CHECK(rep.scan.roots.empty());
  CHECK(notes_mention(rep.notes, "outside the supported classes"));
}

TEST_CASE("analysis report serializes to parseable structured output") {
  AnalysisReport rep = predict_dynamics(h2_cycle(), 60, 1e-8);
  nlohmann::json j = nlohmann::json::parse(report_json(rep));
  CHECK(j["model"]["family"].get<std::string>() == "holling2");
  CHECK(j["ybar"].get<double>() == doctest::Approx(4.0 / 3.0));
  CHECK(j["shape"]["class"].get<std::string>() == "OneHump");
  CHECK(j["scan"]["roots"].size() == 1);
  CHECK(j["classification"]["verdict"].get<std::string>() ==
        "cycles-predicted");
  CHECK(j["smallC"].contains("stableLimit"));
}

TEST_CASE("scan and threshold guard their argument domains") {
  CHECK_THROWS_AS(scan_chi_roots(h2_cycle(), 8, 1e-8), std::invalid_argument);
  CHECK_THROWS_AS(holling4_q(3.0), std::invalid_argument);
  CHECK_THROWS_AS(holling4_q(2.9), std::invalid_argument);
  CHECK_THROWS_AS(holling4_kappa_star(0.5), std::invalid_argument);
  CHECK_THROWS_AS(holling4_kappa_star(1e-15), std::invalid_argument);
}
