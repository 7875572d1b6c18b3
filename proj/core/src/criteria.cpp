#include "relaxosc/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "relaxosc/fast_orbit.hpp"
#include "relaxosc/model_io.hpp"
#include "relaxosc/util.hpp"

namespace relaxosc {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

constexpr double kRefineTol = 1e-12;    // orbit tolerance during refinement
constexpr double kDecisiveLambda = 1e-6;

double chi_at(const ModelSpec& spec, double x0) {
  return fast_orbit_scalars(spec, x0, kRefineTol).chi;
}

// Bisection for f on [lo, hi] with f(lo), f(hi) of opposite (strict) signs.
template <class F>
double bisect_to(F&& f, double lo, double hi, double flo, double width) {
  for (int it = 0; it < 400 && hi - lo > width; ++it) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((flo < 0.0) == (fm < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

ChiScanResult scan_chi_roots(const ModelSpec& spec, int gridN, double tol) {
  spec.validate();
  if (gridN < 16)
    throw std::invalid_argument("scan_chi_roots: gridN must be at least 16");

  const double lo = 1e-3 * spec.K;
  const double hi = (1.0 - 1e-3) * spec.K;
  const std::size_t n = static_cast<std::size_t>(gridN);

  ChiScanResult scan;
  scan.samples.resize(n);
  parallel_for(n, [&](std::size_t i) {
    double x0 = lo + (hi - lo) * static_cast<double>(i) /
                         static_cast<double>(n - 1);
    FastOrbit orbit = fast_orbit_scalars(spec, x0, tol);
    scan.samples[i] = {x0, orbit.chi, orbit.lambda};
  });

  const double rootWidth = 1e-10 * spec.K;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const ChiSample& a = scan.samples[i];
    const ChiSample& b = scan.samples[i + 1];
    int sa = sign_of(a.chi), sb = sign_of(b.chi);
    if (sa == 0) {
      // Exact zero on the grid; use the neighbor signs for the crossing.
      int dir = sb != 0 ? sb : (i > 0 ? -sign_of(scan.samples[i - 1].chi) : 0);
      ChiRoot root;
      root.x0 = a.x0;
      root.lambda = fast_orbit_scalars(spec, a.x0, kRefineTol).lambda;
      root.crossingSign = dir;
      scan.roots.push_back(root);
      continue;
    }
    if (sb == 0 || sa * sb > 0) continue;
    double x0 = bisect_to([&](double x) { return chi_at(spec, x); }, a.x0,
                          b.x0, chi_at(spec, a.x0), rootWidth);
    ChiRoot root;
    root.x0 = x0;
    root.lambda = fast_orbit_scalars(spec, x0, kRefineTol).lambda;
    root.crossingSign = sb;
    scan.roots.push_back(root);
  }

  // Near-tangencies: interior dips of |chi| far below the scan scale that
  // do not change sign. These flag parameter regimes where a root pair is
  // about to appear or vanish.
  double maxAbs = 0.0;
  for (const auto& s : scan.samples) maxAbs = std::max(maxAbs, std::abs(s.chi));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double c0 = scan.samples[i - 1].chi;
    const double c1 = scan.samples[i].chi;
    const double c2 = scan.samples[i + 1].chi;
    if (std::abs(c1) <= std::abs(c0) && std::abs(c1) <= std::abs(c2) &&
        std::abs(c1) < 1e-3 * maxAbs && sign_of(c0) == sign_of(c2) &&
        sign_of(c0) != 0 && sign_of(c1) == sign_of(c0)) {
      std::ostringstream note;
      note << "balance characteristic nearly tangent to zero near x0 = "
           << scan.samples[i].x0 << " (chi = " << c1 << ")";
      scan.notes.push_back(note.str());
    }
  }
  return scan;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::GloballyStableEquilibrium:
      return "globally-stable-equilibrium";
    case Verdict::CyclesPredicted:
      return "cycles-predicted";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

RootClassification classify_roots(const ModelSpec& spec,
                                  const ChiScanResult& scan) {
  spec.validate();
  IsoclineShape shape = classify_isocline(spec);

  RootClassification cls;
  bool allDecisive = true;
  for (const ChiRoot& r : scan.roots) {
    LabeledRoot lr;
    lr.x0 = r.x0;
    lr.lambda = r.lambda;
    if (r.lambda < -kDecisiveLambda) {
      lr.label = "stable";
    } else if (r.lambda > kDecisiveLambda) {
      lr.label = "unstable";
    } else {
      lr.label = "neutral";
      allDecisive = false;
    }
    // A falling chi crossing should carry a stable orbit and a rising one
    // an unstable orbit; disagreement flags numerical trouble.
    if ((r.crossingSign < 0 && r.lambda > kDecisiveLambda) ||
        (r.crossingSign > 0 && r.lambda < -kDecisiveLambda)) {
      std::ostringstream note;
      note << "crossing direction of chi at x0 = " << r.x0
           << " disagrees with the sign of lambda = " << r.lambda;
      cls.notes.push_back(note.str());
    }
    cls.roots.push_back(std::move(lr));
  }

  if (scan.roots.empty()) {
    bool allNegative = !scan.samples.empty();
    for (const auto& s : scan.samples) allNegative = allNegative && s.chi < 0.0;
    if (allNegative && !shape.boundaryDegenerate) {
      cls.verdict = Verdict::GloballyStableEquilibrium;
    } else {
      cls.verdict = Verdict::Inconclusive;
      if (!allNegative)
        cls.notes.push_back(
            "no sign change found but chi is not negative across the grid");
      if (shape.boundaryDegenerate)
        cls.notes.push_back(
            "isocline slope vanishes at the origin; the equilibrium verdict "
            "needs a transversal boundary");
    }
  } else if (allDecisive) {
    cls.verdict = Verdict::CyclesPredicted;
    cls.cycleCount = static_cast<int>(scan.roots.size());
  } else {
    cls.verdict = Verdict::Inconclusive;
    cls.notes.push_back(
        "a root of chi carries a near-zero lambda; its orbit stability is "
        "undecided");
  }

  if (shape.humpClass == HumpClass::TwoHump && shape.xHat) {
    // Concavity of the outer descending branch keeps the outer candidate
    // unique; report whichever way it comes out.
    double xs = *shape.xHat * 1.001;
    double xe = 0.999 * spec.K;
    double maxDd = -std::numeric_limits<double>::infinity();
    double maxAbs = 0.0;
    for (int i = 0; i <= 64; ++i) {
      double x = xs + (xe - xs) * i / 64.0;
      double dd = isocline_eval(spec, x).ddF;
      maxDd = std::max(maxDd, dd);
      maxAbs = std::max(maxAbs, std::abs(dd));
    }
    if (maxDd <= 1e-9 * std::max(1.0, maxAbs)) {
      cls.notes.push_back(
          "outer descending branch is concave; at most one outer cycle "
          "candidate is expected there");
    } else {
      cls.notes.push_back(
          "outer descending branch is not concave; multiple outer "
          "candidates are possible");
    }
  }
  if (shape.humpClass == HumpClass::OneHump &&
      scan.roots.size() % 2 == 0 && !scan.samples.empty()) {
    cls.notes.push_back(
        "a one-hump isocline should carry an odd number of balance roots; "
        "an even count suggests a missed crossing or boundary effect");
  }
  return cls;
}

double holling4_q(double kappa) {
  if (!(kappa > 3.0))
    throw std::invalid_argument(
        "holling4_q: kappa must exceed 3 for the isocline to have two humps");
  double s = std::sqrt(1.0 - 3.0 / kappa);
  double xHat = (1.0 + s) / 3.0;
  double xCheck = (1.0 - s) / 3.0;
  auto F = [kappa](double X) { return (1.0 - X) * (kappa * X * X + 1.0); };
  auto H = [](double y) { return y - 1.0 - std::log(y); };
  return H(F(xHat)) - H(F(xCheck));
}

double holling4_kappa_star(double tol) {
  if (!(tol >= 1e-14) || !(tol <= 1e-2))
    throw std::invalid_argument(
        "holling4_kappa_star: tol must lie in [1e-14, 1e-2]");
  double lo = 4.0;
  double flo = holling4_q(lo);  // strictly negative: upper hump sits at the
                                // balance level exactly, the dip below it
  double hi = 8.0;
  while (holling4_q(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e6)
      throw NumericalError(
          "holling4_kappa_star: balance gap q never became positive");
  }
  return bisect_to([](double k) { return holling4_q(k); }, lo, hi, flo, tol);
}

SmallCLimits small_c_limits(const ModelSpec& spec) {
  spec.validate();
  IsoclineShape shape = classify_isocline(spec);
  SmallCLimits out;

  const double yb = ybar(spec);
  const double hiEnd = (1.0 - 1e-6) * spec.K;
  const double width = 1e-12 * spec.K;
  auto Fat = [&](double x) { return isocline_eval(spec, x).F; };
  auto Hat = [&](double x) { return H_eval(spec, Fat(x)); };

  if (shape.humpClass == HumpClass::OneHump) {
    // The single candidate drifts to the point where the isocline falls
    // back to the balance level on the descending branch.
    if (shape.xBar) {
      out.stableLimit = shape.xBar;
      out.twoCyclesInLimit = false;
    } else {
      out.notes.push_back(
          "descending branch never returns to the balance level");
    }
    return out;
  }
  if (shape.humpClass != HumpClass::TwoHump) {
    out.notes.push_back(
        "no humped structure; the small-coupling limit has no cycle "
        "candidates");
    return out;
  }

  double xHat = *shape.xHat;
  double xCheck = *shape.xCheck;
  double fHat = Fat(xHat);
  double fCheck = Fat(xCheck);
  if (!(fHat > yb)) {
    out.notes.push_back(
        "upper hump does not reach the balance level; no cycle candidates "
        "in the small-coupling limit");
    return out;
  }

  // Descending crossing of the balance level, then the outer limit where
  // the balance function regains the upper hump's value.
  double x2 = bisect_to([&](double x) { return Fat(x) - yb; }, xHat, hiEnd,
                        fHat - yb, width);
  double targetOuter = H_eval(spec, fHat);
  double atX2 = Hat(x2) - targetOuter;      // ~ -targetOuter < 0
  double atEnd = Hat(hiEnd) - targetOuter;  // balance blows up as F -> 0
  if (atX2 < 0.0 && atEnd > 0.0) {
    out.stableLimit = bisect_to(
        [&](double x) { return Hat(x) - targetOuter; }, x2, hiEnd, atX2, width);
  } else {
    out.notes.push_back(
        "outer limit position is outside the resolvable anchor range");
  }

  out.twoCyclesInLimit = H_eval(spec, fHat) > H_eval(spec, fCheck);
  if (out.twoCyclesInLimit && shape.xBar) {
    double targetInner = H_eval(spec, fCheck);
    if (targetInner <= 0.0) {
      out.unstableLimit = *shape.xBar;  // degenerate dip at the balance level
      out.notes.push_back("dip touches the balance level; inner limit "
                          "degenerates to the ascending crossing");
    } else {
      double atBar = -targetInner;  // H at the ascending crossing is zero
      out.unstableLimit =
          bisect_to([&](double x) { return Hat(x) - targetInner; }, *shape.xBar,
                    xHat, atBar, width);
    }
  } else if (!out.twoCyclesInLimit) {
    out.notes.push_back(
        "balance gap between the humps is not positive; the candidate pair "
        "is absent in the small-coupling limit");
  }
  return out;
}

AnalysisReport predict_dynamics(const ModelSpec& spec, int gridN, double tol) {
  spec.validate();
  AnalysisReport report;
  report.spec = spec;
  report.shape = classify_isocline(spec);
  report.ybarValue = ybar(spec);
  if (report.shape.humpClass == HumpClass::Unsupported) {
    report.notes.push_back(
        "isocline shape falls outside the supported classes; scan skipped");
    return report;
  }
  report.scan = scan_chi_roots(spec, gridN, tol);
  report.classification = classify_roots(spec, report.scan);
  report.smallC = small_c_limits(spec);
  return report;
}

std::string report_json(const AnalysisReport& report) {
  nlohmann::json j;

  nlohmann::json model;
  model["family"] = family_token(report.spec.family);
  model["r"] = report.spec.r;
  model["k"] = report.spec.K;
  model["c"] = report.spec.c;
  if (report.spec.family != ResponseFamily::Custom) {
    model["m"] = report.spec.m;
    model["a"] = report.spec.a;
    if (report.spec.family == ResponseFamily::GeneralizedHollingIV)
      model["b"] = report.spec.b;
  }
  j["model"] = std::move(model);
  j["ybar"] = report.ybarValue;

  nlohmann::json shape;
  shape["class"] = to_string(report.shape.humpClass);
  if (report.shape.xHat) shape["xHat"] = *report.shape.xHat;
  if (report.shape.xCheck) shape["xCheck"] = *report.shape.xCheck;
  if (report.shape.xBar) shape["xBar"] = *report.shape.xBar;
  if (report.shape.xTilde) shape["xTilde"] = *report.shape.xTilde;
  shape["fPrimeAtZero"] = report.shape.fPrimeAtZero;
  shape["boundaryDegenerate"] = report.shape.boundaryDegenerate;
  shape["notes"] = report.shape.notes;
  j["shape"] = std::move(shape);

  nlohmann::json scan;
  scan["gridN"] = report.scan.samples.size();
  auto samples = nlohmann::json::array();
  for (const auto& s : report.scan.samples)
    samples.push_back({{"x0", s.x0}, {"chi", s.chi}, {"lambda", s.lambda}});
  scan["samples"] = std::move(samples);
  auto roots = nlohmann::json::array();
  for (const auto& r : report.scan.roots)
    roots.push_back({{"x0", r.x0},
                     {"lambda", r.lambda},
                     {"crossingSign", r.crossingSign}});
  scan["roots"] = std::move(roots);
  scan["notes"] = report.scan.notes;
  j["scan"] = std::move(scan);

  nlohmann::json cls;
  cls["verdict"] = to_string(report.classification.verdict);
  cls["cycleCount"] = report.classification.cycleCount;
  auto labeled = nlohmann::json::array();
  for (const auto& r : report.classification.roots)
    labeled.push_back(
        {{"x0", r.x0}, {"lambda", r.lambda}, {"label", r.label}});
  cls["roots"] = std::move(labeled);
  cls["notes"] = report.classification.notes;
  j["classification"] = std::move(cls);

  nlohmann::json smallC;
  if (report.smallC.stableLimit) smallC["stableLimit"] = *report.smallC.stableLimit;
  if (report.smallC.unstableLimit)
    smallC["unstableLimit"] = *report.smallC.unstableLimit;
  smallC["twoCyclesInLimit"] = report.smallC.twoCyclesInLimit;
  smallC["notes"] = report.smallC.notes;
  j["smallC"] = std::move(smallC);

  j["notes"] = report.notes;
  return j.dump(2) + "\n";
}

}  // namespace relaxosc
