#include "relaxosc/verify.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

#include "relaxosc/criteria.hpp"
#include "relaxosc/fast_orbit.hpp"
#include "relaxosc/full_sim.hpp"
#include "relaxosc/model.hpp"
#include "relaxosc/model_io.hpp"
#include "relaxosc/oracle.hpp"
#include "relaxosc/util.hpp"

namespace relaxosc::verify {

namespace {

// Fixed reference instances. The first carries a single attracting cycle;
// the type IV instance a nested stable/unstable pair; the monotone ones a
// globally attracting equilibrium.
ModelSpec h2_cycle() { return ModelSpec::holling2(2.0, 3.0, 0.5, 1.5, 1.0); }
ModelSpec h2_monotone() { return ModelSpec::holling2(2.0, 1.0, 0.5, 1.5, 3.0); }
ModelSpec h4_pair() { return ModelSpec::holling4(4.0, 3.0, 0.1, 2.0, 0.75); }
ModelSpec ivlev_cycle() { return ModelSpec::ivlev(2.0, 3.0, 0.5, 1.5, 1.0); }
ModelSpec ivlev_monotone() { return ModelSpec::ivlev(2.0, 3.0, 0.5, 1.5, 0.5); }
ModelSpec log_cycle() { return ModelSpec::log_response(1.0, 1.0, 0.5, 1.0, 5.0); }
ModelSpec h4g_cycle() {
  return ModelSpec::generalized_holling4(1.0, 2.0, 0.5, 1.0, 1.0, 1.0);
}

constexpr int kScanGrid = 400;
constexpr double kScanTol = 1e-9;
constexpr double kCycleTol = 1e-9;

std::string num(double v) {
  std::ostringstream o;
  o << std::setprecision(9) << v;
  return o.str();
}

const AnalysisReport& predict_cached(const ModelSpec& spec) {
  static std::map<std::string, AnalysisReport> cache;
  std::string key = serialize_model_config(spec);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, predict_dynamics(spec, kScanGrid, kScanTol)).first;
  return it->second;
}

enum class SeedPick { All, StableOnly };

const std::vector<MeasuredCycle>& cycles_cached(const ModelSpec& spec,
                                                double eps, SeedPick pick) {
  static std::map<std::string, std::vector<MeasuredCycle>> cache;
  std::string key = serialize_model_config(spec) + "|" + fmt17(eps) + "|" +
                    (pick == SeedPick::All ? "all" : "stable");
  auto it = cache.find(key);
  if (it == cache.end()) {
    const AnalysisReport& rep = predict_cached(spec);
    std::vector<CycleSeed> seeds;
    for (const auto& r : rep.scan.roots) {
      if (pick == SeedPick::StableOnly && !(r.lambda < 0.0)) continue;
      seeds.push_back({r.x0, r.lambda});
    }
    it = cache.emplace(key, find_cycles(spec, eps, seeds, kCycleTol)).first;
  }
  return it->second;
}

const ChiRoot* outer_stable_root(const AnalysisReport& rep) {
  const ChiRoot* best = nullptr;
  for (const auto& r : rep.scan.roots)
    if (r.lambda < 0.0 && (!best || r.x0 > best->x0)) best = &r;
  return best;
}

const MeasuredCycle* cycle_for_seed(const std::vector<MeasuredCycle>& cycles,
                                    double x0) {
  for (const auto& c : cycles)
    if (c.seed.x0 == x0) return &c;
  return nullptr;
}

// ---------------------------------------------------------------------------

CheckResult check_kappa4_identity(const AcceptanceOptions&) {
  CheckResult res;
  res.id = "holling4-kappa4-identity";
  res.description =
      "at kappa = 4 the upper hump of the type IV isocline sits exactly at "
      "the predator balance level, and the balance gap q(4) is negative";

  ModelSpec spec = ModelSpec::holling4(1.0, 1.0, 0.1, 1.0, 4.0);
  double xHat = (1.0 + std::sqrt(1.0 - 3.0 / 4.0)) / 3.0;
  double F = isocline_eval(spec, xHat).F;
  double yb = ybar(spec);
  double rel = std::abs(F - yb) / yb;
  double q4 = holling4_q(4.0);

  res.passed = rel <= 1e-12 && q4 < 0.0;
  res.details = "F(xHat)=" + num(F) + " ybar=" + num(yb) + " rel=" + num(rel) +
                " q(4)=" + num(q4);
  return res;
}

CheckResult check_threshold_counts(const AcceptanceOptions&) {
  CheckResult res;
  res.id = "holling4-threshold-cycle-counts";
  res.description =
      "the shape threshold kappa* is stable under tolerance refinement; "
      "just above it the flow carries a stable/unstable cycle pair, just "
      "below it no cycle and a globally stable equilibrium";

  double ks = holling4_kappa_star(1e-10);
  double ksRef = holling4_kappa_star(1e-13);
  bool stable = std::abs(ks - ksRef) <= 1e-8;

  double kappaA = 1.2 * ks;
  double kappaB = std::max(3.5, 0.8 * ks);
  const double eps = 1e-2;

  ModelSpec specA = ModelSpec::holling4(1.0, 1.0, 0.1, 1.0, kappaA);
  const AnalysisReport& repA = predict_cached(specA);
  bool twoRoots = repA.scan.roots.size() == 2;
  bool pairSigns = twoRoots && repA.scan.roots[0].lambda > 0.0 &&
                   repA.scan.roots[1].lambda < 0.0;

  const auto& cycA = cycles_cached(specA, eps, SeedPick::All);
  int foundCount = 0;
  bool measuredSigns = true;
  for (const auto& c : cycA) {
    if (!c.found) continue;
    ++foundCount;
    measuredSigns = measuredSigns && (c.stable == (c.seed.lambda < 0.0));
  }

  ModelSpec specB = ModelSpec::holling4(1.0, 1.0, 0.1, 1.0, kappaB);
  const AnalysisReport& repB = predict_cached(specB);
  bool noRoots = repB.scan.roots.empty();
  bool gasVerdict =
      repB.classification.verdict == Verdict::GloballyStableEquilibrium;

  res.passed = stable && twoRoots && pairSigns && foundCount == 2 &&
               measuredSigns && noRoots && gasVerdict;
  res.details = "kappa*=" + num(ks) + " drift=" + num(std::abs(ks - ksRef)) +
                " rootsAbove=" + std::to_string(repA.scan.roots.size()) +
                " cyclesFound=" + std::to_string(foundCount) +
                " signsMatch=" + (measuredSigns ? "yes" : "no") +
                " rootsBelow=" + std::to_string(repB.scan.roots.size()) +
                " verdictBelow=" + to_string(repB.classification.verdict);
  return res;
}

CheckResult check_period_law(const AcceptanceOptions&) {
  CheckResult res;
  res.id = "period-law";
  res.description =
      "eps times the cycle period approaches the singular coefficient "
      "log(yOmega/yAlpha): within 10% at eps=1e-2, within 5% at eps=1e-3, "
      "improving monotonically";

  ModelSpec spec = h2_cycle();
  const AnalysisReport& rep = predict_cached(spec);
  const ChiRoot* root = outer_stable_root(rep);
  if (!root) {
    res.details = "no stable root predicted";
    return res;
  }
  SingularCycle config = singular_configuration(spec, root->x0, 1e-10);
  double L = config.periodCoefficient;

  const double epsList[3] = {1e-2, 3e-3, 1e-3};
  double err[3] = {0, 0, 0};
  std::ostringstream det;
  det << "L=" << num(L);
  for (int i = 0; i < 3; ++i) {
    const auto& cycles = cycles_cached(spec, epsList[i], SeedPick::StableOnly);
    const MeasuredCycle* cyc = cycle_for_seed(cycles, root->x0);
    if (!cyc || !cyc->found) {
      res.details = "cycle hunt failed at eps=" + num(epsList[i]);
      return res;
    }
    err[i] = std::abs(epsList[i] * cyc->period - L) / L;
    det << " relErr(" << num(epsList[i]) << ")=" << num(err[i]);
  }
  res.passed = err[0] <= 0.10 && err[2] <= 0.05 && err[0] > err[1] &&
               err[1] > err[2];
  res.details = det.str();
  return res;
}

CheckResult check_cycle_location(const AcceptanceOptions&) {
  CheckResult res;
  res.id = "cycle-location";
  res.description =
      "the measured prey maximum stays within 5% of K of the predicted "
      "anchor, and the cycle approaches the singular configuration in "
      "Hausdorff distance as eps decreases";

  ModelSpec spec = h2_cycle();
  const AnalysisReport& rep = predict_cached(spec);
  const ChiRoot* root = outer_stable_root(rep);
  if (!root) {
    res.details = "no stable root predicted";
    return res;
  }
  SingularCycle config = singular_configuration(spec, root->x0, 1e-10);

  const double epsList[3] = {1e-2, 3e-3, 1e-3};
  double dx[3] = {0, 0, 0}, hd[3] = {0, 0, 0};
  std::ostringstream det;
  det << "x0=" << num(root->x0);
  for (int i = 0; i < 3; ++i) {
    const auto& cycles = cycles_cached(spec, epsList[i], SeedPick::StableOnly);
    const MeasuredCycle* cyc = cycle_for_seed(cycles, root->x0);
    if (!cyc || !cyc->found) {
      res.details = "cycle hunt failed at eps=" + num(epsList[i]);
      return res;
    }
    dx[i] = std::abs(cyc->xMax - root->x0);
    hd[i] = hausdorff_to_config(cyc->loop, config);
    det << " dx(" << num(epsList[i]) << ")=" << num(dx[i])
        << " hausdorff=" << num(hd[i]);
  }
  bool close = dx[0] <= 0.05 * spec.K && dx[1] <= 0.05 * spec.K &&
               dx[2] <= 0.05 * spec.K;
  res.passed = close && hd[0] > hd[1] && hd[1] > hd[2];
  res.details = det.str();
  return res;
}

CheckResult check_floquet(const AcceptanceOptions&) {
  CheckResult res;
  res.id = "floquet-sign-and-value";
  res.description =
      "on every cycle detected across four response families at eps=1e-3, "
      "the sign of the divergence integral matches the predicted stability "
      "characteristic, and c times it matches the characteristic within 25%";

  struct Case {
    const char* name;
    ModelSpec spec;
  };
  const Case cases[4] = {{"holling2", h2_cycle()},
                         {"holling4", h4_pair()},
                         {"ivlev", ivlev_cycle()},
                         {"log", log_cycle()}};
  const double eps = 1e-3;

  bool all = true;
  int nChecked = 0;
  std::ostringstream det;
  for (const Case& cs : cases) {
    const auto& cycles = cycles_cached(cs.spec, eps, SeedPick::All);
    bool anyFound = false;
    for (const MeasuredCycle& cyc : cycles) {
      if (!cyc.found) continue;
      anyFound = true;
      ++nChecked;
      double lam = cyc.seed.lambda;
      double rel = std::abs(cyc.muTotal * cs.spec.c - lam) / std::abs(lam);
      bool signOk = (cyc.muTotal < 0.0) == (lam < 0.0);
      bool ok = signOk && rel <= 0.25;
      all = all && ok;
      det << cs.name << ": mu=" << num(cyc.muTotal)
          << " c*mu=" << num(cyc.muTotal * cs.spec.c) << " lambda=" << num(lam)
          << " rel=" << num(rel) << (signOk ? "" : " SIGN-MISMATCH") << "; ";
    }
    if (!anyFound) {
      res.details = std::string(cs.name) + ": cycle hunt found nothing";
      return res;
    }
  }
  res.passed = all && nChecked >= 5;
  res.details = det.str();
  return res;
}

CheckResult check_entry_exit(const AcceptanceOptions&) {
  CheckResult res;
  res.id = "entry-exit-balance";
  res.description =
      "the predator density when prey recovers matches the conjugate of the "
      "entry density within 2% of the balance level at eps=1e-3, improving "
      "as eps decreases";

  // Small conversion efficiency keeps the fixed-section measurement clean:
  // crossing the section at x = 1e-2 K costs the predator an O(c p(delta))
  // density shift on the way in and out, a bias of the finite section that
  // does not vanish with eps. At c = 0.05 that bias sits well below the
  // eps-dependent error, so the convergence of the balance relation is
  // visible in the gap sequence.
  ModelSpec spec = ModelSpec::holling2(2.0, 3.0, 0.05, 1.5, 1.0);
  double yb = ybar(spec);
  const double yIn = 2.5;
  const double epsList[3] = {1e-2, 3e-3, 1e-3};
  double gap[3] = {0, 0, 0};
  std::ostringstream det;
  det << "c=" << num(spec.c) << " yIn=" << num(yIn) << "; ";
  for (int i = 0; i < 3; ++i) {
    EntryExit ee = empirical_entry_exit(spec, epsList[i], yIn, -1.0, 1e-10);
    gap[i] = ee.gap;
    det << "eps=" << num(epsList[i]) << " yOut=" << num(ee.yOut)
        << " predicted=" << num(ee.yPredicted) << " gap=" << num(ee.gap)
        << "; ";
  }
  res.passed = gap[2] <= 0.02 * yb && gap[0] > gap[1] && gap[1] > gap[2];
  res.details = det.str();
  return res;
}

CheckResult check_dichotomy(const AcceptanceOptions&) {
  CheckResult res;
  res.id = "global-dichotomy";
  res.description =
      "a uniformly negative balance characteristic comes with convergence "
      "to the equilibrium, and a decisive stable root with convergence to "
      "its cycle from distant starts";

  std::ostringstream det;

  ModelSpec gas = h2_monotone();
  const AnalysisReport& repG = predict_cached(gas);
  bool gasVerdict =
      repG.classification.verdict == Verdict::GloballyStableEquilibrium;
  Equilibrium eq = equilibrium(gas, 1e-2);
  SimOptions so;
  so.tol = 1e-9;
  so.recordSamples = false;
  Trajectory traj =
      simulate(gas, 1e-2, 0.5 * gas.K, 1.2 * ybar(gas), 1500.0, so);
  double xFinal = std::exp(traj.uFinal);
  bool settled = traj.completed && std::abs(xFinal - eq.xStar) <= 1e-2 * gas.K &&
                 std::abs(traj.yFinal - eq.yStar) <=
                     1e-2 * std::max(1.0, eq.yStar);
  det << "monotone: verdict=" << to_string(repG.classification.verdict)
      << " localStable=" << (eq.localStable ? "yes" : "no")
      << " xFinal=" << num(xFinal) << " xStar=" << num(eq.xStar) << "; ";

  const AnalysisReport& repI = predict_cached(ivlev_monotone());
  bool gasIvlev =
      repI.classification.verdict == Verdict::GloballyStableEquilibrium;
  det << "ivlev-low: verdict=" << to_string(repI.classification.verdict)
      << "; ";

  // One decisive stable root and one measured stable cycle each on the
  // saturating-response instances that are predicted to oscillate.
  struct OneCycleCase {
    const char* name;
    ModelSpec spec;
    double eps;
  };
  const OneCycleCase oneCycle[3] = {{"ivlev-high", ivlev_cycle(), 1e-3},
                                    {"genholling4", h4g_cycle(), 1e-2},
                                    {"log", log_cycle(), 1e-3}};
  bool singles = true;
  for (const OneCycleCase& cs : oneCycle) {
    const AnalysisReport& rep = predict_cached(cs.spec);
    bool oneRoot = rep.scan.roots.size() == 1 &&
                   rep.scan.roots[0].lambda < 0.0 &&
                   rep.classification.verdict == Verdict::CyclesPredicted;
    const auto& cycles = cycles_cached(cs.spec, cs.eps, SeedPick::All);
    int nFound = 0;
    bool stableCycle = true;
    for (const MeasuredCycle& c : cycles) {
      if (!c.found) continue;
      ++nFound;
      stableCycle = stableCycle && c.stable;
    }
    bool ok = oneRoot && nFound == 1 && stableCycle;
    singles = singles && ok;
    det << cs.name << ": roots=" << rep.scan.roots.size()
        << " cycles=" << nFound << (ok ? "" : " MISMATCH") << "; ";
  }

  ModelSpec osc = h2_cycle();
  const AnalysisReport& repO = predict_cached(osc);
  const ChiRoot* root = outer_stable_root(repO);
  bool attractor = false;
  if (root) {
    const auto& cycles = cycles_cached(osc, 1e-2, SeedPick::StableOnly);
    const MeasuredCycle* cyc = cycle_for_seed(cycles, root->x0);
    if (cyc && cyc->found) {
      IsoclineShape shape = classify_isocline(osc);
      double starts[2] = {0.9 * osc.K, 1.05 * *shape.xHat};
      attractor = true;
      for (double x : starts) {
        double xi = x;
        for (int it = 0; it < 12; ++it)
          xi = isocline_return_map(osc, 1e-2, xi, 1e-9);
        attractor = attractor && std::abs(xi - cyc->xMax) <= 1e-3 * osc.K;
        det << "start=" << num(x) << " settled=" << num(xi) << "; ";
      }
      det << "cycleMax=" << num(cyc->xMax) << "; ";
    }
  }

  res.passed =
      gasVerdict && eq.localStable && settled && gasIvlev && singles && attractor;
  res.details = det.str();
  return res;
}

CheckResult check_invariants(const AcceptanceOptions&) {
  CheckResult res;
  res.id = "orbit-invariants";
  res.description =
      "conjugation of the balance function is an involution, orbits "
      "anchored farther out are strictly nested, and the stability "
      "characteristic decreases outward on the concave branch";

  std::ostringstream det;
  ModelSpec spec = h2_cycle();

  bool involution = true;
  double worst = 0.0;
  for (double y : {0.3, 0.7, 1.1, 1.8, 2.6}) {
    double z = H_conjugate(spec, y);
    double w = H_conjugate(spec, z);
    double err = std::abs(w - y);
    worst = std::max(worst, err);
    involution = involution && err <= 1e-10 * std::max(1.0, y);
  }
  det << "involutionWorst=" << num(worst) << "; ";

  bool nested = true, ordered = true;
  double prevAlpha = 0.0, prevOmega = 0.0;
  bool first = true;
  double yb = ybar(spec);
  for (double x0 : {1.2, 1.6, 2.0, 2.4, 2.8}) {
    FastOrbit orb = fast_orbit_scalars(spec, x0, 1e-10);
    ordered = ordered && orb.yAlpha < yb && yb < orb.yOmega;
    if (!first) {
      nested = nested && orb.yAlpha < prevAlpha && orb.yOmega > prevOmega;
    }
    prevAlpha = orb.yAlpha;
    prevOmega = orb.yOmega;
    first = false;
  }
  det << "nested=" << (nested ? "yes" : "no")
      << " ordered=" << (ordered ? "yes" : "no") << "; ";

  ModelSpec h4 = h4_pair();
  IsoclineShape shape = classify_isocline(h4);
  bool decreasing = true;
  if (shape.xHat) {
    double prev = 0.0;
    bool haveFirst = false;
    std::ostringstream lam;
    for (int i = 1; i <= 8; ++i) {
      double x0 = *shape.xHat + (0.97 * h4.K - *shape.xHat) * i / 9.0;
      double l = fast_orbit_scalars(h4, x0, 1e-10).lambda;
      if (haveFirst) decreasing = decreasing && l < prev;
      prev = l;
      haveFirst = true;
    }
    det << "lambdaDecreasingOuter=" << (decreasing ? "yes" : "no");
  } else {
    decreasing = false;
    det << "no isocline maximum found";
  }

  res.passed = involution && nested && ordered && decreasing;
  res.details = det.str();
  return res;
}

CheckResult check_oracle(const AcceptanceOptions& opt) {
  CheckResult res;
  res.id = "oracle-agreement";
  res.description =
      "the adaptive orbit integrator agrees with an independent fixed-step "
      "integrator on the turning densities and both characteristics to 1e-6";

  ModelSpec spec = h2_cycle();
  const double x0 = 2.0;
  FastOrbit orbit = fast_orbit_scalars(spec, x0, 1e-12);
  oracle::FastOrbitCheck chk = oracle::fast_orbit_rk4(spec, x0, 1e-5);

  double lambda = orbit.lambda;
  std::ostringstream det;
  if (opt.injectFailure) {
    lambda = -lambda;
    det << "INJECTED sign flip on lambda; ";
  }

  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b));
  };
  bool okAlpha = close(orbit.yAlpha, chk.yAlpha);
  bool okOmega = close(orbit.yOmega, chk.yOmega);
  bool okChi = close(orbit.chi, chk.chi);
  bool okChiQ = close(orbit.chiAlt, chk.chiQuadrature);
  bool okLambda = close(lambda, chk.lambda);

  det << "yAlpha=" << num(orbit.yAlpha) << "/" << num(chk.yAlpha)
      << " yOmega=" << num(orbit.yOmega) << "/" << num(chk.yOmega)
      << " chi=" << num(orbit.chi) << "/" << num(chk.chi)
      << " lambda=" << num(lambda) << "/" << num(chk.lambda);
  res.passed = okAlpha && okOmega && okChi && okChiQ && okLambda;
  res.details = det.str();
  return res;
}

using CheckFn = CheckResult (*)(const AcceptanceOptions&);

struct Entry {
  const char* id;
  CheckFn fn;
};

const Entry kRegistry[] = {
    {"holling4-kappa4-identity", check_kappa4_identity},
    {"holling4-threshold-cycle-counts", check_threshold_counts},
    {"period-law", check_period_law},
    {"cycle-location", check_cycle_location},
    {"floquet-sign-and-value", check_floquet},
    {"entry-exit-balance", check_entry_exit},
    {"global-dichotomy", check_dichotomy},
    {"orbit-invariants", check_invariants},
    {"oracle-agreement", check_oracle},
};

}  // namespace

std::vector<std::string> check_ids() {
  std::vector<std::string> ids;
  for (const Entry& e : kRegistry) ids.push_back(e.id);
  return ids;
}

std::vector<CheckResult> run_acceptance(const AcceptanceOptions& opt) {
  std::vector<CheckResult> results;
  for (const Entry& e : kRegistry) {
    if (!opt.filter.empty() &&
        std::string(e.id).find(opt.filter) == std::string::npos)
      continue;
    CheckResult r;
    try {
      r = e.fn(opt);
    } catch (const std::exception& ex) {
      r.id = e.id;
      r.passed = false;
      r.details = std::string("exception: ") + ex.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace relaxosc::verify
