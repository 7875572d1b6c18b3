#include "relaxosc/full_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "relaxosc/geometry.hpp"
#include "relaxosc/rk.hpp"
#include "relaxosc/util.hpp"

namespace relaxosc {

namespace {

double cp_minus_eps(const ModelSpec& spec, double eps, double x) {
  return spec.c * response_eval(spec, x).p - eps;
}

// Divergence of the (x, y) vector field; the Floquet exponent of a cycle
// is its average over one period.
double divergence(const ModelSpec& spec, double eps, double x, double y) {
  ResponseValue rv = response_eval(spec, x);
  IsoclineValue iv = isocline_eval(spec, x);
  return rv.dp * (iv.F - y) + rv.p * iv.dF - eps + spec.c * rv.p;
}

// Right-hand side in (u, y) = (log prey, predator) coordinates, with an
// optional third component accumulating the divergence integral.
template <std::size_t N>
struct LogRhs {
  const ModelSpec* spec;
  double eps;

  void operator()(double, const rk::State<N>& s, rk::State<N>& ds) const {
    double x = std::exp(s[0]);
    PhiValue ph = response_phi(*spec, x);
    ds[0] = spec->r * (1.0 - x / spec->K) - s[1] * ph.phi;
    ds[1] = s[1] * (-eps + spec->c * x * ph.phi);
    if constexpr (N == 3) ds[2] = divergence(*spec, eps, x, s[1]);
  }
};

struct ReturnOutcome {
  bool returned = false;
  double x = 0.0;        // prey density at the located maximum
  double period = 0.0;   // time to reach it
  double muTotal = 0.0;  // divergence integral over the loop
  std::vector<SimSample> loop;
  std::size_t nfev = 0;
};

// Follow the trajectory from the prey maximum at xStart until the next
// isocline upcrossing with prey above xcut. returned = false means the
// trajectory spent the whole budget without such a crossing (typically:
// it converged to the equilibrium).
ReturnOutcome run_return(const ModelSpec& spec, double eps, double xStart,
                         double tol, double xcut, bool record) {
  if (!(xStart > 0.0) || !(xStart < spec.K))
    throw std::invalid_argument(
        "return map: start must lie strictly between 0 and K");

  LogRhs<3> rhs{&spec, eps};
  rk::State<3> s0{std::log(xStart), isocline_eval(spec, xStart).F, 0.0};

  rk::Options<3> opt;
  opt.rtol = tol;
  double ybar0 = ybar(spec);
  opt.atol = {tol, tol * std::max(1.0, ybar0), tol * 10.0};

  rk::Watch<3> section;
  section.g = [&spec](double, const rk::State<3>& s) {
    return s[1] - isocline_eval(spec, std::exp(s[0])).F;
  };
  section.direction = +1;
  section.stop = true;
  section.gTol = tol * std::max(1.0, ybar0);
  section.gate = [&spec, xcut](double, const rk::State<3>& s) {
    return std::exp(s[0]) > xcut;
  };
  section.id = 1;

  ReturnOutcome out;
  auto observer = [&](double t, const rk::State<3>& s) {
    if (record) out.loop.push_back({t, s[0], s[1]});
    return true;
  };
  if (record) out.loop.push_back({0.0, s0[0], s0[1]});

  const double tBudget = 100.0 + 30.0 / eps;
  auto res = rk::integrate<3>(rhs, 0.0, s0, tBudget, opt, {section}, observer);
  out.nfev = res.nfev;
  if (res.status == rk::Status::Event) {
    out.returned = true;
    out.x = std::exp(res.y[0]);
    out.period = res.t;
    out.muTotal = res.y[2];
  } else if (res.status != rk::Status::ReachedEnd) {
    std::ostringstream msg;
    msg << "return map integration failed (start = " << xStart << ", "
        << res.message << ")";
    throw NumericalError(msg.str());
  }
  return out;
}

}  // namespace

Equilibrium equilibrium(const ModelSpec& spec, double eps) {
  spec.validate();
  if (!(eps > 0.0))
    throw std::invalid_argument("equilibrium: eps must be positive");

  const int n = 2048;
  Equilibrium eq;
  double xRoot = -1.0;
  double prevX = 0.0;
  double prevV = -eps;  // c*p(0) - eps
  for (int i = 1; i <= n; ++i) {
    double x = spec.K * static_cast<double>(i) / n;
    double v = cp_minus_eps(spec, eps, x);
    if ((prevV < 0.0 && v >= 0.0) || (prevV > 0.0 && v <= 0.0) || v == 0.0) {
      ++eq.rootCount;
      if (eq.rootCount == 1) {
        // Bisection refinement of the first (smallest) root.
        double lo = prevX, hi = x, flo = prevV;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * spec.K; ++it) {
          double mid = 0.5 * (lo + hi);
          double fm = cp_minus_eps(spec, eps, mid);
          if (fm == 0.0) {
            lo = hi = mid;
            break;
          }
          if ((flo < 0.0) == (fm < 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        xRoot = 0.5 * (lo + hi);
      }
    }
    prevX = x;
    prevV = v;
  }
  if (xRoot < 0.0)
    throw std::invalid_argument(
        "equilibrium: c*p(x) never reaches eps on (0, K]; no interior rest point");

  eq.xStar = xRoot;
  IsoclineValue iv = isocline_eval(spec, xRoot);
  eq.yStar = iv.F;
  eq.fPrimeAtXStar = iv.dF;
  eq.localStable = iv.dF < 0.0;
  if (eq.rootCount > 1)
    eq.notes.push_back(
        "predator growth balances eps at more than one prey density; "
        "reporting the smallest");
  return eq;
}

Trajectory simulate(const ModelSpec& spec, double eps, double x0, double y0,
                    double tEnd, const SimOptions& opt) {
  spec.validate();
  if (!(eps > 0.0)) throw std::invalid_argument("simulate: eps must be positive");
  if (!(x0 > 0.0) || !(x0 <= 10.0 * spec.K))
    throw std::invalid_argument("simulate: x0 must lie in (0, 10K]");
  if (!(y0 > 0.0)) throw std::invalid_argument("simulate: y0 must be positive");
  if (!(tEnd > 0.0)) throw std::invalid_argument("simulate: tEnd must be positive");
  if (opt.sectionX && !(*opt.sectionX > 0.0))
    throw std::invalid_argument("simulate: sectionX must be positive");

  LogRhs<2> rhs{&spec, eps};
  rk::State<2> s0{std::log(x0), y0};

  rk::Options<2> ro;
  ro.rtol = opt.tol;
  ro.atol = {opt.tol, opt.tol * std::max(1.0, ybar(spec))};
  ro.maxSteps = opt.maxSteps;

  std::vector<rk::Watch<2>> watches;
  if (opt.sectionX) {
    double uSec = std::log(*opt.sectionX);
    for (int dir : {+1, -1}) {
      rk::Watch<2> w;
      w.g = [uSec](double, const rk::State<2>& s) { return s[0] - uSec; };
      w.direction = dir;
      w.stop = false;
      w.gTol = opt.tol;
      w.id = dir;
      watches.push_back(std::move(w));
    }
  }

  Trajectory traj;
  traj.uMin = s0[0];
  auto observer = [&](double t, const rk::State<2>& s) {
    traj.uMin = std::min(traj.uMin, s[0]);
    if (opt.recordSamples) traj.samples.push_back({t, s[0], s[1]});
    return true;
  };
  if (opt.recordSamples) traj.samples.push_back({0.0, s0[0], s0[1]});

  auto res = rk::integrate<2>(rhs, 0.0, s0, tEnd, ro, watches, observer);

  traj.tFinal = res.t;
  traj.uFinal = res.y[0];
  traj.yFinal = res.y[1];
  traj.steps = res.steps;
  traj.nfev = res.nfev;
  traj.completed = res.status == rk::Status::ReachedEnd;
  if (!traj.completed && !res.message.empty()) traj.notes.push_back(res.message);
  for (const auto& h : res.hits)
    traj.sectionHits.push_back({h.t, h.y[0], h.y[1], h.watchId});
  if (traj.uMin < -700.0) {
    std::ostringstream note;
    note << "prey numerically extinct along this trajectory (min log prey = "
         << traj.uMin << "); the log coordinate keeps the dynamics exact";
    traj.notes.push_back(note.str());
  }
  return traj;
}

double isocline_return_map(const ModelSpec& spec, double eps, double xStart,
                           double tol, std::optional<double> xcut) {
  spec.validate();
  if (!(eps > 0.0))
    throw std::invalid_argument("isocline_return_map: eps must be positive");
  double cut;
  if (xcut) {
    cut = *xcut;
    if (!(cut >= 0.0) || !(cut < spec.K))
      throw std::invalid_argument("isocline_return_map: xcut must lie in [0, K)");
  } else {
    IsoclineShape shape = classify_isocline(spec);
    if (shape.humpClass == HumpClass::OneHump ||
        shape.humpClass == HumpClass::TwoHump) {
      cut = *shape.xHat;
    } else {
      throw std::invalid_argument(
          "isocline_return_map: default section needs a humped isocline; "
          "pass xcut explicitly");
    }
  }
  ReturnOutcome out = run_return(spec, eps, xStart, tol, cut, false);
  if (!out.returned)
    throw NumericalError(
        "isocline_return_map: trajectory did not return to the section "
        "within the time budget");
  return out.x;
}

std::vector<MeasuredCycle> find_cycles(const ModelSpec& spec, double eps,
                                       const std::vector<CycleSeed>& seeds,
                                       double tol) {
  spec.validate();
  if (!(eps > 0.0))
    throw std::invalid_argument("find_cycles: eps must be positive");
  std::vector<MeasuredCycle> cycles;
  if (seeds.empty()) return cycles;

  IsoclineShape shape = classify_isocline(spec);
  double cut;
  if (shape.humpClass == HumpClass::TwoHump && shape.xBar) {
    cut = *shape.xBar;
  } else if ((shape.humpClass == HumpClass::OneHump ||
              shape.humpClass == HumpClass::TwoHump) &&
             shape.xHat) {
    cut = *shape.xHat;
  } else {
    throw std::invalid_argument(
        "find_cycles: cycle hunts need a humped prey isocline");
  }

  const double tolFp = std::max(tol, 1e-9) * spec.K;
  const double xLo = cut * 1.0001 + 1e-12 * spec.K;
  const double xHi = 0.999 * spec.K;

  for (const CycleSeed& seed : seeds) {
    MeasuredCycle cyc;
    cyc.seed = seed;

    double xFp = 0.0;
    bool located = false;
    bool viaBoundary = false;
    double cutMeasure = cut;
    std::string note;

    if (seed.lambda < 0.0) {
      // Stable: the return map contracts strongly, iterate to the fixed point.
      double x = std::clamp(seed.x0, xLo, xHi);
      for (int it = 0; it < 300; ++it) {
        ReturnOutcome r = run_return(spec, eps, x, tol, cut, false);
        if (!r.returned) {
          note = "trajectory stopped returning to the section during the "
                 "fixed-point iteration";
          break;
        }
        if (std::abs(r.x - x) <= tolFp) {
          xFp = r.x;
          located = true;
          break;
        }
        x = std::clamp(r.x, xLo, xHi);
      }
      if (!located && note.empty())
        note = "fixed-point iteration did not converge";
    } else {
      // Unstable: bracket a sign change of R(x) - x. Trajectories just
      // inside the cycle fall toward the equilibrium (negative sign or no
      // return), just outside they grow toward the enclosing stable cycle.
      if (!(shape.humpClass == HumpClass::TwoHump) || !shape.xBar ||
          !shape.xHat) {
        cyc.note = "unstable hunt needs the inner section of a two-hump "
                   "isocline";
        cycles.push_back(std::move(cyc));
        continue;
      }
      double lo = *shape.xBar, hi = *shape.xHat;
      double margin = 0.02 * (hi - lo);
      double a = lo + margin, b = hi - margin;
      auto signAt = [&](double x) {
        ReturnOutcome r = run_return(spec, eps, x, tol, cut, false);
        if (!r.returned) return -1.0;  // fell to the equilibrium: inside
        return r.x - x;
      };
      // Scan downward from the outer edge; the first nonpositive value
      // brackets the repelling fixed point.
      const int nScan = 13;
      double bracketLo = 0.0, bracketHi = 0.0;
      bool haveBracket = false;
      double prevX = b, prevS = signAt(b);
      if (prevS > 0.0) {
        for (int i = 1; i <= nScan; ++i) {
          double x = b + (a - b) * static_cast<double>(i) / nScan;
          double s = signAt(x);
          if (s <= 0.0) {
            bracketLo = x;
            bracketHi = prevX;
            haveBracket = true;
            break;
          }
          prevX = x;
          prevS = s;
        }
        if (!haveBracket)
          note = "R(x) - x stayed positive across the inner section; no "
                 "repelling fixed point bracketed";
      } else {
        note = "R(x) - x already nonpositive at the outer edge of the inner "
               "section; no bracket";
      }
      if (haveBracket) {
        double loB = bracketLo, hiB = bracketHi;
        for (int it = 0; it < 60 && hiB - loB > tolFp; ++it) {
          double mid = 0.5 * (loB + hiB);
          if (signAt(mid) <= 0.0)
            loB = mid;
          else
            hiB = mid;
        }
        xFp = 0.5 * (loB + hiB);
        located = true;
      } else if (prevS > 0.0) {
        // Near the canard regime the repelling cycle contracts below the
        // gated section, where the return map cannot register it. Its prey
        // maximum is still the boundary between anchored starts that escape
        // outward through the section and starts that spiral into the
        // equilibrium, so bisect that boundary directly. Starts that fail
        // to escape within the time budget count as inside; that biases the
        // bracket outward by an amount that shrinks with the distance to
        // the boundary, which the closing-loop check below absorbs.
        double xInner = 0.0;
        bool haveInner = false;
        try {
          Equilibrium eq = equilibrium(spec, eps);
          if (eq.localStable && eq.xStar < lo) {
            double probe = eq.xStar + 0.25 * (lo - eq.xStar);
            for (int k = 0; k < 6 && !haveInner; ++k) {
              if (!run_return(spec, eps, probe, tol, cut, false).returned) {
                xInner = probe;
                haveInner = true;
              } else {
                probe = eq.xStar + 0.5 * (probe - eq.xStar);
              }
            }
          }
        } catch (const std::exception&) {
          haveInner = false;
        }
        if (haveInner) {
          double loB = xInner, hiB = a;
          for (int it = 0; it < 64 && hiB - loB > tolFp; ++it) {
            double mid = 0.5 * (loB + hiB);
            if (run_return(spec, eps, mid, tol, cut, false).returned)
              hiB = mid;
            else
              loB = mid;
          }
          xFp = 0.5 * (loB + hiB);
          cutMeasure = 0.75 * xFp;
          located = true;
          viaBoundary = true;
          note.clear();
        } else {
          note += "; no non-escaping start found near the equilibrium "
                  "either, so the repelling cycle could not be located";
        }
      }
    }

    if (!located) {
      cyc.note = note;
      cycles.push_back(std::move(cyc));
      continue;
    }

    // Measure one loop from the located prey maximum.
    double tolMeasure = std::min(tol, 1e-8);
    ReturnOutcome loop = run_return(spec, eps, xFp, tolMeasure, cutMeasure, true);
    if (!loop.returned) {
      cyc.note = "located fixed point but failed to remeasure the loop";
      cycles.push_back(std::move(cyc));
      continue;
    }
    if (viaBoundary && std::abs(loop.x - xFp) > 1e-4 * spec.K) {
      cyc.note = "basin-boundary estimate did not close onto itself within "
                 "1e-4 K; repelling cycle not reported";
      cycles.push_back(std::move(cyc));
      continue;
    }
    cyc.found = true;
    cyc.xMax = xFp;
    cyc.period = loop.period;
    cyc.muTotal = loop.muTotal;
    cyc.stable = loop.muTotal < 0.0;
    cyc.loop = std::move(loop.loop);
    cycles.push_back(std::move(cyc));
  }
  return cycles;
}

double floquet_integral(const ModelSpec& spec, double eps,
                        const std::vector<SimSample>& loop) {
  spec.validate();
  if (loop.size() < 3)
    throw std::invalid_argument("floquet_integral: need at least 3 samples");
  double T = loop.back().t - loop.front().t;
  if (!(T > 0.0))
    throw std::invalid_argument("floquet_integral: loop duration must be positive");
  double x0 = std::exp(loop.front().u), x1 = std::exp(loop.back().u);
  double yScale = std::max(std::abs(loop.front().y), std::abs(loop.back().y));
  if (std::abs(x1 - x0) > 1e-2 * spec.K ||
      std::abs(loop.back().y - loop.front().y) > 1e-2 * std::max(1.0, yScale))
    throw std::invalid_argument("floquet_integral: loop endpoints do not match");

  double acc = 0.0;
  double prevT = loop.front().t;
  double prevD =
      divergence(spec, eps, std::exp(loop.front().u), loop.front().y);
  for (std::size_t i = 1; i < loop.size(); ++i) {
    double d = divergence(spec, eps, std::exp(loop[i].u), loop[i].y);
    acc += 0.5 * (d + prevD) * (loop[i].t - prevT);
    prevT = loop[i].t;
    prevD = d;
  }
  return acc;
}

double hausdorff_to_config(const std::vector<SimSample>& loop,
                           const SingularCycle& config) {
  if (loop.size() < 3)
    throw std::invalid_argument("hausdorff_to_config: need at least 3 samples");
  if (config.orbit.samples.size() < 3)
    throw std::invalid_argument(
        "hausdorff_to_config: configuration carries no orbit polyline");

  std::vector<geometry::Point> measured;
  measured.reserve(loop.size() + 1);
  for (const auto& s : loop) measured.push_back({std::exp(s.u), s.y});
  measured.push_back(measured.front());  // close the loop

  std::vector<geometry::Point> predicted;
  predicted.reserve(config.orbit.samples.size() + 3);
  for (const auto& p : config.orbit.samples) predicted.push_back({p.x, p.y});
  predicted.push_back({0.0, config.orbit.yOmega});
  predicted.push_back({0.0, config.orbit.yAlpha});  // slow drift segment
  predicted.push_back(predicted.front());

  auto a = geometry::resample_polyline(measured, 4096);
  auto b = geometry::resample_polyline(predicted, 4096);
  return geometry::hausdorff_distance(a, b);
}

EntryExit empirical_entry_exit(const ModelSpec& spec, double eps, double yIn,
                               double delta, double tol) {
  spec.validate();
  if (!(eps > 0.0))
    throw std::invalid_argument("empirical_entry_exit: eps must be positive");
  double yb = ybar(spec);
  if (!(yIn > yb))
    throw std::invalid_argument(
        "empirical_entry_exit: yIn must exceed the predator balance point");
  if (delta < 0.0) delta = 1e-2 * spec.K;
  if (!(delta > 0.0) || !(delta < 0.5 * spec.K))
    throw std::invalid_argument(
        "empirical_entry_exit: delta must lie in (0, K/2)");

  LogRhs<2> rhs{&spec, eps};
  double uSec = std::log(delta);
  rk::State<2> s0{uSec, yIn};

  rk::Options<2> ro;
  ro.rtol = tol;
  ro.atol = {tol, tol * std::max(1.0, yb)};

  rk::Watch<2> exitWatch;
  exitWatch.g = [uSec](double, const rk::State<2>& s) { return s[0] - uSec; };
  exitWatch.direction = +1;
  exitWatch.stop = true;
  exitWatch.gTol = tol;
  exitWatch.id = 1;

  const double tBudget = 100.0 + 50.0 / eps;
  auto res = rk::integrate<2>(rhs, 0.0, s0, tBudget, ro, {exitWatch});
  if (res.status != rk::Status::Event)
    throw NumericalError(
        "empirical_entry_exit: prey did not recover to the section within "
        "the time budget");

  EntryExit out;
  out.delta = delta;
  out.yIn = yIn;
  out.yOut = res.y[1];
  out.yPredicted = H_conjugate(spec, yIn);
  out.gap = std::abs(out.yOut - out.yPredicted);
  return out;
}

}  // namespace relaxosc
