#pragma once

// Embedded Dormand-Prince 5(4) pair with PI-free step control, crossing
// watches and event refinement. Events are refined by re-integrating the
// bracketing step from its left endpoint with a shorter step of the same
// method, which keeps the located state consistent with the integrator's
// own accuracy (a shorter step is at least as accurate as the accepted one).

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace relaxosc::rk {

template <std::size_t N>
using State = std::array<double, N>;

enum class Status { ReachedEnd, Event, Aborted, MaxSteps, StepUnderflow };

/// Scalar crossing detector g(t, y). direction +1 fires on - to +, -1 on
/// + to -, 0 on either. A watch arms only after g has been strictly on the
/// approach side, so starting exactly on the crossing surface never fires.
template <std::size_t N>
struct Watch {
  std::function<double(double, const State<N>&)> g;
  int direction = +1;
  bool stop = true;
  double gTol = 1e-12;  // |g| target for the refined crossing point
  std::function<bool(double, const State<N>&)> gate;  // optional acceptance test
  int id = 0;
};

template <std::size_t N>
struct Hit {
  int watchId = 0;
  double t = 0.0;
  State<N> y{};
};

template <std::size_t N>
struct Options {
  double rtol = 1e-9;
  State<N> atol{};  // per-component absolute tolerance
  double hInit = 0.0;  // 0: automatic
  double hMax = std::numeric_limits<double>::infinity();
  std::size_t maxSteps = 2000000;
};

template <std::size_t N>
struct Result {
  Status status = Status::ReachedEnd;
  double t = 0.0;
  State<N> y{};
  std::size_t steps = 0;
  std::size_t rejections = 0;
  std::size_t nfev = 0;
  std::vector<Hit<N>> hits;
  std::string message;
};

namespace detail {

// Butcher tableau of the Dormand-Prince 5(4) pair.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b(5th) - b(4th): error estimator weights.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace detail

/// One DP5(4) step of size h from (t, y) with k1 = f(t, y) already known.
/// Writes the 5th-order solution to yOut, the embedded error estimate to
/// errOut and f(t+h, yOut) to k7 (FSAL). Returns the number of f evaluations.
template <std::size_t N, class RHS>
int dp5_step(RHS&& f, double t, const State<N>& y, double h, const State<N>& k1,
             State<N>& yOut, State<N>& errOut, State<N>& k7) {
  using namespace detail;
  State<N> k2, k3, k4, k5, k6, tmp;
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
  f(t + c2 * h, tmp, k2);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  f(t + c3 * h, tmp, k3);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  f(t + c4 * h, tmp, k4);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  f(t + c5 * h, tmp, k5);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                         a65 * k5[i]);
  f(t + h, tmp, k6);
  for (std::size_t i = 0; i < N; ++i)
    yOut[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                          b6 * k6[i]);
  f(t + h, yOut, k7);
  for (std::size_t i = 0; i < N; ++i)
    errOut[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                     e6 * k6[i] + e7 * k7[i]);
  return 6;
}

/// Automatic initial step size (standard two-evaluation heuristic).
template <std::size_t N, class RHS>
double initial_step(RHS&& f, double t0, const State<N>& y0, const State<N>& f0,
                    double dir, const Options<N>& opt) {
  auto scaled = [&](const State<N>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double sc = opt.atol[i] + opt.rtol * std::abs(y0[i]);
      double q = v[i] / sc;
      s += q * q;
    }
    return std::sqrt(s / N);
  };
  double d0 = scaled(y0), d1 = scaled(f0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * (d0 / d1);
  h0 = std::min(h0, opt.hMax);
  State<N> y1, f1;
  for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + dir * h0 * f0[i];
  f(t0 + dir * h0, y1, f1);
  State<N> df;
  for (std::size_t i = 0; i < N; ++i) df[i] = f1[i] - f0[i];
  double d2 = scaled(df) / h0;
  double dmax = std::max(d1, d2);
  double h1 = (dmax <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                              : std::pow(0.01 / dmax, 0.2);
  return std::min({100.0 * h0, h1, opt.hMax});
}

struct NullObserver {
  template <std::size_t N>
  bool operator()(double, const State<N>&) const {
    return true;
  }
};

/// Integrates y' = f(t, y) from t0 toward tEnd. The observer is called with
/// every accepted state (and the refined event state when a stopping watch
/// fires); returning false aborts with Status::Aborted. Watches are checked
/// against accepted steps only.
template <std::size_t N, class RHS, class Observer = NullObserver>
Result<N> integrate(RHS&& f, double t0, State<N> y0, double tEnd,
                    const Options<N>& opt, std::vector<Watch<N>> watches = {},
                    Observer&& observer = Observer{}) {
  Result<N> res;
  res.t = t0;
  res.y = y0;
  const double dir = (tEnd >= t0) ? 1.0 : -1.0;
  if (tEnd == t0) return res;

  State<N> k1;
  f(t0, y0, k1);
  res.nfev = 1;

  double h = opt.hInit > 0.0 ? opt.hInit
                             : initial_step<N>(f, t0, y0, k1, dir, opt);
  res.nfev += 2;
  h = std::min(h, std::abs(tEnd - t0));
  if (h <= 0.0 || !std::isfinite(h)) h = 1e-6;

  struct WatchState {
    double gPrev;
    bool armed;
  };
  std::vector<WatchState> ws(watches.size());
  for (std::size_t w = 0; w < watches.size(); ++w) {
    double g = watches[w].g(t0, y0);
    bool approachSide = (watches[w].direction >= 0 && g < 0.0) ||
                        (watches[w].direction <= 0 && g > 0.0);
    ws[w] = {g, approachSide};
  }

  double t = t0;
  State<N> y = y0;
  bool rejectedLast = false;

  auto errorNorm = [&](const State<N>& yNew, const State<N>& err) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double sc = opt.atol[i] +
                  opt.rtol * std::max(std::abs(y[i]), std::abs(yNew[i]));
      double q = err[i] / sc;
      s += q * q;
    }
    return std::sqrt(s / N);
  };

  while (res.steps + res.rejections < opt.maxSteps) {
    bool lastStep = false;
    if (dir * (t + dir * h - tEnd) >= 0.0) {
      h = std::abs(tEnd - t);
      lastStep = true;
    }
    if (h <= 16.0 * std::numeric_limits<double>::epsilon() *
                 std::max(1.0, std::abs(t))) {
      res.status = Status::StepUnderflow;
      res.t = t;
      res.y = y;
      res.message = "step size underflow at t = " + std::to_string(t);
      return res;
    }

    State<N> yNew, err, k7;
    res.nfev += dp5_step<N>(f, t, y, dir * h, k1, yNew, err, k7);

    bool finite = true;
    for (double v : yNew) finite = finite && std::isfinite(v);
    double en = finite ? errorNorm(yNew, err)
                       : std::numeric_limits<double>::infinity();

    if (en > 1.0) {
      ++res.rejections;
      rejectedLast = true;
      double fac = std::isfinite(en)
                       ? std::max(0.2, 0.9 * std::pow(en, -0.2))
                       : 0.2;
      h *= fac;
      continue;
    }

    double tNew = lastStep ? tEnd : t + dir * h;

    // Crossing watches. Refinement re-integrates from (t, y) with a shorter
    // step; bisection on the sub-step length brackets the crossing.
    for (std::size_t w = 0; w < watches.size(); ++w) {
      auto& W = watches[w];
      double gNew = W.g(tNew, yNew);
      bool crossed =
          ws[w].armed &&
          ((W.direction >= 0 && ws[w].gPrev < 0.0 && gNew >= 0.0) ||
           (W.direction <= 0 && ws[w].gPrev > 0.0 && gNew <= 0.0));
      if (crossed) {
        double lo = 0.0, hi = dir * h;
        State<N> yHit = yNew;
        double tHit = tNew, gHit = gNew;
        for (int it = 0; it < 200 && std::abs(gHit) > W.gTol; ++it) {
          double mid = 0.5 * (lo + hi);
          if (mid == lo || mid == hi) break;
          State<N> ym, em, km;
          res.nfev += dp5_step<N>(f, t, y, mid, k1, ym, em, km);
          double gm = W.g(t + mid, ym);
          bool sameSideAsPrev = (W.direction >= 0 && ws[w].gPrev < 0.0)
                                    ? (gm < 0.0)
                                    : (gm > 0.0);
          if (sameSideAsPrev) {
            lo = mid;
          } else {
            hi = mid;
            tHit = t + mid;
            yHit = ym;
            gHit = gm;
          }
        }
        bool accepted = !W.gate || W.gate(tHit, yHit);
        if (accepted) {
          res.hits.push_back({W.id, tHit, yHit});
          if (W.stop) {
            res.status = Status::Event;
            res.t = tHit;
            res.y = yHit;
            observer(tHit, yHit);
            return res;
          }
        }
      }
      ws[w].gPrev = gNew;
      bool approachSide = (W.direction >= 0 && gNew < 0.0) ||
                          (W.direction <= 0 && gNew > 0.0);
      if (approachSide) ws[w].armed = true;
    }

    t = tNew;
    y = yNew;
    k1 = k7;
    ++res.steps;

    if (!observer(t, y)) {
      res.status = Status::Aborted;
      res.t = t;
      res.y = y;
      return res;
    }
    if (lastStep) {
      res.status = Status::ReachedEnd;
      res.t = t;
      res.y = y;
      return res;
    }

    double fac = (en <= 1e-30) ? 5.0
                               : std::min(5.0, std::max(0.2, 0.9 * std::pow(en, -0.2)));
    if (rejectedLast) fac = std::min(fac, 1.0);
    rejectedLast = false;
    h = std::min(h * fac, opt.hMax);
  }

  res.status = Status::MaxSteps;
  res.t = t;
  res.y = y;
  res.message = "maximum step count exceeded at t = " + std::to_string(t);
  return res;
}

}  // namespace relaxosc::rk
