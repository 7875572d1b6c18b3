#include "relaxosc/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "relaxosc/util.hpp"

namespace relaxosc::oracle {

namespace {

using State = std::array<double, 3>;  // X, integral F'/y, integral (F-ybar)/y

struct Rhs {
  const ModelSpec* spec;
  double ybar;
  double dF0;

  void operator()(double y, const State& s, State& ds) const {
    double F, dF;
    if (s[0] < 0.0) {  // linear extension past the axis, see fast_orbit.cpp
      F = ybar + dF0 * s[0];
      dF = dF0;
    } else {
      IsoclineValue v = isocline_eval(*spec, s[0]);
      F = v.F;
      dF = v.dF;
    }
    ds[0] = (F - y) / (spec->c * y);
    ds[1] = dF / y;
    ds[2] = (F - ybar) / y;
  }
};

State rk4_step(const Rhs& f, double y, const State& s, double h,
               std::size_t& nfev) {
  State k1, k2, k3, k4, tmp;
  f(y, s, k1);
  for (int i = 0; i < 3; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
  f(y + 0.5 * h, tmp, k2);
  for (int i = 0; i < 3; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
  f(y + 0.5 * h, tmp, k3);
  for (int i = 0; i < 3; ++i) tmp[i] = s[i] + h * k3[i];
  f(y + h, tmp, k4);
  State out;
  for (int i = 0; i < 3; ++i)
    out[i] = s[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  nfev += 4;
  return out;
}

struct SweepEnd {
  double y = 0.0;
  State s{};
};

SweepEnd sweep(const Rhs& f, double y0, const State& s0, double h,
               double yLimit, double xTol, std::size_t& nfev,
               const char* label) {
  double y = y0;
  State s = s0;
  const std::size_t maxSteps =
      static_cast<std::size_t>(std::ceil(std::abs(yLimit - y0) / std::abs(h))) +
      16;
  for (std::size_t n = 0; n < maxSteps; ++n) {
    double hStep = h;
    if ((h > 0.0 && y + h > yLimit) || (h < 0.0 && y + h < yLimit))
      hStep = yLimit - y;
    State sNew = rk4_step(f, y, s, hStep, nfev);
    if (sNew[0] <= 0.0) {
      // Bisection on the final sub-step length.
      double lo = 0.0, hi = hStep;
      double yHit = y + hStep;
      State sHit = sNew;
      for (int it = 0; it < 200 && std::abs(sHit[0]) > xTol; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        State sm = rk4_step(f, y, s, mid, nfev);
        if (sm[0] > 0.0) {
          lo = mid;
        } else {
          hi = mid;
          yHit = y + mid;
          sHit = sm;
        }
      }
      return {yHit, sHit};
    }
    y += hStep;
    s = sNew;
    if (y == yLimit) break;
  }
  std::ostringstream msg;
  msg << "rk4 oracle " << label << " sweep did not reach the predator axis"
      << " (stopped at y = " << y << ", x = " << s[0] << ")";
  throw NumericalError(msg.str());
}

}  // namespace

FastOrbitCheck fast_orbit_rk4(const ModelSpec& spec, double x0, double h) {
  spec.validate();
  if (!(x0 > 0.0) || !(x0 < spec.K))
    throw std::invalid_argument("fast_orbit_rk4: x0 must lie strictly between 0 and K");
  if (!(h > 0.0))
    throw std::invalid_argument("fast_orbit_rk4: h must be positive");

  IsoclineValue origin = isocline_eval(spec, 0.0);
  Rhs f{&spec, origin.F, origin.dF};

  const double y0 = isocline_eval(spec, x0).F;
  double fMax = origin.F;
  for (int i = 1; i <= 64; ++i)
    fMax = std::max(fMax, isocline_eval(spec, spec.K * i / 64.0).F);
  const double yCap = 4.0 * std::max({y0, origin.F, fMax}) + 4.0 * spec.c * spec.K;
  const double yFloor = 1e-14 * std::min(origin.F, y0);
  const double xTol = 1e-13 * spec.K;

  FastOrbitCheck out;
  State s0{x0, 0.0, 0.0};
  SweepEnd up = sweep(f, y0, s0, h, yCap, xTol, out.nfev, "upward");
  SweepEnd dn = sweep(f, y0, s0, -h, yFloor, xTol, out.nfev, "downward");

  out.yOmega = up.y;
  out.yAlpha = dn.y;
  out.lambda = up.s[1] - dn.s[1];
  out.chi = H_eval(spec, up.y) - H_eval(spec, dn.y);
  out.chiQuadrature = up.s[2] - dn.s[2];
  return out;
}

}  // namespace relaxosc::oracle
