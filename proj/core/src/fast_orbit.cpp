#include "relaxosc/fast_orbit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "relaxosc/rk.hpp"
#include "relaxosc/util.hpp"

namespace relaxosc {

namespace {

// Isocline value and slope with a linear extension below x = 0. Adaptive
// steps may overshoot the predator-axis crossing into slightly negative
// prey, where some response families are singular; the extension keeps the
// right-hand side smooth there without affecting the x >= 0 dynamics.
struct GuardedIsocline {
  const ModelSpec* spec;
  double f0;   // F(0) = ybar
  double df0;  // F'(0)

  void eval(double x, double& F, double& dF) const {
    if (x < 0.0) {
      F = f0 + df0 * x;
      dF = df0;
      return;
    }
    IsoclineValue v = isocline_eval(*spec, x);
    F = v.F;
    dF = v.dF;
  }
};

// Sweep state: prey coordinate and the two ride-along quadratures
//   state[0] = X(y)
//   state[1] = integral of F'(X)/y dy      (stability characteristic)
//   state[2] = integral of (F(X)-ybar)/y dy (balance characteristic)
using SweepState = rk::State<3>;

struct SweepResult {
  double yEnd = 0.0;      // turning density where X crossed zero
  SweepState state{};     // state at the crossing
  std::size_t nfev = 0;
  std::vector<OrbitPoint> samples;  // accepted steps, in sweep order
};

SweepResult sweep(const ModelSpec& spec, const GuardedIsocline& iso,
                  double y0, double x0, double yTarget, double tol,
                  bool collectSamples, const char* label) {
  const double c = spec.c;
  auto rhs = [&](double y, const SweepState& s, SweepState& ds) {
    double F, dF;
    iso.eval(s[0], F, dF);
    ds[0] = (F - y) / (c * y);
    ds[1] = dF / y;
    ds[2] = (F - iso.f0) / y;
  };

  rk::Options<3> opt;
  opt.rtol = tol;
  opt.atol = {tol * spec.K, tol, tol * std::max(1.0, iso.f0)};
  opt.maxSteps = 500000;

  rk::Watch<3> axis;
  axis.g = [](double, const SweepState& s) { return s[0]; };
  axis.direction = -1;
  axis.stop = true;
  axis.gTol = tol * spec.K;
  axis.id = 1;

  SweepResult out;
  auto observer = [&](double y, const SweepState& s) {
    if (collectSamples) out.samples.push_back({s[0], y});
    return true;
  };

  SweepState s0{x0, 0.0, 0.0};
  auto res = rk::integrate<3>(rhs, y0, s0, yTarget, opt, {axis}, observer);
  out.nfev = res.nfev;
  if (res.status != rk::Status::Event) {
    std::ostringstream msg;
    msg << "fast orbit " << label
        << " sweep did not reach the predator axis (x0 = " << x0
        << ", stopped at y = " << res.t << ", x = " << res.y[0];
    if (!res.message.empty()) msg << "; " << res.message;
    msg << ")";
    throw NumericalError(msg.str());
  }
  out.yEnd = res.t;
  out.state = res.y;
  return out;
}

FastOrbit fast_orbit_impl(const ModelSpec& spec, double x0, double tol,
                          bool collectSamples) {
  spec.validate();
  if (!(x0 > 0.0) || !(x0 < spec.K))
    throw std::invalid_argument("fast_orbit: x0 must lie strictly between 0 and K");
  if (!(tol >= 1e-12) || !(tol <= 1e-4))
    throw std::invalid_argument("fast_orbit: tol must lie in [1e-12, 1e-4]");

  IsoclineValue origin = isocline_eval(spec, 0.0);
  GuardedIsocline iso{&spec, origin.F, origin.dF};

  const double y0 = isocline_eval(spec, x0).F;
  if (!(y0 > 0.0))
    throw NumericalError("fast_orbit: anchor lies at nonpositive isocline value");

  // Upper integration cap: beyond the isocline maximum the prey coordinate
  // falls at a rate of at least (y - Fmax)/(c y), so a crossing is certain
  // well before this bound.
  double fMax = iso.f0;
  for (int i = 1; i <= 64; ++i) {
    double x = spec.K * static_cast<double>(i) / 64.0;
    fMax = std::max(fMax, isocline_eval(spec, x).F);
  }
  const double yCap = 4.0 * std::max({y0, iso.f0, fMax}) + 4.0 * spec.c * spec.K;
  const double yFloor = 1e-14 * std::min(iso.f0, y0);

  SweepResult up =
      sweep(spec, iso, y0, x0, yCap, tol, collectSamples, "upward");
  SweepResult down =
      sweep(spec, iso, y0, x0, yFloor, tol, collectSamples, "downward");

  FastOrbit orbit;
  orbit.x0 = x0;
  orbit.yAnchor = y0;
  orbit.ybar = iso.f0;
  orbit.yAlpha = down.yEnd;
  orbit.yOmega = up.yEnd;
  orbit.lambda = up.state[1] - down.state[1];
  orbit.chiAlt = up.state[2] - down.state[2];
  orbit.chi = H_eval(spec, orbit.yOmega) - H_eval(spec, orbit.yAlpha);
  orbit.nfev = up.nfev + down.nfev;

  if (collectSamples) {
    orbit.samples.reserve(down.samples.size() + up.samples.size() + 1);
    for (auto it = down.samples.rbegin(); it != down.samples.rend(); ++it)
      orbit.samples.push_back(*it);
    orbit.samples.push_back({x0, y0});
    for (const auto& p : up.samples) orbit.samples.push_back(p);
  }
  return orbit;
}

}  // namespace

FastOrbit fast_orbit(const ModelSpec& spec, double x0, double tol) {
  return fast_orbit_impl(spec, x0, tol, true);
}

FastOrbit fast_orbit_scalars(const ModelSpec& spec, double x0, double tol) {
  return fast_orbit_impl(spec, x0, tol, false);
}

ChiCrosscheck chi_crosscheck(const FastOrbit& orbit) {
  ChiCrosscheck c;
  double hForm = 0.0;
  {
    // Recompute H locally from the stored balance point so the check does
    // not need the model.
    auto H = [&](double y) {
      return y - orbit.ybar - orbit.ybar * std::log(y / orbit.ybar);
    };
    hForm = H(orbit.yOmega) - H(orbit.yAlpha);
  }
  c.residualHForm = std::abs(orbit.chi - hForm);
  c.residualAltForm = std::abs(orbit.chi - orbit.chiAlt);
  return c;
}

SingularCycle singular_configuration(const ModelSpec& spec, double x0,
                                     double tol) {
  SingularCycle cyc;
  cyc.orbit = fast_orbit(spec, x0, tol);
  cyc.periodCoefficient = std::log(cyc.orbit.yOmega / cyc.orbit.yAlpha);
  return cyc;
}

std::string orbit_csv(const FastOrbit& orbit) {
  std::ostringstream out;
  out << "y,x\n";
  for (const auto& p : orbit.samples)
    out << fmt17(p.y) << "," << fmt17(p.x) << "\n";
  return out.str();
}

std::string orbit_json(const FastOrbit& orbit) {
  nlohmann::json j;
  j["x0"] = orbit.x0;
  j["yAnchor"] = orbit.yAnchor;
  j["yAlpha"] = orbit.yAlpha;
  j["yOmega"] = orbit.yOmega;
  j["chi"] = orbit.chi;
  j["chiAlt"] = orbit.chiAlt;
  j["lambda"] = orbit.lambda;
  j["ybar"] = orbit.ybar;
  j["nfev"] = orbit.nfev;
  auto samples = nlohmann::json::array();
  for (const auto& p : orbit.samples)
    samples.push_back({p.y, p.x});
  j["samples"] = std::move(samples);
  return j.dump(2) + "\n";
}

}  // namespace relaxosc
