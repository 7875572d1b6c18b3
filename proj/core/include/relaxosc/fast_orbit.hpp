#pragma once

// Fast-subsystem orbits of the prey equation at frozen predator pressure.
//
// With the predator balance point ybar = F(0), the prey-only flow for a
// slowly drifting predator density y is integrated in the y-parameterization
//   dX/dy = (F(X) - y) / (c * y),
// which follows the branch of the planar orbit through the anchor point
// (x0, F(x0)).  Sweeping y upward and downward from F(x0) until the prey
// coordinate X crosses zero yields the turning densities yAlpha < ybar <
// yOmega at which the orbit meets the predator axis.
//
// Two scalar characteristics ride along the sweep:
//   chi    = H(yOmega) - H(yAlpha), with H(y) = y - ybar - ybar*log(y/ybar);
//            equivalently the accumulated integral of (F(X) - ybar)/y dy.
//   lambda = integral of F'(X(y)) / y dy over the orbit, the sign of which
//            decides the stability of a nearby relaxation cycle.
// Both quadratures are carried as extra state components of the same
// adaptive integration, so their accuracy tracks the orbit tolerance.

#include <optional>
#include <string>
#include <vector>

#include "relaxosc/model.hpp"

namespace relaxosc {

// One branch point of a fast orbit, sampled at an accepted integrator step.
struct OrbitPoint {
  double x = 0.0;
  double y = 0.0;
};

// Characteristics of the fast orbit anchored at (x0, F(x0)).
struct FastOrbit {
  double x0 = 0.0;       // anchor prey density, 0 < x0 < K
  double yAnchor = 0.0;  // F(x0), where the up/down sweeps start
  double yAlpha = 0.0;   // lower turning predator density (X -> 0)
  double yOmega = 0.0;   // upper turning predator density (X -> 0)
  double chi = 0.0;      // H(yOmega) - H(yAlpha)
  double chiAlt = 0.0;   // same quantity from the ride-along quadrature
  double lambda = 0.0;   // orbit integral of F'(X)/y dy
  double ybar = 0.0;     // predator balance point F(0)
  // Orbit polyline ordered by increasing y: the down sweep reversed,
  // the anchor, then the up sweep.
  std::vector<OrbitPoint> samples;
  std::size_t nfev = 0;  // total right-hand-side evaluations
};

// Residuals between the two independent expressions for chi.
struct ChiCrosscheck {
  double residualHForm = 0.0;    // |chi - (H(yOmega) - H(yAlpha))|
  double residualAltForm = 0.0;  // |chi - chiAlt|
};

// Integrate the fast orbit through (x0, F(x0)).  tol controls the relative
// error of the adaptive sweeps and the resolution of the turning densities;
// it must lie in [1e-12, 1e-4].  Throws std::invalid_argument for x0
// outside (0, K) and NumericalError if a sweep fails to reach the predator
// axis within the step budget.
FastOrbit fast_orbit(const ModelSpec& spec, double x0, double tol = 1e-10);

// Same computation without recording the orbit polyline; scan workloads
// that only need the scalar characteristics use this to avoid the buffer.
FastOrbit fast_orbit_scalars(const ModelSpec& spec, double x0,
                             double tol = 1e-10);

ChiCrosscheck chi_crosscheck(const FastOrbit& orbit);

// Closed singular cycle assembled from a fast orbit with chi(x0) = 0:
// the two axis touch points are joined by the slow drift segment along
// the predator axis from yOmega down to yAlpha.
struct SingularCycle {
  FastOrbit orbit;
  // Leading coefficient of the cycle period: T ~ periodCoefficient / eps
  // as the predator death rate eps -> 0.
  double periodCoefficient = 0.0;
};

SingularCycle singular_configuration(const ModelSpec& spec, double x0,
                                     double tol = 1e-10);

// Serialize the orbit polyline as CSV ("y,x" header) or a JSON document
// with the scalar characteristics and the sample array.
std::string orbit_csv(const FastOrbit& orbit);
std::string orbit_json(const FastOrbit& orbit);

}  // namespace relaxosc
