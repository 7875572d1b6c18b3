#pragma once

// Deliberately plain cross-check integrator: classical fixed-step RK4 on
// the y-parameterized fast subsystem, with the axis crossing refined by
// bisection on the final sub-step. It shares nothing with the adaptive
// production path except the model evaluation, which makes it a useful
// independent oracle for the orbit characteristics.

#include "relaxosc/model.hpp"

namespace relaxosc::oracle {

struct FastOrbitCheck {
  double yAlpha = 0.0;
  double yOmega = 0.0;
  double chi = 0.0;            // from the turning densities
  double chiQuadrature = 0.0;  // ride-along integral of (F(X)-ybar)/y dy
  double lambda = 0.0;
  std::size_t nfev = 0;
};

// h is the fixed step in the predator density (e.g. 1e-5 in model units).
FastOrbitCheck fast_orbit_rk4(const ModelSpec& spec, double x0, double h);

}  // namespace relaxosc::oracle
