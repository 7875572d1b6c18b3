#pragma once

// Direct simulation of the full predator-prey system at positive predator
// death rate eps, used to test the singular-orbit predictions.
//
// The prey coordinate is integrated as u = log x, which keeps the deep
// collapse phases (where x underflows to zero) well conditioned: the
// vector field
//   du/dt = r (1 - e^u / K) - y * phi(e^u)
//   dy/dt = y * (-eps + c * e^u * phi(e^u))
// with phi(x) = p(x)/x extends smoothly to e^u = 0, where phi(0) = p'(0)
// gives the exact limiting dynamics. u itself is never clamped: it is the
// memory variable that controls how long the prey stays collapsed, and
// truncating it would distort both the cycle period and the entry-exit
// balance. Excursions below -700 (where e^u underflows) are only noted on
// the trajectory.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "relaxosc/fast_orbit.hpp"
#include "relaxosc/model.hpp"

namespace relaxosc {

// Interior rest point: c * p(x*) = eps together with y* = F(x*).
struct Equilibrium {
  double xStar = 0.0;
  double yStar = 0.0;
  double fPrimeAtXStar = 0.0;
  bool localStable = false;  // F'(x*) < 0
  int rootCount = 0;         // roots of c * p(x) = eps found in (0, K]
  std::vector<std::string> notes;
};

// Smallest interior equilibrium. Throws std::invalid_argument when
// c * p(x) never reaches eps on (0, K].
Equilibrium equilibrium(const ModelSpec& spec, double eps);

struct SimSample {
  double t = 0.0;
  double u = 0.0;  // log prey
  double y = 0.0;
};

struct SectionCrossing {
  double t = 0.0;
  double u = 0.0;
  double y = 0.0;
  int direction = 0;  // +1: prey increasing through the section, -1: decreasing
};

struct SimOptions {
  double tol = 1e-9;
  std::size_t maxSteps = 20000000;
  bool recordSamples = true;
  // When set, crossings of the vertical line x = sectionX are located and
  // recorded (without stopping the integration).
  std::optional<double> sectionX;
};

struct Trajectory {
  std::vector<SimSample> samples;
  std::vector<SectionCrossing> sectionHits;
  double tFinal = 0.0;
  double uFinal = 0.0;
  double yFinal = 0.0;
  double uMin = 0.0;  // deepest log-prey excursion
  std::size_t steps = 0;
  std::size_t nfev = 0;
  bool completed = false;  // reached the requested end time
  std::vector<std::string> notes;
};

Trajectory simulate(const ModelSpec& spec, double eps, double x0, double y0,
                    double tEnd, const SimOptions& opt = {});

// Next prey maximum: follow the trajectory from (xStart, F(xStart)) until
// it next crosses the prey isocline upward at prey density above xcut,
// and return that density. xcut defaults to the isocline maximum, which
// restricts the section to the outer descending branch; cycle hunts pass
// an explicit xcut when a cycle's prey maximum is known to fall short of
// the maximum (nested cycles of a two-hump isocline). Throws
// NumericalError when the trajectory fails to return within the budget.
double isocline_return_map(const ModelSpec& spec, double eps, double xStart,
                           double tol = 1e-9,
                           std::optional<double> xcut = std::nullopt);

// Predicted anchor of a singular cycle, used to seed a cycle hunt.
struct CycleSeed {
  double x0 = 0.0;      // root of the balance characteristic chi
  double lambda = 0.0;  // stability characteristic at the root
};

struct MeasuredCycle {
  CycleSeed seed;
  bool found = false;
  double xMax = 0.0;     // fixed point of the return map
  double period = 0.0;
  double muTotal = 0.0;  // integral of the divergence over one loop
  bool stable = false;   // muTotal < 0
  std::vector<SimSample> loop;  // one period, starting at the prey maximum
  std::string note;
};

// Locate actual cycles of the eps > 0 flow near the seeded predictions:
// fixed-point iteration of the return map for stable seeds (lambda < 0),
// sign-bracketing of R(x) - x for unstable seeds. Each seed yields one
// entry; found = false with a note records an unsuccessful hunt.
std::vector<MeasuredCycle> find_cycles(const ModelSpec& spec, double eps,
                                       const std::vector<CycleSeed>& seeds,
                                       double tol = 1e-9);

// Trapezoid rule for the divergence of the (x, y) vector field over a
// recorded closed loop. Throws std::invalid_argument unless the loop has
// positive duration and matching endpoints.
double floquet_integral(const ModelSpec& spec, double eps,
                        const std::vector<SimSample>& loop);

// Hausdorff distance in the (x, y) plane between a measured loop and a
// predicted singular configuration (fast orbit closed by the predator-axis
// segment). Both curves are arclength-resampled first.
double hausdorff_to_config(const std::vector<SimSample>& loop,
                           const SingularCycle& config);

// Empirical entry-exit balance of the collapse phase: release the system
// at prey density delta with predator density yIn > ybar, wait for the
// prey to recover to delta, and report the predator density yOut at that
// moment next to the conjugate density predicted by the balance function.
struct EntryExit {
  double delta = 0.0;
  double yIn = 0.0;
  double yOut = 0.0;
  double yPredicted = 0.0;
  double gap = 0.0;  // |yOut - yPredicted|
};

// delta < 0 selects the default section 1e-2 * K.
EntryExit empirical_entry_exit(const ModelSpec& spec, double eps, double yIn,
                               double delta = -1.0, double tol = 1e-10);

}  // namespace relaxosc
