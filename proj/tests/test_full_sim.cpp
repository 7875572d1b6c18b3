#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include <relaxosc/fast_orbit.hpp>
#include <relaxosc/full_sim.hpp>
#include <relaxosc/geometry.hpp>
#include <relaxosc/model.hpp>
#include <relaxosc/rk.hpp>

using namespace relaxosc;

namespace {

ModelSpec h2_cycle() { return ModelSpec::holling2(2.0, 3.0, 0.5, 1.5, 1.0); }
ModelSpec h2_monotone() { return ModelSpec::holling2(2.0, 1.0, 0.5, 1.5, 3.0); }
ModelSpec h2_small_c() { return ModelSpec::holling2(2.0, 3.0, 0.05, 1.5, 1.0); }

// Root of the balance characteristic for h2_cycle, frozen in
// test_criteria.cpp from independent fixed-step sweeps.
constexpr double kRootX0 = 2.4419588356;
constexpr double kRootLambda = -1.8199818723;

bool notes_mention(const std::vector<std::string>& notes, const char* needle) {
  for (const auto& n : notes)
    if (n.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("interior rest point solves the balance conditions exactly") {
  // 0.5 * 1.5 x / (1 + x) = 1e-2 has the closed-form solution x = 1/74.
  Equilibrium eq = equilibrium(h2_cycle(), 1e-2);
  CHECK(eq.xStar == doctest::Approx(1.0 / 74.0).epsilon(1e-10));
  CHECK(eq.yStar == doctest::Approx(isocline_eval(h2_cycle(), eq.xStar).F)
                        .epsilon(1e-12));
  CHECK(eq.rootCount == 1);
  CHECK_FALSE(eq.localStable);  // ascending branch of the hump
  CHECK(eq.fPrimeAtXStar > 0.0);

  // 0.75 x / (3 + x) = 0.1 gives x = 6/13 on a falling isocline.
  Equilibrium down = equilibrium(h2_monotone(), 0.1);
  CHECK(down.xStar == doctest::Approx(6.0 / 13.0).epsilon(1e-10));
  CHECK(down.localStable);

  // Predator growth never reaches a large eps: no interior rest point.
  CHECK_THROWS_AS(equilibrium(h2_cycle(), 2.0), std::invalid_argument);
  CHECK_THROWS_AS(equilibrium(h2_cycle(), 0.0), std::invalid_argument);
}

TEST_CASE("simulation holds a rest point stationary") {
  Equilibrium eq = equilibrium(h2_monotone(), 0.1);
  Trajectory traj = simulate(h2_monotone(), 0.1, eq.xStar, eq.yStar, 50.0);
  CHECK(traj.completed);
  CHECK(std::exp(traj.uFinal) == doctest::Approx(eq.xStar).epsilon(1e-6));
  CHECK(traj.yFinal == doctest::Approx(eq.yStar).epsilon(1e-6));
}

TEST_CASE("deep collapse is carried in the log coordinate, not clamped") {
  Trajectory traj = simulate(h2_cycle(), 1e-3, 2.0, 1.0, 3000.0,
                             {1e-9, 20000000, false, std::nullopt});
  CHECK(traj.completed);
  CHECK(traj.uMin < -700.0);  // prey far below the double-precision floor
  CHECK(notes_mention(traj.notes, "numerically extinct"));
  CHECK(std::isfinite(traj.uFinal));
  CHECK(traj.yFinal > 0.0);
}

TEST_CASE("prey recovers from astronomically small densities") {
  // Start at x = 1e-100 with few predators: u = log x must climb back
  // unharmed, which only works if u was never truncated.
  Trajectory traj = simulate(h2_cycle(), 1e-2, 1e-100, 0.5, 400.0);
  CHECK(traj.completed);
  double uTop = -1e300;
  for (const SimSample& s : traj.samples) uTop = std::max(uTop, s.u);
  CHECK(uTop > 0.0);  // prey back above density 1
}

TEST_CASE("section crossings alternate directions on the section line") {
  SimOptions opt;
  opt.sectionX = 1.0;
  Trajectory traj = simulate(h2_cycle(), 1e-2, 2.0, 1.0, 600.0, opt);
  REQUIRE(traj.sectionHits.size() >= 4);
  for (std::size_t i = 0; i < traj.sectionHits.size(); ++i) {
    const SectionCrossing& hit = traj.sectionHits[i];
    CHECK(std::abs(std::exp(hit.u) - 1.0) <= 1e-6);
    CHECK((hit.direction == 1 || hit.direction == -1));
    if (i > 0)
      CHECK(hit.direction == -traj.sectionHits[i - 1].direction);
  }
}

TEST_CASE("simulation rejects out-of-domain arguments") {
  CHECK_THROWS_AS(simulate(h2_cycle(), -1e-2, 2.0, 1.0, 10.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate(h2_cycle(), 1e-2, 0.0, 1.0, 10.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate(h2_cycle(), 1e-2, 2.0, -1.0, 10.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate(h2_cycle(), 1e-2, 2.0, 1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("return map contracts toward the stable cycle") {
  const double target = 2.4393479873;  // measured fixed point at eps = 1e-2
  double x1 = isocline_return_map(h2_cycle(), 1e-2, 2.2);
  double x2 = isocline_return_map(h2_cycle(), 1e-2, x1);
  CHECK(std::abs(x1 - target) < std::abs(2.2 - target));
  CHECK(std::abs(x2 - target) < std::abs(x1 - target));

  CHECK_THROWS_AS(isocline_return_map(h2_cycle(), 1e-2, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(isocline_return_map(h2_cycle(), 1e-2, 3.5),
                  std::invalid_argument);
  // A falling isocline has no hump to anchor the default section.
  CHECK_THROWS_AS(isocline_return_map(h2_monotone(), 1e-2, 0.5),
                  std::invalid_argument);
}

TEST_CASE("cycle hunt reproduces the frozen measured cycle") {
  std::vector<CycleSeed> seeds = {{kRootX0, kRootLambda}};
  std::vector<MeasuredCycle> cycles = find_cycles(h2_cycle(), 1e-2, seeds);
  REQUIRE(cycles.size() == 1);
  const MeasuredCycle& cyc = cycles[0];
  REQUIRE(cyc.found);
  CHECK(cyc.xMax == doctest::Approx(2.4393479873).epsilon(1e-6));
  CHECK(cyc.period == doctest::Approx(298.6854503).epsilon(1e-3));
  CHECK(cyc.muTotal == doctest::Approx(-3.660226091).epsilon(1e-3));
  CHECK(cyc.stable);
  REQUIRE(cyc.loop.size() >= 3);

  // The recorded loop closes on itself at the prey maximum.
  CHECK(std::exp(cyc.loop.front().u) == doctest::Approx(cyc.xMax).epsilon(1e-6));
  CHECK(std::exp(cyc.loop.back().u) ==
        doctest::Approx(std::exp(cyc.loop.front().u)).epsilon(1e-4));
  CHECK(cyc.loop.back().t - cyc.loop.front().t ==
        doctest::Approx(cyc.period).epsilon(1e-9));

  // Divergence integral over the recorded loop agrees with the ride-along
  // measurement. The trapezoid rule sees the integrand only at accepted
  // steps, which under-resolves the spike at the fast drop, so this is a
  // few-percent agreement, not a tight one.
  double mu = floquet_integral(h2_cycle(), 1e-2, cyc.loop);
  CHECK(mu < 0.0);
  CHECK(mu == doctest::Approx(cyc.muTotal).epsilon(5e-2));

  // Measured loop lies near, but not on, the singular configuration.
  SingularCycle config = singular_configuration(h2_cycle(), kRootX0, 1e-10);
  double dist = hausdorff_to_config(cyc.loop, config);
  CHECK(dist == doctest::Approx(0.0870175952).epsilon(1e-3));
  CHECK(dist > 0.02);
  CHECK(dist < 0.2);

  // Period approaches periodCoefficient / eps from the singular side.
  CHECK(cyc.period * 1e-2 ==
        doctest::Approx(config.periodCoefficient).epsilon(0.3));
}

TEST_CASE("divergence integral validates its loop") {
  CHECK_THROWS_AS(floquet_integral(h2_cycle(), 1e-2, {}),
                  std::invalid_argument);
  std::vector<SimSample> open = {{0.0, 0.5, 1.0}, {1.0, 0.7, 1.2},
                                 {2.0, 1.5, 2.0}};
  CHECK_THROWS_AS(floquet_integral(h2_cycle(), 1e-2, open),
                  std::invalid_argument);
  std::vector<SimSample> zeroTime = {{0.0, 0.5, 1.0}, {0.0, 0.5, 1.0},
                                     {0.0, 0.5, 1.0}};
  CHECK_THROWS_AS(floquet_integral(h2_cycle(), 1e-2, zeroTime),
                  std::invalid_argument);
}

TEST_CASE("collapse-phase balance matches the conjugate prediction") {
  // Small conversion efficiency keeps the entry/exit arcs short, so the
  // fixed-section comparison is clean (bias on the section scales with
  // c * p(delta)).
  EntryExit ee = empirical_entry_exit(h2_small_c(), 1e-2, 2.5);
  double yb = ybar(h2_small_c());
  CHECK(ee.yPredicted ==
        doctest::Approx(H_conjugate(h2_small_c(), 2.5)).epsilon(1e-12));
  CHECK(ee.yOut < yb);
  CHECK(2.5 > yb);
  CHECK(ee.gap == doctest::Approx(std::abs(ee.yOut - ee.yPredicted))
                      .epsilon(1e-12));
  CHECK(ee.gap <= 5e-4);

  CHECK_THROWS_AS(empirical_entry_exit(h2_small_c(), 1e-2, 1.0),
                  std::invalid_argument);  // yIn below the balance point
  CHECK_THROWS_AS(empirical_entry_exit(h2_small_c(), 1e-2, 2.5, 2.0),
                  std::invalid_argument);  // delta past K/2
  CHECK_THROWS_AS(empirical_entry_exit(h2_small_c(), 0.0, 2.5),
                  std::invalid_argument);
}

TEST_CASE("planar polyline utilities") {
  using geometry::Point;
  using geometry::hausdorff_distance;
  using geometry::point_segment_distance;
  using geometry::resample_polyline;

  CHECK(point_segment_distance({0, 0}, {1, -1}, {1, 1}) ==
        doctest::Approx(1.0));
  CHECK(point_segment_distance({3, 2}, {0, 0}, {1, 0}) ==
        doctest::Approx(std::sqrt(8.0)));
  CHECK(point_segment_distance({2, 2}, {1, 1}, {1, 1}) ==
        doctest::Approx(std::sqrt(2.0)));  // degenerate segment

  std::vector<Point> line = {{0, 0}, {1, 0}, {10, 0}};
  std::vector<Point> even = resample_polyline(line, 5);
  REQUIRE(even.size() == 5);
  CHECK(even.front().x == doctest::Approx(0.0));
  CHECK(even.back().x == doctest::Approx(10.0));
  for (std::size_t i = 0; i < even.size(); ++i) {
    CHECK(even[i].x == doctest::Approx(2.5 * static_cast<double>(i)));
    CHECK(even[i].y == doctest::Approx(0.0));
  }
  CHECK_THROWS_AS(resample_polyline(line, 1), std::invalid_argument);
  std::vector<Point> single = {{2, 3}};
  CHECK(resample_polyline(single, 4).size() == 1);

  std::vector<Point> square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
  std::vector<Point> shifted = {{0.1, 0}, {1.1, 0}, {1.1, 1},
                                {0.1, 1}, {0.1, 0}};
  CHECK(hausdorff_distance(square, shifted) == doctest::Approx(0.1));
  CHECK(hausdorff_distance(square, square) == doctest::Approx(0.0));
  CHECK_THROWS_AS(hausdorff_distance({}, square), std::invalid_argument);
}

TEST_CASE("embedded pair integrator: accuracy, direction, events") {
  using rk::integrate;
  using rk::Options;
  using rk::State;
  using rk::Status;
  using rk::Watch;

  auto decay = [](double, const State<1>& y, State<1>& dy) { dy[0] = -y[0]; };
  Options<1> opt;
  opt.rtol = 1e-10;
  opt.atol = {1e-12};

  auto fwd = integrate<1>(decay, 0.0, {1.0}, 5.0, opt);
  CHECK(fwd.status == Status::ReachedEnd);
  CHECK(fwd.y[0] == doctest::Approx(std::exp(-5.0)).epsilon(1e-9));

  // Backward in time the same equation grows.
  auto bwd = integrate<1>(decay, 0.0, {1.0}, -1.0, opt);
  CHECK(bwd.status == Status::ReachedEnd);
  CHECK(bwd.y[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-9));

  // Stopping watch: y' = y crosses y = 2 at t = log 2.
  auto growth = [](double, const State<1>& y, State<1>& dy) { dy[0] = y[0]; };
  Watch<1> cross;
  cross.g = [](double, const State<1>& y) { return y[0] - 2.0; };
  cross.direction = +1;
  cross.gTol = 1e-12;
  auto hit = integrate<1>(growth, 0.0, {1.0}, 10.0, opt, {cross});
  REQUIRE(hit.status == Status::Event);
  CHECK(hit.t == doctest::Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(hit.y[0] == doctest::Approx(2.0).epsilon(1e-10));

  // Starting exactly on the surface must not fire (arming semantics).
  auto noFire = integrate<1>(growth, 0.0, {2.0}, 1.0, opt, {cross});
  CHECK(noFire.status == Status::ReachedEnd);
  CHECK(noFire.hits.empty());

  // A gate that rejects every candidate suppresses the event entirely.
  Watch<1> gated = cross;
  gated.gate = [](double, const State<1>&) { return false; };
  auto skipped = integrate<1>(growth, 0.0, {1.0}, 2.0, opt, {gated});
  CHECK(skipped.status == Status::ReachedEnd);
  CHECK(skipped.hits.empty());
}
