#pragma once

// Locating and classifying the singular cycle candidates of a model: roots
// of the balance characteristic chi(x0) over the anchor range, labeled by
// the stability characteristic lambda, plus the derived global verdicts
// and the small-coupling limit positions of the roots.

#include <optional>
#include <string>
#include <vector>

#include "relaxosc/model.hpp"

namespace relaxosc {

struct ChiSample {
  double x0 = 0.0;
  double chi = 0.0;
  double lambda = 0.0;
};

struct ChiRoot {
  double x0 = 0.0;          // certified to 1e-10 * K
  double lambda = 0.0;      // evaluated at the root with a tight tolerance
  int crossingSign = 0;     // +1: chi rises through zero, -1: falls
};

struct ChiScanResult {
  std::vector<ChiSample> samples;  // uniform anchors in (1e-3 K, (1-1e-3) K)
  std::vector<ChiRoot> roots;
  std::vector<std::string> notes;  // near-tangencies and other observations
};

// Evaluate chi and lambda on a uniform anchor grid (gridN points, >= 16)
// and refine every sign change of chi by bisection. Grid evaluations run
// at the given tolerance; refinement always uses the tightest orbit
// tolerance so the certified root width of 1e-10 * K is meaningful.
// Evaluations are independent and run across the thread budget.
ChiScanResult scan_chi_roots(const ModelSpec& spec, int gridN = 400,
                             double tol = 1e-10);

enum class Verdict { GloballyStableEquilibrium, CyclesPredicted, Inconclusive };

std::string to_string(Verdict v);

struct LabeledRoot {
  double x0 = 0.0;
  double lambda = 0.0;
  std::string label;  // "stable" | "unstable" | "neutral"
};

struct RootClassification {
  std::vector<LabeledRoot> roots;
  Verdict verdict = Verdict::Inconclusive;
  int cycleCount = 0;  // decisive roots when cycles are predicted
  std::vector<std::string> notes;
};

// Interpret a scan: no roots with chi < 0 everywhere yields the globally
// stable equilibrium verdict (for small predator death rates); decisive
// roots predict that many relaxation cycles, stable where lambda < 0.
RootClassification classify_roots(const ModelSpec& spec,
                                  const ChiScanResult& scan);

// For the prey-dependent Holling type IV family on the normalized interval,
// the shape parameter kappa = a K^2 controls whether the two-hump isocline
// admits cycle candidates in the small-coupling limit. q(kappa) is the
// balance gap between the two hump levels; its root kappa* is the threshold
// above which two candidates exist.
double holling4_q(double kappa);
double holling4_kappa_star(double tol = 1e-10);

// Limits of the chi roots as the conversion efficiency c -> 0+, found by
// level bisection of the balance function along monotone stretches of the
// isocline.
struct SmallCLimits {
  std::optional<double> stableLimit;
  std::optional<double> unstableLimit;  // two-hump isoclines only
  bool twoCyclesInLimit = false;
  std::vector<std::string> notes;
};

SmallCLimits small_c_limits(const ModelSpec& spec);

// One-call summary: shape, scan, classification and (where the shape
// supports it) the small-coupling limits.
struct AnalysisReport {
  ModelSpec spec;
  IsoclineShape shape;
  double ybarValue = 0.0;
  ChiScanResult scan;
  RootClassification classification;
  SmallCLimits smallC;
  std::vector<std::string> notes;
};

AnalysisReport predict_dynamics(const ModelSpec& spec, int gridN = 400,
                                double tol = 1e-10);

std::string report_json(const AnalysisReport& report);

}  // namespace relaxosc
