#pragma once

// Acceptance checks exercised both by the test suite and by the `verify`
// command of the CLI: each check states a quantitative prediction of the
// singular-orbit analysis and measures it against direct simulation (or
// an independent integrator) at fixed tolerances.

#include <string>
#include <vector>

namespace relaxosc::verify {

struct CheckResult {
  std::string id;           // stable kebab-case name
  std::string description;  // what the check asserts
  bool passed = false;
  std::string details;      // measured numbers backing the verdict
};

struct AcceptanceOptions {
  // Run only checks whose id contains this substring (empty: all).
  std::string filter;
  // Harness self-test: deliberately corrupt one measured value (the sign
  // of the stability characteristic in the oracle-agreement check) so the
  // affected check must fail. Never use outside harness tests.
  bool injectFailure = false;
};

// Names of all registered checks, in execution order.
std::vector<std::string> check_ids();

std::vector<CheckResult> run_acceptance(const AcceptanceOptions& opt = {});

}  // namespace relaxosc::verify
