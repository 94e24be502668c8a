#pragma once

#include <string>
#include <vector>

#include "roc/analysis.hpp"
#include "roc/model.hpp"
#include "roc/synthesis.hpp"
#include "roc/types.hpp"

namespace roc {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;   // the measured slack or error
  double threshold = 0.0;  // what it was compared against
  std::string note;
};

struct VerifyOptions {
  int grid_size = 1024;       // frequency grid for identity/dominance checks
  int omega_samples = 128;    // random frequencies for pointwise identities
  int horizon = 0;            // 0 = default oracle horizon
  double hinf_bisect_tol = 1e-4;
  bool include_hinf = true;   // the game solver dominates verify runtime
  std::uint64_t seed = 20210317;
};

/// Runs the invariant-and-oracle suite on one plant: Riccati and Lyapunov
/// residuals, the Hankel-oracle bound on the optimal regret, the spectral
/// factorization and decomposition identities, controller-equivalence
/// checks, non-causal dominance, and the metric dominance orderings.
std::vector<CheckResult> verify_model(const PlantModel& model,
                                      const VerifyOptions& opts = {});

/// True when every check passed.
bool all_passed(const std::vector<CheckResult>& checks);

}  // namespace roc
