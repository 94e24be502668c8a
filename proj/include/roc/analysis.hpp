#pragma once

#include <string>
#include <utility>
#include <vector>

#include "roc/model.hpp"
#include "roc/synthesis.hpp"
#include "roc/types.hpp"

namespace roc {

/// Closed-loop realization mapping w to [Q^{1/2} x; R^{1/2} u].
struct ClosedLoop {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;  // zero for strictly causal controllers
  Index state_cost_dim = 0;  // rows of the Q^{1/2} x block
};

/// Interconnects plant and controller. State-kind controllers close a
/// feedback loop through the plant state; disturbance-kind controllers are
/// open w -> u maps (their realization must be strictly causal, D = 0).
/// Throws UnstableLoop when the combined dynamics are not strictly stable.
ClosedLoop close_loop(const PlantModel& model,
                      const LtiRealization& controller);

/// T_K(e^{j omega}) = C (zI - A)^{-1} B + D.
ComplexMatrix eval_frequency(const ClosedLoop& cl, double omega);

/// Per-frequency evaluation of the plant resolvent transfer functions
///   F(z) = Q^{1/2} (zI - A)^{-1} B_u R^{-1/2},
///   G(z) = Q^{1/2} (zI - A)^{-1} B_w
/// and of the clairvoyant cost spectrum G^* (I + F F^*)^{-1} G. The plant
/// may be unstable; evaluation is pointwise on the unit circle with a
/// singularity guard around eigenvalues of A.
class NoncausalEvaluator {
 public:
  explicit NoncausalEvaluator(const PlantModel& model);

  /// Distance from e^{j omega} to the closest eigenvalue of A.
  double pole_distance(double omega) const;

  ComplexMatrix transfer_F(double omega) const;
  ComplexMatrix transfer_G(double omega) const;

  /// Hermitian PSD matrix T_{K0}^* T_{K0} (e^{j omega}).
  /// Throws ResolventSingular within `guard` of an eigenvalue of A.
  ComplexMatrix gram(double omega, double guard = 1e-8) const;

 private:
  Matrix A_;
  Matrix Bu_scaled_;  // B_u R^{-1/2}
  Matrix Bw_;
  Matrix Q_sqrt_;
  ComplexVector poles_;
};

/// Convenience wrapper for a single evaluation.
ComplexMatrix noncausal_gram(const PlantModel& model, double omega);

/// Per-frequency metric grid for one controller: the integrands of the
/// squared Frobenius norm, squared operator norm, and regret metrics,
/// plus their aggregates. Skipped entries mark grid points rejected by
/// the resolvent guard and are excluded from the aggregates.
struct SweepResult {
  std::string name;
  std::vector<double> omegas;
  std::vector<double> frobenius_integrand;  // trace(T_K^* T_K)
  std::vector<double> opnorm_integrand;     // sigma_max^2(T_K)
  std::vector<double> regret_integrand;     // lambda_max(T_K^*T_K - T_K0^*T_K0)
  std::vector<Index> skipped;
  double frobenius_sq = 0.0;
  double opnorm_sq = 0.0;
  double regret_peak = 0.0;
  double opnorm_peak_omega = 0.0;
  double regret_peak_omega = 0.0;
};

/// Sweeps every controller over a uniform grid on [0, 2pi). Frobenius
/// aggregates use the trapezoid rule (rectangle rule on the periodic grid);
/// the two peak aggregates refine the grid maximum by golden-section search.
std::vector<SweepResult> sweep(
    const PlantModel& model,
    const std::vector<std::pair<std::string, LtiRealization>>& controllers,
    int grid_size);

/// Metrics of the clairvoyant controller itself: regret integrand is
/// identically zero.
SweepResult sweep_noncausal(const PlantModel& model, int grid_size);

/// Finite-horizon block-Toeplitz/Hankel truncation used as the independent
/// verification oracle.
struct ToeplitzOracle {
  int horizon = 0;
  Matrix F_N;     // strictly causal block Toeplitz of F, (N n) x (N m)
  Matrix G_N;     // strictly causal block Toeplitz of G, (N n) x (N p)
  Matrix K0_N;    // -(I + F_N' F_N)^{-1} F_N' G_N
  Matrix hankel;  // Hankel blocks H F^{i+j} G of the anticausal target
  Vector hankel_singular_values;  // descending; at least the largest
};

/// Builds the truncation at horizon N >= 1. Memory guard: throws Error when
/// N * max(m, p) exceeds 4096.
ToeplitzOracle toeplitz_truncate(const PlantModel& model,
                                 const RiccatiSolution& riccati, int N);

/// Horizon that ties the truncation tail to the closed-loop decay:
/// ceil(log(1e-8) / log(max(rho(A_K), 0.1))), capped by the memory guard.
int default_oracle_horizon(const PlantModel& model,
                           const RiccatiSolution& riccati);

/// Squared top singular value of the truncated Hankel matrix; converges
/// monotonically to lambda_max(Z Pi) as the horizon grows.
double oracle_regret(const ToeplitzOracle& oracle);

}  // namespace roc
