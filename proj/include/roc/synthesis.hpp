#pragma once

#include <optional>

#include "roc/linalg.hpp"
#include "roc/model.hpp"
#include "roc/types.hpp"

namespace roc {

/// Stabilizing LQR Riccati data of a plant.
struct RiccatiSolution {
  Matrix P;           // stabilizing DARE solution, n x n PSD
  Matrix K_lqr;       // (R + B_u'PB_u)^{-1} B_u'PA
  Matrix A_K;         // A - B_u K_lqr, strictly stable
  Matrix R_eff;       // R + B_u'PB_u
  Matrix R_eff_sqrt;  // symmetric square root of R_eff
};

RiccatiSolution lqr_synthesize(const PlantModel& model);

/// Static state feedback u = -K_lqr x.
LtiRealization h2_controller(const RiccatiSolution& riccati);

/// Canonical factors of I + F'(z^-*) F(z) = Delta'(z^-*) Delta(z).
/// Delta maps the scaled plant input; its inverse has poles at A_K only.
struct SpectralFactors {
  LtiRealization Delta;
  LtiRealization DeltaInv;
};

SpectralFactors spectral_factor(const PlantModel& model,
                                const RiccatiSolution& riccati);

/// Strictly anticausal approximation target T(z) = H (z^{-1} I - F)^{-1} G
/// with stable F.
struct NehariProblem {
  Matrix F;  // n x n, rho(F) < 1
  Matrix G;  // n x p
  Matrix H;  // m x n
};

/// Additive split Delta(z) K0(z) = T(z) + S(z) into the anticausal part T
/// (returned with its constant term) and the strictly causal part S.
/// `shifted` carries the data of z T(z), which is the strictly anticausal
/// target handed to the Nehari solver.
struct Decomposition {
  LtiRealization T;  // anticausal-tagged
  LtiRealization S;  // strictly causal, poles at A
  NehariProblem shifted;
};

Decomposition decompose_DK0(const PlantModel& model,
                            const RiccatiSolution& riccati);

struct SynthesisOptions {
  /// Relative inflation applied to gamma^2 when the gain pivot
  /// I - F' Z_gamma F Pi is too ill-conditioned at the exact optimum.
  double epsilon_gamma = 1e-8;
  /// Condition-number guard on the pivot.
  double condition_limit = 1e12;
};

/// Central solution of the Nehari problem for a state-space target.
struct NehariSolution {
  double gamma_sq = 0.0;      // squared optimal (or requested) error norm
  double gamma_sq_used = 0.0; // value the gains were computed at; differs
                              // from gamma_sq only when the epsilon
                              // fallback engaged
  Matrix Z;                   // observability Gramian, Z = F'ZF + H'H
  Matrix Pi;                  // controllability Gramian, Pi = F Pi F' + GG'
  Matrix Z_gamma;             // Z_gamma = F'Z_gamma F + gamma^{-2} H'H
  Matrix K_gamma;             // (I - F'Z_gamma F Pi)^{-1} F'Z_gamma G
  Matrix F_gamma;             // F' - K_gamma G'
  Matrix H_Pi;                // output map H * Pi of the solution
  LtiRealization L;           // causal: H Pi (I + F_g (zI - F_g)^{-1}) K_g
  double epsilon_used = 0.0;
  double pivot_condition = 0.0;

  /// z^{-1} L(z), the strictly causal form used by the controller assembly.
  LtiRealization strictly_causal() const;
};

/// Solves min over causal L of ||L - T|| for the strictly anticausal target.
/// With no explicit gamma_sq the optimum lambda_max(Z Pi) is used.
NehariSolution nehari_solve(const NehariProblem& prob,
                            std::optional<double> gamma_sq = std::nullopt,
                            const SynthesisOptions& opts = {});

/// Everything produced by the regret-optimal synthesis.
struct RegretSynthesis {
  RiccatiSolution riccati;
  Matrix Z;             // Z = A_K Z A_K' + B_u R_eff^{-1} B_u'
  Matrix Pi;            // Pi = A_K' Pi A_K + P B_w B_w' P
  double gamma_sq = 0;  // optimal regret lambda_max(Z Pi)
  Matrix Z_gamma;
  Matrix K_gamma;
  Matrix F_gamma;
  Matrix uhat_gain;  // -R_eff^{-1} B_u' Pi
  /// Disturbance-driven controller: the full w -> u map. States are the
  /// Nehari state xi and an internal copy of the plant state; stable
  /// regardless of the plant's own stability.
  LtiRealization controller;
  /// State-driven form that reconstructs B_w w_{t-1} from the observed
  /// states and its own past input; n states, identical input-output map.
  LtiRealization controller_state_only;
  double epsilon_used = 0.0;
  double pivot_condition = 0.0;
};

RegretSynthesis regret_synthesize(const PlantModel& model,
                                  const SynthesisOptions& opts = {});

/// Rebuilds the state-driven controller of a synthesis result.
LtiRealization regret_controller_state_only(const RegretSynthesis& syn,
                                            const PlantModel& model);

/// Controller assembled as DeltaInv * (L + S) from the Nehari solution and
/// the strictly causal part of the decomposition; returns the w -> u map.
/// Transfer-function identical to RegretSynthesis::controller.
LtiRealization assemble_via_theorem2(const PlantModel& model,
                                     const RiccatiSolution& riccati,
                                     const NehariSolution& nehari,
                                     const LtiRealization& S);

/// Full-information central H-infinity state feedback found by bisection on
/// the game-type Riccati equation with input block [B_u B_w] and weight
/// diag(R, -gamma^2 I).
struct HinfSynthesis {
  double gamma_inf = 0.0;  // smallest feasible gamma found (operator norm)
  LtiRealization controller;
  Matrix P;  // game Riccati solution at gamma_inf
  int bisection_steps = 0;
};

HinfSynthesis hinf_synthesize(const PlantModel& model,
                              double bisect_tol = 1e-4);

}  // namespace roc
