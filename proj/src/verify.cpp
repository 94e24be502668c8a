#include "roc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "roc/simulate.hpp"

namespace roc {

namespace {

double rel_err(double measured, double reference) {
  return std::abs(measured - reference) / std::max(std::abs(reference), 1e-300);
}

ComplexMatrix eval_shift_resolvent(const Matrix& A, const Matrix& B,
                                   const Matrix& C, double omega) {
  const Complex z = std::polar(1.0, omega);
  ComplexMatrix lhs =
      z * ComplexMatrix::Identity(A.rows(), A.rows()) - A.cast<Complex>();
  return C.cast<Complex>() *
         Eigen::PartialPivLU<ComplexMatrix>(lhs).solve(B.cast<Complex>());
}

}  // namespace

bool all_passed(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

std::vector<CheckResult> verify_model(const PlantModel& model,
                                      const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  auto push = [&out](std::string name, double measured, double threshold,
                     std::string note = {}) {
    out.push_back({std::move(name), measured <= threshold, measured, threshold,
                   std::move(note)});
  };

  std::mt19937_64 gen(opts.seed);
  std::uniform_real_distribution<double> omega_dist(0.0, 2.0 * M_PI);
  std::vector<double> omegas(opts.omega_samples);
  for (double& w : omegas) w = omega_dist(gen);

  const RegretSynthesis syn = regret_synthesize(model);
  const RiccatiSolution& ric = syn.riccati;

  // Riccati equation residual and closed-loop stability.
  push("dare_residual",
       detail::dare_residual(model.A, model.B_u, model.Q, model.R, ric.P) /
           std::max(1.0, ric.P.norm()),
       1e-10);
  push("dare_closed_loop_stable", spectral_radius(ric.A_K), 1.0 - 1e-9);

  // Gramian equation residuals.
  const Matrix Reff_inv_bu =
      Eigen::PartialPivLU<Matrix>(ric.R_eff).solve(model.B_u.transpose());
  push("lyapunov_Z_residual",
       (syn.Z - ric.A_K * syn.Z * ric.A_K.transpose() -
        model.B_u * Reff_inv_bu)
               .norm() /
           std::max(1.0, syn.Z.norm()),
       1e-10);
  const Matrix PBw = ric.P * model.B_w;
  push("lyapunov_Pi_residual",
       (syn.Pi - ric.A_K.transpose() * syn.Pi * ric.A_K - PBw * PBw.transpose())
               .norm() /
           std::max(1.0, syn.Pi.norm()),
       1e-10);

  // Z_gamma is the Z equation scaled by gamma^{-2}.
  if (syn.gamma_sq > 0) {
    const double used_gamma_sq = syn.gamma_sq * (1.0 + syn.epsilon_used);
    push("z_gamma_scaling",
         (syn.Z_gamma - syn.Z / used_gamma_sq).norm() /
             std::max(1.0, syn.Z_gamma.norm()),
         1e-8);
  }
  push("regret_controller_stable", spectral_radius(syn.F_gamma), 1.0 - 1e-10);

  // Hankel oracle: the truncated-operator lower bound must meet the closed
  // form at the default horizon.
  {
    const int horizon = opts.horizon > 0
                            ? opts.horizon
                            : default_oracle_horizon(model, ric);
    const ToeplitzOracle oracle = toeplitz_truncate(model, ric, horizon);
    push("hankel_oracle_matches_gamma",
         rel_err(oracle_regret(oracle), syn.gamma_sq), 1e-6,
         "horizon " + std::to_string(horizon));
  }

  const SpectralFactors factors = spectral_factor(model, ric);
  const Decomposition dec = decompose_DK0(model, ric);
  const NoncausalEvaluator noncausal(model);

  // Spectral factorization, inverse, and decomposition identities at random
  // frequencies.
  {
    double worst_fact = 0.0, worst_inv = 0.0, worst_dec = 0.0, worst_h2 = 0.0;
    const Matrix R_sqrt = psd_sqrt(model.R);
    for (double w : omegas) {
      if (noncausal.pole_distance(w) < 1e-6) continue;
      const ComplexMatrix D = eval_realization(factors.Delta, w);
      const ComplexMatrix Dinv = eval_realization(factors.DeltaInv, w);
      const ComplexMatrix F = noncausal.transfer_F(w);
      const ComplexMatrix G = noncausal.transfer_G(w);
      const Index m = model.m();
      worst_fact = std::max(
          worst_fact,
          (D.adjoint() * D - F.adjoint() * F -
           ComplexMatrix::Identity(m, m))
              .norm());
      worst_inv = std::max(
          worst_inv, (D * Dinv - ComplexMatrix::Identity(m, m)).norm());
      const ComplexMatrix T = eval_realization(dec.T, w);
      const ComplexMatrix S = eval_realization(dec.S, w);
      worst_dec = std::max(
          worst_dec, (T + S + Dinv.adjoint() * F.adjoint() * G).norm());
      // Delta^{-1} S is the H2 law seen from the disturbance.
      const ComplexMatrix h2_map = eval_shift_resolvent(
          ric.A_K, model.B_w, -(R_sqrt * ric.K_lqr), w);
      worst_h2 = std::max(worst_h2, (Dinv * S - h2_map).norm());
    }
    push("spectral_factor_identity", worst_fact, 1e-8);
    push("delta_inverse_identity", worst_inv, 1e-8);
    push("decomposition_identity", worst_dec, 1e-8);
    push("h2_identity", worst_h2, 1e-8);
  }

  // Theorem-2 assembly equals the direct controller as a transfer function.
  {
    const NehariSolution nehari = nehari_solve(dec.shifted);
    const LtiRealization assembled =
        assemble_via_theorem2(model, ric, nehari, dec.S);
    double peak = 0.0;
    std::vector<ComplexMatrix> direct(omegas.size());
    for (size_t i = 0; i < omegas.size(); ++i) {
      direct[i] = eval_realization(syn.controller, omegas[i]);
      peak = std::max(peak, direct[i].norm());
    }
    double worst = 0.0;
    for (size_t i = 0; i < omegas.size(); ++i) {
      const ComplexMatrix assembled_tf =
          eval_realization(assembled, omegas[i]);
      worst = std::max(worst,
                       (assembled_tf - direct[i]).norm() / std::max(peak, 1e-12));
    }
    push("theorem2_assembly_equivalence", worst, 1e-6);
  }

  // Disturbance-driven and state-driven regret controllers produce the same
  // input sequence. The disturbance form carries an internal copy of the
  // plant, so on unstable plants roundoff between the two recursions grows
  // like rho(A)^t; cap the horizon where the comparison stays meaningful.
  {
    const double rho_a = spectral_radius(model.A);
    int horizon = 1000;
    if (rho_a > 1.0)
      horizon = std::min(
          horizon, static_cast<int>(4.0 / std::log10(rho_a)));
    DisturbanceSpec spec;
    spec.kind = DisturbanceSpec::Kind::white;
    spec.sigma = 1.0;
    spec.dim = model.p();
    spec.seed = opts.seed;
    const std::vector<Vector> w = gen_disturbance(spec, horizon);
    const SimTrace a = run_closed_loop(model, syn.controller, w);
    const SimTrace b = run_closed_loop(model, syn.controller_state_only, w);
    double worst = 0.0;
    for (size_t t = 0; t < a.u.size(); ++t)
      worst = std::max(worst, (a.u[t] - b.u[t]).norm());
    push("state_only_equivalence", worst, 1e-9,
         "horizon " + std::to_string(horizon));
  }

  // Frequency-domain metrics for the three synthesized controllers.
  std::vector<std::pair<std::string, LtiRealization>> controllers;
  controllers.emplace_back("regret", syn.controller_state_only);
  controllers.emplace_back("h2", h2_controller(ric));
  HinfSynthesis hinf;
  if (opts.include_hinf) {
    hinf = hinf_synthesize(model, opts.hinf_bisect_tol);
    controllers.emplace_back("hinf", hinf.controller);
  }
  const std::vector<SweepResult> sweeps =
      sweep(model, controllers, opts.grid_size);
  const SweepResult& regret_sweep = sweeps[0];
  const SweepResult& h2_sweep = sweeps[1];

  push("regret_peak_matches_gamma",
       rel_err(regret_sweep.regret_peak, syn.gamma_sq), 1e-4);

  // No causal controller's regret peak can undercut the optimum (the Hankel
  // lower bound applies to every strictly causal policy).
  {
    double others_min = std::numeric_limits<double>::infinity();
    for (size_t c = 1; c < sweeps.size(); ++c)
      others_min = std::min(others_min, sweeps[c].regret_peak);
    push("optimal_regret_lower_bounds_others", syn.gamma_sq - others_min,
         1e-8);
  }

  // Clairvoyant dominance: the regret integrand stays above zero for every
  // causal controller.
  {
    double most_negative = 0.0;
    for (const SweepResult& s : sweeps)
      for (double v : s.regret_integrand)
        if (std::isfinite(v)) most_negative = std::min(most_negative, v);
    push("noncausal_dominance", -most_negative, 1e-8);
  }

  // Metric dominance orderings with absolute slack.
  {
    double min_fro = h2_sweep.frobenius_sq;
    double min_regret = regret_sweep.regret_peak;
    double min_op = sweeps.front().opnorm_sq;
    for (const SweepResult& s : sweeps) {
      min_fro = std::min(min_fro, s.frobenius_sq);
      min_regret = std::min(min_regret, s.regret_peak);
      min_op = std::min(min_op, s.opnorm_sq);
    }
    push("h2_minimizes_frobenius", h2_sweep.frobenius_sq - min_fro, 1e-6);
    push("regret_minimizes_regret_peak",
         regret_sweep.regret_peak - min_regret, 1e-6);
    if (opts.include_hinf) {
      const SweepResult& hinf_sweep = sweeps[2];
      push("hinf_minimizes_opnorm", hinf_sweep.opnorm_sq - min_op, 1e-6);
      push("hinf_achieves_gamma",
           std::sqrt(hinf_sweep.opnorm_sq) -
               hinf.gamma_inf * (1.0 + 10.0 * opts.hinf_bisect_tol),
           0.0);
    }
  }

  return out;
}

}  // namespace roc
