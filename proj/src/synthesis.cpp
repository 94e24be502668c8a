#include "roc/synthesis.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace roc {

RiccatiSolution lqr_synthesize(const PlantModel& model) {
  RiccatiSolution sol;
  sol.P = solve_dare({model.A, model.B_u, model.Q, model.R});
  sol.R_eff = symmetrize(model.R + model.B_u.transpose() * sol.P * model.B_u);
  sol.K_lqr = Eigen::PartialPivLU<Matrix>(sol.R_eff)
                  .solve(model.B_u.transpose() * sol.P * model.A);
  sol.A_K = model.A - model.B_u * sol.K_lqr;
  sol.R_eff_sqrt = psd_sqrt(sol.R_eff);
  return sol;
}

LtiRealization h2_controller(const RiccatiSolution& riccati) {
  return static_gain(-riccati.K_lqr, InputKind::state, "h2 state feedback");
}

SpectralFactors spectral_factor(const PlantModel& model,
                                const RiccatiSolution& riccati) {
  const Matrix R_sqrt = psd_sqrt(model.R);
  const Matrix R_inv_sqrt = psd_inv_sqrt(model.R);
  const Matrix R_eff_inv_sqrt = psd_inv_sqrt(riccati.R_eff);

  SpectralFactors f;
  f.Delta.A = model.A;
  f.Delta.B = model.B_u * R_inv_sqrt;
  f.Delta.C = riccati.R_eff_sqrt * riccati.K_lqr;
  f.Delta.D = riccati.R_eff_sqrt * R_inv_sqrt;
  f.Delta.input_kind = InputKind::plant_input;
  f.Delta.note = "spectral factor";

  f.DeltaInv.A = riccati.A_K;
  f.DeltaInv.B = model.B_u * R_eff_inv_sqrt;
  f.DeltaInv.C = -R_sqrt * riccati.K_lqr;
  f.DeltaInv.D = R_sqrt * R_eff_inv_sqrt;
  f.DeltaInv.input_kind = InputKind::plant_input;
  f.DeltaInv.note = "inverse spectral factor";
  return f;
}

Decomposition decompose_DK0(const PlantModel& model,
                            const RiccatiSolution& riccati) {
  const Matrix R_eff_inv_sqrt = psd_inv_sqrt(riccati.R_eff);
  const Matrix H = -R_eff_inv_sqrt * model.B_u.transpose();  // m x n
  const Matrix PBw = riccati.P * model.B_w;                  // n x p

  Decomposition d;
  d.S.A = model.A;
  d.S.B = model.B_w;
  d.S.C = H * riccati.P * model.A;
  d.S.D = Matrix::Zero(H.rows(), model.p());
  d.S.input_kind = InputKind::disturbance;
  d.S.note = "strictly causal part of Delta K0";

  d.T.A = riccati.A_K.transpose();
  d.T.B = riccati.A_K.transpose() * PBw;
  d.T.C = H;
  d.T.D = H * PBw;
  d.T.input_kind = InputKind::disturbance;
  d.T.causality = Causality::anticausal;
  d.T.note = "anticausal part of Delta K0";

  d.shifted.F = riccati.A_K.transpose();
  d.shifted.G = PBw;
  d.shifted.H = H;
  return d;
}

namespace {

struct GainAttempt {
  Matrix Z_gamma;
  Matrix K_gamma;
  Matrix F_gamma;
  double pivot_condition = 0.0;
  bool pivot_ok = false;
  bool stable = false;
};

GainAttempt central_gains(const NehariProblem& prob, const Matrix& Pi,
                          const Matrix& HtH, double gamma_sq,
                          double condition_limit) {
  GainAttempt at;
  at.Z_gamma = solve_dlyap(prob.F.transpose(), HtH / gamma_sq);
  const Index n = prob.F.rows();
  const Matrix pivot =
      Matrix::Identity(n, n) - prob.F.transpose() * at.Z_gamma * prob.F * Pi;
  Eigen::JacobiSVD<Matrix> svd(pivot, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = svd.singularValues().minCoeff();
  at.pivot_condition =
      smin > 0 ? svd.singularValues().maxCoeff() / smin
               : std::numeric_limits<double>::infinity();
  at.pivot_ok = at.pivot_condition <= condition_limit;
  if (!at.pivot_ok) return at;
  at.K_gamma = svd.solve(prob.F.transpose() * at.Z_gamma * prob.G);
  at.F_gamma = prob.F.transpose() - at.K_gamma * prob.G.transpose();
  at.stable = spectral_radius(at.F_gamma) < 1.0 - 1e-10;
  return at;
}

}  // namespace

LtiRealization NehariSolution::strictly_causal() const {
  LtiRealization r;
  r.A = F_gamma;
  r.B = K_gamma;
  r.C = H_Pi;
  r.D = Matrix::Zero(H_Pi.rows(), K_gamma.cols());
  r.input_kind = L.input_kind;
  r.note = "strictly causal Nehari solution";
  return r;
}

NehariSolution nehari_solve(const NehariProblem& prob,
                            std::optional<double> gamma_sq,
                            const SynthesisOptions& opts) {
  const Index n = prob.F.rows();
  if (prob.F.cols() != n || prob.G.rows() != n || prob.H.cols() != n)
    throw Error("nehari_solve: inconsistent dimensions");
  if (spectral_radius(prob.F) >= 1.0 - 1e-9)
    throw UnstableF("nehari_solve: rho(F) >= 1");

  NehariSolution sol;
  const Matrix HtH = prob.H.transpose() * prob.H;
  sol.Z = solve_dlyap(prob.F.transpose(), HtH);
  sol.Pi = solve_dlyap(prob.F, prob.G * prob.G.transpose());
  const double lam = lambda_max_product(sol.Z, sol.Pi);
  sol.gamma_sq = gamma_sq.value_or(lam);
  sol.gamma_sq_used = sol.gamma_sq;

  const Index p = prob.G.cols();
  const Index m = prob.H.rows();
  if (sol.gamma_sq <= 1e-300) {
    // Nothing to approximate: either H = 0 or G = 0.
    sol.gamma_sq = 0.0;
    sol.gamma_sq_used = 0.0;
    sol.Z_gamma = Matrix::Zero(n, n);
    sol.K_gamma = Matrix::Zero(n, p);
    sol.F_gamma = prob.F.transpose();
    sol.H_Pi = prob.H * sol.Pi;
    sol.L.A = sol.F_gamma;
    sol.L.B = sol.K_gamma;
    sol.L.C = Matrix::Zero(m, n);
    sol.L.D = Matrix::Zero(m, p);
    sol.L.note = "nehari central solution";
    return sol;
  }

  GainAttempt at =
      central_gains(prob, sol.Pi, HtH, sol.gamma_sq_used, opts.condition_limit);
  if ((!at.pivot_ok || !at.stable) && !gamma_sq.has_value()) {
    // Exactly at the optimum the pivot can be singular; back off slightly.
    sol.epsilon_used = opts.epsilon_gamma;
    sol.gamma_sq_used = (1.0 + sol.epsilon_used) * lam;
    at = central_gains(prob, sol.Pi, HtH, sol.gamma_sq_used,
                       opts.condition_limit);
  }
  if (!at.pivot_ok)
    throw SingularPivot("nehari_solve: pivot condition " +
                        std::to_string(at.pivot_condition));
  if (!at.stable)
    throw UnstableResult("nehari_solve: rho(F_gamma) >= 1");

  sol.Z_gamma = at.Z_gamma;
  sol.K_gamma = at.K_gamma;
  sol.F_gamma = at.F_gamma;
  sol.pivot_condition = at.pivot_condition;
  sol.H_Pi = prob.H * sol.Pi;
  sol.L.A = sol.F_gamma;
  sol.L.B = sol.K_gamma;
  sol.L.C = sol.H_Pi * sol.F_gamma;
  sol.L.D = sol.H_Pi * sol.K_gamma;
  sol.L.note = "nehari central solution";
  return sol;
}

RegretSynthesis regret_synthesize(const PlantModel& model,
                                  const SynthesisOptions& opts) {
  RegretSynthesis syn;
  syn.riccati = lqr_synthesize(model);

  NehariProblem prob;
  prob.F = syn.riccati.A_K.transpose();
  prob.G = syn.riccati.P * model.B_w;
  prob.H = -psd_inv_sqrt(syn.riccati.R_eff) * model.B_u.transpose();
  const NehariSolution nehari = nehari_solve(prob, std::nullopt, opts);

  syn.Z = nehari.Z;
  syn.Pi = nehari.Pi;
  syn.gamma_sq = nehari.gamma_sq;
  syn.Z_gamma = nehari.Z_gamma;
  syn.K_gamma = nehari.K_gamma;
  syn.F_gamma = nehari.F_gamma;
  syn.epsilon_used = nehari.epsilon_used;
  syn.pivot_condition = nehari.pivot_condition;

  const Index n = model.n();
  const Index m = model.m();
  const Index p = model.p();
  syn.uhat_gain = -Eigen::PartialPivLU<Matrix>(syn.riccati.R_eff)
                       .solve(model.B_u.transpose() * syn.Pi);

  // Disturbance-driven w -> u map. The lower block replicates the plant under
  // u_t = uhat_t - K_lqr x_t so the realization is stable even when A is not.
  syn.controller.A = Matrix::Zero(2 * n, 2 * n);
  syn.controller.A.topLeftCorner(n, n) = syn.F_gamma;
  syn.controller.A.bottomLeftCorner(n, n) = model.B_u * syn.uhat_gain;
  syn.controller.A.bottomRightCorner(n, n) = syn.riccati.A_K;
  syn.controller.B = Matrix::Zero(2 * n, p);
  syn.controller.B.topRows(n) = syn.K_gamma;
  syn.controller.B.bottomRows(n) = model.B_w;
  syn.controller.C = Matrix::Zero(m, 2 * n);
  syn.controller.C.leftCols(n) = syn.uhat_gain;
  syn.controller.C.rightCols(n) = -syn.riccati.K_lqr;
  syn.controller.D = Matrix::Zero(m, p);
  syn.controller.input_kind = InputKind::disturbance;
  syn.controller.note = "regret-optimal controller";

  syn.controller_state_only = regret_controller_state_only(syn, model);
  return syn;
}

LtiRealization regret_controller_state_only(const RegretSynthesis& syn,
                                            const PlantModel& model) {
  const Index n = model.n();
  const Matrix pivot = Matrix::Identity(n, n) -
                       syn.riccati.A_K * syn.Z_gamma *
                           syn.riccati.A_K.transpose() * syn.Pi;
  Matrix M;
  if (syn.gamma_sq <= 1e-300) {
    M = Matrix::Zero(n, n);
  } else {
    M = Eigen::PartialPivLU<Matrix>(pivot).solve(
        syn.riccati.A_K * syn.Z_gamma * syn.riccati.P);
  }
  const Matrix& Cu = syn.uhat_gain;

  // Run xi on the innovation B_w w_{t-1} = x_t - A x_{t-1} - B_u u_{t-1};
  // the internal state is mu_t = xi_t - M x_t so that the realization is
  // driven by x alone.
  LtiRealization r;
  r.A = syn.F_gamma - M * model.B_u * Cu;
  r.B = syn.F_gamma * M - M * syn.riccati.A_K - M * model.B_u * Cu * M;
  r.C = Cu;
  r.D = Cu * M - syn.riccati.K_lqr;
  r.input_kind = InputKind::state;
  r.note = "regret-optimal controller (state form)";
  return r;
}

LtiRealization assemble_via_theorem2(const PlantModel& model,
                                     const RiccatiSolution& riccati,
                                     const NehariSolution& nehari,
                                     const LtiRealization& S) {
  const SpectralFactors factors = spectral_factor(model, riccati);
  const LtiRealization sum = parallel_sum(nehari.strictly_causal(), S);
  LtiRealization assembled = series(sum, factors.DeltaInv);
  // DeltaInv lands in the scaled input v = R^{1/2} u; undo the scaling so
  // the assembled controller is a plain w -> u map.
  const Matrix R_inv_sqrt = psd_inv_sqrt(model.R);
  assembled.C = R_inv_sqrt * assembled.C;
  assembled.D = R_inv_sqrt * assembled.D;
  assembled.input_kind = InputKind::disturbance;
  assembled.note = "controller assembled from DeltaInv (L + S)";
  return assembled;
}

namespace {

struct GameFeasibility {
  bool feasible = false;
  Matrix P;
  Matrix K_u;
};

// Tries the game Riccati equation at a fixed gamma and checks the saddle
// conditions: R + B_u'PB_u > 0, gamma^2 I - B_w'PB_w > 0, game closed loop
// stable, and the u-feedback loop stable.
GameFeasibility game_riccati(const PlantModel& model, double gamma) {
  GameFeasibility out;
  const Index n = model.n();
  const Index m = model.m();
  const Index p = model.p();
  Matrix B(n, m + p);
  B.leftCols(m) = model.B_u;
  B.rightCols(p) = model.B_w;
  Matrix Rhat = Matrix::Zero(m + p, m + p);
  Rhat.topLeftCorner(m, m) = model.R;
  Rhat.bottomRightCorner(p, p) = -gamma * gamma * Matrix::Identity(p, p);

  std::optional<Matrix> P =
      detail::dare_doubling(model.A, B, model.Q, Rhat, 1e-12);
  if (!P) P = detail::dare_fixed_point(model.A, B, model.Q, Rhat, 1e-12);
  if (!P || !P->allFinite()) return out;
  const Matrix sol = symmetrize(*P);
  if (min_eigenvalue(sol) < -1e-9 * std::max(1.0, sol.norm())) return out;

  const Matrix R_uu = symmetrize(model.R + model.B_u.transpose() * sol * model.B_u);
  Eigen::LLT<Matrix> uu_llt(R_uu);
  if (uu_llt.info() != Eigen::Success) return out;
  // The controller moves first, so the disturbance quadratic must be concave
  // for every fixed u: gamma^2 I - B_w'PB_w > 0. This is stronger than the
  // joint-saddle Schur condition.
  const Matrix PBw = sol * model.B_w;
  const Matrix concavity = symmetrize(
      gamma * gamma * Matrix::Identity(p, p) - model.B_w.transpose() * PBw);
  if (min_eigenvalue(concavity) <= 0) return out;

  const Matrix Re = symmetrize(Rhat + B.transpose() * sol * B);
  Eigen::FullPivLU<Matrix> Re_lu(Re);
  if (!Re_lu.isInvertible()) return out;
  const Matrix K_full = Re_lu.solve(B.transpose() * sol * model.A);
  if (spectral_radius(model.A - B * K_full) >= 1.0 - 1e-10) return out;
  const Matrix K_u = K_full.topRows(m);
  if (spectral_radius(model.A - model.B_u * K_u) >= 1.0 - 1e-10) return out;

  const double res = detail::dare_residual(model.A, B, model.Q, Rhat, sol);
  if (res > 1e-8 * std::max(1.0, sol.norm())) return out;

  out.feasible = true;
  out.P = sol;
  out.K_u = K_u;
  return out;
}

// Coarse upper bound for the bisection bracket: the operator norm of the
// LQR closed loop on a frequency grid.
double h2_loop_norm_bound(const PlantModel& model,
                          const RiccatiSolution& riccati) {
  const Index n = model.n();
  const Matrix Q_sqrt = psd_sqrt(model.Q);
  const Matrix R_sqrt = psd_sqrt(model.R);
  Matrix C(n + model.m(), n);
  C.topRows(n) = Q_sqrt;
  C.bottomRows(model.m()) = -R_sqrt * riccati.K_lqr;
  double peak = 0.0;
  const int grid = 512;
  for (int k = 0; k < grid; ++k) {
    const double omega = 2.0 * M_PI * k / grid;
    const Complex z = std::polar(1.0, omega);
    ComplexMatrix resolvent =
        z * ComplexMatrix::Identity(n, n) - riccati.A_K.cast<Complex>();
    ComplexMatrix Tk = C.cast<Complex>() *
                       Eigen::PartialPivLU<ComplexMatrix>(resolvent)
                           .solve(model.B_w.cast<Complex>());
    Eigen::JacobiSVD<ComplexMatrix> svd(Tk);
    peak = std::max(peak, svd.singularValues()(0));
  }
  return peak;
}

}  // namespace

HinfSynthesis hinf_synthesize(const PlantModel& model, double bisect_tol) {
  if (bisect_tol <= 0 || bisect_tol >= 1)
    throw Error("hinf_synthesize: bisect_tol must lie in (0, 1)");
  const RiccatiSolution riccati = lqr_synthesize(model);

  HinfSynthesis out;
  if (model.B_w.norm() == 0.0) {
    // No disturbance path: every stabilizing controller has zero norm.
    out.gamma_inf = 0.0;
    out.controller = h2_controller(riccati);
    out.controller.note = "hinf central state feedback";
    out.P = riccati.P;
    return out;
  }

  double hi = 1.001 * h2_loop_norm_bound(model, riccati) + 1e-9;
  GameFeasibility best = game_riccati(model, hi);
  int doublings = 0;
  while (!best.feasible && doublings++ < 60) {
    hi *= 2.0;
    best = game_riccati(model, hi);
  }
  if (!best.feasible)
    throw BisectionFailure("hinf_synthesize: no feasible gamma in bracket");

  double lo = 0.0;
  int steps = 0;
  while (hi - lo > bisect_tol * hi && steps++ < 200) {
    const double mid = 0.5 * (hi + lo);
    GameFeasibility attempt = game_riccati(model, mid);
    if (attempt.feasible) {
      hi = mid;
      best = std::move(attempt);
    } else {
      lo = mid;
    }
  }

  out.gamma_inf = hi;
  out.controller =
      static_gain(-best.K_u, InputKind::state, "hinf central state feedback");
  out.P = best.P;
  out.bisection_steps = steps;
  return out;
}

}  // namespace roc
