#include "roc/analysis.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace roc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

ComplexMatrix resolvent_solve(const Matrix& A, const Matrix& B, double omega) {
  const Complex z = std::polar(1.0, omega);
  ComplexMatrix lhs =
      z * ComplexMatrix::Identity(A.rows(), A.rows()) - A.cast<Complex>();
  return Eigen::PartialPivLU<ComplexMatrix>(lhs).solve(B.cast<Complex>());
}

double lambda_max_hermitian(const ComplexMatrix& M) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
      ComplexMatrix(0.5 * (M + M.adjoint())), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

/// Golden-section maximization on [a, b]. `f` may return NaN for guarded
/// points, which the search treats as -inf.
std::pair<double, double> golden_max(const std::function<double(double)>& f,
                                     double a, double b, int iters = 80) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  auto safe = [&](double x) {
    const double v = f(x);
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  };
  double x1 = b - phi * (b - a);
  double x2 = a + phi * (b - a);
  double f1 = safe(x1);
  double f2 = safe(x2);
  for (int i = 0; i < iters && (b - a) > 1e-12; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = safe(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = safe(x1);
    }
  }
  return f1 > f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace

ClosedLoop close_loop(const PlantModel& model,
                      const LtiRealization& controller) {
  check_realization(controller);
  if (controller.causality != Causality::causal)
    throw Error("close_loop: controller must be causal");
  if (controller.output_dim() != model.m())
    throw Error("close_loop: controller output dimension mismatch");

  const Index n = model.n();
  const Index m = model.m();
  const Index nc = controller.state_dim();
  const Matrix Q_sqrt = psd_sqrt(model.Q);
  const Matrix R_sqrt = psd_sqrt(model.R);

  ClosedLoop cl;
  cl.state_cost_dim = n;
  cl.A = Matrix::Zero(n + nc, n + nc);
  cl.B = Matrix::Zero(n + nc, model.p());
  cl.C = Matrix::Zero(n + m, n + nc);
  cl.D = Matrix::Zero(n + m, model.p());
  cl.C.topLeftCorner(n, n) = Q_sqrt;

  switch (controller.input_kind) {
    case InputKind::state:
      // Feedback interconnection u = C xi + D x.
      cl.A.topLeftCorner(n, n) = model.A + model.B_u * controller.D;
      cl.A.topRightCorner(n, nc) = model.B_u * controller.C;
      cl.A.bottomLeftCorner(nc, n) = controller.B;
      cl.A.bottomRightCorner(nc, nc) = controller.A;
      cl.B.topRows(n) = model.B_w;
      cl.C.bottomLeftCorner(m, n) = R_sqrt * controller.D;
      cl.C.bottomRightCorner(m, nc) = R_sqrt * controller.C;
      break;
    case InputKind::disturbance:
      // Open interconnection u = K(w); strict causality demands D = 0.
      if (controller.D.norm() != 0.0)
        throw Error("close_loop: disturbance-driven controller must be "
                    "strictly causal (D = 0)");
      cl.A.topLeftCorner(n, n) = model.A;
      cl.A.topRightCorner(n, nc) = model.B_u * controller.C;
      cl.A.bottomRightCorner(nc, nc) = controller.A;
      cl.B.topRows(n) = model.B_w;
      cl.B.bottomRows(nc) = controller.B;
      cl.C.bottomRightCorner(m, nc) = R_sqrt * controller.C;
      break;
    case InputKind::plant_input:
      throw Error("close_loop: controller input kind must be disturbance "
                  "or state");
  }

  if (spectral_radius(cl.A) >= 1.0 - 1e-9)
    throw UnstableLoop("close_loop: closed loop not strictly stable");
  return cl;
}

ComplexMatrix eval_frequency(const ClosedLoop& cl, double omega) {
  if (cl.A.rows() == 0) return cl.D.cast<Complex>();
  return cl.C.cast<Complex>() * resolvent_solve(cl.A, cl.B, omega) +
         cl.D.cast<Complex>();
}

NoncausalEvaluator::NoncausalEvaluator(const PlantModel& model)
    : A_(model.A),
      Bu_scaled_(model.B_u * psd_inv_sqrt(model.R)),
      Bw_(model.B_w),
      Q_sqrt_(psd_sqrt(model.Q)) {
  Eigen::EigenSolver<Matrix> es(A_, /*computeEigenvectors=*/false);
  poles_ = es.eigenvalues();
}

double NoncausalEvaluator::pole_distance(double omega) const {
  const Complex z = std::polar(1.0, omega);
  double d = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < poles_.size(); ++i)
    d = std::min(d, std::abs(z - poles_(i)));
  return d;
}

ComplexMatrix NoncausalEvaluator::transfer_F(double omega) const {
  return Q_sqrt_.cast<Complex>() * resolvent_solve(A_, Bu_scaled_, omega);
}

ComplexMatrix NoncausalEvaluator::transfer_G(double omega) const {
  return Q_sqrt_.cast<Complex>() * resolvent_solve(A_, Bw_, omega);
}

ComplexMatrix NoncausalEvaluator::gram(double omega, double guard) const {
  if (pole_distance(omega) < guard)
    throw ResolventSingular("noncausal_gram: e^{j omega} within guard of an "
                            "eigenvalue of A");
  const ComplexMatrix F = transfer_F(omega);
  const ComplexMatrix G = transfer_G(omega);
  const Index n = F.rows();
  ComplexMatrix M = ComplexMatrix::Identity(n, n) + F * F.adjoint();
  ComplexMatrix out =
      G.adjoint() * Eigen::PartialPivLU<ComplexMatrix>(M).solve(G);
  return 0.5 * (out + out.adjoint());
}

ComplexMatrix noncausal_gram(const PlantModel& model, double omega) {
  return NoncausalEvaluator(model).gram(omega);
}

namespace {

/// Aggregates one sweep: quadrature mean plus golden-section refinement of
/// the two peak metrics around their grid maxima.
void finalize_sweep(SweepResult& r, const std::function<double(double)>& op_f,
                    const std::function<double(double)>& regret_f) {
  const Index grid = static_cast<Index>(r.omegas.size());
  double fro_sum = 0.0;
  Index fro_count = 0;
  Index op_arg = -1;
  Index regret_arg = -1;
  double op_max = -std::numeric_limits<double>::infinity();
  double regret_max = -std::numeric_limits<double>::infinity();
  for (Index k = 0; k < grid; ++k) {
    if (std::isfinite(r.frobenius_integrand[k])) {
      fro_sum += r.frobenius_integrand[k];
      ++fro_count;
    }
    if (std::isfinite(r.opnorm_integrand[k]) &&
        r.opnorm_integrand[k] > op_max) {
      op_max = r.opnorm_integrand[k];
      op_arg = k;
    }
    if (std::isfinite(r.regret_integrand[k]) &&
        r.regret_integrand[k] > regret_max) {
      regret_max = r.regret_integrand[k];
      regret_arg = k;
    }
  }
  r.frobenius_sq = fro_count > 0 ? fro_sum / fro_count : 0.0;

  const double step = 2.0 * M_PI / grid;
  if (op_arg >= 0) {
    const double center = r.omegas[op_arg];
    auto [w, v] = golden_max(op_f, center - step, center + step);
    r.opnorm_sq = std::max(v, op_max);
    r.opnorm_peak_omega = v >= op_max ? w : center;
  }
  if (regret_arg >= 0) {
    const double center = r.omegas[regret_arg];
    auto [w, v] = golden_max(regret_f, center - step, center + step);
    r.regret_peak = std::max(v, regret_max);
    r.regret_peak_omega = v >= regret_max ? w : center;
  }
}

}  // namespace

std::vector<SweepResult> sweep(
    const PlantModel& model,
    const std::vector<std::pair<std::string, LtiRealization>>& controllers,
    int grid_size) {
  if (grid_size < 2) throw Error("sweep: grid_size must be >= 2");
  const NoncausalEvaluator noncausal(model);

  std::vector<ClosedLoop> loops;
  loops.reserve(controllers.size());
  for (const auto& [name, realization] : controllers)
    loops.push_back(close_loop(model, realization));

  std::vector<SweepResult> results(controllers.size());
  for (size_t c = 0; c < controllers.size(); ++c) {
    results[c].name = controllers[c].first;
    results[c].omegas.resize(grid_size);
    results[c].frobenius_integrand.assign(grid_size, kNan);
    results[c].opnorm_integrand.assign(grid_size, kNan);
    results[c].regret_integrand.assign(grid_size, kNan);
  }

  for (int k = 0; k < grid_size; ++k) {
    const double omega = 2.0 * M_PI * k / grid_size;
    bool gram_ok = true;
    ComplexMatrix gram;
    try {
      gram = noncausal.gram(omega);
    } catch (const ResolventSingular&) {
      gram_ok = false;
    }
    for (size_t c = 0; c < controllers.size(); ++c) {
      SweepResult& r = results[c];
      r.omegas[k] = omega;
      const ComplexMatrix Tk = eval_frequency(loops[c], omega);
      const ComplexMatrix cost = Tk.adjoint() * Tk;
      r.frobenius_integrand[k] = cost.real().trace();
      r.opnorm_integrand[k] = lambda_max_hermitian(cost);
      if (gram_ok) {
        r.regret_integrand[k] = lambda_max_hermitian(cost - gram);
      } else {
        r.skipped.push_back(k);
      }
    }
  }

  for (size_t c = 0; c < controllers.size(); ++c) {
    const ClosedLoop& loop = loops[c];
    auto op_f = [&](double w) {
      const ComplexMatrix Tk = eval_frequency(loop, w);
      return lambda_max_hermitian(Tk.adjoint() * Tk);
    };
    auto regret_f = [&](double w) -> double {
      try {
        const ComplexMatrix Tk = eval_frequency(loop, w);
        return lambda_max_hermitian(Tk.adjoint() * Tk - noncausal.gram(w));
      } catch (const ResolventSingular&) {
        return kNan;
      }
    };
    finalize_sweep(results[c], op_f, regret_f);
  }
  return results;
}

SweepResult sweep_noncausal(const PlantModel& model, int grid_size) {
  if (grid_size < 2) throw Error("sweep: grid_size must be >= 2");
  const NoncausalEvaluator noncausal(model);
  SweepResult r;
  r.name = "noncausal";
  r.omegas.resize(grid_size);
  r.frobenius_integrand.assign(grid_size, kNan);
  r.opnorm_integrand.assign(grid_size, kNan);
  r.regret_integrand.assign(grid_size, 0.0);
  for (int k = 0; k < grid_size; ++k) {
    const double omega = 2.0 * M_PI * k / grid_size;
    r.omegas[k] = omega;
    try {
      const ComplexMatrix gram = noncausal.gram(omega);
      r.frobenius_integrand[k] = gram.real().trace();
      r.opnorm_integrand[k] = lambda_max_hermitian(gram);
    } catch (const ResolventSingular&) {
      r.regret_integrand[k] = kNan;
      r.skipped.push_back(k);
    }
  }
  auto op_f = [&](double w) -> double {
    try {
      return lambda_max_hermitian(noncausal.gram(w));
    } catch (const ResolventSingular&) {
      return kNan;
    }
  };
  auto regret_f = [](double) { return 0.0; };
  finalize_sweep(r, op_f, regret_f);
  return r;
}

ToeplitzOracle toeplitz_truncate(const PlantModel& model,
                                 const RiccatiSolution& riccati, int N) {
  if (N < 1) throw Error("toeplitz_truncate: N must be >= 1");
  const Index n = model.n();
  const Index m = model.m();
  const Index p = model.p();
  if (static_cast<long>(N) * std::max(m, p) > 4096)
    throw Error("toeplitz_truncate: N * max(m, p) exceeds memory guard 4096");

  const Matrix Q_sqrt = psd_sqrt(model.Q);
  const Matrix R_inv_sqrt = psd_inv_sqrt(model.R);

  ToeplitzOracle oracle;
  oracle.horizon = N;
  oracle.F_N = Matrix::Zero(N * n, N * m);
  oracle.G_N = Matrix::Zero(N * n, N * p);

  // Markov parameters F_i = Q^{1/2} A^{i-1} B_u R^{-1/2},
  // G_i = Q^{1/2} A^{i-1} B_w filled along block subdiagonals.
  Matrix Au = model.B_u;  // A^{i-1} B_u
  Matrix Aw = model.B_w;
  for (int i = 1; i < N; ++i) {
    const Matrix Fi = Q_sqrt * Au * R_inv_sqrt;
    const Matrix Gi = Q_sqrt * Aw;
    for (int r = i; r < N; ++r) {
      oracle.F_N.block(r * n, (r - i) * m, n, m) = Fi;
      oracle.G_N.block(r * n, (r - i) * p, n, p) = Gi;
    }
    Au = model.A * Au;
    Aw = model.A * Aw;
  }

  // Finite-horizon clairvoyant controller.
  Matrix lhs = Matrix::Identity(N * m, N * m) +
               oracle.F_N.transpose() * oracle.F_N;
  oracle.K0_N = -Eigen::LLT<Matrix>(lhs).solve(oracle.F_N.transpose() *
                                               oracle.G_N);

  // Hankel blocks of the strictly anticausal target z T(z).
  const Decomposition dec = decompose_DK0(model, riccati);
  const Matrix& F = dec.shifted.F;
  const Matrix& G = dec.shifted.G;
  const Matrix& H = dec.shifted.H;
  std::vector<Matrix> markov(2 * N - 1);
  Matrix X = G;  // F^k G
  for (int k = 0; k < 2 * N - 1; ++k) {
    markov[k] = H * X;
    X = F * X;
  }
  oracle.hankel = Matrix::Zero(N * H.rows(), N * p);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      oracle.hankel.block(i * H.rows(), j * p, H.rows(), p) = markov[i + j];

  const Index dim = std::min(oracle.hankel.rows(), oracle.hankel.cols());
  if (dim <= 1024) {
    Eigen::BDCSVD<Matrix> svd(oracle.hankel);
    oracle.hankel_singular_values = svd.singularValues();
  } else {
    // Power iteration on hankel' * hankel for the top singular value only.
    Vector v = Vector::Ones(oracle.hankel.cols()).normalized();
    double lam = 0.0;
    for (int it = 0; it < 5000; ++it) {
      Vector w = oracle.hankel.transpose() * (oracle.hankel * v);
      const double lam_next = w.norm();
      if (lam_next == 0.0) break;
      v = w / lam_next;
      if (std::abs(lam_next - lam) <= 1e-13 * lam_next) {
        lam = lam_next;
        break;
      }
      lam = lam_next;
    }
    oracle.hankel_singular_values = Vector::Constant(1, std::sqrt(lam));
  }
  return oracle;
}

int default_oracle_horizon(const PlantModel& model,
                           const RiccatiSolution& riccati) {
  const double rho = std::max(spectral_radius(riccati.A_K), 0.1);
  int N = static_cast<int>(std::ceil(std::log(1e-8) / std::log(rho)));
  N = std::max(N, 1);
  const int cap =
      static_cast<int>(4096 / std::max<Index>(std::max(model.m(), model.p()), 1));
  return std::min(N, cap);
}

double oracle_regret(const ToeplitzOracle& oracle) {
  if (oracle.hankel_singular_values.size() == 0) return 0.0;
  const double s = oracle.hankel_singular_values(0);
  return s * s;
}

}  // namespace roc
