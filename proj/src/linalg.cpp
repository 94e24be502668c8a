#include "roc/linalg.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace roc {

double spectral_radius(const Eigen::Ref<const Matrix>& M) {
  if (M.rows() != M.cols()) throw Error("spectral_radius: matrix not square");
  if (M.rows() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(M, /*computeEigenvectors=*/false);
  return es.eigenvalues().array().abs().maxCoeff();
}

Matrix symmetrize(const Eigen::Ref<const Matrix>& X) {
  return 0.5 * (X + X.transpose());
}

bool is_symmetric(const Eigen::Ref<const Matrix>& X, double tol) {
  if (X.rows() != X.cols()) return false;
  const double scale = std::max(1.0, X.norm());
  return (X - X.transpose()).norm() <= tol * scale;
}

double min_eigenvalue(const Eigen::Ref<const Matrix>& S) {
  if (S.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(S),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix psd_sqrt(const Eigen::Ref<const Matrix>& S) {
  if (S.rows() == 0) return S;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(S));
  const Vector& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.array().abs().maxCoeff());
  if (ev.minCoeff() < -1e-9 * scale)
    throw NotPsd("psd_sqrt: matrix has negative eigenvalue " +
                 std::to_string(ev.minCoeff()));
  Vector d = ev.array().max(0.0).sqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

Matrix psd_inv_sqrt(const Eigen::Ref<const Matrix>& S) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(S));
  const Vector& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.array().abs().maxCoeff());
  if (ev.minCoeff() <= 1e-13 * scale)
    throw IllConditioned("psd_inv_sqrt: matrix not positive definite");
  Vector d = ev.array().sqrt().inverse();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

namespace detail {

double dare_residual(const Eigen::Ref<const Matrix>& A,
                     const Eigen::Ref<const Matrix>& B,
                     const Eigen::Ref<const Matrix>& Q,
                     const Eigen::Ref<const Matrix>& R,
                     const Eigen::Ref<const Matrix>& P) {
  const Matrix BtP = B.transpose() * P;
  const Matrix Re = R + BtP * B;
  Eigen::PartialPivLU<Matrix> lu(Re);
  const Matrix rhs = Q + A.transpose() * P * A -
                     A.transpose() * BtP.transpose() * lu.solve(BtP * A);
  return (P - rhs).norm();
}

std::optional<Matrix> dare_doubling(const Eigen::Ref<const Matrix>& A,
                                    const Eigen::Ref<const Matrix>& B,
                                    const Eigen::Ref<const Matrix>& Q,
                                    const Eigen::Ref<const Matrix>& R,
                                    double tol, int max_iter) {
  const Index n = A.rows();
  Eigen::PartialPivLU<Matrix> R_lu(R);
  if (std::abs(R_lu.determinant()) < 1e-300) return std::nullopt;

  Matrix A_k = A;
  Matrix G_k = B * R_lu.solve(B.transpose());
  Matrix H_k = Q;

  for (int it = 0; it < max_iter; ++it) {
    const Matrix W = Matrix::Identity(n, n) + G_k * H_k;
    Eigen::PartialPivLU<Matrix> W_lu(W);
    const Matrix V1 = W_lu.solve(A_k);
    const Matrix V2 = W_lu.solve(G_k.transpose()).transpose();

    const Matrix H_next = H_k + V1.transpose() * H_k * A_k;
    G_k += A_k * V2 * A_k.transpose();
    A_k = A_k * V1;

    const double step = (H_next - H_k).norm();
    const double scale = std::max(1.0, H_next.norm());
    H_k = symmetrize(H_next);
    if (!H_k.allFinite() || !G_k.allFinite() || !A_k.allFinite())
      return std::nullopt;
    if (step <= tol * scale) return H_k;
  }
  return std::nullopt;
}

std::optional<Matrix> dare_fixed_point(const Eigen::Ref<const Matrix>& A,
                                       const Eigen::Ref<const Matrix>& B,
                                       const Eigen::Ref<const Matrix>& Q,
                                       const Eigen::Ref<const Matrix>& R,
                                       double tol, int max_iter) {
  Matrix P = symmetrize(Q);
  double alpha = 1.0;
  double prev_step = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iter; ++it) {
    const Matrix BtP = B.transpose() * P;
    const Matrix Re = R + BtP * B;
    Eigen::PartialPivLU<Matrix> lu(Re);
    if (std::abs(lu.determinant()) < 1e-300) return std::nullopt;
    Matrix P_next = Q + A.transpose() * P * A -
                    A.transpose() * BtP.transpose() * lu.solve(BtP * A);
    P_next = symmetrize(P_next);
    const double step = (P_next - P).norm();
    if (!P_next.allFinite()) return std::nullopt;
    if (step > 4.0 * prev_step) alpha = 0.5;  // oscillation: damp
    P = alpha * P_next + (1.0 - alpha) * P;
    if (step <= tol * std::max(1.0, P.norm())) return P;
    prev_step = step;
  }
  return std::nullopt;
}

}  // namespace detail

Matrix solve_dare(const DareProblem& prob, double tol) {
  const Matrix& A = prob.A;
  const Matrix& B = prob.B;
  const Matrix& Q = prob.Q;
  const Matrix& R = prob.R;
  const Index n = A.rows();
  const Index m = B.cols();
  if (A.cols() != n || B.rows() != n || Q.rows() != n || Q.cols() != n ||
      R.rows() != m || R.cols() != m)
    throw Error("solve_dare: inconsistent dimensions");
  if (!is_symmetric(Q)) throw NotPsd("solve_dare: Q not symmetric");
  if (!is_symmetric(R)) throw NotPsd("solve_dare: R not symmetric");
  if (min_eigenvalue(Q) < -1e-9 * std::max(1.0, Q.norm()))
    throw NotPsd("solve_dare: Q not positive semidefinite");
  if (Eigen::LLT<Matrix>(symmetrize(R)).info() != Eigen::Success)
    throw NotPsd("solve_dare: R not positive definite");

  std::optional<Matrix> P = detail::dare_doubling(A, B, Q, R, tol);
  if (!P) P = detail::dare_fixed_point(A, B, Q, R, tol);
  if (!P) throw NonStabilizable("solve_dare: iteration did not converge");

  Matrix sol = symmetrize(*P);

  const Matrix Re = symmetrize(R + B.transpose() * sol * B);
  Eigen::FullPivLU<Matrix> Re_lu(Re);
  if (!Re_lu.isInvertible() ||
      Re_lu.rcond() < 1e-14)
    throw IllConditioned("solve_dare: R + B'PB numerically singular");
  const Matrix K = Re_lu.solve(B.transpose() * sol * A);
  const Matrix A_K = A - B * K;
  if (spectral_radius(A_K) >= 1.0 - 1e-9)
    throw NonStabilizable("solve_dare: closed loop not strictly stable");

  // A couple of fixed-point polishing steps if roundoff left the residual
  // above the requested bound.
  double res = detail::dare_residual(A, B, Q, R, sol);
  for (int i = 0; i < 10 && res > tol * std::max(1.0, sol.norm()); ++i) {
    const Matrix BtP = B.transpose() * sol;
    const Matrix Rp = R + BtP * B;
    sol = symmetrize(Q + A.transpose() * sol * A -
                     A.transpose() * BtP.transpose() *
                         Eigen::PartialPivLU<Matrix>(Rp).solve(BtP * A));
    res = detail::dare_residual(A, B, Q, R, sol);
  }
  if (res > tol * std::max(1.0, sol.norm()))
    throw IllConditioned("solve_dare: residual " + std::to_string(res) +
                         " exceeds tolerance");
  if (min_eigenvalue(sol) < -1e-9 * std::max(1.0, sol.norm()))
    throw NonStabilizable("solve_dare: solution not positive semidefinite");
  return sol;
}

namespace {

Matrix dlyap_kron(const Eigen::Ref<const Matrix>& F,
                  const Eigen::Ref<const Matrix>& W) {
  const Index n = F.rows();
  Matrix K(n * n, n * n);
  // vec(F X F') = (F (x) F) vec(X), column-major vec.
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i)
      K.block(i * n, j * n, n, n) = F(i, j) * F;
  Matrix lhs = Matrix::Identity(n * n, n * n) - K;
  Eigen::PartialPivLU<Matrix> lu(lhs);
  Vector w = Eigen::Map<const Vector>(W.data(), n * n);
  Vector x = lu.solve(w);
  return Eigen::Map<const Matrix>(x.data(), n, n);
}

Matrix dlyap_smith(const Eigen::Ref<const Matrix>& F,
                   const Eigen::Ref<const Matrix>& W, double tol) {
  Matrix X = W;
  Matrix M = F;
  for (int it = 0; it < 200; ++it) {
    X = X + M * X * M.transpose();
    M = M * M;
    if (M.norm() * M.norm() <= tol) break;
  }
  return X;
}

}  // namespace

Matrix solve_dlyap(const Eigen::Ref<const Matrix>& F,
                   const Eigen::Ref<const Matrix>& W, double tol) {
  const Index n = F.rows();
  if (F.cols() != n || W.rows() != n || W.cols() != n)
    throw Error("solve_dlyap: inconsistent dimensions");
  if (n == 0) return Matrix(0, 0);
  if (!is_symmetric(W)) throw Error("solve_dlyap: W not symmetric");
  if (spectral_radius(F) >= 1.0 - 1e-9)
    throw UnstableF("solve_dlyap: rho(F) >= 1");

  Matrix X = n <= 64 ? dlyap_kron(F, symmetrize(W))
                     : dlyap_smith(F, symmetrize(W), tol);
  X = symmetrize(X);

  const double res = (X - F * X * F.transpose() - W).norm();
  if (res > std::max(tol, 1e-12) * std::max(1.0, X.norm()))
    throw IllConditioned("solve_dlyap: residual " + std::to_string(res) +
                         " exceeds tolerance");
  return X;
}

double lambda_max_product(const Eigen::Ref<const Matrix>& Z,
                          const Eigen::Ref<const Matrix>& Pi) {
  if (Z.rows() != Pi.rows() || Z.cols() != Pi.cols() || Z.rows() != Z.cols())
    throw Error("lambda_max_product: dimension mismatch");
  if (Z.rows() == 0) return 0.0;
  if (min_eigenvalue(Pi) < -1e-9 * std::max(1.0, Pi.norm()))
    throw NotPsd("lambda_max_product: Pi not positive semidefinite");
  const Matrix Zh = psd_sqrt(Z);  // throws NotPsd when Z is indefinite
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(Zh * Pi * Zh),
                                           Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues().maxCoeff());
}

}  // namespace roc
