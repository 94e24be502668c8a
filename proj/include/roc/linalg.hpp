#pragma once

#include <optional>

#include <Eigen/Core>

#include "roc/types.hpp"

namespace roc {

/// Data of the discrete algebraic Riccati equation
///   P = Q + A' P A - A' P B (R + B' P B)^{-1} B' P A
/// with Q symmetric PSD and R symmetric positive definite.
struct DareProblem {
  Matrix A;  // n x n
  Matrix B;  // n x m
  Matrix Q;  // n x n
  Matrix R;  // m x m
};

/// Largest eigenvalue magnitude of a square matrix (0 for empty matrices).
double spectral_radius(const Eigen::Ref<const Matrix>& M);

/// (X + X') / 2.
Matrix symmetrize(const Eigen::Ref<const Matrix>& X);

bool is_symmetric(const Eigen::Ref<const Matrix>& X, double tol = 1e-9);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::Ref<const Matrix>& S);

/// Symmetric PSD square root via eigendecomposition. Eigenvalues below
/// -1e-9*||S|| throw NotPsd; small negatives are clamped to zero.
Matrix psd_sqrt(const Eigen::Ref<const Matrix>& S);

/// Symmetric inverse square root of a positive definite matrix.
Matrix psd_inv_sqrt(const Eigen::Ref<const Matrix>& S);

/// Stabilizing solution of the DARE. Runs a structure-preserving doubling
/// iteration and falls back to a damped fixed-point recursion. The result is
/// symmetric PSD with residual <= tol*max(1, ||P||) and stable closed loop
/// A - B (R + B'PB)^{-1} B'PA.
///
/// Throws NonStabilizable when no stabilizing solution is found and
/// IllConditioned when R + B'PB is numerically singular.
Matrix solve_dare(const DareProblem& prob, double tol = 1e-12);

/// Solution of the discrete Lyapunov (Stein) equation X = F X F' + W for
/// symmetric W and rho(F) < 1. Kronecker vectorization up to n = 64, Smith
/// squaring iteration above. Throws UnstableF when rho(F) >= 1 - margin.
Matrix solve_dlyap(const Eigen::Ref<const Matrix>& F,
                   const Eigen::Ref<const Matrix>& W, double tol = 1e-12);

/// lambda_max(Z * Pi) for symmetric PSD Z, Pi, computed through the symmetric
/// similarity Z^{1/2} Pi Z^{1/2} so the result is real and nonnegative.
double lambda_max_product(const Eigen::Ref<const Matrix>& Z,
                          const Eigen::Ref<const Matrix>& Pi);

namespace detail {

/// Doubling iteration for P = Q + A'PA - A'PB(R + B'PB)^{-1}B'PA with a
/// general symmetric invertible R (indefinite R appears in the H-infinity
/// game equation). Returns nullopt when the iteration breaks down or fails
/// to converge; the caller decides what that means.
std::optional<Matrix> dare_doubling(const Eigen::Ref<const Matrix>& A,
                                    const Eigen::Ref<const Matrix>& B,
                                    const Eigen::Ref<const Matrix>& Q,
                                    const Eigen::Ref<const Matrix>& R,
                                    double tol, int max_iter = 120);

/// Damped fixed-point recursion on the same equation.
std::optional<Matrix> dare_fixed_point(const Eigen::Ref<const Matrix>& A,
                                       const Eigen::Ref<const Matrix>& B,
                                       const Eigen::Ref<const Matrix>& Q,
                                       const Eigen::Ref<const Matrix>& R,
                                       double tol, int max_iter = 200);

/// Frobenius residual of a DARE candidate solution.
double dare_residual(const Eigen::Ref<const Matrix>& A,
                     const Eigen::Ref<const Matrix>& B,
                     const Eigen::Ref<const Matrix>& Q,
                     const Eigen::Ref<const Matrix>& R,
                     const Eigen::Ref<const Matrix>& P);

}  // namespace detail

}  // namespace roc
