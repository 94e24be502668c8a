#pragma once

#include <cstdint>
#include <string>

#include "roc/types.hpp"

namespace roc {

/// Discrete-time plant x_{t+1} = A x_t + B_u u_t + B_w w_t with quadratic
/// stage cost x'Qx + u'Ru. Q and R must be symmetric positive definite;
/// stabilizability of (A, B_u) is certified later by the Riccati solve.
struct PlantModel {
  std::string name;
  Matrix A;    // n x n
  Matrix B_u;  // n x m
  Matrix B_w;  // n x p
  Matrix Q;    // n x n
  Matrix R;    // m x m

  Index n() const { return A.rows(); }
  Index m() const { return B_u.cols(); }
  Index p() const { return B_w.cols(); }
};

/// Validates dimensions and definiteness; throws InvalidModel naming the
/// violated invariant. All ingestion paths go through this.
PlantModel make_plant(std::string name, Matrix A, Matrix B_u, Matrix B_w,
                      Matrix Q, Matrix R);

/// What a realization's input port is wired to.
enum class InputKind { disturbance, state, plant_input };

/// Direction of the delay chain: a causal realization is
///   D + C (zI - A)^{-1} B,
/// an anticausal one is
///   D + C (z^{-1} I - A)^{-1} B.
enum class Causality { causal, anticausal };

/// Generic LTI state-space realization for controllers and transfer factors.
struct LtiRealization {
  Matrix A;
  Matrix B;
  Matrix C;
  Matrix D;
  InputKind input_kind = InputKind::disturbance;
  Causality causality = Causality::causal;
  std::string note;

  Index state_dim() const { return A.rows(); }
  Index input_dim() const { return D.cols(); }
  Index output_dim() const { return D.rows(); }
};

/// Memoryless realization u = D * input.
LtiRealization static_gain(Matrix D, InputKind kind, std::string note = {});

/// Consistency check; throws Error on mismatched blocks.
void check_realization(const LtiRealization& r);

/// Transfer matrix of a realization at z = e^{j omega}.
ComplexMatrix eval_realization(const LtiRealization& r, double omega);

/// Series interconnection second(first(input)). Input kind is taken from
/// `first`, feedthrough composes as D2*D1.
LtiRealization series(const LtiRealization& first,
                      const LtiRealization& second);

/// Parallel sum of two realizations sharing input and output dimensions.
LtiRealization parallel_sum(const LtiRealization& a, const LtiRealization& b);

/// Random stabilizable plant for test suites: dense Gaussian A scaled to the
/// requested spectral radius, dense Gaussian B_u / B_w, Q = R = I.
/// Deterministic in the seed.
PlantModel random_plant(std::uint64_t seed, Index n, Index m, Index p,
                        double rho_target);

}  // namespace roc
