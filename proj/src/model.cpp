#include "roc/model.hpp"

#include <random>
#include <utility>

#include <Eigen/LU>

#include "roc/linalg.hpp"

namespace roc {

PlantModel make_plant(std::string name, Matrix A, Matrix B_u, Matrix B_w,
                      Matrix Q, Matrix R) {
  const Index n = A.rows();
  const Index m = B_u.cols();
  if (n == 0) throw InvalidModel("plant: state dimension must be positive");
  if (A.cols() != n) throw InvalidModel("plant: A must be square");
  if (B_u.rows() != n || B_u.cols() == 0)
    throw InvalidModel("plant: B_u must be n x m with m >= 1");
  if (B_w.rows() != n)
    throw InvalidModel("plant: B_w must have n rows");
  if (Q.rows() != n || Q.cols() != n)
    throw InvalidModel("plant: Q must be n x n");
  if (R.rows() != m || R.cols() != m)
    throw InvalidModel("plant: R must be m x m");
  if (!A.allFinite() || !B_u.allFinite() || !B_w.allFinite() ||
      !Q.allFinite() || !R.allFinite())
    throw InvalidModel("plant: matrices must be finite");
  if (!is_symmetric(Q)) throw InvalidModel("plant: Q not symmetric");
  if (!is_symmetric(R)) throw InvalidModel("plant: R not symmetric");
  if (min_eigenvalue(Q) <= 1e-12 * std::max(1.0, Q.norm()))
    throw InvalidModel("plant: Q not positive definite");
  if (min_eigenvalue(R) <= 1e-12 * std::max(1.0, R.norm()))
    throw InvalidModel("plant: R not positive definite");

  PlantModel model;
  model.name = std::move(name);
  model.A = std::move(A);
  model.B_u = std::move(B_u);
  model.B_w = std::move(B_w);
  model.Q = symmetrize(Q);
  model.R = symmetrize(R);
  return model;
}

LtiRealization static_gain(Matrix D, InputKind kind, std::string note) {
  LtiRealization r;
  r.A = Matrix(0, 0);
  r.B = Matrix(0, D.cols());
  r.C = Matrix(D.rows(), 0);
  r.D = std::move(D);
  r.input_kind = kind;
  r.note = std::move(note);
  return r;
}

void check_realization(const LtiRealization& r) {
  const Index ns = r.A.rows();
  if (r.A.cols() != ns) throw Error("realization: A not square");
  if (r.B.rows() != ns) throw Error("realization: B rows mismatch");
  if (r.C.cols() != ns) throw Error("realization: C cols mismatch");
  if (r.D.rows() != r.C.rows() || r.D.cols() != r.B.cols())
    throw Error("realization: D block mismatch");
}

ComplexMatrix eval_realization(const LtiRealization& r, double omega) {
  check_realization(r);
  const ComplexMatrix D = r.D.cast<Complex>();
  if (r.state_dim() == 0) return D;
  const Complex z = std::polar(1.0, omega);
  const Complex zr = r.causality == Causality::causal ? z : 1.0 / z;
  ComplexMatrix resolvent =
      zr * ComplexMatrix::Identity(r.state_dim(), r.state_dim()) -
      r.A.cast<Complex>();
  return D + r.C.cast<Complex>() *
                 Eigen::PartialPivLU<ComplexMatrix>(resolvent)
                     .solve(r.B.cast<Complex>());
}

LtiRealization series(const LtiRealization& first,
                      const LtiRealization& second) {
  check_realization(first);
  check_realization(second);
  if (first.causality != Causality::causal ||
      second.causality != Causality::causal)
    throw Error("series: only causal realizations compose");
  if (second.input_dim() != first.output_dim())
    throw Error("series: dimension mismatch");
  const Index n1 = first.state_dim();
  const Index n2 = second.state_dim();
  LtiRealization r;
  r.A = Matrix::Zero(n1 + n2, n1 + n2);
  r.A.topLeftCorner(n1, n1) = first.A;
  r.A.bottomLeftCorner(n2, n1) = second.B * first.C;
  r.A.bottomRightCorner(n2, n2) = second.A;
  r.B = Matrix::Zero(n1 + n2, first.input_dim());
  r.B.topRows(n1) = first.B;
  r.B.bottomRows(n2) = second.B * first.D;
  r.C = Matrix::Zero(second.output_dim(), n1 + n2);
  r.C.leftCols(n1) = second.D * first.C;
  r.C.rightCols(n2) = second.C;
  r.D = second.D * first.D;
  r.input_kind = first.input_kind;
  return r;
}

LtiRealization parallel_sum(const LtiRealization& a, const LtiRealization& b) {
  check_realization(a);
  check_realization(b);
  if (a.input_dim() != b.input_dim() || a.output_dim() != b.output_dim())
    throw Error("parallel_sum: dimension mismatch");
  if (a.causality != Causality::causal || b.causality != Causality::causal)
    throw Error("parallel_sum: only causal realizations compose");
  const Index na = a.state_dim();
  const Index nb = b.state_dim();
  LtiRealization r;
  r.A = Matrix::Zero(na + nb, na + nb);
  r.A.topLeftCorner(na, na) = a.A;
  r.A.bottomRightCorner(nb, nb) = b.A;
  r.B = Matrix::Zero(na + nb, a.input_dim());
  r.B.topRows(na) = a.B;
  r.B.bottomRows(nb) = b.B;
  r.C = Matrix::Zero(a.output_dim(), na + nb);
  r.C.leftCols(na) = a.C;
  r.C.rightCols(nb) = b.C;
  r.D = a.D + b.D;
  r.input_kind = a.input_kind;
  return r;
}

PlantModel random_plant(std::uint64_t seed, Index n, Index m, Index p,
                        double rho_target) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto fill = [&](Index r, Index c) {
    Matrix M(r, c);
    for (Index j = 0; j < c; ++j)
      for (Index i = 0; i < r; ++i) M(i, j) = gauss(gen);
    return M;
  };
  Matrix A = fill(n, n);
  const double rho = spectral_radius(A);
  if (rho > 0) A *= rho_target / rho;
  Matrix B_u = fill(n, m);
  Matrix B_w = fill(n, p);
  return make_plant("random-" + std::to_string(seed), std::move(A),
                    std::move(B_u), std::move(B_w), Matrix::Identity(n, n),
                    Matrix::Identity(m, m));
}

}  // namespace roc
