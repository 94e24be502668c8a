#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "roc/analysis.hpp"
#include "roc/synthesis.hpp"
#include "test_util.hpp"

using namespace roc;
using namespace roc::testing;

TEST_CASE("closing the H2 loop on S1 gives the scalar A_K") {
  const PlantModel s1 = s1_plant();
  const RiccatiSolution ric = lqr_synthesize(s1);
  const ClosedLoop cl = close_loop(s1, h2_controller(ric));
  CHECK(cl.A.rows() == 1);
  CHECK(cl.A(0, 0) == doctest::Approx(s1_golden().A_K).epsilon(1e-12));
  CHECK(cl.D.norm() == 0.0);
}

TEST_CASE("closing the regret loop on S1 splits into {A_K, F_gamma}") {
  const PlantModel s1 = s1_plant();
  const RegretSynthesis syn = regret_synthesize(s1);
  const ClosedLoop cl = close_loop(s1, syn.controller_state_only);
  CHECK(cl.A.rows() == 2);
  Eigen::EigenSolver<Matrix> es(cl.A, false);
  std::vector<double> eigs = {std::abs(es.eigenvalues()(0)),
                              std::abs(es.eigenvalues()(1))};
  std::sort(eigs.begin(), eigs.end());
  std::vector<double> expected = {std::abs(syn.F_gamma(0, 0)),
                                  s1_golden().A_K};
  std::sort(expected.begin(), expected.end());
  CHECK(eigs[0] == doctest::Approx(expected[0]).epsilon(1e-8));
  CHECK(eigs[1] == doctest::Approx(expected[1]).epsilon(1e-8));
}

TEST_CASE("no disturbance path means zero input matrix") {
  Matrix one = Matrix::Constant(1, 1, 1.0);
  const PlantModel plant = make_plant("nodist", Matrix::Constant(1, 1, 0.5),
                                      one, Matrix::Zero(1, 1), one, one);
  const ClosedLoop cl = close_loop(plant, h2_controller(lqr_synthesize(plant)));
  CHECK(cl.B.norm() == 0.0);
}

TEST_CASE("close_loop rejects a destabilizing controller") {
  const PlantModel model = random_plant(71, 3, 2, 2, 1.3);
  const LtiRealization zero_gain =
      static_gain(Matrix::Zero(2, 3), InputKind::state);
  CHECK_THROWS_AS(close_loop(model, zero_gain), UnstableLoop);
}

TEST_CASE("frequency evaluation basics") {
  const PlantModel s1 = s1_plant();
  const RiccatiSolution ric = lqr_synthesize(s1);
  const ClosedLoop cl = close_loop(s1, h2_controller(ric));

  // DC gain.
  const ComplexMatrix T0 = eval_frequency(cl, 0.0);
  const double a_k = s1_golden().A_K;
  CHECK(std::abs(T0(0, 0) - 1.0 / (1.0 - a_k)) < 1e-12);

  // Conjugate symmetry for real data.
  for (double w : {0.3, 1.1, 2.9}) {
    const ComplexMatrix Tp = eval_frequency(cl, w);
    const ComplexMatrix Tm = eval_frequency(cl, -w);
    CHECK((Tm - Tp.conjugate()).norm() < 1e-13);
  }

  // Hand value at omega = pi: resolvent is 1 / (-1 - A_K).
  const ComplexMatrix Tpi = eval_frequency(cl, M_PI);
  CHECK(std::abs(Tpi(0, 0) - (-1.0 / (1.0 + a_k))) < 1e-12);
  CHECK(std::abs(Tpi(1, 0) - (s1_golden().K_lqr / (1.0 + a_k))) < 1e-12);
}

TEST_CASE("noncausal gram values and properties") {
  // S1 at omega 0: F(1) = G(1) = 2, so the optimum is 4 / (1 + 4).
  const PlantModel s1 = s1_plant();
  CHECK(std::abs(noncausal_gram(s1, 0.0)(0, 0) - 0.8) < 1e-12);

  // Zero when B_w = 0.
  Matrix one = Matrix::Constant(1, 1, 1.0);
  const PlantModel nodist = make_plant(
      "nodist", Matrix::Constant(1, 1, 0.5), one, Matrix::Zero(1, 1), one, one);
  CHECK(noncausal_gram(nodist, 1.3).norm() == 0.0);

  // Hermitian PSD on random models and frequencies, including unstable A.
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> dist(0.0, 2.0 * M_PI);
  for (int trial = 0; trial < 4; ++trial) {
    const PlantModel model =
        random_plant(1900 + trial, 3 + trial, 2, 2, 0.8 + 0.2 * trial);
    const NoncausalEvaluator nce(model);
    for (int k = 0; k < 16; ++k) {
      const double w = dist(gen);
      if (nce.pole_distance(w) < 1e-6) continue;
      const ComplexMatrix gram = nce.gram(w);
      CHECK((gram - gram.adjoint()).norm() < 1e-12);
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram,
                                                      Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() > -1e-10);
    }
  }
}

TEST_CASE("noncausal gram guards unit-circle poles") {
  // Rotation matrix: both eigenvalues exactly on the unit circle.
  const double theta = 0.9;
  Matrix A(2, 2);
  A << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  const PlantModel model =
      make_plant("rotor", A, Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                 Matrix::Identity(2, 2), Matrix::Identity(2, 2));
  CHECK_THROWS_AS(noncausal_gram(model, theta), ResolventSingular);
  CHECK(noncausal_gram(model, theta + 1.0).allFinite());
}

TEST_CASE("sweep Frobenius aggregate matches the observability Gramian") {
  for (int trial = 0; trial < 4; ++trial) {
    const PlantModel model = random_plant(2100 + trial, 3 + trial, 2, 2, 0.8);
    const RiccatiSolution ric = lqr_synthesize(model);
    const auto rows = sweep(model, {{"h2", h2_controller(ric)}}, 2048);
    const ClosedLoop cl = close_loop(model, h2_controller(ric));
    // Independent route: trace(B' X B) with X the observability Gramian.
    const Matrix X =
        lyap_kron_oracle(cl.A.transpose(), cl.C.transpose() * cl.C);
    const double expected = (cl.B.transpose() * X * cl.B).trace();
    CHECK(rows.front().frobenius_sq ==
          doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("regret peak of the regret controller equals the optimal regret") {
  for (int trial = 0; trial < 4; ++trial) {
    const PlantModel model =
        random_plant(2200 + trial, 2 + trial, 1 + trial % 2, 2, 1.2);
    const RegretSynthesis syn = regret_synthesize(model);
    const auto rows =
        sweep(model, {{"regret", syn.controller_state_only}}, 2048);
    CHECK(rows.front().regret_peak ==
          doctest::Approx(syn.gamma_sq).epsilon(1e-4));
  }
}

TEST_CASE("doubling the grid leaves the quadrature fixed") {
  const PlantModel model = random_plant(2300, 4, 2, 2, 0.9);
  const RiccatiSolution ric = lqr_synthesize(model);
  CHECK(spectral_radius(close_loop(model, h2_controller(ric)).A) <= 0.95);
  const auto coarse = sweep(model, {{"h2", h2_controller(ric)}}, 2048);
  const auto fine = sweep(model, {{"h2", h2_controller(ric)}}, 4096);
  CHECK(std::abs(coarse.front().frobenius_sq - fine.front().frobenius_sq) <=
        1e-6 * fine.front().frobenius_sq);
}

TEST_CASE("the spectral difference stays Hermitian and nonnegative") {
  const PlantModel model = random_plant(2400, 4, 2, 3, 1.25);
  const RegretSynthesis syn = regret_synthesize(model);
  const HinfSynthesis hinf = hinf_synthesize(model);
  const std::vector<std::pair<std::string, LtiRealization>> controllers = {
      {"regret", syn.controller_state_only},
      {"h2", h2_controller(syn.riccati)},
      {"hinf", hinf.controller}};
  const NoncausalEvaluator nce(model);
  std::vector<ClosedLoop> loops;
  for (const auto& [name, c] : controllers)
    loops.push_back(close_loop(model, c));
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> dist(0.0, 2.0 * M_PI);
  for (int k = 0; k < 64; ++k) {
    const double w = dist(gen);
    if (nce.pole_distance(w) < 1e-6) continue;
    const ComplexMatrix gram = nce.gram(w);
    for (const ClosedLoop& cl : loops) {
      const ComplexMatrix Tk = eval_frequency(cl, w);
      const ComplexMatrix diff = Tk.adjoint() * Tk - gram;
      CHECK((diff - diff.adjoint()).norm() < 1e-12 *
                std::max(1.0, diff.norm()));
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(diff,
                                                      Eigen::EigenvaluesOnly);
      CHECK(es.eigenvalues().minCoeff() >= -1e-8);
    }
  }
}

TEST_CASE("toeplitz truncation structure") {
  const PlantModel model = random_plant(2500, 3, 2, 2, 0.9);
  const RiccatiSolution ric = lqr_synthesize(model);

  // A single block is strictly causal, hence zero.
  const ToeplitzOracle tiny = toeplitz_truncate(model, ric, 1);
  CHECK(tiny.F_N.norm() == 0.0);
  CHECK(tiny.G_N.norm() == 0.0);

  // First Markov parameter sits on the first subdiagonal.
  const ToeplitzOracle small = toeplitz_truncate(model, ric, 3);
  const Matrix F1 = psd_sqrt(model.Q) * model.B_u * psd_inv_sqrt(model.R);
  CHECK((small.F_N.block(3, 0, 3, 2) - F1).norm() < 1e-14);
  CHECK((small.F_N.block(6, 2, 3, 2) - F1).norm() < 1e-14);
  CHECK(small.F_N.block(0, 0, 3, 2).norm() == 0.0);

  CHECK_THROWS_AS(toeplitz_truncate(model, ric, 3000), Error);
}

TEST_CASE("hankel oracle reproduces the S1 regret at horizon 64") {
  const PlantModel s1 = s1_plant();
  const RiccatiSolution ric = lqr_synthesize(s1);
  const ToeplitzOracle oracle = toeplitz_truncate(s1, ric, 64);
  CHECK(oracle_regret(oracle) ==
        doctest::Approx(s1_golden().gamma_sq).epsilon(1e-6));
  CHECK(oracle_regret(oracle) == doctest::Approx(0.67367).epsilon(1e-4));
}

TEST_CASE("hankel oracle is monotone in the horizon and hits the closed form") {
  for (int trial = 0; trial < 4; ++trial) {
    const PlantModel model =
        random_plant(2600 + trial, 2 + trial, 1 + trial % 2, 2, 1.1);
    const RegretSynthesis syn = regret_synthesize(model);
    double prev = 0.0;
    for (int N : {4, 8, 16, 32}) {
      const double value =
          oracle_regret(toeplitz_truncate(model, syn.riccati, N));
      CHECK(value >= prev - 1e-12);
      prev = value;
    }
    const int N = default_oracle_horizon(model, syn.riccati);
    const double at_default =
        oracle_regret(toeplitz_truncate(model, syn.riccati, N));
    CHECK(std::abs(at_default - syn.gamma_sq) <= 1e-6 * syn.gamma_sq);
  }
}

TEST_CASE("oracle truncation error decays at least at the closed-loop rate") {
  for (int trial = 0; trial < 3; ++trial) {
    const PlantModel model = random_plant(2900 + trial, 3, 2, 2, 1.0);
    const RegretSynthesis syn = regret_synthesize(model);
    const double rho = spectral_radius(syn.riccati.A_K);
    // Log-linear fit of the error against the horizon, skipping horizons
    // where the error has already saturated at roundoff.
    std::vector<double> ns, logs;
    for (int N = 2; N <= 14; N += 2) {
      const double err = std::abs(
          oracle_regret(toeplitz_truncate(model, syn.riccati, N)) -
          syn.gamma_sq);
      if (err < 1e-13 * syn.gamma_sq) break;
      ns.push_back(N);
      logs.push_back(std::log(err));
    }
    if (ns.size() < 3) continue;  // already converged, nothing to fit
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < ns.size(); ++i) {
      sx += ns[i];
      sy += logs[i];
      sxx += ns[i] * ns[i];
      sxy += ns[i] * logs[i];
    }
    const double k = ns.size();
    const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    CHECK(slope <= std::log(rho) + 0.1);
  }
}

TEST_CASE("sweep aggregates are consistent with the stored grids") {
  const PlantModel model = random_plant(3000, 3, 2, 2, 1.1);
  const RegretSynthesis syn = regret_synthesize(model);
  const auto rows =
      sweep(model, {{"regret", syn.controller_state_only}}, 1024);
  const SweepResult& r = rows.front();
  for (size_t k = 1; k < r.omegas.size(); ++k)
    CHECK(r.omegas[k] > r.omegas[k - 1]);
  double mean = 0.0;
  double op_max = 0.0, regret_max = 0.0;
  for (size_t k = 0; k < r.omegas.size(); ++k) {
    mean += r.frobenius_integrand[k];
    op_max = std::max(op_max, r.opnorm_integrand[k]);
    regret_max = std::max(regret_max, r.regret_integrand[k]);
  }
  mean /= r.omegas.size();
  CHECK(r.frobenius_sq == doctest::Approx(mean).epsilon(1e-12));
  // Peak aggregates refine the grid maximum, never fall below it.
  CHECK(r.opnorm_sq >= op_max * (1.0 - 1e-12));
  CHECK(r.regret_peak >= regret_max * (1.0 - 1e-12));
}

TEST_CASE("oracle of a plant without disturbances is zero") {
  Matrix one = Matrix::Constant(1, 1, 1.0);
  const PlantModel nodist = make_plant(
      "nodist", Matrix::Constant(1, 1, 0.5), one, Matrix::Zero(1, 1), one, one);
  const RiccatiSolution ric = lqr_synthesize(nodist);
  CHECK(oracle_regret(toeplitz_truncate(nodist, ric, 32)) == 0.0);
}

TEST_CASE("finite-horizon clairvoyant controller dominates truncated causal "
          "controllers") {
  const PlantModel model = random_plant(2700, 3, 2, 2, 0.9);
  const RegretSynthesis syn = regret_synthesize(model);
  const int N = 24;
  const ToeplitzOracle oracle = toeplitz_truncate(model, syn.riccati, N);

  // Strictly causal block-Toeplitz truncation of the regret controller's
  // w -> v map, v = R^{1/2} u.
  const Matrix R_sqrt = psd_sqrt(model.R);
  const LtiRealization& ctrl = syn.controller;
  Matrix K_N = Matrix::Zero(N * model.m(), N * model.p());
  Matrix power = ctrl.B;
  for (int i = 1; i < N; ++i) {
    const Matrix markov = R_sqrt * ctrl.C * power;
    for (int r = i; r < N; ++r)
      K_N.block(r * model.m(), (r - i) * model.p(), model.m(), model.p()) =
          markov;
    power = ctrl.A * power;
  }

  auto cost = [&](const Matrix& K, const Vector& w) {
    const Vector v = K * w;
    return (oracle.F_N * v + oracle.G_N * w).squaredNorm() + v.squaredNorm();
  };
  for (int trial = 0; trial < 20; ++trial) {
    const Vector w = random_matrix(2800 + trial, N * model.p(), 1);
    CHECK(cost(oracle.K0_N, w) <= cost(K_N, w) * (1.0 + 1e-12));
  }
}
