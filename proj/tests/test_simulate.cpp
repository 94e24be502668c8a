#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "roc/analysis.hpp"
#include "roc/simulate.hpp"
#include "roc/synthesis.hpp"
#include "test_util.hpp"

using namespace roc;
using namespace roc::testing;

namespace {

DisturbanceSpec white_spec(Index dim, std::uint64_t seed, double sigma = 1.0) {
  DisturbanceSpec spec;
  spec.kind = DisturbanceSpec::Kind::white;
  spec.sigma = sigma;
  spec.seed = seed;
  spec.dim = dim;
  return spec;
}

}  // namespace

TEST_CASE("zero-variance white noise is identically zero") {
  const auto w = gen_disturbance(white_spec(3, 7, 0.0), 50);
  for (const Vector& v : w) CHECK(v.norm() == 0.0);
}

TEST_CASE("ar1 with beta = 0 collapses to the white stream") {
  DisturbanceSpec ar = white_spec(2, 99);
  ar.kind = DisturbanceSpec::Kind::ar1;
  ar.beta = 0.0;
  const auto w_ar = gen_disturbance(ar, 200);
  const auto w_white = gen_disturbance(white_spec(2, 99), 200);
  for (int t = 0; t < 200; ++t) CHECK((w_ar[t] - w_white[t]).norm() == 0.0);
}

TEST_CASE("white noise sample mean is centered") {
  const int T = 100000;
  const auto w = gen_disturbance(white_spec(1, 4242), T);
  double mean = 0.0;
  for (const Vector& v : w) mean += v(0);
  mean /= T;
  CHECK(std::abs(mean) <= 4.0 / std::sqrt(static_cast<double>(T)));
}

TEST_CASE("disturbance generation is deterministic and trial-split") {
  const auto a = gen_disturbance(white_spec(2, 5), 64, 3);
  const auto b = gen_disturbance(white_spec(2, 5), 64, 3);
  const auto c = gen_disturbance(white_spec(2, 5), 64, 4);
  double diff_ab = 0.0, diff_ac = 0.0;
  for (int t = 0; t < 64; ++t) {
    diff_ab += (a[t] - b[t]).norm();
    diff_ac += (a[t] - c[t]).norm();
  }
  CHECK(diff_ab == 0.0);
  CHECK(diff_ac > 0.0);
}

TEST_CASE("spec validation rejects bad parameters") {
  DisturbanceSpec spec = white_spec(2, 1, -1.0);
  CHECK_THROWS_AS(validate_spec(spec), BadSpec);
  spec = white_spec(2, 1);
  spec.kind = DisturbanceSpec::Kind::ar1;
  spec.beta = 1.0;
  CHECK_THROWS_AS(validate_spec(spec), BadSpec);
  spec.kind = DisturbanceSpec::Kind::white_plus_dc;
  spec.beta = 0.0;
  spec.direction = Vector::Constant(2, 1.0);  // norm sqrt(2)
  CHECK_THROWS_AS(validate_spec(spec), BadSpec);
  // Unresolved auto direction must be rejected at generation time.
  spec.direction = Vector();
  CHECK_THROWS_AS(gen_disturbance(spec, 8), BadSpec);
}

TEST_CASE("auto DC direction is the top input direction of the H2 loop at DC") {
  const PlantModel model = random_plant(3100, 4, 2, 3, 0.8);
  DisturbanceSpec spec;
  spec.kind = DisturbanceSpec::Kind::white_plus_dc;
  spec.dc_scale = 2.0;
  spec.dim = model.p();
  const DisturbanceSpec resolved = resolve_auto_direction(spec, model);
  CHECK(resolved.direction.size() == model.p());
  CHECK(resolved.direction.norm() == doctest::Approx(1.0).epsilon(1e-12));
  const ClosedLoop cl = close_loop(model, h2_controller(lqr_synthesize(model)));
  const ComplexMatrix T0 = eval_frequency(cl, 0.0);
  // The resolved direction attains the peak gain.
  const double gain = (T0 * resolved.direction.cast<Complex>()).norm();
  CHECK(gain == doctest::Approx(T0.jacobiSvd().singularValues()(0))
                    .epsilon(1e-10));
}

TEST_CASE("running with zero inputs stays at zero") {
  const PlantModel s1 = s1_plant();
  const RegretSynthesis syn = regret_synthesize(s1);
  const std::vector<Vector> w(32, Vector::Zero(1));
  const SimTrace trace = run_closed_loop(s1, syn.controller, w);
  for (double c : trace.cost) CHECK(c == 0.0);
  for (const Vector& x : trace.x) CHECK(x.norm() == 0.0);
}

TEST_CASE("trace satisfies the dynamics residual invariant") {
  const PlantModel model = random_plant(3200, 4, 2, 2, 0.9);
  const RegretSynthesis syn = regret_synthesize(model);
  const auto w = gen_disturbance(white_spec(model.p(), 11), 500);
  const SimTrace trace = run_closed_loop(model, syn.controller_state_only, w);
  CHECK(trace.x.size() == 501);
  for (int t = 0; t < 500; ++t) {
    const Vector residual = trace.x[t + 1] - model.A * trace.x[t] -
                            model.B_u * trace.u[t] - model.B_w * trace.w[t];
    CHECK(residual.norm() <= 1e-10);
    CHECK(trace.cost[t] >= 0.0);
  }
}

TEST_CASE("disturbance-driven and state-only controllers give identical traces") {
  // The identity is algebraic; numerically the open-loop disturbance form
  // only makes sense on stable plants, where its internal plant copy cannot
  // drift away from the physical state.
  const PlantModel model = random_plant(3300, 3, 2, 2, 0.85);
  const RegretSynthesis syn = regret_synthesize(model);
  const auto w = gen_disturbance(white_spec(model.p(), 13), 1000);
  const SimTrace a = run_closed_loop(model, syn.controller, w);
  const SimTrace b = run_closed_loop(model, syn.controller_state_only, w);
  for (int t = 0; t < 1000; ++t) {
    CHECK((a.u[t] - b.u[t]).norm() <= 1e-12 * std::max(1.0, b.u[t].norm()));
  }
}

TEST_CASE("single-step hand computation on S1") {
  const PlantModel s1 = s1_plant();
  const S1Golden g = s1_golden();
  const RegretSynthesis syn = regret_synthesize(s1);
  std::vector<Vector> w = {Vector::Constant(1, 1.0), Vector::Zero(1)};
  const SimTrace trace = run_closed_loop(s1, syn.controller, w);
  // u_0 sees nothing; x_1 = w_0; u_1 = -K_lqr x_1 - R_eff^{-1} Pi K_gamma w_0.
  CHECK(trace.u[0].norm() == 0.0);
  CHECK(trace.x[1](0) == doctest::Approx(1.0));
  const double expected_u1 = -g.K_lqr - g.Pi * g.K_gamma / g.R_eff;
  CHECK(trace.u[1](0) == doctest::Approx(expected_u1).epsilon(1e-9));
  CHECK(trace.cost[1] ==
        doctest::Approx(1.0 + expected_u1 * expected_u1).epsilon(1e-9));
}

TEST_CASE("divergence guard fires on an uncontrolled unstable plant") {
  const PlantModel model = random_plant(3400, 3, 2, 2, 1.5);
  const LtiRealization zero_gain =
      static_gain(Matrix::Zero(2, 3), InputKind::state);
  const auto w = gen_disturbance(white_spec(2, 17), 400);
  CHECK_THROWS_AS(run_closed_loop(model, zero_gain, w), NonFiniteState);
}

TEST_CASE("batch with one trial reduces to a single run") {
  const PlantModel model = random_plant(3500, 3, 1, 2, 0.8);
  const RegretSynthesis syn = regret_synthesize(model);
  const DisturbanceSpec spec = white_spec(model.p(), 23);
  const auto batch = batch_average(
      model, {{"regret", syn.controller_state_only}}, spec, 256, 1);
  const SimTrace solo =
      run_closed_loop(model, syn.controller_state_only,
                      gen_disturbance(spec, 256, /*trial=*/0));
  for (int t = 0; t < 256; ++t)
    CHECK(batch.front().avg_cost[t] == doctest::Approx(solo.avg_cost[t]));
}

TEST_CASE("batch averaging is deterministic") {
  const PlantModel model = random_plant(3600, 3, 2, 2, 0.85);
  const RegretSynthesis syn = regret_synthesize(model);
  const std::vector<std::pair<std::string, LtiRealization>> controllers = {
      {"regret", syn.controller_state_only},
      {"h2", h2_controller(syn.riccati)}};
  const DisturbanceSpec spec = white_spec(model.p(), 31);
  const auto a = batch_average(model, controllers, spec, 128, 5);
  const auto b = batch_average(model, controllers, spec, 128, 5);
  for (size_t c = 0; c < a.size(); ++c)
    for (int t = 0; t < 128; ++t)
      CHECK(a[c].avg_cost[t] == b[c].avg_cost[t]);  // bit-identical
}

TEST_CASE("long-run H2 cost matches the stationary Gramian value") {
  const PlantModel model = random_plant(3700, 3, 2, 2, 0.7);
  const RiccatiSolution ric = lqr_synthesize(model);
  const ClosedLoop cl = close_loop(model, h2_controller(ric));
  // Stationary per-step cost: trace(C Sigma C') with
  // Sigma = A Sigma A' + B B'.
  const Matrix Sigma = lyap_kron_oracle(cl.A, cl.B * cl.B.transpose());
  const double analytic = (cl.C * Sigma * cl.C.transpose()).trace();

  const int T = 20000;
  const int trials = 8;
  const DisturbanceSpec spec = white_spec(model.p(), 47);
  std::vector<double> finals(trials);
  for (int trial = 0; trial < trials; ++trial) {
    const SimTrace trace = run_closed_loop(
        model, h2_controller(ric), gen_disturbance(spec, T, trial));
    finals[trial] = trace.avg_cost.back();
  }
  double mean = 0.0;
  for (double f : finals) mean += f;
  mean /= trials;
  double var = 0.0;
  for (double f : finals) var += (f - mean) * (f - mean);
  var /= (trials - 1);
  const double stderr_mean = std::sqrt(var / trials);
  CHECK(std::abs(mean - analytic) <= 3.0 * stderr_mean + 1e-9);
}

TEST_CASE("states stay bounded under every disturbance family") {
  const PlantModel model = random_plant(3800, 4, 2, 2, 0.9);
  const RegretSynthesis syn = regret_synthesize(model);
  const HinfSynthesis hinf = hinf_synthesize(model);
  const std::vector<std::pair<std::string, LtiRealization>> controllers = {
      {"regret", syn.controller_state_only},
      {"h2", h2_controller(syn.riccati)},
      {"hinf", hinf.controller}};

  std::vector<DisturbanceSpec> specs;
  specs.push_back(white_spec(model.p(), 61));
  DisturbanceSpec dc;
  dc.kind = DisturbanceSpec::Kind::white_plus_dc;
  dc.dc_scale = 2.0;
  dc.seed = 62;
  dc.dim = model.p();
  specs.push_back(resolve_auto_direction(dc, model));
  DisturbanceSpec ar;
  ar.kind = DisturbanceSpec::Kind::ar1;
  ar.beta = 0.99;
  ar.seed = 63;
  ar.dim = model.p();
  specs.push_back(ar);

  for (const DisturbanceSpec& spec : specs) {
    const auto w = gen_disturbance(spec, 100000);
    for (const auto& [name, controller] : controllers) {
      const SimTrace trace = run_closed_loop(model, controller, w);
      double peak = 0.0;
      for (const Vector& x : trace.x) peak = std::max(peak, x.norm());
      CHECK(peak < 1e6);
    }
  }
}
