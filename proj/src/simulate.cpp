#include "roc/simulate.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "roc/analysis.hpp"
#include "roc/synthesis.hpp"

namespace roc {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

std::uint64_t counter_word(std::uint64_t seed, std::uint64_t trial,
                           std::uint64_t step, std::uint64_t index) {
  std::uint64_t z = mix64(seed + kGolden);
  z = mix64(z + kGolden * (trial + 1));
  z = mix64(z + kGolden * (step + 1));
  z = mix64(z + kGolden * (index + 1));
  return z;
}

}  // namespace

double CounterRng::uniform(std::uint64_t trial, std::uint64_t step,
                           std::uint64_t index) const {
  const std::uint64_t z = counter_word(seed_, trial, step, index);
  return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::gaussian(std::uint64_t trial, std::uint64_t step,
                            std::uint64_t index) const {
  const double u1 = uniform(trial, step, 2 * index);
  const double u2 = uniform(trial, step, 2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

void validate_spec(const DisturbanceSpec& spec) {
  if (spec.dim <= 0) throw BadSpec("disturbance: dimension must be positive");
  if (spec.sigma < 0) throw BadSpec("disturbance: sigma must be nonnegative");
  if (spec.kind == DisturbanceSpec::Kind::ar1 && std::abs(spec.beta) >= 1.0)
    throw BadSpec("disturbance: |beta| must be < 1");
  if (spec.kind == DisturbanceSpec::Kind::white_plus_dc &&
      spec.direction.size() > 0) {
    if (spec.direction.size() != spec.dim)
      throw BadSpec("disturbance: direction dimension mismatch");
    if (std::abs(spec.direction.norm() - 1.0) > 1e-9)
      throw BadSpec("disturbance: direction must have unit norm");
  }
}

DisturbanceSpec resolve_auto_direction(DisturbanceSpec spec,
                                       const PlantModel& model) {
  if (spec.kind != DisturbanceSpec::Kind::white_plus_dc ||
      spec.direction.size() > 0)
    return spec;
  spec.dim = model.p();
  const RiccatiSolution riccati = lqr_synthesize(model);
  const ClosedLoop loop = close_loop(model, h2_controller(riccati));
  const ComplexMatrix Tk = eval_frequency(loop, 0.0);
  Eigen::JacobiSVD<ComplexMatrix> svd(Tk, Eigen::ComputeThinV);
  Vector dir = svd.matrixV().col(0).real();
  const double norm = dir.norm();
  if (norm < 1e-12) {
    dir = Vector::Zero(model.p());
    dir(0) = 1.0;  // degenerate loop, any direction will do
  } else {
    dir /= norm;
    // Deterministic sign convention.
    for (Index i = 0; i < dir.size(); ++i) {
      if (std::abs(dir(i)) > 1e-12) {
        if (dir(i) < 0) dir = -dir;
        break;
      }
    }
  }
  spec.direction = dir;
  return spec;
}

std::vector<Vector> gen_disturbance(const DisturbanceSpec& spec, int T,
                                    std::uint64_t trial) {
  validate_spec(spec);
  if (spec.kind == DisturbanceSpec::Kind::white_plus_dc &&
      spec.direction.size() == 0)
    throw BadSpec("disturbance: auto direction not resolved");
  const CounterRng rng(spec.seed);
  std::vector<Vector> w(static_cast<size_t>(std::max(T, 0)));
  Vector prev = Vector::Zero(spec.dim);
  for (int t = 0; t < T; ++t) {
    Vector n(spec.dim);
    for (Index i = 0; i < spec.dim; ++i)
      n(i) = rng.gaussian(trial, static_cast<std::uint64_t>(t), i);
    switch (spec.kind) {
      case DisturbanceSpec::Kind::white:
        w[t] = spec.sigma * n;
        break;
      case DisturbanceSpec::Kind::white_plus_dc:
        w[t] = spec.sigma * n + spec.dc_scale * spec.direction;
        break;
      case DisturbanceSpec::Kind::ar1:
        w[t] = n + spec.beta * prev;
        prev = w[t];
        break;
    }
  }
  return w;
}

SimTrace run_closed_loop(const PlantModel& model,
                         const LtiRealization& controller,
                         const std::vector<Vector>& w, const Vector& x0) {
  check_realization(controller);
  if (controller.causality != Causality::causal)
    throw Error("run_closed_loop: controller must be causal");
  if (controller.output_dim() != model.m())
    throw Error("run_closed_loop: controller output dimension mismatch");
  const bool state_driven = controller.input_kind == InputKind::state;
  if (!state_driven && controller.input_kind != InputKind::disturbance)
    throw Error("run_closed_loop: controller input kind must be disturbance "
                "or state");
  if (!state_driven && controller.D.norm() != 0.0)
    throw Error("run_closed_loop: disturbance-driven controller must be "
                "strictly causal");

  const int T = static_cast<int>(w.size());
  SimTrace trace;
  trace.x.reserve(T + 1);
  trace.u.reserve(T);
  trace.w = w;
  trace.cost.reserve(T);
  trace.avg_cost.reserve(T);

  Vector x = x0.size() > 0 ? x0 : Vector::Zero(model.n());
  if (x.size() != model.n())
    throw Error("run_closed_loop: x0 dimension mismatch");
  Vector xi = Vector::Zero(controller.state_dim());
  trace.x.push_back(x);

  double cost_sum = 0.0;
  for (int t = 0; t < T; ++t) {
    if (w[t].size() != model.p())
      throw BadSpec("run_closed_loop: disturbance dimension mismatch");
    Vector u;
    if (state_driven) {
      u = controller.C * xi + controller.D * x;
      xi = controller.A * xi + controller.B * x;
    } else {
      u = controller.C * xi;
      xi = controller.A * xi + controller.B * w[t];
    }
    const double step_cost =
        x.dot(model.Q * x) + u.dot(model.R * u);
    x = model.A * x + model.B_u * u + model.B_w * w[t];
    if (!x.allFinite() || x.norm() > 1e12)
      throw NonFiniteState("run_closed_loop: state diverged at step " +
                           std::to_string(t));
    trace.u.push_back(std::move(u));
    trace.x.push_back(x);
    cost_sum += step_cost;
    trace.cost.push_back(step_cost);
    trace.avg_cost.push_back(cost_sum / (t + 1));
  }
  return trace;
}

std::vector<BatchResult> batch_average(
    const PlantModel& model,
    const std::vector<std::pair<std::string, LtiRealization>>& controllers,
    const DisturbanceSpec& spec, int T, int trials) {
  if (trials < 1) throw BadSpec("batch_average: trials must be >= 1");
  const DisturbanceSpec resolved = resolve_auto_direction(spec, model);
  validate_spec(resolved);

  std::vector<BatchResult> results(controllers.size());
  for (size_t c = 0; c < controllers.size(); ++c) {
    results[c].name = controllers[c].first;
    results[c].avg_cost.assign(T, 0.0);
  }
  for (int trial = 0; trial < trials; ++trial) {
    const std::vector<Vector> w = gen_disturbance(resolved, T, trial);
    for (size_t c = 0; c < controllers.size(); ++c) {
      const SimTrace trace = run_closed_loop(model, controllers[c].second, w);
      for (int t = 0; t < T; ++t)
        results[c].avg_cost[t] += trace.avg_cost[t];
    }
  }
  for (auto& r : results)
    for (double& v : r.avg_cost) v /= trials;
  return results;
}

}  // namespace roc
