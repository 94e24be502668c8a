#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "roc/model.hpp"
#include "roc/types.hpp"

namespace roc {

/// Counter-based splittable generator: every (trial, step, index) triple maps
/// to an independent draw, so trials can run in any order and still produce
/// identical streams.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  double uniform(std::uint64_t trial, std::uint64_t step,
                 std::uint64_t index) const;

  /// Standard normal via Box-Muller on two counter draws.
  double gaussian(std::uint64_t trial, std::uint64_t step,
                  std::uint64_t index) const;

 private:
  std::uint64_t seed_;
};

/// Disturbance families used in the experiments.
struct DisturbanceSpec {
  enum class Kind { white, white_plus_dc, ar1 };
  Kind kind = Kind::white;
  double sigma = 1.0;    // white-noise standard deviation
  double dc_scale = 0.0; // magnitude of the constant component
  /// Unit direction of the constant component. Empty means "auto": the top
  /// right-singular vector of the H2 closed loop at omega = 0; resolve with
  /// resolve_auto_direction before generating.
  Vector direction;
  double beta = 0.0;  // AR(1) coefficient, |beta| < 1
  std::uint64_t seed = 0;
  Index dim = 0;  // disturbance dimension p
};

/// Throws BadSpec on invalid parameters (negative sigma, |beta| >= 1,
/// non-unit direction, nonpositive dimension).
void validate_spec(const DisturbanceSpec& spec);

/// Fills in the "auto" DC direction from the plant's H2 loop.
DisturbanceSpec resolve_auto_direction(DisturbanceSpec spec,
                                       const PlantModel& model);

/// Deterministic disturbance stream w_0 .. w_{T-1} for one trial.
std::vector<Vector> gen_disturbance(const DisturbanceSpec& spec, int T,
                                    std::uint64_t trial = 0);

/// One closed-loop run. States carry one extra entry (x_0 .. x_T) so the
/// dynamics residual is checkable step by step.
struct SimTrace {
  std::vector<Vector> x;
  std::vector<Vector> u;
  std::vector<Vector> w;
  std::vector<double> cost;      // x_t'Q x_t + u_t'R u_t
  std::vector<double> avg_cost;  // running mean of cost
};

/// Simulates the plant under a controller realization. Disturbance-driven
/// controllers are fed w (strictly causal, xi consumes w_{t-1} through the
/// state update); state-driven controllers are fed the plant state.
/// Throws NonFiniteState when |x_t| exceeds 1e12.
SimTrace run_closed_loop(const PlantModel& model,
                         const LtiRealization& controller,
                         const std::vector<Vector>& w,
                         const Vector& x0 = Vector());

struct BatchResult {
  std::string name;
  std::vector<double> avg_cost;  // mean over trials of the running-mean cost
};

/// Runs `trials` independent seeded trials per controller and averages the
/// running-mean cost curves. Output is independent of evaluation order.
std::vector<BatchResult> batch_average(
    const PlantModel& model,
    const std::vector<std::pair<std::string, LtiRealization>>& controllers,
    const DisturbanceSpec& spec, int T, int trials);

}  // namespace roc
