#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roc/analysis.hpp"
#include "roc/model_io.hpp"
#include "roc/reports.hpp"
#include "roc/simulate.hpp"
#include "roc/synthesis.hpp"
#include "roc/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitSynthesis = 3;
constexpr int kExitVerification = 4;

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw roc::Error("cannot write '" + path + "'");
  out << text;
}

struct ControllerSet {
  std::vector<std::pair<std::string, roc::LtiRealization>> causal;
  bool noncausal = false;
};

/// Builds the requested controllers. The regret controller is used in its
/// state-driven form so loops close stably on unstable plants.
ControllerSet build_controllers(const roc::PlantModel& model,
                                const std::vector<std::string>& names,
                                double epsilon_gamma, double bisect_tol) {
  ControllerSet set;
  std::optional<roc::RegretSynthesis> syn;
  auto synthesis = [&]() -> const roc::RegretSynthesis& {
    if (!syn) {
      roc::SynthesisOptions opts;
      opts.epsilon_gamma = epsilon_gamma;
      syn = roc::regret_synthesize(model, opts);
    }
    return *syn;
  };
  for (const std::string& name : names) {
    if (name == "h2") {
      set.causal.emplace_back("h2", roc::h2_controller(synthesis().riccati));
    } else if (name == "hinf") {
      set.causal.emplace_back(
          "hinf", roc::hinf_synthesize(model, bisect_tol).controller);
    } else if (name == "regret") {
      set.causal.emplace_back("regret", synthesis().controller_state_only);
    } else if (name == "noncausal") {
      set.noncausal = true;
    } else {
      throw roc::BadSpec("unknown controller '" + name +
                         "' (expected h2, hinf, regret, noncausal)");
    }
  }
  return set;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Regret-optimal, H2, and H-infinity controller synthesis and "
               "evaluation for discrete-time LTI systems"};
  app.require_subcommand(1);

  std::string model_path;
  std::string out_path;
  std::string csv_path;
  std::vector<std::string> controllers = {"noncausal", "regret", "h2", "hinf"};
  int grid = 4096;
  int horizon = 0;
  int trials = 30;
  std::uint64_t seed = 1;
  double beta = 0.9;
  double sigma = 1.0;
  double dc_scale = 0.5;
  double epsilon_gamma = 1e-8;
  double bisect_tol = 1e-4;
  std::string kind = "white";
  int random_count = 0;
  bool no_hinf = false;

  CLI::App* synth = app.add_subcommand(
      "synth", "Synthesize controllers and print a JSON report");
  synth->add_option("model", model_path, "model file")->required();
  synth->add_option("-o,--out", out_path, "output path (default stdout)");
  synth->add_option("--epsilon-gamma", epsilon_gamma,
                    "fallback inflation of gamma^2 near singular pivots");
  synth->add_option("--bisect-tol", bisect_tol,
                    "relative H-infinity bisection tolerance");
  synth->add_flag("--no-hinf", no_hinf, "skip the H-infinity baseline");

  CLI::App* analyze = app.add_subcommand(
      "analyze", "Frequency sweep: per-omega CSV plus aggregate JSON table");
  analyze->add_option("model", model_path, "model file")->required();
  analyze->add_option("--grid", grid, "frequency grid size");
  analyze->add_option("--controllers", controllers,
                      "subset of h2,hinf,regret,noncausal")
      ->delimiter(',');
  analyze->add_option("--csv", csv_path, "write per-omega integrands here");
  analyze->add_option("-o,--out", out_path, "aggregate JSON (default stdout)");
  analyze->add_option("--epsilon-gamma", epsilon_gamma, "");
  analyze->add_option("--bisect-tol", bisect_tol, "");

  CLI::App* simulate = app.add_subcommand(
      "simulate", "Time-domain batch: cumulative-average-cost CSV");
  simulate->add_option("model", model_path, "model file")->required();
  simulate->add_option("--kind", kind, "white | white_dc | ar1");
  simulate->add_option("--sigma", sigma, "white-noise standard deviation");
  simulate->add_option("--beta", beta, "AR(1) coefficient");
  simulate->add_option("--dc-scale", dc_scale, "DC component magnitude");
  simulate->add_option("--horizon", horizon, "steps per trial (default 1e4)");
  simulate->add_option("--trials", trials, "independent trials");
  simulate->add_option("--seed", seed, "base seed");
  simulate->add_option("--controllers", controllers, "causal subset")
      ->delimiter(',');
  simulate->add_option("--csv", csv_path, "output CSV (default stdout)");
  simulate->add_option("--epsilon-gamma", epsilon_gamma, "");
  simulate->add_option("--bisect-tol", bisect_tol, "");

  int verify_grid = 1024;
  CLI::App* verify = app.add_subcommand(
      "verify", "Run the oracle and invariant suite; exit 4 on failure");
  verify->add_option("model", model_path, "model file");
  verify->add_option("--random", random_count,
                     "verify this many random plants instead of a file");
  verify->add_option("--grid", verify_grid, "frequency grid size");
  verify->add_option("--horizon", horizon, "oracle horizon (0 = default)");
  verify->add_option("--seed", seed, "seed for random plants and frequencies");
  verify->add_flag("--no-hinf", no_hinf, "skip H-infinity checks");

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    const roc::PlantModel model = roc::load_model(model_path);
    roc::SynthesisOptions opts;
    opts.epsilon_gamma = epsilon_gamma;
    const roc::RegretSynthesis syn = roc::regret_synthesize(model, opts);
    std::optional<roc::HinfSynthesis> hinf;
    if (!no_hinf) hinf = roc::hinf_synthesize(model, bisect_tol);
    write_output(
        roc::synthesis_report(model, syn, hinf ? &*hinf : nullptr),
        out_path);
    return kExitOk;
  }

  if (analyze->parsed()) {
    const roc::PlantModel model = roc::load_model(model_path);
    const ControllerSet set =
        build_controllers(model, controllers, epsilon_gamma, bisect_tol);
    std::vector<roc::SweepResult> rows;
    for (const std::string& name : controllers) {
      if (name == "noncausal") {
        rows.push_back(roc::sweep_noncausal(model, grid));
      } else {
        for (const auto& [cname, realization] : set.causal)
          if (cname == name)
            rows.push_back(roc::sweep(model, {{cname, realization}}, grid)
                               .front());
      }
    }
    if (!csv_path.empty()) write_output(roc::sweep_csv(rows), csv_path);
    write_output(roc::aggregate_report(model, rows), out_path);
    return kExitOk;
  }

  if (simulate->parsed()) {
    const roc::PlantModel model = roc::load_model(model_path);
    std::vector<std::string> causal_names;
    for (const std::string& name : controllers)
      if (name != "noncausal") causal_names.push_back(name);
    const ControllerSet set =
        build_controllers(model, causal_names, epsilon_gamma, bisect_tol);
    roc::DisturbanceSpec spec;
    if (kind == "white") {
      spec.kind = roc::DisturbanceSpec::Kind::white;
    } else if (kind == "white_dc") {
      spec.kind = roc::DisturbanceSpec::Kind::white_plus_dc;
    } else if (kind == "ar1") {
      spec.kind = roc::DisturbanceSpec::Kind::ar1;
    } else {
      throw roc::BadSpec("unknown disturbance kind '" + kind + "'");
    }
    spec.sigma = sigma;
    spec.beta = beta;
    spec.dc_scale = dc_scale;
    spec.seed = seed;
    spec.dim = model.p();
    const int T = horizon > 0 ? horizon : 10000;
    const std::vector<roc::BatchResult> curves =
        roc::batch_average(model, set.causal, spec, T, trials);
    write_output(roc::batch_csv(curves), csv_path);
    return kExitOk;
  }

  if (verify->parsed()) {
    roc::VerifyOptions opts;
    opts.grid_size = verify_grid;
    opts.horizon = horizon;
    opts.seed = seed;
    opts.include_hinf = !no_hinf;
    bool ok = true;
    if (random_count > 0) {
      for (int i = 0; i < random_count; ++i) {
        const roc::PlantModel model =
            roc::random_plant(seed + i, 4, 2, 2, 0.6 + 0.1 * (i % 8));
        std::cout << "== " << model.name << " ==\n";
        const std::vector<roc::CheckResult> checks =
            roc::verify_model(model, opts);
        std::cout << roc::verify_text(checks);
        ok = ok && roc::all_passed(checks);
      }
    } else {
      if (model_path.empty())
        throw roc::BadSpec("verify: provide a model file or --random N");
      const roc::PlantModel model = roc::load_model(model_path);
      const std::vector<roc::CheckResult> checks =
          roc::verify_model(model, opts);
      std::cout << roc::verify_text(checks);
      ok = roc::all_passed(checks);
    }
    return ok ? kExitOk : kExitVerification;
  }

  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const roc::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const roc::InvalidModel& e) {
    std::cerr << "invalid model: " << e.what() << "\n";
    return kExitParse;
  } catch (const roc::Error& e) {
    std::cerr << "synthesis error: " << e.what() << "\n";
    return kExitSynthesis;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
