#include "roc/reports.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

namespace roc {

namespace {

using nlohmann::json;

json matrix_json(const Matrix& M) {
  json rows = json::array();
  for (Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

json realization_json(const LtiRealization& r) {
  json j;
  j["A"] = matrix_json(r.A);
  j["B"] = matrix_json(r.B);
  j["C"] = matrix_json(r.C);
  j["D"] = matrix_json(r.D);
  switch (r.input_kind) {
    case InputKind::disturbance: j["input_kind"] = "disturbance"; break;
    case InputKind::state: j["input_kind"] = "state"; break;
    case InputKind::plant_input: j["input_kind"] = "plant_input"; break;
  }
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

void csv_cell(std::ostringstream& os, double v) {
  if (std::isfinite(v)) {
    os << v;
  }
  // NaN (skipped grid point) emits an empty field.
}

}  // namespace

std::string synthesis_report(const PlantModel& model,
                             const RegretSynthesis& syn,
                             const HinfSynthesis* hinf) {
  json j;
  j["model"] = model.name;
  j["dimensions"] = {{"n", model.n()}, {"m", model.m()}, {"p", model.p()}};
  j["P"] = matrix_json(syn.riccati.P);
  j["K_lqr"] = matrix_json(syn.riccati.K_lqr);
  j["A_K"] = matrix_json(syn.riccati.A_K);
  j["Z"] = matrix_json(syn.Z);
  j["Pi"] = matrix_json(syn.Pi);
  j["gamma_sq"] = syn.gamma_sq;
  j["Z_gamma"] = matrix_json(syn.Z_gamma);
  j["K_gamma"] = matrix_json(syn.K_gamma);
  j["F_gamma"] = matrix_json(syn.F_gamma);
  j["controller"] = realization_json(syn.controller);
  j["controller_state_only"] = realization_json(syn.controller_state_only);
  j["diagnostics"] = {{"pivot_condition", syn.pivot_condition},
                      {"epsilon_gamma_used", syn.epsilon_used},
                      {"rho_A_K", spectral_radius(syn.riccati.A_K)},
                      {"rho_F_gamma", spectral_radius(syn.F_gamma)}};
  if (hinf != nullptr) {
    j["hinf"] = {{"gamma_inf", hinf->gamma_inf},
                 {"gamma_inf_sq", hinf->gamma_inf * hinf->gamma_inf},
                 {"controller", realization_json(hinf->controller)},
                 {"bisection_steps", hinf->bisection_steps}};
  }
  return j.dump(2);
}

std::string aggregate_report(const PlantModel& model,
                             const std::vector<SweepResult>& rows) {
  json j;
  j["model"] = model.name;
  if (!rows.empty()) j["grid"] = rows.front().omegas.size();
  json table = json::object();
  for (const SweepResult& r : rows) {
    table[r.name] = {{"frobenius_sq", r.frobenius_sq},
                     {"opnorm_sq", r.opnorm_sq},
                     {"regret", r.regret_peak}};
  }
  j["controllers"] = table;
  return j.dump(2);
}

std::string sweep_csv(const std::vector<SweepResult>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "omega";
  for (const SweepResult& r : rows)
    os << ',' << r.name << "_frobenius_integrand," << r.name
       << "_opnorm_integrand," << r.name << "_regret_integrand";
  os << '\n';
  if (rows.empty()) return os.str();
  const size_t grid = rows.front().omegas.size();
  for (size_t k = 0; k < grid; ++k) {
    os << rows.front().omegas[k];
    for (const SweepResult& r : rows) {
      os << ',';
      csv_cell(os, r.frobenius_integrand[k]);
      os << ',';
      csv_cell(os, r.opnorm_integrand[k]);
      os << ',';
      csv_cell(os, r.regret_integrand[k]);
    }
    os << '\n';
  }
  return os.str();
}

std::string batch_csv(const std::vector<BatchResult>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "step";
  for (const BatchResult& r : rows) os << ',' << r.name << "_avg_cost";
  os << '\n';
  if (rows.empty()) return os.str();
  const size_t T = rows.front().avg_cost.size();
  for (size_t t = 0; t < T; ++t) {
    os << t;
    for (const BatchResult& r : rows) os << ',' << r.avg_cost[t];
    os << '\n';
  }
  return os.str();
}

std::string verify_text(const std::vector<CheckResult>& checks) {
  std::ostringstream os;
  for (const CheckResult& c : checks) {
    os << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": measured "
       << c.measured << " vs threshold " << c.threshold;
    if (!c.note.empty()) os << " (" << c.note << ")";
    os << '\n';
  }
  return os.str();
}

}  // namespace roc
