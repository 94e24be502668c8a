#pragma once

#include <string>
#include <vector>

#include "roc/analysis.hpp"
#include "roc/simulate.hpp"
#include "roc/synthesis.hpp"
#include "roc/verify.hpp"

namespace roc {

/// JSON report of a synthesis run: Riccati data, Gramians, optimal regret,
/// controller realizations, and conditioning diagnostics.
std::string synthesis_report(const PlantModel& model,
                             const RegretSynthesis& syn,
                             const HinfSynthesis* hinf);

/// Aggregate metric table, one row per controller:
/// frobenius_sq / opnorm_sq / regret per name.
std::string aggregate_report(const PlantModel& model,
                             const std::vector<SweepResult>& rows);

/// CSV with columns omega, then per controller
/// {name}_frobenius_integrand, {name}_opnorm_integrand,
/// {name}_regret_integrand. Skipped grid points emit empty fields.
std::string sweep_csv(const std::vector<SweepResult>& rows);

/// CSV with columns step, then one {name}_avg_cost column per controller.
std::string batch_csv(const std::vector<BatchResult>& rows);

/// Pass/fail lines with measured slacks for the verification suite.
std::string verify_text(const std::vector<CheckResult>& checks);

}  // namespace roc
