#pragma once

// JSON and CSV renderings of results. Key and column order is fixed, numbers
// are printed with round-trip precision, so equal inputs give equal bytes.

#include <string>
#include <vector>

#include "catsurf/blocks.hpp"
#include "catsurf/coupling.hpp"
#include "catsurf/score.hpp"
#include "catsurf/sim.hpp"

namespace catsurf {

inline constexpr int kSchemaVersion = 1;

/// Shortest decimal that reads back to the same double.
std::string format_number(double x);

std::string scores_json(const ScoreTable& table);
/// Inverse of scores_json; throws std::invalid_argument on malformed input.
ScoreTable scores_from_json(const std::string& text);

std::string certificate_json(const Certificate& cert);
/// block,score,worst_case,argmin,scenario_min
std::string certificate_csv(const Certificate& cert);

std::string solve_json(const SolverConfig& config, const SolveResult& result);
/// block,score,residual
std::string solve_csv(const SolveResult& result);

std::string threshold_json(const ThresholdResult& result);
/// step,p1,converged,reference_drift,certified,lo,hi
std::string threshold_csv(const ThresholdResult& result);

std::string absorption_json(const ModelSpec& spec, std::size_t size, Boundary boundary,
                            const AbsorptionEstimate& est);
/// p1,runs,gas1_frequency,gas1_stderr,undecided_frequency,mean_time,mean_events,
/// then absorbed_<g> per gas
std::string absorption_csv(const ModelSpec& spec, const AbsorptionEstimate& est);

std::string sweep_json(const SweepReport& report);
/// p1,runs,gas1_frequency,gas1_stderr,undecided_frequency,mean_time,mean_events
std::string sweep_csv(const SweepReport& report);

std::string trajectory_json(const Trajectory& t);
/// time,site,type,outcome,victim
std::string trajectory_csv(const Trajectory& t);

std::string drift_json(const ModelSpec& spec, const DriftEstimate& est);
/// estimator,mean,stderr,ci_low,ci_high
std::string drift_csv(const DriftEstimate& est);

std::string replay_json(const std::vector<CoupledState>& states);
/// step,a,b,violations
std::string replay_csv(const std::vector<CoupledState>& states);

std::string violation_json(const JointArrivalLaw& law, std::size_t size, double horizon,
                           const ViolationReport& report);
/// runs,violating,fraction,mean_first_violation
std::string violation_csv(const ViolationReport& report);

}  // namespace catsurf
