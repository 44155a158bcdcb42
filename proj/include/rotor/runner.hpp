#pragma once

#include <memory>
#include <optional>
#include <string>

#include "rotor/config.hpp"
#include "rotor/targets.hpp"

namespace rotor {

/// Everything a RunConfig resolves to: operators, time grid, guess field and
/// the control task, ready to optimize or propagate.
struct BuiltScenario {
    std::shared_ptr<const Basis> basis;
    std::shared_ptr<const AngularGrid> grid;
    HamiltonianModel model;
    TimeGrid time;
    double t_per_au = 0.0;
    FieldTrace guess;
    std::unique_ptr<ControlTask> task;
    std::optional<ThermalTarget> thermal; // thermal tasks only
};

BuiltScenario buildScenario(const RunConfig& config);

/// Guess field: per-channel sums of Gaussian envelopes sampled at the step
/// edges.
FieldTrace buildGuessField(const RunConfig& config, const TimeGrid& time, double t_per_au);

/// Channel labels for file names and headers ("z" or "x","y").
std::vector<std::string> channelNames(const RunConfig& config);

/// Runs every configured (method, lambda) pair, writing per-run directories
/// with convergence.csv, field_<channel>.csv, dynamics.csv and summary.json;
/// returns the aggregate summary (also written to <out_root>/summary.json).
/// threads > 1 executes independent runs concurrently.
nlohmann::json runScenario(const RunConfig& config, const std::string& out_root,
                           int threads = 1);

/// Propagates the guess (or zero) field without optimization and writes
/// dynamics.csv; with a zero field over an integer number of periods the
/// summary reports the revival error |psi(t_f) - psi(0)|.
nlohmann::json runPropagation(const RunConfig& config, const std::string& out_dir,
                              bool zero_field);

} // namespace rotor
