#pragma once

#include "warpstab/lab/records.hpp"
#include "warpstab/lab/scenario.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace warpstab::lab {

struct RunOptions {
    std::optional<int> resolution;  // overrides the scenario
    std::string output_dir;         // empty: nothing is written
    Profile profile = Profile::Strict;
};

/// Applies the option overrides (resolution) to a scenario copy.
Scenario apply_options(Scenario sc, const RunOptions& opt);

struct FlowRun {
    RunRecord record;
    FlowTrace trace;
    std::string jsonl_path, csv_path;
};

/// Monotone monitors, deficit accounting and displacement checks for a finished trace.
std::vector<MonitorCheck> verify_trace(const FlowTrace& trace, const WarpedSpace& space);

/// Validates, runs the theorem's flow, verifies the trace and persists
/// <output_dir>/<hash>/runs.jsonl and trace.csv.
FlowRun run_flow_scenario(const Scenario& scenario, const RunOptions& opt = {});

struct SweepRow {
    double delta = 0.0;
    StabilityReport report;
};

struct SweepResult {
    std::string scenario_hash;
    std::string theorem;
    std::vector<SweepRow> rows;
    bool regression_done = false;
    double exponent_observed = 0.0;
    double exponent_guaranteed = 0.0;
    double fitted_C_max = 0.0;
    bool bound_holds = true;
    std::vector<std::string> notes;
    std::string csv_path, json_path;
};

/// Initial deficits and slice distances for the scenario's perturbation shape scaled to each
/// amplitude (the first term gets amplitude delta). One worker per amplitude.
SweepResult run_sweep(const Scenario& scenario, const std::vector<double>& amplitudes, const RunOptions& opt = {});

const std::vector<std::string>& sweep_columns();
void write_sweep_csv(std::ostream& out, const SweepResult& result);
nlohmann::json to_json(const SweepResult& result);

/// Curvature and identity data of the scenario's initial surface.
nlohmann::json geometry_summary(const Scenario& scenario, const RunOptions& opt = {});
/// Deficit and stability report of the scenario's initial surface.
nlohmann::json deficit_summary(const Scenario& scenario, const RunOptions& opt = {});

} // namespace warpstab::lab
