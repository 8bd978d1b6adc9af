#pragma once

#include "warpstab/ambient.hpp"
#include "warpstab/flows.hpp"
#include "warpstab/functionals.hpp"
#include "warpstab/rigidity.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace warpstab::lab {

inline constexpr int kSchemaVersion = 1;

struct MonitorCheck {
    std::string name;
    bool pass = true;
    bool required = true;  // informational checks do not fail a run
    double value = 0.0;    // worst violation or the compared quantity
    std::string detail;
};

struct FlowSummary {
    std::string flow_kind;
    std::string termination;
    std::string reason;
    int steps = 0;
    int rejected = 0;
    int snapshots = 0;
    double t_final = 0.0;
    double deficit_initial = 0.0;
    double deficit_final = 0.0;
    double cumulative_dissipation = 0.0;
    double discounted_dissipation = 0.0;
    double sup_aring_final = 0.0;
    double max_dist_ratio = 0.0;  // max over snapshots of dist_estimate / displacement_bound
};

struct RunRecord {
    int v = kSchemaVersion;
    std::string scenario_hash;
    std::string scenario_name;
    std::string theorem;
    std::string model;
    int resolution = 0;
    std::uint64_t seed = 0;
    AssumptionReport assumptions;
    DeficitReport initial_deficit;
    FlowSummary flow;
    std::vector<MonitorCheck> checks;
    StabilityReport final_stability;
    bool stability_available = false;
    double wall_time = 0.0;
    std::string library_version;

    bool all_required_pass() const;
};

nlohmann::json to_json(const RunRecord& r);
RunRecord record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DeficitReport& d);
nlohmann::json to_json(const StabilityReport& s);
nlohmann::json to_json(const AssumptionReport& a);

/// The CSV trace schema, in column order.
const std::vector<std::string>& trace_columns();
void write_trace_csv(std::ostream& out, const FlowTrace& trace);
/// Parses a trace CSV back into rows; checks the header against the schema.
std::vector<std::vector<double>> read_trace_csv(std::istream& in);

void append_jsonl(const std::string& path, const RunRecord& record);
std::vector<RunRecord> read_jsonl(const std::string& path);

} // namespace warpstab::lab
