#include "warpstab/lab/records.hpp"

#include "warpstab/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace warpstab::lab {

using nlohmann::json;

namespace {

// JSON has no NaN; missing values travel as null.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }
double get_num(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

std::string fmt(double x) {
    if (!std::isfinite(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

bool RunRecord::all_required_pass() const {
    for (const auto& c : checks)
        if (c.required && !c.pass) return false;
    return true;
}

json to_json(const DeficitReport& d) {
    json comps = json::object();
    for (const auto& [k, v] : d.components) comps[k] = num(v);
    return {{"theorem", to_string(d.theorem)}, {"epsilon", num(d.epsilon)}, {"components", comps},
            {"aring_lp", num(d.aring_lp)}, {"notes", d.notes}};
}

json to_json(const StabilityReport& s) {
    return {{"theorem", to_string(s.theorem)},
            {"epsilon", num(s.epsilon)},
            {"aring_lp", num(s.aring_lp)},
            {"dist_slice", num(s.dist_slice)},
            {"r_star", num(s.r_star)},
            {"f_norm", num(s.f_norm)},
            {"f_norm_mean_free", num(s.f_norm_mean_free)},
            {"fitted_C", num(s.fitted_C)},
            {"exponent", num(s.exponent)},
            {"exponent_observed", num(s.exponent_observed)},
            {"norm_ratio", num(s.norm_ratio)},
            {"sup_omega", num(s.sup_omega)},
            {"volume_scale", num(s.volume_scale)},
            {"inconsistent", s.inconsistent},
            {"benign", s.benign},
            {"bound_violated", s.bound_violated},
            {"note", s.note}};
}

json to_json(const AssumptionReport& a) {
    json arr = json::array();
    for (const auto& c : a.conditions)
        arr.push_back({{"name", c.name}, {"applicable", c.applicable}, {"pass", c.pass}, {"margin", num(c.margin)}});
    return arr;
}

json to_json(const RunRecord& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"required", c.required}, {"value", num(c.value)},
                          {"detail", c.detail}});
    const auto& f = r.flow;
    json flow = {{"flow_kind", f.flow_kind},
                 {"termination", f.termination},
                 {"reason", f.reason},
                 {"steps", f.steps},
                 {"rejected", f.rejected},
                 {"snapshots", f.snapshots},
                 {"t_final", num(f.t_final)},
                 {"deficit_initial", num(f.deficit_initial)},
                 {"deficit_final", num(f.deficit_final)},
                 {"cumulative_dissipation", num(f.cumulative_dissipation)},
                 {"discounted_dissipation", num(f.discounted_dissipation)},
                 {"sup_aring_final", num(f.sup_aring_final)},
                 {"max_dist_ratio", num(f.max_dist_ratio)}};
    json j = {{"v", r.v},
              {"scenario_hash", r.scenario_hash},
              {"scenario_name", r.scenario_name},
              {"theorem", r.theorem},
              {"model", r.model},
              {"resolution", r.resolution},
              {"seed", r.seed},
              {"assumptions", to_json(r.assumptions)},
              {"initial_deficit", to_json(r.initial_deficit)},
              {"flow", flow},
              {"checks", checks},
              {"stability_available", r.stability_available},
              {"wall_time", r.wall_time},
              {"library_version", r.library_version}};
    if (r.stability_available) j["final_stability"] = to_json(r.final_stability);
    return j;
}

RunRecord record_from_json(const json& j) {
    RunRecord r;
    r.v = j.at("v").get<int>();
    if (r.v != kSchemaVersion) throw ConfigError("unsupported record schema version " + std::to_string(r.v));
    r.scenario_hash = j.at("scenario_hash").get<std::string>();
    r.scenario_name = j.at("scenario_name").get<std::string>();
    r.theorem = j.at("theorem").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.resolution = j.at("resolution").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& c : j.at("assumptions"))
        r.assumptions.conditions.push_back({c.at("name").get<std::string>(), c.at("applicable").get<bool>(),
                                            c.at("pass").get<bool>(), get_num(c.at("margin"))});
    const auto& d = j.at("initial_deficit");
    r.initial_deficit.theorem = theorem_from_string(d.at("theorem").get<std::string>());
    r.initial_deficit.epsilon = get_num(d.at("epsilon"));
    for (const auto& [k, v] : d.at("components").items()) r.initial_deficit.components.emplace_back(k, get_num(v));
    r.initial_deficit.aring_lp = get_num(d.at("aring_lp"));
    r.initial_deficit.notes = d.at("notes").get<std::string>();
    const auto& f = j.at("flow");
    r.flow.flow_kind = f.at("flow_kind").get<std::string>();
    r.flow.termination = f.at("termination").get<std::string>();
    r.flow.reason = f.at("reason").get<std::string>();
    r.flow.steps = f.at("steps").get<int>();
    r.flow.rejected = f.at("rejected").get<int>();
    r.flow.snapshots = f.at("snapshots").get<int>();
    r.flow.t_final = get_num(f.at("t_final"));
    r.flow.deficit_initial = get_num(f.at("deficit_initial"));
    r.flow.deficit_final = get_num(f.at("deficit_final"));
    r.flow.cumulative_dissipation = get_num(f.at("cumulative_dissipation"));
    r.flow.discounted_dissipation = get_num(f.at("discounted_dissipation"));
    r.flow.sup_aring_final = get_num(f.at("sup_aring_final"));
    r.flow.max_dist_ratio = get_num(f.at("max_dist_ratio"));
    for (const auto& c : j.at("checks"))
        r.checks.push_back({c.at("name").get<std::string>(), c.at("pass").get<bool>(), c.at("required").get<bool>(),
                            get_num(c.at("value")), c.at("detail").get<std::string>()});
    r.stability_available = j.at("stability_available").get<bool>();
    if (r.stability_available) {
        const auto& s = j.at("final_stability");
        auto& st = r.final_stability;
        st.theorem = theorem_from_string(s.at("theorem").get<std::string>());
        st.epsilon = get_num(s.at("epsilon"));
        st.aring_lp = get_num(s.at("aring_lp"));
        st.dist_slice = get_num(s.at("dist_slice"));
        st.r_star = get_num(s.at("r_star"));
        st.f_norm = get_num(s.at("f_norm"));
        st.f_norm_mean_free = get_num(s.at("f_norm_mean_free"));
        st.fitted_C = get_num(s.at("fitted_C"));
        st.exponent = get_num(s.at("exponent"));
        st.exponent_observed = get_num(s.at("exponent_observed"));
        st.norm_ratio = get_num(s.at("norm_ratio"));
        st.sup_omega = get_num(s.at("sup_omega"));
        st.volume_scale = get_num(s.at("volume_scale"));
        st.inconsistent = s.at("inconsistent").get<bool>();
        st.benign = s.at("benign").get<bool>();
        st.bound_violated = s.at("bound_violated").get<bool>();
        st.note = s.at("note").get<std::string>();
    }
    r.wall_time = j.at("wall_time").get<double>();
    r.library_version = j.at("library_version").get<std::string>();
    return r;
}

const std::vector<std::string>& trace_columns() {
    static const std::vector<std::string> cols{"t",           "area",     "volume",           "int_H1",
                                               "deficit",     "dissipation", "sup_aring",     "convexity_margin",
                                               "displacement_bound"};
    return cols;
}

void write_trace_csv(std::ostream& out, const FlowTrace& trace) {
    const auto& cols = trace_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << "\n";
    for (const auto& s : trace.snapshots) {
        out << fmt(s.t) << ',' << fmt(s.area) << ',' << fmt(s.volume) << ',' << fmt(s.int_H1) << ','
            << fmt(s.deficit) << ',' << fmt(s.dissipation) << ',' << fmt(s.sup_aring) << ','
            << fmt(s.convexity_margin) << ',' << fmt(s.displacement_bound) << "\n";
    }
}

std::vector<std::vector<double>> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty trace file");
    std::string expect;
    for (const auto& c : trace_columns()) expect += (expect.empty() ? "" : ",") + c;
    if (line != expect) throw ConfigError("trace header does not match the schema: " + line);
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(cell == "nan" ? std::numeric_limits<double>::quiet_NaN() : std::stod(cell));
        if (row.size() != trace_columns().size()) throw ConfigError("trace row has the wrong number of columns");
        rows.push_back(std::move(row));
    }
    return rows;
}

void append_jsonl(const std::string& path, const RunRecord& record) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw ConfigError("cannot open " + path + " for appending");
    out << to_json(record).dump() << "\n";
}

std::vector<RunRecord> read_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::vector<RunRecord> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(record_from_json(json::parse(line)));
    return out;
}

} // namespace warpstab::lab
