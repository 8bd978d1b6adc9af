#include "warpstab/lab/runner.hpp"

#include "warpstab/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>

namespace warpstab::lab {

using nlohmann::json;

namespace {

int table_samples(Profile p) { return p == Profile::Strict ? 1024 : 512; }

// Worst violation of a per-snapshot ordering, relative to max(1, |previous|).
double worst_step(const FlowTrace& tr, double FlowSnapshot::*field, double sign) {
    double worst = 0.0;
    for (std::size_t k = 1; k < tr.snapshots.size(); ++k) {
        const double a = tr.snapshots[k - 1].*field, b = tr.snapshots[k].*field;
        if (!std::isfinite(a) || !std::isfinite(b)) continue;
        worst = std::max(worst, sign * (b - a) / std::max(1.0, std::abs(a)));
    }
    return worst;
}

MonitorCheck ordering(const FlowTrace& tr, const std::string& name, double FlowSnapshot::*field, bool increasing) {
    const double w = worst_step(tr, field, increasing ? -1.0 : 1.0);
    return {name, w <= 1e-8, true, w, increasing ? "nondecreasing within 1e-8 relative" : "nonincreasing within 1e-8 relative"};
}

MonitorCheck accounting(const std::string& name, double lhs, double rhs, bool required) {
    MonitorCheck c{name, false, required, lhs - rhs, ""};
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
        c.detail = "deficit unavailable along the run";
        return c;
    }
    c.pass = lhs <= rhs + 1e-6;
    c.detail = "dissipation " + std::to_string(lhs) + " vs deficit drop " + std::to_string(rhs);
    return c;
}

std::filesystem::path run_dir(const RunOptions& opt, const Scenario& sc) {
    const auto dir = std::filesystem::path(opt.output_dir) / sc.hash_hex();
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace

Scenario apply_options(Scenario sc, const RunOptions& opt) {
    if (opt.resolution) sc.resolution = *opt.resolution;
    return sc;
}

std::vector<MonitorCheck> verify_trace(const FlowTrace& tr, const WarpedSpace& space) {
    std::vector<MonitorCheck> out;
    if (tr.snapshots.empty()) return out;
    const auto& a = tr.front();
    const auto& b = tr.back();
    if (tr.flow_kind == FlowKind::Constrained) {
        out.push_back(ordering(tr, "area_nondecreasing", &FlowSnapshot::area, true));
        out.push_back(ordering(tr, "monotone_B_nonincreasing", &FlowSnapshot::monotone_B, false));
        if (tr.theorem) {
            out.push_back(ordering(tr, "deficit_nonincreasing", &FlowSnapshot::deficit, false));
            out.push_back(accounting("deficit_accounting", b.cumulative_dissipation, a.deficit - b.deficit, true));
        }
    } else if (tr.theorem == Theorem::T3) {
        // The undiscounted balance is reported but does not gate the run (see README).
        out.push_back(accounting("deficit_accounting_undiscounted", b.cumulative_dissipation, a.deficit - b.deficit, false));
        out.push_back(
            accounting("deficit_accounting", b.discounted_dissipation, a.deficit - b.discount * b.deficit, true));
    } else if (tr.theorem == Theorem::T45) {
        out.push_back(ordering(tr, "Q_nonincreasing", &FlowSnapshot::Q_current, false));
        const double shrink = std::pow(tr.initial_area / b.area, brendle_exponent(space));
        out.push_back(accounting("deficit_accounting", b.cumulative_dissipation, a.deficit - shrink * b.deficit, true));
    }
    double worst = 0.0;
    bool ok = true;
    for (const auto& s : tr.snapshots) {
        if (s.displacement_bound > 0.0) worst = std::max(worst, s.dist_estimate / s.displacement_bound);
        if (!(s.dist_estimate <= s.displacement_bound + 1e-12)) ok = false;
    }
    out.push_back({"displacement_bound", ok, true, worst, "dist estimate / (max speed * t)"});
    return out;
}

FlowRun run_flow_scenario(const Scenario& input, const RunOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario sc = apply_options(input, opt);
    sc.validate();
    const auto space = sc.space();
    const auto grid = sc.make_grid();
    const auto surface = sc.surface(space, grid);
    const Theorem th = sc.theorem_id();

    FlowRun run;
    auto& rec = run.record;
    rec.scenario_hash = sc.hash_hex();
    rec.scenario_name = sc.name;
    rec.theorem = sc.theorem;
    rec.model = sc.model;
    rec.resolution = sc.resolution;
    rec.seed = sc.seed;
    rec.library_version = kLibraryVersion;
    rec.assumptions = check_assumptions(space);

    DeficitOptions dopt;
    dopt.table_samples = table_samples(opt.profile);
    try {
        rec.initial_deficit = DeficitEvaluator(space, th, dopt).evaluate(surface);
    } catch (const HypothesisError& e) {
        throw ConfigError(std::string("scenario violates the theorem's hypotheses: ") + e.what());
    }

    auto controls = sc.controls();
    controls.table_samples = dopt.table_samples;
    GraphSurface final_surface = surface;
    run.trace = warpstab::run(surface, controls, {}, &final_surface);
    const auto& tr = run.trace;

    auto& f = rec.flow;
    f.flow_kind = to_string(tr.flow_kind);
    f.termination = to_string(tr.termination);
    f.reason = tr.reason;
    f.steps = tr.steps;
    f.rejected = tr.rejected;
    f.snapshots = static_cast<int>(tr.snapshots.size());
    f.t_final = tr.back().t;
    f.deficit_initial = tr.front().deficit;
    f.deficit_final = tr.back().deficit;
    f.cumulative_dissipation = tr.back().cumulative_dissipation;
    f.discounted_dissipation = tr.back().discounted_dissipation;
    f.sup_aring_final = tr.back().sup_aring;
    rec.checks = verify_trace(tr, space);
    for (const auto& c : rec.checks)
        if (c.name == "displacement_bound") f.max_dist_ratio = c.value;

    try {
        StabilityOptions so;
        so.theorem = th;
        so.deficit = dopt;
        so.deficit.check_hypotheses = false;
        rec.final_stability = stability_check(final_surface, so);
        rec.stability_available = true;
    } catch (const Error& e) {
        rec.stability_available = false;
        rec.final_stability.note = e.what();
    }
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!opt.output_dir.empty()) {
        const auto dir = run_dir(opt, sc);
        run.jsonl_path = (dir / "runs.jsonl").string();
        run.csv_path = (dir / "trace.csv").string();
        append_jsonl(run.jsonl_path, rec);
        std::ofstream csv(run.csv_path);
        if (!csv) throw ConfigError("cannot write " + run.csv_path);
        write_trace_csv(csv, tr);
    }
    return run;
}

const std::vector<std::string>& sweep_columns() {
    static const std::vector<std::string> cols{"delta", "epsilon", "dist", "aring_lp", "fitted_C"};
    return cols;
}

SweepResult run_sweep(const Scenario& input, const std::vector<double>& amplitudes, const RunOptions& opt) {
    const Scenario sc = apply_options(input, opt);
    if (amplitudes.size() < 4) throw ConfigError("a sweep needs at least 4 amplitudes");
    for (double d : amplitudes)
        if (!(d >= 0.0) || !std::isfinite(d)) throw ConfigError("sweep amplitudes must be finite and nonnegative");
    sc.validate();

    // Shape: the scenario's perturbation list normalized so its first term has amplitude 1.
    std::vector<Perturbation> shape = sc.perturbations;
    if (shape.empty()) shape = {{2, 1.0, 0}};
    const double lead = shape.front().amplitude;
    if (!(std::abs(lead) > 0.0)) throw ConfigError("first perturbation term must be nonzero to define a sweep shape");
    for (auto& t : shape) t.amplitude /= lead;

    const auto space = sc.space();
    const auto grid = sc.make_grid();
    const Theorem th = sc.theorem_id();
    StabilityOptions so;
    so.theorem = th;
    so.deficit.table_samples = table_samples(opt.profile);

    std::vector<std::future<SweepRow>> jobs;
    for (double d : amplitudes) {
        jobs.push_back(std::async(std::launch::async, [&, d] {
            auto terms = shape;
            for (auto& t : terms) t.amplitude *= d;
            const auto s = perturbed_slice(grid, space, sc.base_radius(space), terms);
            return SweepRow{d, stability_check(s, so)};
        }));
    }
    SweepResult res;
    res.scenario_hash = sc.hash_hex();
    res.theorem = sc.theorem;
    for (auto& j : jobs) res.rows.push_back(j.get());
    std::sort(res.rows.begin(), res.rows.end(), [](const auto& a, const auto& b) { return a.delta < b.delta; });
    res.exponent_guaranteed = stability_exponent(space, th);

    std::vector<StabilityReport> usable;
    double eps_lo = std::numeric_limits<double>::infinity(), eps_hi = 0.0;
    for (const auto& r : res.rows) {
        if (r.report.inconsistent) {
            res.bound_holds = false;
            res.notes.push_back("delta " + std::to_string(r.delta) + ": deficit vanishes away from a slice");
        }
        if (r.report.epsilon > so.eps_tol && r.report.dist_slice > 0.0) {
            usable.push_back(r.report);
            res.fitted_C_max = std::max(res.fitted_C_max, r.report.fitted_C);
            eps_lo = std::min(eps_lo, r.report.epsilon);
            eps_hi = std::max(eps_hi, r.report.epsilon);
        }
    }
    for (std::size_t k = 1; k < res.rows.size(); ++k)
        if (res.rows[k].report.epsilon < res.rows[k - 1].report.epsilon)
            res.notes.push_back("warning: deficit decreases between delta " + std::to_string(res.rows[k - 1].delta) +
                                " and " + std::to_string(res.rows[k].delta) + "; resolution may be insufficient");
    for (const auto& r : usable)
        if (r.dist_slice > res.fitted_C_max * std::pow(r.epsilon, r.exponent) * (1.0 + 1e-12)) res.bound_holds = false;

    if (usable.size() >= 2) {
        res.exponent_observed = observed_exponent(usable);
        res.regression_done = true;
        for (auto& r : res.rows) r.report.exponent_observed = res.exponent_observed;
        if (eps_hi < 10.0 * eps_lo) res.notes.push_back("warning: deficits span less than one decade");
    } else {
        res.notes.push_back("regression skipped: fewer than two rows with positive deficit and distance");
    }

    if (!opt.output_dir.empty()) {
        const auto dir = run_dir(opt, sc);
        res.csv_path = (dir / "sweep.csv").string();
        res.json_path = (dir / "sweep.json").string();
        std::ofstream csv(res.csv_path);
        write_sweep_csv(csv, res);
        std::ofstream js(res.json_path);
        js << to_json(res).dump(2) << "\n";
        if (!csv || !js) throw ConfigError("cannot write sweep output in " + dir.string());
    }
    return res;
}

void write_sweep_csv(std::ostream& out, const SweepResult& res) {
    const auto& cols = sweep_columns();
    for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << "\n";
    out.precision(17);
    for (const auto& r : res.rows)
        out << r.delta << ',' << r.report.epsilon << ',' << r.report.dist_slice << ',' << r.report.aring_lp << ','
            << r.report.fitted_C << "\n";
}

json to_json(const SweepResult& res) {
    json rows = json::array();
    for (const auto& r : res.rows) {
        auto j = to_json(r.report);
        j["delta"] = r.delta;
        rows.push_back(j);
    }
    return {{"v", kSchemaVersion},
            {"scenario_hash", res.scenario_hash},
            {"theorem", res.theorem},
            {"regression_done", res.regression_done},
            {"exponent_observed", res.regression_done ? json(res.exponent_observed) : json(nullptr)},
            {"exponent_guaranteed", res.exponent_guaranteed},
            {"fitted_C_max", res.fitted_C_max},
            {"bound_holds", res.bound_holds},
            {"notes", res.notes},
            {"rows", rows}};
}

json geometry_summary(const Scenario& input, const RunOptions& opt) {
    const Scenario sc = apply_options(input, opt);
    const auto s = sc.surface();
    const auto g = geometry_intrinsic(s);
    const auto gc = geometry_conformal(s);
    const auto diff = compare_paths(g, gc);
    const auto sd = slice_distance(s);
    json j = {{"scenario_hash", sc.hash_hex()},
              {"model", sc.model},
              {"resolution", sc.resolution},
              {"area", area(s, g)},
              {"volume", enclosed_volume(s)},
              {"int_H1", integral_H1(s, g)},
              {"sup_aring", sup_aring(g)},
              {"convexity_margin", convexity_margin(g)},
              {"min_H", *std::min_element(g.H.begin(), g.H.end())},
              {"minkowski_residual", minkowski_residual(s, g)},
              {"second_minkowski_residual", second_minkowski_residual(s, g)},
              {"dual_path_H", diff.H},
              {"dual_path_Aring2", diff.Aring2},
              {"slice_r_star", sd.r_star},
              {"slice_dist", sd.dist},
              {"sup_omega", to_euclidean(s).sup_abs_omega()}};
    try {
        j["heintze_karcher_gap"] = heintze_karcher_gap(s, g);
    } catch (const HypothesisError&) {
        j["heintze_karcher_gap"] = nullptr;
    }
    return j;
}

json deficit_summary(const Scenario& input, const RunOptions& opt) {
    const Scenario sc = apply_options(input, opt);
    sc.validate();
    const auto s = sc.surface();
    DeficitOptions dopt;
    dopt.table_samples = table_samples(opt.profile);
    StabilityOptions so;
    so.theorem = sc.theorem_id();
    so.deficit = dopt;
    DeficitReport d;
    try {
        d = DeficitEvaluator(s.space(), sc.theorem_id(), dopt).evaluate(s);
    } catch (const HypothesisError& e) {
        throw ConfigError(std::string("scenario violates the theorem's hypotheses: ") + e.what());
    }
    return {{"scenario_hash", sc.hash_hex()}, {"deficit", to_json(d)}, {"stability", to_json(stability_check(s, so))}};
}

} // namespace warpstab::lab
