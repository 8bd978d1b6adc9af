#include "warpstab/lab/suite.hpp"

#include "warpstab/errors.hpp"
#include "warpstab/lab/records.hpp"

#include <cmath>
#include <sstream>

namespace warpstab::lab {

using nlohmann::json;

namespace {

struct Worst {
    double value = 0.0;
    std::string where;
    void update(double v, const std::string& w) {
        if (!(v <= value)) value = v, where = w;  // NaN sticks
    }
};

CheckResult finish(const std::string& name, const Worst& w, double tol) {
    CheckResult c{name, w.value <= tol, w.value, tol, w.where};
    return c;
}

std::vector<Theorem> slice_theorems(const WarpedSpace& w) {
    if (w.static_model()) return {Theorem::T45};
    if (w.kind() == ModelKind::AlphaBeta) return {Theorem::T1, Theorem::T2, Theorem::T3};
    return {Theorem::T1, Theorem::T2};
}

CheckResult schema_roundtrip() {
    RunRecord r;
    r.scenario_hash = "00000000deadbeef";
    r.scenario_name = "roundtrip";
    r.theorem = "T1";
    r.model = "hyperbolic";
    r.resolution = 32;
    r.seed = 3;
    r.assumptions.conditions.push_back({"lambda_positive", true, true, 0.25});
    r.initial_deficit.theorem = Theorem::T1;
    r.initial_deficit.epsilon = 1.0 / 3.0;
    r.initial_deficit.components = {{"B1", 0.1}, {"area", std::nan("")}};
    r.flow.flow_kind = "constrained";
    r.flow.deficit_initial = 1e-3;
    r.checks.push_back({"area_nondecreasing", true, true, 0.0, "x"});
    r.final_stability.fitted_C = 0.7;
    r.stability_available = true;
    r.library_version = kLibraryVersion;
    const auto j1 = to_json(r);
    const auto j2 = to_json(record_from_json(json::parse(j1.dump())));

    FlowTrace tr;
    FlowSnapshot s;
    s.t = 0.125;
    s.area = 1.0 / 7.0;
    s.deficit = std::nan("");
    tr.snapshots = {s, s};
    std::stringstream csv;
    write_trace_csv(csv, tr);
    const auto rows = read_trace_csv(csv);
    const bool csv_ok = rows.size() == 2 && rows[0][0] == s.t && rows[0][1] == s.area && std::isnan(rows[0][4]);
    const bool ok = j1 == j2 && csv_ok;
    return {"schema_roundtrip", ok, ok ? 0.0 : 1.0, 0.0, ok ? "" : (j1 == j2 ? "csv trace" : "jsonl record")};
}

} // namespace

double suite_tolerance(int resolution) {
    if (resolution >= 32) return 1e-8;
    if (resolution >= 24) return 1e-7;
    if (resolution >= 16) return 1e-5;
    return 1e-3;
}

std::vector<CheckResult> run_identity_suite(const SuiteOptions& opt) {
    if (opt.resolution < 8) throw ConfigError("suite resolution must be >= 8");
    const double tol = suite_tolerance(opt.resolution);
    const int count = opt.profile == Profile::Strict ? 20 : 5;
    const int samples = opt.profile == Profile::Strict ? 1024 : 512;
    auto grid = std::make_shared<const SphereGrid>(SphereGrid::axisym(2, opt.resolution));
    GeometryOptions gopt;
    gopt.fault_conformal_sign = opt.fault_conformal_sign;

    Worst dual, mink1, mink2, fixed, slice_def;
    for (const auto& w : catalog_spaces()) {
        const auto corpus = random_convex_graphs(grid, w, count, opt.seed);
        for (std::size_t k = 0; k < corpus.size(); ++k) {
            const auto& s = corpus[k];
            const std::string where = w.name() + " #" + std::to_string(k);
            const auto g = geometry_intrinsic(s);
            const auto d = compare_paths(g, geometry_conformal(s, gopt));
            dual.update(std::max(d.H, d.Aring2), where);
            mink1.update(std::abs(minkowski_residual(s, g)), where);
            mink2.update(std::abs(second_minkowski_residual(s, g)), where);
        }
        const auto [lo, hi] = corpus_radius_range(w);
        std::vector<GraphSurface> slices;
        for (double t : {0.0, 0.5, 1.0}) slices.push_back(GraphSurface::slice(grid, w, lo + t * (hi - lo)));
        for (const auto& s : slices)
            for (double v : speed_constrained(geometry_intrinsic(s))) fixed.update(std::abs(v), w.name());
        for (Theorem th : slice_theorems(w)) {
            DeficitOptions dopt;
            dopt.table_samples = samples;
            std::optional<DeficitEvaluator> ev;
            try {
                ev.emplace(w, th, dopt);
            } catch (const HypothesisError&) {
                continue;  // theorem not stated for this space
            }
            for (const auto& s : slices)
                slice_def.update(std::abs(ev->evaluate(s).epsilon), w.name() + " " + to_string(th));
        }
    }

    std::vector<CheckResult> out;
    out.push_back(finish("dual_path", dual, tol));
    out.push_back(finish("minkowski_first", mink1, tol));
    out.push_back(finish("minkowski_second", mink2, tol));
    out.push_back(finish("slice_fixed_points", fixed, tol));
    out.push_back(finish("slice_deficits", slice_def, std::max(tol, 1e-8)));

    Worst stat;
    for (const auto& m : {StaticModel::ads_schwarzschild(2.0, 3), StaticModel::rn_ads(2.0, 1.0, 1.0, 3)})
        stat.update(check_static_identity(m, m.s0 * 1.01, m.s0 * 12.0), m.schwarzschild ? "ads_schwarzschild" : "rn_ads");
    out.push_back(finish("static_identities", stat, 1e-8));

    Worst phi;
    const auto ab = WarpedSpace::alpha_beta(1.0, 0.5, 2);
    phi.update(phi_prime_identity_residual(SliceTable::build(ab, SliceCurve::W2_vs_area, samples), ab), "alpha_beta");
    out.push_back(finish("phi_prime_identity", phi, 1e-8));

    out.push_back(schema_roundtrip());
    return out;
}

json to_json(const std::vector<CheckResult>& results) {
    json arr = json::array();
    for (const auto& c : results)
        arr.push_back({{"name", c.name},
                       {"pass", c.pass},
                       {"value", std::isfinite(c.value) ? json(c.value) : json(nullptr)},
                       {"tolerance", c.tolerance},
                       {"detail", c.detail}});
    return arr;
}

} // namespace warpstab::lab
