// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any criterion fails.
// Usage: acceptance [criterion numbers...]   (default: all)

#include "warpstab/corpus.hpp"
#include "warpstab/errors.hpp"
#include "warpstab/flows.hpp"
#include "warpstab/functionals.hpp"
#include "warpstab/lab/runner.hpp"
#include "warpstab/rigidity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

using namespace warpstab;

namespace {

constexpr double pi = std::numbers::pi;

// Nominal resolution for every criterion.
constexpr int kGeometryRes = 128;
constexpr int kFlowRes = 128;

// Frozen regression baseline for the rigidity pipeline: max over the corpus of
// ||f||_{W^{2,3}} (mean-free) / ||A°||_{L^3}. Refreeze only after a deliberate change to the fit.
constexpr double kFrozenCFit = 2.480418;
constexpr double kFrozenCFitSlack = 0.05;

struct Outcome {
    bool pass = true;
    std::string summary;
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::shared_ptr<const SphereGrid> axi(int n) { return std::make_shared<const SphereGrid>(SphereGrid::axisym(2, n)); }

WarpedSpace ads() { return WarpedSpace::from_static(StaticModel::ads_schwarzschild(2.0, 3)); }
WarpedSpace rn() { return WarpedSpace::from_static(StaticModel::rn_ads(2.0, 1.0, 1.0, 3)); }
WarpedSpace ab() { return WarpedSpace::alpha_beta(1.0, 0.5, 2); }

// All traces produced in this run, for the displacement criterion.
std::vector<std::pair<std::string, FlowTrace>>& all_traces() {
    static std::vector<std::pair<std::string, FlowTrace>> t;
    return t;
}

// Ten P2 + P3 perturbations of slices (coordinate spheres) drawn from a fixed seed.
std::vector<GraphSurface> perturbed_family(const WarpedSpace& w, double r0, std::uint64_t seed) {
    const CounterRng rng(seed);
    std::vector<GraphSurface> out;
    for (std::uint64_t k = 0; out.size() < 10; ++k) {
        const double a2 = rng.uniform(3 * k, 0.01, 0.06) * (k % 2 ? -1.0 : 1.0);
        const double a3 = rng.uniform(3 * k + 1, -0.02, 0.02);
        auto s = perturbed_slice(axi(kFlowRes), w, r0, {{2, a2, 0}, {3, a3, 0}});
        if (convexity_margin(geometry_intrinsic(s)) > 0.0) out.push_back(std::move(s));
    }
    return out;
}

bool nonincreasing(const FlowTrace& tr, double FlowSnapshot::*field, double rel, double* worst = nullptr) {
    bool ok = true;
    for (std::size_t k = 1; k < tr.snapshots.size(); ++k) {
        const double a = tr.snapshots[k - 1].*field, b = tr.snapshots[k].*field;
        const double excess = b - a - rel * std::max(1.0, std::abs(a));
        if (worst) *worst = std::max(*worst, (b - a) / std::max(1.0, std::abs(a)));
        if (excess > 0.0) ok = false;
    }
    return ok;
}

bool nondecreasing(const FlowTrace& tr, double FlowSnapshot::*field, double rel, double* worst = nullptr) {
    bool ok = true;
    for (std::size_t k = 1; k < tr.snapshots.size(); ++k) {
        const double a = tr.snapshots[k - 1].*field, b = tr.snapshots[k].*field;
        if (worst) *worst = std::max(*worst, (a - b) / std::max(1.0, std::abs(a)));
        if (a - b > rel * std::max(1.0, std::abs(a))) ok = false;
    }
    return ok;
}

FlowTrace record(const std::string& label, FlowTrace tr) {
    all_traces().emplace_back(label, tr);
    return tr;
}

// ---------------------------------------------------------------------------------------------

Outcome identity_suite() {
    auto grid = axi(kGeometryRes);
    double worst1 = 0.0, worst2 = 0.0;
    bool ok = true;
    for (const auto& w : catalog_spaces()) {
        for (const auto& s : random_convex_graphs(grid, w, 50, 101)) {
            const auto g = geometry_intrinsic(s);
            worst1 = std::max(worst1, std::abs(minkowski_residual(s, g)));
            worst2 = std::max(worst2, std::abs(second_minkowski_residual(s, g)));
        }
        // Convergence: at 128 the residuals are round-off, so the doubling is measured where
        // truncation dominates.
        const auto [lo, hi] = corpus_radius_range(w);
        const double r0 = 0.5 * (lo + hi);
        const std::vector<Perturbation> terms{{1, 0.05 * r0}, {2, 0.06 * r0}, {3, 0.02 * r0}};
        const double c1 = std::abs(minkowski_residual(perturbed_slice(axi(8), w, r0, terms)));
        const double c2 = std::abs(minkowski_residual(perturbed_slice(axi(16), w, r0, terms)));
        const double d1 = std::abs(second_minkowski_residual(perturbed_slice(axi(8), w, r0, terms)));
        const double d2 = std::abs(second_minkowski_residual(perturbed_slice(axi(16), w, r0, terms)));
        if (!(c2 <= c1 / 4.0 || c2 < 1e-13) || !(d2 <= d1 / 4.0 || d2 < 1e-13)) ok = false;
    }
    ok = ok && worst1 < 1e-8 && worst2 < 1e-8;
    return {ok, "max |first| " + fmt("%.2e", worst1) + ", max |second| " + fmt("%.2e", worst2) +
                    " over 5 spaces x 50 graphs; doubling 8->16 shrinks >= 4x"};
}

Outcome dual_path() {
    auto grid = axi(kGeometryRes);
    double worst = 0.0;
    for (const auto& w : catalog_spaces())
        for (const auto& s : random_convex_graphs(grid, w, 50, 101)) {
            const auto d = compare_paths(geometry_intrinsic(s), geometry_conformal(s));
            worst = std::max({worst, d.H, d.Aring2});
        }
    return {worst < 1e-8, "max relative difference in H, |A°|^2: " + fmt("%.2e", worst)};
}

Outcome equality_cases() {
    auto grid = axi(kGeometryRes);
    struct Case {
        WarpedSpace w;
        Theorem th;
        const char* label;
    };
    const std::vector<Case> cases = {
        {WarpedSpace::hyperbolic(2), Theorem::T1, "T1"}, {ab(), Theorem::T2, "T2"}, {ab(), Theorem::T3, "T3"},
        {rn(), Theorem::T45, "T4"},                      {ads(), Theorem::T45, "T5"},
        {WarpedSpace::hyperbolic(2), Theorem::T2, "T2"}, {ab(), Theorem::T1, "T1"},
    };
    double worst_slice = 0.0;
    int converse_checked = 0, converse_bad = 0;
    for (const auto& c : cases) {
        DeficitEvaluator ev(c.w, c.th);
        const auto [lo, hi] = corpus_radius_range(c.w);
        for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
            worst_slice = std::max(worst_slice, std::abs(ev.evaluate(GraphSurface::slice(grid, c.w, lo + t * (hi - lo))).epsilon));
        auto surfaces = random_convex_graphs(grid, c.w, 20, 202);
        surfaces.push_back(GraphSurface::slice(grid, c.w, 0.5 * (lo + hi)));
        for (const auto& s : surfaces) {
            const auto g = geometry_intrinsic(s);
            if (ev.evaluate(s, g).epsilon < 1e-8) {
                ++converse_checked;
                if (!(sup_aring(g) < 1e-6)) ++converse_bad;
            }
        }
    }
    // Outside the corpus the converse thresholds do not match: the deficit is quadratic in the
    // perturbation while |A°| is linear. Reported, not gated.
    const auto w = WarpedSpace::hyperbolic(2);
    const auto tiny = perturbed_slice(grid, w, 1.0, {{2, 1e-5, 0}});
    const double tiny_eps = DeficitEvaluator(w, Theorem::T1).evaluate(tiny).epsilon;
    const double tiny_aring = sup_aring(geometry_intrinsic(tiny));
    return {worst_slice < 1e-8 && converse_bad == 0,
            "max |eps| on slices " + fmt("%.2e", worst_slice) + "; corpus surfaces with eps < 1e-8: " +
                std::to_string(converse_checked) + ", non-umbilic among them: " + std::to_string(converse_bad) +
                "; off-corpus P2 1e-5 bump: eps " + fmt("%.1e", tiny_eps) + " with sup|A°| " + fmt("%.1e", tiny_aring)};
}

Outcome classical_flat() {
    auto s = GraphSurface::slice(axi(kGeometryRes), WarpedSpace::flat(2), 1.0);
    const auto g = geometry_intrinsic(s);
    const double iH = integrate_surface(s, g, g.H);
    const double e1 = std::abs(iH - 8 * pi), e2 = std::abs(iH - std::sqrt(16 * pi * area(s, g)));
    return {e1 < 1e-9 && e2 < 1e-9, "|int H - 8 pi| " + fmt("%.2e", e1) + ", |int H - sqrt(16 pi A)| " + fmt("%.2e", e2)};
}

// Constrained runs shared by the monotonicity and accounting criteria.
std::vector<FlowTrace>& constrained_runs() {
    static std::vector<FlowTrace> runs;
    if (!runs.empty()) return runs;
    FlowControls c;
    c.t_max = 40.0;
    c.tol_umbilic = 1e-6;
    c.monitor_every = 20;
    c.theorem = Theorem::T1;
    for (const auto& w : {WarpedSpace::hyperbolic(2), ab()}) {
        const double r0 = w.kind() == ModelKind::AlphaBeta ? w.a() + 1.0 : 1.0;
        int k = 0;
        for (const auto& s : perturbed_family(w, r0, 303))
            runs.push_back(record(w.name() + " constrained #" + std::to_string(k++), run(s, c)));
    }
    return runs;
}

Outcome flow_monotonicity() {
    const auto& runs = constrained_runs();
    bool ok = true;
    double worst_area = 0.0, worst_B = 0.0;
    int umbilic = 0;
    for (const auto& tr : runs) {
        ok = ok && nondecreasing(tr, &FlowSnapshot::area, 1e-8, &worst_area);
        ok = ok && nonincreasing(tr, &FlowSnapshot::monotone_B, 1e-8, &worst_B);
        ok = ok && tr.termination != Termination::GuardTripped;
        umbilic += tr.termination == Termination::Umbilic;
    }
    return {ok, std::to_string(runs.size()) + " runs (" + std::to_string(umbilic) + " reached umbilic); worst relative area drop " +
                    fmt("%.2e", std::max(0.0, worst_area)) + ", worst relative B rise " + fmt("%.2e", std::max(0.0, worst_B))};
}

Outcome deficit_accounting() {
    std::ostringstream msg;
    bool ok = true;

    // T1 over the shared constrained runs.
    double t1_margin = -1e300;
    for (const auto& tr : constrained_runs())
        t1_margin = std::max(t1_margin, tr.back().cumulative_dissipation - (tr.front().deficit - tr.back().deficit));
    ok = ok && t1_margin <= 1e-6;
    msg << "T1 max(cum - drop) " << fmt("%.2e", t1_margin);

    // T2 along the same flow.
    {
        FlowControls c;
        c.t_max = 40.0;
        c.monitor_every = 20;
        c.theorem = Theorem::T2;
        double margin = -1e300;
        int k = 0;
        for (const auto& s : perturbed_family(ab(), ab().a() + 1.0, 404)) {
            if (k >= 3) break;
            const auto tr = record("alpha_beta T2 #" + std::to_string(k++), run(s, c));
            margin = std::max(margin, tr.back().cumulative_dissipation - (tr.front().deficit - tr.back().deficit));
        }
        ok = ok && margin <= 1e-6;
        msg << "; T2 " << fmt("%.2e", margin);
    }

    // T3 along IMCF, literal chain and the discounted balance.
    {
        FlowControls c;
        c.flow_kind = FlowKind::IMCF;
        c.stop_when_umbilic = false;
        c.monitor_every = 20;
        c.theorem = Theorem::T3;
        c.t_max = 2.0;
        const auto w = ab();
        auto s = perturbed_slice(axi(kFlowRes), w, w.a() + 1.0, {{2, 0.05, 0}});
        const auto tr = record("alpha_beta T3", run(s, c));
        const double literal = tr.back().cumulative_dissipation - (tr.front().deficit - tr.back().deficit);
        const double discounted =
            tr.back().discounted_dissipation - (tr.front().deficit - tr.back().discount * tr.back().deficit);
        ok = ok && literal <= 1e-6;
        msg << "; T3 literal " << fmt("%.2e", literal) << (literal <= 1e-6 ? "" : " (FAILS)") << ", discounted "
            << fmt("%.2e", discounted);
    }

    // Static accounting along IMCF, weighted by (|S_0|/|S_t|)^p.
    {
        FlowControls c;
        c.flow_kind = FlowKind::IMCF;
        c.stop_when_umbilic = false;
        c.monitor_every = 20;
        c.theorem = Theorem::T45;
        c.t_max = 1.0;
        double margin = -1e300;
        for (const auto& w : {ads(), rn()}) {
            auto s = perturbed_slice(axi(kFlowRes), w, w.r_of_s(2.0 * w.static_model()->s0), {{2, 0.05, 0}});
            const auto tr = record(w.name() + " T45", run(s, c));
            const double shrink = std::pow(tr.initial_area / tr.back().area, brendle_exponent(w));
            margin = std::max(margin, tr.back().cumulative_dissipation - (tr.front().deficit - shrink * tr.back().deficit));
        }
        ok = ok && margin <= 1e-6;
        msg << "; T4/T5 " << fmt("%.2e", margin);
    }
    return {ok, msg.str() + " (each must be <= 1e-6)"};
}

Outcome imcf_exact() {
    FlowControls c;
    c.flow_kind = FlowKind::IMCF;
    c.stop_when_umbilic = false;
    c.monitor_every = 10;
    c.t_max = 2.0;
    const double r0 = 0.7;
    const auto flat = record("flat IMCF sphere", run(GraphSurface::slice(axi(kFlowRes), WarpedSpace::flat(2), r0), c));
    double worst_flat = 0.0;
    // The flat sphere is a slice at every time, so its radius follows from the area.
    for (const auto& s : flat.snapshots)
        worst_flat = std::max(worst_flat, std::abs(std::sqrt(s.area / (4 * pi)) - r0 * std::exp(s.t / 2)) / (r0 * std::exp(s.t / 2)));

    const auto w = ads();
    const double s0 = 1.5 * w.static_model()->s0;
    const auto st = record("AdS-Schwarzschild IMCF sphere", run(GraphSurface::slice(axi(kFlowRes), w, w.r_of_s(s0)), c));
    double worst_ads = 0.0;
    for (const auto& s : st.snapshots)
        worst_ads = std::max(worst_ads, std::abs(s.areal_radius - s0 * std::exp(s.t / 2)) / (s0 * std::exp(s.t / 2)));
    const bool ok = worst_flat < 1e-6 && worst_ads < 1e-6 && flat.back().t == c.t_max && st.back().t == c.t_max;
    return {ok, "relative radius error: flat " + fmt("%.2e", worst_flat) + ", AdS-Schwarzschild " + fmt("%.2e", worst_ads) +
                    " over t in [0, 2]"};
}

Outcome static_identities() {
    const auto a = StaticModel::ads_schwarzschild(2.0, 3);
    const auto r = StaticModel::rn_ads(2.0, 1.0, 1.0, 3);
    const double ea = check_static_identity(a, a.s0 * 1.01, a.s0 * 12.0);
    const double er = check_static_identity(r, r.s0 * 1.01, r.s0 * 12.0);
    return {ea < 1e-8 && er < 1e-8, "AdS-Schwarzschild " + fmt("%.2e", ea) + ", RN-AdS " + fmt("%.2e", er)};
}

Outcome weighted_volume_identity() {
    auto grid = axi(kGeometryRes);
    double worst = 0.0;
    for (const auto& w : {ads(), rn()}) {
        const double s0 = w.static_model()->s0;
        for (const auto& g : random_convex_graphs(grid, w, 20, 505)) {
            const double lhs = static_radius_moment(g);
            // n = 2 here is the fiber dimension; the identity is written in the ambient one (3).
            const double rhs = 3.0 * weighted_volume_quadrature(g) + 4 * pi * std::pow(s0, 3);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
        }
    }
    return {worst < 1e-8, "max relative residual " + fmt("%.2e", worst) + " over 2 models x 20 surfaces"};
}

Outcome brendle_monotonicity() {
    FlowControls c;
    c.flow_kind = FlowKind::IMCF;
    c.stop_when_umbilic = false;
    c.monitor_every = 5;
    c.t_max = 1.0;
    bool ok = true;
    double worst = 0.0;
    int count = 0;
    for (const auto& w : {ads(), rn()}) {
        int k = 0;
        for (const auto& s : perturbed_family(w, w.r_of_s(2.0 * w.static_model()->s0), 606)) {
            const auto tr = record(w.name() + " IMCF #" + std::to_string(k++), run(s, c));
            ok = ok && nonincreasing(tr, &FlowSnapshot::Q_current, 1e-8, &worst);
            ok = ok && tr.termination == Termination::TMax;
            ++count;
        }
    }
    return {ok, std::to_string(count) + " runs; worst relative Q rise per snapshot " + fmt("%.2e", std::max(0.0, worst))};
}

Outcome exponent_sweeps() {
    const std::vector<std::pair<std::string, std::string>> settings = {
        {"T1", "model = hyperbolic\nr0 = 1.0\ntheorem = T1\n"},
        {"T3", "model = alpha_beta\nr0 = 0.4506938556659452\ntheorem = T3\n"},
        {"T5", "model = ads_schwarzschild\ns0_multiple = 2.0\ntheorem = T5\n"},
    };
    const std::vector<double> amps = {0.01, 0.02, 0.04, 0.08};
    bool ok = true;
    std::ostringstream msg;
    for (const auto& [label, text] : settings) {
        const auto sc = lab::parse_scenario_text(text + "perturbation = 2:0.05\n");
        lab::RunOptions lo, hi;
        lo.resolution = 48;
        hi.resolution = 96;
        const auto a = lab::run_sweep(sc, amps, lo);
        const auto b = lab::run_sweep(sc, amps, hi);
        const double drift = std::abs(b.fitted_C_max - a.fitted_C_max) / a.fitted_C_max;
        const bool good = a.regression_done && a.bound_holds && b.bound_holds && drift <= 0.05 &&
                          a.exponent_observed >= 0.40 && a.exponent_observed <= 0.60 &&
                          a.exponent_observed > a.exponent_guaranteed;
        ok = ok && good;
        msg << (msg.tellp() ? "; " : "") << label << " slope " << fmt("%.3f", a.exponent_observed) << " (guaranteed "
            << fmt("%.3f", a.exponent_guaranteed) << "), C_max " << fmt("%.4f", a.fitted_C_max) << " drift "
            << fmt("%.1e", drift);
    }
    return {ok, msg.str()};
}

Outcome rigidity_pipeline() {
    auto grid = axi(kGeometryRes / 2);
    double c_fit = 0.0;
    int count = 0;
    for (const auto& w : catalog_spaces())
        for (const auto& s : random_convex_graphs(grid, w, 10, 707)) {
            const auto rep = stability_check(s);
            if (rep.aring_lp > 0.0) c_fit = std::max(c_fit, rep.f_norm_mean_free / rep.aring_lp);
            ++count;
        }
    double sphere_worst = 0.0;
    for (const auto& w : catalog_spaces()) {
        const auto [lo, hi] = corpus_radius_range(w);
        const auto rep = stability_check(GraphSurface::slice(grid, w, 0.5 * (lo + hi)));
        sphere_worst = std::max({sphere_worst, rep.f_norm, rep.aring_lp});
    }
    const bool finite = std::isfinite(c_fit) && c_fit > 0.0;
    const bool regression = std::abs(c_fit - kFrozenCFit) <= kFrozenCFitSlack * kFrozenCFit;
    return {finite && regression && sphere_worst < 1e-9,
            "C_fit " + fmt("%.6f", c_fit) + " over " + std::to_string(count) + " graphs (frozen " + fmt("%.6f", kFrozenCFit) +
                "); spheres max(||f||, ||A°||) " + fmt("%.2e", sphere_worst)};
}

Outcome heintze_karcher() {
    auto grid = axi(kGeometryRes);
    double worst = 1e300;
    for (const auto& w : {WarpedSpace::flat(2), WarpedSpace::hyperbolic(2), ab()})
        for (const auto& s : random_convex_graphs(grid, w, 50, 808)) worst = std::min(worst, heintze_karcher_gap(s));
    return {worst >= -1e-8, "min gap " + fmt("%.3e", worst) + " over 3 spaces x 50 graphs"};
}

Outcome displacement() {
    int snaps = 0;
    double worst = 0.0;
    bool ok = true;
    for (const auto& [label, tr] : all_traces())
        for (const auto& s : tr.snapshots) {
            ++snaps;
            const double excess = s.dist_estimate - s.displacement_bound;
            worst = std::max(worst, excess);
            if (excess > 1e-12) ok = false;
        }
    ok = ok && snaps > 0;
    return {ok, std::to_string(all_traces().size()) + " runs, " + std::to_string(snaps) + " snapshots; worst excess " +
                    fmt("%.2e", worst)};
}

} // namespace

int main(int argc, char** argv) {
    const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria = {
        {1, {"Minkowski identities and convergence", identity_suite}},
        {2, {"dual-path equivalence", dual_path}},
        {3, {"equality cases", equality_cases}},
        {4, {"classical flat Minkowski equality", classical_flat}},
        {5, {"constrained flow monotonicity", flow_monotonicity}},
        {6, {"deficit accounting", deficit_accounting}},
        {7, {"IMCF exact solutions", imcf_exact}},
        {8, {"static identities", static_identities}},
        {9, {"weighted-volume identity", weighted_volume_identity}},
        {10, {"static monotone quantity along IMCF", brendle_monotonicity}},
        {11, {"stability-exponent sweeps", exponent_sweeps}},
        {12, {"rigidity pipeline", rigidity_pipeline}},
        {13, {"Heintze-Karcher gap", heintze_karcher}},
        {14, {"displacement bound", displacement}},
    };
    std::set<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));
    // The displacement criterion inspects every run made so far; with a subset, run the flows it needs.
    if (!wanted.empty() && wanted.count(14)) wanted.insert({5, 6, 7, 10});

    int failures = 0;
    for (const auto& [id, entry] : criteria) {
        if (!wanted.empty() && !wanted.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = entry.second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += !o.pass;
        std::printf("criterion %2d %s  %s: %s  [%.1fs]\n", id, o.pass ? "PASS" : "FAIL", entry.first, o.summary.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d criteria failed\n", failures);
    return failures ? 1 : 0;
}
