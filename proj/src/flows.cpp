#include "warpstab/flows.hpp"

#include "warpstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace warpstab {

const char* to_string(FlowKind kind) {
    return kind == FlowKind::Constrained ? "constrained" : "imcf";
}

FlowKind flow_kind_from_string(const std::string& name) {
    if (name == "constrained" || name == "Constrained") return FlowKind::Constrained;
    if (name == "imcf" || name == "IMCF") return FlowKind::IMCF;
    throw ConfigError("unknown flow kind '" + name + "'");
}

const char* to_string(Termination t) {
    switch (t) {
    case Termination::Umbilic: return "umbilic";
    case Termination::TMax: return "t_max";
    case Termination::GuardTripped: return "guard_tripped";
    }
    return "?";
}

void FlowControls::validate() const {
    if (!(dt_min > 0.0 && dt_min <= dt_init && dt_init <= dt_max))
        throw ConfigError("flow controls need 0 < dt_min <= dt_init <= dt_max");
    if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
    if (!(tol_umbilic > 0.0)) throw ConfigError("tol_umbilic must be positive");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ConfigError("t_max must be positive and finite");
    if (monitor_every < 1) throw ConfigError("monitor_every must be >= 1");
    if (!(guard_eps > 0.0)) throw ConfigError("guard_eps must be positive");
}

std::vector<double> FlowTrace::times() const {
    std::vector<double> t;
    t.reserve(snapshots.size());
    for (const auto& s : snapshots) t.push_back(s.t);
    return t;
}

std::vector<double> speed_constrained(const GeometryFields& g, double eps) {
    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(g.H2[i] > eps)) throw GuardError("parabolicity guard: H2 = " + std::to_string(g.H2[i]));
        s[i] = g.dlambda[i] * g.H1[i] / g.H2[i] - g.u[i];
    }
    return s;
}

std::vector<double> speed_imcf(const GeometryFields& g, double eps) {
    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!(g.H[i] > eps)) throw GuardError("mean-convexity guard: H = " + std::to_string(g.H[i]));
        s[i] = 1.0 / g.H[i];
    }
    return s;
}

std::vector<double> flow_speed(FlowKind kind, const GeometryFields& g, double eps) {
    return kind == FlowKind::Constrained ? speed_constrained(g, eps) : speed_imcf(g, eps);
}

namespace {

std::vector<double> velocity_from(FlowKind kind, const GeometryFields& g, double eps) {
    auto s = flow_speed(kind, g, eps);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= g.v[i];
    return s;
}

std::string fmt_g(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

double sup_abs(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

} // namespace

std::vector<double> graph_velocity(FlowKind kind, const GraphSurface& surface, double eps) {
    return velocity_from(kind, geometry_intrinsic(surface), eps);
}

double diffusion_coefficient(FlowKind kind, const GeometryFields& g) {
    // The principal part of every curvature in r is (1 / (lambda^2 v)) times a second derivative
    // with unit-bounded symbol; the graph equation multiplies the speed by v.
    double D = 0.0;
    const int n = g.n;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double l2 = g.lambda[i] * g.lambda[i];
        double dspeed = 0.0;
        if (kind == FlowKind::IMCF) {
            dspeed = 1.0 / (g.H[i] * g.H[i]);
        } else {
            // d(H1/H2)/d kappa_j with H1 = sigma1/n, H2 = sigma2/C(n,2).
            const double c2 = 0.5 * n * (n - 1.0);
            const double s1 = g.H[i];
            for (double kj : {g.k1[i], g.k2[i]}) {
                const double d = (1.0 / n) / g.H2[i] - g.H1[i] * ((s1 - kj) / c2) / (g.H2[i] * g.H2[i]);
                dspeed = std::max(dspeed, std::abs(g.dlambda[i] * d));
            }
        }
        D = std::max(D, dspeed / l2);
    }
    return D;
}

double stable_dt(FlowKind kind, const GraphSurface& surface, const GeometryFields& g, double cfl) {
    const double h = surface.grid().min_spacing();
    const double D = diffusion_coefficient(kind, g);
    if (!(D > 0.0) || !std::isfinite(D)) return std::numeric_limits<double>::infinity();
    return cfl * h * h / D;
}

StepResult step(FlowKind kind, const GraphSurface& surface, double dt, double eps, double cfl_limit) {
    StepResult res;
    if (!(dt > 0.0)) throw ConfigError("step needs dt > 0");
    const auto& r0 = surface.r();
    const std::size_t N = r0.size();
    auto stage = [&](const std::vector<double>& r) { return graph_velocity(kind, surface.with_r(r), eps); };
    auto axpy = [&](double a, const std::vector<double>& k) {
        std::vector<double> out(N);
        for (std::size_t i = 0; i < N; ++i) out[i] = r0[i] + a * k[i];
        return out;
    };
    try {
        const auto g0 = geometry_intrinsic(surface);
        const auto k1 = velocity_from(kind, g0, eps);
        const double limit = stable_dt(kind, surface, g0, cfl_limit);
        if (dt > limit) {
            res.reason = "dt " + fmt_g(dt) + " exceeds the stability limit " + fmt_g(limit);
            return res;
        }
        const auto k2 = stage(axpy(0.5 * dt, k1));
        const auto k3 = stage(axpy(0.5 * dt, k2));
        const auto k4 = stage(axpy(dt, k3));
        std::vector<double> r(N);
        for (std::size_t i = 0; i < N; ++i) r[i] = r0[i] + dt / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
        auto next = surface.with_r(std::move(r));
        // Instabilities the coefficient estimate misses show up first in the top of the spectrum.
        const double tail0 = surface.tail_fraction(), tail1 = next.tail_fraction();
        if (!(tail1 <= std::max(4.0 * tail0, 1e-6))) {
            res.reason = "spectral tail grew from " + fmt_g(tail0) + " to " + fmt_g(tail1);
            return res;
        }
        res.accepted = true;
        res.surface.emplace(std::move(next));
    } catch (const GuardError& e) {
        res.reason = e.what();
    } catch (const DomainError& e) {
        res.reason = std::string("domain exit: ") + e.what();
    } catch (const ConfigError& e) {
        res.reason = std::string("invalid graph: ") + e.what();
    }
    return res;
}

double dissipation_integral(FlowKind kind, std::optional<Theorem> theorem, const GraphSurface& surface,
                            const GeometryFields& g, double initial_area) {
    const int n = surface.n();
    Theorem th = theorem ? *theorem
                         : (kind == FlowKind::Constrained ? Theorem::T1
                                                          : (surface.space().static_model() ? Theorem::T45 : Theorem::T3));
    std::vector<double> f(g.size());
    double scale = 1.0;
    switch (th) {
    case Theorem::T1:
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = g.dlambda[i] * g.Aring2[i] / g.H2[i];
        scale = 1.0 / (n - 1.0);
        break;
    case Theorem::T2:
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = g.u[i] * g.Aring2[i] / g.H2[i];
        scale = 1.0 / (n * (n - 1.0));
        break;
    case Theorem::T3:
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = g.Aring2[i] / g.H[i];
        scale = 1.0 / n;
        break;
    case Theorem::T45: {
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = g.dlambda[i] * g.Aring2[i] / g.H[i];
        const double p = brendle_exponent(surface.space());
        scale = std::pow(initial_area / area(surface, g), p);
        break;
    }
    }
    return scale * integrate_surface(surface, g, f);
}

namespace {

struct RunState {
    std::vector<double> path;  // per-node normal path length
    double max_speed_hist = 0.0;
    double cumulative = 0.0;
    double discounted = 0.0;
};

} // namespace

FlowTrace run(const GraphSurface& initial, const FlowControls& c, const FlowMonitor& monitor,
              GraphSurface* final_surface) {
    c.validate();
    const auto& space = initial.space();
    const int n = initial.n();
    FlowTrace trace;
    trace.flow_kind = c.flow_kind;
    trace.theorem = c.theorem;

    GraphSurface surf = initial;
    GeometryFields g = geometry_intrinsic(surf);
    if (c.flow_kind == FlowKind::Constrained) {
        const double m = convexity_margin(g);
        if (!(m > 0.0)) throw HypothesisError("constrained flow needs a strictly convex initial surface", m);
    } else {
        const double hmin = *std::min_element(g.H.begin(), g.H.end());
        if (!(hmin > 0.0)) throw HypothesisError("inverse mean curvature flow needs a mean-convex initial surface", hmin);
    }
    trace.initial_area = area(surf, g);

    std::optional<DeficitEvaluator> ev;
    if (c.theorem) {
        DeficitOptions opt;
        opt.check_hypotheses = false;
        opt.table_samples = c.table_samples;
        if (*c.theorem != Theorem::T45) {
            double lo = std::max(surf.r_min() - 0.5, space.surface_lo());
            if (!(lo > space.a())) lo = space.a() + 0.5 * (surf.r_min() - space.a());
            double grow = 0.5;
            if (c.flow_kind == FlowKind::IMCF) grow += 1.2 * c.t_max / n;
            double hi = surf.r_max() + grow;
            if (!(hi < space.b())) hi = 0.5 * (surf.r_max() + space.b());
            opt.table_range = std::make_pair(lo, hi);
        }
        ev.emplace(space, *c.theorem, opt);
    }
    const double ricci_K = space.ricci_lower_constant();
    const auto& r_init = initial.r();

    RunState st;
    st.path.assign(r_init.size(), 0.0);
    std::vector<double> speed;
    double t = 0.0;

    // (A0/A)^((n-1)/n) for the third theorem under IMCF, 1 otherwise.
    const bool discounted = c.flow_kind == FlowKind::IMCF && c.theorem == Theorem::T3;
    auto discount = [&](const GraphSurface& sf, const GeometryFields& gf) {
        return discounted ? std::pow(trace.initial_area / area(sf, gf), (n - 1.0) / n) : 1.0;
    };
    auto snapshot = [&](int step_no) {
        FlowSnapshot s;
        s.t = t;
        s.step = step_no;
        s.area = area(surf, g);
        s.volume = enclosed_volume(surf);
        s.int_H1 = integral_H1(surf, g);
        s.ricci_term = enclosed_ricci(surf) / n;
        s.monotone_B = s.int_H1 + s.ricci_term;
        s.deficit = std::numeric_limits<double>::quiet_NaN();
        if (ev) {
            try {
                s.deficit = ev->evaluate(surf, g).epsilon;
            } catch (const Error&) {
            }
        }
        s.dissipation = dissipation_integral(c.flow_kind, c.theorem, surf, g, trace.initial_area);
        s.cumulative_dissipation = st.cumulative;
        s.discount = discount(surf, g);
        s.discounted_dissipation = st.discounted;
        s.sup_aring = sup_aring(g);
        s.aring_lp = traceless_norm(surf, g, n + 1.0);
        s.convexity_margin = convexity_margin(g);
        s.min_H = *std::min_element(g.H.begin(), g.H.end());
        s.max_speed = sup_abs(speed);
        s.displacement = *std::max_element(st.path.begin(), st.path.end());
        double rad = 0.0;
        for (std::size_t i = 0; i < r_init.size(); ++i) rad = std::max(rad, std::abs(surf.r()[i] - r_init[i]));
        s.radial_displacement = rad;
        s.dist_estimate = std::min(s.displacement, rad);
        s.displacement_bound = st.max_speed_hist * t;
        double rmin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double nr2 = g.nu_r[i] * g.nu_r[i];
            const double ric = nr2 * space.ricci_rr(surf.r()[i]) + (1.0 - nr2) * space.ricci_tangential(surf.r()[i]);
            rmin = std::min(rmin, ric + n * ricci_K);
        }
        s.ricci_normal_margin = rmin;
        if (space.static_model()) {
            s.areal_radius = std::pow(s.area / unit_sphere_area(n), 1.0 / n);
            if (c.flow_kind == FlowKind::IMCF && s.min_H > 0.0) {
                const auto q = brendle_W_Q(surf, g, trace.initial_area);
                s.W = q.W, s.Q_initial = q.Q_initial, s.Q_current = q.Q_current;
            }
        }
        trace.snapshots.push_back(s);
        if (monitor) monitor(trace.snapshots.back(), surf);
    };

    auto stop = [&](Termination why, std::string reason) {
        trace.termination = why;
        trace.reason = std::move(reason);
    };

    try {
        speed = flow_speed(c.flow_kind, g, c.guard_eps);
    } catch (const GuardError& e) {
        snapshot(0);
        stop(Termination::GuardTripped, e.what());
        if (final_surface) *final_surface = surf;
        return trace;
    }
    st.max_speed_hist = sup_abs(speed);
    double diss = dissipation_integral(c.flow_kind, c.theorem, surf, g, trace.initial_area);
    double disc = discount(surf, g);
    snapshot(0);
    int last_snap_step = 0;

    bool first = true;
    for (;;) {
        if (c.stop_when_umbilic && sup_aring(g) < c.tol_umbilic) {
            stop(Termination::Umbilic, "sup |A°| below tolerance");
            break;
        }
        if (t >= c.t_max * (1.0 - 1e-14)) {
            stop(Termination::TMax, "reached t_max");
            break;
        }
        if (trace.steps >= c.max_steps) {
            stop(Termination::GuardTripped, "step limit");
            break;
        }
        double dt = std::clamp(stable_dt(c.flow_kind, surf, g, c.cfl), c.dt_min, c.dt_max);
        if (first) dt = std::min(dt, c.dt_init);
        first = false;
        const double remaining = c.t_max - t;
        if (dt >= remaining) dt = remaining;
        StepResult res;
        for (;;) {
            res = step(c.flow_kind, surf, dt, c.guard_eps);
            if (res.accepted) break;
            ++trace.rejected;
            dt *= 0.5;
            if (dt < c.dt_min) break;
        }
        if (!res.accepted) {
            stop(Termination::GuardTripped, res.reason);
            break;
        }
        GeometryFields g_new = geometry_intrinsic(*res.surface);
        std::vector<double> speed_new;
        try {
            speed_new = flow_speed(c.flow_kind, g_new, c.guard_eps);
        } catch (const GuardError& e) {
            stop(Termination::GuardTripped, e.what());
            break;
        }
        const double diss_new = dissipation_integral(c.flow_kind, c.theorem, *res.surface, g_new, trace.initial_area);
        for (std::size_t i = 0; i < st.path.size(); ++i)
            st.path[i] += 0.5 * dt * (std::abs(speed[i]) + std::abs(speed_new[i]));
        st.cumulative += 0.5 * dt * (diss + diss_new);
        const double disc_new = discount(*res.surface, g_new);
        st.discounted += 0.5 * dt * (disc * diss + disc_new * diss_new);
        disc = disc_new;
        st.max_speed_hist = std::max(st.max_speed_hist, sup_abs(speed_new));
        surf = std::move(*res.surface);
        g = std::move(g_new);
        speed = std::move(speed_new);
        diss = diss_new;
        t += dt;
        ++trace.steps;
        if (!std::isfinite(diss) || !std::isfinite(t)) {
            stop(Termination::GuardTripped, "non-finite monitor");
            break;
        }
        if (trace.steps % c.monitor_every == 0) {
            snapshot(trace.steps);
            last_snap_step = trace.steps;
        }
    }
    if (last_snap_step != trace.steps) snapshot(trace.steps);
    if (final_surface) *final_surface = surf;
    return trace;
}

} // namespace warpstab
