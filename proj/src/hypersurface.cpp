#include "warpstab/hypersurface.hpp"

#include "warpstab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace warpstab {

// ---------------------------------------------------------------------------------------------
// GraphSurface

GraphSurface::GraphSurface(std::shared_ptr<const SphereGrid> grid, WarpedSpace space, std::vector<double> r)
    : grid_(std::move(grid)), space_(std::move(space)), r_(std::move(r)) {
    if (!grid_) throw ConfigError("graph surface needs a grid");
    if (grid_->dim() != space_.n())
        throw ConfigError("grid dimension does not match the fiber dimension of the space");
    if (r_.size() != grid_->size()) throw ConfigError("radial field does not match the grid");
    for (std::size_t i = 0; i < r_.size(); ++i) {
        const double x = r_[i];
        if (!std::isfinite(x)) throw NumericError("non-finite radius in graph");
        if (!(x > space_.surface_lo()) || !(x < space_.b())) {
            std::ostringstream os;
            os << "graph leaves the admissible region at node " << i << " (r = " << x << ", allowed ("
               << space_.surface_lo() << ", " << space_.b() << "))";
            if (space_.static_model() && x <= space_.surface_lo()) throw HorizonError(os.str());
            throw DomainError(os.str());
        }
    }
}

GraphSurface GraphSurface::slice(std::shared_ptr<const SphereGrid> grid, WarpedSpace space, double r0) {
    const std::size_t n = grid->size();
    return {std::move(grid), std::move(space), std::vector<double>(n, r0)};
}

double GraphSurface::r_min() const { return *std::min_element(r_.begin(), r_.end()); }
double GraphSurface::r_max() const { return *std::max_element(r_.begin(), r_.end()); }

double GraphSurface::tail_fraction() const {
    double sup = 0.0;
    for (double x : r_) sup = std::max(sup, std::abs(x));
    return grid_->spectral_tail(r_) / std::max(sup, 1e-300);
}

void GraphSurface::check_resolved(double tol) const {
    const double t = tail_fraction();
    if (t > tol) {
        std::ostringstream os;
        os << "graph is under-resolved: spectral tail fraction " << t << " exceeds " << tol;
        throw NumericError(os.str());
    }
}

// ---------------------------------------------------------------------------------------------
// Geometry

namespace {

struct Frame2 {
    double a_t, a_p;  // Dr / lambda in the sigma-orthonormal frame
    double v, c;      // c = 1 / (v (v + 1))
};

Frame2 frame(double rt, double rp, double lambda) {
    Frame2 f;
    f.a_t = rt / lambda;
    f.a_p = rp / lambda;
    const double a2 = f.a_t * f.a_t + f.a_p * f.a_p;
    f.v = std::sqrt(1.0 + a2);
    f.c = 1.0 / (f.v * (f.v + 1.0));
    return f;
}

// Symmetric shape operator g^(-1/2) h g^(-1/2) for g = scale^2 (I + a a^T), 2x2 block.
void shape_operator(const Frame2& f, double scale, double h_tt, double h_tp, double h_pp, double& s_tt,
                    double& s_tp, double& s_pp) {
    const double p_tt = 1.0 - f.c * f.a_t * f.a_t, p_tp = -f.c * f.a_t * f.a_p, p_pp = 1.0 - f.c * f.a_p * f.a_p;
    // M = P h P
    const double m_tt_a = p_tt * h_tt + p_tp * h_tp, m_tp_a = p_tt * h_tp + p_tp * h_pp;
    const double m_pt_a = p_tp * h_tt + p_pp * h_tp, m_pp_a = p_tp * h_tp + p_pp * h_pp;
    const double inv = 1.0 / (scale * scale);
    s_tt = (m_tt_a * p_tt + m_tp_a * p_tp) * inv;
    s_tp = (m_tt_a * p_tp + m_tp_a * p_pp) * inv;
    s_pp = (m_pt_a * p_tp + m_pp_a * p_pp) * inv;
}

void eig2(double a, double b, double d, double& lo, double& hi) {
    const double mean = 0.5 * (a + d), half = 0.5 * (a - d);
    const double rad = std::hypot(half, b);
    lo = mean - rad;
    hi = mean + rad;
}

GeometryFields allocate(std::size_t n_nodes, int n, int mult2) {
    GeometryFields g;
    g.n = n;
    g.mult2 = mult2;
    for (auto* vec : {&g.lambda, &g.dlambda, &g.d2lambda, &g.dmu, &g.v, &g.u, &g.nu_r, &g.nu_theta, &g.nu_phi,
                      &g.h_tt, &g.h_tp, &g.h_pp, &g.k1, &g.k2, &g.H, &g.H1, &g.H2, &g.A2, &g.Aring2})
        vec->assign(n_nodes, 0.0);
    return g;
}

// Curvature scalars from principal curvatures.
void finish_node(GeometryFields& g, std::size_t i) {
    const int n = g.n, m2 = g.mult2;
    const double k1 = g.k1[i], k2 = g.k2[i];
    const double H = k1 + m2 * k2;
    const double A2 = k1 * k1 + m2 * k2 * k2;
    const double mean = H / n;
    const double d1 = k1 - mean, d2 = k2 - mean;
    g.H[i] = H;
    g.H1[i] = mean;
    g.A2[i] = A2;
    g.Aring2[i] = d1 * d1 + m2 * d2 * d2;
    // Second normalized symmetric function: sum_{i<j} k_i k_j / binom(n, 2).
    const double sigma2 = m2 * k1 * k2 + 0.5 * m2 * (m2 - 1.0) * k2 * k2;
    g.H2[i] = sigma2 / (0.5 * n * (n - 1.0));
    if (!std::isfinite(H) || !std::isfinite(g.H2[i])) throw NumericError("non-finite curvature at a graph node");
}

} // namespace

GeometryFields geometry_intrinsic(const GraphSurface& s) {
    const auto& grid = s.grid();
    const auto& w = s.space();
    const int n = w.n();
    const auto& r = s.r();
    const auto d = grid.derivatives(r);
    const bool axisym = grid.mode() == GridMode::Axisym;
    auto g = allocate(grid.size(), n, grid.second_multiplicity());

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto l = w.eval(r[i]);
        const double lam = l.lambda, dl = l.dlambda;
        if (!(lam > 0.0)) throw SingularError("lambda vanishes on the graph");
        g.lambda[i] = lam;
        g.dlambda[i] = dl;
        g.d2lambda[i] = l.d2lambda;
        const double rt = d.grad.theta[i], rp = d.grad.phi[i];
        const Frame2 f = frame(rt, rp, lam);
        g.v[i] = f.v;
        g.u[i] = lam / f.v;
        g.dmu[i] = std::pow(lam, n) * f.v;
        g.nu_r[i] = 1.0 / f.v;
        g.nu_theta[i] = -f.a_t / f.v;
        g.nu_phi[i] = -f.a_p / f.v;

        // h_ij = (1/v) (-r_;ij + lambda lambda' delta_ij + 2 (lambda'/lambda) r_i r_j)
        const double q = 2.0 * dl / lam;
        const double h_tt = (-d.hess.tt[i] + lam * dl + q * rt * rt) / f.v;
        const double h_tp = (-d.hess.tp[i] + q * rt * rp) / f.v;
        const double h_pp = (-d.hess.pp[i] + lam * dl + q * rp * rp) / f.v;
        double s_tt, s_tp, s_pp;
        shape_operator(f, lam, h_tt, h_tp, h_pp, s_tt, s_tp, s_pp);
        g.h_tt[i] = s_tt;
        g.h_tp[i] = s_tp;
        g.h_pp[i] = s_pp;
        if (axisym) {
            g.k1[i] = s_tt;
            g.k2[i] = s_pp;
        } else {
            eig2(s_tt, s_tp, s_pp, g.k1[i], g.k2[i]);
        }
        finish_node(g, i);
    }
    return g;
}

GeometryFields geometry_conformal(const GraphSurface& s, GeometryOptions opt) {
    const auto& grid = s.grid();
    const auto& w = s.space();
    const int n = w.n();
    const auto& r = s.r();
    const auto d = grid.derivatives(r);
    const bool axisym = grid.mode() == GridMode::Axisym;
    auto g = allocate(grid.size(), n, grid.second_multiplicity());
    const double sign = opt.fault_conformal_sign ? -1.0 : 1.0;

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto l = w.eval(r[i]);
        const auto fl = w.flatten(r[i]);
        g.lambda[i] = l.lambda;
        g.dlambda[i] = l.dlambda;
        g.d2lambda[i] = l.d2lambda;

        // Euclidean radial graph rho(r(y)): derivatives by the chain rule.
        const double rho = fl.rho;
        const double rt = d.grad.theta[i], rp = d.grad.phi[i];
        const double pt = fl.drho * rt, pp = fl.drho * rp;
        const double p_tt = fl.drho * d.hess.tt[i] + fl.d2rho * rt * rt;
        const double p_tp = fl.drho * d.hess.tp[i] + fl.d2rho * rt * rp;
        const double p_pp = fl.drho * d.hess.pp[i] + fl.d2rho * rp * rp;

        const Frame2 f = frame(pt, pp, rho);
        const double h_tt = (-p_tt + rho + 2.0 * pt * pt / rho) / f.v;
        const double h_tp = (-p_tp + 2.0 * pt * pp / rho) / f.v;
        const double h_pp = (-p_pp + rho + 2.0 * pp * pp / rho) / f.v;
        double e_tt, e_tp, e_pp;
        shape_operator(f, rho, h_tt, h_tp, h_pp, e_tt, e_tp, e_pp);

        // Pull back: e^w h_i^j = h~_i^j + (d_beta w) nu~^beta delta_i^j, with grad w radial in the
        // flat picture: (d w / d rho) nu~^rho = (w_r / rho') / v.
        const double shift = sign * (fl.domega / fl.drho) / f.v;
        const double ew = std::exp(-fl.omega);
        g.h_tt[i] = ew * (e_tt + shift);
        g.h_tp[i] = ew * e_tp;
        g.h_pp[i] = ew * (e_pp + shift);
        if (axisym) {
            g.k1[i] = g.h_tt[i];
            g.k2[i] = g.h_pp[i];
        } else {
            eig2(g.h_tt[i], g.h_tp[i], g.h_pp[i], g.k1[i], g.k2[i]);
        }

        // Normal nu = e^(-w) nu~ has the same orthonormal components; dmu = e^(n w) dmu~.
        g.v[i] = f.v;
        g.nu_r[i] = 1.0 / f.v;
        g.nu_theta[i] = -f.a_t / f.v;
        g.nu_phi[i] = -f.a_p / f.v;
        g.dmu[i] = std::exp(n * fl.omega) * std::pow(rho, n) * f.v;
        g.u[i] = std::exp(fl.omega) * rho / f.v;
        finish_node(g, i);
    }
    return g;
}

GeometryFields geometry(const GraphSurface& s, GeometryPath path) {
    return path == GeometryPath::Intrinsic ? geometry_intrinsic(s) : geometry_conformal(s);
}

double integrate_surface(const GraphSurface& s, const GeometryFields& g, const std::vector<double>& field) {
    std::vector<double> tmp(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) tmp[i] = field[i] * g.dmu[i];
    return s.grid().integrate(tmp);
}

double minkowski_residual(const GraphSurface& s, const GeometryFields& g) {
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = g.u[i] * g.H1[i] - g.dlambda[i];
    return integrate_surface(s, g, f);
}

double minkowski_residual(const GraphSurface& s) { return minkowski_residual(s, geometry_intrinsic(s)); }

std::vector<double> ricci_normal_gradient(const GraphSurface& s, const GeometryFields& g) {
    const int n = g.n;
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double lam = g.lambda[i], dl = g.dlambda[i], d2 = g.d2lambda[i];
        const double ric_rr = -n * (d2 / lam);
        const double ric_tan = (n - 1.0) * (1.0 - dl * dl) / (lam * lam) - d2 / lam;
        const double tang2 = 1.0 - 1.0 / (g.v[i] * g.v[i]);  // |nu^T|^2 = 1 - nu_r^2
        out[i] = g.u[i] * (ric_rr - ric_tan) * tang2;
    }
    (void)s;
    return out;
}

double second_minkowski_residual(const GraphSurface& s, const GeometryFields& g) {
    const int n = g.n;
    const auto ric = ricci_normal_gradient(s, g);
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = g.u[i] * g.H2[i] - g.dlambda[i] * g.H1[i] + ric[i] / (n * (n - 1.0));
    return integrate_surface(s, g, f);
}

double second_minkowski_residual(const GraphSurface& s) { return second_minkowski_residual(s, geometry_intrinsic(s)); }

double convexity_margin(const GeometryFields& g) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) m = std::min(m, g.min_curvature(i));
    return m;
}

double sup_aring(const GeometryFields& g) {
    double m = 0.0;
    for (double a : g.Aring2) m = std::max(m, a);
    return std::sqrt(m);
}

PathDifference compare_paths(const GeometryFields& a, const GeometryFields& b) {
    auto rel = [](const std::vector<double>& x, const std::vector<double>& y) {
        double diff = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            diff = std::max(diff, std::abs(x[i] - y[i]));
            scale = std::max(scale, std::max(std::abs(x[i]), std::abs(y[i])));
        }
        return scale > 0.0 ? diff / scale : diff;
    };
    return {rel(a.H, b.H), rel(a.Aring2, b.Aring2)};
}

} // namespace warpstab
