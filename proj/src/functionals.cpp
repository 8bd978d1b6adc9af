#include "warpstab/functionals.hpp"

#include "warpstab/errors.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace warpstab {

namespace {

double sphere_integral(const SphereGrid& grid, const std::vector<double>& field) { return grid.integrate(field); }

// Static models: ambient dimension N = n + 1 and |S^{N-1}| = |S^n|.
const StaticModel& require_static(const WarpedSpace& space) {
    if (!space.static_model()) throw ConfigError("a static model is required (" + space.name() + ")");
    return *space.static_model();
}

} // namespace

double area(const GraphSurface& surface, const GeometryFields& g) {
    return sphere_integral(surface.grid(), g.dmu);
}

double area(const GraphSurface& surface) { return area(surface, geometry_intrinsic(surface)); }

double enclosed_volume(const GraphSurface& surface) {
    const auto& w = surface.space();
    std::vector<double> f(surface.r().size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = w.volume_primitive(surface.r()[i]);
    return sphere_integral(surface.grid(), f);
}

double enclosed_ricci(const GraphSurface& surface) {
    const auto& w = surface.space();
    std::vector<double> f(surface.r().size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = w.ricci_primitive(surface.r()[i]);
    return sphere_integral(surface.grid(), f);
}

double weighted_volume_quadrature(const GraphSurface& surface) {
    const auto& w = surface.space();
    const auto& sm = require_static(w);
    const int n = w.n();
    const double N = n + 1.0;
    const double r_lo = w.surface_lo();
    const double s_lo = w.s_of_r(r_lo);
    // Horizon cap: int_{s0}^{s_lo} s^n ds (f dvol = s^n ds d sigma).
    const double cap = (std::pow(s_lo, N) - std::pow(sm.s0, N)) / N;
    std::vector<double> f(surface.r().size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double r = surface.r()[i];
        const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(r - r_lo) / 0.2)));
        const double h = (r - r_lo) / panels;
        double sum = 0.0;
        for (int p = 0; p < panels; ++p) {
            sum += boost::math::quadrature::gauss<double, 30>::integrate(
                [&](double t) {
                    const auto l = w.eval(t);
                    return l.dlambda * std::pow(l.lambda, n);
                },
                r_lo + p * h, r_lo + (p + 1) * h);
        }
        f[i] = cap + sum;
    }
    return sphere_integral(surface.grid(), f);
}

double weighted_volume(const GraphSurface& surface) {
    const auto& sm = require_static(surface.space());
    const int n = surface.n();
    const double N = n + 1.0;
    return (static_radius_moment(surface) - unit_sphere_area(n) * std::pow(sm.s0, N)) / N;
}

double static_radius_moment(const GraphSurface& surface) {
    const auto& w = surface.space();
    require_static(w);
    const double N = w.n() + 1.0;
    std::vector<double> f(surface.r().size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(w.s_of_r(surface.r()[i]), N);
    return sphere_integral(surface.grid(), f);
}

double integral_H1(const GraphSurface& surface, const GeometryFields& g) {
    return integrate_surface(surface, g, g.H1);
}

double traceless_norm(const GraphSurface& surface, const GeometryFields& g, double p) {
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(std::sqrt(std::max(g.Aring2[i], 0.0)), p);
    return std::pow(integrate_surface(surface, g, f), 1.0 / p);
}

SliceValues slice_values(const WarpedSpace& space, double r) {
    const int n = space.n();
    const double S = unit_sphere_area(n);
    const auto l = space.eval(r);
    SliceValues v;
    v.A = S * std::pow(l.lambda, n);
    v.V = S * space.volume_primitive(r);
    const double h1 = S * l.dlambda * std::pow(l.lambda, n - 1);
    v.B1 = h1 + S * space.ricci_primitive(r) / n;
    v.W2 = h1 - v.V;
    return v;
}

const char* to_string(SliceCurve curve) {
    switch (curve) {
    case SliceCurve::B1_vs_area: return "B1_vs_area";
    case SliceCurve::B1_vs_volume: return "B1_vs_volume";
    case SliceCurve::W2_vs_area: return "W2_vs_area";
    }
    return "?";
}

SliceTable SliceTable::build(const WarpedSpace& space, SliceCurve curve, int samples) {
    double lo = std::max(space.work_lo(), space.surface_lo());
    double hi = space.work_hi();
    if (!(hi < space.b())) hi = space.b() - 0.01 * (space.b() - lo);
    if (!(lo > space.a())) lo = space.a() + 0.01 * (hi - space.a());
    return build(space, curve, lo, hi, samples);
}

SliceTable SliceTable::build(const WarpedSpace& space, SliceCurve curve, double r_lo, double r_hi, int samples) {
    if (samples < 64) throw ConfigError("slice table needs at least 64 samples");
    if (!(r_lo < r_hi) || !(r_lo >= space.surface_lo()) || !(r_hi < space.b()) || !(r_lo > space.a()))
        throw ConfigError("slice table range outside the space domain");
    const int n = space.n();
    const double S = unit_sphere_area(n);
    SliceTable t;
    t.curve_ = curve;
    t.r_.resize(samples);
    for (int k = 0; k < samples; ++k) t.r_[k] = r_lo + (r_hi - r_lo) * k / (samples - 1.0);

    // Columns by cumulative integration from r_lo: one 20-point Gauss rule per cell.
    double V = space.volume_primitive(r_lo) * S, R = space.ricci_primitive(r_lo) * S;
    std::vector<double> A(samples), Vc(samples), B1(samples), W2(samples);
    std::vector<double> dA(samples), dV(samples), dB1(samples), dW2(samples);
    for (int k = 0; k < samples; ++k) {
        const double r = t.r_[k];
        if (k > 0) {
            const double a = t.r_[k - 1];
            V += S * boost::math::quadrature::gauss<double, 20>::integrate(
                         [&](double x) { return std::pow(space.eval(x).lambda, n); }, a, r);
            R += S * boost::math::quadrature::gauss<double, 20>::integrate(
                         [&](double x) { return space.ricci_rr(x) * std::pow(space.eval(x).lambda, n); }, a, r);
        }
        const auto l = space.eval(r);
        const double ln1 = std::pow(l.lambda, n - 1);
        A[k] = S * l.lambda * ln1;
        dA[k] = S * n * ln1 * l.dlambda;
        const double h1 = S * l.dlambda * ln1;
        const double dh1 = S * (l.d2lambda * ln1 + (n - 1) * l.dlambda * l.dlambda * std::pow(l.lambda, n - 2));
        Vc[k] = V;
        dV[k] = S * l.lambda * ln1;
        B1[k] = h1 + R / n;
        dB1[k] = dh1 + S * space.ricci_rr(r) * l.lambda * ln1 / n;
        W2[k] = h1 - V;
        dW2[k] = dh1 - dV[k];
    }
    switch (curve) {
    case SliceCurve::B1_vs_area:
        t.x_ = A, t.dx_ = dA, t.y_ = B1, t.dy_ = dB1;
        break;
    case SliceCurve::B1_vs_volume:
        t.x_ = Vc, t.dx_ = dV, t.y_ = B1, t.dy_ = dB1;
        break;
    case SliceCurve::W2_vs_area:
        t.x_ = A, t.dx_ = dA, t.y_ = W2, t.dy_ = dW2;
        break;
    }
    for (int k = 0; k < samples; ++k) {
        if (!std::isfinite(t.x_[k]) || !std::isfinite(t.y_[k]) || !std::isfinite(t.dx_[k]) || !std::isfinite(t.dy_[k]))
            throw NumericError("non-finite slice table entry");
        if (!(t.dx_[k] > 0.0) || !(t.dy_[k] > 0.0) || (k > 0 && !(t.x_[k] > t.x_[k - 1] && t.y_[k] > t.y_[k - 1])))
            throw NumericError(std::string("slice curve ") + to_string(curve) + " is not strictly monotone at r = " +
                               std::to_string(t.r_[k]));
    }
    return t;
}

namespace {

// Cubic Hermite on one cell, value and derivative.
std::pair<double, double> hermite_cell(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
    const double h = x1 - x0, t = (x - x0) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double v = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
                     (t3 - t2) * h * d1;
    const double dv = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * h * d0 + (-6 * t2 + 6 * t) * y1 +
                       (3 * t2 - 2 * t) * h * d1) /
                      h;
    return {v, dv};
}

} // namespace

double SliceTable::invert(const std::vector<double>& col, const std::vector<double>& dcol, double value) const {
    if (!(value >= col.front() && value <= col.back()))
        throw ExtrapolationError(std::string("query ") + std::to_string(value) + " outside slice table " +
                                 to_string(curve_) + " [" + std::to_string(col.front()) + ", " +
                                 std::to_string(col.back()) + "]");
    std::size_t j = std::upper_bound(col.begin(), col.end(), value) - col.begin();
    j = std::min(std::max<std::size_t>(j, 1), col.size() - 1) - 1;
    if (value == col[j]) return r_[j];
    if (value == col[j + 1]) return r_[j + 1];
    auto f = [&](double r) {
        return hermite_cell(r_[j], r_[j + 1], col[j], col[j + 1], dcol[j], dcol[j + 1], r).first - value;
    };
    // Newton from the linear guess, safeguarded by the cell bracket.
    double lo = r_[j], hi = r_[j + 1];
    double r = lo + (value - col[j]) / (col[j + 1] - col[j]) * (hi - lo);
    for (int it = 0; it < 50; ++it) {
        const auto [v, dv] = hermite_cell(r_[j], r_[j + 1], col[j], col[j + 1], dcol[j], dcol[j + 1], r);
        const double g = v - value;
        if (g == 0.0) return r;
        if (g > 0) hi = r; else lo = r;
        double next = dv > 0 ? r - g / dv : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - r) <= 1e-16 * std::max(1.0, std::abs(r))) return next;
        r = next;
    }
    std::uintmax_t iters = 100;
    auto root = boost::math::tools::toms748_solve(f, r_[j], r_[j + 1], boost::math::tools::eps_tolerance<double>(52), iters);
    return 0.5 * (root.first + root.second);
}

double SliceTable::radius_of_x(double x) const { return invert(x_, dx_, x); }
double SliceTable::radius_of_y(double y) const { return invert(y_, dy_, y); }

namespace {

std::size_t cell_of(const std::vector<double>& r, double x) {
    std::size_t j = std::upper_bound(r.begin(), r.end(), x) - r.begin();
    return std::min(std::max<std::size_t>(j, 1), r.size() - 1) - 1;
}

} // namespace

double SliceTable::phi(double x) const {
    const double r = radius_of_x(x);
    const std::size_t j = cell_of(r_, r);
    return hermite_cell(r_[j], r_[j + 1], y_[j], y_[j + 1], dy_[j], dy_[j + 1], r).first;
}

double SliceTable::phi_inverse(double y) const {
    const double r = radius_of_y(y);
    const std::size_t j = cell_of(r_, r);
    return hermite_cell(r_[j], r_[j + 1], x_[j], x_[j + 1], dx_[j], dx_[j + 1], r).first;
}

double SliceTable::dphi(double x) const {
    const double r = radius_of_x(x);
    const std::size_t j = cell_of(r_, r);
    const double dy = hermite_cell(r_[j], r_[j + 1], y_[j], y_[j + 1], dy_[j], dy_[j + 1], r).second;
    const double dx = hermite_cell(r_[j], r_[j + 1], x_[j], x_[j + 1], dx_[j], dx_[j + 1], r).second;
    return dy / dx;
}

double phi_prime_identity_residual(const SliceTable& table, const WarpedSpace& space, bool extra_volume_term) {
    if (table.curve() != SliceCurve::W2_vs_area) throw ConfigError("identity applies to W2_vs_area tables");
    const int n = space.n();
    const auto& r = table.r();
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < r.size(); ++k) {
        const double rm = 0.5 * (r[k] + r[k + 1]);
        const auto sv = slice_values(space, rm);
        const double lhs = table.dphi(sv.A) * sv.A;
        double rhs = (n - 1.0) / n * (sv.W2 + sv.V);
        if (extra_volume_term) rhs += sv.V;
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)));
    }
    return worst;
}

const char* to_string(Theorem theorem) {
    switch (theorem) {
    case Theorem::T1: return "T1";
    case Theorem::T2: return "T2";
    case Theorem::T3: return "T3";
    case Theorem::T45: return "T45";
    }
    return "?";
}

Theorem theorem_from_string(const std::string& name) {
    if (name == "T1") return Theorem::T1;
    if (name == "T2") return Theorem::T2;
    if (name == "T3") return Theorem::T3;
    if (name == "T45" || name == "T4" || name == "T5") return Theorem::T45;
    throw ConfigError("unknown theorem '" + name + "'");
}

double DeficitReport::component(const std::string& name) const {
    for (const auto& [k, v] : components)
        if (k == name) return v;
    throw ConfigError("deficit report has no component '" + name + "'");
}

DeficitEvaluator::DeficitEvaluator(const WarpedSpace& space, Theorem theorem, DeficitOptions opt)
    : space_(space), theorem_(theorem), opt_(opt) {
    if (opt.check_hypotheses) {
        const auto rep = check_assumptions(space);
        for (const auto& c : rep.conditions)
            if (c.applicable && !c.pass)
                throw HypothesisError(std::string("space ") + space.name() + " fails " + c.name + " required by " +
                                          to_string(theorem),
                                      c.margin);
    }
    if (theorem == Theorem::T45) {
        require_static(space);
    } else {
        const SliceCurve curve = theorem == Theorem::T1   ? SliceCurve::B1_vs_area
                                 : theorem == Theorem::T2 ? SliceCurve::B1_vs_volume
                                                          : SliceCurve::W2_vs_area;
        table_ = std::make_shared<const SliceTable>(
            opt.table_range ? SliceTable::build(space, curve, opt.table_range->first, opt.table_range->second,
                                                opt.table_samples)
                            : SliceTable::build(space, curve, opt.table_samples));
    }
}

void DeficitEvaluator::check_surface(const GraphSurface& surface, const GeometryFields& g) const {
    if (theorem_ == Theorem::T45) {
        const double hmin = *std::min_element(g.H.begin(), g.H.end());
        if (!(hmin > 0.0)) throw HypothesisError("surface is not mean convex", hmin);
    } else {
        const double m = convexity_margin(g);
        if (!(m > 0.0)) throw HypothesisError("surface is not strictly convex", m);
    }
    (void)surface;
}

DeficitReport DeficitEvaluator::evaluate(const GraphSurface& surface) const {
    return evaluate(surface, geometry_intrinsic(surface));
}

DeficitReport DeficitEvaluator::evaluate(const GraphSurface& surface, const GeometryFields& g) const {
    if (opt_.check_hypotheses) check_surface(surface, g);
    const int n = surface.n();
    DeficitReport rep;
    rep.theorem = theorem_;
    rep.aring_lp = traceless_norm(surface, g, n + 1.0);
    const double A = area(surface, g);
    switch (theorem_) {
    case Theorem::T1:
    case Theorem::T2: {
        const double h1 = integral_H1(surface, g);
        const double ric = enclosed_ricci(surface) / n;
        const double B = h1 + ric;
        const double inv = table_->phi_inverse(B);
        rep.components = {{"int_H1", h1}, {"ricci_term", ric}, {"B1", B}, {"phi_inverse", inv}, {"area", A}};
        if (theorem_ == Theorem::T1) {
            rep.epsilon = inv - A;
        } else {
            const double V = enclosed_volume(surface);
            rep.components.emplace_back("volume", V);
            rep.epsilon = inv - V;
        }
        break;
    }
    case Theorem::T3: {
        const double h1 = integral_H1(surface, g);
        const double V = enclosed_volume(surface);
        const double ph = table_->phi(A);
        rep.components = {{"int_H1", h1}, {"volume", V}, {"area", A}, {"phi", ph}};
        rep.epsilon = h1 - V - ph;
        break;
    }
    case Theorem::T45: {
        const auto& sm = require_static(space_);
        const double N = n + 1.0;
        const double S = unit_sphere_area(n);
        const double k2 = sm.kappa * sm.kappa;
        std::vector<double> fH(g.size());
        for (std::size_t i = 0; i < fH.size(); ++i) fH[i] = g.dlambda[i] * g.H[i];
        const double ifH = integrate_surface(surface, g, fH);
        const double wv = weighted_volume(surface);
        const double sbar = std::pow(A / S, 1.0 / n);
        const double fs = sm.f(sbar);
        const double t_vol = N * (N - 1.0) * k2 * wv;
        const double t_areal = (N - 1.0) * fs * fs * std::pow(sbar, N - 2.0) * S;
        const double t_sbar = (N - 1.0) * k2 * std::pow(sbar, N) * S;
        const double t_s0 = (N - 1.0) * k2 * std::pow(sm.s0, N) * S;
        rep.components = {{"int_fH", ifH},        {"weighted_volume", wv}, {"volume_term", t_vol},
                          {"areal_term", t_areal}, {"sbar_term", t_sbar},   {"horizon_term", t_s0},
                          {"areal_radius", sbar}};
        rep.epsilon = ifH - t_vol - t_areal + t_sbar - t_s0;
        break;
    }
    }
    if (!std::isfinite(rep.epsilon)) throw NumericError("non-finite deficit");
    return rep;
}

DeficitReport deficit(const GraphSurface& surface, Theorem theorem, DeficitOptions opt) {
    return DeficitEvaluator(surface.space(), theorem, opt).evaluate(surface);
}

double heintze_karcher_gap(const GraphSurface& surface, const GeometryFields& g) {
    std::vector<double> a(g.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(g.H1[i] > 0.0)) throw HypothesisError("Heintze-Karcher gap needs H1 > 0", g.H1[i]);
        a[i] = g.dlambda[i] / g.H1[i] - g.u[i];
    }
    return integrate_surface(surface, g, a);
}

double heintze_karcher_gap(const GraphSurface& surface) { return heintze_karcher_gap(surface, geometry_intrinsic(surface)); }

double brendle_exponent(const WarpedSpace& space) {
    const double N = space.n() + 1.0;
    return (N - 2.0) / (N - 1.0);
}

BrendleQuantities brendle_W_Q(const GraphSurface& surface, const GeometryFields& g, double sigma0_area) {
    DeficitOptions opt;
    opt.check_hypotheses = false;
    const auto& w = surface.space();
    const double hmin = *std::min_element(g.H.begin(), g.H.end());
    if (!(hmin > 0.0)) throw HypothesisError("surface is not mean convex", hmin);
    const auto rep = DeficitEvaluator(w, Theorem::T45, opt).evaluate(surface, g);
    const auto& sm = *w.static_model();
    const double p = brendle_exponent(w);
    const double N = w.n() + 1.0, S = unit_sphere_area(w.n());
    const double A = area(surface, g);
    BrendleQuantities q;
    q.areal_radius = rep.component("areal_radius");
    const double fs = sm.f(q.areal_radius);
    q.W = rep.component("int_fH") - rep.component("volume_term") -
          (N - 1.0) * fs * fs * std::pow(A, p) * std::pow(S, 1.0 / (N - 1.0)) + rep.component("sbar_term") -
          rep.component("horizon_term");
    q.Q_initial = std::pow(sigma0_area, -p) * q.W;
    q.Q_current = std::pow(A, -p) * q.W;
    return q;
}

BrendleQuantities brendle_W_Q(const GraphSurface& surface, double sigma0_area) {
    return brendle_W_Q(surface, geometry_intrinsic(surface), sigma0_area);
}

} // namespace warpstab
