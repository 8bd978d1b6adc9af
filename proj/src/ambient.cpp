#include "warpstab/ambient.hpp"

#include "warpstab/errors.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace warpstab {

namespace bq = boost::math::quadrature;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
double gk(F&& f, double lo, double hi) {
    if (lo == hi) return 0.0;
    return bq::gauss_kronrod<double, 31>::integrate(f, lo, hi, 15, 1e-14);
}

// Composite 20-point Gauss rule on panels no longer than 0.25 and no longer than half the distance
// to a possible endpoint singularity `sing` of the warp (lambda -> 0). Deterministic, and exact to
// round-off for the analytic integrands used here.
template <class F>
double panel_quad(F&& f, double lo, double hi, double sing) {
    if (lo == hi) return 0.0;
    const double sgn = lo < hi ? 1.0 : -1.0;
    if (lo > hi) std::swap(lo, hi);
    double sum = 0.0, x = lo;
    while (x < hi) {
        double len = 0.25;
        if (std::isfinite(sing)) len = std::min(len, std::max(0.5 * (x - sing), 1e-3 * (hi - lo)));
        const double nx = std::min(hi, x + len);
        sum += bq::gauss<double, 20>::integrate(f, x, nx);
        x = nx;
    }
    return sgn * sum;
}

template <class F>
double gl16(F&& f, double lo, double hi) {
    if (lo == hi) return 0.0;
    return bq::gauss<double, 16>::integrate(f, lo, hi);
}

} // namespace

const char* to_string(ModelKind kind) {
    switch (kind) {
    case ModelKind::Flat: return "flat";
    case ModelKind::Hyperbolic: return "hyperbolic";
    case ModelKind::AlphaBeta: return "alphabeta";
    case ModelKind::AdSSchwarzschild: return "ads_schwarzschild";
    case ModelKind::RNAdS: return "rn_ads";
    case ModelKind::Custom: return "custom";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------------------------
// Static models

StaticModel StaticModel::rn_ads(double m, double q, double kappa, int dim) {
    if (dim < 3) throw ConfigError("static models need dim >= 3");
    if (!(m > 0.0)) throw ConfigError("mass parameter must be positive");
    if (q < 0.0) throw ConfigError("charge must be nonnegative");
    if (q >= m) throw ConfigError("charge must satisfy q < m");
    if (!(kappa > 0.0)) throw ConfigError("kappa must be positive");
    StaticModel sm;
    sm.m = m;
    sm.q = q;
    sm.kappa = kappa;
    sm.dim = dim;

    // Outer horizon: scan down from large s until f^2 <= 0, then bracket.
    double hi = 1e4;
    if (sm.f2(hi) <= 0.0) throw ConfigError("static model has no exterior region");
    double lo = hi;
    while (sm.f2(lo) > 0.0) {
        hi = lo;
        lo /= 1.05;
        if (lo < 1e-8) throw ConfigError("static model has no horizon");
    }
    std::uintmax_t iters = 200;
    auto tol = boost::math::tools::eps_tolerance<double>(52);
    auto root = boost::math::tools::toms748_solve([&](double s) { return sm.f2(s); }, lo, hi, tol, iters);
    sm.s0 = 0.5 * (root.first + root.second);
    if (sm.df(sm.s0 * (1.0 + 1e-6)) <= 0.0) throw ConfigError("horizon is not a simple root of f^2");
    return sm;
}

StaticModel StaticModel::ads_schwarzschild(double m, int dim) {
    StaticModel sm = rn_ads(0.5 * m, 0.0, 1.0, dim);
    sm.schwarzschild = true;
    return sm;
}

double StaticModel::f2(double s) const {
    const double n = dim;
    return 1.0 + kappa * kappa * s * s - 2.0 * m * std::pow(s, 2.0 - n) + q * q * std::pow(s, 4.0 - 2.0 * n);
}

double StaticModel::f(double s) const {
    if (!(s > s0)) throw HorizonError("s at or below the horizon");
    return std::sqrt(std::max(f2(s), 0.0));
}

double StaticModel::df(double s) const {
    const double n = dim;
    const double dF = 2.0 * kappa * kappa * s - 2.0 * m * (2.0 - n) * std::pow(s, 1.0 - n) +
                      q * q * (4.0 - 2.0 * n) * std::pow(s, 3.0 - 2.0 * n);
    return dF / (2.0 * f(s));
}

double StaticModel::d2f(double s) const {
    const double n = dim;
    const double d2F = 2.0 * kappa * kappa - 2.0 * m * (2.0 - n) * (1.0 - n) * std::pow(s, -n) +
                       q * q * (4.0 - 2.0 * n) * (3.0 - 2.0 * n) * std::pow(s, 2.0 - 2.0 * n);
    const double fv = f(s), dfv = df(s);
    return d2F / (2.0 * fv) - dfv * dfv / fv;
}

double static_laplacian_f(const StaticModel& sm, double s) {
    const int k = sm.fiber_dim();
    const double f = sm.f(s), df = sm.df(s), d2f = sm.d2f(s);
    return f * (f * d2f + df * df) + k * f * f * df / s;
}

double static_scalar_curvature(const StaticModel& sm, double s) {
    const int k = sm.fiber_dim();
    const double f = sm.f(s), df = sm.df(s);
    return -2.0 * k * f * df / s + k * (k - 1.0) * (1.0 - f * f) / (s * s);
}

double check_static_identity(const StaticModel& sm, double s_lo, double s_hi, int samples) {
    if (samples < 2) throw ConfigError("need at least two samples");
    const int k = sm.fiber_dim();
    double sup = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double s = s_lo + (s_hi - s_lo) * i / (samples - 1.0);
        const double lap = static_laplacian_f(sm, s);
        double res;
        if (sm.schwarzschild) {
            res = lap - sm.dim * sm.f(s);
        } else {
            res = lap + sm.f(s) * static_scalar_curvature(sm, s) / k -
                  k * (k - 1.0) * sm.q * sm.q * sm.f(s) * std::pow(s, -2.0 * k);
        }
        sup = std::max(sup, std::abs(res));
    }
    return sup;
}

// ---------------------------------------------------------------------------------------------
// Coordinates of a static model in warped form. Cumulative integrals in s are tabulated on nodes
// graded geometrically in s - s0; values between nodes use a 16-point Gauss rule on the cell.

class StaticCoordinates {
public:
    StaticCoordinates(const StaticModel& sm, double s_ref, double s_hi, int nodes = 400)
        : sm_(sm), s_ref_(s_ref) {
        const double d0 = s_ref - sm.s0, d1 = s_hi - sm.s0;
        s_.resize(nodes + 1);
        for (int j = 0; j <= nodes; ++j) s_[j] = sm.s0 + d0 * std::pow(d1 / d0, double(j) / nodes);
        s_.front() = s_ref;
        for (int c = 0; c < kColumns; ++c) {
            auto& col = cum_[c];
            col.resize(s_.size());
            col[0] = 0.0;
            for (std::size_t j = 1; j < s_.size(); ++j)
                col[j] = col[j - 1] + gl16([&](double s) { return integrand(c, s); }, s_[j - 1], s_[j]);
        }
        // Values at s_ref measured from the horizon (integrable singularities at s0).
        base_[kR] = 0.0;
        base_[kLogRho] = 0.0;
        base_[kVolume] = horizon_integral(kVolume, sm.s0, s_ref);
        base_[kRicci] = horizon_integral(kRicci, sm.s0, s_ref);
        r_horizon_ = -horizon_integral(kR, sm.s0, s_ref);
    }

    enum Column { kR = 0, kVolume = 1, kRicci = 2, kLogRho = 3, kColumns = 4 };

    double s_hi() const { return s_.back(); }
    double r_max() const { return cum_[kR].back(); }
    double r_horizon() const { return r_horizon_; }
    const StaticModel& model() const { return sm_; }

    double column(int c, double s) const {
        if (!(s > sm_.s0)) throw HorizonError("s at or below the horizon");
        if (s > s_.back() * (1.0 + 1e-14)) throw DomainError("s beyond the tabulated static domain");
        if (s >= s_ref_) {
            std::size_t j = std::upper_bound(s_.begin(), s_.end(), s) - s_.begin();
            j = std::min(std::max<std::size_t>(j, 1), s_.size() - 1) - 1;
            return base_[c] + cum_[c][j] + gl16([&](double t) { return integrand(c, t); }, s_[j], s);
        }
        return base_[c] - horizon_integral(c, s, s_ref_);
    }

    double r_of_s(double s) const { return column(kR, s); }

    double s_of_r(double r) const {
        if (!(r > r_horizon_)) throw HorizonError("r at or below the horizon");
        if (r > r_max() * (1.0 + 1e-14) + 1e-14) throw DomainError("r beyond the static domain");
        const auto& rc = cum_[kR];
        if (r >= 0.0) {
            std::size_t j = std::upper_bound(rc.begin(), rc.end(), r) - rc.begin();
            j = std::min(std::max<std::size_t>(j, 1), rc.size() - 1) - 1;
            double lo = s_[j], hi = s_[j + 1];
            double s = lo + (r - rc[j]) / (rc[j + 1] - rc[j]) * (hi - lo);
            for (int it = 0; it < 60; ++it) {
                const double g = rc[j] + gl16([&](double t) { return 1.0 / sm_.f(t); }, s_[j], s) - r;
                if (std::abs(g) <= 1e-16 * (std::abs(r) + 1e-2)) break;
                if (g > 0) hi = s; else lo = s;
                double next = s - g * sm_.f(s);
                if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
                const double step = std::abs(next - s);
                s = next;
                if (step <= 4e-16 * s || hi - lo <= 4e-16 * s) break;
            }
            return s;
        }
        std::uintmax_t iters = 200;
        auto tol = boost::math::tools::eps_tolerance<double>(50);
        auto root = boost::math::tools::toms748_solve([&](double s) { return r_of_s(s) - r; },
                                                      sm_.s0 * (1.0 + 1e-13), s_ref_, tol, iters);
        return 0.5 * (root.first + root.second);
    }

private:
    double integrand(int c, double s) const {
        const int k = sm_.fiber_dim();
        const double f = std::sqrt(std::max(sm_.f2(s), 1e-300));
        switch (c) {
        case kR: return 1.0 / f;
        case kVolume: return std::pow(s, k) / f;
        case kRicci: {
            const double n = sm_.dim;
            const double dF = 2.0 * sm_.kappa * sm_.kappa * s - 2.0 * sm_.m * (2.0 - n) * std::pow(s, 1.0 - n) +
                              sm_.q * sm_.q * (4.0 - 2.0 * n) * std::pow(s, 3.0 - 2.0 * n);
            return -k * dF / (2.0 * f) * std::pow(s, k - 1);
        }
        default: return 1.0 / (s * f);
        }
    }

    // 2 u g(s0 + u^2). Close to the horizon s0 + u^2 loses the digits of u^2, so f^2 is replaced
    // by its linearization F'(s0) u^2 and the factor u cancels analytically.
    double horizon_integrand(int c, double u) const {
        const double d = u * u;
        if (d > 1e-9 * sm_.s0) return 2.0 * u * integrand(c, sm_.s0 + d);
        const double s = sm_.s0, n = sm_.dim;
        const int k = sm_.fiber_dim();
        const double dF = 2.0 * sm_.kappa * sm_.kappa * s - 2.0 * sm_.m * (2.0 - n) * std::pow(s, 1.0 - n) +
                          sm_.q * sm_.q * (4.0 - 2.0 * n) * std::pow(s, 3.0 - 2.0 * n);
        const double g = 2.0 / std::sqrt(dF);  // 2 u / f
        switch (c) {
        case kR: return g;
        case kVolume: return std::pow(s, k) * g;
        case kRicci: return -k * dF * std::pow(s, k - 1) / std::sqrt(dF);  // 2u * (-k dF/(2f) s^(k-1))
        default: return g / s;
        }
    }

    // Integral on [lo, hi] with lo possibly at the horizon, where integrands blow up like
    // (s - s0)^(-1/2). The substitution s = s0 + u^2 removes the singularity.
    double horizon_integral(int c, double lo, double hi) const {
        if (lo >= hi) return 0.0;
        const double u0 = std::sqrt(std::max(lo - sm_.s0, 0.0)), u1 = std::sqrt(hi - sm_.s0);
        return gk([&](double u) { return horizon_integrand(c, u); }, u0, u1);
    }

    StaticModel sm_;
    double s_ref_;
    std::vector<double> s_;
    std::vector<double> cum_[kColumns];
    double base_[kColumns] = {0, 0, 0, 0};
    double r_horizon_ = 0.0;
};

// ---------------------------------------------------------------------------------------------
// WarpedSpace

WarpedSpace WarpedSpace::flat(int n, SpaceOptions opt) {
    if (n < 2) throw ConfigError("fiber dimension must be >= 2");
    WarpedSpace w;
    w.kind_ = ModelKind::Flat;
    w.name_ = "flat";
    w.n_ = n;
    w.a_ = 0.0;
    w.b_ = kInf;
    w.work_lo_ = 0.0;
    w.work_hi_ = 2.0;
    w.finalize(opt);
    return w;
}

WarpedSpace WarpedSpace::hyperbolic(int n, SpaceOptions opt) {
    if (n < 2) throw ConfigError("fiber dimension must be >= 2");
    WarpedSpace w;
    w.kind_ = ModelKind::Hyperbolic;
    w.name_ = "hyperbolic";
    w.n_ = n;
    w.a_ = 0.0;
    w.b_ = kInf;
    w.work_lo_ = 0.0;
    w.work_hi_ = 3.0;
    w.finalize(opt);
    return w;
}

WarpedSpace WarpedSpace::alpha_beta(double alpha, double beta, int n, SpaceOptions opt) {
    if (n < 2) throw ConfigError("fiber dimension must be >= 2");
    if (!(alpha >= beta && beta >= 0.0) || !(alpha > beta || beta > 0.0))
        throw ConfigError("alpha-beta warp needs alpha >= beta >= 0 with one inequality strict");
    WarpedSpace w;
    w.kind_ = ModelKind::AlphaBeta;
    std::ostringstream os;
    os << "alphabeta(" << alpha << "," << beta << ")";
    w.name_ = os.str();
    w.n_ = n;
    w.alpha_ = alpha;
    w.beta_ = beta;
    w.b_ = kInf;
    if (alpha > beta) {
        w.a_ = std::atanh(-beta / alpha);
        w.work_lo_ = w.a_;
        w.work_hi_ = w.a_ + 3.0;
    } else {
        w.a_ = -kInf;
        w.work_lo_ = -1.5;
        w.work_hi_ = 1.5;
    }
    w.finalize(opt);
    return w;
}

WarpedSpace WarpedSpace::from_static(const StaticModel& model, SpaceOptions opt) {
    if (!(opt.horizon_margin > 0.0)) throw ConfigError("horizon margin must be positive");
    if (!(opt.s_work_factor > 1.0 + opt.horizon_margin) || !(opt.s_max_factor >= opt.s_work_factor))
        throw ConfigError("inconsistent static domain factors");
    WarpedSpace w;
    w.kind_ = model.schwarzschild ? ModelKind::AdSSchwarzschild : ModelKind::RNAdS;
    std::ostringstream os;
    if (model.schwarzschild)
        os << "ads_schwarzschild(m=" << 2.0 * model.m << ",dim=" << model.dim << ")";
    else
        os << "rn_ads(m=" << model.m << ",q=" << model.q << ",kappa=" << model.kappa << ",dim=" << model.dim << ")";
    w.name_ = os.str();
    w.n_ = model.fiber_dim();
    w.static_ = model;
    const double s_ref = model.s0 * (1.0 + opt.horizon_margin);
    auto coords = std::make_shared<StaticCoordinates>(model, s_ref, model.s0 * opt.s_max_factor);
    w.a_ = coords->r_horizon();
    w.b_ = coords->r_max();
    w.work_lo_ = 0.0;
    w.work_hi_ = coords->r_of_s(model.s0 * opt.s_work_factor);
    w.coords_ = coords;
    w.finalize(opt);
    w.surface_lo_ = 0.0;
    return w;
}

WarpedSpace WarpedSpace::polynomial(std::vector<double> coeffs, int n, double a, double b, SpaceOptions opt) {
    if (coeffs.empty()) throw ConfigError("polynomial warp needs coefficients");
    WarpedSpace w = custom("polynomial", n, a, b, nullptr, opt);
    w.coeffs_ = std::move(coeffs);
    w.fn_ = [c = w.coeffs_](double r) {
        LambdaValues v;
        for (std::size_t i = c.size(); i-- > 0;) {
            v.d2lambda = v.d2lambda * r + 2.0 * v.dlambda;
            v.dlambda = v.dlambda * r + v.lambda;
            v.lambda = v.lambda * r + c[i];
        }
        return v;
    };
    w.finalize(opt);
    return w;
}

WarpedSpace WarpedSpace::custom(std::string name, int n, double a, double b,
                                std::function<LambdaValues(double)> fn, SpaceOptions opt) {
    if (n < 2) throw ConfigError("fiber dimension must be >= 2");
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw ConfigError("custom warp needs a finite interval a < b");
    WarpedSpace w;
    w.kind_ = ModelKind::Custom;
    w.name_ = std::move(name);
    w.n_ = n;
    w.a_ = a;
    w.b_ = b;
    w.work_lo_ = a;
    w.work_hi_ = b;
    w.fn_ = std::move(fn);
    if (w.fn_) w.finalize(opt);
    return w;
}

void WarpedSpace::finalize(const SpaceOptions& opt) {
    surface_lo_ = a_;
    if (opt.r_ref) {
        if (!contains(*opt.r_ref)) throw ConfigError("flattening reference outside the domain");
        r_ref_ = *opt.r_ref;
    } else {
        r_ref_ = 0.5 * (work_lo_ + work_hi_);
    }
    if (kind_ == ModelKind::AdSSchwarzschild || kind_ == ModelKind::RNAdS) {
        log_rho_ref_ = coords_->column(StaticCoordinates::kLogRho, coords_->s_of_r(r_ref_));
        return;
    }

    auto vol = [&](double r) { return std::pow(eval(r).lambda, n_); };
    auto ric = [&](double r) {
        const auto l = eval(r);
        return -n_ * l.d2lambda * std::pow(l.lambda, n_ - 1);
    };
    if (std::isfinite(a_)) {
        // Gauss-Kronrod nodes are interior, so the endpoint a itself is never evaluated.
        volume_base_ = gk(vol, a_, r_ref_);
        ricci_base_ = gk(ric, a_, r_ref_);
    } else {
        bq::exp_sinh<double> es;
        auto tail = [&](auto&& fn) {
            return [&, fn](double t) {
                const double r = r_ref_ - t;
                return std::isfinite(r) && r > -700.0 ? fn(r) : 0.0;
            };
        };
        volume_base_ = es.integrate(tail(vol), 0.0, kInf, 1e-14);
        ricci_base_ = es.integrate(tail(ric), 0.0, kInf, 1e-14);
    }
}

std::string WarpedSpace::describe() const {
    std::ostringstream os;
    os << name_ << " n=" << n_ << " domain=(" << a_ << "," << b_ << ") r_ref=" << r_ref_;
    return os.str();
}

LambdaValues WarpedSpace::eval(double r) const {
    if (!(r > a_ && r <= b_) || !std::isfinite(r)) {
        std::ostringstream os;
        os << "r = " << r << " outside the domain (" << a_ << ", " << b_ << ") of " << name_;
        if (static_ && r <= a_) throw HorizonError(os.str());
        throw DomainError(os.str());
    }
    switch (kind_) {
    case ModelKind::Flat: return {r, 1.0, 0.0};
    case ModelKind::Hyperbolic: return {std::sinh(r), std::cosh(r), std::sinh(r)};
    case ModelKind::AlphaBeta: {
        // Exponential form stays finite for alpha = beta and very negative r.
        const double ep = 0.5 * (alpha_ + beta_) * std::exp(r);
        const double em = alpha_ == beta_ ? 0.0 : 0.5 * (alpha_ - beta_) * std::exp(-r);
        const double l = ep - em;
        return {l, ep + em, l};
    }
    case ModelKind::AdSSchwarzschild:
    case ModelKind::RNAdS: {
        const double s = coords_->s_of_r(r);
        const double f = static_->f(s);
        return {s, f, f * static_->df(s)};
    }
    case ModelKind::Custom: return fn_(r);
    }
    throw ConfigError("unknown model");
}

double WarpedSpace::ricci_rr(double r) const {
    const auto l = eval(r);
    if (!(l.lambda > 0.0)) throw SingularError("lambda vanishes; Ricci curvature undefined");
    return -n_ * (l.d2lambda / l.lambda);
}

double WarpedSpace::ricci_tangential(double r) const {
    const auto l = eval(r);
    if (!(l.lambda > 0.0)) throw SingularError("lambda vanishes; Ricci curvature undefined");
    return (n_ - 1.0) * (1.0 - l.dlambda * l.dlambda) / (l.lambda * l.lambda) - l.d2lambda / l.lambda;
}

double WarpedSpace::flatten_log_rho(double r) const {
    if (kind_ == ModelKind::Flat) return std::log(r / r_ref_);
    if (static_) {
        return coords_->column(StaticCoordinates::kLogRho, coords_->s_of_r(r)) - log_rho_ref_;
    }
    return panel_quad([&](double t) { return 1.0 / eval(t).lambda; }, r_ref_, r, a_);
}

FlattenValues WarpedSpace::flatten(double r) const {
    if (!contains(r) && !(r == b_)) throw SingularError("flattening requested outside the open domain");
    const auto l = eval(r);
    if (!(l.lambda > 0.0)) throw SingularError("flattening singular where lambda vanishes");
    FlattenValues fv;
    const double lr = flatten_log_rho(r);
    fv.rho = std::exp(lr);
    fv.omega = std::log(l.lambda) - lr;
    fv.drho = fv.rho / l.lambda;
    fv.d2rho = fv.rho * (1.0 - l.dlambda) / (l.lambda * l.lambda);
    fv.domega = (l.dlambda - 1.0) / l.lambda;
    if (!std::isfinite(fv.rho) || !std::isfinite(fv.omega)) throw SingularError("flattening overflow");
    return fv;
}

double WarpedSpace::volume_primitive(double r) const {
    if (static_) return coords_->column(StaticCoordinates::kVolume, s_of_r(r));
    eval(r);
    return volume_base_ + panel_quad([&](double t) { return std::pow(eval(t).lambda, n_); }, r_ref_, r, a_);
}

double WarpedSpace::ricci_primitive(double r) const {
    if (static_) return coords_->column(StaticCoordinates::kRicci, s_of_r(r));
    eval(r);
    return ricci_base_ + panel_quad(
                             [&](double t) {
                                 const auto l = eval(t);
                                 return -n_ * l.d2lambda * std::pow(l.lambda, n_ - 1);
                             },
                             r_ref_, r, a_);
}

double WarpedSpace::s_of_r(double r) const {
    if (!coords_) throw ConfigError("s_of_r needs a static model");
    return coords_->s_of_r(r);
}

double WarpedSpace::r_of_s(double s) const {
    if (!coords_) throw ConfigError("warp_coordinate needs a static model");
    return coords_->r_of_s(s);
}

double WarpedSpace::ricci_lower_constant(int samples) const {
    double c = -kInf;
    for (int i = 0; i < samples; ++i) {
        const double r = work_lo_ + (work_hi_ - work_lo_) * (i + 1.0) / samples;
        const double lo = std::min(ricci_rr(r), ricci_tangential(r));
        c = std::max(c, -lo / n_);
    }
    return c;
}

double warp_coordinate(const WarpedSpace& space, double s) { return space.r_of_s(s); }

double s_of_r(const WarpedSpace& space, double r) { return space.s_of_r(r); }

// ---------------------------------------------------------------------------------------------
// Assumption checks

bool AssumptionReport::all_pass() const {
    return std::all_of(conditions.begin(), conditions.end(), [](const Condition& c) { return !c.applicable || c.pass; });
}

const Condition& AssumptionReport::get(const std::string& name) const {
    for (const auto& c : conditions)
        if (c.name == name) return c;
    throw ConfigError("no condition named " + name);
}

AssumptionReport check_assumptions(const WarpedSpace& space, int samples) {
    return check_assumptions(space, space.static_model() ? 0.0 : space.work_lo(), space.work_hi(), samples);
}

AssumptionReport check_assumptions(const WarpedSpace& w, double r_lo, double r_hi, int samples) {
    if (samples < 100) throw ConfigError("assumption checks need at least 100 samples");
    constexpr double kTol = 1e-10;
    AssumptionReport rep;
    std::vector<double> rs(samples);
    for (int i = 0; i < samples; ++i) rs[i] = r_lo + (r_hi - r_lo) * (i + 1.0) / samples;

    double min_l = kInf, min_dl = kInf, min_d2 = kInf, max_d2 = -kInf, max_dratio = -kInf, sup_ric = -kInf;
    const double h = 1e-5 * std::max(1.0, r_hi - r_lo);
    for (double r : rs) {
        const auto l = w.eval(r);
        min_l = std::min(min_l, l.lambda);
        min_dl = std::min(min_dl, l.dlambda);
        min_d2 = std::min(min_d2, l.d2lambda);
        max_d2 = std::max(max_d2, l.d2lambda);
        sup_ric = std::max(sup_ric, l.dlambda * l.dlambda - l.lambda * l.d2lambda);
        const double rm = std::max(r - h, 0.5 * (r + r_lo)), rp = std::min(r + h, w.b());
        if (w.contains(rm) && rp > rm) {
            const auto lm = w.eval(rm), lp = w.eval(rp);
            const double d = (lp.d2lambda / lp.lambda - lm.d2lambda / lm.lambda) / (rp - rm);
            max_dratio = std::max(max_dratio, d);
        }
    }
    const double scale = std::max(1.0, std::abs(max_d2));
    rep.conditions.push_back({"lambda_positive", true, min_l > 0.0, min_l});
    rep.conditions.push_back({"dlambda_positive", true, min_dl > 0.0, min_dl});
    {
        const double convex = min_d2;
        // Finite differences of lambda''/lambda carry O(h^2) noise; allow for it.
        const double concave = -std::max(max_d2, max_dratio);
        const bool pass = convex > 0.0 || concave >= -1e-7 * scale;
        rep.conditions.push_back({"lambda_convexity", true, pass, std::max(convex, concave)});
    }
    rep.conditions.push_back({"ricci_bound", true, 1.0 - sup_ric >= -kTol, 1.0 - sup_ric});
    if (w.kind() == ModelKind::AlphaBeta) {
        const double m = 1.0 - (w.alpha() * w.alpha() - w.beta() * w.beta());
        rep.conditions.push_back({"alphabeta_bound", true, m >= -kTol, m});
    } else {
        rep.conditions.push_back({"alphabeta_bound", false, true, 0.0});
    }

    if (!w.static_model()) {
        for (const char* nm : {"H1", "H2", "H3", "H4", "H5"}) rep.conditions.push_back({nm, false, true, 0.0});
        return rep;
    }

    const auto& sm = *w.static_model();
    const int n = sm.dim;
    const int k = sm.fiber_dim();
    const double s_lo = sm.s0, s_hi = w.s_of_r(r_hi);
    std::vector<double> ss(samples);
    for (int i = 0; i < samples; ++i) ss[i] = s_lo + (s_hi - s_lo) * (i + 1.0) / samples;

    double min_f = kInf, min_df = kInf, min_h4 = kInf, h4_scale = 0.0;
    for (double s : ss) {
        const double f = sm.f(s), df = sm.df(s), d2f = sm.d2f(s);
        min_f = std::min(min_f, f);
        min_df = std::min(min_df, df);
        const double h4 = f * (df * df + f * d2f) + (n - 3.0) * f * f * df / s + (n - 2.0) * (1.0 - f * f) * f / (s * s);
        min_h4 = std::min(min_h4, h4);
        h4_scale = std::max(h4_scale, std::abs(f * (df * df + f * d2f)));
    }
    const double f_at_horizon = std::sqrt(std::abs(sm.f2(sm.s0)));
    rep.conditions.push_back({"H1", true, min_f > 0.0 && f_at_horizon < 1e-6, min_f});

    // H2: the remainder 1 + kappa^2 s^2 - f^2 - 2 m s^(2-n) is O(s^(4-2n)) at large s.
    double rem = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double s = s_hi * std::pow(100.0, i / 99.0);
        const double c = (1.0 + sm.kappa * sm.kappa * s * s - sm.f2(s) - 2.0 * sm.m * std::pow(s, 2.0 - n)) /
                         std::pow(s, 4.0 - 2.0 * n);
        rem = std::max(rem, std::abs(c));
    }
    const double h2 = 1.0 - rem / (2.0 * (1.0 + sm.q * sm.q));
    rep.conditions.push_back({"H2", true, h2 > 0.0, h2});
    rep.conditions.push_back({"H3", true, min_df > 0.0, min_df});
    rep.conditions.push_back({"H4", true, min_h4 >= -1e-9 * std::max(1.0, h4_scale), min_h4});

    // H5: P(x) = R(x^(1/k)) x on a uniform x grid, checked by first and second differences.
    const double x_lo = std::pow(sm.s0 * (1.0 + 1e-6), k), x_hi = std::pow(s_hi, k);
    std::vector<double> P(samples);
    double p_scale = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double x = x_lo + (x_hi - x_lo) * i / (samples - 1.0);
        const double s = std::pow(x, 1.0 / k);
        const double R = 2.0 * sm.f(s) * sm.df(s) - 2.0 * sm.kappa * sm.kappa * s;
        P[i] = R * x;
        p_scale = std::max(p_scale, std::abs(P[i]));
    }
    double mono = kInf, conc = kInf;
    for (int i = 0; i + 1 < samples; ++i) mono = std::min(mono, (P[i + 1] - P[i]) / std::max(p_scale, 1e-300));
    for (int i = 1; i + 1 < samples; ++i)
        conc = std::min(conc, -(P[i + 1] - 2.0 * P[i] + P[i - 1]) / std::max(p_scale, 1e-300));
    const double h5 = std::min(mono, conc);
    rep.conditions.push_back({"H5", true, h5 >= -1e-9, h5});
    return rep;
}

} // namespace warpstab
