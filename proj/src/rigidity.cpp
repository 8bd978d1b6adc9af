#include "warpstab/rigidity.hpp"

#include "warpstab/errors.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace warpstab {

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd to_vec(const std::vector<double>& v) { return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()); }

// Unit tangent vectors e_theta, e_phi at a node (body frame).
void tangents(const SphereGrid& grid, std::size_t i, Eigen::VectorXd& et, Eigen::VectorXd& ep) {
    const int m = grid.dim() + 1;
    et = Eigen::VectorXd::Zero(m);
    ep = Eigen::VectorXd::Zero(m);
    const double ct = grid.cos_theta(i), st = grid.sin_theta(i);
    if (grid.mode() == GridMode::Full) {
        const double cp = std::cos(grid.phi(i)), sp = std::sin(grid.phi(i));
        et << ct * cp, ct * sp, -st;
        ep << -sp, cp, 0.0;
    } else {
        et[0] = ct;
        et[m - 1] = -st;
    }
}

// Spherical angles of a body-frame vector.
std::pair<double, double> angles(const SphereGrid& grid, const Eigen::VectorXd& p) {
    const int m = grid.dim() + 1;
    const double z = p[m - 1];
    const double perp = p.head(m - 1).norm();
    const double theta = std::atan2(perp, z);
    const double phi = grid.mode() == GridMode::Full ? std::atan2(p[1], p[0]) : 0.0;
    return {theta, phi < 0.0 ? phi + 2.0 * kPi : phi};
}

template <class F>
double minimize_on(F&& f, double lo, double hi, double& fmin) {
    const auto res = boost::math::tools::brent_find_minima(f, lo, hi, std::numeric_limits<double>::digits / 2);
    fmin = res.second;
    return res.first;
}

} // namespace

std::vector<Eigen::VectorXd> EuclideanImage::points() const {
    std::vector<Eigen::VectorXd> out;
    out.reserve(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i)
        out.push_back(scale * (rotation * (rho[i] * to_vec(grid->direction(i)))) + translation);
    return out;
}

double EuclideanImage::sup_abs_omega() const {
    double m = 0.0;
    for (double w : omega) m = std::max(m, std::abs(w));
    return m;
}

GraphSurface EuclideanImage::as_flat_graph() const { return {grid, WarpedSpace::flat(n()), rho}; }

std::vector<double> EuclideanImage::area_density() const {
    const auto flat = as_flat_graph();
    return geometry_intrinsic(flat).dmu;
}

double EuclideanImage::area() const { return std::pow(scale, n()) * grid->integrate(area_density()); }

EuclideanImage EuclideanImage::translated(const Eigen::VectorXd& shift) const {
    if (shift.size() != translation.size()) throw ConfigError("translation has the wrong dimension");
    EuclideanImage out = *this;
    out.translation += shift;
    return out;
}

EuclideanImage EuclideanImage::rotated(const Eigen::MatrixXd& q) const {
    if (q.rows() != rotation.rows() || q.cols() != rotation.cols()) throw ConfigError("rotation has the wrong dimension");
    if (!(q.transpose() * q).isIdentity(1e-12) || q.determinant() < 0.0)
        throw ConfigError("rotation must be orthogonal with determinant 1");
    EuclideanImage out = *this;
    out.rotation = q * rotation;
    out.translation = q * translation;
    return out;
}

EuclideanImage EuclideanImage::scaled(double factor) const {
    if (!(factor > 0.0)) throw ConfigError("scale factor must be positive");
    EuclideanImage out = *this;
    out.scale *= factor;
    out.translation *= factor;
    return out;
}

EuclideanImage EuclideanImage::volume_normalized() const {
    return scaled(std::pow(unit_sphere_area(n()) / area(), 1.0 / n()));
}

EuclideanImage euclidean_radial_graph(std::shared_ptr<const SphereGrid> grid, std::vector<double> rho) {
    if (!grid) throw ConfigError("image needs a grid");
    if (rho.size() != grid->size()) throw ConfigError("radial field does not match the grid");
    for (double x : rho)
        if (!(x > 0.0) || !std::isfinite(x)) throw NumericError("radial function must be positive and finite");
    EuclideanImage img;
    const int m = grid->dim() + 1;
    img.omega.assign(rho.size(), 0.0);
    img.rho = std::move(rho);
    img.grid = std::move(grid);
    img.rotation = Eigen::MatrixXd::Identity(m, m);
    img.translation = Eigen::VectorXd::Zero(m);
    return img;
}

EuclideanImage to_euclidean(const GraphSurface& surface) {
    std::vector<double> rho(surface.r().size()), omega(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const auto fl = surface.space().flatten(surface.r()[i]);
        if (!(fl.rho > 0.0) || !std::isfinite(fl.rho) || !std::isfinite(fl.omega))
            throw SingularError("conformal flattening degenerates on the surface");
        rho[i] = fl.rho;
        omega[i] = fl.omega;
    }
    auto img = euclidean_radial_graph(surface.grid_ptr(), std::move(rho));
    img.omega = std::move(omega);
    return img;
}

double centre_oscillation(const EuclideanImage& image, const Eigen::VectorXd& c) {
    const auto pts = image.points();
    const auto w = image.grid->weights();
    std::vector<double> lg(pts.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = (pts[i] - c).norm();
        if (!(d > 0.0)) return std::numeric_limits<double>::infinity();
        lg[i] = std::log(d);
        mean += w[i] * lg[i];
    }
    mean /= image.grid->total_weight();
    double osc = 0.0;
    for (double x : lg) osc = std::max(osc, std::abs(x - mean));
    return osc;
}

RadialFit fit_radial_graph(const EuclideanImage& image, const FitOptions& opt) {
    const auto& grid = *image.grid;
    const int m = grid.dim() + 1;
    const bool axisym = grid.mode() == GridMode::Axisym;
    const auto pts = image.points();

    // Area centroid.
    const auto dens = image.area_density();
    Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
    double total = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double w = grid.weights()[i] * dens[i];
        c += w * pts[i];
        total += w;
    }
    c /= total;
    std::vector<Eigen::VectorXd> axes;
    if (axisym) {
        const Eigen::VectorXd a = image.rotation.col(m - 1);
        c = image.translation + a * a.dot(c - image.translation);
        axes.push_back(a);
    } else {
        for (int k = 0; k < m; ++k) axes.push_back(image.rotation.col(k));
    }

    double size = 0.0, inner = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
        size = std::max(size, (p - c).norm());
        inner = std::min(inner, (p - c).norm());
    }
    std::vector<double> h(axes.size(), 0.5 * inner);
    double osc = centre_oscillation(image, c);
    if (!std::isfinite(osc)) throw FitError("centroid lies on the surface");

    RadialFit fit;
    for (int it = 0; it < opt.max_iterations; ++it) {
        ++fit.iterations;
        double moved = 0.0;
        for (std::size_t k = 0; k < axes.size(); ++k) {
            // Line search in s = x * h[k], x in [-1, 1], so the tolerance scales with the bracket.
            for (int grow = 0; grow < 8; ++grow) {
                double val = 0.0;
                const double x =
                    minimize_on([&](double t) { return centre_oscillation(image, c + t * h[k] * axes[k]); }, -1.0, 1.0, val);
                double step = 0.0;
                if (val < osc) {
                    step = x * h[k];
                    c += step * axes[k];
                    osc = val;
                }
                moved = std::max(moved, std::abs(step));
                if (std::abs(x) > 0.9 && step != 0.0) {
                    h[k] *= 2.0;
                    continue;
                }
                h[k] = std::max(4.0 * std::abs(step), 0.25 * h[k]);
                break;
            }
        }
        if (moved <= opt.tolerance * size) break;
    }
    fit.centre = c;
    fit.oscillation = osc;

    // Ray intersection along each grid direction, in the body frame.
    const Eigen::MatrixXd rt = image.rotation.transpose();
    const Eigen::VectorXd cb = rt * (c - image.translation) / image.scale;
    double rho_max = 0.0;
    for (double x : image.rho) rho_max = std::max(rho_max, x);
    auto rho_at = [&](const Eigen::VectorXd& p) {
        const auto [th, ph] = angles(grid, p);
        return grid.evaluate(image.rho, th, ph);
    };
    if (!(cb.norm() < rho_at(cb.norm() > 0.0 ? cb : Eigen::VectorXd::Unit(m, m - 1))))
        throw FitError("fitted centre lies outside the surface");

    // Star-shapedness about the centre: <X - c, nu> > 0 at every node.
    const auto flat = image.as_flat_graph();
    const auto g = geometry_intrinsic(flat);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Eigen::VectorXd et, ep;
        tangents(grid, i, et, ep);
        const Eigen::VectorXd y = to_vec(grid.direction(i));
        const Eigen::VectorXd nu = g.nu_r[i] * y + g.nu_theta[i] * et + g.nu_phi[i] * ep;
        if (!((image.rho[i] * y - cb).dot(nu) > 0.0))
            throw FitError("surface is not a radial graph about the fitted centre");
    }

    fit.f.resize(grid.size());
    const double t_hi = cb.norm() + 2.0 * rho_max;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Eigen::VectorXd y = to_vec(grid.direction(i));
        auto gfun = [&](double t) {
            const Eigen::VectorXd p = cb + t * y;
            return p.norm() - rho_at(p);
        };
        boost::uintmax_t iters = 200;
        const auto res = boost::math::tools::toms748_solve(
            gfun, 0.0, t_hi, gfun(0.0), gfun(t_hi), boost::math::tools::eps_tolerance<double>(50), iters);
        const double t = 0.5 * (res.first + res.second);
        if (!(t > 0.0)) throw FitError("ray from the fitted centre misses the surface");
        fit.f[i] = std::log(image.scale * t);
    }
    fit.mean_f = grid.integrate(fit.f) / grid.total_weight();
    return fit;
}

GraphNorms graph_norms(const SphereGrid& grid, const std::vector<double>& f, double p) {
    if (!(p >= 1.0)) throw ConfigError("norm exponent must be >= 1");
    const auto d = grid.derivatives(f);
    const double mean = grid.integrate(f) / grid.total_weight();
    const int mult = grid.second_multiplicity();
    std::vector<double> full(f.size()), free(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double grad = std::hypot(d.grad.theta[i], d.grad.phi[i]);
        const double hess = std::sqrt(d.hess.tt[i] * d.hess.tt[i] + 2.0 * d.hess.tp[i] * d.hess.tp[i] +
                                      mult * d.hess.pp[i] * d.hess.pp[i]);
        const double rest = std::pow(grad, p) + std::pow(hess, p);
        full[i] = std::pow(std::abs(f[i]), p) + rest;
        free[i] = std::pow(std::abs(f[i] - mean), p) + rest;
    }
    return {std::pow(grid.integrate(full), 1.0 / p), std::pow(grid.integrate(free), 1.0 / p)};
}

std::pair<double, double> field_range(const SphereGrid& grid, const std::vector<double>& field) {
    const bool full = grid.mode() == GridMode::Full;
    const auto th = grid.theta_nodes();
    const int nt = grid.n_theta(), np = grid.n_phi();
    const double dphi = 2.0 * kPi / np;

    auto refine = [&](std::size_t node, double sign) {
        const int i = static_cast<int>(node) / np;
        double t = grid.theta(node), p = grid.phi(node);
        const double lo = i > 0 ? th[i - 1] : 0.0, hi = i + 1 < nt ? th[i + 1] : kPi;
        double best = sign * field[node];
        for (int pass = 0; pass < (full ? 4 : 1); ++pass) {
            double val = 0.0;
            const double tn = minimize_on([&](double x) { return -sign * grid.evaluate(field, x, p); }, lo, hi, val);
            if (-val > best) best = -val, t = tn;
            if (!full) break;
            const double pn =
                minimize_on([&](double x) { return -sign * grid.evaluate(field, t, x); }, p - dphi, p + dphi, val);
            if (-val > best) best = -val, p = pn;
        }
        // Poles are not nodes of the grid.
        best = std::max(best, sign * grid.evaluate(field, 0.0, 0.0));
        best = std::max(best, sign * grid.evaluate(field, kPi, 0.0));
        return sign * best;
    };
    const auto [mn, mx] = std::minmax_element(field.begin(), field.end());
    const double top = refine(static_cast<std::size_t>(mx - field.begin()), 1.0);
    const double bottom = refine(static_cast<std::size_t>(mn - field.begin()), -1.0);
    return {bottom, top};
}

SliceDistance slice_distance(const GraphSurface& surface) {
    const auto [lo, hi] = field_range(surface.grid(), surface.r());
    return {0.5 * (lo + hi), 0.5 * (hi - lo)};
}

ConformalTransport conformal_transport(const GraphSurface& surface, double p) {
    const int n = surface.n();
    const auto img = to_euclidean(surface);
    const auto flat = img.as_flat_graph();
    ConformalTransport out;
    out.aring_lp = traceless_norm(surface, geometry_intrinsic(surface), p);
    out.aring_lp_euclidean = traceless_norm(flat, geometry_intrinsic(flat), p);
    out.sup_omega = img.sup_abs_omega();
    out.bound = std::exp((n + p) / p * out.sup_omega) * out.aring_lp;
    return out;
}

double stability_exponent(const WarpedSpace& space, Theorem theorem) {
    // The static statements are phrased in the ambient dimension.
    const int n = theorem == Theorem::T45 ? space.n() + 1 : space.n();
    return 1.0 / (2.0 * (n + 1.0));
}

StabilityReport stability_check(const StabilityInputs& in, const StabilityOptions& opt) {
    for (double x : {in.epsilon, in.dist, in.aring_lp, in.f_norm, in.exponent})
        if (!std::isfinite(x)) throw NumericError("stability inputs must be finite");
    StabilityReport rep;
    rep.theorem = in.theorem;
    rep.epsilon = in.epsilon;
    rep.dist_slice = in.dist;
    rep.aring_lp = in.aring_lp;
    rep.f_norm_mean_free = in.f_norm;
    rep.exponent = in.exponent;
    rep.norm_ratio = in.aring_lp > 0.0 ? in.f_norm / in.aring_lp : 0.0;
    if (in.epsilon <= opt.eps_tol) {
        if (in.dist > opt.dist_tol) {
            rep.inconsistent = true;
            rep.note = "deficit vanishes but the surface is not a slice";
        } else {
            rep.benign = true;
            rep.note = "slice: deficit and distance vanish";
        }
        return rep;
    }
    rep.fitted_C = in.dist / std::pow(in.epsilon, in.exponent);
    if (opt.c_bound && rep.fitted_C > *opt.c_bound) {
        rep.bound_violated = true;
        rep.note = "fitted constant exceeds the configured bound";
    }
    return rep;
}

StabilityReport stability_check(const GraphSurface& surface, const StabilityOptions& opt) {
    const auto& space = surface.space();
    const Theorem th = opt.theorem ? *opt.theorem : (space.static_model() ? Theorem::T45 : Theorem::T1);
    const int n = surface.n();
    const auto g = geometry_intrinsic(surface);
    const DeficitEvaluator ev(space, th, opt.deficit);

    StabilityInputs in;
    in.theorem = th;
    in.epsilon = ev.evaluate(surface, g).epsilon;
    in.aring_lp = traceless_norm(surface, g, n + 1.0);
    const auto sd = slice_distance(surface);
    in.dist = sd.dist;
    in.exponent = stability_exponent(space, th);

    auto img = to_euclidean(surface);
    const double sup_omega = img.sup_abs_omega();
    double vscale = 1.0;
    if (opt.normalize_volume) {
        const auto norm = img.volume_normalized();
        vscale = norm.scale / img.scale;
        img = norm;
    }
    const auto fit = fit_radial_graph(img);
    const auto norms = graph_norms(surface.grid(), fit.f, n + 1.0);
    in.f_norm = norms.w2p_mean_free;

    auto rep = stability_check(in, opt);
    rep.r_star = sd.r_star;
    rep.f_norm = norms.w2p;
    rep.sup_omega = sup_omega;
    rep.volume_scale = vscale;
    return rep;
}

double observed_exponent(const std::vector<StabilityReport>& reports) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int k = 0;
    for (const auto& r : reports) {
        if (!(r.epsilon > 0.0) || !(r.dist_slice > 0.0)) continue;
        const double x = std::log(r.epsilon), y = std::log(r.dist_slice);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
        ++k;
    }
    if (k < 2) throw NumericError("exponent fit needs at least two reports with positive deficit and distance");
    const double den = k * sxx - sx * sx;
    if (!(std::abs(den) > 0.0)) throw NumericError("exponent fit is degenerate (all deficits equal)");
    return (k * sxy - sx * sy) / den;
}

} // namespace warpstab
