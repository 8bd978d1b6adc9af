#include "warpstab/spheregrid.hpp"

#include "warpstab/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace warpstab {

namespace {

constexpr double kPi = std::numbers::pi;

// Three-term recurrence of the orthonormal Jacobi(a, a) family.
struct JacobiRecurrence {
    double a;
    double mu0;
    std::vector<double> sqrt_b;  // sqrt_b[k] couples p_k and p_{k-1}, k >= 1

    JacobiRecurrence(double a_, int n) : a(a_), sqrt_b(n + 1, 0.0) {
        mu0 = std::exp((2.0 * a + 1.0) * std::log(2.0) + 2.0 * std::lgamma(a + 1.0) -
                       std::lgamma(2.0 * a + 2.0));
        for (int k = 1; k <= n; ++k) {
            const double kk = k;
            const double s = 2.0 * kk + 2.0 * a;
            const double b = 4.0 * kk * (kk + a) * (kk + a) * (kk + 2.0 * a) /
                             (s * s * (s + 1.0) * (s - 1.0));
            sqrt_b[k] = std::sqrt(b);
        }
    }

    // p_0..p_{count-1} at x, plus p_count and its derivative for Newton.
    void eval(double x, int count, double* p, double& p_top, double& dp_top) const {
        double pm1 = 0.0, p0 = 1.0 / std::sqrt(mu0);
        double dpm1 = 0.0, dp0 = 0.0;
        for (int k = 0; k < count; ++k) {
            if (p) p[k] = p0;
            const double p1 = (x * p0 - sqrt_b[k] * pm1) / sqrt_b[k + 1];
            const double dp1 = (x * dp0 + p0 - sqrt_b[k] * dpm1) / sqrt_b[k + 1];
            pm1 = p0;
            p0 = p1;
            dpm1 = dp0;
            dp0 = dp1;
        }
        p_top = p0;
        dp_top = dp0;
    }
};

} // namespace

const char* to_string(GridMode mode) { return mode == GridMode::Axisym ? "axisym" : "full"; }

GridMode grid_mode_from_string(const std::string& name) {
    if (name == "axisym") return GridMode::Axisym;
    if (name == "full") return GridMode::Full;
    throw ConfigError("unknown grid mode '" + name + "'");
}

double unit_sphere_area(int n) {
    return 2.0 * std::pow(kPi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

SphereGrid SphereGrid::build(int dim, GridMode mode, GridResolution res) {
    if (dim < 2) throw ConfigError("sphere dimension must be >= 2");
    if (mode == GridMode::Full && dim != 2)
        throw ConfigError("full grids are only supported for dim = 2 (got dim = " +
                          std::to_string(dim) + ")");
    if (res.n_theta < 8) throw ConfigError("resolution must be >= 8 latitudinal nodes");
    if (mode == GridMode::Full && (res.n_phi < 8 || res.n_phi % 2 != 0))
        throw ConfigError("full grids need an even number >= 8 of longitudes");

    SphereGrid g;
    g.dim_ = dim;
    g.mode_ = mode;
    g.n_theta_ = res.n_theta;
    g.n_phi_ = mode == GridMode::Full ? res.n_phi : 1;
    const int n = g.n_theta_;
    const double a = 0.5 * (dim - 2);

    JacobiRecurrence rec(a, n);

    // Golub-Welsch for initial nodes, then Newton polish and Christoffel weights.
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(n - 1);
    for (int k = 1; k < n; ++k) sub[k - 1] = rec.sqrt_b[k];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
    eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = eig.eigenvalues()[n - 1 - i];  // descending: theta ascending

    std::vector<double> p(n);
    for (int i = 0; i < n; ++i) {
        for (int it = 0; it < 5; ++it) {
            double top, dtop;
            rec.eval(x[i], n, nullptr, top, dtop);
            const double step = top / dtop;
            x[i] -= step;
            if (std::abs(step) < 1e-16) break;
        }
    }
    // Symmetrize: the weight is even, so nodes come in +/- pairs.
    for (int i = 0; i < n / 2; ++i) {
        const double m = 0.5 * (x[i] - x[n - 1 - i]);
        x[i] = m;
        x[n - 1 - i] = -m;
    }
    if (n % 2 == 1) x[n / 2] = 0.0;

    g.x_ = x;
    g.theta_.resize(n);
    g.s_.resize(n);
    g.gauss_w_.resize(n);
    g.ortho_.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        g.theta_[i] = std::acos(x[i]);
        g.s_[i] = std::sqrt((1.0 - x[i]) * (1.0 + x[i]));
        double top, dtop;
        rec.eval(x[i], n, p.data(), top, dtop);
        double sum = 0.0;
        for (int k = 0; k < n; ++k) {
            sum += p[k] * p[k];
            g.ortho_[static_cast<std::size_t>(k) * n + i] = p[k];
        }
        g.gauss_w_[i] = 1.0 / sum;
    }

    // Barycentric weights, rescaled to avoid under/overflow.
    g.bary_w_.resize(n);
    std::vector<double> logw(n);
    std::vector<int> sign(n, 1);
    for (int j = 0; j < n; ++j) {
        double l = 0.0;
        for (int k = 0; k < n; ++k) {
            if (k == j) continue;
            const double d = x[j] - x[k];
            l -= std::log(std::abs(d));
            if (d < 0) sign[j] = -sign[j];
        }
        logw[j] = l;
    }
    const double lmax = *std::max_element(logw.begin(), logw.end());
    for (int j = 0; j < n; ++j) g.bary_w_[j] = sign[j] * std::exp(logw[j] - lmax);

    g.dx_.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            g.dx_[static_cast<std::size_t>(i) * n + j] = (g.bary_w_[j] / g.bary_w_[i]) / (x[i] - x[j]);
        }
    }

    const int np = g.n_phi_;
    g.phi_.resize(np);
    for (int j = 0; j < np; ++j) g.phi_[j] = 2.0 * kPi * j / np;
    if (mode == GridMode::Full) {
        const int mmax = np / 2;
        g.cos_table_.resize(static_cast<std::size_t>(mmax + 1) * np);
        g.sin_table_.resize(static_cast<std::size_t>(mmax + 1) * np);
        for (int m = 0; m <= mmax; ++m) {
            for (int j = 0; j < np; ++j) {
                // Reduce the argument exactly on the integer lattice.
                const long idx = (static_cast<long>(m) * j) % np;
                const double ang = 2.0 * kPi * idx / np;
                g.cos_table_[static_cast<std::size_t>(m) * np + j] = std::cos(ang);
                g.sin_table_[static_cast<std::size_t>(m) * np + j] = std::sin(ang);
            }
        }
    }

    const double lower = mode == GridMode::Full ? (2.0 * kPi / np) : 0.0;
    const double fiber = mode == GridMode::Full ? lower : unit_sphere_area(dim - 1);
    g.weights_.resize(static_cast<std::size_t>(n) * np);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < np; ++j) g.weights_[static_cast<std::size_t>(i) * np + j] = g.gauss_w_[i] * fiber;

    // Pairwise (Neumaier) sum so the total matches |S^n| to round-off.
    double sum = 0.0, comp = 0.0;
    for (double w : g.weights_) {
        const double t = sum + w;
        comp += std::abs(sum) >= std::abs(w) ? (sum - t) + w : (w - t) + sum;
        sum = t;
    }
    g.total_weight_ = sum + comp;

    double spacing = g.theta_[0];
    for (int i = 1; i < n; ++i) spacing = std::min(spacing, g.theta_[i] - g.theta_[i - 1]);
    if (mode == GridMode::Full) spacing = std::min(spacing, g.s_[0] * 2.0 * kPi / np);
    g.min_spacing_ = spacing;
    return g;
}

std::vector<double> SphereGrid::direction(std::size_t node) const {
    std::vector<double> d(dim_ + 1, 0.0);
    const double s = sin_theta(node);
    if (mode_ == GridMode::Full) {
        d[0] = s * std::cos(phi(node));
        d[1] = s * std::sin(phi(node));
    } else {
        d[0] = s;
    }
    d[dim_] = cos_theta(node);
    return d;
}

std::vector<double> SphereGrid::sample(const std::function<double(double, double)>& fn) const {
    std::vector<double> out(size());
    for (std::size_t k = 0; k < size(); ++k) out[k] = fn(theta(k), phi(k));
    return out;
}

void SphereGrid::check_field(std::span<const double> field) const {
    if (field.size() != size())
        throw NumericError("field size " + std::to_string(field.size()) + " does not match grid size " +
                           std::to_string(size()));
    for (double v : field)
        if (!std::isfinite(v)) throw NumericError("non-finite value in grid field");
}

double SphereGrid::integrate(std::span<const double> field) const {
    check_field(field);
    double sum = 0.0, comp = 0.0;
    for (std::size_t k = 0; k < field.size(); ++k) {
        const double v = weights_[k] * field[k];
        const double t = sum + v;
        comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

void SphereGrid::apply_dx(const double* in, double* out) const {
    const int n = n_theta_;
    for (int i = 0; i < n; ++i) {
        const double* row = &dx_[static_cast<std::size_t>(i) * n];
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += row[j] * (in[j] - in[i]);
        out[i] = acc;
    }
}

void SphereGrid::profile_derivatives(const double* c, int parity, double* c_t, double* c_tt,
                                     double* g_out) const {
    const int n = n_theta_;
    std::vector<double> g(n), gx(n), gxx(n);
    for (int i = 0; i < n; ++i) g[i] = parity ? c[i] / s_[i] : c[i];
    apply_dx(g.data(), gx.data());
    apply_dx(gx.data(), gxx.data());
    for (int i = 0; i < n; ++i) {
        const double s = s_[i], x = x_[i];
        if (parity == 0) {
            c_t[i] = -s * gx[i];
            c_tt[i] = -x * gx[i] + s * s * gxx[i];
        } else {
            c_t[i] = x * g[i] - s * s * gx[i];
            c_tt[i] = -s * g[i] - 3.0 * s * x * gx[i] + s * s * s * gxx[i];
        }
        if (g_out) g_out[i] = gx[i];
    }
}

void SphereGrid::row_transform(std::span<const double> field, std::vector<std::vector<double>>& a,
                               std::vector<std::vector<double>>& b) const {
    const int n = n_theta_, np = n_phi_, mmax = np / 2;
    a.assign(mmax + 1, std::vector<double>(n, 0.0));
    b.assign(mmax + 1, std::vector<double>(n, 0.0));
    for (int i = 0; i < n; ++i) {
        const double* row = &field[static_cast<std::size_t>(i) * np];
        const double ref = row[0];
        double mean = 0.0;
        for (int j = 0; j < np; ++j) mean += row[j] - ref;
        a[0][i] = ref + mean / np;
        for (int m = 1; m <= mmax; ++m) {
            const double* ct = &cos_table_[static_cast<std::size_t>(m) * np];
            const double* st = &sin_table_[static_cast<std::size_t>(m) * np];
            double ac = 0.0, bs = 0.0;
            for (int j = 0; j < np; ++j) {
                const double d = row[j] - ref;
                ac += d * ct[j];
                bs += d * st[j];
            }
            const double scale = (m == mmax) ? 1.0 / np : 2.0 / np;
            a[m][i] = ac * scale;
            b[m][i] = (m == mmax) ? 0.0 : bs * scale;
        }
    }
}

FrameDerivatives SphereGrid::derivatives(std::span<const double> field) const {
    check_field(field);
    const int n = n_theta_, np = n_phi_;
    FrameDerivatives out;
    const std::size_t sz = size();
    out.grad.theta.assign(sz, 0.0);
    out.grad.phi.assign(sz, 0.0);
    out.hess.tt.assign(sz, 0.0);
    out.hess.tp.assign(sz, 0.0);
    out.hess.pp.assign(sz, 0.0);

    if (mode_ == GridMode::Axisym) {
        std::vector<double> ct(n), ctt(n), gx(n);
        profile_derivatives(field.data(), 0, ct.data(), ctt.data(), gx.data());
        for (int i = 0; i < n; ++i) {
            out.grad.theta[i] = ct[i];
            out.hess.tt[i] = ctt[i];
            out.hess.pp[i] = -x_[i] * gx[i];  // cot(theta) f_theta, regular at the poles
        }
        return out;
    }

    std::vector<std::vector<double>> a, b;
    row_transform(field, a, b);
    const int mmax = np / 2;
    std::vector<std::vector<double>> at(mmax + 1, std::vector<double>(n)), att = at, bt = at, btt = at;
    for (int m = 0; m <= mmax; ++m) {
        profile_derivatives(a[m].data(), m % 2, at[m].data(), att[m].data());
        profile_derivatives(b[m].data(), m % 2, bt[m].data(), btt[m].data());
    }
    for (int i = 0; i < n; ++i) {
        const double s = s_[i], cot = x_[i] / s_[i];
        for (int j = 0; j < np; ++j) {
            double ft = 0, ftt = 0, fp = 0, fpp = 0, ftp = 0;
            for (int m = 0; m <= mmax; ++m) {
                const double c = cos_table_[static_cast<std::size_t>(m) * np + j];
                const double sn = sin_table_[static_cast<std::size_t>(m) * np + j];
                ft += at[m][i] * c + bt[m][i] * sn;
                ftt += att[m][i] * c + btt[m][i] * sn;
                fpp += -double(m) * m * (a[m][i] * c + b[m][i] * sn);
                if (m != mmax) {
                    fp += m * (-a[m][i] * sn + b[m][i] * c);
                    ftp += m * (-at[m][i] * sn + bt[m][i] * c);
                }
            }
            const std::size_t k = static_cast<std::size_t>(i) * np + j;
            out.grad.theta[k] = ft;
            out.grad.phi[k] = fp / s;
            out.hess.tt[k] = ftt;
            out.hess.tp[k] = (ftp - cot * fp) / s;
            out.hess.pp[k] = fpp / (s * s) + cot * ft;
        }
    }
    return out;
}

Gradient SphereGrid::grad(std::span<const double> field) const { return derivatives(field).grad; }

Hessian SphereGrid::hessian(std::span<const double> field) const { return derivatives(field).hess; }

std::vector<double> SphereGrid::laplace(std::span<const double> field) const {
    const auto d = derivatives(field);
    const int mult = second_multiplicity();
    std::vector<double> out(size());
    for (std::size_t k = 0; k < size(); ++k) out[k] = d.hess.tt[k] + mult * d.hess.pp[k];
    return out;
}

double SphereGrid::interpolate_x(const double* values, double x) const {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < n_theta_; ++j) {
        const double d = x - x_[j];
        if (d == 0.0) return values[j];
        const double t = bary_w_[j] / d;
        num += t * values[j];
        den += t;
    }
    return num / den;
}

double SphereGrid::evaluate(std::span<const double> field, double theta, double phi) const {
    check_field(field);
    const double x = std::cos(theta), s = std::sin(theta);
    if (mode_ == GridMode::Axisym) return interpolate_x(field.data(), x);

    std::vector<std::vector<double>> a, b;
    row_transform(field, a, b);
    const int n = n_theta_, mmax = n_phi_ / 2;
    std::vector<double> g(n);
    double value = 0.0;
    for (int m = 0; m <= mmax; ++m) {
        const int parity = m % 2;
        const double fac = parity ? s : 1.0;
        for (int i = 0; i < n; ++i) g[i] = parity ? a[m][i] / s_[i] : a[m][i];
        const double am = fac * interpolate_x(g.data(), x);
        for (int i = 0; i < n; ++i) g[i] = parity ? b[m][i] / s_[i] : b[m][i];
        const double bm = fac * interpolate_x(g.data(), x);
        if (m == mmax)
            value += am * std::cos(m * phi);
        else
            value += am * std::cos(m * phi) + bm * std::sin(m * phi);
    }
    return value;
}

double SphereGrid::spectral_tail(std::span<const double> field) const {
    check_field(field);
    const int n = n_theta_;
    const int k0 = (3 * n) / 4;
    auto latitudinal_tail = [&](const std::vector<double>& g) {
        double e = 0.0;
        for (int k = k0; k < n; ++k) {
            const double* pk = &ortho_[static_cast<std::size_t>(k) * n];
            double c = 0.0;
            for (int i = 0; i < n; ++i) c += gauss_w_[i] * pk[i] * g[i];
            e += c * c;
        }
        return e;
    };
    double energy = 0.0;
    if (mode_ == GridMode::Axisym) {
        energy = latitudinal_tail(std::vector<double>(field.begin(), field.end()));
    } else {
        std::vector<std::vector<double>> a, b;
        row_transform(field, a, b);
        const int mmax = n_phi_ / 2;
        const int m0 = (3 * mmax) / 4;
        std::vector<double> g(n);
        for (int m = 0; m <= mmax; ++m) {
            const bool high = m >= m0;
            for (auto* coeffs : {&a[m], &b[m]}) {
                for (int i = 0; i < n; ++i) g[i] = (m % 2) ? (*coeffs)[i] / s_[i] : (*coeffs)[i];
                if (high) {
                    for (int i = 0; i < n; ++i) energy += gauss_w_[i] * (*coeffs)[i] * (*coeffs)[i] / 2.0;
                } else {
                    energy += latitudinal_tail(g);
                }
            }
        }
    }
    return std::sqrt(energy);
}

} // namespace warpstab
