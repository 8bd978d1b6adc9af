#include <doctest.h>

#include "warpstab/errors.hpp"
#include "warpstab/spheregrid.hpp"

#include <cmath>
#include <numbers>

using namespace warpstab;

namespace {
constexpr double kPi = std::numbers::pi;

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
    return e;
}
} // namespace

TEST_CASE("grid weights sum to the sphere area") {
    auto g = SphereGrid::build(2, GridMode::Axisym, {64, 1});
    CHECK(std::abs(g.total_weight() - 4.0 * kPi) < 1e-12 * 4.0 * kPi);
    auto f = SphereGrid::build(2, GridMode::Full, {32, 64});
    CHECK(std::abs(f.total_weight() - 4.0 * kPi) < 1e-12 * 4.0 * kPi);
    for (int n : {3, 4, 5}) {
        auto h = SphereGrid::axisym(n, 24);
        CHECK(std::abs(h.total_weight() / unit_sphere_area(n) - 1.0) < 1e-12);
    }
}

TEST_CASE("unsupported grid configurations are rejected") {
    CHECK_THROWS_AS(SphereGrid::build(3, GridMode::Full, {16, 16}), ConfigError);
    CHECK_THROWS_AS(SphereGrid::axisym(2, 4), ConfigError);
    CHECK_THROWS_AS(SphereGrid::full(16, 7), ConfigError);
    CHECK_THROWS_AS(grid_mode_from_string("icosahedral"), ConfigError);
}

TEST_CASE("quadrature of simple fields") {
    for (auto g : {SphereGrid::axisym(2, 64), SphereGrid::full(32, 64)}) {
        auto one = g.sample([](double, double) { return 1.0; });
        CHECK(g.integrate(one) == doctest::Approx(4.0 * kPi).epsilon(1e-13));
        auto c2 = g.sample([](double t, double) { return std::cos(t) * std::cos(t); });
        CHECK(g.integrate(c2) == doctest::Approx(4.0 * kPi / 3.0).epsilon(1e-13));
        for (int l = 1; l <= g.n_theta() / 2; ++l) {
            auto y = g.sample([l](double t, double) { return std::legendre(l, std::cos(t)); });
            CHECK(std::abs(g.integrate(y)) < 1e-10);
        }
    }
    auto g = SphereGrid::axisym(2, 16);
    auto bad = g.sample([](double, double) { return 1.0; });
    bad[3] = std::nan("");
    CHECK_THROWS_AS(g.integrate(bad), NumericError);
}

TEST_CASE("constant fields have exactly zero derivatives") {
    for (auto g : {SphereGrid::axisym(2, 33), SphereGrid::full(24, 32), SphereGrid::axisym(4, 20)}) {
        auto c = g.sample([](double, double) { return 2.718281828; });
        auto d = g.derivatives(c);
        for (std::size_t k = 0; k < g.size(); ++k) {
            CHECK(d.grad.theta[k] == 0.0);
            CHECK(d.grad.phi[k] == 0.0);
            CHECK(d.hess.tt[k] == 0.0);
            CHECK(d.hess.tp[k] == 0.0);
            CHECK(d.hess.pp[k] == 0.0);
        }
    }
}

TEST_CASE("spherical harmonics are Laplacian eigenfunctions") {
    auto g = SphereGrid::axisym(2, 128);
    auto c1 = g.sample([](double t, double) { return std::cos(t); });
    auto l1 = g.laplace(c1);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(l1[k] + 2.0 * c1[k]) < 1e-6);

    // Error of the l = 3 eigen-relation at two resolutions: both at round-off once resolved.
    for (int n : {64, 128}) {
        auto h = SphereGrid::axisym(2, n);
        auto y3 = h.sample([](double t, double) { return std::legendre(3, std::cos(t)); });
        auto l3 = h.laplace(y3);
        double err = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) err = std::max(err, std::abs(l3[k] + 12.0 * y3[k]));
        CHECK(err < 1e-6);
    }

    // Full mode, non-axisymmetric harmonics: l(l+1) eigenvalues.
    auto f = SphereGrid::full(32, 64);
    auto y21 = f.sample([](double t, double p) { return std::sin(t) * std::cos(t) * std::cos(p); });
    auto y33 = f.sample([](double t, double p) { return std::pow(std::sin(t), 3) * std::sin(3 * p); });
    auto ly21 = f.laplace(y21), ly33 = f.laplace(y33);
    for (std::size_t k = 0; k < f.size(); ++k) {
        CHECK(std::abs(ly21[k] + 6.0 * y21[k]) < 1e-9);
        CHECK(std::abs(ly33[k] + 12.0 * y33[k]) < 1e-9);
    }

    // Higher fiber dimension: Laplacian of cos(theta) on S^n is -n cos(theta).
    auto g4 = SphereGrid::axisym(4, 24);
    auto x = g4.sample([](double t, double) { return std::cos(t); });
    auto lx = g4.laplace(x);
    for (std::size_t k = 0; k < g4.size(); ++k) CHECK(std::abs(lx[k] + 4.0 * x[k]) < 1e-11);
}

TEST_CASE("operator error converges for non-polynomial fields") {
    // f = exp(cos theta): Laplacian known in closed form. Errors must drop by >= 4x per doubling
    // until round-off.
    auto exact = [](double t) {
        const double x = std::cos(t), e = std::exp(x);
        return (1 - x * x) * e - 2.0 * x * e;
    };
    double prev = 0.0;
    for (int n : {8, 16}) {
        auto g = SphereGrid::axisym(2, n);
        auto f = g.sample([](double t, double) { return std::exp(std::cos(t)); });
        auto lf = g.laplace(f);
        double err = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) err = std::max(err, std::abs(lf[k] - exact(g.theta(k))));
        if (prev > 0.0) CHECK(err < prev / 4.0);
        prev = err;
    }
}

TEST_CASE("pole regularity and frame derivatives in full mode") {
    auto g = SphereGrid::full(40, 32);
    auto f = g.sample([](double t, double p) { return std::sin(t) * std::cos(p); });
    auto d = g.derivatives(f);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double t = g.theta(k), p = g.phi(k);
        CHECK(std::abs(d.grad.theta[k] - std::cos(t) * std::cos(p)) < 1e-11);
        CHECK(std::abs(d.grad.phi[k] + std::sin(p)) < 1e-11);
        // Hessian of the restriction of a linear function is -f * identity.
        CHECK(std::abs(d.hess.tt[k] + f[k]) < 1e-10);
        CHECK(std::abs(d.hess.pp[k] + f[k]) < 1e-10);
        CHECK(std::abs(d.hess.tp[k]) < 1e-10);
    }
}

TEST_CASE("Laplacian integrates to zero") {
    auto g = SphereGrid::axisym(2, 48);
    auto f = g.sample([](double t, double) { return std::exp(std::sin(3 * t) + std::cos(t)); });
    CHECK(std::abs(g.integrate(g.laplace(f))) < 1e-10);
    auto h = SphereGrid::full(32, 32);
    auto q = h.sample([](double t, double p) { return std::exp(0.3 * std::sin(t) * std::cos(p) + std::cos(t)); });
    CHECK(std::abs(h.integrate(h.laplace(q))) < 1e-10);
}

TEST_CASE("spectral interpolation and tail") {
    auto g = SphereGrid::full(24, 32);
    auto fn = [](double t, double p) { return std::exp(std::cos(t)) + std::sin(t) * std::sin(t) * std::cos(2 * p); };
    auto f = g.sample(fn);
    for (double t : {0.0, 0.3, 1.7, kPi}) {
        for (double p : {0.0, 1.1, 4.0}) CHECK(std::abs(g.evaluate(f, t, p) - fn(t, p)) < 1e-12);
    }
    CHECK(g.spectral_tail(f) < 1e-12);
    auto a = SphereGrid::axisym(2, 32);
    auto r = a.sample([](double t, double) { return 1.0 + 0.05 * std::cos(t); });
    CHECK(a.spectral_tail(r) < 1e-14);
    CHECK(std::abs(a.evaluate(r, 0.0) - 1.05) < 1e-14);
    auto rough = a.sample([](double t, double) { return std::abs(t - 1.0); });
    CHECK(a.spectral_tail(rough) > 1e-4);
    CHECK(max_abs_diff(r, r) == 0.0);
}
