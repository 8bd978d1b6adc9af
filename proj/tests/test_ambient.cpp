#include <doctest.h>

#include "warpstab/ambient.hpp"
#include "warpstab/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

using namespace warpstab;

TEST_CASE("closed-form warping functions") {
    auto flat = WarpedSpace::flat(2);
    auto l = flat.eval(1.0);
    CHECK(l.lambda == 1.0);
    CHECK(l.dlambda == 1.0);
    CHECK(l.d2lambda == 0.0);

    auto hyp = WarpedSpace::hyperbolic(2);
    l = hyp.eval(1.0);
    CHECK(l.lambda == doctest::Approx(std::sinh(1.0)).epsilon(1e-15));
    CHECK(l.dlambda == doctest::Approx(std::cosh(1.0)).epsilon(1e-15));
    CHECK(l.d2lambda == doctest::Approx(std::sinh(1.0)).epsilon(1e-15));

    auto ab = WarpedSpace::alpha_beta(1.0, 0.0, 2);
    for (double r : {0.1, 0.7, 2.5}) CHECK(ab.eval(r).d2lambda == ab.eval(r).lambda);

    CHECK_THROWS_AS(flat.eval(-0.5), DomainError);
    CHECK_THROWS_AS(hyp.eval(0.0), DomainError);
    CHECK_THROWS_AS(WarpedSpace::alpha_beta(0.5, 1.0, 2), ConfigError);
    CHECK_THROWS_AS(WarpedSpace::alpha_beta(0.0, 0.0, 2), ConfigError);

    auto poly = WarpedSpace::polynomial({0.0, 1.0, 0.5}, 2, 0.0, 3.0);
    l = poly.eval(2.0);
    CHECK(l.lambda == doctest::Approx(4.0));
    CHECK(l.dlambda == doctest::Approx(3.0));
    CHECK(l.d2lambda == doctest::Approx(1.0));
}

TEST_CASE("radial Ricci curvature") {
    CHECK(WarpedSpace::flat(2).ricci_rr(0.7) == 0.0);
    CHECK(WarpedSpace::hyperbolic(2).ricci_rr(0.7) == doctest::Approx(-2.0).epsilon(1e-15));
    auto ab = WarpedSpace::alpha_beta(1.0, 0.5, 3);
    for (double r : {-0.3, 0.0, 1.0, 2.0}) CHECK(ab.ricci_rr(r) == -3.0);
    // Hyperbolic space is Einstein.
    CHECK(WarpedSpace::hyperbolic(3).ricci_tangential(1.3) == doctest::Approx(-3.0).epsilon(1e-13));
    CHECK(WarpedSpace::alpha_beta(1.0, 0.5, 2).ricci_lower_constant() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("assumption reports") {
    auto rep = check_assumptions(WarpedSpace::hyperbolic(2));
    CHECK(rep.all_pass());
    CHECK(std::abs(rep.get("ricci_bound").margin) < 1e-10);

    auto ab = check_assumptions(WarpedSpace::alpha_beta(2.0, 0.0, 2));
    CHECK_FALSE(ab.get("alphabeta_bound").pass);
    CHECK(ab.get("alphabeta_bound").margin == doctest::Approx(-3.0));

    auto flat = check_assumptions(WarpedSpace::flat(2));
    CHECK(flat.all_pass());

    auto ads = WarpedSpace::from_static(StaticModel::ads_schwarzschild(2.0, 3));
    auto sr = check_assumptions(ads, 0.0, ads.work_hi(), 10000);
    for (const char* h : {"H1", "H2", "H3", "H4", "H5"}) {
        INFO(h);
        CHECK(sr.get(h).applicable);
        CHECK(sr.get(h).pass);
    }
    // Independent check of H5 for this model: P is the constant (dim - 2) m.
    const auto& sm = *ads.static_model();
    for (double s : {1.1, 2.0, 7.0}) {
        const double x = s * s;
        const double P = (2.0 * sm.f(s) * sm.df(s) - 2.0 * s) * x;
        CHECK(P == doctest::Approx(2.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(check_assumptions(WarpedSpace::flat(2), 50), ConfigError);
}

TEST_CASE("assumption margins are monotone under shrinking the domain") {
    auto w = WarpedSpace::alpha_beta(1.0, 0.5, 2);
    auto big = check_assumptions(w, w.work_lo(), w.work_hi(), 1000);
    auto small = check_assumptions(w, w.work_lo() + 0.5, w.work_hi() - 0.5, 1000);
    for (const auto& c : big.conditions)
        if (c.applicable && c.pass) CHECK(small.get(c.name).pass);
}

TEST_CASE("static models: horizon, coordinates, identities") {
    auto ads_m = StaticModel::ads_schwarzschild(2.0, 3);
    CHECK(ads_m.s0 == doctest::Approx(1.0).epsilon(1e-14));
    auto rn_m = StaticModel::rn_ads(2.0, 1.0, 1.0, 3);
    CHECK(rn_m.s0 == doctest::Approx(1.24938055765692040548785842073).epsilon(1e-13));
    CHECK_THROWS_AS(StaticModel::rn_ads(1.0, 1.0, 1.0, 3), ConfigError);

    auto ads = WarpedSpace::from_static(ads_m);
    CHECK(ads.kind() == ModelKind::AdSSchwarzschild);
    CHECK(ads.n() == 2);

    // Round trip.
    const double s = 2.0 * ads_m.s0;
    CHECK(std::abs(s_of_r(ads, warp_coordinate(ads, s)) - s) < 1e-10 * s);
    for (double t : {1.0101, 1.2, 3.3, 11.0, 40.0}) CHECK(std::abs(ads.s_of_r(ads.r_of_s(t)) - t) < 1e-12 * t);

    // Below the reference radius, still above the horizon.
    const double inner = 1.003;
    CHECK(std::abs(ads.s_of_r(ads.r_of_s(inner)) - inner) < 1e-10);
    CHECK_THROWS_AS(warp_coordinate(ads, 1.0), HorizonError);
    CHECK_THROWS_AS(warp_coordinate(ads, 0.5), HorizonError);

    // r(3): table vs independent adaptive integrator vs high-precision value.
    const double r3 = warp_coordinate(ads, 3.0);
    const double oracle = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) { return 1.0 / ads_m.f(t); }, 1.01, 3.0, 20, 5e-13);
    CHECK(std::abs(r3 - oracle) < 1e-11);
    CHECK(r3 == doctest::Approx(1.31243458890453815888838699459).epsilon(1e-12));

    // lambda consistency: lambda(r(s)) = s, d lambda / dr = f(s).
    for (double t : {1.05, 2.0, 5.0}) {
        const double r = ads.r_of_s(t);
        const auto l = ads.eval(r);
        CHECK(std::abs(l.lambda - t) < 1e-9);
        const double h = 1e-5;
        const double fd = (ads.eval(r + h).lambda - ads.eval(r - h).lambda) / (2 * h);
        CHECK(std::abs(l.dlambda - ads_m.f(t)) < 1e-12);
        CHECK(std::abs(fd - ads_m.f(t)) < 1e-8);
        const double fd2 = (ads.eval(r + h).dlambda - ads.eval(r - h).dlambda) / (2 * h);
        CHECK(std::abs(fd2 - l.d2lambda) < 1e-7);
    }
}

TEST_CASE("static potential identities") {
    auto ads_m = StaticModel::ads_schwarzschild(2.0, 3);
    CHECK(check_static_identity(ads_m, 1.5 * ads_m.s0, 10 * ads_m.s0) < 1e-8);
    auto rn0 = StaticModel::rn_ads(1.0, 0.0, 1.0, 3);
    const double a = check_static_identity(ads_m, 1.5, 10.0);
    const double b = check_static_identity(rn0, 1.5, 10.0);
    CHECK(b < 1e-8);
    CHECK(std::abs(a - b) < 1e-12);
    auto rn = StaticModel::rn_ads(2.0, 1.0, 1.0, 3);
    CHECK(check_static_identity(rn, 1.5 * rn.s0, 10 * rn.s0) < 1e-8);
    for (int dim : {4, 5}) {
        auto h = StaticModel::ads_schwarzschild(1.0, dim);
        CHECK(check_static_identity(h, 1.5 * h.s0, 10 * h.s0) < 1e-8);
        auto c = StaticModel::rn_ads(1.0, 0.4, 1.3, dim);
        CHECK(check_static_identity(c, 1.5 * c.s0, 10 * c.s0) < 1e-8);
    }

    // Radial Laplacian against finite differences of f along the geodesic coordinate r.
    auto ads = WarpedSpace::from_static(ads_m);
    for (double s : {1.5, 3.0, 6.0}) {
        const double r = ads.r_of_s(s), h = 1e-3;
        auto phi = [&](double rr) { return ads_m.f(ads.s_of_r(rr)); };
        const double p0 = phi(r), pp = phi(r + h), pm = phi(r - h);
        const double lap = (pp - 2 * p0 + pm) / (h * h) + 2.0 * ads_m.f(s) / s * (pp - pm) / (2 * h);
        CHECK(std::abs(lap - static_laplacian_f(ads_m, s)) < 1e-5 * std::abs(lap));
        CHECK(std::abs(lap - 3.0 * ads_m.f(s)) < 1e-5 * std::abs(lap));
    }
}

TEST_CASE("conformal flattening") {
    auto flat = WarpedSpace::flat(2);
    CHECK(flat.r_ref() == 1.0);
    for (double r : {0.3, 1.0, 1.7}) {
        auto fv = flat.flatten(r);
        CHECK(fv.rho == doctest::Approx(r).epsilon(1e-15));
        CHECK(std::abs(fv.omega) < 1e-15);
    }

    auto hyp = WarpedSpace::hyperbolic(2);
    const double r1 = 0.4, r2 = 2.2;
    const double ratio = hyp.flatten(r1).rho / hyp.flatten(r2).rho;
    CHECK(std::abs(ratio - std::tanh(r1 / 2) / std::tanh(r2 / 2)) < 1e-10);

    for (auto w : {hyp, WarpedSpace::alpha_beta(1.0, 0.5, 2), WarpedSpace::alpha_beta(1.0, 1.0, 2),
                   WarpedSpace::from_static(StaticModel::rn_ads(2.0, 1.0, 1.0, 3))}) {
        double sup_w = 0.0, sup_dw = 0.0;
        const double lo = std::max(w.work_lo(), w.a()) + 0.05 * (w.work_hi() - w.work_lo());
        for (int i = 0; i <= 50; ++i) {
            const double r = lo + (w.work_hi() - lo) * i / 50.0;
            auto fv = w.flatten(r);
            CHECK(std::abs(std::exp(2 * fv.omega) * fv.drho * fv.drho - 1.0) < 1e-10);
            sup_w = std::max(sup_w, std::abs(fv.omega));
            sup_dw = std::max(sup_dw, std::abs(fv.domega));
            // d omega / dr against finite differences.
            const double h = 1e-5;
            if (r + h <= w.work_hi()) {
                const double fd = (w.flatten(r + h).omega - w.flatten(r - h).omega) / (2 * h);
                CHECK(std::abs(fd - fv.domega) < 1e-6);
            }
        }
        CHECK(std::isfinite(sup_w));
        CHECK(std::isfinite(sup_dw));
    }
    CHECK_THROWS_AS(hyp.flatten(0.0), SingularError);
}

TEST_CASE("radial primitives") {
    auto hyp = WarpedSpace::hyperbolic(2);
    for (double r : {0.5, 1.0, 2.5}) {
        const double exact = (std::sinh(2 * r) / 2 - r) / 2;
        CHECK(std::abs(hyp.volume_primitive(r) - exact) < 1e-12);
        // ricci_rr = -2 so the Ricci primitive is -2 times the volume primitive.
        CHECK(std::abs(hyp.ricci_primitive(r) + 2 * exact) < 1e-12);
    }
    auto ee = WarpedSpace::alpha_beta(0.5, 0.5, 2);
    for (double r : {-1.0, 0.0, 1.0}) CHECK(std::abs(ee.volume_primitive(r) - 0.25 * std::exp(2 * r) / 2) < 1e-12);
    auto flat = WarpedSpace::flat(3);
    CHECK(flat.volume_primitive(1.5) == doctest::Approx(std::pow(1.5, 4) / 4).epsilon(1e-14));

    // Static model: frozen high-precision values of int_{s0}^s t^2/f dt and -2 int_{s0}^s f' t dt.
    auto ads = WarpedSpace::from_static(StaticModel::ads_schwarzschild(2.0, 3));
    const double ref[2][3] = {{1.2, 0.514145780245402669120489639557, -1.87474075858768357783487700803},
                              {2.5, 3.00472621148167827675199417101, -7.7965423130942190912868439916}};
    for (const auto& row : ref) {
        const double r = ads.r_of_s(row[0]);
        CHECK(std::abs(ads.volume_primitive(r) - row[1]) < 1e-10);
        CHECK(std::abs(ads.ricci_primitive(r) - row[2]) < 1e-10);
    }
}
