#include "warpstab/corpus.hpp"

#include "warpstab/errors.hpp"

#include <cmath>

namespace warpstab {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double sup_assoc_legendre(int l, int m) {
    double sup = 0.0;
    for (int i = 0; i <= 4000; ++i) sup = std::max(sup, std::abs(std::assoc_legendre(l, m, -1.0 + i / 2000.0)));
    return sup;
}

} // namespace

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
    return splitmix(splitmix(seed_ ^ splitmix(stream_)) + counter);
}

double CounterRng::uniform(std::uint64_t counter) const {
    return (bits(counter) >> 11) * 0x1.0p-53;
}

std::vector<double> perturbation_field(const SphereGrid& grid, double r0, const std::vector<Perturbation>& terms) {
    std::vector<double> r(grid.size(), r0);
    for (const auto& t : terms) {
        if (t.l < 0 || t.m < 0 || t.m > t.l) throw ConfigError("invalid perturbation degree/order");
        if (t.m != 0 && grid.mode() != GridMode::Full) throw ConfigError("non-axisymmetric perturbation on an axisymmetric grid");
        const double norm = t.m == 0 ? 1.0 : sup_assoc_legendre(t.l, t.m);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double x = grid.cos_theta(i);
            if (t.m == 0)
                r[i] += t.amplitude * std::legendre(t.l, x);
            else
                r[i] += t.amplitude * std::assoc_legendre(t.l, t.m, x) / norm * std::cos(t.m * grid.phi(i));
        }
    }
    return r;
}

GraphSurface perturbed_slice(std::shared_ptr<const SphereGrid> grid, const WarpedSpace& space, double r0,
                             const std::vector<Perturbation>& terms) {
    auto r = perturbation_field(*grid, r0, terms);
    return {std::move(grid), space, std::move(r)};
}

std::vector<WarpedSpace> catalog_spaces() {
    return {WarpedSpace::flat(2), WarpedSpace::hyperbolic(2), WarpedSpace::alpha_beta(1.0, 0.5, 2),
            WarpedSpace::from_static(StaticModel::ads_schwarzschild(2.0, 3)),
            WarpedSpace::from_static(StaticModel::rn_ads(2.0, 1.0, 1.0, 3))};
}

std::pair<double, double> corpus_radius_range(const WarpedSpace& w) {
    switch (w.kind()) {
    case ModelKind::Flat: return {0.7, 1.5};
    case ModelKind::Hyperbolic: return {0.5, 2.0};
    case ModelKind::AlphaBeta:
        if (std::isfinite(w.a())) return {w.a() + 0.5, w.a() + 2.0};
        return {-1.0, 1.0};
    case ModelKind::AdSSchwarzschild:
    case ModelKind::RNAdS: {
        const double s0 = w.static_model()->s0;
        return {w.r_of_s(1.5 * s0), w.r_of_s(4.0 * s0)};
    }
    case ModelKind::Custom: {
        const double span = w.work_hi() - w.work_lo();
        return {w.work_lo() + 0.3 * span, w.work_lo() + 0.7 * span};
    }
    }
    throw ConfigError("unknown model");
}

std::vector<GraphSurface> random_convex_graphs(std::shared_ptr<const SphereGrid> grid, const WarpedSpace& space,
                                               int count, std::uint64_t seed, double rel_amp) {
    const auto [lo, hi] = corpus_radius_range(space);
    const bool full = grid->mode() == GridMode::Full;
    std::vector<GraphSurface> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        CounterRng rng(seed, static_cast<std::uint64_t>(k));
        std::uint64_t c = 0;
        const double r0 = rng.uniform(c++, lo, hi);
        // Amplitudes are relative to the distance from the inner end so graphs stay admissible.
        const double room = std::min(r0 - space.surface_lo(), std::max(r0, 1.0));
        std::vector<Perturbation> terms;
        for (int l = 1; l <= 4; ++l) terms.push_back({l, rng.uniform(c++, -1.0, 1.0) * rel_amp * room / l, 0});
        if (full) {
            terms.push_back({1, rng.uniform(c++, -1.0, 1.0) * rel_amp * room, 1});
            terms.push_back({2, rng.uniform(c++, -1.0, 1.0) * rel_amp * room / 2, 2});
            terms.push_back({3, rng.uniform(c++, -1.0, 1.0) * rel_amp * room / 3, 1});
        }
        for (int attempt = 0;; ++attempt) {
            if (attempt > 30) throw NumericError("could not generate a convex corpus graph");
            auto s = perturbed_slice(grid, space, r0, terms);
            if (convexity_margin(geometry_intrinsic(s)) > 0.0) {
                out.push_back(std::move(s));
                break;
            }
            for (auto& t : terms) t.amplitude *= 0.5;
        }
    }
    return out;
}

} // namespace warpstab
