#pragma once

#include "warpstab/hypersurface.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace warpstab {

/// Counter-based generator: the k-th draw depends only on (seed, stream, k), so corpora are
/// reproducible regardless of evaluation order or threading.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}
    std::uint64_t bits(std::uint64_t counter) const;
    double uniform(std::uint64_t counter) const;  // [0, 1)
    double uniform(std::uint64_t counter, double lo, double hi) const { return lo + (hi - lo) * uniform(counter); }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_, stream_;
};

/// Axisymmetric perturbation term amplitude * P_l(cos theta); sup norm equals |amplitude|.
struct Perturbation {
    int l = 2;
    double amplitude = 0.0;
    int m = 0;  // full grids only: amplitude * P_l^m-shaped term with cos(m phi), sup-normalized
};

std::vector<double> perturbation_field(const SphereGrid& grid, double r0, const std::vector<Perturbation>& terms);

GraphSurface perturbed_slice(std::shared_ptr<const SphereGrid> grid, const WarpedSpace& space, double r0,
                             const std::vector<Perturbation>& terms);

/// The catalog of n = 2 spaces used by corpus-level checks.
std::vector<WarpedSpace> catalog_spaces();

/// Radius range where corpus surfaces are centred, inside the working domain.
std::pair<double, double> corpus_radius_range(const WarpedSpace& space);

/// `count` random strictly convex graphs: random base radius plus random low-order harmonics with
/// relative amplitude up to `rel_amp`, shrunk until the convexity margin is positive.
std::vector<GraphSurface> random_convex_graphs(std::shared_ptr<const SphereGrid> grid, const WarpedSpace& space,
                                               int count, std::uint64_t seed, double rel_amp = 0.04);

} // namespace warpstab
