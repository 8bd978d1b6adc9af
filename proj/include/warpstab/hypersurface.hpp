#pragma once

#include "warpstab/ambient.hpp"
#include "warpstab/spheregrid.hpp"

#include <memory>
#include <vector>

namespace warpstab {

/// Radial graph {(r(y), y)} over the grid directions inside a warped space.
class GraphSurface {
public:
    GraphSurface(std::shared_ptr<const SphereGrid> grid, WarpedSpace space, std::vector<double> r);

    static GraphSurface slice(std::shared_ptr<const SphereGrid> grid, WarpedSpace space, double r0);

    const SphereGrid& grid() const noexcept { return *grid_; }
    const std::shared_ptr<const SphereGrid>& grid_ptr() const noexcept { return grid_; }
    const WarpedSpace& space() const noexcept { return space_; }
    const std::vector<double>& r() const noexcept { return r_; }
    int n() const noexcept { return space_.n(); }

    double r_min() const;
    double r_max() const;

    /// Spectral tail of r relative to its sup norm.
    double tail_fraction() const;
    /// Throws NumericError when the tail fraction exceeds `tol` (under-resolved graph).
    void check_resolved(double tol) const;

    GraphSurface with_r(std::vector<double> r) const { return {grid_, space_, std::move(r)}; }

private:
    std::shared_ptr<const SphereGrid> grid_;
    WarpedSpace space_;
    std::vector<double> r_;
};

/// Pointwise geometry. Principal curvatures are reported as k1 (multiplicity 1) and k2
/// (multiplicity `mult2`): on axisymmetric grids k1 is the meridian curvature and k2 the
/// rotational one (multiplicity n - 1); on full grids k1 <= k2.
struct GeometryFields {
    int n = 2;
    int mult2 = 1;
    std::vector<double> lambda, dlambda, d2lambda;
    std::vector<double> dmu;       // area density with respect to d sigma: lambda^n v
    std::vector<double> v;         // sqrt(1 + |Dr|^2 / lambda^2)
    std::vector<double> u;         // support function lambda / v
    std::vector<double> nu_r;      // radial component of the unit normal
    std::vector<double> nu_theta;  // tangential components (orthonormal frame)
    std::vector<double> nu_phi;
    std::vector<double> h_tt, h_tp, h_pp;  // shape operator in the induced orthonormal frame
    std::vector<double> k1, k2;
    std::vector<double> H, H1, H2, A2, Aring2;

    std::size_t size() const noexcept { return H.size(); }
    double min_curvature(std::size_t i) const { return std::min(k1[i], k2[i]); }
};

enum class GeometryPath { Intrinsic, Conformal };

struct GeometryOptions {
    // Flips the sign of the conformal normal-derivative term. Used only to show that the
    // dual-path check catches a wrong transformation formula.
    bool fault_conformal_sign = false;
};

GeometryFields geometry_intrinsic(const GraphSurface& surface);
GeometryFields geometry_conformal(const GraphSurface& surface, GeometryOptions opt = {});
GeometryFields geometry(const GraphSurface& surface, GeometryPath path = GeometryPath::Intrinsic);

/// int (weighted by dmu) of a nodal field.
double integrate_surface(const GraphSurface& surface, const GeometryFields& g, const std::vector<double>& field);

/// int u H1 - int lambda'.
double minkowski_residual(const GraphSurface& surface, const GeometryFields& g);
double minkowski_residual(const GraphSurface& surface);

/// Ric(nu, grad_Sigma Theta) per node, Theta' = lambda. The tangential gradient of Theta is the
/// tangential part of lambda d_r, which gives u (Ric_rr - Ric_tan) (1 - 1/v^2).
std::vector<double> ricci_normal_gradient(const GraphSurface& surface, const GeometryFields& g);

/// int u H2 - int lambda' H1 + (1 / (n (n - 1))) int Ric(nu, grad Theta).
double second_minkowski_residual(const GraphSurface& surface, const GeometryFields& g);
double second_minkowski_residual(const GraphSurface& surface);

/// min over nodes of the smallest principal curvature.
double convexity_margin(const GeometryFields& g);
double sup_aring(const GeometryFields& g);

/// Max relative difference between two geometry evaluations in H and |A°|^2.
struct PathDifference {
    double H = 0.0;
    double Aring2 = 0.0;
};
PathDifference compare_paths(const GeometryFields& a, const GeometryFields& b);

} // namespace warpstab
