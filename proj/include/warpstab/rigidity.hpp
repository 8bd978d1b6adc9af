#pragma once

#include "warpstab/functionals.hpp"
#include "warpstab/hypersurface.hpp"

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace warpstab {

/// Conformal image of a radial graph in R^{n+1}: X(y) = scale * R (rho(y) y) + T.
///
/// rho is the radial function about the body origin and is interpolated spectrally between nodes.
/// Axisymmetric grids use the meridian representative of each node, so their points lie in the
/// plane spanned by the first and last axes.
struct EuclideanImage {
    std::shared_ptr<const SphereGrid> grid;
    std::vector<double> rho;
    std::vector<double> omega;  // log(lambda / rho) per node; zero for synthetic images
    Eigen::MatrixXd rotation;
    Eigen::VectorXd translation;
    double scale = 1.0;

    int n() const { return grid->dim(); }
    std::vector<Eigen::VectorXd> points() const;
    double sup_abs_omega() const;
    /// Euclidean area element per unit sphere measure, body units (multiply by scale^n).
    std::vector<double> area_density() const;
    double area() const;

    EuclideanImage translated(const Eigen::VectorXd& shift) const;
    EuclideanImage rotated(const Eigen::MatrixXd& q) const;
    EuclideanImage scaled(double factor) const;
    /// Uniform rescaling to Euclidean area |S^n|.
    EuclideanImage volume_normalized() const;

    /// The body-frame radial graph as a surface in flat space (Euclidean curvature data).
    GraphSurface as_flat_graph() const;
};

/// Radial graph rho over the grid, centred at the origin.
EuclideanImage euclidean_radial_graph(std::shared_ptr<const SphereGrid> grid, std::vector<double> rho);

/// rho(r(y)) y with omega recorded. Throws SingularError where the flattening degenerates.
EuclideanImage to_euclidean(const GraphSurface& surface);

struct FitOptions {
    int max_iterations = 100;
    double tolerance = 1e-10;
};

struct RadialFit {
    Eigen::VectorXd centre;
    std::vector<double> f;  // log |X - c| along the image-frame grid directions
    double mean_f = 0.0;    // average of f over the sphere
    double oscillation = 0.0;
    int iterations = 0;
};

/// Centre minimizing the oscillation of log|X - c| (coordinate descent along the image axes,
/// started at the area centroid), then f sampled along grid directions by ray intersection.
/// Throws FitError when no centre sees the surface as a radial graph.
RadialFit fit_radial_graph(const EuclideanImage& image, const FitOptions& opt = {});

/// Oscillation max |log|X - c| - mean log|X - c|| over the nodes.
double centre_oscillation(const EuclideanImage& image, const Eigen::VectorXd& c);

struct GraphNorms {
    double w2p = 0.0;
    double w2p_mean_free = 0.0;  // same norm of f - mean(f)
};

/// (int |f|^p + |grad f|^p + |hess f|^p d sigma)^(1/p) with grid covariant derivatives.
GraphNorms graph_norms(const SphereGrid& grid, const std::vector<double>& f, double p);

/// sup and inf of the spectral interpolant of a nodal field, refined between nodes.
std::pair<double, double> field_range(const SphereGrid& grid, const std::vector<double>& field);

struct SliceDistance {
    double r_star = 0.0;
    double dist = 0.0;
};

/// Hausdorff distance to the nearest radial slice: half the oscillation of r.
SliceDistance slice_distance(const GraphSurface& surface);

struct ConformalTransport {
    double aring_lp = 0.0;          // in the warped metric
    double aring_lp_euclidean = 0.0;
    double bound = 0.0;             // exp(((n + p) / p) sup|omega|) * aring_lp
    double sup_omega = 0.0;
    bool holds() const { return aring_lp_euclidean <= bound * (1.0 + 1e-12) + 1e-14; }
};

ConformalTransport conformal_transport(const GraphSurface& surface, double p);

/// 1 / (2 (n + 1)) with n the dimension used in the theorem's statement.
double stability_exponent(const WarpedSpace& space, Theorem theorem);

struct StabilityInputs {
    Theorem theorem = Theorem::T1;
    double epsilon = 0.0;
    double dist = 0.0;
    double aring_lp = 0.0;
    double f_norm = 0.0;
    double exponent = 0.25;
};

struct StabilityOptions {
    std::optional<Theorem> theorem;  // default: T45 for static models, T1 otherwise
    bool normalize_volume = true;
    double dist_tol = 1e-6;
    double eps_tol = 1e-10;
    std::optional<double> c_bound;
    DeficitOptions deficit;
};

struct StabilityReport {
    Theorem theorem = Theorem::T1;
    double epsilon = 0.0;
    double aring_lp = 0.0;
    double dist_slice = 0.0;
    double r_star = 0.0;
    double f_norm = 0.0;
    double f_norm_mean_free = 0.0;
    double fitted_C = 0.0;  // 0 when epsilon is not positive
    double exponent = 0.0;
    double exponent_observed = 0.0;  // filled from sweeps
    double norm_ratio = 0.0;         // f_norm_mean_free / aring_lp, 0 on umbilic surfaces
    double sup_omega = 0.0;
    double volume_scale = 1.0;
    bool inconsistent = false;  // epsilon <= 0 while dist > tol
    bool benign = false;        // epsilon <= 0 and dist <= tol
    bool bound_violated = false;
    std::string note;
};

StabilityReport stability_check(const StabilityInputs& in, const StabilityOptions& opt = {});
StabilityReport stability_check(const GraphSurface& surface, const StabilityOptions& opt = {});

/// Least-squares slope of log dist against log epsilon over reports with both positive.
/// Throws NumericError with fewer than two usable points.
double observed_exponent(const std::vector<StabilityReport>& reports);

} // namespace warpstab
