#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace warpstab {

enum class GridMode { Axisym, Full };

const char* to_string(GridMode mode);
GridMode grid_mode_from_string(const std::string& name);

struct GridResolution {
    int n_theta = 64;
    int n_phi = 1;  // ignored in axisymmetric mode
};

/// Gradient of a scalar field in the sigma-orthonormal frame (e_theta, e_phi / sin(theta)).
/// In axisymmetric mode the second component is identically zero.
struct Gradient {
    std::vector<double> theta;
    std::vector<double> phi;
};

/// Covariant Hessian in the same frame. In axisymmetric mode `tp` is zero and `pp` is the
/// rotational eigenvalue, repeated (dim - 1) times in the full tensor.
struct Hessian {
    std::vector<double> tt;
    std::vector<double> tp;
    std::vector<double> pp;
};

struct FrameDerivatives {
    Gradient grad;
    Hessian hess;
};

/// Discretization of the round sphere S^n.
///
/// Nodes are Gauss-Jacobi points in x = cos(theta) for the weight (1 - x^2)^((n-2)/2), so that
/// axisymmetric integrals are Gaussian quadratures, together with a uniform longitude grid in
/// full mode (n = 2 only). Latitudinal derivatives act on the polynomial interpolant in x;
/// longitudinal derivatives are Fourier derivatives. Odd Fourier modes carry a sin(theta)
/// factor which is divided out before differentiating in x, so band-limited fields are
/// differentiated exactly up to round-off and nothing special happens near the poles.
///
/// Node ordering: index = i * n_phi + j with theta_i ascending and phi_j = 2 pi j / n_phi.
class SphereGrid {
public:
    static SphereGrid build(int dim, GridMode mode, GridResolution resolution);
    static SphereGrid axisym(int dim, int n_theta) { return build(dim, GridMode::Axisym, {n_theta, 1}); }
    static SphereGrid full(int n_theta, int n_phi) { return build(2, GridMode::Full, {n_theta, n_phi}); }

    int dim() const noexcept { return dim_; }
    GridMode mode() const noexcept { return mode_; }
    int n_theta() const noexcept { return n_theta_; }
    int n_phi() const noexcept { return n_phi_; }
    std::size_t size() const noexcept { return weights_.size(); }
    GridResolution resolution() const noexcept { return {n_theta_, n_phi_}; }

    /// Multiplicity of the second frame direction in curvature sums: dim - 1 for
    /// axisymmetric grids, 1 for the full grid.
    int second_multiplicity() const noexcept { return mode_ == GridMode::Axisym ? dim_ - 1 : 1; }

    std::span<const double> weights() const noexcept { return weights_; }
    double total_weight() const noexcept { return total_weight_; }

    double theta(std::size_t node) const { return theta_[node / n_phi_]; }
    double phi(std::size_t node) const { return phi_[node % n_phi_]; }
    double cos_theta(std::size_t node) const { return x_[node / n_phi_]; }
    double sin_theta(std::size_t node) const { return s_[node / n_phi_]; }
    std::span<const double> theta_nodes() const noexcept { return theta_; }
    std::span<const double> phi_nodes() const noexcept { return phi_; }

    /// Unit vector in R^{n+1} for a node. Axisymmetric grids report the meridian-plane
    /// representative (sin(theta), 0, ..., cos(theta)).
    std::vector<double> direction(std::size_t node) const;

    /// Minimum distance between neighbouring nodes on the unit sphere.
    double min_spacing() const noexcept { return min_spacing_; }

    std::vector<double> sample(const std::function<double(double theta, double phi)>& fn) const;

    double integrate(std::span<const double> field) const;

    Gradient grad(std::span<const double> field) const;
    Hessian hessian(std::span<const double> field) const;
    FrameDerivatives derivatives(std::span<const double> field) const;
    std::vector<double> laplace(std::span<const double> field) const;

    /// Spectral interpolant of a nodal field at an arbitrary point (poles included).
    double evaluate(std::span<const double> field, double theta, double phi = 0.0) const;

    /// Root-mean-square amplitude of the top quarter of the latitudinal spectrum (and of the
    /// longitudinal spectrum in full mode). Smooth, resolved fields sit at round-off level.
    double spectral_tail(std::span<const double> field) const;

private:
    SphereGrid() = default;

    void check_field(std::span<const double> field) const;
    // d/dx in difference form: exact zero on constants.
    void apply_dx(const double* in, double* out) const;
    // Fourier coefficients of each latitude row: a[m][i], b[m][i].
    void row_transform(std::span<const double> field, std::vector<std::vector<double>>& a,
                       std::vector<std::vector<double>>& b) const;
    // theta derivatives of one latitudinal profile with parity p = m mod 2.
    void profile_derivatives(const double* c, int parity, double* c_t, double* c_tt,
                             double* g_out = nullptr) const;
    double interpolate_x(const double* values, double x) const;

    int dim_ = 2;
    GridMode mode_ = GridMode::Axisym;
    int n_theta_ = 0;
    int n_phi_ = 1;
    std::vector<double> x_, theta_, s_, gauss_w_, bary_w_, phi_;
    std::vector<double> dx_;          // n_theta x n_theta differentiation matrix (row-major)
    std::vector<double> ortho_;       // orthonormal polynomials p_k(x_i), k-major
    std::vector<double> weights_;
    std::vector<double> cos_table_, sin_table_;  // (m, j) tables for the longitude DFT
    double total_weight_ = 0.0;
    double min_spacing_ = 0.0;
};

/// Area of the unit n-sphere.
double unit_sphere_area(int n);

} // namespace warpstab
