#pragma once

#include "warpstab/hypersurface.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace warpstab {

double area(const GraphSurface& surface, const GeometryFields& g);
double area(const GraphSurface& surface);

/// Volume of the region between the inner end of the domain (the horizon for static models)
/// and the graph: int over S^n of int_a^{r(y)} lambda^n.
double enclosed_volume(const GraphSurface& surface);

/// int over the enclosed region of Ric(d_r, d_r).
double enclosed_ricci(const GraphSurface& surface);

/// int_Omega f dvol for static models by the radial reduction: f dvol = s^n ds d sigma, so
/// int_Omega f = (1/(n+1)) int (s(y)^(n+1) - s0^(n+1)) d sigma. Throws ConfigError otherwise.
double weighted_volume(const GraphSurface& surface);

/// The same integral computed along each ray as int lambda' lambda^n dr in the radial coordinate,
/// plus the closed-form cap between the horizon and the admissible inner radius.
double weighted_volume_quadrature(const GraphSurface& surface);

/// int over S^n of s(y)^(n+1) d sigma (static models).
double static_radius_moment(const GraphSurface& surface);

double integral_H1(const GraphSurface& surface, const GeometryFields& g);

/// (int |A°|^p d mu)^(1/p).
double traceless_norm(const GraphSurface& surface, const GeometryFields& g, double p);

/// Values of the slice functionals at radius r.
struct SliceValues {
    double A = 0.0;   // |S_r|
    double V = 0.0;   // |S^_r|
    double B1 = 0.0;  // int H1 + (1/n) int Ric(d_r, d_r) over the enclosed region
    double W2 = 0.0;  // int H1 - |S^_r|
};

SliceValues slice_values(const WarpedSpace& space, double r);

/// Which slice curve a table represents: abscissa column against ordinate column.
enum class SliceCurve {
    B1_vs_area,    // phi for the first theorem
    B1_vs_volume,  // psi for the second theorem
    W2_vs_area,    // phi for the third theorem
};

const char* to_string(SliceCurve curve);

/// Tabulated slice curve x(r) -> y(r), interpolated by cubic Hermite splines in r using exact
/// r-derivatives. Both columns must be strictly increasing in r.
class SliceTable {
public:
    static SliceTable build(const WarpedSpace& space, SliceCurve curve, double r_lo, double r_hi,
                            int samples = 1024);
    /// Default range: [surface_lo, work_hi] slightly shrunk for warps vanishing at a.
    static SliceTable build(const WarpedSpace& space, SliceCurve curve, int samples = 1024);

    SliceCurve curve() const noexcept { return curve_; }
    const std::vector<double>& r() const noexcept { return r_; }
    const std::vector<double>& x() const noexcept { return x_; }
    const std::vector<double>& y() const noexcept { return y_; }
    std::pair<double, double> x_range() const { return {x_.front(), x_.back()}; }
    std::pair<double, double> y_range() const { return {y_.front(), y_.back()}; }

    /// Radius of the slice whose abscissa equals `x`.
    double radius_of_x(double x) const;
    double radius_of_y(double y) const;

    double phi(double x) const;
    double phi_inverse(double y) const;
    double dphi(double x) const;

private:
    SliceTable() = default;
    double invert(const std::vector<double>& col, const std::vector<double>& dcol, double value) const;

    SliceCurve curve_ = SliceCurve::B1_vs_area;
    std::vector<double> r_, x_, y_, dx_, dy_;
};

/// Residual of phi'(|S_r|) |S_r| = ((n-1)/n) (W2(S_r) + |S^_r|) at the midpoints between table
/// nodes, for a table of kind W2_vs_area. Returns the sup of the absolute residual relative to
/// max(1, |rhs|). The `extra_volume_term` variant adds + |S^_r| to the right-hand side.
double phi_prime_identity_residual(const SliceTable& table, const WarpedSpace& space, bool extra_volume_term = false);

enum class Theorem { T1, T2, T3, T45 };

const char* to_string(Theorem theorem);
Theorem theorem_from_string(const std::string& name);

struct DeficitReport {
    Theorem theorem = Theorem::T1;
    double epsilon = 0.0;
    std::vector<std::pair<std::string, double>> components;
    double aring_lp = 0.0;
    std::string notes;

    double component(const std::string& name) const;
};

struct DeficitOptions {
    bool check_hypotheses = true;
    int table_samples = 1024;
    std::optional<std::pair<double, double>> table_range;  // radii; default from the space
};

/// Evaluates one theorem's deficit on many surfaces of the same space. Builds the slice table and
/// checks the space assumptions once.
class DeficitEvaluator {
public:
    DeficitEvaluator(const WarpedSpace& space, Theorem theorem, DeficitOptions opt = {});

    Theorem theorem() const noexcept { return theorem_; }
    const WarpedSpace& space() const noexcept { return space_; }
    const SliceTable* table() const noexcept { return table_ ? table_.get() : nullptr; }

    DeficitReport evaluate(const GraphSurface& surface, const GeometryFields& g) const;
    DeficitReport evaluate(const GraphSurface& surface) const;

    /// Throws HypothesisError naming the failed condition.
    void check_surface(const GraphSurface& surface, const GeometryFields& g) const;

private:
    WarpedSpace space_;
    Theorem theorem_;
    DeficitOptions opt_;
    std::shared_ptr<const SliceTable> table_;
};

DeficitReport deficit(const GraphSurface& surface, Theorem theorem, DeficitOptions opt = {});

/// int lambda' / H1 d mu - int u d mu.
double heintze_karcher_gap(const GraphSurface& surface, const GeometryFields& g);
double heintze_karcher_gap(const GraphSurface& surface);

/// Static-model quantities along inverse mean curvature flow. With N = n + 1 the ambient
/// dimension and p = (N - 2) / (N - 1): Q_initial = |Sigma_0|^(-p) W and Q_current = |Sigma|^(-p) W.
struct BrendleQuantities {
    double W = 0.0;
    double Q_initial = 0.0;
    double Q_current = 0.0;
    double areal_radius = 0.0;
};

BrendleQuantities brendle_W_Q(const GraphSurface& surface, const GeometryFields& g, double sigma0_area);
BrendleQuantities brendle_W_Q(const GraphSurface& surface, double sigma0_area);

/// Exponent p = (N - 2) / (N - 1) used by the static deficit accounting.
double brendle_exponent(const WarpedSpace& space);

} // namespace warpstab
