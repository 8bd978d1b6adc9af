#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace warpstab {

enum class ModelKind { Flat, Hyperbolic, AlphaBeta, AdSSchwarzschild, RNAdS, Custom };

const char* to_string(ModelKind kind);

struct LambdaValues {
    double lambda = 0.0;
    double dlambda = 0.0;
    double d2lambda = 0.0;
};

/// Static metric ds^2 / f(s)^2 + s^2 g on [s0, inf) x S^{dim-1}, with
/// f^2 = 1 + kappa^2 s^2 - 2 m s^(2-dim) + q^2 s^(4-2dim).
///
/// `ads_schwarzschild(m, dim)` follows the convention f^2 = 1 + s^2 - m s^(2-dim), i.e. it is the
/// charged family with q = 0, kappa = 1 and mass parameter m / 2.
struct StaticModel {
    double m = 1.0;
    double q = 0.0;
    double kappa = 1.0;
    int dim = 3;
    double s0 = 0.0;
    bool schwarzschild = false;  // constructed through ads_schwarzschild()

    static StaticModel rn_ads(double m, double q, double kappa, int dim);
    static StaticModel ads_schwarzschild(double m, int dim);

    int fiber_dim() const noexcept { return dim - 1; }
    double f2(double s) const;
    double f(double s) const;
    double df(double s) const;
    double d2f(double s) const;
};

struct FlattenValues {
    double rho = 0.0;
    double omega = 0.0;   // log(lambda / rho)
    double domega = 0.0;  // d omega / dr
    double drho = 0.0;    // d rho / dr = rho / lambda
    double d2rho = 0.0;
};

struct SpaceOptions {
    std::optional<double> r_ref;          // flattening reference, default: mid working domain
    double horizon_margin = 1e-2;         // static models: s >= s0 (1 + margin)
    double s_max_factor = 60.0;           // static models: domain ends at s0 * factor
    double s_work_factor = 12.0;          // static models: working domain ends at s0 * factor
};

class StaticCoordinates;

/// Warped product (a, b) x S^n with metric dr^2 + lambda(r)^2 g. Immutable; cheap to copy.
class WarpedSpace {
public:
    static WarpedSpace flat(int n, SpaceOptions opt = {});
    static WarpedSpace hyperbolic(int n, SpaceOptions opt = {});
    static WarpedSpace alpha_beta(double alpha, double beta, int n, SpaceOptions opt = {});
    static WarpedSpace from_static(const StaticModel& model, SpaceOptions opt = {});
    /// lambda = sum c_i r^i on (a, b).
    static WarpedSpace polynomial(std::vector<double> coeffs, int n, double a, double b, SpaceOptions opt = {});
    static WarpedSpace custom(std::string name, int n, double a, double b,
                              std::function<LambdaValues(double)> fn, SpaceOptions opt = {});

    ModelKind kind() const noexcept { return kind_; }
    const std::string& name() const noexcept { return name_; }
    int n() const noexcept { return n_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double work_lo() const noexcept { return work_lo_; }
    double work_hi() const noexcept { return work_hi_; }
    /// Lower admissible radius for hypersurfaces (horizon margin for static models, a otherwise).
    double surface_lo() const noexcept { return surface_lo_; }
    double r_ref() const noexcept { return r_ref_; }
    double alpha() const noexcept { return alpha_; }
    double beta() const noexcept { return beta_; }
    const std::optional<StaticModel>& static_model() const noexcept { return static_; }
    std::string describe() const;

    bool contains(double r) const noexcept { return r > a_ && r < b_; }

    LambdaValues eval(double r) const;
    double ricci_rr(double r) const;
    /// Ricci eigenvalue on vectors tangent to the slices.
    double ricci_tangential(double r) const;
    FlattenValues flatten(double r) const;

    /// int_a^r lambda^n dr' (enclosed-volume density per unit sphere area).
    double volume_primitive(double r) const;
    /// int_a^r ricci_rr(r') lambda^n dr'.
    double ricci_primitive(double r) const;

    /// Static models only.
    double s_of_r(double r) const;
    double r_of_s(double s) const;

    /// Lower bound of the Ricci curvature over the working domain divided by n (sampled).
    double ricci_lower_constant(int samples = 2000) const;

private:
    WarpedSpace() = default;
    void finalize(const SpaceOptions& opt);
    double flatten_log_rho(double r) const;

    ModelKind kind_ = ModelKind::Flat;
    std::string name_;
    int n_ = 2;
    double a_ = 0.0, b_ = 0.0;
    double work_lo_ = 0.0, work_hi_ = 0.0, surface_lo_ = 0.0, r_ref_ = 1.0;
    double alpha_ = 0.0, beta_ = 0.0;
    std::vector<double> coeffs_;
    std::function<LambdaValues(double)> fn_;
    std::optional<StaticModel> static_;
    std::shared_ptr<const StaticCoordinates> coords_;
    double volume_base_ = 0.0;  // int_a^{r_ref} lambda^n
    double ricci_base_ = 0.0;   // int_a^{r_ref} ricci_rr lambda^n
    double log_rho_ref_ = 0.0;  // static models: tabulated log-rho column at r_ref
};

/// r(s) = int_{s_ref}^s ds' / f(s'), s_ref = s0 (1 + margin).
double warp_coordinate(const WarpedSpace& space, double s);
double s_of_r(const WarpedSpace& space, double r);

struct Condition {
    std::string name;
    bool applicable = true;
    bool pass = true;
    double margin = 0.0;
};

struct AssumptionReport {
    std::vector<Condition> conditions;
    bool all_pass() const;
    const Condition& get(const std::string& name) const;
};

/// Dense-sampling verifier. Conditions: lambda_positive, dlambda_positive, lambda_convexity
/// (lambda'' > 0 or [lambda'' <= 0 and (lambda''/lambda)' <= 0]), ricci_bound
/// (sup lambda'^2 - lambda lambda'' <= 1), alphabeta_bound, and H1..H5 for static models.
AssumptionReport check_assumptions(const WarpedSpace& space, int samples = 2000);
AssumptionReport check_assumptions(const WarpedSpace& space, double r_lo, double r_hi, int samples);

/// Sup over s in [s_lo, s_hi] of the traced static equation residual. Uncharged models report
/// |Lap f - dim f|; charged models report |Lap f + f Scal / k - k (k-1) q^2 f s^(-2k)| with
/// k = dim - 1 (the trace divided by k), so both agree for q = 0, kappa = 1.
double check_static_identity(const StaticModel& model, double s_lo, double s_hi, int samples = 2000);

/// Radial Laplacian of f(s) in the static metric.
double static_laplacian_f(const StaticModel& model, double s);
double static_scalar_curvature(const StaticModel& model, double s);

} // namespace warpstab
