#pragma once

#include "warpstab/corpus.hpp"
#include "warpstab/flows.hpp"
#include "warpstab/functionals.hpp"

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace warpstab::lab {

inline constexpr const char* kLibraryVersion = "0.3.0";

enum class Profile { Strict, Fast };

const char* to_string(Profile p);
Profile profile_from_string(const std::string& name);

/// One experiment: ambient space, initial radial graph, theorem and flow controls.
///
/// Text form is one `key = value` per line, `#` starts a comment. Radii are ambient arclength,
/// angles radians. Keys:
///   name, model (flat | hyperbolic | alpha_beta | ads_schwarzschild | rn_ads), n, alpha, beta,
///   mass, charge, kappa, dim, r0, s0_multiple, perturbation (l:amplitude[:m], comma separated),
///   theorem (T1..T5), flow (constrained | imcf), t_max, dt_max, cfl, tol_umbilic, monitor_every,
///   max_steps, resolution, n_phi (full grids), grid (axisym | full), seed.
struct Scenario {
    std::string name = "scenario";
    std::string model = "hyperbolic";
    int n = 2;
    double alpha = 1.0, beta = 0.5;
    double mass = 2.0, charge = 0.0, kappa = 1.0;
    int dim = 3;
    std::optional<double> r0;
    std::optional<double> s0_multiple;
    std::vector<Perturbation> perturbations;
    std::string theorem = "T1";
    std::optional<FlowKind> flow;
    double t_max = 5.0;
    double dt_max = 0.05;
    double cfl = 0.15;
    double tol_umbilic = 1e-6;
    int monitor_every = 10;
    int max_steps = 200000;
    int resolution = 48;
    int n_phi = 0;  // full grids: 0 means 2 * resolution
    std::string grid = "axisym";
    std::uint64_t seed = 0;

    Theorem theorem_id() const { return theorem_from_string(theorem); }
    FlowKind flow_kind() const;
    FlowControls controls() const;

    WarpedSpace space() const;
    std::shared_ptr<const SphereGrid> make_grid() const;
    /// Base radius: r0, else the s0 multiple of a static model, else the corpus midpoint.
    double base_radius(const WarpedSpace& space) const;
    GraphSurface surface() const;
    GraphSurface surface(const WarpedSpace& space, std::shared_ptr<const SphereGrid> grid) const;

    /// Canonical text (sorted keys, full precision); the hash is FNV-1a 64 of this text.
    std::string canonical() const;
    std::uint64_t hash() const;
    std::string hash_hex() const;

    /// Throws ConfigError: unknown model, theorem/space mismatch, bad controls, or an initial
    /// surface that is not strictly convex.
    void validate() const;
};

std::uint64_t fnv1a64(const std::string& text);

Scenario parse_scenario(std::istream& in);
Scenario parse_scenario_text(const std::string& text);
Scenario load_scenario(const std::string& path);

std::vector<Perturbation> parse_perturbations(const std::string& text);
std::string format_perturbations(const std::vector<Perturbation>& terms);

} // namespace warpstab::lab
