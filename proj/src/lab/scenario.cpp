#include "warpstab/lab/scenario.hpp"

#include "warpstab/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace warpstab::lab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double x = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("key '" + key + "': not a number: " + v);
    return x;
}

long long to_int(const std::string& key, const std::string& v) {
    long long x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("key '" + key + "': not an integer: " + v);
    return x;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

bool is_static(const std::string& model) { return model == "ads_schwarzschild" || model == "rn_ads"; }

} // namespace

const char* to_string(Profile p) { return p == Profile::Strict ? "strict" : "fast"; }

Profile profile_from_string(const std::string& name) {
    if (name == "strict") return Profile::Strict;
    if (name == "fast") return Profile::Fast;
    throw ConfigError("unknown tolerance profile: " + name);
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<Perturbation> parse_perturbations(const std::string& text) {
    std::vector<Perturbation> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        std::vector<std::string> parts;
        std::stringstream is(item);
        std::string p;
        while (std::getline(is, p, ':')) parts.push_back(trim(p));
        if (parts.size() < 2 || parts.size() > 3) throw ConfigError("perturbation must be l:amplitude[:m], got " + item);
        Perturbation t;
        t.l = static_cast<int>(to_int("perturbation", parts[0]));
        t.amplitude = to_double("perturbation", parts[1]);
        if (parts.size() == 3) t.m = static_cast<int>(to_int("perturbation", parts[2]));
        if (t.l < 0 || t.m < 0 || t.m > t.l) throw ConfigError("perturbation degree out of range: " + item);
        out.push_back(t);
    }
    return out;
}

std::string format_perturbations(const std::vector<Perturbation>& terms) {
    std::string out;
    for (const auto& t : terms) {
        if (!out.empty()) out += ",";
        out += std::to_string(t.l) + ":" + num(t.amplitude);
        if (t.m != 0) out += ":" + std::to_string(t.m);
    }
    return out;
}

Scenario parse_scenario(std::istream& in) {
    Scenario sc;
    std::string line;
    int lineno = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
        if (seen[key]++) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        if (key == "name") sc.name = v;
        else if (key == "model") sc.model = v;
        else if (key == "n") sc.n = static_cast<int>(to_int(key, v));
        else if (key == "alpha") sc.alpha = to_double(key, v);
        else if (key == "beta") sc.beta = to_double(key, v);
        else if (key == "mass") sc.mass = to_double(key, v);
        else if (key == "charge") sc.charge = to_double(key, v);
        else if (key == "kappa") sc.kappa = to_double(key, v);
        else if (key == "dim") sc.dim = static_cast<int>(to_int(key, v));
        else if (key == "r0") sc.r0 = v == "-" ? std::nullopt : std::optional<double>(to_double(key, v));  // "-": unset
        else if (key == "s0_multiple") sc.s0_multiple = v == "-" ? std::nullopt : std::optional<double>(to_double(key, v));
        else if (key == "perturbation") sc.perturbations = parse_perturbations(v);
        else if (key == "theorem") sc.theorem = v;
        else if (key == "flow") sc.flow = flow_kind_from_string(v);
        else if (key == "t_max") sc.t_max = to_double(key, v);
        else if (key == "dt_max") sc.dt_max = to_double(key, v);
        else if (key == "cfl") sc.cfl = to_double(key, v);
        else if (key == "tol_umbilic") sc.tol_umbilic = to_double(key, v);
        else if (key == "monitor_every") sc.monitor_every = static_cast<int>(to_int(key, v));
        else if (key == "max_steps") sc.max_steps = static_cast<int>(to_int(key, v));
        else if (key == "resolution") sc.resolution = static_cast<int>(to_int(key, v));
        else if (key == "n_phi") sc.n_phi = static_cast<int>(to_int(key, v));
        else if (key == "grid") sc.grid = v;
        else if (key == "seed") sc.seed = static_cast<std::uint64_t>(to_int(key, v));
        else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return sc;
}

Scenario parse_scenario_text(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in);
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path);
    return parse_scenario(in);
}

FlowKind Scenario::flow_kind() const {
    if (flow) return *flow;
    const Theorem th = theorem_id();
    return th == Theorem::T1 || th == Theorem::T2 ? FlowKind::Constrained : FlowKind::IMCF;
}

FlowControls Scenario::controls() const {
    FlowControls c;
    c.flow_kind = flow_kind();
    c.t_max = t_max;
    c.dt_max = dt_max;
    c.cfl = cfl;
    c.tol_umbilic = tol_umbilic;
    c.monitor_every = monitor_every;
    c.max_steps = max_steps;
    c.theorem = theorem_id();
    // IMCF expands forever; its runs stop at t_max.
    c.stop_when_umbilic = c.flow_kind == FlowKind::Constrained;
    return c;
}

WarpedSpace Scenario::space() const {
    if (model == "flat") return WarpedSpace::flat(n);
    if (model == "hyperbolic") return WarpedSpace::hyperbolic(n);
    if (model == "alpha_beta") return WarpedSpace::alpha_beta(alpha, beta, n);
    if (model == "ads_schwarzschild") return WarpedSpace::from_static(StaticModel::ads_schwarzschild(mass, dim));
    if (model == "rn_ads") return WarpedSpace::from_static(StaticModel::rn_ads(mass, charge, kappa, dim));
    throw ConfigError("unknown model: " + model);
}

std::shared_ptr<const SphereGrid> Scenario::make_grid() const {
    const int fiber = is_static(model) ? dim - 1 : n;
    if (grid == "axisym") return std::make_shared<const SphereGrid>(SphereGrid::axisym(fiber, resolution));
    if (grid == "full") {
        if (fiber != 2) throw ConfigError("full grids exist for n = 2 only");
        return std::make_shared<const SphereGrid>(SphereGrid::full(resolution, n_phi > 0 ? n_phi : 2 * resolution));
    }
    throw ConfigError("unknown grid mode: " + grid);
}

double Scenario::base_radius(const WarpedSpace& w) const {
    if (r0) return *r0;
    if (s0_multiple) {
        if (!w.static_model()) throw ConfigError("s0_multiple needs a static model");
        return w.r_of_s(*s0_multiple * w.static_model()->s0);
    }
    const auto [lo, hi] = corpus_radius_range(w);
    return 0.5 * (lo + hi);
}

GraphSurface Scenario::surface(const WarpedSpace& w, std::shared_ptr<const SphereGrid> g) const {
    return perturbed_slice(std::move(g), w, base_radius(w), perturbations);
}

GraphSurface Scenario::surface() const { return surface(space(), make_grid()); }

std::string Scenario::canonical() const {
    std::map<std::string, std::string> kv{
        {"name", name},
        {"model", model},
        {"n", std::to_string(n)},
        {"alpha", num(alpha)},
        {"beta", num(beta)},
        {"mass", num(mass)},
        {"charge", num(charge)},
        {"kappa", num(kappa)},
        {"dim", std::to_string(dim)},
        {"r0", r0 ? num(*r0) : "-"},
        {"s0_multiple", s0_multiple ? num(*s0_multiple) : "-"},
        {"perturbation", format_perturbations(perturbations)},
        {"theorem", theorem},
        {"flow", to_string(flow_kind())},
        {"t_max", num(t_max)},
        {"dt_max", num(dt_max)},
        {"cfl", num(cfl)},
        {"tol_umbilic", num(tol_umbilic)},
        {"monitor_every", std::to_string(monitor_every)},
        {"max_steps", std::to_string(max_steps)},
        {"resolution", std::to_string(resolution)},
        {"n_phi", std::to_string(n_phi)},
        {"grid", grid},
        {"seed", std::to_string(seed)},
    };
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

std::uint64_t Scenario::hash() const { return fnv1a64(canonical()); }

std::string Scenario::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
    return buf;
}

void Scenario::validate() const {
    const Theorem th = theorem_id();
    if (th == Theorem::T45 && !is_static(model)) throw ConfigError("theorem " + theorem + " needs a static model");
    if (th != Theorem::T45 && is_static(model))
        throw ConfigError("static models pair with T4/T5, got " + theorem);
    if (th == Theorem::T3 && model != "alpha_beta") throw ConfigError("T3 needs an alpha_beta space");
    if (theorem == "T4" && model != "rn_ads") throw ConfigError("T4 is stated for rn_ads");
    if (theorem == "T5" && model != "ads_schwarzschild") throw ConfigError("T5 is stated for ads_schwarzschild");
    if (resolution < 8) throw ConfigError("resolution must be >= 8");
    controls().validate();
    const auto s = surface();
    const double margin = convexity_margin(geometry_intrinsic(s));
    if (!(margin > 0.0))
        throw ConfigError("initial surface is not strictly convex (margin " + num(margin) + "); reduce the amplitudes");
}

} // namespace warpstab::lab
