// Command-line harness: identity suite, single-surface reports, flows and amplitude sweeps.
//
// Exit codes: 0 success (including guard stops), 2 configuration error, 3 suite or monitor
// failure, 1 anything else.

#include "warpstab/errors.hpp"
#include "warpstab/lab/runner.hpp"
#include "warpstab/lab/suite.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>

using namespace warpstab;
using nlohmann::json;

namespace {

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("not a number in amplitude list: " + item);
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"warpstab: curvature flows and Minkowski-type deficits in warped products"};
    app.require_subcommand(1);

    std::optional<int> resolution;
    std::string output_dir = "runs";
    std::string profile = "strict";
    std::string fault;
    app.add_option("--resolution", resolution, "Grid resolution (theta nodes); overrides scenarios")
        ->check(CLI::Range(8, 1024));
    app.add_option("--output-dir", output_dir, "Directory for JSONL records and CSV traces");
    app.add_option("--tolerance-profile", profile, "strict or fast")->check(CLI::IsMember({"strict", "fast"}));
    app.add_option("--inject-fault", fault, "Mutation test hook")->check(CLI::IsMember({"conformal-sign"}))->group("");

    auto* check = app.add_subcommand("check", "Run the identity suite");
    std::uint64_t seed = 7;
    check->add_option("--seed", seed, "Corpus seed");

    std::string scenario_path;
    auto* geometry = app.add_subcommand("geometry", "Curvature data of a scenario's initial surface");
    geometry->add_option("--scenario", scenario_path, "Scenario file")->required();
    auto* deficit = app.add_subcommand("deficit", "Deficit and stability report of a scenario's initial surface");
    deficit->add_option("--scenario", scenario_path, "Scenario file")->required();
    auto* flow = app.add_subcommand("flow", "Run the theorem's flow and persist the record");
    flow->add_option("--scenario", scenario_path, "Scenario file")->required();
    auto* sweep = app.add_subcommand("sweep", "Stability-exponent sweep over perturbation amplitudes");
    sweep->add_option("--scenario", scenario_path, "Scenario file")->required();
    std::string amplitudes;
    sweep->add_option("--amplitudes", amplitudes, "Comma-separated amplitudes")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        lab::RunOptions opt;
        opt.resolution = resolution;
        opt.output_dir = output_dir;
        opt.profile = lab::profile_from_string(profile);

        if (*check) {
            lab::SuiteOptions so;
            so.resolution = resolution.value_or(32);
            so.profile = opt.profile;
            so.seed = seed;
            so.fault_conformal_sign = fault == "conformal-sign";
            const auto results = lab::run_identity_suite(so);
            json failures = json::array();
            for (const auto& r : results)
                if (!r.pass) failures.push_back(r.name);
            std::cout << json{{"v", lab::kSchemaVersion}, {"checks", lab::to_json(results)}, {"failures", failures}}.dump(2)
                      << "\n";
            return failures.empty() ? 0 : 3;
        }

        const auto sc = lab::load_scenario(scenario_path);
        if (*geometry) {
            std::cout << lab::geometry_summary(sc, opt).dump(2) << "\n";
            return 0;
        }
        if (*deficit) {
            std::cout << lab::deficit_summary(sc, opt).dump(2) << "\n";
            return 0;
        }
        if (*flow) {
            const auto run = lab::run_flow_scenario(sc, opt);
            auto j = lab::to_json(run.record);
            j["jsonl_path"] = run.jsonl_path;
            j["csv_path"] = run.csv_path;
            std::cout << j.dump(2) << "\n";
            return run.record.all_required_pass() ? 0 : 3;
        }
        if (*sweep) {
            const auto res = lab::run_sweep(sc, parse_list(amplitudes), opt);
            auto j = lab::to_json(res);
            j["csv_path"] = res.csv_path;
            j["json_path"] = res.json_path;
            std::cout << j.dump(2) << "\n";
            return res.bound_holds ? 0 : 3;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
