#pragma once

#include "warpstab/lab/scenario.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace warpstab::lab {

struct SuiteOptions {
    int resolution = 32;
    Profile profile = Profile::Strict;
    std::uint64_t seed = 7;
    bool fault_conformal_sign = false;  // mutation test of the conformal path
};

struct CheckResult {
    std::string name;
    bool pass = true;
    double value = 0.0;      // worst observed residual
    double tolerance = 0.0;
    std::string detail;
};

/// Tolerances per resolution: identities converge spectrally, so coarse grids get looser bounds.
///   resolution >= 32: 1e-8     24..31: 1e-7     16..23: 1e-5     below 16: 1e-3
double suite_tolerance(int resolution);

/// Dual-path agreement, Minkowski residuals, slice fixed points, static identities, the
/// slice phi' identity and record schema round trips over the catalog spaces.
std::vector<CheckResult> run_identity_suite(const SuiteOptions& opt = {});

nlohmann::json to_json(const std::vector<CheckResult>& results);

} // namespace warpstab::lab
