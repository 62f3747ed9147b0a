#pragma once

// Property suite covering every module; used by the `verify` task.

#include "hgraph/config.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace hgraph {

struct Check {
    std::string suite;
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    std::string relation;  ///< how value is compared with threshold: "<", "<=", "==", ">=" or ">"
    bool pass = false;
};

struct VerifyReport {
    std::vector<Check> checks;

    std::size_t failed() const;
    nlohmann::json to_json(std::uint64_t seed) const;
};

/// Runs all property checks. Sample sizes scale with config.verify.samples;
/// every random draw derives from config.seed, so the report depends only on
/// the seed and the sample count.
VerifyReport run_verify_suite(const RunConfig& config);

}  // namespace hgraph
