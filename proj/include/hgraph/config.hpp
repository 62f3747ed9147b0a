#pragma once

// Run configuration and its JSON form.

#include "hgraph/builtins.hpp"
#include "hgraph/function.hpp"
#include "hgraph/metrics.hpp"
#include "hgraph/splitting.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hgraph {

inline constexpr int kSchemaVersion = 1;

struct SplittingSpec {
    std::string kind = "standard";  ///< "standard" or "frames"
    int k = 1;
    Frame v_frame;
    std::optional<Frame> w_frame;

    bool operator==(const SplittingSpec&) const = default;
};

struct ClassifyTask {
    int j_max = 16;
    std::vector<double> radii;  ///< profile radii; empty = labels only

    bool operator==(const ClassifyTask&) const = default;
};

struct DifferentialTask {
    std::vector<std::vector<double>> base_points;  ///< W coordinates; empty = the node nearest the grid center
    std::vector<double> radii;                     ///< empty = default schedule
    double tol = 0.05;
    double decay = 1.5;
    std::vector<double> alphas{1.0, 0.5, 0.1};

    bool operator==(const DifferentialTask&) const = default;
};

struct ExtendTask {
    int stride = 2;    ///< E = nodes whose grid indices are all multiples of stride
    double L = 0.0;    ///< declared Lipschitz bound; 0 = measured constant on E

    bool operator==(const ExtendTask&) const = default;
};

struct MeasureTask {
    std::vector<double> center;  ///< W coordinates of the base of the graph point; empty = origin
    std::vector<double> radii{0.05, 0.1, 0.2, 0.4};
    std::size_t samples = 100000;

    bool operator==(const MeasureTask&) const = default;
};

struct VerifyTask {
    std::size_t samples = 2000;  ///< random samples per algebraic property

    bool operator==(const VerifyTask&) const = default;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    int n = 1;
    SplittingSpec splitting;
    std::string metric = "infinity";
    CcParams cc;
    FunctionSpec function;
    std::string interpolation = "multilinear";
    std::vector<Axis> grid;  ///< empty = [-1, 1] with 33 nodes per W axis
    std::vector<std::string> tasks;
    ClassifyTask classify;
    DifferentialTask differential;
    ExtendTask extend;
    MeasureTask measure;
    VerifyTask verify;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string output_dir = "out";

    bool operator==(const RunConfig&) const = default;
};

/// Parses and validates; throws ConfigError naming the offending field.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json to_json(const RunConfig& c);

/// Objects built from a validated config.
struct RunContext {
    Splitting splitting;
    Metric metric;
    SampledFunction function;
};

RunContext build_context(const RunConfig& c);

Splitting build_splitting(const RunConfig& c);
Grid build_grid(const RunConfig& c, const Splitting& s);

}  // namespace hgraph
