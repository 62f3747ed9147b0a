#pragma once

// Registry of analytic test functions W -> V.

#include "hgraph/function.hpp"
#include "hgraph/metrics.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hgraph {

/// Validation failure that names the offending configuration field.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& message)
        : std::invalid_argument(field + ": " + message), field_(std::move(field))
    {
    }
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct Monomial {
    double coef = 0.0;
    std::vector<int> powers;  ///< one exponent per W coordinate

    bool operator==(const Monomial&) const = default;
};

struct FunctionSpec {
    std::string builtin = "zero";  ///< registry name, or "polynomial"
    std::vector<double> value;                  ///< constant: k entries
    std::vector<std::vector<double>> matrix;    ///< intrinsic_linear, bump_linear: k rows of 2n - k
    std::vector<double> vertex;                 ///< cone_boundary: (x, y, t), 2n + 1 entries
    double beta = 1.0;                          ///< cone_boundary opening
    double bump = 0.1;                          ///< bump_linear amplitude
    std::vector<std::vector<Monomial>> polynomial;  ///< one term list per V coordinate

    bool operator==(const FunctionSpec&) const = default;
};

struct BuiltinInfo {
    std::string name;
    std::string parameters;
    std::string description;
    std::string lipschitz;          ///< analytic intrinsic Lipschitz status
    std::string differentiability; ///< analytic status at the origin
    bool intrinsic_lipschitz = false;  ///< on bounded domains
    int required_n = 0;  ///< 0 = any
    int required_k = 0;  ///< 0 = any
};

const std::vector<BuiltinInfo>& list_builtins();

/// nullptr when the name is unknown.
const BuiltinInfo* find_builtin(std::string_view name);

/// Builds the evaluator, validating parameters against the splitting. Throws ConfigError.
Evaluator make_function(const FunctionSpec& spec, const Splitting& s, const Metric& metric);

}  // namespace hgraph
