// Command-line front end: run a config, list builtins, extend sampled data,
// or run the property suite.

#include "hgraph/builtins.hpp"
#include "hgraph/config.hpp"
#include "hgraph/run.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>

using nlohmann::json;

namespace {

struct Overrides {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::string metric;
    std::optional<double> tol;
    std::optional<double> decay;
};

void add_common(CLI::App* app, Overrides& o)
{
    app->add_option("--out", o.out, "Output directory");
    app->add_option("--seed", o.seed, "Run seed (overrides the config)");
    app->add_option("--threads", o.threads, "Worker threads; results do not depend on it");
    app->add_option("--metric", o.metric, "Metric")->check(CLI::IsMember({"infinity", "koranyi", "cc"}));
}

json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw hgraph::ConfigError("config", "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw hgraph::ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
}

hgraph::RunConfig assemble(json j, const Overrides& o)
{
    if (!j.is_object())
        throw hgraph::ConfigError("config", "expected a JSON object");
    if (o.seed)
        j["seed"] = *o.seed;
    if (o.threads)
        j["threads"] = *o.threads;
    if (!o.metric.empty())
        j["metric"] = o.metric;
    if (!o.out.empty())
        j["output_dir"] = o.out;
    if (o.tol || o.decay) {
        json& d = j["differential"];
        if (d.is_null())
            d = json::object();
        if (o.tol)
            d["tol"] = *o.tol;
        if (o.decay)
            d["decay"] = *o.decay;
    }
    try {
        return hgraph::parse_config(j);
    } catch (const json::exception& e) {
        throw hgraph::ConfigError("config", e.what());
    }
}

void print_builtins()
{
    for (const auto& b : hgraph::list_builtins()) {
        std::cout << b.name << "\n";
        std::cout << "  parameters: " << (b.parameters.empty() ? "none" : b.parameters) << "\n";
        std::cout << "  " << b.description << "\n";
        std::cout << "  lipschitz: " << b.lipschitz << "\n";
        std::cout << "  intrinsic lipschitz: " << b.intrinsic_lipschitz << "\n";
        std::cout << "  differentiability: " << b.differentiability << "\n";
        if (b.required_n > 0)
            std::cout << "  requires n = " << b.required_n << "\n";
        if (b.required_k > 0)
            std::cout << "  requires k = " << b.required_k << "\n";
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Intrinsic Lipschitz graphs in Heisenberg groups"};
    app.require_subcommand(1);

    Overrides run_o;
    auto* run = app.add_subcommand("run", "Execute the tasks of a config");
    run->add_option("--config", run_o.config, "Config file (JSON)")->required();
    add_common(run, run_o);
    run->add_option("--tol", run_o.tol, "Differential verdict tolerance");
    run->add_option("--decay", run_o.decay, "Differential residual decay factor");

    app.add_subcommand("builtins", "List built-in functions");

    Overrides ext_o;
    std::string mask_path, values_path;
    double L = 0.0;
    auto* ext = app.add_subcommand("extend", "Extend values from a mask set E to the whole grid");
    ext->add_option("--config", ext_o.config, "Config giving n, splitting and grid")->required();
    ext->add_option("--mask", mask_path, "One 0/1 entry per node in grid order")->required();
    ext->add_option("--values", values_path, "CSV, last column = value, one row per node")->required();
    ext->add_option("--lipschitz", L, "Declared Lipschitz bound; 0 = measured on E");
    add_common(ext, ext_o);

    Overrides ver_o;
    auto* ver = app.add_subcommand("verify", "Run the property suite");
    ver->add_option("--config", ver_o.config, "Optional config");
    add_common(ver, ver_o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("builtins")) {
            print_builtins();
            return hgraph::kExitOk;
        }
        if (app.got_subcommand("run"))
            return hgraph::run(assemble(read_json(run_o.config), run_o), std::cerr);
        if (app.got_subcommand("extend"))
            return hgraph::run_extend_files(assemble(read_json(ext_o.config), ext_o), mask_path, values_path, L,
                                            std::cerr);
        json j = ver_o.config.empty() ? json{{"schema_version", hgraph::kSchemaVersion}, {"seed", 1}}
                                      : read_json(ver_o.config);
        j["tasks"] = {"verify"};
        const int code = hgraph::run(assemble(j, ver_o), std::cerr);
        if (code == hgraph::kExitOk || code == hgraph::kExitTaskFailed) {
            const std::string dir = ver_o.out.empty() ? j.value("output_dir", std::string("out")) : ver_o.out;
            std::ifstream in(dir + "/verify_report.json");
            if (in) {
                const json r = json::parse(in);
                for (const auto& c : r.at("checks"))
                    std::cout << (c.at("pass").get<bool>() ? "PASS " : "FAIL ") << c.at("suite").get<std::string>()
                              << "/" << c.at("name").get<std::string>() << "\n";
            }
        }
        return code;
    } catch (const hgraph::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return hgraph::kExitInvalid;
    }
}
