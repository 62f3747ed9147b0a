#include "hgraph/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace hgraph {

using nlohmann::json;

namespace {

const std::set<std::string> kTasks = {"classify", "differential", "extend", "measure", "verify"};

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> known)
{
    if (!j.is_object())
        throw ConfigError(path.empty() ? "config" : path, "expected an object");
    for (const auto& [key, _] : j.items()) {
        const bool ok = std::any_of(known.begin(), known.end(), [&](const char* k) { return key == k; });
        if (!ok)
            throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
    }
}

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

template <class T>
T read(const json& j, const std::string& path, const char* key, T fallback)
{
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(join(path, key), "has the wrong type");
    }
}

double read_real(const json& j, const std::string& path, const char* key, double fallback)
{
    const double v = read<double>(j, path, key, fallback);
    if (!std::isfinite(v))
        throw ConfigError(join(path, key), "must be finite");
    return v;
}

std::vector<double> read_reals(const json& j, const std::string& path, const char* key, std::vector<double> fallback)
{
    auto v = read<std::vector<double>>(j, path, key, std::move(fallback));
    for (double x : v)
        if (!std::isfinite(x))
            throw ConfigError(join(path, key), "contains a non-finite value");
    return v;
}

SplittingSpec parse_splitting(const json& j)
{
    SplittingSpec s;
    if (j.is_string()) {
        if (j.get<std::string>() != "standard")
            throw ConfigError("splitting", "expected \"standard\" or an object");
        return s;
    }
    reject_unknown(j, "splitting", {"kind", "k", "v_frame", "w_frame"});
    s.kind = read<std::string>(j, "splitting", "kind", "standard");
    s.k = read<int>(j, "splitting", "k", 1);
    s.v_frame = read<Frame>(j, "splitting", "v_frame", {});
    if (j.contains("w_frame"))
        s.w_frame = read<Frame>(j, "splitting", "w_frame", {});
    if (s.kind != "standard" && s.kind != "frames")
        throw ConfigError("splitting.kind", "expected \"standard\" or \"frames\"");
    if (s.kind == "frames" && s.v_frame.empty())
        throw ConfigError("splitting.v_frame", "required for kind \"frames\"");
    return s;
}

FunctionSpec parse_function(const json& j)
{
    FunctionSpec f;
    if (j.is_string()) {
        f.builtin = j.get<std::string>();
        return f;
    }
    reject_unknown(j, "function", {"builtin", "value", "matrix", "vertex", "beta", "bump", "polynomial"});
    f.builtin = read<std::string>(j, "function", "builtin", j.contains("polynomial") ? "polynomial" : "zero");
    f.value = read_reals(j, "function", "value", {});
    f.matrix = read<std::vector<std::vector<double>>>(j, "function", "matrix", {});
    f.vertex = read_reals(j, "function", "vertex", {});
    f.beta = read_real(j, "function", "beta", 1.0);
    f.bump = read_real(j, "function", "bump", 0.1);
    if (j.contains("polynomial")) {
        const json& p = j.at("polynomial");
        if (!p.is_array())
            throw ConfigError("function.polynomial", "expected an array of term lists");
        for (const json& comp : p) {
            if (!comp.is_array())
                throw ConfigError("function.polynomial", "expected an array of term lists");
            std::vector<Monomial> terms;
            for (const json& t : comp) {
                reject_unknown(t, "function.polynomial[]", {"coef", "powers"});
                terms.push_back({read_real(t, "function.polynomial[]", "coef", 0.0),
                                 read<std::vector<int>>(t, "function.polynomial[]", "powers", {})});
            }
            f.polynomial.push_back(std::move(terms));
        }
    }
    if (!find_builtin(f.builtin))
        throw ConfigError("function.builtin", "unknown builtin '" + f.builtin + "'");
    return f;
}

json function_json(const FunctionSpec& f)
{
    json j;
    j["builtin"] = f.builtin;
    if (!f.value.empty())
        j["value"] = f.value;
    if (!f.matrix.empty())
        j["matrix"] = f.matrix;
    if (!f.vertex.empty())
        j["vertex"] = f.vertex;
    j["beta"] = f.beta;
    j["bump"] = f.bump;
    if (!f.polynomial.empty()) {
        json p = json::array();
        for (const auto& comp : f.polynomial) {
            json c = json::array();
            for (const Monomial& m : comp)
                c.push_back({{"coef", m.coef}, {"powers", m.powers}});
            p.push_back(c);
        }
        j["polynomial"] = p;
    }
    return j;
}

}  // namespace

RunConfig parse_config(const json& j)
{
    reject_unknown(j, "",
                   {"schema_version", "n", "splitting", "metric", "cc", "function", "interpolation", "grid", "tasks",
                    "classify", "differential", "extend", "measure", "verify", "seed", "threads", "output_dir"});
    RunConfig c;
    if (!j.contains("schema_version"))
        throw ConfigError("schema_version", "required");
    c.schema_version = read<int>(j, "", "schema_version", 0);
    if (c.schema_version != kSchemaVersion)
        throw ConfigError("schema_version", "unsupported version " + std::to_string(c.schema_version));
    c.n = read<int>(j, "", "n", 1);
    if (c.n < 1 || c.n > kMaxN)
        throw ConfigError("n", "must be in [1, " + std::to_string(kMaxN) + "]");
    if (j.contains("splitting"))
        c.splitting = parse_splitting(j.at("splitting"));
    c.metric = read<std::string>(j, "", "metric", "infinity");
    try {
        Metric::parse(c.metric);
    } catch (const std::invalid_argument&) {
        throw ConfigError("metric", "expected infinity, koranyi or cc");
    }
    if (j.contains("cc")) {
        const json& cc = j.at("cc");
        reject_unknown(cc, "cc", {"segments", "restarts", "iterations", "seed"});
        c.cc.segments = read<int>(cc, "cc", "segments", c.cc.segments);
        c.cc.restarts = read<int>(cc, "cc", "restarts", c.cc.restarts);
        c.cc.iterations = read<int>(cc, "cc", "iterations", c.cc.iterations);
        c.cc.seed = read<std::uint64_t>(cc, "cc", "seed", c.cc.seed);
        try {
            c.cc.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError("cc", e.what());
        }
    }
    if (j.contains("function"))
        c.function = parse_function(j.at("function"));
    c.interpolation = read<std::string>(j, "", "interpolation", "multilinear");
    if (c.interpolation != "multilinear" && c.interpolation != "nearest")
        throw ConfigError("interpolation", "expected multilinear or nearest");
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        if (!g.is_array())
            throw ConfigError("grid", "expected an array of axes");
        for (const json& a : g) {
            reject_unknown(a, "grid[]", {"min", "max", "count"});
            Axis ax{read_real(a, "grid[]", "min", -1.0), read_real(a, "grid[]", "max", 1.0),
                    read<int>(a, "grid[]", "count", 33)};
            if (ax.count < 2)
                throw ConfigError("grid.count", "needs at least 2 nodes per axis");
            if (!(ax.min < ax.max))
                throw ConfigError("grid.min", "needs min < max");
            c.grid.push_back(ax);
        }
    }
    c.tasks = read<std::vector<std::string>>(j, "", "tasks", {});
    for (const auto& t : c.tasks)
        if (!kTasks.count(t))
            throw ConfigError("tasks", "unknown task '" + t + "'");
    if (j.contains("classify")) {
        const json& t = j.at("classify");
        reject_unknown(t, "classify", {"j_max", "radii"});
        c.classify.j_max = read<int>(t, "classify", "j_max", 16);
        c.classify.radii = read_reals(t, "classify", "radii", {});
        if (c.classify.j_max < 1)
            throw ConfigError("classify.j_max", "must be at least 1");
    }
    if (j.contains("differential")) {
        const json& t = j.at("differential");
        reject_unknown(t, "differential", {"base_points", "radii", "tol", "decay", "alphas"});
        c.differential.base_points = read<std::vector<std::vector<double>>>(t, "differential", "base_points", {});
        c.differential.radii = read_reals(t, "differential", "radii", {});
        c.differential.tol = read_real(t, "differential", "tol", 0.05);
        c.differential.decay = read_real(t, "differential", "decay", 1.5);
        c.differential.alphas = read_reals(t, "differential", "alphas", {1.0, 0.5, 0.1});
        if (!(c.differential.tol > 0.0))
            throw ConfigError("differential.tol", "must be positive");
        if (!(c.differential.decay >= 1.0))
            throw ConfigError("differential.decay", "must be at least 1");
    }
    if (j.contains("extend")) {
        const json& t = j.at("extend");
        reject_unknown(t, "extend", {"stride", "L"});
        c.extend.stride = read<int>(t, "extend", "stride", 2);
        c.extend.L = read_real(t, "extend", "L", 0.0);
        if (c.extend.stride < 1)
            throw ConfigError("extend.stride", "must be at least 1");
        if (c.extend.L < 0.0)
            throw ConfigError("extend.L", "must be nonnegative");
    }
    if (j.contains("measure")) {
        const json& t = j.at("measure");
        reject_unknown(t, "measure", {"center", "radii", "samples"});
        c.measure.center = read_reals(t, "measure", "center", {});
        c.measure.radii = read_reals(t, "measure", "radii", c.measure.radii);
        c.measure.samples = read<std::size_t>(t, "measure", "samples", c.measure.samples);
        if (c.measure.samples == 0)
            throw ConfigError("measure.samples", "must be positive");
        for (double r : c.measure.radii)
            if (!(r > 0.0))
                throw ConfigError("measure.radii", "must be positive");
    }
    if (j.contains("verify")) {
        const json& t = j.at("verify");
        reject_unknown(t, "verify", {"samples"});
        c.verify.samples = read<std::size_t>(t, "verify", "samples", c.verify.samples);
        if (c.verify.samples == 0)
            throw ConfigError("verify.samples", "must be positive");
    }
    if (!j.contains("seed"))
        throw ConfigError("seed", "required (runs are never seeded from the clock)");
    c.seed = read<std::uint64_t>(j, "", "seed", 0);
    c.threads = read<unsigned>(j, "", "threads", 1);
    c.output_dir = read<std::string>(j, "", "output_dir", "out");
    return c;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config", "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

json to_json(const RunConfig& c)
{
    json j;
    j["schema_version"] = c.schema_version;
    j["n"] = c.n;
    json s;
    s["kind"] = c.splitting.kind;
    s["k"] = c.splitting.k;
    if (!c.splitting.v_frame.empty())
        s["v_frame"] = c.splitting.v_frame;
    if (c.splitting.w_frame)
        s["w_frame"] = *c.splitting.w_frame;
    j["splitting"] = s;
    j["metric"] = c.metric;
    j["cc"] = {{"segments", c.cc.segments},
               {"restarts", c.cc.restarts},
               {"iterations", c.cc.iterations},
               {"seed", c.cc.seed}};
    j["function"] = function_json(c.function);
    j["interpolation"] = c.interpolation;
    json g = json::array();
    for (const Axis& a : c.grid)
        g.push_back({{"min", a.min}, {"max", a.max}, {"count", a.count}});
    j["grid"] = g;
    j["tasks"] = c.tasks;
    j["classify"] = {{"j_max", c.classify.j_max}, {"radii", c.classify.radii}};
    j["differential"] = {{"base_points", c.differential.base_points},
                         {"radii", c.differential.radii},
                         {"tol", c.differential.tol},
                         {"decay", c.differential.decay},
                         {"alphas", c.differential.alphas}};
    j["extend"] = {{"stride", c.extend.stride}, {"L", c.extend.L}};
    j["measure"] = {{"center", c.measure.center}, {"radii", c.measure.radii}, {"samples", c.measure.samples}};
    j["verify"] = {{"samples", c.verify.samples}};
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    j["output_dir"] = c.output_dir;
    return j;
}

Splitting build_splitting(const RunConfig& c)
{
    try {
        if (c.splitting.kind == "standard")
            return Splitting::standard(c.n, c.splitting.k);
        return Splitting::from_frames(c.n, c.splitting.v_frame, c.splitting.w_frame);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("splitting", e.what());
    }
}

Grid build_grid(const RunConfig& c, const Splitting& s)
{
    std::vector<Axis> axes = c.grid;
    if (axes.empty())
        axes.assign(s.w_dim(), Axis{-1.0, 1.0, 33});
    if (static_cast<int>(axes.size()) != s.w_dim())
        throw ConfigError("grid", "expected " + std::to_string(s.w_dim()) + " axes (W coordinates), got " +
                                      std::to_string(axes.size()));
    try {
        return Grid(std::move(axes));
    } catch (const std::invalid_argument& e) {
        throw ConfigError("grid", e.what());
    }
}

RunContext build_context(const RunConfig& c)
{
    Splitting s = build_splitting(c);
    Metric m = Metric::parse(c.metric);
    if (m.kind() == MetricKind::CarnotCaratheodory)
        m = Metric::carnot_caratheodory(c.cc);
    Grid g = build_grid(c, s);
    const Evaluator eval = make_function(c.function, s, m);
    const Interpolation interp = c.interpolation == "nearest" ? Interpolation::Nearest : Interpolation::Multilinear;
    SampledFunction f = [&] {
        try {
            return SampledFunction::sample(s, g, eval, interp);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("function", e.what());
        }
    }();
    return RunContext{s, m, std::move(f)};
}

}  // namespace hgraph
