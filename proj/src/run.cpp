#include "hgraph/run.hpp"

#include "hgraph/diff.hpp"
#include "hgraph/extension.hpp"
#include "hgraph/graph.hpp"
#include "hgraph/measure.hpp"
#include "hgraph/rng.hpp"
#include "hgraph/verify.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace hgraph {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::vector<std::string> coordinate_names(const Splitting& s)
{
    std::vector<std::string> names;
    if (s.is_standard()) {
        for (int i = s.k(); i < s.n(); ++i)
            names.push_back("x" + std::to_string(i + 1));
        for (int i = 0; i < s.n(); ++i)
            names.push_back("y" + std::to_string(i + 1));
    } else {
        for (int i = 0; i < s.w_horizontal_dim(); ++i)
            names.push_back("w" + std::to_string(i + 1));
    }
    names.push_back("t");
    return names;
}

json number(double v)
{
    if (std::isfinite(v))
        return v;
    return format_double(v);
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_json(const fs::path& path, const json& j)
{
    write_text(path, j.dump(2) + "\n");
}

std::string coords_csv(const std::vector<double>& w)
{
    std::string s;
    for (double v : w)
        s += format_double(v) + ",";
    return s;
}

struct TaskOutput {
    std::vector<std::string> files;
};

TaskOutput task_classify(const RunConfig& c, const RunContext& ctx, const fs::path& dir)
{
    const SampledFunction& f = ctx.function;
    const ScanOptions opt{true, c.threads};
    const LipReport rep = classify_stepanov(f, ctx.metric, c.classify.j_max, c.classify.radii, opt);

    std::ostringstream csv;
    csv << "node,";
    for (const auto& n : coordinate_names(ctx.splitting))
        csv << n << ",";
    csv << "label";
    for (double r : rep.radii)
        csv << ",lip_r=" << format_double(r);
    csv << "\n";
    std::size_t active = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!f.active(i))
            continue;
        ++active;
        csv << i << "," << coords_csv(f.grid().coords(i)) << (rep.labels[i] > 0 ? std::to_string(rep.labels[i]) : "none");
        for (std::size_t r = 0; r < rep.radii.size(); ++r)
            csv << "," << format_double(rep.profile(i, r));
        csv << "\n";
    }
    write_text(dir / "classify.csv", csv.str());

    json cells = json::array();
    std::vector<int> js;
    for (int j = 1; j < c.classify.j_max; j *= 2)
        js.push_back(j);
    js.push_back(c.classify.j_max);
    for (int j : js) {
        const auto part = stepanov_cells(f, ctx.metric, rep, j);
        std::size_t members = 0;
        for (const auto& cell : part)
            members += cell.size();
        double worst = 0.0;
        bool infinite = false;
        for (const auto& l : cell_lipschitz_constants(f, ctx.metric, part, opt)) {
            worst = std::max(worst, l.infinite ? worst : l.constant);
            infinite = infinite || l.infinite;
        }
        cells.push_back({{"j", j},
                         {"members", members},
                         {"cells", part.size()},
                         {"max_cell_lipschitz", number(worst)},
                         {"any_cell_infinite", infinite}});
    }
    json s;
    s["global_constant"] = number(rep.global.constant);
    s["global_infinite"] = rep.global.infinite;
    s["argmax_pair"] = {rep.global.from, rep.global.to};
    s["j_max"] = rep.j_max;
    s["active_nodes"] = active;
    s["labeled_nodes"] = rep.labeled_count();
    s["labeled_fraction"] = active ? static_cast<double>(rep.labeled_count()) / active : 0.0;
    s["limsup_radius"] = profile_floor_radius(f);
    s["stepanov_cells"] = cells;
    s["note"] = "labels hold up to j_max and grid resolution; they are not a certificate";
    write_json(dir / "classify_summary.json", s);
    return {{"classify.csv", "classify_summary.json"}};
}

TaskOutput task_differential(const RunConfig& c, const RunContext& ctx, const fs::path& dir)
{
    const SampledFunction& f = ctx.function;
    const Splitting& s = ctx.splitting;
    std::vector<std::size_t> nodes;
    if (c.differential.base_points.empty()) {
        std::vector<double> mid;
        for (const Axis& a : f.grid().axes())
            mid.push_back(0.5 * (a.min + a.max));
        nodes.push_back(*f.grid().nearest(mid));
    }
    for (std::size_t b = 0; b < c.differential.base_points.size(); ++b) {
        const auto& p = c.differential.base_points[b];
        if (static_cast<int>(p.size()) != s.w_dim())
            throw ConfigError("differential.base_points", "expected " + std::to_string(s.w_dim()) + " coordinates");
        const auto node = f.grid().nearest(p);
        if (!node || !f.active(*node))
            throw ConfigError("differential.base_points", "point outside the active domain");
        nodes.push_back(*node);
    }
    DiffOptions opt;
    opt.radii = c.differential.radii;
    opt.tol = c.differential.tol;
    opt.decay = c.differential.decay;
    const std::vector<double> radii = opt.radii.empty() ? default_radii(f) : opt.radii;

    std::ostringstream csv;
    csv << "node,";
    for (const auto& n : coordinate_names(s))
        csv << n << ",";
    csv << "verdict";
    for (int r = 0; r < s.k(); ++r)
        for (int col = 0; col < s.w_horizontal_dim(); ++col)
            csv << ",M" << r + 1 << "_" << col + 1;
    for (double r : radii)
        csv << ",residual_r=" << format_double(r);
    for (double a : c.differential.alphas)
        csv << ",r_alpha=" << format_double(a);
    csv << ",interpolation_error,diagnostic\n";

    for (std::size_t node : nodes) {
        csv << node << "," << coords_csv(f.grid().coords(node));
        DiffEstimate e;
        try {
            e = estimate_differential(f, ctx.metric, node, opt);
        } catch (const std::domain_error& err) {
            e.verdict = Verdict::Inconclusive;
            e.diagnostic = err.what();
        }
        csv << verdict_name(e.verdict);
        for (int r = 0; r < s.k(); ++r)
            for (int col = 0; col < s.w_horizontal_dim(); ++col)
                csv << "," << (e.matrix.size() ? format_double(e.matrix(r, col)) : "nan");
        for (std::size_t i = 0; i < radii.size(); ++i)
            csv << "," << (i < e.residuals.size() ? format_double(e.residuals[i]) : "nan");
        std::vector<ConeRadius> cones;
        if (e.verdict != Verdict::Fails && e.matrix.size()) {
            try {
                const TangentSubgroup t = tangent_subgroup(e, s, derive_seed(c.seed, "tangent"));
                cones = verify_cone_characterization(f, ctx.metric, node, t, c.differential.alphas);
            } catch (const std::runtime_error& err) {
                e.diagnostic += std::string(e.diagnostic.empty() ? "" : "; ") + err.what();
            }
        }
        for (std::size_t a = 0; a < c.differential.alphas.size(); ++a) {
            if (a >= cones.size())
                csv << ",n/a";
            else if (cones[a].full_grid)
                csv << ",full";
            else if (!cones[a].radius)
                csv << ",none";
            else
                csv << "," << format_double(*cones[a].radius);
        }
        std::string diag = e.diagnostic;
        std::replace(diag.begin(), diag.end(), '"', '\'');
        csv << "," << format_double(e.interpolation_error) << ",\"" << diag << "\"\n";
    }
    write_text(dir / "differential.csv", csv.str());
    return {{"differential.csv"}};
}

void write_extension(const SampledFunction& f, const ExtensionResult& r, const Splitting& s, const fs::path& dir)
{
    std::ostringstream csv;
    csv << "node,";
    for (const auto& n : coordinate_names(s))
        csv << n << ",";
    csv << "phi,eta,psi,in_E,equal\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        csv << i << "," << coords_csv(f.grid().coords(i)) << (f.active(i) ? format_double(f.value(i)[0]) : "nan")
            << "," << format_double(r.upper.value(i)[0]) << "," << format_double(r.lower.value(i)[0]) << ","
            << int(r.subset[i]) << "," << int(r.equality_set[i]) << "\n";
    }
    write_text(dir / "extension.csv", csv.str());
    std::size_t members = 0, equal = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        members += r.subset[i];
        equal += r.equality_set[i];
    }
    json s_;
    s_["declared_L"] = r.declared_L;
    s_["subset_nodes"] = members;
    s_["equality_nodes"] = equal;
    s_["lip_on_E"] = number(r.subset_lip.constant);
    s_["lip_eta"] = number(r.upper_lip.constant);
    s_["lip_psi"] = number(r.lower_lip.constant);
    write_json(dir / "extension_summary.json", s_);
}

TaskOutput task_extend(const RunConfig& c, const RunContext& ctx, const fs::path& dir)
{
    const SampledFunction& f = ctx.function;
    std::vector<std::uint8_t> e(f.size());
    std::vector<int> mi(f.domain_dim());
    for (std::size_t i = 0; i < f.size(); ++i) {
        f.grid().multi_index(i, mi);
        e[i] = f.active(i) && std::all_of(mi.begin(), mi.end(), [&](int v) { return v % c.extend.stride == 0; });
    }
    const ScanOptions opt{true, c.threads};
    double L = c.extend.L;
    if (L == 0.0) {
        const LipschitzResult lr = lipschitz_constant(f, ctx.metric, e, opt);
        if (lr.infinite)
            throw std::runtime_error("function has no finite Lipschitz constant on E");
        L = lr.constant > 0.0 ? lr.constant : 1.0;
    }
    const ExtensionResult r = mcshane_extend(f, e, L, ctx.metric, opt);
    write_extension(f, r, ctx.splitting, dir);
    return {{"extension.csv", "extension_summary.json"}};
}

TaskOutput task_measure(const RunConfig& c, const RunContext& ctx, const fs::path& dir)
{
    const SampledFunction& f = ctx.function;
    std::vector<double> center = c.measure.center;
    if (center.empty())
        center.assign(ctx.splitting.w_dim(), 0.0);
    if (static_cast<int>(center.size()) != ctx.splitting.w_dim())
        throw ConfigError("measure.center", "expected " + std::to_string(ctx.splitting.w_dim()) + " coordinates");
    Point p(ctx.splitting.n());
    try {
        p = f.graph_point(center);
    } catch (const std::out_of_range&) {
        throw ConfigError("measure.center", "outside the active domain");
    }
    const MeasureOptions opt{c.measure.samples, derive_seed(c.seed, "measure"), c.threads};
    const AhlforsProfile a = ahlfors_profile(f, ctx.metric, p, c.measure.radii, opt);
    std::ostringstream csv;
    csv << "radius,estimate,stderr,ratio,ratio_stderr,hits,enlarged\n";
    for (std::size_t i = 0; i < a.radii.size(); ++i) {
        const MeasureEstimate& e = a.estimates[i];
        csv << format_double(a.radii[i]) << "," << format_double(e.estimate) << "," << format_double(e.stderr_) << ","
            << format_double(a.ratios[i]) << "," << format_double(a.ratio_stderr[i]) << "," << e.hits << ","
            << int(e.enlarged) << "\n";
    }
    write_text(dir / "measure.csv", csv.str());
    return {{"measure.csv"}};
}

TaskOutput task_verify(const RunConfig& c, const fs::path& dir, bool& failed)
{
    const VerifyReport r = run_verify_suite(c);
    write_json(dir / "verify_report.json", r.to_json(c.seed));
    failed = r.failed() > 0;
    return {{"verify_report.json"}};
}

std::string utc_now()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

}  // namespace

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

int run(const RunConfig& config, std::ostream& log)
{
    const auto start = std::chrono::steady_clock::now();
    const std::string started = utc_now();
    std::optional<RunContext> ctx;
    try {
        if (std::find(config.tasks.begin(), config.tasks.end(), "extend") != config.tasks.end() &&
            config.splitting.k != 1)
            throw ConfigError("tasks", "extend needs a splitting with k = 1");
        ctx.emplace(build_context(config));
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kExitInvalid;
    }

    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        log << "error: output_dir: cannot create " << dir << ": " << ec.message() << "\n";
        return kExitInvalid;
    }

    int code = kExitOk;
    json tasks = json::array();
    json seeds;
    seeds["run"] = config.seed;
    for (const std::string& name : config.tasks) {
        const auto t0 = std::chrono::steady_clock::now();
        json entry;
        entry["task"] = name;
        try {
            TaskOutput out;
            bool verify_failed = false;
            if (name == "classify")
                out = task_classify(config, *ctx, dir);
            else if (name == "differential")
                out = task_differential(config, *ctx, dir);
            else if (name == "extend")
                out = task_extend(config, *ctx, dir);
            else if (name == "measure") {
                seeds["measure"] = derive_seed(config.seed, "measure");
                out = task_measure(config, *ctx, dir);
            } else if (name == "verify")
                out = task_verify(config, dir, verify_failed);
            entry["files"] = out.files;
            entry["status"] = verify_failed ? "checks failed" : "ok";
            if (verify_failed) {
                log << "verify: some property checks failed; see verify_report.json\n";
                code = kExitTaskFailed;
            }
        } catch (const ConfigError& e) {
            log << "error: " << e.what() << "\n";
            entry["status"] = std::string("invalid: ") + e.what();
            code = kExitInvalid;
        } catch (const std::exception& e) {
            log << "error: task " << name << " failed: " << e.what() << "\n";
            entry["status"] = std::string("failed: ") + e.what();
            code = kExitTaskFailed;
        }
        entry["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        tasks.push_back(entry);
        if (code != kExitOk)
            break;
    }

    json manifest;
    manifest["tool"] = "hgraph";
    manifest["version"] = kVersion;
    manifest["started_at"] = started;
    manifest["config"] = to_json(config);
    manifest["seeds"] = seeds;
    manifest["tasks"] = tasks;
    manifest["exit_code"] = code;
    manifest["wall_time_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    try {
        write_json(dir / "manifest.json", manifest);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitTaskFailed;
    }
    return code;
}

int run_extend_files(const RunConfig& config, const std::string& mask_path, const std::string& values_path, double L,
                     std::ostream& log)
{
    try {
        if (config.splitting.k != 1)
            throw ConfigError("splitting.k", "extend needs k = 1");
        const Splitting s = build_splitting(config);
        Metric m = Metric::parse(config.metric);
        if (m.kind() == MetricKind::CarnotCaratheodory)
            m = Metric::carnot_caratheodory(config.cc);
        const Grid g = build_grid(config, s);

        std::ifstream mask_in(mask_path);
        if (!mask_in)
            throw ConfigError("mask", "cannot open " + mask_path);
        std::vector<std::uint8_t> mask;
        int v;
        while (mask_in >> v) {
            if (v != 0 && v != 1)
                throw ConfigError("mask", "entries must be 0 or 1");
            mask.push_back(static_cast<std::uint8_t>(v));
        }
        if (mask.size() != g.size())
            throw ConfigError("mask", "expected " + std::to_string(g.size()) + " entries, got " +
                                          std::to_string(mask.size()));

        std::ifstream values_in(values_path);
        if (!values_in)
            throw ConfigError("values", "cannot open " + values_path);
        std::vector<double> values;
        std::string line;
        while (std::getline(values_in, line)) {
            if (line.empty())
                continue;
            const auto comma = line.find_last_of(',');
            const std::string last = comma == std::string::npos ? line : line.substr(comma + 1);
            double x = 0.0;
            const auto res = std::from_chars(last.data(), last.data() + last.size(), x);
            if (res.ec != std::errc()) {
                if (values.empty())
                    continue;  // header
                throw ConfigError("values", "unreadable value '" + last + "'");
            }
            if (!std::isfinite(x))
                throw ConfigError("values", "non-finite value");
            values.push_back(x);
        }
        if (values.size() != g.size())
            throw ConfigError("values", "expected " + std::to_string(g.size()) + " rows, got " +
                                            std::to_string(values.size()));
        const Interpolation interp =
            config.interpolation == "nearest" ? Interpolation::Nearest : Interpolation::Multilinear;
        const SampledFunction f(s, g, Orientation::WtoV, interp, values);
        if (!(L >= 0.0))
            throw ConfigError("L", "must be nonnegative");
        const ScanOptions opt{true, config.threads};
        if (L == 0.0) {
            const LipschitzResult lr = lipschitz_constant(f, m, mask, opt);
            if (lr.infinite) {
                log << "error: values have no finite Lipschitz constant on E\n";
                return kExitTaskFailed;
            }
            L = lr.constant > 0.0 ? lr.constant : 1.0;
        }
        const fs::path dir(config.output_dir);
        fs::create_directories(dir);
        const ExtensionResult r = mcshane_extend(f, mask, L, m, opt);
        write_extension(f, r, s, dir);
        return kExitOk;
    } catch (const ConfigError& e) {
        log << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const LipschitzViolation& e) {
        log << "error: " << e.what() << "\n";
        return kExitTaskFailed;
    } catch (const std::invalid_argument& e) {
        log << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitTaskFailed;
    }
}

}  // namespace hgraph
