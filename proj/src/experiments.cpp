#include "plap/experiments.hpp"

#include "plap/calculus.hpp"
#include "plap/continuation.hpp"
#include "plap/inequality_lab.hpp"
#include "plap/io.hpp"
#include "plap/oracle_minimizer.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace plap {

namespace {

template <class T>
void read_key(const nlohmann::json& doc, const char* key, T& target)
{
    if (!doc.contains(key)) {
        return;
    }
    try {
        target = doc.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

double order(double e_coarse, double e_fine, double h_coarse, double h_fine)
{
    if (!(e_coarse > 0.0) || !(e_fine > 0.0)) {
        return std::nan("");
    }
    return std::log(e_coarse / e_fine) / std::log(h_coarse / h_fine);
}

std::vector<int> parse_grids(const std::string& text)
{
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int m = std::stoi(item, &used);
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
            out.push_back(m);
        } catch (const std::exception&) {
            throw ConfigError("bad grid list '" + text + "'");
        }
    }
    return out;
}

} // namespace

nlohmann::json to_json(const ExperimentConfig& cfg)
{
    return {{"dims", cfg.dims},
            {"grids", cfg.grids},
            {"extents", cfg.extents},
            {"components", cfg.components},
            {"solver", to_json(cfg.solver)},
            {"source",
             {{"kind", cfg.source.kind},
              {"amplitude", cfg.source.amplitude},
              {"index", cfg.source.index},
              {"path", cfg.source.path}}},
            {"constants",
             {{"samples", cfg.constants_samples},
              {"ascent_steps", cfg.constants_ascent},
              {"qs", cfg.constants_qs},
              {"path", cfg.constants_path}}},
            {"oracle", {{"tol", cfg.oracle_tol}, {"max_iters", cfg.oracle_max_iters}}},
            {"continuation", {{"schedule", cfg.mu_schedule}}},
            {"inequalities",
             {{"samples", cfg.inequality_samples},
              {"p_list", cfg.inequality_p},
              {"tensor_mu", cfg.tensor_mu},
              {"bound_mu", cfg.bound_mu}}},
            {"seed", cfg.seed},
            {"out", cfg.out}};
}

ExperimentConfig experiment_config_from_json(const nlohmann::json& doc, ExperimentConfig base)
{
    if (!doc.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    read_key(doc, "dims", base.dims);
    read_key(doc, "grids", base.grids);
    read_key(doc, "extents", base.extents);
    read_key(doc, "components", base.components);
    read_key(doc, "seed", base.seed);
    read_key(doc, "out", base.out);
    if (doc.contains("extents") == false && doc.contains("dims")) {
        base.extents.assign(base.dims, 1.0);
    }
    if (doc.contains("solver")) {
        base.solver = solver_config_from_json(doc.at("solver"), base.solver);
    }
    if (doc.contains("source")) {
        const auto& s = doc.at("source");
        read_key(s, "kind", base.source.kind);
        read_key(s, "amplitude", base.source.amplitude);
        read_key(s, "index", base.source.index);
        read_key(s, "path", base.source.path);
    }
    if (doc.contains("constants")) {
        const auto& c = doc.at("constants");
        read_key(c, "samples", base.constants_samples);
        read_key(c, "ascent_steps", base.constants_ascent);
        read_key(c, "qs", base.constants_qs);
        read_key(c, "path", base.constants_path);
    }
    if (doc.contains("oracle")) {
        read_key(doc.at("oracle"), "tol", base.oracle_tol);
        read_key(doc.at("oracle"), "max_iters", base.oracle_max_iters);
    }
    if (doc.contains("continuation")) {
        read_key(doc.at("continuation"), "schedule", base.mu_schedule);
    }
    if (doc.contains("inequalities")) {
        const auto& q = doc.at("inequalities");
        read_key(q, "samples", base.inequality_samples);
        read_key(q, "p_list", base.inequality_p);
        read_key(q, "tensor_mu", base.tensor_mu);
        read_key(q, "bound_mu", base.bound_mu);
    }
    return base;
}

void validate_basic(const ExperimentConfig& cfg)
{
    if (cfg.dims != 2 && cfg.dims != 3) {
        throw ConfigError("dims must be 2 or 3");
    }
    if (static_cast<int>(cfg.extents.size()) != cfg.dims) {
        throw ConfigError("extents must have one entry per dimension");
    }
    if (cfg.grids.empty()) {
        throw ConfigError("at least one grid resolution is required");
    }
    for (const int m : cfg.grids) {
        if (m < 3) {
            throw ConfigError("grid resolution must be at least 3");
        }
    }
    if (cfg.components < 1) {
        throw ConfigError("components must be at least 1");
    }
    if (cfg.constants_samples < 1 || cfg.constants_ascent < 0) {
        throw ConfigError("constant estimation needs samples >= 1 and ascent_steps >= 0");
    }
    if (!(cfg.oracle_tol > 0.0) || cfg.oracle_max_iters < 0) {
        throw ConfigError("oracle tolerance must be positive");
    }
    if (cfg.inequality_samples < 1) {
        throw ConfigError("inequality sweeps need at least one sample");
    }
}

Grid make_grid(const ExperimentConfig& cfg, int m)
{
    std::vector<int> res(cfg.dims, m);
    return Grid::make(cfg.dims, res, cfg.extents);
}

VectorField make_source(const ExperimentConfig& cfg, const Grid& grid)
{
    const auto& s = cfg.source;
    const int N = cfg.components;
    if (s.kind == "sine") {
        return field_from_fn(grid, N, [&](const Point& x, std::span<double> out) {
            double v = s.amplitude;
            for (int a = 0; a < grid.dims(); ++a) {
                v *= std::sin(std::numbers::pi * x[a] / grid.extent(a));
            }
            std::fill(out.begin(), out.end(), v);
        });
    }
    if (s.kind == "sine_product") {
        return continuous_source(default_sine_product(grid, N), grid, cfg.solver.p, cfg.solver.mu);
    }
    if (s.kind == "random_sine") {
        return s.amplitude * random_sine_field(grid, N, cfg.seed, s.index);
    }
    if (s.kind == "field") {
        auto f = load_field(s.path);
        if (!(f.grid() == grid) || f.components() != N) {
            throw ConfigError("source field does not match the configured grid");
        }
        return f;
    }
    throw ConfigError("unknown source kind '" + s.kind + "'");
}

ConstantsReport resolve_constants(const ExperimentConfig& cfg, const Grid& grid)
{
    if (!cfg.constants_path.empty()) {
        return constants_from_json(io::read_json(cfg.constants_path));
    }
    auto qs = cfg.constants_qs;
    qs.push_back(2.0);
    qs.push_back(cfg.solver.q);
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
    return estimate_constants(grid, qs, cfg.constants_samples, cfg.constants_ascent, cfg.seed);
}

bool MmsTable::all_converged() const
{
    return std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.converged; });
}

std::string MmsTable::to_csv() const
{
    std::ostringstream os;
    os << "m,h,same_disc_err,oracle_err,oracle_order,cross_dist,cross_order,fp_iters,converged\n";
    for (const auto& r : rows) {
        os << r.m << ',' << io::format_double(r.h) << ',' << io::format_double(r.same_disc_err)
           << ',' << io::format_double(r.oracle_err) << ',' << io::format_double(r.oracle_order)
           << ',' << io::format_double(r.cross_dist) << ',' << io::format_double(r.cross_order)
           << ',' << r.fp_iterations << ',' << (r.converged ? 1 : 0) << '\n';
    }
    return os.str();
}

nlohmann::json MmsTable::to_json() const
{
    auto arr = nlohmann::json::array();
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    for (const auto& r : rows) {
        arr.push_back({{"m", r.m},
                       {"h", r.h},
                       {"same_disc_err", num(r.same_disc_err)},
                       {"oracle_err", num(r.oracle_err)},
                       {"oracle_order", num(r.oracle_order)},
                       {"cross_dist", num(r.cross_dist)},
                       {"cross_order", num(r.cross_order)},
                       {"fp_iters", r.fp_iterations},
                       {"converged", r.converged}});
    }
    return arr;
}

MmsTable mms_study(const ExperimentConfig& cfg)
{
    validate_basic(cfg);
    if (cfg.grids.size() < 2) {
        throw ConfigError("a refinement study needs at least two grids");
    }
    // Constants approximate continuum quantities; one estimate on the coarsest grid serves all.
    const int coarsest = *std::min_element(cfg.grids.begin(), cfg.grids.end());
    const auto constants = resolve_constants(cfg, make_grid(cfg, coarsest));
    const double p = cfg.solver.p;
    const double mu = cfg.solver.mu;

    MmsTable table;
    for (const int m : cfg.grids) {
        const auto grid = make_grid(cfg, m);
        const auto sol = default_sine_product(grid, cfg.components);
        const PointFn fn = [&sol](const Point& x, std::span<double> out) { sol.value(x, out); };
        const auto mp = manufactured_problem(fn, cfg.components, p, mu, grid,
                                             Discretization::nondivergence);

        MmsRow row;
        row.m = m;
        row.h = grid.spacing(0);
        const auto same = solve_fixed_point(mp.f, cfg.solver, constants);
        row.same_disc_err = w2q_norm(same.u - mp.u_exact, cfg.solver.q);
        row.fp_iterations = same.iterations;

        const auto fc = continuous_source(sol, grid, p, mu);
        MinimizeOptions mo;
        mo.tol = cfg.oracle_tol;
        mo.max_iters = cfg.oracle_max_iters;
        const auto oracle = minimize(fc, p, mu, mo);
        row.oracle_err = lq_norm(oracle.u - mp.u_exact, 2.0);
        const auto cross = solve_fixed_point(fc, cfg.solver, constants);
        row.cross_dist = lq_norm(cross.u - oracle.u, 2.0);
        row.converged = same.converged && oracle.report.converged && cross.converged;

        row.oracle_order = std::nan("");
        row.cross_order = std::nan("");
        if (!table.rows.empty()) {
            const auto& prev = table.rows.back();
            row.oracle_order = order(prev.oracle_err, row.oracle_err, prev.h, row.h);
            row.cross_order = order(prev.cross_dist, row.cross_dist, prev.h, row.h);
        }
        table.rows.push_back(row);
    }
    return table;
}

namespace {

// Collects artifacts for one run and writes the manifest last.
class RunOutput {
public:
    explicit RunOutput(const ExperimentConfig& cfg) : dir_(cfg.out)
    {
        std::filesystem::create_directories(dir_);
    }

    void text(const std::string& name, const std::string& contents)
    {
        io::write_atomic(dir_ / name, contents);
        files_.push_back(name);
    }
    void json(const std::string& name, const nlohmann::json& doc)
    {
        io::write_json(dir_ / name, doc);
        files_.push_back(name);
    }
    void field(const std::string& name, const VectorField& f)
    {
        save_field(f, dir_ / name);
        files_.push_back(name);
        files_.push_back(name + ".json");
    }
    void manifest(const std::string& command, const ExperimentConfig& cfg)
    {
        nlohmann::json m{{"tool", "plap"},
                         {"version", kVersion},
                         {"command", command},
                         {"seed", cfg.seed},
                         {"config", to_json(cfg)},
                         {"outputs", files_}};
        io::write_json(dir_ / "manifest.json", m);
    }

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

int cmd_solve(const ExperimentConfig& cfg, std::ostream& out)
{
    if (cfg.grids.size() != 1) {
        throw ConfigError("solve takes exactly one grid");
    }
    const auto grid = make_grid(cfg, cfg.grids.front());
    const auto f = make_source(cfg, grid);
    const auto constants = resolve_constants(cfg, grid);
    validate(cfg.solver, constants, grid.dims());
    const auto res = solve_fixed_point(f, cfg.solver, constants);
    const auto ratio = verify_apriori(res.u, f, cfg.solver);

    RunOutput run(cfg);
    run.field("u.bin", res.u);
    run.json("constants.json", to_json(constants));
    run.text("trace.csv", res.trace.to_csv());
    run.json("trace.json", res.trace.to_json());
    run.json("report.json",
             {{"converged", res.converged},
              {"iterations", res.iterations},
              {"R", res.R},
              {"ball_constants", to_json(res.constants)},
              {"ball_violations", res.ball_violations},
              {"apriori_ratio", ratio ? nlohmann::json(*ratio) : nlohmann::json(nullptr)},
              {"residual_lq", lq_norm(nondivergence_residual(res.u, f, cfg.solver), cfg.solver.q)}});
    run.manifest("solve", cfg);
    out << "solve: converged=" << res.converged << " iterations=" << res.iterations
        << " R=" << io::format_double(res.R) << '\n';
    return res.converged ? 0 : 1;
}

int cmd_oracle(const ExperimentConfig& cfg, std::ostream& out)
{
    if (cfg.grids.size() != 1) {
        throw ConfigError("oracle takes exactly one grid");
    }
    const auto grid = make_grid(cfg, cfg.grids.front());
    const auto f = make_source(cfg, grid);
    MinimizeOptions mo;
    mo.tol = cfg.oracle_tol;
    mo.max_iters = cfg.oracle_max_iters;
    const auto res = minimize(f, cfg.solver.p, cfg.solver.mu, mo);
    RunOutput run(cfg);
    run.field("u.bin", res.u);
    auto rep = to_json(res.report);
    rep["weak_residual"] = weak_residual(res.u, f, cfg.solver.p, cfg.solver.mu, 8, cfg.seed);
    run.json("report.json", rep);
    run.manifest("oracle", cfg);
    out << "oracle: converged=" << res.report.converged << " iterations=" << res.report.iterations
        << " energy=" << io::format_double(res.report.energy) << '\n';
    return res.report.converged ? 0 : 1;
}

int cmd_constants(const ExperimentConfig& cfg, std::ostream& out)
{
    if (cfg.grids.size() != 1) {
        throw ConfigError("constants takes exactly one grid");
    }
    const auto grid = make_grid(cfg, cfg.grids.front());
    auto c = cfg;
    c.constants_path.clear();
    const auto report = resolve_constants(c, grid);
    RunOutput run(cfg);
    run.json("constants.json", to_json(report));
    run.manifest("constants", cfg);
    out << "constants: C1=" << io::format_double(report.C1) << " K_band=["
        << io::format_double(report.K_band.first) << ", "
        << io::format_double(report.K_band.second) << "]\n";
    return 0;
}

int cmd_inequalities(const ExperimentConfig& cfg, std::ostream& out)
{
    const int s = cfg.inequality_samples;
    std::vector<InequalitySweep> all;
    const auto appendix = check_appendix(s, cfg.seed, 2, 3);
    all.push_back(appendix);
    auto tensor = nlohmann::json::array();
    auto young = nlohmann::json::array();
    auto bounds = nlohmann::json::array();
    bool stable = true;
    for (const double p : cfg.inequality_p) {
        const auto t = check_tensor_lipschitz(s, cfg.seed, p, cfg.tensor_mu);
        stable = stable && t.details.at("stable_within_factor_2").get<bool>();
        tensor.push_back(to_json(t));
        all.push_back(t);
        const auto y = check_young_type(s, cfg.seed, p);
        young.push_back(to_json(y));
        all.push_back(y);
        for (const double mu : cfg.bound_mu) {
            for (const auto& b : check_mu_bounds(s, cfg.seed, p, mu)) {
                bounds.push_back(to_json(b));
                all.push_back(b);
            }
        }
    }
    RunOutput run(cfg);
    run.json("appendix.json", to_json(appendix));
    run.json("tensor_lipschitz.json", tensor);
    run.json("young_type.json", young);
    run.json("mu_bounds.json", bounds);
    run.text("inequalities.csv", sweeps_csv(all));
    run.manifest("inequalities", cfg);
    int violations = 0;
    for (const auto& sw : all) {
        violations += sw.violations;
    }
    out << "inequalities: sweeps=" << all.size() << " violations=" << violations
        << " tensor_stable=" << stable << '\n';
    return violations == 0 && stable ? 0 : 1;
}

int cmd_continuation(const ExperimentConfig& cfg, std::ostream& out)
{
    if (cfg.grids.size() != 1) {
        throw ConfigError("continuation takes exactly one grid");
    }
    const auto grid = make_grid(cfg, cfg.grids.front());
    const auto f = make_source(cfg, grid);
    const auto constants = resolve_constants(cfg, grid);
    const auto rep =
        run_continuation(f, cfg.solver, cfg.mu_schedule, constants, cfg.oracle_tol,
                         {8, cfg.seed, cfg.oracle_max_iters});
    RunOutput run(cfg);
    run.json("continuation.json", rep.to_json());
    run.text("continuation.csv", rep.to_csv());
    run.field("u_mu0.bin", rep.oracle_solution);
    run.manifest("continuation", cfg);
    out << "continuation: spread=" << io::format_double(rep.w2q_spread())
        << " envelope_ok=" << rep.monotone_envelope_ok << '\n';
    return rep.all_converged() ? 0 : 1;
}

int cmd_mms(const ExperimentConfig& cfg, std::ostream& out)
{
    const auto table = mms_study(cfg);
    RunOutput run(cfg);
    run.text("mms.csv", table.to_csv());
    run.json("mms.json", table.to_json());
    run.manifest("mms", cfg);
    out << table.to_csv();
    return table.all_converged() ? 0 : 1;
}

int cmd_report(const ExperimentConfig& cfg, std::ostream& out)
{
    const std::filesystem::path dir(cfg.out);
    if (!std::filesystem::exists(dir / "manifest.json")) {
        throw ConfigError("no manifest.json in " + dir.string());
    }
    const auto manifest = io::read_json(dir / "manifest.json");
    nlohmann::json summary{{"command", manifest.value("command", "")},
                           {"version", manifest.value("version", "")},
                           {"artifacts", nlohmann::json::object()}};
    for (const auto& name : manifest.value("outputs", std::vector<std::string>{})) {
        const auto path = dir / name;
        if (path.extension() == ".json" && std::filesystem::exists(path) &&
            !std::filesystem::exists(dir / path.stem())) { // skip field sidecars
            const auto doc = io::read_json(path);
            nlohmann::json keys = nlohmann::json::object();
            if (doc.is_object()) {
                for (const char* k : {"converged", "iterations", "violations", "R", "C1",
                                      "monotone_envelope_ok", "w2q_spread", "energy"}) {
                    if (doc.contains(k)) {
                        keys[k] = doc[k];
                    }
                }
            }
            summary["artifacts"][name] = keys;
        }
    }
    io::write_json(dir / "summary.json", summary);
    out << summary.dump(2) << '\n';
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"p-Laplacian system solver and verification lab", "plap"};
    app.require_subcommand(1);

    std::string config_path, out_dir, grids, source_kind, consts_path;
    std::uint64_t seed = 0;
    double p = 0, mu = 0, q = 0, oracle_tol = 0, picard_tol = 0;
    int samples = 0, dims = 0, components = 0, max_iters = 0;
    std::vector<double> schedule;

    struct Flags {
        CLI::Option *config, *out, *seed, *p, *mu, *q, *grids, *samples, *dims, *components,
            *oracle_tol, *picard_tol, *source, *constants, *schedule, *max_iters;
    };
    std::map<std::string, Flags> flags;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"solve", "damped Picard solve of the regularized system"},
        {"oracle", "energy minimization (weak solution, mu >= 0)"},
        {"constants", "estimate Laplacian-estimate constants"},
        {"inequalities", "randomized inequality sweeps"},
        {"continuation", "mu -> 0 continuation against the mu = 0 oracle"},
        {"mms", "manufactured-solution refinement study"},
        {"report", "summarize an output directory"}};
    for (const auto& [name, desc] : commands) {
        auto* sub = app.add_subcommand(name, desc);
        Flags fl{};
        fl.config = sub->add_option("--config", config_path, "JSON configuration file");
        fl.out = sub->add_option("--out", out_dir, "output directory");
        fl.seed = sub->add_option("--seed", seed, "random seed");
        fl.p = sub->add_option("--p", p, "exponent p in (1,2]");
        fl.mu = sub->add_option("--mu", mu, "regularization mu");
        fl.q = sub->add_option("--q", q, "integrability exponent q");
        fl.grids = sub->add_option("--grids", grids, "comma-separated nodes per axis, e.g. 17,33,65");
        fl.samples = sub->add_option("--samples", samples, "sample count (constants, inequalities)");
        fl.dims = sub->add_option("--dims", dims, "space dimension (2 or 3)");
        fl.components = sub->add_option("--components", components, "number of components N");
        fl.oracle_tol = sub->add_option("--oracle-tol", oracle_tol, "oracle gradient tolerance");
        fl.picard_tol = sub->add_option("--picard-tol", picard_tol, "Picard tolerance");
        fl.source = sub->add_option("--source", source_kind, "sine | sine_product | random_sine | field");
        fl.constants = sub->add_option("--constants", consts_path, "saved constants JSON");
        fl.schedule = sub->add_option("--schedule", schedule, "mu schedule")->delimiter(',');
        fl.max_iters = sub->add_option("--max-iters", max_iters, "Picard iteration cap");
        flags[name] = fl;
    }

    std::vector<const char*> argv{"plap"};
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return 2;
    }

    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    const auto& fl = flags.at(name);
    try {
        ExperimentConfig cfg;
        if (*fl.config) {
            if (!std::filesystem::is_regular_file(config_path)) {
                throw ConfigError("cannot read config file " + config_path);
            }
            cfg = experiment_config_from_json(io::read_json(config_path));
        }
        if (*fl.dims) {
            cfg.dims = dims;
            cfg.extents.assign(dims, 1.0);
        }
        if (*fl.out) {
            cfg.out = out_dir;
        }
        if (*fl.seed) {
            cfg.seed = seed;
        }
        if (*fl.p) {
            cfg.solver.p = p;
        }
        if (*fl.mu) {
            cfg.solver.mu = mu;
        }
        if (*fl.q) {
            cfg.solver.q = q;
        }
        if (*fl.grids) {
            cfg.grids = parse_grids(grids);
        }
        if (*fl.samples) {
            cfg.constants_samples = samples;
            cfg.inequality_samples = samples;
        }
        if (*fl.components) {
            cfg.components = components;
        }
        if (*fl.oracle_tol) {
            cfg.oracle_tol = oracle_tol;
        }
        if (*fl.picard_tol) {
            cfg.solver.picard_tol = picard_tol;
        }
        if (*fl.source) {
            cfg.source.kind = source_kind;
        }
        if (*fl.constants) {
            cfg.constants_path = consts_path;
        }
        if (*fl.schedule) {
            cfg.mu_schedule = schedule;
        }
        if (*fl.max_iters) {
            cfg.solver.picard_max_iters = max_iters;
        }
        validate_basic(cfg);

        if (name == "solve") {
            return cmd_solve(cfg, out);
        }
        if (name == "oracle") {
            return cmd_oracle(cfg, out);
        }
        if (name == "constants") {
            return cmd_constants(cfg, out);
        }
        if (name == "inequalities") {
            return cmd_inequalities(cfg, out);
        }
        if (name == "continuation") {
            return cmd_continuation(cfg, out);
        }
        if (name == "mms") {
            return cmd_mms(cfg, out);
        }
        return cmd_report(cfg, out);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        err << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 1;
    }
}

} // namespace plap
