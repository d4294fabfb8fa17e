// Command-line front end: balance computations, parameter sweeps, ingestion
// of sampled trajectories, synthetic fixture generation, and the flow
// registry listing.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "entrex/balance.hpp"
#include "entrex/dynsys.hpp"
#include "entrex/errors.hpp"
#include "entrex/flows.hpp"
#include "entrex/ingest.hpp"
#include "entrex/textio.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using entrex::fmt_double;

namespace {

// sysexits-style codes; "no zero found" is a successful computation with a
// scientifically meaningful outcome, so it gets its own code.
constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kNoZero = 2;
constexpr int kUsage = 64;
constexpr int kNoInput = 66;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string flow_id = "solid-body";
    std::map<std::string, double> params;
    std::string method = "nile";
    int index = 0;
    std::string ftle_mode = "exact";
    double t0 = 0.0;
    std::vector<double> z0;  // reduced on-manifold coordinates
    std::optional<double> b; // solid-body entry offset: z0 = (-b, 0)
    double span = -1.0;      // <= 0: auto
    int grid_points = 2001;
    double ode_tol = 1e-10;
    double zero_tol = -1.0;  // < 0: auto
    double deriv_tol = 1e-6;
    std::string out_dir = "out";
    long seed = 0;

    void validate() const {
        if (grid_points < 101) throw UsageError("grid-points must be >= 101");
        if (std::isfinite(span) && span != -1.0 && span <= 0.0)
            throw UsageError("span must be positive");
        if (!(ode_tol > 0.0) || !(deriv_tol > 0.0)) throw UsageError("tolerances must be positive");
        if (zero_tol != -1.0 && !(zero_tol > 0.0)) throw UsageError("zero-tol must be positive");
    }

    json to_json() const {
        json j;
        j["flow"] = flow_id;
        j["params"] = params;
        j["method"] = method;
        j["index"] = index;
        j["ftle_mode"] = ftle_mode;
        j["t0"] = t0;
        j["z0"] = z0;
        j["b"] = b ? json(*b) : json(nullptr);
        j["span"] = span > 0.0 ? json(span) : json(nullptr);
        j["grid_points"] = grid_points;
        j["tolerances"] = {{"ode_tol", ode_tol}, {"zero_tol", zero_tol}, {"deriv_tol", deriv_tol}};
        j["out"] = out_dir;
        j["seed"] = seed;
        return j;
    }

    void apply_json(const json& j) {
        if (j.contains("flow")) flow_id = j["flow"].get<std::string>();
        if (j.contains("params"))
            for (auto it = j["params"].begin(); it != j["params"].end(); ++it)
                params[it.key()] = it.value().get<double>();
        if (j.contains("method")) method = j["method"].get<std::string>();
        if (j.contains("index")) index = j["index"].get<int>();
        if (j.contains("ftle_mode")) ftle_mode = j["ftle_mode"].get<std::string>();
        if (j.contains("t0")) t0 = j["t0"].get<double>();
        if (j.contains("z0") && j["z0"].is_array()) z0 = j["z0"].get<std::vector<double>>();
        if (j.contains("b") && j["b"].is_number()) b = j["b"].get<double>();
        if (j.contains("span") && j["span"].is_number()) span = j["span"].get<double>();
        if (j.contains("grid_points")) grid_points = j["grid_points"].get<int>();
        if (j.contains("tolerances")) {
            const json& t = j["tolerances"];
            if (t.contains("ode_tol")) ode_tol = t["ode_tol"].get<double>();
            if (t.contains("zero_tol")) zero_tol = t["zero_tol"].get<double>();
            if (t.contains("deriv_tol")) deriv_tol = t["deriv_tol"].get<double>();
        }
        if (j.contains("out")) out_dir = j["out"].get<std::string>();
        if (j.contains("seed")) seed = j["seed"].get<long>();
    }
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "'");
    out << text;
}

void write_config_echo(const RunConfig& cfg, const json& extra = {}) {
    fs::create_directories(cfg.out_dir);
    json j = cfg.to_json();
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    write_text(fs::path(cfg.out_dir) / "config.json", j.dump(2) + "\n");
}

entrex::flows::ModelFlow build_model(const RunConfig& cfg) {
    if (!entrex::flows::registry_has(cfg.flow_id))
        throw UsageError("unknown flow '" + cfg.flow_id + "' (see `entrex flows`)");
    return entrex::flows::make_flow(cfg.flow_id, cfg.params);
}

entrex::balance::PipelineConfig pipeline_config(const RunConfig& cfg) {
    entrex::balance::PipelineConfig p;
    try {
        p.kind = entrex::balance::BalanceKind::parse(cfg.method, cfg.index, cfg.ftle_mode);
    } catch (const entrex::InvalidInput& e) {
        throw UsageError(e.what());
    }
    p.t0 = cfg.t0;
    if (!cfg.z0.empty())
        p.reduced_z0 = cfg.z0;
    else if (cfg.b)
        p.reduced_z0 = {-*cfg.b};
    p.span = cfg.span;
    p.grid_points = cfg.grid_points;
    p.ode_tol = cfg.ode_tol;
    p.zero_tol = cfg.zero_tol;
    p.deriv_tol = cfg.deriv_tol;
    return p;
}

std::vector<std::string> series_warnings(const entrex::balance::BalanceSeries& s) {
    std::vector<std::string> w;
    if (s.ambiguous_crossings > 0)
        w.push_back("eigenvalue branch tracking hit " + std::to_string(s.ambiguous_crossings) +
                    " exact crossing ambiguities; the instantaneous-eigenvalue balance can "
                    "misplace the exit near such degeneracies");
    return w;
}

void write_series_csv(const entrex::balance::BalanceSeries& s, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "'");
    out << "t,F\n";
    for (size_t i = 0; i < s.times.size(); ++i)
        out << fmt_double(s.times[i]) << ',' << fmt_double(s.values[i]) << '\n';
}

int cmd_balance(const RunConfig& cfg) {
    cfg.validate();
    const auto model = build_model(cfg);
    const auto pcfg = pipeline_config(cfg);
    if (cfg.b && cfg.flow_id != "solid-body")
        throw UsageError("--b is the solid-body entry offset; use --z0 for other flows");

    const auto result = entrex::balance::run_balance(model, pcfg);

    fs::create_directories(cfg.out_dir);
    write_series_csv(result.series, fs::path(cfg.out_dir) / "series.csv");

    json ej;
    ej["found"] = result.exit.has_value();
    ej["method"] = result.series.kind.label();
    ej["span_used"] = result.span_used;
    ej["reduced_z0"] = result.reduced_z0;
    ej["warnings"] = series_warnings(result.series);
    if (result.exit) {
        ej["T"] = result.exit->T;
        ej["exit"] = result.exit->exit_state;
        ej["dF_dt"] = result.exit->dF_dt_at_T;
        ej["degenerate"] = result.exit->degenerate;
        ej["bracket"] = {result.exit->bracket.first, result.exit->bracket.second};
    } else {
        ej["T"] = nullptr;
    }
    write_text(fs::path(cfg.out_dir) / "exit.json", ej.dump(2) + "\n");
    write_config_echo(cfg, {{"command", "balance"}});

    for (const auto& w : series_warnings(result.series)) std::cerr << "warning: " << w << '\n';
    if (!result.exit) {
        std::cerr << "no nontrivial zero within span " << result.span_used << '\n';
        return kNoZero;
    }
    std::cout << "T = " << fmt_double(result.exit->T) << ", exit = (";
    for (size_t i = 0; i < result.exit->exit_state.size(); ++i)
        std::cout << (i ? ", " : "") << fmt_double(result.exit->exit_state[i]);
    std::cout << ")\n";
    return kOk;
}

int cmd_sweep(const RunConfig& cfg, const std::string& param, double from, double to, int steps) {
    cfg.validate();
    if (steps < 1) throw UsageError("steps must be >= 1");
    if (!entrex::flows::registry_has(cfg.flow_id))
        throw UsageError("unknown flow '" + cfg.flow_id + "' (see `entrex flows`)");
    std::vector<double> values;
    for (int i = 0; i < steps; ++i)
        values.push_back(steps == 1 ? from : from + (to - from) * i / double(steps - 1));

    const auto pcfg = pipeline_config(cfg);
    const auto result = entrex::balance::sweep(cfg.flow_id, param, values, cfg.params, pcfg);

    fs::create_directories(cfg.out_dir);
    json extra = {{"command", "sweep"}, {"sweep_param", param}, {"from", from}, {"to", to},
                  {"steps", steps}};
    write_config_echo(cfg, extra);
    json echo = cfg.to_json();
    for (auto it = extra.begin(); it != extra.end(); ++it) echo[it.key()] = it.value();
    entrex::balance::write_sweep_csv(result, (fs::path(cfg.out_dir) / "sweep.csv").string());
    entrex::balance::write_sweep_json(result, echo.dump(),
                                      (fs::path(cfg.out_dir) / "fit.json").string());

    int ok_rows = 0;
    for (const auto& r : result.rows) ok_rows += r.ok ? 1 : 0;
    std::cout << ok_rows << "/" << result.rows.size() << " rows, fit "
              << (result.fit ? "r2 = " + fmt_double(result.fit->r2) : std::string("absent")) << '\n';
    return ok_rows > 0 ? kOk : kError;
}

struct IngestCliOpts {
    int manifold_index = -1;
    double manifold_level = std::numeric_limits<double>::quiet_NaN();
    int gate_index = -1;
    double gate_lo = std::numeric_limits<double>::quiet_NaN();
    double gate_hi = std::numeric_limits<double>::quiet_NaN();
    std::string extrapolate = "quadratic";
    int window = 25;
};

int cmd_ingest(const RunConfig& cfg, const IngestCliOpts& opt, const std::vector<std::string>& paths) {
    cfg.validate();

    // Manifold and gate: explicit flags win, else the flow registry defaults.
    std::optional<entrex::flows::ModelFlow> model;
    if (entrex::flows::registry_has(cfg.flow_id)) model = entrex::flows::make_flow(cfg.flow_id, cfg.params);

    entrex::ingest::IngestConfig icfg;
    icfg.t0 = cfg.t0;
    icfg.extrapolation_window = opt.window;
    if (opt.extrapolate == "none")
        icfg.extrapolation = entrex::ingest::Extrapolation::none;
    else if (opt.extrapolate == "linear")
        icfg.extrapolation = entrex::ingest::Extrapolation::linear;
    else if (opt.extrapolate == "quadratic")
        icfg.extrapolation = entrex::ingest::Extrapolation::quadratic;
    else
        throw UsageError("unknown extrapolation '" + opt.extrapolate + "'");

    int mindex = opt.manifold_index;
    double mlevel = opt.manifold_level;
    if (mindex < 0 && model) {
        // The registry manifolds are flat with a coordinate-axis normal.
        const auto& n = model->manifold.unit_normal();
        for (size_t i = 0; i < n.size(); ++i)
            if (std::abs(n[i]) > 0.5) mindex = static_cast<int>(i);
        mlevel = model->manifold.base_point[static_cast<size_t>(mindex)];
    }
    if (mindex < 0) throw UsageError("need --manifold-index/--manifold-level or a --flow id");
    if (!std::isfinite(mlevel)) throw UsageError("manifold level must be finite");

    entrex::flows::NeighbourhoodSpec gate;
    gate.coordinate_index = opt.gate_index >= 0 ? opt.gate_index : mindex;
    if (std::isfinite(opt.gate_lo) && std::isfinite(opt.gate_hi)) {
        gate.lower = opt.gate_lo;
        gate.upper = opt.gate_hi;
    } else if (cfg.flow_id == "solid-body") {
        gate.lower = 0.0;
        gate.upper = 0.05;
    } else if (cfg.flow_id == "km") {
        gate.lower = 1.45;
        gate.upper = 1.5;
    } else {
        throw UsageError("need --gate-lo/--gate-hi");
    }

    fs::create_directories(cfg.out_dir);
    write_config_echo(cfg, {{"command", "ingest"},
                            {"gate", {{"coordinate_index", gate.coordinate_index},
                                      {"lower", gate.lower},
                                      {"upper", gate.upper}}},
                            {"manifold_index", mindex},
                            {"manifold_level", mlevel},
                            {"extrapolate", opt.extrapolate},
                            {"window", opt.window}});

    int failures = 0;
    bool missing = false;
    for (const auto& path : paths) {
        if (!fs::exists(path)) {
            std::cerr << "error: missing input file '" << path << "'\n";
            missing = true;
            ++failures;
            continue;
        }
        try {
            const auto loaded = entrex::ingest::load_samples(path);
            if (loaded.duplicates_collapsed > 0)
                std::cerr << "warning: collapsed " << loaded.duplicates_collapsed
                          << " duplicate timestamps in '" << path << "'\n";

            entrex::dynsys::Vec base(static_cast<size_t>(loaded.dim), 0.0);
            entrex::dynsys::Vec normal(static_cast<size_t>(loaded.dim), 0.0);
            base[static_cast<size_t>(mindex)] = mlevel;
            normal[static_cast<size_t>(mindex)] = 1.0;
            icfg.manifold = entrex::dynsys::FlatManifold(base, normal);
            icfg.gate = gate;

            const auto result = entrex::ingest::ingest_balance(
                loaded.samples, icfg, model ? &model->flow : nullptr);

            entrex::balance::ExitSearchOptions xopt;
            xopt.zero_tol = cfg.zero_tol;
            xopt.deriv_tol = cfg.deriv_tol;
            entrex::ingest::ReportSummary summary;
            if (auto e = entrex::balance::find_exit(result.sigma, xopt)) summary.first_zero_sigma = e->T;
            if (auto e = entrex::balance::find_exit(result.velocity, xopt)) summary.first_zero_v = e->T;
            summary.predicted_zero = entrex::ingest::predict_next_zero(result.sigma, icfg);

            const std::string stem = fs::path(path).stem().string();
            entrex::ingest::ReportPaths rp;
            rp.csv = (fs::path(cfg.out_dir) / (stem + ".report.csv")).string();
            rp.json = (fs::path(cfg.out_dir) / (stem + ".summary.json")).string();
            rp.plot = (fs::path(cfg.out_dir) / (stem + ".plot.gp")).string();
            entrex::ingest::write_report(result, summary, icfg, rp);
            std::cout << path << ": first_zero_sigma="
                      << (summary.first_zero_sigma ? fmt_double(*summary.first_zero_sigma) : "none")
                      << " first_zero_v="
                      << (summary.first_zero_v ? fmt_double(*summary.first_zero_v) : "none")
                      << " predicted="
                      << (summary.predicted_zero ? fmt_double(*summary.predicted_zero) : "none")
                      << '\n';
        } catch (const std::exception& e) {
            std::cerr << "error: " << path << ": " << e.what() << '\n';
            ++failures;
        }
    }
    if (failures == 0) return kOk;
    return missing ? kNoInput : kError;
}

int cmd_make_fixture(const RunConfig& cfg, double chi, int samples, double km_z20,
                     double t_end_flag, const std::string& out_file) {
    if (!(chi > 0.0)) throw UsageError("chi must be strictly positive (offset from the manifold)");
    if (samples < 2) throw UsageError("samples must be >= 2");
    const auto model = build_model(cfg);

    entrex::dynsys::Vec z0;
    entrex::dynsys::Vec reduced0;
    if (cfg.flow_id == "solid-body") {
        const double b = cfg.b.value_or(1.0);
        z0 = {-b, chi};
        reduced0 = {-b};
    } else {  // km: approach the capillary surface from inside
        z0 = {1.5 - chi, km_z20};
        reduced0 = {km_z20};
    }

    double t_end = t_end_flag;
    if (!(t_end > cfg.t0)) {
        // Cover the predicted entry-exit window with some margin.
        const double est = entrex::balance::default_span(model, reduced0, cfg.t0) / 4.0;
        t_end = cfg.t0 + 1.6 * est;
    }

    const auto traj = entrex::dynsys::integrate(model.flow, z0, cfg.t0, t_end, cfg.ode_tol);
    const double end = traj.t_end();
    const auto& n = model.manifold.unit_normal();

    std::ofstream out(out_file);
    if (!out) throw std::runtime_error("cannot open '" + out_file + "'");
    out << "t,z1,z2,vn,ann\n";
    for (int i = 0; i < samples; ++i) {
        const double t = cfg.t0 + (end - cfg.t0) * i / double(samples - 1);
        const auto z = traj.at(t);
        const auto v = model.flow.rhs(z, t);
        const auto a = model.flow.jacobian(z, t);
        double vn = 0.0, ann = 0.0;
        for (size_t r = 0; r < n.size(); ++r) {
            vn += v[r] * n[r];
            for (size_t c = 0; c < n.size(); ++c)
                ann += n[r] * a(static_cast<int>(r), static_cast<int>(c)) * n[c];
        }
        out << fmt_double(t) << ',' << fmt_double(z[0]) << ',' << fmt_double(z[1]) << ','
            << fmt_double(vn) << ',' << fmt_double(ann) << '\n';
    }
    std::cout << "wrote " << samples << " samples to " << out_file
              << (traj.domain_exit ? " (trajectory left the domain early)" : "") << '\n';
    return kOk;
}

int cmd_flows() {
    for (const auto& id : entrex::flows::registry_ids()) {
        const auto model = entrex::flows::make_flow(id);
        std::cout << id << "  (dim " << model.flow.dim << ")\n";
        for (const auto& p : entrex::flows::param_info(id))
            std::cout << "  --" << p.name << "  default " << fmt_double(p.default_value) << "  "
                      << p.note << '\n';
        std::cout << "  manifold: flat, base (";
        for (size_t i = 0; i < model.manifold.base_point.size(); ++i)
            std::cout << (i ? ", " : "") << fmt_double(model.manifold.base_point[i]);
        std::cout << "), normal (";
        for (size_t i = 0; i < model.manifold.unit_normal().size(); ++i)
            std::cout << (i ? ", " : "") << fmt_double(model.manifold.unit_normal()[i]);
        std::cout << ")\n";
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entry-exit prediction near invariant manifolds via balance functions"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double beta = std::numeric_limits<double>::quiet_NaN();
    double alpha_s = std::numeric_limits<double>::quiet_NaN();
    double eta = std::numeric_limits<double>::quiet_NaN();
    double b_flag = std::numeric_limits<double>::quiet_NaN();

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file; flags override its values");
        sub->add_option("--flow", cfg.flow_id, "flow id from the registry");
        sub->add_option("--alpha", alpha, "solid-body regularization rate");
        sub->add_option("--beta", beta, "solid-body drift speed");
        sub->add_option("--b", b_flag, "solid-body entry offset: starts at (-b, 0)");
        sub->add_option("--alpha-s", alpha_s, "km asymmetry parameter");
        sub->add_option("--eta", eta, "km radial shape exponent");
        sub->add_option("--method", cfg.method, "eig | fastslow | ftle | nile");
        sub->add_option("--index", cfg.index, "spectral branch index");
        sub->add_option("--ftle-mode", cfg.ftle_mode, "exact | commuting");
        sub->add_option("--t0", cfg.t0, "initial time");
        sub->add_option("--z0", cfg.z0, "reduced on-manifold start coordinates");
        sub->add_option("--span", cfg.span, "search span (default: auto estimate)");
        sub->add_option("--grid-points", cfg.grid_points, "series grid size (>= 101)");
        sub->add_option("--ode-tol", cfg.ode_tol, "integrator tolerance");
        sub->add_option("--zero-tol", cfg.zero_tol, "zero tolerance (default: scale-aware)");
        sub->add_option("--deriv-tol", cfg.deriv_tol, "non-degeneracy threshold for dF/dt");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--seed", cfg.seed, "seed echoed into config.json (randomized tests only)");
    };

    auto* bal = app.add_subcommand("balance", "compute one balance series and its exit prediction");
    add_common(bal);

    auto* swp = app.add_subcommand("sweep", "repeat the balance pipeline over a parameter range");
    add_common(swp);
    std::string sweep_param = "alpha_s";
    double sweep_from = 0.05, sweep_to = 0.5;
    int sweep_steps = 10;
    swp->add_option("--param", sweep_param, "parameter to vary (flow parameter, or 'b' for solid-body)");
    swp->add_option("--from", sweep_from, "range start");
    swp->add_option("--to", sweep_to, "range end");
    swp->add_option("--steps", sweep_steps, "number of values (>= 1)");

    auto* ing = app.add_subcommand("ingest", "balance series from sampled trajectory CSV files");
    add_common(ing);
    IngestCliOpts iopt;
    std::vector<std::string> ingest_paths;
    ing->add_option("paths", ingest_paths, "input CSV files")->required();
    ing->add_option("--manifold-index", iopt.manifold_index, "coordinate held by the flat manifold");
    ing->add_option("--manifold-level", iopt.manifold_level, "manifold coordinate value");
    ing->add_option("--gate-index", iopt.gate_index, "gated coordinate (default: manifold index)");
    ing->add_option("--gate-lo", iopt.gate_lo, "gate lower bound");
    ing->add_option("--gate-hi", iopt.gate_hi, "gate upper bound");
    ing->add_option("--extrapolate", iopt.extrapolate, "none | linear | quadratic");
    ing->add_option("--window", iopt.window, "trailing samples for extrapolation (>= 3)");

    auto* fix = app.add_subcommand("make-fixture", "integrate a flow and write an ingest CSV");
    add_common(fix);
    double chi = 1e-3, km_z20 = 0.4, t_end_flag = -1.0;
    int fixture_samples = 5000;
    std::string fixture_out = "fixture.csv";
    fix->add_option("--chi", chi, "initial offset from the manifold (> 0)");
    fix->add_option("--samples", fixture_samples, "number of output samples");
    fix->add_option("--z20", km_z20, "km entry coordinate on the surface");
    fix->add_option("--t-end", t_end_flag, "sampling end time (default: auto)");
    fix->add_option("--out-file", fixture_out, "output CSV path");

    auto* flws = app.add_subcommand("flows", "list the flow registry");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "error: missing config file '" << config_path << "'\n";
                return kNoInput;
            }
            RunConfig from_file;
            from_file.apply_json(json::parse(in));
            // Flags already parsed into cfg win over file values for scalars
            // CLI11 touched; merge the file first, then re-apply touched flags.
            std::swap(cfg, from_file);
            CLI::App* active = bal->parsed() ? bal : swp->parsed() ? swp : ing->parsed() ? ing : fix;
            auto touched = [&](const std::string& name) {
                const CLI::Option* o = active->get_option_no_throw(name);
                return o != nullptr && o->count() > 0;
            };
            if (touched("--flow")) cfg.flow_id = from_file.flow_id;
            if (touched("--method")) cfg.method = from_file.method;
            if (touched("--index")) cfg.index = from_file.index;
            if (touched("--ftle-mode")) cfg.ftle_mode = from_file.ftle_mode;
            if (touched("--t0")) cfg.t0 = from_file.t0;
            if (touched("--z0")) cfg.z0 = from_file.z0;
            if (touched("--span")) cfg.span = from_file.span;
            if (touched("--grid-points")) cfg.grid_points = from_file.grid_points;
            if (touched("--ode-tol")) cfg.ode_tol = from_file.ode_tol;
            if (touched("--zero-tol")) cfg.zero_tol = from_file.zero_tol;
            if (touched("--deriv-tol")) cfg.deriv_tol = from_file.deriv_tol;
            if (touched("--out")) cfg.out_dir = from_file.out_dir;
            if (touched("--seed")) cfg.seed = from_file.seed;
        }
        if (std::isfinite(alpha)) cfg.params["alpha"] = alpha;
        if (std::isfinite(beta)) cfg.params["beta"] = beta;
        if (std::isfinite(alpha_s)) cfg.params["alpha_s"] = alpha_s;
        if (std::isfinite(eta)) cfg.params["eta"] = eta;
        if (std::isfinite(b_flag)) cfg.b = b_flag;

        if (bal->parsed()) return cmd_balance(cfg);
        if (swp->parsed()) return cmd_sweep(cfg, sweep_param, sweep_from, sweep_to, sweep_steps);
        if (ing->parsed()) return cmd_ingest(cfg, iopt, ingest_paths);
        if (fix->parsed()) return cmd_make_fixture(cfg, chi, fixture_samples, km_z20, t_end_flag,
                                                   fixture_out);
        if (flws->parsed()) return cmd_flows();
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const entrex::InvalidInput& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kUsage;
}
