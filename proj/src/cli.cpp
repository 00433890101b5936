#include "acda/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "acda/analysis.hpp"
#include "acda/assimilation.hpp"
#include "acda/config.hpp"
#include "acda/csv.hpp"
#include "acda/experiments.hpp"

namespace acda {

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string config_file;
    std::string preset;
    std::vector<std::string> overrides;
    std::string out;
};

ExperimentConfig resolve(const CommonArgs& args) {
    ExperimentConfig cfg;
    if (!args.preset.empty()) cfg.merge(ExperimentConfig::preset(args.preset));
    if (!args.config_file.empty()) cfg.merge(ExperimentConfig::load(args.config_file));
    for (const auto& o : args.overrides) cfg.apply(o);
    if (!args.out.empty()) cfg.set("output_dir", args.out);
    return cfg;
}

std::map<std::string, std::string> metadata(const ExperimentConfig& cfg) {
    std::map<std::string, std::string> meta;
    for (const auto& [k, v] : cfg.values()) {
        if (v.empty() || k == "output_dir") continue;
        // c0 and p only describe a fit when the user supplied them.
        if ((k == "c0" || k == "p") && !cfg.is_explicit(k)) continue;
        std::string compact = v;
        std::replace(compact.begin(), compact.end(), ' ', ',');
        meta[k] = compact;
    }
    return meta;
}

std::string time_tag(double t) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(3);
    s << t;
    return s.str();
}

Field start_state(const ExperimentConfig& cfg, const SolverConfig& solver, double& spin_up_time) {
    const SpinUp s = spin_up_reference(solver, static_cast<std::uint64_t>(cfg.get_int("seed")), cfg.spin_up_policy(),
                                       cfg.get_double("spin_up_cap"));
    spin_up_time = s.duration;
    return s.state;
}

int cmd_simulate(const ExperimentConfig& cfg) {
    const SolverConfig solver = cfg.solver();
    std::vector<double> times = cfg.get_doubles("snapshot_times");
    const double t_end = cfg.get_double("t_end");
    std::erase_if(times, [&](double t) { return t > t_end; });
    if (times.empty()) throw ConfigError("simulate: no snapshot time lies in [0, t_end]");
    std::sort(times.begin(), times.end());

    const fs::path out = cfg.get_string("output_dir");
    const AllenCahnStepper stepper(solver);
    Field u = make_initial_data(solver, static_cast<std::uint64_t>(cfg.get_int("seed")), 1e-2);
    std::size_t step = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto target = static_cast<std::size_t>(std::llround(times[i] / solver.dt));
        for (; step < target; ++step) stepper.step(u);
        const fs::path file = out / ("snapshot_" + std::to_string(i) + "_t" + time_tag(times[i]) + ".csv");
        write_csv(file, field_table(u, metadata(cfg)));
        std::cout << "wrote " << file.string() << "  (max|u| = " << discrete_linf(u) << ")\n";
    }
    return kExitOk;
}

struct RunSpec {
    std::string kind;
    std::size_t m;
};

std::vector<RunSpec> run_specs(const ExperimentConfig& cfg) {
    std::vector<RunSpec> specs;
    const std::string runs = cfg.get_string("runs");
    if (runs.empty()) {
        specs.push_back({cfg.get_string("obs"), static_cast<std::size_t>(cfg.get_int("m"))});
        return specs;
    }
    std::stringstream ss(runs);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw ConfigError("runs: expected kind:m, got '" + item + "'");
        const std::string kind = item.substr(0, colon);
        if (kind != "uniform" && kind != "probe" && kind != "layer" && kind != "full")
            throw ConfigError("runs: unknown kind '" + kind + "'");
        long m = 0;
        try {
            m = std::stol(item.substr(colon + 1));
        } catch (const std::exception&) {
            throw ConfigError("runs: bad node count in '" + item + "'");
        }
        if (m < 1) throw ConfigError("runs: node count must be positive in '" + item + "'");
        specs.push_back({kind, static_cast<std::size_t>(m)});
    }
    if (specs.empty()) throw ConfigError("runs: empty run list");
    return specs;
}

ObservationSet build_observation(const RunSpec& spec, const Field& u_start, const SolverConfig& solver, double speed) {
    if (spec.kind == "uniform") return ObservationSet::uniform(solver.n_points, spec.m);
    if (spec.kind == "probe") return ObservationSet::sweeping_probe(solver.n_points, spec.m, speed);
    if (spec.kind == "full") return ObservationSet::full_mesh(solver.n_points);
    return layer_based_placement(u_start, solver);
}

int cmd_assimilate(const ExperimentConfig& cfg) {
    const SolverConfig solver = cfg.solver();
    const double mu = cfg.get_double("mu");
    const double t_end = cfg.get_double("t_end");
    const double speed = cfg.get_double("c");
    const double threshold = cfg.get_double("threshold");
    const auto record_every = static_cast<std::size_t>(cfg.get_int("record_every"));
    const auto specs = run_specs(cfg);
    // Validate the CFL bound before spending time on the spin-up.
    NudgeConfig(mu, ObservationSet::full_mesh(solver.n_points), t_end, solver, record_every);

    double spin_up_time = 0.0;
    const Field u_start = start_state(cfg, solver, spin_up_time);
    const fs::path out = cfg.get_string("output_dir");
    for (const auto& spec : specs) {
        const ObservationSet obs = build_observation(spec, u_start, solver, speed);
        const NudgeConfig nudge(mu, obs, t_end, solver, record_every);
        RunOptions options;
        options.record_probe = cfg.get_bool("record_probe");
        const RunRecord rec = run_pair(u_start, nudge, solver, threshold, options);

        auto meta = metadata(cfg);
        meta["obs"] = spec.kind;
        meta["m"] = std::to_string(obs.size());
        meta["spin_up_time"] = format_double(spin_up_time);
        meta["observation"] = obs.kind() == ObservationKind::SweepingProbe || obs.size() <= 64
                                  ? obs.to_csv_record()
                                  : std::string(to_string(obs.kind())) + "," + std::to_string(obs.size());
        std::replace(meta["observation"].begin(), meta["observation"].end(), ',', '|');
        const std::string tag = spec.kind + "_" + std::to_string(obs.size());
        write_csv(out / ("run_" + tag + ".csv"), run_record_table(rec, meta));

        CsvTable fields;
        fields.metadata = meta;
        fields.metadata["time"] = format_double(t_end);
        fields.columns = {"x", "u", "v"};
        for (std::size_t k = 0; k < rec.final_reference.values.size(); ++k)
            fields.rows.push_back({format_double(rec.final_reference.x(k)),
                                   format_double(rec.final_reference.values[k]),
                                   format_double(rec.final_assimilated.values[k])});
        write_csv(out / ("fields_" + tag + ".csv"), fields);

        std::cout << tag << ": L2 error at t=" << t_end << " is " << rec.final_l2();
        if (rec.converged_at) std::cout << ", reached " << threshold << " at t=" << *rec.converged_at;
        std::cout << '\n';
    }
    return kExitOk;
}

int cmd_find_min_nodes(const ExperimentConfig& cfg) {
    cfg.require({"nus"});
    const std::vector<double> nus = cfg.get_doubles("nus");
    const std::vector<std::int64_t> seeds = cfg.get_ints("seeds");
    if (nus.empty()) throw ConfigError("find-min-nodes: empty nu list");
    if (seeds.empty()) throw ConfigError("find-min-nodes: empty seed list");
    const std::string kind = cfg.get_string("obs");
    if (kind != "uniform" && kind != "probe") throw ConfigError("find-min-nodes: obs must be uniform or probe");

    std::vector<TrialSpec> specs;
    for (double nu : nus) {
        for (auto seed : seeds) {
            TrialSpec spec;
            spec.config = cfg.solver();
            spec.config.nu = nu;
            spec.mu = cfg.get_double("mu");
            spec.obs_kind = parse_observation_kind(kind);
            spec.seed = static_cast<std::uint64_t>(seed);
            spec.threshold = cfg.get_double("threshold");
            spec.t_star = cfg.get_double("t_star");
            spec.probe_speed = cfg.get_double("c");
            spec.spin_up = cfg.spin_up_policy();
            try {
                spec.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("find-min-nodes: ") + e.what());
            }
            specs.push_back(spec);
        }
    }
    const auto results = run_trial_batch(specs, static_cast<unsigned>(cfg.get_int("threads")));
    const fs::path file = fs::path(cfg.get_string("output_dir")) / "min_nodes.csv";
    write_csv(file, min_nodes_table(results, metadata(cfg)));
    for (const auto& r : results) {
        std::cout << "nu=" << r.nu << " m_h=" << (r.m_h ? std::to_string(*r.m_h) : "none") << " trials:";
        for (const auto& t : r.trials) std::cout << ' ' << (t.m_h ? std::to_string(*t.m_h) : "none");
        std::cout << '\n';
    }
    std::cout << "wrote " << file.string() << '\n';
    return kExitOk;
}

int cmd_velocity_sweep(const ExperimentConfig& cfg) {
    cfg.require({"speeds"});
    const SolverConfig solver = cfg.solver();
    const std::vector<double> speeds = cfg.get_doubles("speeds");
    if (speeds.empty()) throw ConfigError("velocity-sweep: empty speed list");
    VelocitySweepOptions options;
    options.time_cap = cfg.get_double("time_cap");
    options.locked_factor = cfg.get_double("locked_factor");
    options.record_every = static_cast<std::size_t>(cfg.get_int("record_every"));
    const auto m = static_cast<std::size_t>(cfg.get_int("m"));
    NudgeConfig(cfg.get_double("mu"), ObservationSet::sweeping_probe(solver.n_points, m, 0.0), 0.0, solver);

    double spin_up_time = 0.0;
    const Field u_start = start_state(cfg, solver, spin_up_time);
    const auto results =
        velocity_sweep(solver, u_start, cfg.get_double("mu"), m, speeds, cfg.get_double("threshold"), options);

    auto meta = metadata(cfg);
    meta["spin_up_time"] = format_double(spin_up_time);
    PowerLawFit fit;
    fit.c0 = cfg.get_double("c0");
    fit.p = cfg.get_double("p");
    const double lambda = estimate_length_scale(fit, solver.nu, solver.domain_length).lambda;
    const double max_speed = *std::max_element(speeds.begin(), speeds.end());
    std::string conjectured;
    for (auto k : conjectured_locked_speeds(solver.n_points, m, lambda / solver.dx(),
                                            static_cast<std::size_t>(std::max(0.0, max_speed)))) {
        if (!conjectured.empty()) conjectured += ';';
        conjectured += std::to_string(k);
    }
    meta["conjectured_locked"] = conjectured.empty() ? "none" : conjectured;

    const fs::path file = fs::path(cfg.get_string("output_dir")) / "velocity.csv";
    write_csv(file, velocity_table(results, meta));
    for (const auto& r : results)
        std::cout << "c=" << r.c << " T=" << (r.converge_time ? format_double(*r.converge_time) : "none")
                  << (r.locked ? "  locked" : "") << '\n';
    std::cout << "wrote " << file.string() << '\n';
    return kExitOk;
}

int cmd_probe_size_study(const ExperimentConfig& cfg) {
    cfg.require({"sizes", "speeds"});
    const SolverConfig solver = cfg.solver();
    std::vector<std::size_t> sizes;
    for (auto s : cfg.get_ints("sizes")) sizes.push_back(static_cast<std::size_t>(s));
    const std::vector<double> speeds = cfg.get_doubles("speeds");
    if (sizes.empty() || speeds.empty()) throw ConfigError("probe-size-study: sizes and speeds must be non-empty");
    VelocitySweepOptions options;
    options.time_cap = cfg.get_double("time_cap");
    options.locked_factor = cfg.get_double("locked_factor");
    options.record_every = static_cast<std::size_t>(cfg.get_int("record_every"));
    NudgeConfig(cfg.get_double("mu"), ObservationSet::full_mesh(solver.n_points), 0.0, solver);

    const ProbeSizeStudy study =
        probe_size_study(solver, cfg.get_double("mu"), sizes, speeds, static_cast<std::uint64_t>(cfg.get_int("seed")),
                         cfg.get_double("threshold"), options);
    const fs::path dir = cfg.get_string("output_dir");
    write_csv(dir / "probe_size.csv", probe_size_table(study, metadata(cfg)));
    std::vector<VelocityResult> all;
    for (const auto& row : study.rows) all.insert(all.end(), row.runs.begin(), row.runs.end());
    write_csv(dir / "probe_size_runs.csv", velocity_table(all, metadata(cfg)));
    for (const auto& row : study.rows)
        std::cout << "M=" << row.m << " mean T=" << (row.mean_time ? format_double(*row.mean_time) : "none") << '\n';
    if (study.exponent)
        std::cout << "T = " << *study.prefactor << " * M^" << *study.exponent << '\n';
    else
        std::cout << "fit skipped: fewer than two sizes converged\n";
    return kExitOk;
}

int cmd_fit(const ExperimentConfig& cfg) {
    cfg.require({"input"});
    const CsvTable table = read_csv(cfg.get_string("input"));
    const auto pairs = read_min_nodes_pairs(table);
    const PowerLawFit fit = fit_power_law(pairs);
    const double length = cfg.get_double("L");

    std::vector<double> nus;
    for (const auto& [nu, mh] : pairs)
        if (std::find(nus.begin(), nus.end(), nu) == nus.end()) nus.push_back(nu);
    std::sort(nus.begin(), nus.end());
    std::vector<LengthScaleEstimate> estimates;
    for (double nu : nus) estimates.push_back(estimate_length_scale(fit, nu, length));

    const fs::path dir = cfg.get_string("output_dir");
    auto meta = table.metadata;
    meta["input"] = cfg.get_string("input");
    write_csv(dir / "fit.csv", fit_table(fit, meta));
    write_csv(dir / "lambda.csv", lambda_table(estimates, meta));
    std::cout << "m_h = " << fit.c0 << " * exp(+-" << fit.log_residual_std << ") * nu^-" << fit.p << "  (n = "
              << fit.n_points << ")\n";
    for (const auto& e : estimates) std::cout << "nu=" << e.nu << " lambda=" << e.lambda << " n_s=" << e.n_s << '\n';
    return kExitOk;
}

int cmd_estimate_lambda(const ExperimentConfig& cfg) {
    cfg.require({"nus"});
    PowerLawFit fit;
    if (cfg.has("input")) {
        fit = read_fit(read_csv(cfg.get_string("input")));
    } else {
        fit.c0 = cfg.get_double("c0");
        fit.p = cfg.get_double("p");
        fit.nu_min = 7.5e-6;
        fit.nu_max = 1e-2;
    }
    const std::vector<double> nus = cfg.get_doubles("nus");
    if (nus.empty()) throw ConfigError("estimate-lambda: empty nu list");
    std::vector<LengthScaleEstimate> estimates;
    for (double nu : nus) {
        estimates.push_back(estimate_length_scale(fit, nu, cfg.get_double("L")));
        const auto& e = estimates.back();
        std::cout << "nu=" << e.nu << " lambda=" << e.lambda << " n_s=" << e.n_s;
        if (e.extrapolated) std::cout << "  (warning: " << e.warning << ')';
        std::cout << '\n';
    }
    write_csv(fs::path(cfg.get_string("output_dir")) / "lambda.csv", lambda_table(estimates, metadata(cfg)));
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Allen-Cahn nudging data-assimilation experiments"};
    app.require_subcommand(1);

    struct Command {
        const char* name;
        const char* help;
        int (*run)(const ExperimentConfig&);
    };
    const Command commands[] = {
        {"simulate", "Evolve the reference solution and write field snapshots", cmd_simulate},
        {"assimilate", "Run reference and nudged solutions in tandem and write error histories", cmd_assimilate},
        {"find-min-nodes", "Binary search for the minimum number of observation nodes", cmd_find_min_nodes},
        {"velocity-sweep", "Probe convergence time for a list of speeds", cmd_velocity_sweep},
        {"probe-size-study", "Mean convergence time versus probe size", cmd_probe_size_study},
        {"fit-power-law", "Fit m_h = c0 nu^-p to a min-nodes table", cmd_fit},
        {"estimate-lambda", "Minimum length scale from a power-law fit", cmd_estimate_lambda},
    };

    CommonArgs args;
    const Command* chosen = nullptr;
    for (const auto& cmd : commands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--config", args.config_file, "key=value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--preset", args.preset, "built-in parameter set");
        sub->add_option("--set", args.overrides, "override a configuration key (key=value)")->take_all();
        sub->add_option("--out", args.out, "output directory");
        sub->callback([&chosen, &cmd] { chosen = &cmd; });
    }
    app.footer("Presets: fig1 fig3 fig4 fig5 fig6 fig7 fig8 fig9 fig10 desk");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        return chosen->run(resolve(args));
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
}

}  // namespace acda
