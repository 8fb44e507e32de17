#include "pxshrink/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "CLI11.hpp"

#include "pxshrink/diagnostics.hpp"
#include "pxshrink/experiments.hpp"
#include "pxshrink/io.hpp"

namespace pxshrink::cli {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

// Flat `key = value` overlay with `#` comments. Keys map to long option names
// of the chosen subcommand; explicit command-line flags take precedence, so a
// key is only injected when its option is absent from the arguments.
std::vector<std::string> apply_config_overlay(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw CLI::ValidationError("--config", "missing file path");
            path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (path.empty()) return args;

    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--config", path + ":" + std::to_string(lineno) +
                                                       ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw CLI::ValidationError("--config", path + ":" + std::to_string(lineno) +
                                                       ": empty key");
        const std::string flag = "--" + key;
        bool given = false;
        for (const std::string& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0) given = true;
        if (!given) args.push_back(flag + "=" + value);
    }
    return args;
}

// inert option so --config shows up in every subcommand's --help; the overlay
// itself is applied before CLI11 parses
void document_config_flag(CLI::App* cmd) {
    static std::string sink;
    cmd->add_option("--config", sink, "flat key=value config file; flags take precedence");
}

ProgressFn stderr_tick(const std::string& label) {
    return [label](long iter, long total) {
        std::fprintf(stderr, "[%s] iteration %ld/%ld\n", label.c_str(), iter, total);
    };
}

void print_report_summary(const std::string& label, const DiagnosticsReport& report) {
    std::printf("%s: T=%ld kappa=%.6g t_e=%.6g truncation_lag=%d\n", label.c_str(),
                report.trace_length, report.kappa, report.t_e, report.truncation_lag);
}

struct SimFlags {
    int p = 100;
    int n = 3;
    double tau = 0.1;
    double sigma = 1.0;
    LambdaGen lambda_gen = LambdaGen::HalfCauchy;
};

void add_sim_flags(CLI::App* cmd, SimFlags& flags) {
    cmd->add_option("--p", flags.p, "number of coordinates")->check(CLI::PositiveNumber);
    cmd->add_option("--n", flags.n, "replicates per coordinate")->check(CLI::PositiveNumber);
    cmd->add_option("--tau", flags.tau, "true global scale")->check(CLI::NonNegativeNumber);
    cmd->add_option("--sigma", flags.sigma, "true noise scale")->check(CLI::PositiveNumber);
    const std::map<std::string, LambdaGen> gens{{"halfcauchy", LambdaGen::HalfCauchy},
                                                {"one", LambdaGen::FixedOne}};
    cmd->add_option("--lambda-gen", flags.lambda_gen, "local scale generator for simulation")
        ->transform(CLI::CheckedTransformer(gens, CLI::ignore_case))
        ->default_str("halfcauchy");
}

} // namespace

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"Gibbs samplers for global-local shrinkage models, with and without "
                 "parameter expansion, plus mixing diagnostics"};
    app.require_subcommand(1);

    // ---- simulate ----
    auto* sim_cmd = app.add_subcommand("simulate", "simulate a dataset and write it as CSV");
    document_config_flag(sim_cmd);
    SimFlags sim_flags;
    add_sim_flags(sim_cmd, sim_flags);
    std::uint64_t sim_seed = 42;
    std::string sim_out;
    sim_cmd->add_option("--seed", sim_seed, "RNG seed")->capture_default_str();
    sim_cmd->add_option("--out", sim_out, "output CSV path")->required();

    // ---- run ----
    auto* run_cmd = app.add_subcommand("run", "run one chain and write trace and report");
    document_config_flag(run_cmd);
    SimFlags run_sim;
    add_sim_flags(run_cmd, run_sim);
    std::string run_data;
    run_cmd->add_option("--data", run_data,
                        "dataset CSV (rows=coordinates, cols=replicates); when omitted a "
                        "dataset is simulated from --p/--n/--tau/--sigma");
    bool run_px = true;
    run_cmd->add_flag("--px,!--no-px", run_px, "parameter-expanded sampler (default on)");
    std::string run_prior = "horseshoe";
    run_cmd
        ->add_option("--prior", run_prior,
                     "local scale prior: horseshoe, lasso, truncnormal, one")
        ->check(CLI::IsMember({"horseshoe", "lasso", "truncnormal", "one"}, CLI::ignore_case))
        ->capture_default_str();
    double run_v = 1.0;
    run_cmd->add_option("--v", run_v, "variance of the N+(1,v) local prior (truncnormal)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    std::string run_scheme = "aux";
    run_cmd
        ->add_option("--lambda-scheme", run_scheme,
                     "horseshoe local update: aux or slice (slice is NonPX only)")
        ->check(CLI::IsMember({"aux", "slice"}, CLI::ignore_case))
        ->capture_default_str();
    std::string run_sigma2_mode = "exact";
    run_cmd
        ->add_option("--sigma2-mode", run_sigma2_mode,
                     "residual form for the sigma^2 draw: exact or appendix")
        ->check(CLI::IsMember({"exact", "appendix"}, CLI::ignore_case))
        ->capture_default_str();
    double nct_m = 0.0, nct_a = 1.0, nct_b = 1.0;
    run_cmd->add_option("--nct-m", nct_m, "global prior location (PX only)")->capture_default_str();
    run_cmd->add_option("--nct-a", nct_a, "global prior shape a (PX only)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    run_cmd->add_option("--nct-b", nct_b, "global prior shape b (PX only)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    long run_burn = 1000, run_keep = 1000;
    int run_thin = 1;
    std::uint64_t run_seed = 42;
    std::string run_label = "chain", run_out_dir = ".";
    run_cmd->add_option("--burn", run_burn, "burn-in sweeps")->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    run_cmd->add_option("--keep", run_keep, "kept draws")->check(CLI::PositiveNumber)
        ->capture_default_str();
    run_cmd->add_option("--thin", run_thin, "record every thin-th sweep")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    run_cmd->add_option("--seed", run_seed, "RNG seed")->capture_default_str();
    run_cmd->add_option("--label", run_label, "label used in output file names")
        ->capture_default_str();
    run_cmd->add_option("--out-dir", run_out_dir, "output directory")->capture_default_str();

    // ---- demo-global ----
    auto* demo_cmd = app.add_subcommand(
        "demo-global", "global-shrinkage showcase: both samplers, lambda fixed at one");
    document_config_flag(demo_cmd);
    std::uint64_t demo_seed = 42;
    std::string demo_out_dir = ".";
    demo_cmd->add_option("--seed", demo_seed, "RNG seed")->capture_default_str();
    demo_cmd->add_option("--out-dir", demo_out_dir, "output directory")->capture_default_str();

    // ---- case ----
    auto* case_cmd =
        app.add_subcommand("case", "horseshoe case study (1, 2 or 3), both samplers");
    document_config_flag(case_cmd);
    int case_id = 1;
    std::uint64_t case_seed = 42;
    std::string case_out_dir = ".";
    case_cmd->add_option("--case", case_id, "case id: 1 (p=1000,n=5), 2 (p=2000,n=3), 3 (p=5000,n=2)")
        ->check(CLI::Range(1, 3))
        ->capture_default_str();
    case_cmd->add_option("--seed", case_seed, "RNG seed")->capture_default_str();
    case_cmd->add_option("--out-dir", case_out_dir, "output directory")->capture_default_str();

    // ---- grid ----
    auto* grid_cmd = app.add_subcommand(
        "grid", "relative-efficiency grid over (tau, n) cells, PX vs NonPX");
    document_config_flag(grid_cmd);
    bool grid_desk = false, grid_full = false;
    grid_cmd->add_flag("--desk-scale", grid_desk, "small grid: p=200, 2e4 kept draws, 3 datasets/cell (default)");
    grid_cmd->add_flag("--full-scale", grid_full,
                       "full grid: p=1000, 1e5 kept draws, 10 datasets/cell (hours of runtime)");
    std::optional<int> grid_p, grid_datasets;
    std::optional<long> grid_keep, grid_burn;
    std::vector<double> grid_taus;
    std::vector<int> grid_ns;
    grid_cmd->add_option("--p", grid_p, "override: coordinates per dataset");
    grid_cmd->add_option("--datasets", grid_datasets, "override: datasets per cell");
    grid_cmd->add_option("--keep", grid_keep, "override: kept draws per chain");
    grid_cmd->add_option("--burn", grid_burn, "override: burn-in sweeps");
    grid_cmd->add_option("--tau-values", grid_taus, "override: tau grid values");
    grid_cmd->add_option("--n-values", grid_ns, "override: n grid values");
    int grid_jobs = 1;
    std::uint64_t grid_seed = 42;
    std::string grid_out_dir = ".";
    grid_cmd->add_option("--jobs", grid_jobs, "worker threads for grid cells")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    grid_cmd->add_option("--seed", grid_seed, "master seed")->capture_default_str();
    grid_cmd->add_option("--out-dir", grid_out_dir, "output directory")->capture_default_str();

    // ---- vsweep ----
    auto* vsweep_cmd = app.add_subcommand(
        "vsweep", "PX sampler under the N+(1,v) local prior for a list of v values");
    document_config_flag(vsweep_cmd);
    bool vsweep_desk = false;
    std::vector<double> vsweep_values = {0.0025, 0.25, 25.0};
    std::optional<int> vsweep_p;
    std::optional<long> vsweep_burn, vsweep_keep;
    std::uint64_t vsweep_seed = 42;
    std::string vsweep_out_dir = ".";
    vsweep_cmd->add_flag("--desk-scale", vsweep_desk, "shrink to p=200, 5e3 burn, 2e4 kept");
    vsweep_cmd
        ->add_option("--v-values", vsweep_values, "prior variances to sweep (default 0.05^2, 0.5^2, 5^2)")
        ->capture_default_str();
    vsweep_cmd->add_option("--p", vsweep_p, "override: coordinates (default 1000)");
    vsweep_cmd->add_option("--burn", vsweep_burn, "override: burn-in sweeps (default 2e4)");
    vsweep_cmd->add_option("--keep", vsweep_keep, "override: kept draws (default 2e4)");
    vsweep_cmd->add_option("--seed", vsweep_seed, "RNG seed")->capture_default_str();
    vsweep_cmd->add_option("--out-dir", vsweep_out_dir, "output directory")->capture_default_str();

    // ---- diag ----
    auto* diag_cmd =
        app.add_subcommand("diag", "diagnostics report for a column of an existing trace CSV");
    document_config_flag(diag_cmd);
    std::string diag_trace, diag_column = "tau", diag_out;
    diag_cmd->add_option("--trace", diag_trace, "trace CSV path")->required();
    diag_cmd->add_option("--column", diag_column, "column to analyze")->capture_default_str();
    diag_cmd->add_option("--out", diag_out, "report JSON path (stdout summary always printed)");

    // argv-style parse so CLI11 sees arguments in their natural order
    std::vector<std::string> expanded;
    std::vector<const char*> argv;
    try {
        expanded = apply_config_overlay(args);
        argv.reserve(expanded.size() + 1);
        argv.push_back("pxshrink");
        for (const std::string& a : expanded) argv.push_back(a.c_str());
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sim_cmd->parsed()) {
            const SimulatedData sim =
                simulate_dataset(sim_flags.p, sim_flags.n, sim_flags.tau, sim_flags.sigma,
                                 sim_flags.lambda_gen, sim_seed);
            save_dataset_csv(sim.data, sim_out);
            std::printf("wrote %s (p=%d, n=%d)\n", sim_out.c_str(), sim.data.p, sim.data.n);
            return 0;
        }

        if (run_cmd->parsed()) {
            Dataset data;
            if (!run_data.empty()) {
                data = load_dataset_csv(run_data);
            } else {
                data = simulate_dataset(run_sim.p, run_sim.n, run_sim.tau, run_sim.sigma,
                                        run_sim.lambda_gen, derive_seed(run_seed, 1))
                           .data;
            }
            SamplerConfig config;
            config.parameterization =
                run_px ? Parameterization::PX : Parameterization::NonPX;
            if (run_prior == "horseshoe")
                config.lambda_prior = LambdaPrior::horseshoe();
            else if (run_prior == "lasso")
                config.lambda_prior = LambdaPrior::double_exponential();
            else if (run_prior == "truncnormal")
                config.lambda_prior = LambdaPrior::trunc_normal(run_v);
            else
                config.lambda_prior = LambdaPrior::fixed_one();
            config.lambda_scheme =
                run_scheme == "slice" ? LambdaUpdateScheme::Slice : LambdaUpdateScheme::Aux;
            config.sigma2_mode = run_sigma2_mode == "appendix" ? Sigma2UpdateMode::AppendixCompat
                                                               : Sigma2UpdateMode::ExactMarginal;
            config.tau_prior = TauPrior::noncentral_t(nct_m, nct_a, nct_b);
            config.burn = run_burn;
            config.keep = run_keep;
            config.thin = run_thin;
            config.seed = derive_seed(run_seed, 2);

            const Trace trace = run_chain(data, config, stderr_tick(run_label));
            RunArtifacts art;
            art.label = run_label;
            art.report = diagnose(trace.tau);
            art.trace = trace;
            write_run_artifacts(art, run_out_dir);
            print_report_summary(run_label, art.report);
            return 0;
        }

        if (demo_cmd->parsed()) {
            const PairResult result =
                run_global_demo(demo_seed, demo_out_dir, stderr_tick("global"));
            print_report_summary(result.nonpx.label, result.nonpx.report);
            print_report_summary(result.px.label, result.px.report);
            return 0;
        }

        if (case_cmd->parsed()) {
            const PairResult result =
                run_case_study(case_id, case_seed, case_out_dir,
                               stderr_tick("case" + std::to_string(case_id)));
            print_report_summary(result.nonpx.label, result.nonpx.report);
            print_report_summary(result.px.label, result.px.report);
            return 0;
        }

        if (grid_cmd->parsed()) {
            if (grid_desk && grid_full)
                throw CLI::ValidationError("grid", "--desk-scale and --full-scale conflict");
            GridSpec spec = grid_full ? full_grid_spec(grid_seed) : desk_grid_spec(grid_seed);
            if (grid_p) spec.p = *grid_p;
            if (grid_datasets) spec.datasets_per_cell = *grid_datasets;
            if (grid_keep) spec.keep = *grid_keep;
            if (grid_burn) spec.burn = *grid_burn;
            if (!grid_taus.empty()) spec.tau_values = grid_taus;
            if (!grid_ns.empty()) spec.n_values = grid_ns;

            const GridResult result =
                run_grid_experiment(spec, grid_jobs, grid_out_dir, [](const GridRow& row) {
                    std::fprintf(stderr, "[grid] n=%d tau=%g dataset %d: %s\n", row.n, row.tau,
                                 row.dataset_index, row.failed ? "diverged" : "done");
                });
            for (const GridCell& cell : result.cells)
                std::printf("cell n=%d tau=%g: mean_re=%.6g mean_te_px=%.6g mean_te_nonpx=%.6g "
                            "(datasets ok: %d)\n",
                            cell.n, cell.tau, cell.mean_re, cell.mean_te_px, cell.mean_te_nonpx,
                            cell.n_ok);
            return 0;
        }

        if (vsweep_cmd->parsed()) {
            VSweepSpec spec;
            if (vsweep_desk) {
                spec.p = 200;
                spec.burn = 5000;
                spec.keep = 20000;
            }
            spec.v_values = vsweep_values;
            if (vsweep_p) spec.p = *vsweep_p;
            if (vsweep_burn) spec.burn = *vsweep_burn;
            if (vsweep_keep) spec.keep = *vsweep_keep;
            const std::vector<VSweepEntry> entries =
                run_v_sweep(spec, vsweep_seed, vsweep_out_dir, stderr_tick("vsweep"));
            for (const VSweepEntry& entry : entries)
                print_report_summary(entry.run.label, entry.run.report);
            return 0;
        }

        if (diag_cmd->parsed()) {
            const std::vector<double> values = load_trace_column_csv(diag_trace, diag_column);
            const DiagnosticsReport report = diagnose(values);
            if (!diag_out.empty()) write_file_atomic(diag_out, report_to_json(report));
            print_report_summary(diag_column, report);
            return 0;
        }
    } catch (const chain_diverged_error& e) {
        std::fprintf(stderr, "error: chain diverged: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 1;
}

} // namespace pxshrink::cli
