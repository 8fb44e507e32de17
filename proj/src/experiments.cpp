#include "pxshrink/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "pxshrink/io.hpp"

namespace pxshrink {

namespace {

// tags for deriving independent streams from one user-facing seed
constexpr std::uint64_t kDataTag = 1;
constexpr std::uint64_t kChainTag = 2;

std::string short_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

RunArtifacts make_artifacts(std::string label, Trace trace) {
    RunArtifacts out;
    out.label = std::move(label);
    out.report = diagnose(trace.tau);
    out.trace = std::move(trace);
    return out;
}

// Run the NonPX/PX pair on one dataset with a shared chain seed.
PairResult run_pair(const Dataset& data, SamplerConfig base, std::uint64_t chain_seed,
                    const std::string& label_prefix, const std::string& out_dir,
                    const ProgressFn& progress) {
    base.seed = chain_seed;

    SamplerConfig nonpx = base;
    nonpx.parameterization = Parameterization::NonPX;
    SamplerConfig px = base;
    px.parameterization = Parameterization::PX;

    PairResult result;
    result.nonpx = make_artifacts(label_prefix + "_nonpx", run_chain(data, nonpx, progress));
    result.px = make_artifacts(label_prefix + "_px", run_chain(data, px, progress));
    if (!out_dir.empty()) {
        write_run_artifacts(result.nonpx, out_dir);
        write_run_artifacts(result.px, out_dir);
    }
    return result;
}

} // namespace

SimulatedData simulate_dataset(int p, int n, double tau_true, double sigma_true,
                               LambdaGen lambda_gen, std::uint64_t seed) {
    if (p < 1 || n < 1) throw std::invalid_argument("simulate_dataset: p and n must be >= 1");
    if (!(tau_true >= 0.0) || !std::isfinite(tau_true))
        throw std::invalid_argument("simulate_dataset: tau_true must be >= 0");
    if (!(sigma_true > 0.0) || !std::isfinite(sigma_true))
        throw std::invalid_argument("simulate_dataset: sigma_true must be > 0");

    RngStream rng(seed);
    SimulatedData sim;
    sim.lambda_true.resize(p);
    sim.beta_true.resize(p);
    for (int j = 0; j < p; ++j)
        sim.lambda_true[j] =
            lambda_gen == LambdaGen::HalfCauchy ? sample_half_cauchy(rng, 1.0) : 1.0;
    for (int j = 0; j < p; ++j)
        sim.beta_true[j] = sample_normal(rng, 0.0, sigma_true * sim.lambda_true[j] * tau_true);

    std::vector<double> y(static_cast<std::size_t>(p) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j)
            y[static_cast<std::size_t>(j) * n + i] =
                sim.beta_true[j] + sample_normal(rng, 0.0, sigma_true);
    sim.data = build_dataset(std::move(y), p, n);
    return sim;
}

void write_trace_csv(const Trace& trace, const std::string& path) {
    std::string out = "iteration,tau,sigma2\n";
    out.reserve(out.size() + trace.tau.size() * 48);
    for (long i = 0; i < trace.length(); ++i) {
        out += std::to_string(i + 1);
        out += ',';
        out += format_g17(trace.tau[i]);
        out += ',';
        out += format_g17(trace.sigma2[i]);
        out += '\n';
    }
    write_file_atomic(path, out);
}

std::vector<double> load_trace_column_csv(const std::string& path, const std::string& column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty trace file");
    // header
    std::vector<std::string> names;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) names.push_back(cell);
    }
    int col = -1;
    for (std::size_t k = 0; k < names.size(); ++k)
        if (names[k] == column) col = static_cast<int>(k);
    if (col < 0) throw std::runtime_error(path + ": no column named '" + column + "'");

    std::vector<double> values;
    long lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int k = 0;
        bool found = false;
        while (std::getline(ss, cell, ',')) {
            if (k++ != col) continue;
            try {
                values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": cannot parse '" + cell + "' as a number");
            }
            found = true;
        }
        if (!found)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": missing column " +
                                     std::to_string(col + 1));
    }
    if (values.empty()) throw std::runtime_error(path + ": no data rows");
    return values;
}

void write_run_artifacts(const RunArtifacts& run, const std::string& out_dir) {
    write_trace_csv(run.trace, out_dir + "/trace_" + run.label + ".csv");
    write_file_atomic(out_dir + "/report_" + run.label + ".json", report_to_json(run.report));
}

PairResult run_global_demo(std::uint64_t seed, const std::string& out_dir,
                           const ProgressFn& progress) {
    const SimulatedData sim =
        simulate_dataset(2000, 3, 0.25, 1.25, LambdaGen::FixedOne, derive_seed(seed, kDataTag));
    SamplerConfig base;
    base.lambda_prior = LambdaPrior::fixed_one();
    base.burn = 20000;
    base.keep = 20000;
    return run_pair(sim.data, base, derive_seed(seed, kChainTag), "global", out_dir, progress);
}

CaseConfig case_config(int case_id) {
    switch (case_id) {
    case 1:
        return {1000, 5, 1.0, 1.0};
    case 2:
        return {2000, 3, 1.0, 0.1};
    case 3:
        return {5000, 2, 1.0, 0.01};
    default:
        throw std::invalid_argument("case_config: case id must be 1, 2 or 3");
    }
}

PairResult run_case_study(int case_id, std::uint64_t seed, const std::string& out_dir,
                          const ProgressFn& progress) {
    const CaseConfig cc = case_config(case_id);
    const SimulatedData sim = simulate_dataset(cc.p, cc.n, cc.tau, cc.sigma,
                                               LambdaGen::HalfCauchy, derive_seed(seed, kDataTag));
    SamplerConfig base;
    base.lambda_prior = LambdaPrior::horseshoe();
    base.burn = 20000;
    base.keep = 20000;
    return run_pair(sim.data, base, derive_seed(seed, kChainTag),
                    "case" + std::to_string(case_id), out_dir, progress);
}

void GridSpec::validate() const {
    if (p < 1) throw std::invalid_argument("grid: p must be >= 1");
    if (tau_values.empty() || n_values.empty())
        throw std::invalid_argument("grid: tau and n lists must be nonempty");
    if (datasets_per_cell < 1) throw std::invalid_argument("grid: datasets_per_cell must be >= 1");
    if (keep < 8 || burn < 0) throw std::invalid_argument("grid: invalid iteration counts");
    for (double t : tau_values)
        if (!(t >= 0.0)) throw std::invalid_argument("grid: tau values must be >= 0");
    for (int n : n_values)
        if (n < 1) throw std::invalid_argument("grid: n values must be >= 1");
}

GridSpec desk_grid_spec(std::uint64_t seed) {
    GridSpec spec;
    spec.p = 200;
    spec.tau_values = {0.01, 1.0};
    spec.n_values = {2, 5};
    spec.datasets_per_cell = 3;
    spec.keep = 20000;
    spec.burn = 5000;
    spec.master_seed = seed;
    return spec;
}

GridSpec full_grid_spec(std::uint64_t seed) {
    GridSpec spec;
    spec.p = 1000;
    spec.tau_values = {0.01, 0.05, 0.1, 0.5, 1.0};
    spec.n_values = {2, 3, 5, 10};
    spec.datasets_per_cell = 10;
    spec.keep = 100000;
    spec.burn = 20000;
    spec.master_seed = seed;
    return spec;
}

const GridCell* GridResult::cell(int n, double tau) const {
    for (const GridCell& c : cells)
        if (c.n == n && c.tau == tau) return &c;
    return nullptr;
}

GridResult run_grid_experiment(const GridSpec& spec, int jobs, const std::string& out_dir,
                               const GridRowFn& on_row) {
    spec.validate();
    if (jobs < 1) jobs = 1;

    struct Task {
        std::size_t ti, ni;
        int rep;
    };
    std::vector<Task> tasks;
    for (std::size_t ni = 0; ni < spec.n_values.size(); ++ni)
        for (std::size_t ti = 0; ti < spec.tau_values.size(); ++ti)
            for (int rep = 0; rep < spec.datasets_per_cell; ++rep)
                tasks.push_back({ti, ni, rep});

    GridResult result;
    result.spec = spec;
    result.rows.resize(tasks.size());

    std::atomic<std::size_t> next{0};
    std::mutex row_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            const double tau = spec.tau_values[task.ti];
            const int n = spec.n_values[task.ni];

            GridRow row;
            row.tau = tau;
            row.n = n;
            row.dataset_index = task.rep;
            const std::uint64_t cell_seed =
                derive_seed(spec.master_seed, task.ti, task.ni, static_cast<std::uint64_t>(task.rep));
            try {
                const SimulatedData sim =
                    simulate_dataset(spec.p, n, tau, spec.sigma_true, LambdaGen::HalfCauchy,
                                     derive_seed(cell_seed, kDataTag));
                SamplerConfig base;
                base.lambda_prior = LambdaPrior::horseshoe();
                base.burn = spec.burn;
                base.keep = spec.keep;
                base.seed = derive_seed(cell_seed, kChainTag);

                SamplerConfig nonpx = base;
                nonpx.parameterization = Parameterization::NonPX;
                SamplerConfig px = base;
                px.parameterization = Parameterization::PX;

                const Trace trace_nonpx = run_chain(sim.data, nonpx);
                const Trace trace_px = run_chain(sim.data, px);
                row.te_nonpx = effective_sample_size(trace_nonpx.tau);
                row.te_px = effective_sample_size(trace_px.tau);
                row.re = row.te_px / row.te_nonpx;
            } catch (const chain_diverged_error&) {
                row.failed = true;
                row.te_px = row.te_nonpx = row.re = std::nan("");
            }
            result.rows[i] = row;
            if (on_row) {
                std::lock_guard<std::mutex> lock(row_mutex);
                on_row(row);
            }
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    // per-cell averages over the replicates that finished
    for (std::size_t ni = 0; ni < spec.n_values.size(); ++ni) {
        for (std::size_t ti = 0; ti < spec.tau_values.size(); ++ti) {
            GridCell cell;
            cell.tau = spec.tau_values[ti];
            cell.n = spec.n_values[ni];
            for (const GridRow& row : result.rows) {
                if (row.failed || row.n != cell.n || row.tau != cell.tau) continue;
                cell.mean_te_px += row.te_px;
                cell.mean_te_nonpx += row.te_nonpx;
                cell.mean_re += row.re;
                ++cell.n_ok;
            }
            if (cell.n_ok > 0) {
                cell.mean_te_px /= cell.n_ok;
                cell.mean_te_nonpx /= cell.n_ok;
                cell.mean_re /= cell.n_ok;
            } else {
                cell.mean_te_px = cell.mean_te_nonpx = cell.mean_re = std::nan("");
            }
            result.cells.push_back(cell);
        }
    }

    if (!out_dir.empty()) write_grid_csv(result, out_dir + "/grid_result.csv");
    return result;
}

void write_grid_csv(const GridResult& result, const std::string& path) {
    std::string out = "n,tau,dataset_index,te_px,te_nonpx,re\n";
    for (const GridRow& row : result.rows) {
        out += std::to_string(row.n);
        out += ',';
        out += format_g17(row.tau);
        out += ',';
        out += std::to_string(row.dataset_index);
        out += ',';
        out += format_g17(row.te_px);
        out += ',';
        out += format_g17(row.te_nonpx);
        out += ',';
        out += format_g17(row.re);
        out += '\n';
    }
    write_file_atomic(path, out);
}

std::vector<VSweepEntry> run_v_sweep(const VSweepSpec& spec, std::uint64_t seed,
                                     const std::string& out_dir, const ProgressFn& progress) {
    if (spec.v_values.empty()) throw std::invalid_argument("v sweep: v list must be nonempty");
    for (double v : spec.v_values)
        if (!(v > 0.0)) throw std::invalid_argument("v sweep: v values must be > 0");

    const SimulatedData sim =
        simulate_dataset(spec.p, spec.n, spec.tau_true, spec.sigma_true, LambdaGen::HalfCauchy,
                         derive_seed(seed, kDataTag));
    const std::uint64_t chain_seed = derive_seed(seed, kChainTag);

    std::vector<VSweepEntry> entries;
    for (double v : spec.v_values) {
        SamplerConfig config;
        config.parameterization = Parameterization::PX;
        config.lambda_prior = LambdaPrior::trunc_normal(v);
        config.burn = spec.burn;
        config.keep = spec.keep;
        config.seed = chain_seed;

        VSweepEntry entry;
        entry.v = v;
        entry.run = make_artifacts("v" + short_num(v), run_chain(sim.data, config, progress));
        if (!out_dir.empty()) write_run_artifacts(entry.run, out_dir);
        entries.push_back(std::move(entry));
    }
    return entries;
}

} // namespace pxshrink
