#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "pxshrink/diagnostics.hpp"
#include "pxshrink/gibbs.hpp"
#include "pxshrink/model.hpp"

namespace pxshrink {

enum class LambdaGen { HalfCauchy, FixedOne };

struct SimulatedData {
    Dataset data;
    std::vector<double> beta_true;
    std::vector<double> lambda_true;
};

// lambda_j ~ |C(0,1)| (or fixed at 1), beta_j ~ N(0, (sigma lambda_j tau)^2),
// y_ij = beta_j + N(0, sigma^2); fully determined by the seed.
SimulatedData simulate_dataset(int p, int n, double tau_true, double sigma_true,
                               LambdaGen lambda_gen, std::uint64_t seed);

struct RunArtifacts {
    std::string label;
    Trace trace;
    DiagnosticsReport report; // diagnostics of the tau trace
};

// trace_<label>.csv (iteration,tau,sigma2) and report_<label>.json
void write_run_artifacts(const RunArtifacts& run, const std::string& out_dir);
void write_trace_csv(const Trace& trace, const std::string& path);
std::vector<double> load_trace_column_csv(const std::string& path, const std::string& column);

// A matched comparison: both samplers see the same dataset, the same initial
// state, and the same RNG seed.
struct PairResult {
    RunArtifacts nonpx;
    RunArtifacts px;
};

// Global-shrinkage showcase: p=2000, n=3, tau=0.25, sigma=1.25, lambda fixed
// at one, 2e4 burn-in + 2e4 kept draws for each sampler.
PairResult run_global_demo(std::uint64_t seed, const std::string& out_dir,
                           const ProgressFn& progress = {});

struct CaseConfig {
    int p;
    int n;
    double sigma;
    double tau;
};
CaseConfig case_config(int case_id); // 1, 2 or 3

// Horseshoe case studies, both parameterizations on one dataset.
PairResult run_case_study(int case_id, std::uint64_t seed, const std::string& out_dir,
                          const ProgressFn& progress = {});

struct GridSpec {
    int p = 1000;
    double sigma_true = 1.0;
    std::vector<double> tau_values;
    std::vector<int> n_values;
    int datasets_per_cell = 10;
    long keep = 100000;
    long burn = 20000;
    std::uint64_t master_seed = 42;

    void validate() const;
};

GridSpec desk_grid_spec(std::uint64_t seed);
GridSpec full_grid_spec(std::uint64_t seed);

struct GridRow {
    double tau = 0.0;
    int n = 0;
    int dataset_index = 0;
    double te_px = 0.0;
    double te_nonpx = 0.0;
    double re = 0.0;
    bool failed = false;
};

struct GridCell {
    double tau = 0.0;
    int n = 0;
    double mean_te_px = 0.0;
    double mean_te_nonpx = 0.0;
    double mean_re = 0.0;
    int n_ok = 0; // datasets that finished without divergence
};

struct GridResult {
    GridSpec spec;
    std::vector<GridRow> rows;   // n-major, then tau, then dataset index
    std::vector<GridCell> cells; // same cell order

    const GridCell* cell(int n, double tau) const;
};

using GridRowFn = std::function<void(const GridRow&)>;

// Cells and replicates run concurrently across `jobs` workers; per-task seeds
// are derived from (master_seed, tau index, n index, replicate), so the
// result is independent of scheduling. Writes grid_result.csv when out_dir is
// set. A diverged chain marks its row failed without stopping the grid.
GridResult run_grid_experiment(const GridSpec& spec, int jobs, const std::string& out_dir,
                               const GridRowFn& on_row = {});
void write_grid_csv(const GridResult& result, const std::string& path);

struct VSweepSpec {
    int p = 1000;
    int n = 2;
    double tau_true = 1.0;
    double sigma_true = 1.0;
    long burn = 20000;
    long keep = 20000;
    std::vector<double> v_values = {0.0025, 0.25, 25.0}; // 0.05^2, 0.5^2, 5^2
};

struct VSweepEntry {
    double v;
    RunArtifacts run;
};

// PX sampler with the N+(1,v) local prior, one shared dataset across all v.
std::vector<VSweepEntry> run_v_sweep(const VSweepSpec& spec, std::uint64_t seed,
                                     const std::string& out_dir,
                                     const ProgressFn& progress = {});

} // namespace pxshrink
