// Acceptance suite: one line per criterion, nonzero exit if any required
// criterion fails. Full-scale grid checks (criteria 5b and 6) run only when
// PXSHRINK_FULL_SCALE=1 because they take hours of CPU.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "pxshrink/cli.hpp"
#include "pxshrink/experiments.hpp"

#include "oracles.hpp"

using namespace pxshrink;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(bool pass, const std::string& line) {
    std::printf("[%s] %s\n", pass ? "PASS" : "FAIL", line.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

void skip(const std::string& line) { std::printf("[SKIP] %s\n", line.c_str()); }

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// ---------------------------------------------------------------------------
// criterion 1: conditional stationarity of every nonstandard update
// ---------------------------------------------------------------------------

double ks_tau_slice() {
    const Dataset data = build_dataset(std::vector<double>(10, 0.0), 10, 1);
    SamplerConfig config;
    config.parameterization = Parameterization::NonPX;
    ChainState state = make_initial_state(data, config);
    state.theta.assign(10, std::sqrt(0.5)); // sum theta^2 = 5
    RngStream rng(101);
    std::vector<double> eta(100000);
    for (double& e : eta) {
        update_tau_slice(state, rng);
        e = 1.0 / (state.tau * state.tau);
    }
    const oracles::QuadratureCdf target(
        [](double e) { return std::pow(e, 4.5) * std::exp(-2.5 * e) / (1.0 + e); }, 1e-9, 60.0);
    return oracles::ks_distance(eta, target);
}

double ks_lambda_slice() {
    const Dataset data = build_dataset({0.0}, 1, 1);
    SamplerConfig config;
    config.parameterization = Parameterization::NonPX;
    config.lambda_scheme = LambdaUpdateScheme::Slice;
    ChainState state = make_initial_state(data, config);
    state.beta = {1.0}; // mu = beta/(sigma tau) = 1
    RngStream rng(102);
    std::vector<double> eta(100000);
    for (double& e : eta) {
        update_lambda_horseshoe_slice(state, rng);
        e = 1.0 / (state.lambda[0] * state.lambda[0]);
    }
    const oracles::QuadratureCdf target(
        [](double e) { return std::exp(-0.5 * e) / (1.0 + e); }, 1e-9, 150.0);
    return oracles::ks_distance(eta, target);
}

double ks_lambda_aux_prior_path() {
    const Dataset data = build_dataset({0.5}, 1, 1);
    SamplerConfig config;
    config.parameterization = Parameterization::NonPX;
    ChainState state = make_initial_state(data, config);
    state.theta = {0.0}; // zero likelihood: the pair (V, lambda) walks the prior
    RngStream rng(103);
    std::vector<double> abs_lambda(100000);
    for (double& l : abs_lambda) {
        update_lambda_horseshoe_aux(state, data, config, rng);
        l = std::abs(state.lambda[0]);
    }
    return oracles::ks_distance(abs_lambda,
                                [](double x) { return 2.0 / M_PI * std::atan(x); });
}

double ks_lambda_lasso() {
    const Dataset data = build_dataset({0.0}, 1, 1);
    SamplerConfig config;
    config.parameterization = Parameterization::NonPX;
    config.lambda_prior = LambdaPrior::double_exponential();
    ChainState state = make_initial_state(data, config);
    state.beta = {0.5}; // mu = 0.5
    RngStream rng(104);
    std::vector<double> lam(100000);
    for (double& l : lam) {
        update_lambda_lasso(state, rng);
        l = state.lambda[0];
    }
    const oracles::QuadratureCdf target(
        [](double l) { return std::exp(-0.125 / (l * l) - 0.5 * l * l); }, 1e-6, 12.0);
    return oracles::ks_distance(lam, target);
}

struct PxTauKs {
    double ks_g;
    double ks_delta;
};

PxTauKs ks_tau_px() {
    // frozen theta/lambda and a fixed small dataset
    const int p = 10;
    SimulatedData sim = simulate_dataset(p, 2, 0.5, 1.0, LambdaGen::FixedOne, 105);
    SamplerConfig config;
    config.parameterization = Parameterization::PX;
    ChainState frozen = make_initial_state(sim.data, config);
    frozen.theta.assign(p, std::sqrt(0.5)); // sum theta^2 = 5
    RngStream rng(106);

    std::vector<double> inv_g2(100000), delta(100000);
    for (std::size_t i = 0; i < inv_g2.size(); ++i) {
        ChainState state = frozen;
        update_tau_px(state, sim.data, config, rng);
        inv_g2[i] = 1.0 / (state.g * state.g);
        delta[i] = state.delta;
    }

    // 1/g^2 ~ Gamma((p+1)/2, (1+S)/2) = Gamma(5.5, 3)
    const oracles::QuadratureCdf g_target(
        [](double x) { return std::pow(x, 4.5) * std::exp(-3.0 * x); }, 1e-9, 30.0);
    // Delta: quadrature of N(Delta|0,1) * prod_j N(ybar_j | sigma Delta l_j t_j, sigma^2/n)
    const Dataset& data = sim.data;
    const ChainState& fz = frozen;
    const oracles::QuadratureCdf d_target(
        [&data, &fz](double d) {
            double log_q = -0.5 * d * d;
            for (int j = 0; j < data.p; ++j) {
                const double mean = d * fz.lambda[j] * fz.theta[j]; // sigma = 1
                const double resid = data.ybar[j] - mean;
                log_q += -0.5 * data.n * resid * resid;
            }
            return std::exp(log_q);
        },
        -4.0, 4.0);
    return {oracles::ks_distance(inv_g2, g_target), oracles::ks_distance(delta, d_target)};
}

void criterion_1() {
    const double tol = 0.02;
    const double ks1 = ks_tau_slice();
    const double ks2 = ks_lambda_slice();
    const double ks3 = ks_lambda_aux_prior_path();
    const double ks4 = ks_lambda_lasso();
    const PxTauKs ks5 = ks_tau_px();
    const bool pass =
        ks1 < tol && ks2 < tol && ks3 < tol && ks4 < tol && ks5.ks_g < tol && ks5.ks_delta < tol;
    report(pass, fmt("criterion 1: conditional stationarity at 1e5 iterates, KS tol %.2f "
                     "(tau slice %.4f, lambda slice %.4f, aux prior %.4f, lasso %.4f, "
                     "g %.4f, Delta %.4f)",
                     tol, ks1, ks2, ks3, ks4, ks5.ks_g, ks5.ks_delta));
}

// ---------------------------------------------------------------------------
// criterion 2: joint correctness via successive-conditional simulation
// ---------------------------------------------------------------------------

// One successive-conditional chain: exact prior draw, then alternate one sweep
// with a fresh data draw. Every recorded tau is marginally prior-distributed,
// so pooling many short independent chains bounds the ecdf noise even though
// a single chain can linger for ages in the half-Cauchy tail.
void geweke_chain(Parameterization par, std::uint64_t seed, long cycles,
                  std::vector<double>& out) {
    const int p = 10;
    const int n = 2;
    SamplerConfig config;
    config.parameterization = par;
    config.lambda_prior = LambdaPrior::horseshoe();
    config.sigma2_mode = Sigma2UpdateMode::ExactMarginal;
    // a proper conjugate prior on sigma^2 so the joint model is integrable
    config.sigma2_prior_shape = 3.0;
    config.sigma2_prior_rate = 3.0;

    RngStream rng(seed);

    ChainState state;
    state.beta.assign(p, 0.0);
    state.theta.assign(p, 0.0);
    state.lambda.assign(p, 0.0);
    state.sigma2 = sample_inverse_gamma(rng, 3.0, 3.0);
    const double sigma0 = std::sqrt(state.sigma2);
    for (int j = 0; j < p; ++j) state.lambda[j] = sample_cauchy(rng, 1.0);
    if (par == Parameterization::PX) {
        state.g = std::sqrt(sample_inverse_gamma(rng, 0.5, 0.5));
        state.delta = sample_normal(rng, 0.0, 1.0);
        state.tau = std::abs(state.delta) * state.g;
        for (int j = 0; j < p; ++j) state.theta[j] = sample_normal(rng, 0.0, state.g);
        for (int j = 0; j < p; ++j)
            state.beta[j] = sigma0 * state.delta * state.lambda[j] * state.theta[j];
    } else {
        state.tau = sample_half_cauchy(rng, 1.0);
        for (int j = 0; j < p; ++j) state.theta[j] = sample_normal(rng, 0.0, state.tau);
        for (int j = 0; j < p; ++j) state.beta[j] = sigma0 * state.lambda[j] * state.theta[j];
    }

    auto resim = [&]() {
        const double sigma = std::sqrt(state.sigma2);
        std::vector<double> y(static_cast<std::size_t>(p) * n);
        for (int j = 0; j < p; ++j)
            for (int i = 0; i < n; ++i)
                y[static_cast<std::size_t>(j) * n + i] = sample_normal(rng, state.beta[j], sigma);
        return build_dataset(std::move(y), p, n);
    };

    Dataset data = resim();
    for (long c = 0; c < cycles; ++c) {
        sweep(state, data, config, rng);
        data = resim();
        out.push_back(state.tau);
    }
}

double geweke_max_decile_dev(Parameterization par, std::uint64_t seed) {
    const int chains = 8000;
    const long cycles = 100;
    std::vector<double> taus;
    taus.reserve(static_cast<std::size_t>(chains) * cycles);
    for (int k = 0; k < chains; ++k) geweke_chain(par, derive_seed(seed, k), cycles, taus);
    std::sort(taus.begin(), taus.end());
    double max_dev = 0.0;
    for (int d = 1; d <= 9; ++d) {
        const double alpha = d / 10.0;
        const double q = oracles::half_cauchy_quantile(alpha);
        max_dev = std::max(max_dev, std::abs(oracles::ecdf(taus, q) - alpha));
    }
    return max_dev;
}

void criterion_2() {
    const double tol = 0.05;
    const double nonpx = geweke_max_decile_dev(Parameterization::NonPX, 201);
    const double px = geweke_max_decile_dev(Parameterization::PX, 202);
    report(nonpx < tol && px < tol,
           fmt("criterion 2: Geweke tau-marginal vs half-Cauchy at deciles, tol %.2f "
               "(NonPX max dev %.4f, PX max dev %.4f; 8000 chains x 100 cycles each)",
               tol, nonpx, px));
}

// ---------------------------------------------------------------------------
// criterion 3: PX and NonPX estimate the same posterior
// ---------------------------------------------------------------------------

double mcse(const std::vector<double>& x) {
    return std::sqrt(oracles::variance(x) / effective_sample_size(x));
}

void criterion_3() {
    const SimulatedData sim = simulate_dataset(20, 3, 0.5, 1.0, LambdaGen::HalfCauchy, 301);
    SamplerConfig base;
    base.lambda_prior = LambdaPrior::horseshoe();
    base.burn = 5000;
    base.keep = 100000;
    base.store_vectors = true;
    base.seed = 302;

    SamplerConfig nonpx = base;
    nonpx.parameterization = Parameterization::NonPX;
    SamplerConfig px = base;
    px.parameterization = Parameterization::PX;

    const Trace trace_nonpx = run_chain(sim.data, nonpx);
    const Trace trace_px = run_chain(sim.data, px);

    bool pass = true;
    double worst = 0.0;

    auto compare = [&](const std::vector<double>& a, const std::vector<double>& b) {
        const double diff = std::abs(oracles::mean(a) - oracles::mean(b));
        const double combined = std::sqrt(mcse(a) * mcse(a) + mcse(b) * mcse(b));
        const double z = diff / combined;
        worst = std::max(worst, z);
        if (z >= 3.0) pass = false;
    };

    compare(trace_nonpx.tau, trace_px.tau);

    RngStream pick(303);
    for (int k = 0; k < 5; ++k) {
        const int j = static_cast<int>(pick.uniform01() * 20);
        std::vector<double> bn(trace_nonpx.length()), bp(trace_px.length());
        for (long i = 0; i < trace_nonpx.length(); ++i) bn[i] = trace_nonpx.beta[i][j];
        for (long i = 0; i < trace_px.length(); ++i) bp[i] = trace_px.beta[i][j];
        compare(bn, bp);
    }
    report(pass, fmt("criterion 3: PX/NonPX posterior means of tau and 5 beta_j agree within "
                     "3 combined MC standard errors over 1e5 kept draws (worst z = %.2f)",
                     worst));
}

// ---------------------------------------------------------------------------
// criteria 4 and 9a: global demo through the CLI, run twice for determinism
// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

bool same_file(const fs::path& a, const fs::path& b) { return slurp(a) == slurp(b); }

struct DemoOutcome {
    double kappa_nonpx = 0.0;
    double kappa_px = 0.0;
    double px_lag1 = 1.0;
    bool deterministic = false;
};

DemoOutcome run_demo_twice(const fs::path& root) {
    const fs::path a = root / "demo_a";
    const fs::path b = root / "demo_b";
    fs::create_directories(a);
    fs::create_directories(b);
    if (cli::dispatch({"demo-global", "--seed", "42", "--out-dir", a.string()}) != 0 ||
        cli::dispatch({"demo-global", "--seed", "42", "--out-dir", b.string()}) != 0)
        throw std::runtime_error("demo-global failed");

    DemoOutcome out;
    out.deterministic = same_file(a / "trace_global_nonpx.csv", b / "trace_global_nonpx.csv") &&
                        same_file(a / "trace_global_px.csv", b / "trace_global_px.csv") &&
                        same_file(a / "report_global_nonpx.json", b / "report_global_nonpx.json") &&
                        same_file(a / "report_global_px.json", b / "report_global_px.json");

    const auto nonpx = nlohmann::json::parse(slurp(a / "report_global_nonpx.json"));
    const auto px = nlohmann::json::parse(slurp(a / "report_global_px.json"));
    out.kappa_nonpx = nonpx["kappa"].get<double>();
    out.kappa_px = px["kappa"].get<double>();
    out.px_lag1 = px["acf"][0].get<double>();
    return out;
}

// ---------------------------------------------------------------------------
// criteria 5 and 6: efficiency grid, desk scale always, full scale on request
// ---------------------------------------------------------------------------

void criterion_5_and_6(bool full_scale) {
    GridSpec desk = desk_grid_spec(42);
    const GridResult result = run_grid_experiment(desk, 2, "");
    const GridCell* cell = result.cell(2, 0.01);
    const bool pass = cell != nullptr && cell->n_ok > 0 && cell->mean_re > 1.0;
    report(pass, fmt("criterion 5: desk grid (p=200, 2e4 kept, 3 datasets) cell n=2 tau=0.01 "
                     "mean r_e = %.2f > 1",
                     cell ? cell->mean_re : std::nan("")));

    if (!full_scale) {
        skip("criterion 5 (full scale): set PXSHRINK_FULL_SCALE=1 to run the p=1000, 1e5-draw, "
             "10-dataset cell (hours)");
        skip("criterion 6 (full scale): set PXSHRINK_FULL_SCALE=1 to check PX ESS in (300, 4000) "
             "at n=2, tau=0.01, p=1000");
        return;
    }

    GridSpec full = full_grid_spec(42);
    full.tau_values = {0.01};
    full.n_values = {2};
    const GridResult full_result = run_grid_experiment(full, 2, "");
    const GridCell* full_cell = full_result.cell(2, 0.01);
    const double re = full_cell ? full_cell->mean_re : std::nan("");
    const double te = full_cell ? full_cell->mean_te_px : std::nan("");
    report(full_cell && full_cell->n_ok > 0 && re > 3.0 && re < 40.0,
           fmt("criterion 5 (full scale): mean r_e = %.2f lies in (3, 40)", re));
    report(full_cell && full_cell->n_ok > 0 && te > 300.0 && te < 4000.0,
           fmt("criterion 6 (full scale): PX effective size per 1e5 draws = %.0f lies in "
               "(300, 4000)",
               te));
}

// ---------------------------------------------------------------------------
// criterion 7: autocorrelation grows with the local prior variance v
// ---------------------------------------------------------------------------

void criterion_7() {
    VSweepSpec spec;
    spec.p = 200;
    spec.n = 2;
    spec.tau_true = 1.0;
    spec.sigma_true = 1.0;
    spec.burn = 5000;
    spec.keep = 20000;
    spec.v_values = {0.0025, 0.25, 25.0};
    const auto entries = run_v_sweep(spec, 42, "");
    const double k_small = entries[0].run.report.kappa;
    const double k_mid = entries[1].run.report.kappa;
    const double k_large = entries[2].run.report.kappa;
    report(k_large > k_small,
           fmt("criterion 7: v sweep at desk scale, kappa(v=25) = %.2f exceeds "
               "kappa(v=0.0025) = %.2f (kappa(v=0.25) = %.2f)",
               k_large, k_small, k_mid));
}

// ---------------------------------------------------------------------------
// criterion 8: diagnostics against synthetic chains with known kappa
// ---------------------------------------------------------------------------

void criterion_8() {
    RngStream rng(801);
    std::vector<double> iid(100000), chain(100000);
    for (double& v : iid) v = sample_normal(rng, 0.0, 1.0);
    double prev = 0.0;
    for (double& v : chain) {
        prev = 0.5 * prev + sample_normal(rng, 0.0, 1.0);
        v = prev;
    }
    const double kappa_ar1 = integrated_autocorr_time(chain).kappa;
    const double ess_ratio = effective_sample_size(iid) / 1e5;
    report(std::abs(kappa_ar1 - 3.0) < 0.3 && std::abs(ess_ratio - 1.0) < 0.05,
           fmt("criterion 8: AR(1) phi=0.5 kappa = %.3f (3 +- 0.3); iid T_e/T = %.3f "
               "(1 +- 0.05)",
               kappa_ar1, ess_ratio));
}

// ---------------------------------------------------------------------------
// criterion 9: byte-identical outputs for every subcommand under a fixed seed
// ---------------------------------------------------------------------------

bool rerun_identical(const std::vector<std::string>& args_template, const fs::path& root,
                     const std::string& tag, const std::vector<std::string>& files) {
    const fs::path a = root / (tag + "_a");
    const fs::path b = root / (tag + "_b");
    fs::create_directories(a);
    fs::create_directories(b);
    auto run_into = [&](const fs::path& dir) {
        std::vector<std::string> args = args_template;
        for (std::string& s : args) {
            const auto pos = s.find("{dir}");
            if (pos != std::string::npos) s = s.substr(0, pos) + dir.string() + s.substr(pos + 5);
        }
        return cli::dispatch(args);
    };
    if (run_into(a) != 0 || run_into(b) != 0) return false;
    for (const std::string& f : files) {
        if (!fs::exists(a / f) || !fs::exists(b / f)) return false;
        if (!same_file(a / f, b / f)) return false;
    }
    return true;
}

void criterion_9(const fs::path& root, bool demo_deterministic) {
    const bool sim_ok = rerun_identical(
        {"simulate", "--p", "30", "--n", "2", "--tau", "0.1", "--seed", "42", "--out",
         "{dir}/data.csv"},
        root, "sim", {"data.csv"});

    const bool run_ok = rerun_identical(
        {"run", "--p", "40", "--n", "2", "--tau", "0.1", "--burn", "200", "--keep", "800",
         "--seed", "42", "--label", "x", "--out-dir", "{dir}"},
        root, "run", {"trace_x.csv", "report_x.json"});

    // diag twice over one fixed input
    const fs::path diag_dir = root / "diag";
    fs::create_directories(diag_dir);
    bool diag_ok =
        cli::dispatch({"run", "--p", "30", "--n", "2", "--burn", "100", "--keep", "600", "--seed",
                       "42", "--label", "d", "--out-dir", diag_dir.string()}) == 0 &&
        cli::dispatch({"diag", "--trace", (diag_dir / "trace_d.csv").string(), "--out",
                       (diag_dir / "rep_a.json").string()}) == 0 &&
        cli::dispatch({"diag", "--trace", (diag_dir / "trace_d.csv").string(), "--out",
                       (diag_dir / "rep_b.json").string()}) == 0 &&
        same_file(diag_dir / "rep_a.json", diag_dir / "rep_b.json");

    const bool grid_ok = rerun_identical(
        {"grid", "--p", "12", "--tau-values", "0.5", "--n-values", "2", "--datasets", "2",
         "--keep", "400", "--burn", "50", "--jobs", "2", "--seed", "42", "--out-dir", "{dir}"},
        root, "grid", {"grid_result.csv"});

    const bool vsweep_ok = rerun_identical(
        {"vsweep", "--p", "12", "--burn", "50", "--keep", "400", "--v-values", "0.25", "--seed",
         "42", "--out-dir", "{dir}"},
        root, "vsweep", {"trace_v0.25.csv", "report_v0.25.json"});

    const bool case_ok = rerun_identical(
        {"case", "--case", "1", "--seed", "42", "--out-dir", "{dir}"}, root, "case",
        {"trace_case1_nonpx.csv", "trace_case1_px.csv", "report_case1_nonpx.json",
         "report_case1_px.json"});

    report(sim_ok && run_ok && diag_ok && grid_ok && vsweep_ok && case_ok && demo_deterministic,
           fmt("criterion 9: byte-identical reruns (simulate %d, run %d, diag %d, grid %d, "
               "vsweep %d, case %d, demo-global %d)",
               sim_ok, run_ok, diag_ok, grid_ok, vsweep_ok, case_ok, demo_deterministic));
}

} // namespace

int main() {
    const bool full_scale = []() {
        const char* env = std::getenv("PXSHRINK_FULL_SCALE");
        return env != nullptr && std::string(env) == "1";
    }();

    const fs::path root = fs::temp_directory_path() / "pxshrink_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);

    criterion_1();
    criterion_2();
    criterion_3();

    DemoOutcome demo;
    try {
        demo = run_demo_twice(root);
        // note: a verbatim transcription of the reference R listing measures a
        // PX lag-1 ACF of ~0.86 on this exact configuration, so the 0.5 bound
        // appears unattainable for this sampler family; reported as measured
        const bool ratio_ok = demo.kappa_px < demo.kappa_nonpx / 5.0;
        const bool lag1_ok = demo.px_lag1 < 0.5;
        report(ratio_ok && lag1_ok,
               fmt("criterion 4: global demo (p=2000, n=3, tau=0.25, sigma=1.25): kappa PX = "
                   "%.2f < kappa NonPX / 5 = %.2f (%s); PX lag-1 ACF = %.3f < 0.5 (%s)",
                   demo.kappa_px, demo.kappa_nonpx / 5.0, ratio_ok ? "holds" : "violated",
                   demo.px_lag1, lag1_ok ? "holds" : "violated"));
    } catch (const std::exception& e) {
        report(false, fmt("criterion 4: global demo failed to run (%s)", e.what()));
    }

    criterion_5_and_6(full_scale);
    criterion_7();
    criterion_8();
    criterion_9(root, demo.deterministic);

    fs::remove_all(root);
    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
