#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pxshrink/rng.hpp"

namespace pxshrink {

// Replicated observations plus the per-coordinate sufficient statistics the
// samplers actually touch. Immutable after construction.
struct Dataset {
    int p = 0; // coordinates
    int n = 0; // replicates per coordinate
    std::vector<double> y;         // p x n, row-major
    std::vector<double> ybar;      // row means
    std::vector<double> row_sum;   // sum_i y_ij
    std::vector<double> row_sumsq; // sum_i y_ij^2

    double yval(int j, int i) const { return y[static_cast<std::size_t>(j) * n + i]; }
};

Dataset build_dataset(std::vector<double> y, int p, int n);

// CSV: rows are coordinates, columns replicates, no header. Values are written
// with 17 significant digits so a save/load round trip is exact.
Dataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const Dataset& data, const std::string& path);

enum class LambdaPriorKind { FixedOne, Horseshoe, TruncNormal, DoubleExponential };

struct LambdaPrior {
    LambdaPriorKind kind = LambdaPriorKind::Horseshoe;
    double v = 1.0; // TruncNormal variance

    static LambdaPrior fixed_one() { return {LambdaPriorKind::FixedOne, 1.0}; }
    static LambdaPrior horseshoe() { return {LambdaPriorKind::Horseshoe, 1.0}; }
    static LambdaPrior trunc_normal(double v) { return {LambdaPriorKind::TruncNormal, v}; }
    static LambdaPrior double_exponential() { return {LambdaPriorKind::DoubleExponential, 1.0}; }
};

enum class Parameterization { NonPX, PX };
enum class Sigma2UpdateMode { ExactMarginal, AppendixCompat };

// Horseshoe local scales can be updated either through the auxiliary
// inverse-gamma mixture (both parameterizations) or by slice sampling the
// precision (NonPX only).
enum class LambdaUpdateScheme { Aux, Slice };

// Global-scale prior: tau = |Delta| g with Delta ~ N(m,1), g^2 ~ IG(a/2, b/2).
// (m=0, a=b=1) is the half-Cauchy.
struct TauPrior {
    double m = 0.0;
    double a = 1.0;
    double b = 1.0;

    bool is_half_cauchy() const { return m == 0.0 && a == 1.0 && b == 1.0; }
    static TauPrior half_cauchy() { return {0.0, 1.0, 1.0}; }
    static TauPrior noncentral_t(double m, double a, double b) { return {m, a, b}; }
};

struct SamplerConfig {
    Parameterization parameterization = Parameterization::PX;
    LambdaPrior lambda_prior = LambdaPrior::horseshoe();
    LambdaUpdateScheme lambda_scheme = LambdaUpdateScheme::Aux;
    Sigma2UpdateMode sigma2_mode = Sigma2UpdateMode::ExactMarginal;
    TauPrior tau_prior = TauPrior::half_cauchy();
    // Conjugate IG(shape, rate) prior on sigma^2; (0,0) is the default
    // scale-invariant p(sigma) ~ 1/sigma.
    double sigma2_prior_shape = 0.0;
    double sigma2_prior_rate = 0.0;
    long burn = 0;
    long keep = 1;
    int thin = 1;
    std::uint64_t seed = 42;
    bool store_vectors = false;
    double init_tau = 1.0;

    void validate() const; // throws std::invalid_argument
};

// All latent quantities of one chain. beta is on the observation scale; theta
// is rederived from beta after each sweep (beta = sigma*lambda*theta, with an
// extra Delta factor under PX). lambda may carry sign; only lambda^2 enters
// the model.
struct ChainState {
    std::vector<double> beta;
    std::vector<double> theta;
    std::vector<double> lambda;
    double tau = 1.0;
    double sigma2 = 1.0;
    double delta = 1.0; // PX only
    double g = 1.0;     // PX only
    NumericEventCounter numeric_events = 0;

    int p() const { return static_cast<int>(beta.size()); }
};

ChainState make_initial_state(const Dataset& data, const SamplerConfig& config);

struct Trace {
    std::vector<double> tau;
    std::vector<double> sigma2;
    std::vector<std::vector<double>> beta;   // keep x p when store_vectors
    std::vector<std::vector<double>> lambda; // keep x p when store_vectors
    SamplerConfig config;
    double wall_seconds = 0.0;

    long length() const { return static_cast<long>(tau.size()); }
};

// Raised when a sweep produces non-finite state; carries whatever was
// recorded before the failure.
class chain_diverged_error : public std::runtime_error {
public:
    chain_diverged_error(const std::string& what, long iteration_, Trace partial_ = {})
        : std::runtime_error(what), iteration(iteration_), partial(std::move(partial_)) {}

    long iteration;
    Trace partial;
};

} // namespace pxshrink
