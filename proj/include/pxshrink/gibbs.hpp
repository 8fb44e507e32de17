#pragma once

#include <functional>

#include "pxshrink/model.hpp"
#include "pxshrink/rng.hpp"

namespace pxshrink {

// Conditional updates. Each one reads the current state, draws from the
// stated conditional, and writes the result back. Degenerate conditioning
// values (theta_j = 0, mu_j = 0, lambda_j = 0) fall back to the corresponding
// prior draw and bump state.numeric_events.

void update_beta_block(ChainState& state, const Dataset& data, const SamplerConfig& config,
                       RngStream& rng);

// Residual quadratic form feeding the sigma^2 draw; exposed for testing.
double residual_quadratic(const ChainState& state, const Dataset& data, Sigma2UpdateMode mode);

void update_sigma2(ChainState& state, const Dataset& data, const SamplerConfig& config,
                   RngStream& rng);

// Deterministic core of the slice move for eta = 1/tau^2: both uniform draws
// are passed in as fractions of their ranges.
double tau_slice_kernel(double sum_theta_sq, int p, double eta_current, double u_fraction,
                        double q_fraction, NumericEventCounter* events = nullptr);

void update_tau_slice(ChainState& state, RngStream& rng); // NonPX

void update_tau_px(ChainState& state, const Dataset& data, const SamplerConfig& config,
                   RngStream& rng); // draws g and Delta, sets tau = |Delta| g

// Same idea for eta_j = 1/lambda_j^2 under the horseshoe prior.
double lambda_slice_kernel(double mu, double eta_current, double u_fraction, double q_fraction,
                           NumericEventCounter* events = nullptr);

void update_lambda_horseshoe_slice(ChainState& state, RngStream& rng); // NonPX
void update_lambda_horseshoe_aux(ChainState& state, const Dataset& data,
                                 const SamplerConfig& config, RngStream& rng);
void update_lambda_truncnormal(ChainState& state, const Dataset& data,
                               const SamplerConfig& config, RngStream& rng, double v);
void update_lambda_lasso(ChainState& state, RngStream& rng);

// One full scan: beta block, sigma^2, global scale, local scales; then the
// beta/theta consistency identity is re-established. Throws
// chain_diverged_error if the state leaves the finite domain.
void sweep(ChainState& state, const Dataset& data, const SamplerConfig& config, RngStream& rng);

using ProgressFn = std::function<void(long iter, long total)>;

// burn + keep*thin sweeps from the fixed initial state; records tau and
// sigma^2 (and beta/lambda when configured) after burn-in, every `thin`
// sweeps.
Trace run_chain(const Dataset& data, const SamplerConfig& config, const ProgressFn& progress = {});

} // namespace pxshrink
