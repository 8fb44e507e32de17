#include "pxshrink/gibbs.hpp"

#include <cassert>
#include <chrono>
#include <cmath>

namespace pxshrink {

namespace {

double sum_theta_sq(const ChainState& state) {
    double s = 0.0;
    for (double t : state.theta) s += t * t;
    return s;
}

// theta_j = beta_j / (sigma lambda_j), with an extra Delta under PX.
void recompute_theta(ChainState& state, const SamplerConfig& config) {
    const double sigma = std::sqrt(state.sigma2);
    const double scale0 =
        config.parameterization == Parameterization::PX ? sigma * state.delta : sigma;
    for (int j = 0; j < state.p(); ++j) {
        const double denom = scale0 * state.lambda[j];
        if (denom == 0.0) {
            state.theta[j] = 0.0;
            ++state.numeric_events;
        } else {
            state.theta[j] = state.beta[j] / denom;
        }
    }
}

// inverse map for moves that hold theta fixed (the Delta draw and the
// data-level lambda updates): beta_j = sigma (Delta) lambda_j theta_j
void recompute_beta(ChainState& state, const SamplerConfig& config) {
    const double sigma = std::sqrt(state.sigma2);
    const double scale0 =
        config.parameterization == Parameterization::PX ? sigma * state.delta : sigma;
    for (int j = 0; j < state.p(); ++j)
        state.beta[j] = scale0 * state.lambda[j] * state.theta[j];
}

bool state_is_finite(const ChainState& state) {
    auto ok = [](double x) { return std::isfinite(x); };
    if (!ok(state.tau) || !(state.tau > 0.0)) return false;
    if (!ok(state.sigma2) || !(state.sigma2 > 0.0)) return false;
    if (!ok(state.delta) || !ok(state.g) || !(state.g > 0.0)) return false;
    for (int j = 0; j < state.p(); ++j)
        if (!ok(state.beta[j]) || !ok(state.theta[j]) || !ok(state.lambda[j])) return false;
    return true;
}

} // namespace

void update_beta_block(ChainState& state, const Dataset& data, const SamplerConfig& config,
                       RngStream& rng) {
    const double sigma2 = state.sigma2;
    const double tau2 = state.tau * state.tau;
    for (int j = 0; j < data.p; ++j) {
        const double a = tau2 * state.lambda[j] * state.lambda[j];
        const double b = data.n * a;
        const double m = (b / (1.0 + b)) * data.ybar[j];
        const double sd = std::sqrt(sigma2 * a / (1.0 + b));
        state.beta[j] = sample_normal(rng, m, sd);
    }
    recompute_theta(state, config);
}

double residual_quadratic(const ChainState& state, const Dataset& data, Sigma2UpdateMode mode) {
    const double tau2 = state.tau * state.tau;
    double rss = 0.0;
    for (int j = 0; j < data.p; ++j) {
        const double a = tau2 * state.lambda[j] * state.lambda[j];
        if (mode == Sigma2UpdateMode::AppendixCompat) {
            rss += data.row_sumsq[j] / (1.0 + a);
        } else {
            // quadratic form of y_j under the beta-marginal law N(0, sigma^2 (I + a J))
            rss += data.row_sumsq[j] -
                   (a / (1.0 + data.n * a)) * data.row_sum[j] * data.row_sum[j];
        }
    }
    return rss;
}

void update_sigma2(ChainState& state, const Dataset& data, const SamplerConfig& config,
                   RngStream& rng) {
    const double rss = residual_quadratic(state, data, config.sigma2_mode);
    if (!std::isfinite(rss))
        throw chain_diverged_error("update_sigma2: residual quadratic form is not finite", 0);
    if (!(rss > 0.0))
        throw std::runtime_error("update_sigma2: nonpositive residual quadratic form");
    const double shape = 0.5 * static_cast<double>(data.n) * data.p + config.sigma2_prior_shape;
    const double rate = 0.5 * rss + config.sigma2_prior_rate;
    state.sigma2 = sample_inverse_gamma(rng, shape, rate);
}

double tau_slice_kernel(double sum_theta_sq, int p, double eta_current, double u_fraction,
                        double q_fraction, NumericEventCounter* events) {
    // target in eta = 1/tau^2:  eta^{(p-1)/2} exp(-eta * S/2) / (1 + eta)
    if (!(sum_theta_sq > 0.0))
        throw std::domain_error("tau slice: sum of theta^2 is zero, conditional is improper");
    const double u = u_fraction * (1.0 / (1.0 + eta_current));
    const double bound = (1.0 - u) / u;
    const double shape = 0.5 * (p + 1.0);
    const double rate = 0.5 * sum_theta_sq;
    return truncated_gamma_icdf(shape, rate, bound, q_fraction, events);
}

void update_tau_slice(ChainState& state, RngStream& rng) {
    const double s = sum_theta_sq(state);
    const double eta = 1.0 / (state.tau * state.tau);
    const double eta_new = tau_slice_kernel(s, state.p(), eta, rng.uniform_open(),
                                            rng.uniform_open(), &state.numeric_events);
    state.tau = 1.0 / std::sqrt(eta_new);
}

void update_tau_px(ChainState& state, const Dataset& data, const SamplerConfig& config,
                   RngStream& rng) {
    const double s = sum_theta_sq(state);
    const TauPrior& prior = config.tau_prior;

    // g^2 ~ IG((a + p)/2, (b + S)/2)
    const double g2 =
        sample_inverse_gamma(rng, 0.5 * (prior.a + data.p), 0.5 * (prior.b + s));
    state.g = std::sqrt(g2);

    // Delta | theta, lambda, sigma, y: normal with prior N(m, 1). Each
    // coordinate contributes precision a_j = n (lambda_j theta_j)^2 and linear
    // term n lambda_j theta_j ybar_j / sigma (product form, safe at 0).
    const double sigma = std::sqrt(state.sigma2);
    double b = 0.0;
    double lin = 0.0;
    for (int j = 0; j < data.p; ++j) {
        const double lt = state.lambda[j] * state.theta[j];
        b += data.n * lt * lt;
        lin += data.n * lt * data.ybar[j] / sigma;
    }
    const double var = 1.0 / (1.0 + b);
    const double mean = (prior.m + lin) * var;
    state.delta = sample_normal(rng, mean, std::sqrt(var));
    if (state.delta == 0.0) {
        state.delta = sample_normal(rng, mean, std::sqrt(var));
        ++state.numeric_events;
        if (state.delta == 0.0)
            throw std::domain_error("update_tau_px: Delta drawn exactly zero twice");
    }
    state.tau = std::abs(state.delta) * state.g;
}

double lambda_slice_kernel(double mu, double eta_current, double u_fraction, double q_fraction,
                           NumericEventCounter* events) {
    // target in eta_j = 1/lambda_j^2:  exp(-eta * mu^2/2) / (1 + eta)
    const double u = u_fraction * (1.0 / (1.0 + eta_current));
    const double bound = (1.0 - u) / u;
    const double rate = 0.5 * mu * mu;
    if (rate == 0.0) {
        // flat on (0, bound)
        if (events) ++*events;
        return q_fraction * bound;
    }
    return truncated_exponential_icdf(rate, bound, q_fraction);
}

void update_lambda_horseshoe_slice(ChainState& state, RngStream& rng) {
    const double sigma_tau = std::sqrt(state.sigma2) * state.tau;
    for (int j = 0; j < state.p(); ++j) {
        const double mu = state.beta[j] / sigma_tau;
        const double eta = 1.0 / (state.lambda[j] * state.lambda[j]);
        const double eta_new = lambda_slice_kernel(mu, eta, rng.uniform_open(),
                                                   rng.uniform_open(), &state.numeric_events);
        state.lambda[j] = 1.0 / std::sqrt(eta_new);
    }
}

void update_lambda_horseshoe_aux(ChainState& state, const Dataset& data,
                                 const SamplerConfig& config, RngStream& rng) {
    const double sigma = std::sqrt(state.sigma2);
    const double dfac =
        config.parameterization == Parameterization::PX ? state.delta : 1.0;
    for (int j = 0; j < data.p; ++j) {
        // auxiliary mixing variance: V | lambda ~ IG(1, (lambda^2+1)/2)
        const double v = sample_inverse_gamma(
            rng, 1.0, 0.5 * (state.lambda[j] * state.lambda[j] + 1.0));
        const double dt = dfac * state.theta[j];
        if (dt == 0.0) {
            // no likelihood information; conditional prior draw
            state.lambda[j] = sample_normal(rng, 0.0, std::sqrt(v));
            ++state.numeric_events;
            continue;
        }
        const double z = data.ybar[j] / (sigma * dt);
        const double w = data.n * v * dt * dt;
        const double m = (w / (1.0 + w)) * z;
        const double sd = std::sqrt(v / (1.0 + w));
        state.lambda[j] = sample_normal(rng, m, sd);
    }
}

void update_lambda_truncnormal(ChainState& state, const Dataset& data,
                               const SamplerConfig& config, RngStream& rng, double v) {
    const double sigma = std::sqrt(state.sigma2);
    const double dfac =
        config.parameterization == Parameterization::PX ? state.delta : 1.0;
    for (int j = 0; j < data.p; ++j) {
        const double dt = dfac * state.theta[j];
        if (dt == 0.0) {
            state.lambda[j] = sample_truncated_normal_positive(rng, 1.0, v);
            ++state.numeric_events;
            continue;
        }
        // likelihood: z_j ~ N(lambda_j, 1/w); prior N+(1, v)
        const double z = data.ybar[j] / (sigma * dt);
        const double w = data.n * dt * dt;
        const double prec = 1.0 / v + w;
        const double m = (1.0 / v + w * z) / prec;
        state.lambda[j] = sample_truncated_normal_positive(rng, m, 1.0 / prec);
    }
}

void update_lambda_lasso(ChainState& state, RngStream& rng) {
    const double sigma_tau = std::sqrt(state.sigma2) * state.tau;
    for (int j = 0; j < state.p(); ++j) {
        const double mu = state.beta[j] / sigma_tau;
        if (mu == 0.0) {
            // prior draw: lambda^2 ~ Exp(1/2)
            state.lambda[j] = std::sqrt(sample_gamma(rng, 1.0, 0.5));
            ++state.numeric_events;
            continue;
        }
        // 1/lambda^2 | mu ~ InverseGaussian(1/|mu|, 1)
        const double s = sample_inverse_gaussian(rng, 1.0 / std::abs(mu), 1.0);
        state.lambda[j] = 1.0 / std::sqrt(s);
    }
}

void sweep(ChainState& state, const Dataset& data, const SamplerConfig& config, RngStream& rng) {
    const bool compat = config.sigma2_mode == Sigma2UpdateMode::AppendixCompat;

    // The sigma^2 draw integrates beta/theta out, so in the exact mode it runs
    // first and the beta block immediately restores the joint; the compat mode
    // keeps the published listing order instead.
    if (!compat) update_sigma2(state, data, config, rng);
    update_beta_block(state, data, config, rng);
    if (compat) update_sigma2(state, data, config, rng);

    if (config.parameterization == Parameterization::PX) {
        update_tau_px(state, data, config, rng);
        if (!compat) recompute_beta(state, config); // Delta moved with theta held fixed
    } else {
        update_tau_slice(state, rng);
    }

    switch (config.lambda_prior.kind) {
    case LambdaPriorKind::FixedOne:
        break;
    case LambdaPriorKind::Horseshoe:
        if (config.lambda_scheme == LambdaUpdateScheme::Slice) {
            update_lambda_horseshoe_slice(state, rng); // conditions on beta; theta follows
            recompute_theta(state, config);
        } else {
            update_lambda_horseshoe_aux(state, data, config, rng); // conditions on theta
            if (!compat) recompute_beta(state, config);
        }
        break;
    case LambdaPriorKind::TruncNormal:
        update_lambda_truncnormal(state, data, config, rng, config.lambda_prior.v);
        if (!compat) recompute_beta(state, config);
        break;
    case LambdaPriorKind::DoubleExponential:
        update_lambda_lasso(state, rng); // conditions on beta; theta follows
        recompute_theta(state, config);
        break;
    }

    // compat mode reconciles at the boundary with beta as drawn, matching how
    // the published code records it
    if (compat) recompute_theta(state, config);

    if (!state_is_finite(state))
        throw chain_diverged_error("sweep produced non-finite state", 0);

#ifndef NDEBUG
    if (config.parameterization == Parameterization::PX)
        assert(state.tau == std::abs(state.delta) * state.g);
#endif
}

Trace run_chain(const Dataset& data, const SamplerConfig& config, const ProgressFn& progress) {
    config.validate();
    RngStream rng(config.seed);
    ChainState state = make_initial_state(data, config);

    Trace trace;
    trace.config = config;
    trace.tau.reserve(config.keep);
    trace.sigma2.reserve(config.keep);
    if (config.store_vectors) {
        trace.beta.reserve(config.keep);
        trace.lambda.reserve(config.keep);
    }

    const long total = config.burn + config.keep * static_cast<long>(config.thin);
    const auto t0 = std::chrono::steady_clock::now();
    for (long t = 1; t <= total; ++t) {
        try {
            sweep(state, data, config, rng);
        } catch (const chain_diverged_error& e) {
            throw chain_diverged_error(std::string(e.what()) + " at iteration " +
                                           std::to_string(t),
                                       t, std::move(trace));
        }
        if (t > config.burn && (t - config.burn) % config.thin == 0) {
            trace.tau.push_back(state.tau);
            trace.sigma2.push_back(state.sigma2);
            if (config.store_vectors) {
                trace.beta.push_back(state.beta);
                trace.lambda.push_back(state.lambda);
            }
        }
        if (progress && t % 1000 == 0) progress(t, total);
    }
    trace.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return trace;
}

} // namespace pxshrink
