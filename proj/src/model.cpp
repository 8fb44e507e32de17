#include "pxshrink/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "pxshrink/io.hpp"

namespace pxshrink {

Dataset build_dataset(std::vector<double> y, int p, int n) {
    if (p < 1 || n < 1) throw std::invalid_argument("build_dataset: p and n must be >= 1");
    if (y.size() != static_cast<std::size_t>(p) * n)
        throw std::invalid_argument("build_dataset: y size does not match p*n");
    for (double v : y)
        if (!std::isfinite(v)) throw std::invalid_argument("build_dataset: non-finite entry in y");

    Dataset data;
    data.p = p;
    data.n = n;
    data.y = std::move(y);
    data.ybar.resize(p);
    data.row_sum.resize(p);
    data.row_sumsq.resize(p);
    for (int j = 0; j < p; ++j) {
        double s = 0.0, ss = 0.0;
        for (int i = 0; i < n; ++i) {
            const double v = data.yval(j, i);
            s += v;
            ss += v * v;
        }
        data.row_sum[j] = s;
        data.row_sumsq[j] = ss;
        data.ybar[j] = s / n;
    }
    return data;
}

Dataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    std::vector<double> values;
    int n = -1;
    int p = 0;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int cols = 0;
        while (std::getline(ss, cell, ',')) {
            std::size_t pos = 0;
            double v;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": cannot parse '" + cell + "' as a number");
            }
            while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
            if (pos != cell.size())
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": trailing garbage in '" + cell + "'");
            values.push_back(v);
            ++cols;
        }
        if (n < 0)
            n = cols;
        else if (cols != n)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(n) + " columns, got " + std::to_string(cols));
        ++p;
    }
    if (p == 0) throw std::runtime_error(path + ": empty dataset file");
    return build_dataset(std::move(values), p, n);
}

void save_dataset_csv(const Dataset& data, const std::string& path) {
    std::string out;
    out.reserve(static_cast<std::size_t>(data.p) * data.n * 20);
    for (int j = 0; j < data.p; ++j) {
        for (int i = 0; i < data.n; ++i) {
            if (i) out += ',';
            out += format_g17(data.yval(j, i));
        }
        out += '\n';
    }
    write_file_atomic(path, out);
}

void SamplerConfig::validate() const {
    if (burn < 0) throw std::invalid_argument("config: burn must be >= 0");
    if (keep < 1) throw std::invalid_argument("config: keep must be >= 1");
    if (thin < 1) throw std::invalid_argument("config: thin must be >= 1");
    if (!(init_tau > 0.0) || !std::isfinite(init_tau))
        throw std::invalid_argument("config: init_tau must be > 0");
    if (lambda_prior.kind == LambdaPriorKind::TruncNormal &&
        (!(lambda_prior.v > 0.0) || !std::isfinite(lambda_prior.v)))
        throw std::invalid_argument("config: TruncNormal lambda prior needs v > 0");
    if (!(tau_prior.a > 0.0) || !(tau_prior.b > 0.0) || !std::isfinite(tau_prior.m))
        throw std::invalid_argument("config: tau prior needs finite m and a, b > 0");
    if (sigma2_prior_shape < 0.0 || sigma2_prior_rate < 0.0 ||
        !std::isfinite(sigma2_prior_shape) || !std::isfinite(sigma2_prior_rate))
        throw std::invalid_argument("config: sigma2 prior hyperparameters must be >= 0");
    if (parameterization == Parameterization::NonPX && !tau_prior.is_half_cauchy())
        throw std::invalid_argument(
            "config: the NonPX slice update targets the half-Cauchy tau prior only");
    if (lambda_scheme == LambdaUpdateScheme::Slice) {
        if (parameterization != Parameterization::NonPX)
            throw std::invalid_argument("config: slice lambda updates are NonPX only");
        if (lambda_prior.kind != LambdaPriorKind::Horseshoe)
            throw std::invalid_argument("config: slice lambda updates apply to the horseshoe prior");
    }
}

ChainState make_initial_state(const Dataset& data, const SamplerConfig& config) {
    ChainState state;
    state.beta.assign(data.p, 0.0);
    state.theta.assign(data.p, 0.0);
    state.lambda.assign(data.p, 1.0);
    state.sigma2 = 1.0;
    state.tau = config.init_tau;
    if (config.parameterization == Parameterization::PX) {
        state.g = 1.0;
        state.delta = config.init_tau; // so tau = |delta| g holds from the start
    }
    return state;
}

} // namespace pxshrink
