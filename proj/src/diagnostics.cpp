#include "pxshrink/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace pxshrink {

namespace {

constexpr int kLagCap = 5000;

struct Centered {
    std::vector<double> x; // trace minus its mean
    double c0;             // lag-0 autocovariance, denominator T
};

Centered center(std::span<const double> trace) {
    const long t_len = static_cast<long>(trace.size());
    double mean = 0.0;
    for (double v : trace) mean += v;
    mean /= static_cast<double>(t_len);
    Centered c;
    c.x.resize(trace.size());
    double c0 = 0.0;
    for (long i = 0; i < t_len; ++i) {
        c.x[i] = trace[i] - mean;
        c0 += c.x[i] * c.x[i];
    }
    c.c0 = c0 / static_cast<double>(t_len);
    if (!(c.c0 > 0.0)) throw degenerate_trace_error("trace has zero sample variance");
    return c;
}

double rho_at(const Centered& c, int lag) {
    const long t_len = static_cast<long>(c.x.size());
    double s = 0.0;
    for (long i = 0; i + lag < t_len; ++i) s += c.x[i] * c.x[i + lag];
    return (s / static_cast<double>(t_len)) / c.c0;
}

int lag_cap(long t_len) { return static_cast<int>(std::min<long>(t_len / 2, kLagCap)); }

} // namespace

std::vector<double> autocorrelation(std::span<const double> trace, int max_lag) {
    if (max_lag < 1) throw std::invalid_argument("autocorrelation: max_lag must be >= 1");
    if (static_cast<long>(trace.size()) < max_lag + 2)
        throw std::invalid_argument("autocorrelation: trace shorter than max_lag + 2");
    const Centered c = center(trace);
    std::vector<double> rho(max_lag);
    for (int t = 1; t <= max_lag; ++t) rho[t - 1] = rho_at(c, t);
    return rho;
}

IactResult integrated_autocorr_time(std::span<const double> trace) {
    if (trace.size() < 8)
        throw std::invalid_argument("integrated_autocorr_time: trace too short");
    const Centered c = center(trace);
    const int cap = lag_cap(static_cast<long>(trace.size()));
    double sum = 0.0;
    int used = 0;
    for (int k = 1; 2 * k <= cap; ++k) {
        const double pair = rho_at(c, 2 * k - 1) + rho_at(c, 2 * k);
        if (!(pair > 0.0)) break;
        sum += pair;
        used = 2 * k;
    }
    return {std::max(1.0, 1.0 + 2.0 * sum), used};
}

double effective_sample_size(std::span<const double> trace) {
    return static_cast<double>(trace.size()) / integrated_autocorr_time(trace).kappa;
}

double relative_efficiency(std::span<const double> trace_px,
                           std::span<const double> trace_nonpx) {
    return effective_sample_size(trace_px) / effective_sample_size(trace_nonpx);
}

DiagnosticsReport diagnose(std::span<const double> trace) {
    const IactResult iact = integrated_autocorr_time(trace);
    DiagnosticsReport report;
    report.kappa = iact.kappa;
    report.truncation_lag = iact.truncation_lag;
    report.trace_length = static_cast<long>(trace.size());
    report.t_e = static_cast<double>(trace.size()) / iact.kappa;
    // keep at least a short ACF window around for plots
    const int n_lags =
        std::clamp(std::max(iact.truncation_lag, 40), 1, lag_cap(report.trace_length));
    report.acf = autocorrelation(trace, n_lags);
    return report;
}

std::string report_to_json(const DiagnosticsReport& report) {
    nlohmann::json j;
    j["acf"] = report.acf;
    j["kappa"] = report.kappa;
    j["t_e"] = report.t_e;
    j["trace_length"] = report.trace_length;
    j["truncation_lag"] = report.truncation_lag;
    return j.dump(2) + "\n";
}

} // namespace pxshrink
