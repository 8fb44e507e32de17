#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pxshrink {

class degenerate_trace_error : public std::runtime_error {
public:
    explicit degenerate_trace_error(const std::string& what) : std::runtime_error(what) {}
};

struct DiagnosticsReport {
    std::vector<double> acf; // rho_1 .. rho_L
    double kappa = 1.0;      // integrated autocorrelation time, floored at 1
    double t_e = 0.0;        // effective sample size T / kappa
    long trace_length = 0;
    int truncation_lag = 0;  // lags actually summed into kappa
};

// Sample autocorrelations rho_1..rho_max_lag with the lag-0 denominator
// convention fixed at T, which keeps |rho_t| <= 1.
std::vector<double> autocorrelation(std::span<const double> trace, int max_lag);

struct IactResult {
    double kappa;
    int truncation_lag;
};

// kappa = 1 + 2 sum rho_t, truncated by the initial-positive-sequence rule:
// pairs (rho_{2k-1} + rho_{2k}) are accumulated while they stay positive.
// The scan is capped at lag min(T/2, 5000).
IactResult integrated_autocorr_time(std::span<const double> trace);

double effective_sample_size(std::span<const double> trace);

// T_e(px) / T_e(nonpx); > 1 means the PX chain is more efficient.
double relative_efficiency(std::span<const double> trace_px, std::span<const double> trace_nonpx);

DiagnosticsReport diagnose(std::span<const double> trace);

std::string report_to_json(const DiagnosticsReport& report);

} // namespace pxshrink
