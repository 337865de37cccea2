#pragma once

#include <optional>
#include <span>
#include <vector>

namespace blockwave {

// Least-squares fits behind the fragmentation and scaling analysis. All the
// log-domain fits require positive data and report the residual norm in the
// fitted (log) domain.

struct ExpFit {
    double C = 0.0, alpha = 0.0;
    double residual = 0.0;
    int points = 0;
};
// chi_q = C * exp(-alpha q) over q = 0..n-1 (series in that order)
ExpFit fit_exponential(std::span<const double> chi);

struct CcdfFit {
    double A = 0.0, gamma = 0.0;
    double residual = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    int points = 0;
};
// P(chi > x) ~ A x^{-gamma} on the empirical CCDF of `values`; the default
// window is the middle two decades of the positive value range.
CcdfFit fit_ccdf_power_law(std::span<const double> values,
                           std::optional<std::pair<double, double>> window = std::nullopt);

// inverse participation ratio of the normalized series
double n_eff(std::span<const double> chi);

// q* = (m / alpha) ln(chi / Pi)
double q_star(double chi_total, double alpha, double pi_value, double m);

struct AmdahlFit {
    double f = 0.0, t1 = 0.0;
    double residual = 0.0;
};
// T(P) = T(1) ((1-f) + f/P)
AmdahlFit fit_amdahl(std::span<const double> ranks, std::span<const double> time);

struct PowerSpeedupFit {
    double k = 0.0, t1 = 0.0;
    double residual = 0.0;
};
// T(P) = t1 * P^{-k}
PowerSpeedupFit fit_power_speedup(std::span<const double> ranks, std::span<const double> time);

struct RatioFit {
    double a = 0.0, b = 0.0, c = 0.0;
    double residual = 0.0;
};
// R(chi) = a - b chi^c, grid-seeded on c with a linear solve for (a, b)
RatioFit fit_ratio_model(std::span<const double> chi, std::span<const double> r);

// c = 1 - D + m (D - 3)  =>  D = (c - 1 + 3 m) / (m - 1); unavailable at m = 1
std::optional<double> fractal_exponent_from_c(double c, double m);

} // namespace blockwave
