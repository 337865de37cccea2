#include "blockwave/fits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "blockwave/errors.hpp"

namespace blockwave {

namespace {

struct LinFit {
    double intercept = 0.0, slope = 0.0, residual = 0.0;
};

LinFit linear_lsq(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / double(n), my = sy / double(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    LinFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss);
    return f;
}

void require_increasing(std::span<const double> x, const char* what) {
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            throw StructuralError(std::string(what) + ": abscissa must be strictly increasing");
}

} // namespace

ExpFit fit_exponential(std::span<const double> chi) {
    if (chi.size() < 3) throw StructuralError("fit_exponential: need at least 3 points");
    std::vector<double> q, ln;
    for (std::size_t i = 0; i < chi.size(); ++i) {
        if (chi[i] <= 0.0)
            throw StructuralError("fit_exponential: log-domain fit needs positive values");
        q.push_back(double(i));
        ln.push_back(std::log(chi[i]));
    }
    LinFit f = linear_lsq(q, ln);
    ExpFit out;
    out.C = std::exp(f.intercept);
    out.alpha = -f.slope;
    out.residual = f.residual;
    out.points = int(chi.size());
    return out;
}

CcdfFit fit_ccdf_power_law(std::span<const double> values,
                           std::optional<std::pair<double, double>> window) {
    std::vector<double> v(values.begin(), values.end());
    std::erase_if(v, [](double x) { return x <= 0.0; });
    if (v.size() < 3) throw StructuralError("fit_ccdf_power_law: need at least 3 positive values");
    std::sort(v.begin(), v.end());
    const double n = double(v.size());

    CcdfFit out;
    if (window) {
        out.window_lo = window->first;
        out.window_hi = window->second;
    } else {
        // middle two decades of the positive range
        const double llo = std::log10(v.front()), lhi = std::log10(v.back());
        const double mid = 0.5 * (llo + lhi);
        out.window_lo = std::pow(10.0, std::max(llo, mid - 1.0));
        out.window_hi = std::pow(10.0, std::min(lhi, mid + 1.0));
    }

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < v.size(); ++i) {
        // strictly-greater count; skip duplicates except the last of a run
        if (i + 1 < v.size() && v[i + 1] == v[i]) continue;
        const double ccdf = double(v.size() - 1 - i) / n;
        if (ccdf <= 0.0) continue;
        if (v[i] < out.window_lo || v[i] > out.window_hi) continue;
        lx.push_back(std::log(v[i]));
        ly.push_back(std::log(ccdf));
    }
    if (lx.size() < 3)
        throw StructuralError("fit_ccdf_power_law: fewer than 3 distinct points in the fit window");
    LinFit f = linear_lsq(lx, ly);
    out.A = std::exp(f.intercept);
    out.gamma = -f.slope;
    out.residual = f.residual;
    out.points = int(lx.size());
    return out;
}

double n_eff(std::span<const double> chi) {
    double tot = 0.0;
    for (double v : chi) {
        if (v < 0.0) throw StructuralError("n_eff: negative weight");
        tot += v;
    }
    if (tot <= 0.0) throw StructuralError("n_eff: empty distribution");
    double ipr = 0.0;
    for (double v : chi) {
        const double w = v / tot;
        ipr += w * w;
    }
    return 1.0 / ipr;
}

double q_star(double chi_total, double alpha, double pi_value, double m) {
    if (chi_total <= 0.0 || pi_value <= 0.0)
        throw StructuralError("q_star: chi and Pi must be positive");
    if (alpha == 0.0) throw StructuralError("q_star: alpha must be nonzero");
    return (m / alpha) * std::log(chi_total / pi_value);
}

AmdahlFit fit_amdahl(std::span<const double> ranks, std::span<const double> time) {
    if (ranks.size() != time.size() || ranks.size() < 3)
        throw StructuralError("fit_amdahl: need at least 3 (P, T) samples");
    require_increasing(ranks, "fit_amdahl");
    // T = b0 + b1 / P with T1 = b0 + b1, f = b1 / T1
    std::vector<double> x;
    for (double p : ranks) x.push_back(1.0 / p);
    LinFit f = linear_lsq(x, time);
    AmdahlFit out;
    out.t1 = f.intercept + f.slope;
    out.f = out.t1 != 0.0 ? f.slope / out.t1 : 0.0;
    out.residual = f.residual;
    return out;
}

PowerSpeedupFit fit_power_speedup(std::span<const double> ranks, std::span<const double> time) {
    if (ranks.size() != time.size() || ranks.size() < 3)
        throw StructuralError("fit_power_speedup: need at least 3 (P, T) samples");
    require_increasing(ranks, "fit_power_speedup");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (time[i] <= 0.0) throw StructuralError("fit_power_speedup: times must be positive");
        lx.push_back(std::log(ranks[i]));
        ly.push_back(std::log(time[i]));
    }
    LinFit f = linear_lsq(lx, ly);
    PowerSpeedupFit out;
    out.k = -f.slope;
    out.t1 = std::exp(f.intercept);
    out.residual = f.residual;
    return out;
}

namespace {

// SSE of the best (a, b) for fixed c in R = a - b chi^c
double ratio_sse(std::span<const double> chi, std::span<const double> r, double c, double* a_out,
                 double* b_out) {
    const std::size_t n = chi.size();
    double s1 = double(n), sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = -std::pow(chi[i], c);
        sx += x;
        sxx += x * x;
        sy += r[i];
        sxy += x * r[i];
    }
    const double det = s1 * sxx - sx * sx;
    double a, b;
    if (std::abs(det) < 1e-300) {
        a = sy / s1;
        b = 0.0;
    } else {
        a = (sy * sxx - sx * sxy) / det;
        b = (s1 * sxy - sx * sy) / det;
    }
    double sse = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = r[i] - (a - b * std::pow(chi[i], c));
        sse += e * e;
    }
    if (a_out) *a_out = a;
    if (b_out) *b_out = b;
    return sse;
}

} // namespace

RatioFit fit_ratio_model(std::span<const double> chi, std::span<const double> r) {
    if (chi.size() != r.size() || chi.size() < 3)
        throw StructuralError("fit_ratio_model: need at least 3 (chi, R) samples");
    require_increasing(chi, "fit_ratio_model");
    for (double x : chi)
        if (x <= 0.0) throw StructuralError("fit_ratio_model: chi must be positive");

    // coarse grid on the exponent, then golden-section refinement
    const double c_lo = -4.0, c_hi = 4.0;
    const int grid = 3200;
    double best_c = 0.0, best_sse = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= grid; ++i) {
        const double c = c_lo + (c_hi - c_lo) * double(i) / double(grid);
        if (std::abs(c) < 1e-9) continue; // chi^0 is collinear with a
        const double sse = ratio_sse(chi, r, c, nullptr, nullptr);
        if (sse < best_sse) {
            best_sse = sse;
            best_c = c;
        }
    }
    double lo = best_c - (c_hi - c_lo) / double(grid);
    double hi = best_c + (c_hi - c_lo) / double(grid);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = ratio_sse(chi, r, x1, nullptr, nullptr);
    double f2 = ratio_sse(chi, r, x2, nullptr, nullptr);
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, std::abs(best_c)); ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = ratio_sse(chi, r, x1, nullptr, nullptr);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = ratio_sse(chi, r, x2, nullptr, nullptr);
        }
    }
    RatioFit out;
    out.c = 0.5 * (lo + hi);
    out.residual = std::sqrt(ratio_sse(chi, r, out.c, &out.a, &out.b));
    return out;
}

std::optional<double> fractal_exponent_from_c(double c, double m) {
    if (std::abs(m - 1.0) < 1e-9) return std::nullopt; // c = -2 identically; D drops out
    return (c - 1.0 + 3.0 * m) / (m - 1.0);
}

} // namespace blockwave
