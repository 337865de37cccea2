#include "blockwave/tridiag.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blockwave {

namespace {

inline double sign_like(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

} // namespace

std::vector<double> tridiag_eigenvalues(std::vector<double> d, std::vector<double> e) {
    const std::size_t n = d.size();
    if (n == 0) return {};
    if (e.size() + 1 != n) throw std::invalid_argument("tridiag: off-diagonal size mismatch");
    e.push_back(0.0);
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-30 + 2.3e-16 * dd) break;
            }
            if (m != l) {
                if (++iter > 60) throw std::runtime_error("tridiag: QL failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + sign_like(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (i == l) {
                        d[l] -= p;
                        e[l] = g;
                        e[m] = 0.0;
                        p = 0.0;
                        break;
                    }
                }
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

std::vector<double> tridiag_eigenvector(const std::vector<double>& d, const std::vector<double>& e,
                                        double lambda) {
    const std::size_t n = d.size();
    std::vector<double> x(n, 1.0 / std::sqrt(double(n)));
    if (n == 1) return {1.0};
    double scale = 0.0;
    for (double v : d) scale = std::max(scale, std::abs(v));
    for (double v : e) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) scale = 1.0;
    const double shift = lambda - 1e-13 * scale;

    // two rounds of inverse iteration with a partially pivoted tridiagonal solve
    for (int round = 0; round < 2; ++round) {
        std::vector<double> a(n), b(n - 1), c(n - 1), extra(n >= 2 ? n - 2 : 0, 0.0);
        for (std::size_t i = 0; i < n; ++i) a[i] = d[i] - shift;
        for (std::size_t i = 0; i + 1 < n; ++i) b[i] = c[i] = e[i];
        std::vector<int> piv(n - 1, 0);
        // forward elimination
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (std::abs(c[i]) > std::abs(a[i])) {
                piv[i] = 1;
                std::swap(a[i], c[i]);
                std::swap(x[i], x[i + 1]);
                const double bi = b[i];
                b[i] = a[i + 1];
                a[i + 1] = bi;
                if (i + 2 < n) {
                    extra[i] = b[i + 1];
                    b[i + 1] = 0.0;
                }
            }
            double base = a[i];
            if (base == 0.0) base = 1e-300;
            const double f = c[i] / base;
            a[i + 1] -= f * b[i];
            if (i + 2 < n && piv[i]) b[i + 1] -= f * extra[i];
            x[i + 1] -= f * x[i];
        }
        // back substitution
        for (std::size_t i = n; i-- > 0;) {
            double v = x[i];
            if (i + 1 < n) v -= b[i] * x[i + 1];
            if (i + 2 < n && piv[i]) v -= extra[i] * x[i + 2];
            double base = a[i];
            if (base == 0.0) base = 1e-300;
            x[i] = v / base;
        }
        double nrm = 0.0;
        for (double v : x) nrm += v * v;
        nrm = std::sqrt(nrm);
        for (double& v : x) v /= nrm;
    }
    // deterministic sign: largest-magnitude component positive
    std::size_t imax = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (std::abs(x[i]) > std::abs(x[imax])) imax = i;
    if (x[imax] < 0.0)
        for (double& v : x) v = -v;
    return x;
}

} // namespace blockwave
