#include "blockwave/svd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blockwave {

std::vector<double> singular_values(const DenseBlock& in) {
    if (in.rows == 0 || in.cols == 0) return {};
    // orthogonalize columns of the tall orientation
    DenseBlock a;
    if (in.rows >= in.cols) {
        a = in;
    } else {
        a = DenseBlock(in.cols, in.rows);
        for (long r = 0; r < in.rows; ++r)
            for (long c = 0; c < in.cols; ++c) a.at(c, r) = in.at(r, c);
    }
    const long m = a.rows, n = a.cols;
    const double eps = 1e-15;
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (long i = 0; i + 1 < n; ++i)
            for (long j = i + 1; j < n; ++j) {
                double *ci = a.col(i), *cj = a.col(j);
                double aii = 0.0, ajj = 0.0, aij = 0.0;
                for (long r = 0; r < m; ++r) {
                    aii += ci[r] * ci[r];
                    ajj += cj[r] * cj[r];
                    aij += ci[r] * cj[r];
                }
                if (std::abs(aij) <= eps * std::sqrt(aii * ajj)) continue;
                rotated = true;
                const double tau = (ajj - aii) / (2.0 * aij);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double cs = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = cs * t;
                for (long r = 0; r < m; ++r) {
                    const double vi = ci[r], vj = cj[r];
                    ci[r] = cs * vi - sn * vj;
                    cj[r] = sn * vi + cs * vj;
                }
            }
        if (!rotated) break;
        if (sweep == 59) throw std::runtime_error("jacobi svd: no convergence in 60 sweeps");
    }
    std::vector<double> s(static_cast<std::size_t>(n), 0.0);
    for (long c = 0; c < n; ++c) {
        double nrm = 0.0;
        const double* col = a.col(c);
        for (long r = 0; r < m; ++r) nrm += col[r] * col[r];
        s[std::size_t(c)] = std::sqrt(nrm);
    }
    std::sort(s.begin(), s.end(), std::greater<double>());
    return s;
}

} // namespace blockwave
