#include "blockwave/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "blockwave/errors.hpp"

namespace blockwave {

SparseBlock SparseBlock::from_triplets(long rows, long cols, std::vector<Triplet> trips,
                                       double dense_threshold) {
    SparseBlock b;
    b.rows = rows;
    b.cols = cols;
    std::sort(trips.begin(), trips.end(), [](const Triplet& x, const Triplet& y) {
        return x.row != y.row ? x.row < y.row : x.col < y.col;
    });
    // merge duplicates, drop exact zeros
    std::vector<Triplet> merged;
    for (const auto& t : trips) {
        if (!merged.empty() && merged.back().row == t.row && merged.back().col == t.col)
            merged.back().value += t.value;
        else
            merged.push_back(t);
    }
    std::erase_if(merged, [](const Triplet& t) { return t.value == 0.0; });

    b.ptr.assign(std::size_t(rows) + 1, 0);
    for (const auto& t : merged) b.ptr[std::size_t(t.row) + 1]++;
    for (long r = 0; r < rows; ++r) b.ptr[std::size_t(r) + 1] += b.ptr[std::size_t(r)];
    b.idx.resize(merged.size());
    b.val.resize(merged.size());
    for (std::size_t k = 0; k < merged.size(); ++k) {
        b.idx[k] = merged[k].col;
        b.val[k] = merged[k].value;
    }
    if (rows > 0 && cols > 0 && b.density() > dense_threshold) {
        b.dense.assign(std::size_t(rows) * std::size_t(cols), 0.0);
        for (long r = 0; r < rows; ++r)
            for (long k = b.ptr[std::size_t(r)]; k < b.ptr[std::size_t(r) + 1]; ++k)
                b.dense[std::size_t(b.idx[std::size_t(k)]) * std::size_t(rows) + std::size_t(r)] =
                    b.val[std::size_t(k)];
    }
    return b;
}

double SparseBlock::density() const {
    if (rows == 0 || cols == 0) return 0.0;
    return double(nnz()) / (double(rows) * double(cols));
}

void SparseBlock::apply_add(const double* x, double* y) const {
    if (use_dense()) {
        for (long c = 0; c < cols; ++c) {
            const double xc = x[c];
            if (xc == 0.0) continue;
            const double* a = dense.data() + std::size_t(c) * std::size_t(rows);
            for (long r = 0; r < rows; ++r) y[r] += a[r] * xc;
        }
        return;
    }
    for (long r = 0; r < rows; ++r) {
        double s = 0.0;
        for (long k = ptr[std::size_t(r)]; k < ptr[std::size_t(r) + 1]; ++k)
            s += val[std::size_t(k)] * x[idx[std::size_t(k)]];
        y[r] += s;
    }
}

void SparseBlock::apply_block_add(const DenseBlock& x, DenseBlock& y, long ncols) const {
    if (x.rows != cols || y.rows != rows)
        throw StructuralError("sparse apply: block shape mismatch");
    for (long c = 0; c < ncols; ++c) apply_add(x.col(c), y.col(c));
}

std::uint64_t SparseBlock::flops_per_col() const {
    if (use_dense()) return 2ull * std::uint64_t(rows) * std::uint64_t(cols);
    return 2ull * std::uint64_t(nnz());
}

double SparseBlock::max_asymmetry() const {
    if (rows != cols) return std::abs(double(rows - cols));
    double worst = 0.0;
    for (long r = 0; r < rows; ++r)
        for (long k = ptr[std::size_t(r)]; k < ptr[std::size_t(r) + 1]; ++k) {
            long c = idx[std::size_t(k)];
            // find (c, r)
            double vt = 0.0;
            for (long k2 = ptr[std::size_t(c)]; k2 < ptr[std::size_t(c) + 1]; ++k2)
                if (idx[std::size_t(k2)] == r) { vt = val[std::size_t(k2)]; break; }
            worst = std::max(worst, std::abs(val[std::size_t(k)] - vt));
        }
    return worst;
}

} // namespace blockwave
