#pragma once

#include <cstdint>
#include <vector>

namespace blockwave {

// Column-major dense matrix of doubles.
struct DenseBlock {
    long rows = 0, cols = 0;
    std::vector<double> a;

    DenseBlock() = default;
    DenseBlock(long r, long c) : rows(r), cols(c), a(std::size_t(r) * std::size_t(c), 0.0) {}

    double& at(long r, long c) { return a[std::size_t(c) * std::size_t(rows) + std::size_t(r)]; }
    double at(long r, long c) const { return a[std::size_t(c) * std::size_t(rows) + std::size_t(r)]; }
    double* col(long c) { return a.data() + std::size_t(c) * std::size_t(rows); }
    const double* col(long c) const { return a.data() + std::size_t(c) * std::size_t(rows); }
    void zero() { std::fill(a.begin(), a.end(), 0.0); }
};

struct Triplet {
    long row, col;
    double value;
};

// Sparse operator block (CSR). Blocks denser than `dense_threshold` at
// assembly are materialized and multiplied as dense.
struct SparseBlock {
    long rows = 0, cols = 0;
    std::vector<long> ptr, idx;
    std::vector<double> val;
    std::vector<double> dense; // column-major when non-empty

    static SparseBlock from_triplets(long rows, long cols, std::vector<Triplet> trips,
                                     double dense_threshold = 0.25);
    long nnz() const { return long(idx.size()); }
    bool empty() const { return nnz() == 0 && dense.empty(); }
    bool use_dense() const { return !dense.empty(); }
    double density() const;

    // y += A x
    void apply_add(const double* x, double* y) const;
    // Y(:, [0,ncols)) += A * X(:, [0,ncols))
    void apply_block_add(const DenseBlock& x, DenseBlock& y, long ncols) const;
    std::uint64_t flops_per_col() const;

    double max_asymmetry() const; // |A - A^T|_max for square blocks
};

} // namespace blockwave
