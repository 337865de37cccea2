#pragma once

#include <span>
#include <vector>

#include "blockwave/blocks.hpp"
#include "blockwave/symmetry.hpp"

namespace blockwave {

// Dense reference path over the global sector basis, in the same pair-major
// Vec ordering as gather_full. Matrix elements come straight from the raw
// term list with global Jordan-Wigner strings, independent of the split /
// block-operator machinery they are used to check.
class DenseOracle {
public:
    explicit DenseOracle(const SectorContext& ctx);

    long dim() const { return dim_; }
    // y = H x without materializing the matrix
    void apply(std::span<const double> x, std::span<double> y) const;
    // materialized dense sector Hamiltonian (guarded by `cap` on the dimension)
    DenseBlock matrix(long cap = 5000) const;

private:
    const SectorContext* ctx_;
    long dim_ = 0;
    int nl_ = 0;
    std::vector<long> pair_offset_;
    struct Chain {
        double coeff;
        std::vector<LocalFactor> factors;
    };
    std::vector<Chain> chains_;
    // pattern -> (pair-local identification) lookups per side
    long locate(std::uint64_t pat, long& pair, long& l, long& r) const;
};

// Eigenvalues of a symmetric dense matrix, ascending (LAPACK-grade library
// solver; oracle side only).
std::vector<double> dense_symmetric_eigenvalues(const DenseBlock& h);
double dense_ground_energy(const DenseBlock& h);

// Eigenvalues of the left reduced density matrix of a gathered sector state,
// built over the full 2^(left modes) space. Descending, zeros included.
std::vector<double> dense_rho_left_eigenvalues(const SectorContext& ctx,
                                               std::span<const double> coeffs);
double entropy_from_eigenvalues(std::span<const double> lambda);

} // namespace blockwave
