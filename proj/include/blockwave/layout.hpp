#pragma once

#include <vector>

#include "blockwave/blocks.hpp"
#include "blockwave/symmetry.hpp"

namespace blockwave {

// A 1d index range of length `total` divided over P ranks, padded to a
// uniform `width` per rank for the batch exchange. Slot index p*width + j
// maps to real index begin[p] + j when j < count[p], otherwise padding.
struct Split {
    int P = 1;
    long total = 0;
    long width = 0;
    std::vector<long> begin, count;

    // remainder spread over the low ranks; width = ceil(n/P)
    static Split balanced(long n, int P);
    // contiguous blocks of ceil(n/P); trailing batches may be empty
    static Split batches(long n, int P);

    long slots() const { return width * P; }
    bool operator==(const Split& o) const {
        return P == o.P && total == o.total && width == o.width && begin == o.begin && count == o.count;
    }
};

// Column distribution of every wavefunction block for a fixed rank count:
// `col[i]` splits the d_L columns of pair i (the paper's Theta assignment),
// `row[i]` splits its d_R rows into the T* batches.
struct DistributionLayout {
    int P = 1;
    std::vector<Split> col, row;
};

DistributionLayout make_layout(const SectorPairTable& table, int P);

// real-row <-> slot-row conversion of column-major blocks
DenseBlock expand_rows(const DenseBlock& in, const Split& s);
DenseBlock compact_rows(const DenseBlock& in, const Split& s);

} // namespace blockwave
