#pragma once

#include <map>
#include <string>
#include <vector>

#include "blockwave/blocks.hpp"
#include "blockwave/symmetry.hpp"

namespace blockwave {

// Symmetry-block operator: diagonal partition blocks plus the off-diagonal
// boundary factors of the cut-crossing terms (one entry per primitive term).
struct BlockOperator {
    std::map<QuantumNumber, SparseBlock> diag_left;  // H_L^{q_l}
    std::map<QuantumNumber, SparseBlock> diag_right; // H_R^{q_r}

    struct BoundaryBlocks {
        double coeff = 0.0;
        std::string label;
        QuantumNumber dq_left, dq_right;
        // keyed by source sector; block maps source -> source (+) dq
        std::map<QuantumNumber, SparseBlock> left, right;
    };
    std::vector<BoundaryBlocks> boundary;

    const SparseBlock* find_diag(Side s, const QuantumNumber& q) const;
};

// Matrix of a factor chain between two sector bases: rows over `to`,
// columns over `from`.
SparseBlock chain_block(const std::vector<LocalFactor>& chain, double coeff,
                        const PartitionBasis& from, const PartitionBasis& to,
                        double dense_threshold = 0.25);

BlockOperator assemble_block_operator(const SectorContext& ctx, double dense_threshold = 0.25);

} // namespace blockwave
