#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "blockwave/model.hpp"
#include "blockwave/quantum_number.hpp"

namespace blockwave {

// Ordered basis of one symmetry sector of a partition. States are occupation
// bit patterns over the partition's modes, strictly ascending in the integer
// encoding.
struct PartitionBasis {
    QuantumNumber sector_q;
    std::vector<std::uint64_t> states;
    long dim() const { return long(states.size()); }
    // Index of a pattern, or -1 when it does not belong to this sector.
    long find(std::uint64_t pattern) const;
};

// All sectors of one partition, in canonical (lexicographic) order.
struct SectorSet {
    std::vector<PartitionBasis> sectors;
    const PartitionBasis* find(const QuantumNumber& q) const;
    long total_dim() const;
};

SectorSet enumerate_partition_sectors(const ModelSpec& model, const PartitionModes& pm, Side side);

struct SectorPair {
    QuantumNumber q_left, q_right;
    long d_left = 0, d_right = 0;
};

// Admissible (q_l, q_r) combinations with q_l (+) q_r = target_q, ordered
// lexicographically ascending in q_l. Pairs with a zero dimension on either
// side are excluded.
struct SectorPairTable {
    QuantumNumber target_q;
    std::vector<SectorPair> pairs;

    long n_pairs() const { return long(pairs.size()); }
    long dim() const; // sum of d_left * d_right
    long pair_offset(std::size_t i) const;
    int find_pair(const QuantumNumber& q_left) const; // -1 if absent
};

SectorPairTable build_sector_pair_table(const SectorSet& left, const SectorSet& right,
                                        const QuantumNumber& target_q);

// Everything the operator assembly and the oracles need about one cut.
struct SectorContext {
    ModelSpec model;
    EntanglementCut cut;
    PartitionModes pm;
    SectorSet left, right;
    SectorPairTable table;
    std::vector<HamiltonianTerm> terms;
    SplitTerms split;

    const PartitionBasis& basis(Side s, const QuantumNumber& q) const;
};

SectorContext make_sector_context(const ModelSpec& model, const EntanglementCut& cut,
                                  const QuantumNumber& target_q);

} // namespace blockwave
