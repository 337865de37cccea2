#include "blockwave/symmetry.hpp"

#include <algorithm>
#include <map>

#include "blockwave/errors.hpp"

namespace blockwave {

long PartitionBasis::find(std::uint64_t pattern) const {
    auto it = std::lower_bound(states.begin(), states.end(), pattern);
    if (it == states.end() || *it != pattern) return -1;
    return long(it - states.begin());
}

const PartitionBasis* SectorSet::find(const QuantumNumber& q) const {
    for (const auto& s : sectors)
        if (s.sector_q == q) return &s;
    return nullptr;
}

long SectorSet::total_dim() const {
    long d = 0;
    for (const auto& s : sectors) d += s.dim();
    return d;
}

SectorSet enumerate_partition_sectors(const ModelSpec& model, const PartitionModes& pm, Side side) {
    const auto& modes = pm.modes(side);
    const int nbits = int(modes.size());
    if (nbits > 28) throw StructuralError("partition too large to enumerate (" +
                                          std::to_string(nbits) + " modes)");
    std::map<QuantumNumber, PartitionBasis> by_q;
    for (std::uint64_t p = 0; p < (1ull << nbits); ++p) {
        QuantumNumber q = pattern_quantum_number(model, modes, p);
        auto& b = by_q[q];
        b.sector_q = q;
        b.states.push_back(p); // ascending by construction
    }
    SectorSet set;
    for (auto& [q, b] : by_q) set.sectors.push_back(std::move(b));
    return set;
}

long SectorPairTable::dim() const {
    long d = 0;
    for (const auto& p : pairs) d += p.d_left * p.d_right;
    return d;
}

long SectorPairTable::pair_offset(std::size_t i) const {
    long off = 0;
    for (std::size_t j = 0; j < i; ++j) off += pairs[j].d_left * pairs[j].d_right;
    return off;
}

int SectorPairTable::find_pair(const QuantumNumber& q_left) const {
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (pairs[i].q_left == q_left) return int(i);
    return -1;
}

SectorPairTable build_sector_pair_table(const SectorSet& left, const SectorSet& right,
                                        const QuantumNumber& target_q) {
    SectorPairTable t;
    t.target_q = target_q;
    for (const auto& ls : left.sectors) { // lexicographic in q_l
        QuantumNumber qr = subtract(target_q, ls.sector_q);
        const PartitionBasis* rs = right.find(qr);
        if (!rs || ls.dim() == 0 || rs->dim() == 0) continue;
        t.pairs.push_back({ls.sector_q, qr, ls.dim(), rs->dim()});
    }
    return t;
}

const PartitionBasis& SectorContext::basis(Side s, const QuantumNumber& q) const {
    const PartitionBasis* b = (s == Side::left ? left : right).find(q);
    if (!b) throw StructuralError("sector " + q.str() + " not present in partition basis");
    return *b;
}

SectorContext make_sector_context(const ModelSpec& model, const EntanglementCut& cut,
                                  const QuantumNumber& target_q) {
    SectorContext ctx;
    ctx.model = model;
    ctx.cut = cut;
    ctx.pm = partition_modes(model, cut);
    ctx.left = enumerate_partition_sectors(model, ctx.pm, Side::left);
    ctx.right = enumerate_partition_sectors(model, ctx.pm, Side::right);
    if (target_q.size() != std::size_t(model.qn_components()))
        throw ConfigError("target: expected " + std::to_string(model.qn_components()) +
                          " quantum-number components, got " + std::to_string(target_q.size()));
    ctx.table = build_sector_pair_table(ctx.left, ctx.right, target_q);
    ctx.terms = build_terms(model);
    ctx.split = split_terms(ctx.terms, model, ctx.pm);
    return ctx;
}

} // namespace blockwave
