#include "blockwave/block_operator.hpp"

#include <set>

#include "blockwave/errors.hpp"

namespace blockwave {

const SparseBlock* BlockOperator::find_diag(Side s, const QuantumNumber& q) const {
    const auto& m = (s == Side::left) ? diag_left : diag_right;
    auto it = m.find(q);
    return it == m.end() ? nullptr : &it->second;
}

SparseBlock chain_block(const std::vector<LocalFactor>& chain, double coeff,
                        const PartitionBasis& from, const PartitionBasis& to,
                        double dense_threshold) {
    std::vector<Triplet> trips;
    for (long col = 0; col < from.dim(); ++col) {
        std::uint64_t pat = from.states[std::size_t(col)];
        double amp = apply_factor_chain(pat, chain);
        if (amp == 0.0) continue;
        long row = to.find(pat);
        if (row < 0)
            throw StructuralError("factor chain leaves the destination sector");
        trips.push_back({row, col, coeff * amp});
    }
    return SparseBlock::from_triplets(to.dim(), from.dim(), std::move(trips), dense_threshold);
}

BlockOperator assemble_block_operator(const SectorContext& ctx, double dense_threshold) {
    BlockOperator op;
    const auto& table = ctx.table;

    // Diagonal blocks for every sector appearing in the pair table.
    std::set<QuantumNumber> lq, rq;
    for (const auto& p : table.pairs) {
        lq.insert(p.q_left);
        rq.insert(p.q_right);
    }
    for (const auto& q : lq) {
        const PartitionBasis& b = ctx.basis(Side::left, q);
        std::vector<Triplet> trips;
        for (const auto& t : ctx.split.left) {
            SparseBlock tb = chain_block(t.factors, t.coeff, b, b, 1.1); // keep CSR while merging
            for (long r = 0; r < tb.rows; ++r)
                for (long k = tb.ptr[std::size_t(r)]; k < tb.ptr[std::size_t(r) + 1]; ++k)
                    trips.push_back({r, tb.idx[std::size_t(k)], tb.val[std::size_t(k)]});
        }
        SparseBlock hb = SparseBlock::from_triplets(b.dim(), b.dim(), std::move(trips), dense_threshold);
        if (!hb.empty()) op.diag_left.emplace(q, std::move(hb));
    }
    for (const auto& q : rq) {
        const PartitionBasis& b = ctx.basis(Side::right, q);
        std::vector<Triplet> trips;
        for (const auto& t : ctx.split.right) {
            SparseBlock tb = chain_block(t.factors, t.coeff, b, b, 1.1);
            for (long r = 0; r < tb.rows; ++r)
                for (long k = tb.ptr[std::size_t(r)]; k < tb.ptr[std::size_t(r) + 1]; ++k)
                    trips.push_back({r, tb.idx[std::size_t(k)], tb.val[std::size_t(k)]});
        }
        SparseBlock hb = SparseBlock::from_triplets(b.dim(), b.dim(), std::move(trips), dense_threshold);
        if (!hb.empty()) op.diag_right.emplace(q, std::move(hb));
    }

    // Boundary factors: one entry per primitive cut-crossing term. The
    // off-diagonal coefficient is carried by the left block.
    for (const auto& bt : ctx.split.boundary) {
        BlockOperator::BoundaryBlocks bb;
        bb.coeff = bt.coeff;
        bb.label = bt.label;
        bb.dq_left = bt.dq_left;
        bb.dq_right = bt.dq_right;
        for (const auto& pair : table.pairs) {
            const QuantumNumber& kl = pair.q_left;
            const QuantumNumber& kr = pair.q_right;
            QuantumNumber ql = compose(kl, bt.dq_left);
            QuantumNumber qr = compose(kr, bt.dq_right);
            if (table.find_pair(ql) < 0) continue; // destination pruned at plan time anyway
            const PartitionBasis* lb_to = ctx.left.find(ql);
            const PartitionBasis* rb_to = ctx.right.find(qr);
            if (!lb_to || !rb_to) continue;
            if (!bb.left.count(kl)) {
                SparseBlock blk = chain_block(bt.left, bt.coeff, ctx.basis(Side::left, kl), *lb_to,
                                              dense_threshold);
                if (!blk.empty()) bb.left.emplace(kl, std::move(blk));
            }
            if (!bb.right.count(kr)) {
                SparseBlock blk = chain_block(bt.right, 1.0, ctx.basis(Side::right, kr), *rb_to,
                                              dense_threshold);
                if (!blk.empty()) bb.right.emplace(kr, std::move(blk));
            }
        }
        op.boundary.push_back(std::move(bb));
    }
    return op;
}

} // namespace blockwave
