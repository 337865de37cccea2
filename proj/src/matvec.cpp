#include "blockwave/matvec.hpp"

#include <algorithm>
#include <sstream>

#include "blockwave/errors.hpp"

namespace blockwave {

namespace {

// One (H_L x 1) or (L_m x R_m) style task: transpose, multiply on the left
// partition index, transpose back, accumulate. `src` holds the columns of a
// d_src_R x d_src_L distributed block; the result lands in `dst` with the
// destination pair's layout.
void transpose_multiply_accumulate(Communicator& comm, const DenseBlock& src,
                                   const SparseBlock& lblk, const Split& src_cols,
                                   const Split& dst_rows, const Split& dst_cols, long dst_d_right,
                                   DenseBlock& dst, Phase phase) {
    const int me = comm.rank();
    DenseBlock t1 = parallel_transpose(comm, src, src_cols, dst_rows, phase);
    DenseBlock tc = compact_rows(t1, src_cols); // d_src_L x B
    if (tc.rows != lblk.cols)
        throw StructuralError("left multiply: block column mismatch");
    DenseBlock y(lblk.rows, tc.cols);
    const long real_cols = dst_rows.count[std::size_t(me)];
    lblk.apply_block_add(tc, y, real_cols);
    comm.add_flops(phase, lblk.flops_per_col() * std::uint64_t(real_cols));
    DenseBlock ye = expand_rows(y, dst_cols); // slot rows of the destination columns
    DenseBlock t2 = parallel_transpose(comm, ye, dst_rows, dst_cols, phase);
    for (long c = 0; c < dst.cols; ++c) {
        const double* s = t2.col(c);
        double* d = dst.col(c);
        for (long r = 0; r < dst_d_right; ++r) d[r] += s[r];
    }
}

void check_state(const ApplyPlan& plan, const BlockWavefunction& psi) {
    if (psi.table != plan.table || psi.layout != plan.layout)
        throw StructuralError("apply plan used with a mismatched state");
}

} // namespace

long ApplyPlan::left_task_count() const {
    long n = 0;
    for (const auto& d : diag) n += d.h_left ? 1 : 0;
    return n;
}

long ApplyPlan::boundary_task_count() const {
    long n = 0;
    for (const auto& b : boundary) n += long(b.size());
    return n;
}

std::uint64_t ApplyPlan::t_star_calls_per_matvec() const {
    return 2 * std::uint64_t(left_task_count()) + 2 * std::uint64_t(boundary_task_count());
}

std::uint64_t ApplyPlan::padded_exchange_per_matvec() const {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        if (!diag[i].h_left) continue;
        total += transpose_padded_volume(layout->col[i], layout->row[i]);
        total += transpose_padded_volume(layout->row[i], layout->col[i]);
    }
    for (std::size_t i = 0; i < boundary.size(); ++i)
        for (const auto& t : boundary[i]) {
            total += transpose_padded_volume(layout->col[std::size_t(t.src_pair)],
                                             layout->row[std::size_t(t.dst_pair)]);
            total += transpose_padded_volume(layout->row[std::size_t(t.dst_pair)],
                                             layout->col[std::size_t(t.dst_pair)]);
        }
    return total;
}

std::uint64_t ApplyPlan::flops_per_matvec() const {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < diag.size(); ++i) {
        const auto& pr = table->pairs[i];
        if (diag[i].h_right) total += diag[i].h_right->flops_per_col() * std::uint64_t(pr.d_left);
        if (diag[i].h_left) total += diag[i].h_left->flops_per_col() * std::uint64_t(pr.d_right);
    }
    for (std::size_t i = 0; i < boundary.size(); ++i)
        for (const auto& t : boundary[i]) {
            total += t.right->flops_per_col() *
                     std::uint64_t(table->pairs[std::size_t(t.src_pair)].d_left);
            total += t.left->flops_per_col() *
                     std::uint64_t(table->pairs[std::size_t(t.dst_pair)].d_right);
        }
    return total;
}

std::string ApplyPlan::dump_json() const {
    std::ostringstream os;
    os.precision(17);
    os << "{\n  \"ranks\": " << layout->P << ",\n  \"pairs\": [\n";
    for (std::size_t i = 0; i < diag.size(); ++i) {
        const auto& pr = table->pairs[i];
        const auto& pd = diag[i];
        std::uint64_t pair_flops = 0, pair_volume = 0;
        if (pd.h_right) pair_flops += pd.h_right->flops_per_col() * std::uint64_t(pr.d_left);
        if (pd.h_left) {
            pair_flops += pd.h_left->flops_per_col() * std::uint64_t(pr.d_right);
            pair_volume += transpose_padded_volume(layout->col[i], layout->row[i]) +
                           transpose_padded_volume(layout->row[i], layout->col[i]);
        }
        for (const auto& t : boundary[i]) {
            pair_flops += t.right->flops_per_col() *
                              std::uint64_t(table->pairs[std::size_t(t.src_pair)].d_left) +
                          t.left->flops_per_col() * std::uint64_t(pr.d_right);
            pair_volume += transpose_padded_volume(layout->col[std::size_t(t.src_pair)],
                                                   layout->row[i]) +
                           transpose_padded_volume(layout->row[i], layout->col[i]);
        }
        os << "    {\"pair\": " << i << ", \"q_left\": \"" << pr.q_left.str() << "\", \"q_right\": \""
           << pr.q_right.str() << "\", \"d_left\": " << pr.d_left << ", \"d_right\": " << pr.d_right
           << ", \"theta_max\": " << layout->col[i].width << ", \"has_h_left\": "
           << (diag[i].h_left ? "true" : "false") << ", \"has_h_right\": "
           << (diag[i].h_right ? "true" : "false") << ", \"boundary_tasks\": [";
        for (std::size_t k = 0; k < boundary[i].size(); ++k) {
            const auto& t = boundary[i][k];
            os << (k ? ", " : "") << "{\"m\": " << t.m << ", \"src_pair\": " << t.src_pair << "}";
        }
        os << "], \"flops\": " << pair_flops << ", \"t_star_volume_padded\": " << pair_volume << "}"
           << (i + 1 < diag.size() ? "," : "") << "\n";
    }
    os << "  ],\n  \"left_tasks\": " << left_task_count()
       << ",\n  \"boundary_tasks\": " << boundary_task_count()
       << ",\n  \"t_star_calls_per_matvec\": " << t_star_calls_per_matvec()
       << ",\n  \"padded_exchange_per_matvec\": " << padded_exchange_per_matvec()
       << ",\n  \"flops_per_matvec\": " << flops_per_matvec() << "\n}\n";
    return os.str();
}

ApplyPlan build_apply_plan(const BlockOperator& op, const SectorPairTable& table,
                           const DistributionLayout& layout) {
    ApplyPlan plan;
    plan.table = &table;
    plan.layout = &layout;
    plan.diag.resize(table.pairs.size());
    plan.boundary.resize(table.pairs.size());
    for (std::size_t i = 0; i < table.pairs.size(); ++i) {
        plan.diag[i].h_left = op.find_diag(Side::left, table.pairs[i].q_left);
        plan.diag[i].h_right = op.find_diag(Side::right, table.pairs[i].q_right);
    }
    // Boundary tasks keyed by destination pair; zero-dimension destinations
    // cannot appear because the table excludes them.
    for (std::size_t m = 0; m < op.boundary.size(); ++m) {
        const auto& bb = op.boundary[m];
        for (std::size_t k = 0; k < table.pairs.size(); ++k) {
            const auto& src = table.pairs[k];
            auto lit = bb.left.find(src.q_left);
            auto rit = bb.right.find(src.q_right);
            if (lit == bb.left.end() || rit == bb.right.end()) continue;
            QuantumNumber ql = compose(src.q_left, bb.dq_left);
            int dst = table.find_pair(ql);
            if (dst < 0) continue;
            plan.boundary[std::size_t(dst)].push_back(
                {int(m), int(k), dst, &lit->second, &rit->second});
        }
    }
    for (auto& tasks : plan.boundary)
        std::stable_sort(tasks.begin(), tasks.end(),
                         [](const ApplyPlan::BoundaryTask& a, const ApplyPlan::BoundaryTask& b) {
                             return a.m < b.m;
                         });
    return plan;
}

void apply_right_diagonal(Communicator& comm, const ApplyPlan& plan, const BlockWavefunction& in,
                          BlockWavefunction& out) {
    check_state(plan, in);
    check_state(plan, out);
    const int me = comm.rank();
    for (std::size_t i = 0; i < plan.diag.size(); ++i) {
        const SparseBlock* h = plan.diag[i].h_right;
        if (!h) continue;
        const long real_cols = plan.layout->col[i].count[std::size_t(me)];
        h->apply_block_add(in.blocks[i], out.blocks[i], real_cols);
        comm.add_flops(Phase::right_diag, h->flops_per_col() * std::uint64_t(real_cols));
    }
}

void apply_left_diagonal(Communicator& comm, const ApplyPlan& plan, const BlockWavefunction& in,
                         BlockWavefunction& out) {
    check_state(plan, in);
    check_state(plan, out);
    for (std::size_t i = 0; i < plan.diag.size(); ++i) {
        const SparseBlock* h = plan.diag[i].h_left;
        if (!h) continue;
        transpose_multiply_accumulate(comm, in.blocks[i], *h, plan.layout->col[i],
                                      plan.layout->row[i], plan.layout->col[i],
                                      plan.table->pairs[i].d_right, out.blocks[i],
                                      Phase::left_diag);
    }
}

void apply_boundary(Communicator& comm, const ApplyPlan& plan, const BlockWavefunction& in,
                    BlockWavefunction& out) {
    check_state(plan, in);
    check_state(plan, out);
    const int me = comm.rank();
    for (std::size_t i = 0; i < plan.boundary.size(); ++i) {
        for (const auto& t : plan.boundary[i]) {
            const auto src = std::size_t(t.src_pair);
            // C = R_m * Psi^k inherits the source distribution: local step.
            const long src_cols_real = plan.layout->col[src].count[std::size_t(me)];
            DenseBlock c(t.right->rows, in.blocks[src].cols);
            t.right->apply_block_add(in.blocks[src], c, src_cols_real);
            comm.add_flops(Phase::boundary,
                           t.right->flops_per_col() * std::uint64_t(src_cols_real));
            transpose_multiply_accumulate(comm, c, *t.left, plan.layout->col[src],
                                          plan.layout->row[i], plan.layout->col[i],
                                          plan.table->pairs[i].d_right, out.blocks[i],
                                          Phase::boundary);
        }
    }
}

TruncatedCost estimate_truncated_cost(const ApplyPlan& plan, const std::vector<long>& rank_per_pair,
                                      int P, double tau, double phi) {
    if (rank_per_pair.size() != plan.diag.size())
        throw StructuralError("estimate_truncated_cost: rank list size mismatch");
    auto ceil_div = [](long n, int p) { return std::uint64_t((n + p - 1) / p); };
    const std::uint64_t offdiag = std::uint64_t(P) * std::uint64_t(P - 1);
    TruncatedCost out;
    for (std::size_t i = 0; i < plan.diag.size(); ++i) {
        const std::uint64_t r = std::uint64_t(rank_per_pair[i]);
        if (r == 0) continue;
        if (plan.diag[i].h_right) out.flops += 2 * r * r * r;
        if (plan.diag[i].h_left) {
            out.flops += 2 * r * r * r;
            out.elements += 2 * offdiag * ceil_div(long(r), P) * ceil_div(long(r), P);
        }
    }
    for (std::size_t i = 0; i < plan.boundary.size(); ++i)
        for (const auto& t : plan.boundary[i]) {
            const std::uint64_t rq = std::uint64_t(rank_per_pair[i]);
            const std::uint64_t rk = std::uint64_t(rank_per_pair[std::size_t(t.src_pair)]);
            if (rq == 0 || rk == 0) continue;
            out.flops += 2 * rq * rk * rk + 2 * rq * rq * rk;
            out.elements += offdiag * (ceil_div(long(rk), P) * ceil_div(long(rq), P) +
                                       ceil_div(long(rq), P) * ceil_div(long(rq), P));
        }
    out.t_comm = tau * double(out.elements);
    out.t_comp = phi * double(out.flops);
    out.t_model = (out.t_comm + out.t_comp) / double(P);
    out.ratio = out.t_comp > 0.0 ? out.t_comm / out.t_comp : 0.0;
    return out;
}

void apply_hamiltonian(Communicator& comm, const ApplyPlan& plan, const BlockWavefunction& in,
                       BlockWavefunction& out) {
    check_state(plan, in);
    check_state(plan, out);
    for (auto& b : out.blocks) b.zero();
    // Fixed accumulation order: pair ascending, R -> L -> boundary (m asc).
    const int me = comm.rank();
    for (std::size_t i = 0; i < plan.diag.size(); ++i) {
        if (const SparseBlock* h = plan.diag[i].h_right) {
            const long real_cols = plan.layout->col[i].count[std::size_t(me)];
            h->apply_block_add(in.blocks[i], out.blocks[i], real_cols);
            comm.add_flops(Phase::right_diag, h->flops_per_col() * std::uint64_t(real_cols));
        }
        if (const SparseBlock* h = plan.diag[i].h_left)
            transpose_multiply_accumulate(comm, in.blocks[i], *h, plan.layout->col[i],
                                          plan.layout->row[i], plan.layout->col[i],
                                          plan.table->pairs[i].d_right, out.blocks[i],
                                          Phase::left_diag);
        for (const auto& t : plan.boundary[i]) {
            const auto src = std::size_t(t.src_pair);
            const long src_cols_real = plan.layout->col[src].count[std::size_t(me)];
            DenseBlock c(t.right->rows, in.blocks[src].cols);
            t.right->apply_block_add(in.blocks[src], c, src_cols_real);
            comm.add_flops(Phase::boundary,
                           t.right->flops_per_col() * std::uint64_t(src_cols_real));
            transpose_multiply_accumulate(comm, c, *t.left, plan.layout->col[src],
                                          plan.layout->row[i], plan.layout->col[i],
                                          plan.table->pairs[i].d_right, out.blocks[i],
                                          Phase::boundary);
        }
    }
}

} // namespace blockwave
