#include "blockwave/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <unordered_map>

#include "blockwave/errors.hpp"

namespace blockwave {

DenseOracle::DenseOracle(const SectorContext& ctx) : ctx_(&ctx) {
    nl_ = ctx.pm.bits(Side::left);
    pair_offset_.resize(ctx.table.pairs.size() + 1, 0);
    for (std::size_t i = 0; i < ctx.table.pairs.size(); ++i)
        pair_offset_[i + 1] =
            pair_offset_[i] + ctx.table.pairs[i].d_left * ctx.table.pairs[i].d_right;
    dim_ = pair_offset_.back();
    for (const auto& term : ctx.terms) {
        Chain ch;
        ch.coeff = term.coeff;
        for (const auto& f : term.factors) {
            auto [side, bit] = ctx.pm.locate(f.mode);
            ch.factors.push_back({side == Side::left ? bit : bit + nl_, f.op});
        }
        chains_.push_back(std::move(ch));
    }
}

long DenseOracle::locate(std::uint64_t pat, long& pair, long& l, long& r) const {
    const std::uint64_t lmask = (nl_ == 64) ? ~0ull : ((1ull << nl_) - 1);
    const std::uint64_t lpat = pat & lmask;
    const std::uint64_t rpat = pat >> nl_;
    QuantumNumber ql = pattern_quantum_number(ctx_->model, ctx_->pm.left, lpat);
    int pi = ctx_->table.find_pair(ql);
    if (pi < 0) return -1;
    const auto& pr = ctx_->table.pairs[std::size_t(pi)];
    const PartitionBasis& lb = ctx_->basis(Side::left, pr.q_left);
    const PartitionBasis& rb = ctx_->basis(Side::right, pr.q_right);
    long li = lb.find(lpat), ri = rb.find(rpat);
    if (li < 0 || ri < 0) return -1;
    pair = pi;
    l = li;
    r = ri;
    return pair_offset_[std::size_t(pi)] + li * pr.d_right + ri;
}

void DenseOracle::apply(std::span<const double> x, std::span<double> y) const {
    if (long(x.size()) != dim_ || long(y.size()) != dim_)
        throw StructuralError("oracle apply: dimension mismatch");
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t pi = 0; pi < ctx_->table.pairs.size(); ++pi) {
        const auto& pr = ctx_->table.pairs[pi];
        const PartitionBasis& lb = ctx_->basis(Side::left, pr.q_left);
        const PartitionBasis& rb = ctx_->basis(Side::right, pr.q_right);
        for (long l = 0; l < pr.d_left; ++l)
            for (long r = 0; r < pr.d_right; ++r) {
                const long col = pair_offset_[pi] + l * pr.d_right + r;
                const double xv = x[std::size_t(col)];
                if (xv == 0.0) continue;
                const std::uint64_t pat = lb.states[std::size_t(l)] |
                                          (rb.states[std::size_t(r)] << nl_);
                for (const auto& ch : chains_) {
                    std::uint64_t out = pat;
                    double amp = apply_factor_chain(out, ch.factors);
                    if (amp == 0.0) continue;
                    long qp, ql, qr;
                    long row = locate(out, qp, ql, qr);
                    if (row < 0)
                        throw StructuralError("oracle apply: term leaves the symmetry sector");
                    y[std::size_t(row)] += ch.coeff * amp * xv;
                }
            }
    }
}

DenseBlock DenseOracle::matrix(long cap) const {
    if (dim_ > cap)
        throw OracleCapError("dense oracle matrix: dimension " + std::to_string(dim_) +
                                 " exceeds the cap " + std::to_string(cap),
                             dim_);
    DenseBlock h(dim_, dim_);
    std::vector<double> e(static_cast<std::size_t>(dim_), 0.0);
    std::vector<double> col(static_cast<std::size_t>(dim_), 0.0);
    for (long c = 0; c < dim_; ++c) {
        e[std::size_t(c)] = 1.0;
        apply(e, col);
        e[std::size_t(c)] = 0.0;
        for (long r = 0; r < dim_; ++r) h.at(r, c) = col[std::size_t(r)];
    }
    return h;
}

std::vector<double> dense_symmetric_eigenvalues(const DenseBlock& h) {
    Eigen::Map<const Eigen::MatrixXd> m(h.a.data(), h.rows, h.cols);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    std::vector<double> out(static_cast<std::size_t>(h.rows), 0.0);
    for (long i = 0; i < h.rows; ++i) out[std::size_t(i)] = es.eigenvalues()[i];
    return out;
}

double dense_ground_energy(const DenseBlock& h) {
    auto ev = dense_symmetric_eigenvalues(h);
    if (ev.empty()) throw StructuralError("ground energy of an empty sector");
    return ev.front();
}

std::vector<double> dense_rho_left_eigenvalues(const SectorContext& ctx,
                                               std::span<const double> coeffs) {
    const int nl = ctx.pm.bits(Side::left);
    const int nr = ctx.pm.bits(Side::right);
    const long dl = 1l << nl, dr = 1l << nr;
    Eigen::MatrixXd f = Eigen::MatrixXd::Zero(dl, dr);
    long off = 0;
    for (const auto& pr : ctx.table.pairs) {
        const PartitionBasis& lb = ctx.basis(Side::left, pr.q_left);
        const PartitionBasis& rb = ctx.basis(Side::right, pr.q_right);
        for (long l = 0; l < pr.d_left; ++l)
            for (long r = 0; r < pr.d_right; ++r)
                f(long(lb.states[std::size_t(l)]), long(rb.states[std::size_t(r)])) =
                    coeffs[std::size_t(off + l * pr.d_right + r)];
        off += pr.d_left * pr.d_right;
    }
    Eigen::MatrixXd rho = f * f.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho, Eigen::EigenvaluesOnly);
    std::vector<double> out(static_cast<std::size_t>(dl), 0.0);
    for (long i = 0; i < dl; ++i) out[std::size_t(i)] = es.eigenvalues()[dl - 1 - i];
    return out;
}

double entropy_from_eigenvalues(std::span<const double> lambda) {
    double s = 0.0;
    for (double v : lambda)
        if (v > 0.0) s -= v * std::log(v);
    return s;
}

} // namespace blockwave
