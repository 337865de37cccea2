#include "blockwave/entanglement.hpp"

#include <algorithm>
#include <cmath>

#include "blockwave/errors.hpp"
#include "blockwave/svd.hpp"

namespace blockwave {

std::vector<double> EntanglementReport::chi_series() const {
    std::vector<double> out;
    out.reserve(sectors.size());
    for (const auto& s : sectors) out.push_back(double(s.chi));
    return out;
}

EntanglementReport schmidt_decompose(const GatheredState& state, double schmidt_cutoff) {
    EntanglementReport rep;
    rep.schmidt_cutoff = schmidt_cutoff;
    rep.norm_sq = state.norm_sq();
    if (std::abs(std::sqrt(rep.norm_sq) - 1.0) > 1e-8)
        throw StructuralError("schmidt_decompose: state is not normalized (norm=" +
                              std::to_string(std::sqrt(rep.norm_sq)) + ")");
    double total_weight = 0.0;
    for (std::size_t i = 0; i < state.table.pairs.size(); ++i) {
        SectorSpectrum s;
        s.pair = int(i);
        s.q_left = state.table.pairs[i].q_left;
        s.q_right = state.table.pairs[i].q_right;
        s.sigma = singular_values(state.blocks[i]);
        for (double v : s.sigma) {
            const double lam = v * v;
            s.weight += lam;
            if (lam > schmidt_cutoff) ++s.chi;
            if (lam > 0.0) rep.entropy -= lam * std::log(lam);
        }
        total_weight += s.weight;
        rep.sectors.push_back(std::move(s));
    }
    for (auto& s : rep.sectors) s.weight /= total_weight;
    return rep;
}

const char* ipr_assignment_name(IprAssignment a) {
    return a == IprAssignment::sector ? "sector" : "column";
}

double IprResult::sum() const {
    double s = 0.0;
    for (double v : w_p) s += v;
    return s;
}

double IprResult::max() const {
    double s = 0.0;
    for (double v : w_p) s = std::max(s, v);
    return s;
}

IprResult process_ipr(const EntanglementReport& rep, const GatheredState& state, int ranks,
                      IprAssignment mode) {
    if (ranks < 1) throw StructuralError("process_ipr: rank count must be >= 1");
    IprResult out;
    out.ranks = ranks;
    out.mode = mode;
    out.w_p.assign(std::size_t(ranks), 0.0);

    if (mode == IprAssignment::sector) {
        // contiguous groups of the canonical sector list, balanced by chi
        double total_chi = 0.0;
        for (const auto& s : rep.sectors) total_chi += double(s.chi);
        if (total_chi == 0.0) total_chi = 1.0;
        double cum = 0.0;
        int p = 0;
        for (const auto& s : rep.sectors) {
            while (p + 1 < ranks && cum >= total_chi * double(p + 1) / double(ranks)) ++p;
            out.w_p[std::size_t(p)] += s.weight * s.weight;
            cum += double(s.chi);
        }
        return out;
    }

    // column mode: W_q split by the owned share of the block's squared norm
    for (std::size_t i = 0; i < rep.sectors.size(); ++i) {
        const auto& blk = state.blocks[i];
        Split cs = Split::balanced(blk.cols, ranks);
        double block_sq = 0.0;
        for (double v : blk.a) block_sq += v * v;
        for (int p = 0; p < ranks; ++p) {
            double owned = 0.0;
            for (long j = 0; j < cs.count[std::size_t(p)]; ++j) {
                const double* col = blk.col(cs.begin[std::size_t(p)] + j);
                for (long r = 0; r < blk.rows; ++r) owned += col[r] * col[r];
            }
            const double frac = block_sq > 0.0 ? owned / block_sq : 0.0;
            const double share = rep.sectors[i].weight * frac;
            out.w_p[std::size_t(p)] += share * share;
        }
    }
    return out;
}

} // namespace blockwave
