#include "blockwave/lanczos.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "blockwave/errors.hpp"
#include "blockwave/tridiag.hpp"

namespace blockwave {

LanczosResult lanczos_ground_state(Communicator& comm, const ApplyPlan& plan,
                                   const SectorPairTable& table, const DistributionLayout& layout,
                                   const LanczosConfig& cfg) {
    if (table.dim() < 1) throw StructuralError("lanczos: zero-dimensional sector");
    if (cfg.max_iterations < 2) throw StructuralError("lanczos: max_iterations must be >= 2");
    if (cfg.tolerance <= 0.0) throw StructuralError("lanczos: tolerance must be positive");

    const long dim = table.dim();
    const int kmax = int(std::min<long>(cfg.max_iterations, dim));

    std::vector<BlockWavefunction> basis;
    basis.reserve(std::size_t(kmax) + 1);
    basis.push_back(random_state(table, layout, comm.rank(), cfg.seed));
    normalize(comm, basis.back());

    std::vector<double> alpha, beta;
    LanczosResult res;
    res.ground_state = make_zero_state(table, layout, comm.rank());

    double prev_ritz = std::numeric_limits<double>::infinity();
    double ritz = prev_ritz;
    bool converged = false;
    bool breakdown = false;
    std::vector<double> evs;

    BlockWavefunction w = make_zero_state(table, layout, comm.rank());
    for (int k = 0; k < kmax; ++k) {
        apply_hamiltonian(comm, plan, basis[std::size_t(k)], w);
        const double a = dot(comm, basis[std::size_t(k)], w);
        alpha.push_back(a);
        axpy(-a, basis[std::size_t(k)], w);
        if (k > 0) axpy(-beta[std::size_t(k) - 1], basis[std::size_t(k) - 1], w);
        // full reorthogonalization against the whole Krylov basis
        for (int j = 0; j <= k; ++j) {
            const double c = dot(comm, basis[std::size_t(j)], w);
            axpy(-c, basis[std::size_t(j)], w);
        }
        const double b = norm(comm, w);

        evs = tridiag_eigenvalues(alpha, beta);
        ritz = evs.front();
        double resid_est = b;
        if (alpha.size() > 1) {
            auto y = tridiag_eigenvector(alpha, beta, ritz);
            resid_est = b * std::abs(y.back());
        }
        res.trace.push_back({k + 1, ritz, resid_est});

        const double sc = std::max(1.0, std::abs(ritz));
        if (b <= 1e-14 * sc) {
            breakdown = true; // exact invariant subspace
            converged = true;
            res.iterations = k + 1;
            break;
        }
        if (std::abs(ritz - prev_ritz) <= cfg.tolerance * sc &&
            resid_est <= 0.5 * cfg.residual_factor * sc) {
            converged = true;
            res.iterations = k + 1;
            break;
        }
        prev_ritz = ritz;
        if (k + 1 < kmax) {
            BlockWavefunction next = w;
            scale(1.0 / b, next);
            basis.push_back(std::move(next));
            beta.push_back(b);
        } else {
            res.iterations = k + 1;
        }
    }
    if (long(alpha.size()) == dim && !converged) converged = true; // full Krylov space spanned

    if (!converged)
        throw ConvergenceError("lanczos: no convergence in " + std::to_string(cfg.max_iterations) +
                                   " iterations; last Ritz value " + std::to_string(ritz),
                               ritz);

    // assemble the Ritz vector in fixed basis order
    std::vector<double> y;
    if (alpha.size() == 1) {
        y = {1.0};
    } else {
        y = tridiag_eigenvector(alpha, beta, ritz);
    }
    for (std::size_t j = 0; j < y.size(); ++j) axpy(y[j], basis[j], res.ground_state);
    normalize(comm, res.ground_state);
    res.energy = ritz;
    res.ritz_gap = evs.size() > 1 ? evs[1] - evs[0] : std::numeric_limits<double>::infinity();
    res.degenerate = res.ritz_gap < 1e-10;

    // explicit residual check of the post-condition
    apply_hamiltonian(comm, plan, res.ground_state, w);
    axpy(-res.energy, res.ground_state, w);
    res.residual = norm(comm, w);
    (void)breakdown;
    const double bound = cfg.residual_factor * std::max(1.0, std::abs(res.energy));
    if (res.residual > bound)
        throw ConvergenceError("lanczos: residual " + std::to_string(res.residual) +
                                   " exceeds the bound " + std::to_string(bound),
                               res.energy);
    return res;
}

} // namespace blockwave
