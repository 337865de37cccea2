#pragma once

#include <cstdint>
#include <vector>

#include "blockwave/block_state.hpp"
#include "blockwave/matvec.hpp"

namespace blockwave {

struct LanczosConfig {
    int max_iterations = 500;
    double tolerance = 1e-12;       // successive Ritz-value change
    double residual_factor = 1e-8;  // ||H psi - E psi|| <= factor * max(1, |E|)
    std::uint64_t seed = 1;
};

struct LanczosTraceRow {
    int iteration;
    double ritz_value;
    double residual_estimate;
};

struct LanczosResult {
    double energy = 0.0;
    BlockWavefunction ground_state;
    int iterations = 0;
    double residual = 0.0;
    double ritz_gap = 0.0;      // second - lowest Ritz value at convergence
    bool degenerate = false;    // gap below 1e-10: state arbitrary in the degenerate space
    std::vector<LanczosTraceRow> trace;
};

// Ground state by full-reorthogonalization Lanczos over the distributed
// matvec. Throws ConvergenceError (with the last Ritz value) when the
// residual bound is not met within max_iterations.
LanczosResult lanczos_ground_state(Communicator& comm, const ApplyPlan& plan,
                                   const SectorPairTable& table, const DistributionLayout& layout,
                                   const LanczosConfig& cfg);

} // namespace blockwave
