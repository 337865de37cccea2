#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blockwave/block_operator.hpp"
#include "blockwave/block_state.hpp"
#include "blockwave/layout.hpp"
#include "blockwave/transport.hpp"

namespace blockwave {

// Rank-independent schedule for one Hamiltonian application. Tasks cover
// every nonzero operator block exactly once; accumulation order is pair
// ascending, then R -> L -> boundary, boundary tasks by ascending m.
struct ApplyPlan {
    struct DiagTasks {
        const SparseBlock* h_left = nullptr;  // two T* per application
        const SparseBlock* h_right = nullptr; // communication-free
    };
    struct BoundaryTask {
        int m = 0;        // primitive boundary term index
        int src_pair = 0; // k = (k_l, k_r)
        int dst_pair = 0; // q = k (+) dq_m
        const SparseBlock* left = nullptr;
        const SparseBlock* right = nullptr;
    };

    const SectorPairTable* table = nullptr;
    const DistributionLayout* layout = nullptr;
    std::vector<DiagTasks> diag;                       // per pair
    std::vector<std::vector<BoundaryTask>> boundary;   // per destination pair

    long left_task_count() const;
    long boundary_task_count() const;
    // T* calls of one matvec: 2 per H_L block + 2 per boundary task
    std::uint64_t t_star_calls_per_matvec() const;
    std::uint64_t padded_exchange_per_matvec() const; // analytic counter prediction
    std::uint64_t flops_per_matvec() const;           // global, rank-independent
    std::string dump_json() const;                    // consumed by the cost model and tests
};

ApplyPlan build_apply_plan(const BlockOperator& op, const SectorPairTable& table,
                           const DistributionLayout& layout);

// Effective cost of one matvec when every pair is truncated to rank r[i]
// on both sides (operator blocks treated as dense in the truncated basis).
// Reuses the plan's task structure with the truncated block geometry.
struct TruncatedCost {
    std::uint64_t elements = 0; // padded exchange
    std::uint64_t flops = 0;
    double t_comm = 0.0, t_comp = 0.0, t_model = 0.0;
    double ratio = 0.0; // t_comm / t_comp
};
TruncatedCost estimate_truncated_cost(const ApplyPlan& plan, const std::vector<long>& rank_per_pair,
                                      int P, double tau, double phi);

// out = H * in  (out is overwritten; layouts must match the plan)
void apply_hamiltonian(Communicator& comm, const ApplyPlan& plan, const BlockWavefunction& in,
                       BlockWavefunction& out);

// Individual operation classes, accumulated into `out` (exposed for tests).
void apply_right_diagonal(Communicator& comm, const ApplyPlan& plan, const BlockWavefunction& in,
                          BlockWavefunction& out);
void apply_left_diagonal(Communicator& comm, const ApplyPlan& plan, const BlockWavefunction& in,
                         BlockWavefunction& out);
void apply_boundary(Communicator& comm, const ApplyPlan& plan, const BlockWavefunction& in,
                    BlockWavefunction& out);

} // namespace blockwave
