#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "blockwave/blocks.hpp"
#include "blockwave/layout.hpp"

namespace blockwave {

// Experiment phases the counters are keyed by.
enum class Phase : int { setup = 0, right_diag, left_diag, boundary, reduction, gather, io, other };
inline constexpr int kNumPhases = 8;
const char* phase_name(Phase p);

struct PhaseCounters {
    std::uint64_t calls = 0;           // collective invocations
    std::uint64_t elements_real = 0;   // off-rank elements, padding excluded
    std::uint64_t elements_padded = 0; // off-rank elements as transferred
    std::uint64_t flops = 0;
    PhaseCounters& operator+=(const PhaseCounters& o);
};

// Counter snapshot summed over ranks in ascending rank order.
struct CounterReport {
    std::array<PhaseCounters, kNumPhases> phases{};
    PhaseCounters total() const;
    CounterReport& operator+=(const CounterReport& o);
};

namespace detail {
class RankGroup;
}

// Handle held by one simulated rank. Collectives are bulk-synchronous; a
// geometry disagreement makes every rank throw CollectiveAbort. Reductions
// and gathers combine contributions in ascending rank order, so results are
// bitwise identical on every rank and across scheduling modes.
//
// Element accounting (documented conventions): all_to_all counts what each
// rank ships off-rank; the self batch is free. all_reduce is modeled as
// gather-to-root plus broadcast (2n per non-root rank); gather counts the
// non-root contributions; all_gather counts each contribution P-1 times.
class Communicator {
public:
    Communicator(detail::RankGroup* g, int rank) : group_(g), rank_(rank) {}

    int rank() const { return rank_; }
    int size() const;

    void barrier();
    // to[m] is delivered to rank m (to.size() == P); returns the buffers
    // received from every rank. `real_elems` is the caller's count of
    // non-padding elements among its off-rank sends; `geom_tag` is mixed
    // into the cross-rank geometry check.
    std::vector<std::vector<double>> all_to_all(std::vector<std::vector<double>>&& to, Phase phase,
                                                std::uint64_t real_elems, std::uint64_t geom_tag = 0);
    void all_reduce_sum(std::span<double> data, Phase phase = Phase::reduction);
    std::vector<double> all_gather_v(std::span<const double> local, Phase phase = Phase::reduction);
    // root receives the rank-ascending concatenation; everyone else gets {}
    std::vector<double> gather_v(std::span<const double> local, int root, Phase phase = Phase::gather);
    // parts (root only, parts.size() == P) scattered; returns this rank's part
    std::vector<double> scatter_v(const std::vector<std::vector<double>>& parts, int root,
                                  Phase phase = Phase::io);

    void add_flops(Phase phase, std::uint64_t n);
    CounterReport local_counters() const;

private:
    detail::RankGroup* group_;
    int rank_;
};

enum class Schedule { serial, threads };
const char* schedule_name(Schedule s);

// Runs `body` once per simulated rank (SPMD) and returns the merged counter
// report. `serial` hands a baton round-robin so a single rank runs at a
// time; `threads` runs ranks concurrently. Results are identical.
CounterReport run_ranks(int P, Schedule schedule, const std::function<void(Communicator&)>& body);

// Parallel transposition T*. The local input block holds this rank's
// `col_split.width` columns with rows in slot space of `row_split`
// (rows beyond `local.rows` read as zero). The m-th row batch goes to rank
// m and lands as column batch `rank()`; the self batch moves locally and
// counts as zero exchange. The result holds the transpose's columns for
// this rank: col_split.slots() slot rows by row_split.width columns.
DenseBlock parallel_transpose(Communicator& comm, const DenseBlock& local, const Split& col_split,
                              const Split& row_split, Phase phase);

// Off-rank padded element count of one T* call: V_pad * (1 - 1/P).
std::uint64_t transpose_padded_volume(const Split& col_split, const Split& row_split);

} // namespace blockwave
