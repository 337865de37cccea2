#include "blockwave/transport.hpp"

#include <atomic>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

#include "blockwave/errors.hpp"

namespace blockwave {

const char* phase_name(Phase p) {
    switch (p) {
    case Phase::setup: return "setup";
    case Phase::right_diag: return "right_diag";
    case Phase::left_diag: return "left_diag";
    case Phase::boundary: return "boundary";
    case Phase::reduction: return "reduction";
    case Phase::gather: return "gather";
    case Phase::io: return "io";
    case Phase::other: return "other";
    }
    return "?";
}

const char* schedule_name(Schedule s) { return s == Schedule::serial ? "serial" : "threads"; }

PhaseCounters& PhaseCounters::operator+=(const PhaseCounters& o) {
    calls += o.calls;
    elements_real += o.elements_real;
    elements_padded += o.elements_padded;
    flops += o.flops;
    return *this;
}

PhaseCounters CounterReport::total() const {
    PhaseCounters t;
    for (const auto& p : phases) t += p;
    return t;
}

CounterReport& CounterReport::operator+=(const CounterReport& o) {
    for (int i = 0; i < kNumPhases; ++i) phases[std::size_t(i)] += o.phases[std::size_t(i)];
    return *this;
}

namespace detail {

// Shared state of one simulated rank group. Collectives deposit into fixed
// slots, synchronize, then read; a second synchronization protects the
// boards from the next round. The serial schedule keeps exactly one rank
// runnable and passes the baton in ascending order at every sync point.
class RankGroup {
public:
    RankGroup(int P, Schedule mode)
        : P(P), mode(mode), a2a_board(std::size_t(P) * std::size_t(P)), slot_board(std::size_t(P)),
          stamps(std::size_t(P)), tallies(std::size_t(P)), errors(std::size_t(P)) {}

    const int P;
    const Schedule mode;
    std::vector<std::vector<double>> a2a_board;  // [src * P + dst]
    std::vector<std::vector<double>> slot_board; // [rank]
    std::vector<std::uint64_t> stamps;           // geometry checks
    std::vector<CounterReport> tallies;
    std::vector<std::exception_ptr> errors;
    std::atomic<bool> aborted{false};

    void sync(int me) {
        std::unique_lock lk(mu_);
        if (aborted.load()) throw CollectiveAbort("collective aborted on another rank");
        const long g0 = generation_;
        if (++arrived_ == P) {
            arrived_ = 0;
            ++generation_;
            turn_ = 0;
            cv_.notify_all();
        } else if (mode == Schedule::serial) {
            turn_ = me + 1;
            cv_.notify_all();
        }
        cv_.wait(lk, [&] {
            return aborted.load() || (generation_ != g0 && (mode != Schedule::serial || turn_ == me));
        });
        if (aborted.load()) throw CollectiveAbort("collective aborted on another rank");
    }

    void gate_entry(int me) {
        if (mode != Schedule::serial) return;
        std::unique_lock lk(mu_);
        cv_.wait(lk, [&] { return aborted.load() || turn_ == me; });
    }

    void gate_exit(int me) {
        std::unique_lock lk(mu_);
        if (mode == Schedule::serial) turn_ = me + 1;
        cv_.notify_all();
    }

    void abort_all() {
        std::unique_lock lk(mu_);
        aborted.store(true);
        cv_.notify_all();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    long generation_ = 0;
    int arrived_ = 0;
    int turn_ = 0;
};

} // namespace detail

int Communicator::size() const { return group_->P; }

void Communicator::barrier() { group_->sync(rank_); }

void Communicator::add_flops(Phase phase, std::uint64_t n) {
    group_->tallies[std::size_t(rank_)].phases[std::size_t(int(phase))].flops += n;
}

CounterReport Communicator::local_counters() const { return group_->tallies[std::size_t(rank_)]; }

namespace {

std::uint64_t stamp_sizes(const std::vector<std::vector<double>>& bufs) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(bufs.size());
    for (const auto& b : bufs) mix(b.size());
    return h;
}

} // namespace

std::vector<std::vector<double>> Communicator::all_to_all(std::vector<std::vector<double>>&& to,
                                                          Phase phase, std::uint64_t real_elems,
                                                          std::uint64_t geom_tag) {
    const int P = group_->P;
    if (int(to.size()) != P) throw StructuralError("all_to_all: batch count != rank count");
    auto& tally = group_->tallies[std::size_t(rank_)].phases[std::size_t(int(phase))];
    tally.calls += 1;
    std::uint64_t padded = 0;
    for (int m = 0; m < P; ++m)
        if (m != rank_) padded += to[std::size_t(m)].size();
    tally.elements_padded += padded;
    tally.elements_real += real_elems;

    group_->stamps[std::size_t(rank_)] = stamp_sizes(to) ^ geom_tag;
    for (int m = 0; m < P; ++m)
        group_->a2a_board[std::size_t(rank_) * std::size_t(P) + std::size_t(m)] =
            std::move(to[std::size_t(m)]);
    group_->sync(rank_);
    bool mismatch = false;
    for (int p = 0; p < P; ++p)
        if (group_->stamps[std::size_t(p)] != group_->stamps[std::size_t(rank_)]) mismatch = true;
    if (mismatch) {
        group_->abort_all();
        throw CollectiveAbort("all_to_all: geometry mismatch across ranks");
    }
    std::vector<std::vector<double>> recv(static_cast<std::size_t>(P));
    for (int p = 0; p < P; ++p)
        recv[std::size_t(p)] =
            std::move(group_->a2a_board[std::size_t(p) * std::size_t(P) + std::size_t(rank_)]);
    group_->sync(rank_);
    return recv;
}

void Communicator::all_reduce_sum(std::span<double> data, Phase phase) {
    const int P = group_->P;
    auto& tally = group_->tallies[std::size_t(rank_)].phases[std::size_t(int(phase))];
    tally.calls += 1;
    if (rank_ != 0) {
        tally.elements_real += 2 * data.size();
        tally.elements_padded += 2 * data.size();
    }
    group_->slot_board[std::size_t(rank_)].assign(data.begin(), data.end());
    group_->stamps[std::size_t(rank_)] = data.size();
    group_->sync(rank_);
    for (int p = 0; p < P; ++p)
        if (group_->stamps[std::size_t(p)] != group_->stamps[std::size_t(rank_)]) {
            group_->abort_all();
            throw CollectiveAbort("all_reduce_sum: shape mismatch across ranks");
        }
    for (std::size_t k = 0; k < data.size(); ++k) {
        double s = group_->slot_board[0][k];
        for (int p = 1; p < P; ++p) s += group_->slot_board[std::size_t(p)][k];
        data[k] = s;
    }
    group_->sync(rank_);
}

std::vector<double> Communicator::all_gather_v(std::span<const double> local, Phase phase) {
    const int P = group_->P;
    auto& tally = group_->tallies[std::size_t(rank_)].phases[std::size_t(int(phase))];
    tally.calls += 1;
    tally.elements_real += local.size() * std::size_t(P - 1);
    tally.elements_padded += local.size() * std::size_t(P - 1);
    group_->slot_board[std::size_t(rank_)].assign(local.begin(), local.end());
    group_->sync(rank_);
    std::vector<double> out;
    for (int p = 0; p < P; ++p) {
        const auto& b = group_->slot_board[std::size_t(p)];
        out.insert(out.end(), b.begin(), b.end());
    }
    group_->sync(rank_);
    return out;
}

std::vector<double> Communicator::gather_v(std::span<const double> local, int root, Phase phase) {
    const int P = group_->P;
    auto& tally = group_->tallies[std::size_t(rank_)].phases[std::size_t(int(phase))];
    tally.calls += 1;
    if (rank_ != root) {
        tally.elements_real += local.size();
        tally.elements_padded += local.size();
    }
    group_->slot_board[std::size_t(rank_)].assign(local.begin(), local.end());
    group_->sync(rank_);
    std::vector<double> out;
    if (rank_ == root)
        for (int p = 0; p < P; ++p) {
            const auto& b = group_->slot_board[std::size_t(p)];
            out.insert(out.end(), b.begin(), b.end());
        }
    group_->sync(rank_);
    return out;
}

std::vector<double> Communicator::scatter_v(const std::vector<std::vector<double>>& parts, int root,
                                            Phase phase) {
    const int P = group_->P;
    auto& tally = group_->tallies[std::size_t(rank_)].phases[std::size_t(int(phase))];
    tally.calls += 1;
    if (rank_ == root) {
        if (int(parts.size()) != P) throw StructuralError("scatter_v: part count != rank count");
        for (int m = 0; m < P; ++m) {
            if (m != root) {
                tally.elements_real += parts[std::size_t(m)].size();
                tally.elements_padded += parts[std::size_t(m)].size();
            }
            group_->a2a_board[std::size_t(root) * std::size_t(P) + std::size_t(m)] =
                parts[std::size_t(m)];
        }
    }
    group_->sync(rank_);
    std::vector<double> out =
        std::move(group_->a2a_board[std::size_t(root) * std::size_t(P) + std::size_t(rank_)]);
    group_->sync(rank_);
    return out;
}

CounterReport run_ranks(int P, Schedule schedule, const std::function<void(Communicator&)>& body) {
    if (P < 1) throw StructuralError("run_ranks: rank count must be >= 1");
    detail::RankGroup group(P, schedule);
    std::vector<std::thread> workers;
    workers.reserve(std::size_t(P));
    for (int r = 0; r < P; ++r) {
        workers.emplace_back([&group, &body, r] {
            group.gate_entry(r);
            try {
                Communicator comm(&group, r);
                body(comm);
            } catch (...) {
                group.errors[std::size_t(r)] = std::current_exception();
                group.abort_all();
            }
            group.gate_exit(r);
        });
    }
    for (auto& w : workers) w.join();

    // Prefer the root cause over secondary collective aborts.
    std::exception_ptr first_abort;
    for (int r = 0; r < P; ++r) {
        if (!group.errors[std::size_t(r)]) continue;
        try {
            std::rethrow_exception(group.errors[std::size_t(r)]);
        } catch (const CollectiveAbort&) {
            if (!first_abort) first_abort = group.errors[std::size_t(r)];
        } catch (...) {
            std::rethrow_exception(group.errors[std::size_t(r)]);
        }
    }
    if (first_abort) std::rethrow_exception(first_abort);

    CounterReport merged;
    for (int r = 0; r < P; ++r) merged += group.tallies[std::size_t(r)];
    return merged;
}

std::uint64_t transpose_padded_volume(const Split& col_split, const Split& row_split) {
    const std::uint64_t P = std::uint64_t(col_split.P);
    return P * (P - 1) * std::uint64_t(col_split.width) * std::uint64_t(row_split.width);
}

DenseBlock parallel_transpose(Communicator& comm, const DenseBlock& local, const Split& col_split,
                              const Split& row_split, Phase phase) {
    const int P = comm.size();
    if (col_split.P != P || row_split.P != P)
        throw StructuralError("parallel_transpose: split rank count mismatch");
    if (local.cols != col_split.width)
        throw StructuralError("parallel_transpose: local column width mismatch");
    const long Wc = col_split.width, Wr = row_split.width;
    const int me = comm.rank();

    std::vector<std::vector<double>> to(static_cast<std::size_t>(P));
    for (int m = 0; m < P; ++m) {
        std::vector<double> buf(std::size_t(Wr) * std::size_t(Wc), 0.0);
        const long r0 = Wr * m;
        for (long c = 0; c < Wc; ++c) {
            const double* src = local.col(c);
            double* dst = buf.data() + std::size_t(c) * std::size_t(Wr);
            const long rmax = std::min(Wr, local.rows - r0);
            for (long i = 0; i < rmax; ++i) dst[i] = src[r0 + i];
        }
        to[std::size_t(m)] = std::move(buf);
    }
    std::uint64_t real = 0;
    for (int m = 0; m < P; ++m)
        if (m != me)
            real += std::uint64_t(col_split.count[std::size_t(me)]) *
                    std::uint64_t(row_split.count[std::size_t(m)]);

    const std::uint64_t geom = (std::uint64_t(col_split.total) * 0x9E3779B97F4A7C15ull) ^
                               (std::uint64_t(row_split.total) * 0xBF58476D1CE4E5B9ull);
    auto recv = comm.all_to_all(std::move(to), phase, real, geom);

    DenseBlock out(col_split.slots(), Wr);
    for (int p = 0; p < P; ++p) {
        const auto& chunk = recv[std::size_t(p)]; // Wr x Wc, column-major
        for (long j = 0; j < Wc; ++j) {
            const double* src = chunk.data() + std::size_t(j) * std::size_t(Wr);
            for (long i = 0; i < Wr; ++i) out.at(Wc * p + j, i) = src[i];
        }
    }
    return out;
}

} // namespace blockwave
