#include "blockwave/block_state.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "blockwave/errors.hpp"

static_assert(std::endian::native == std::endian::little, "state container assumes little-endian");

namespace blockwave {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline double uniform_pm_half(std::uint64_t v) {
    return double(v >> 11) * 0x1.0p-53 - 0.5;
}

void check_compatible(const BlockWavefunction& x, const BlockWavefunction& y) {
    if (x.table != y.table || x.layout != y.layout)
        throw StructuralError("block state operation on mismatched table/layout");
}

} // namespace

BlockWavefunction make_zero_state(const SectorPairTable& table, const DistributionLayout& layout,
                                  int rank) {
    BlockWavefunction psi;
    psi.table = &table;
    psi.layout = &layout;
    psi.rank = rank;
    psi.blocks.reserve(table.pairs.size());
    for (std::size_t i = 0; i < table.pairs.size(); ++i)
        psi.blocks.emplace_back(table.pairs[i].d_right, layout.col[i].width);
    return psi;
}

BlockWavefunction random_state(const SectorPairTable& table, const DistributionLayout& layout,
                               int rank, std::uint64_t seed) {
    BlockWavefunction psi = make_zero_state(table, layout, rank);
    for (std::size_t i = 0; i < table.pairs.size(); ++i) {
        const Split& cs = layout.col[i];
        const long d_r = table.pairs[i].d_right;
        for (long j = 0; j < cs.count[std::size_t(rank)]; ++j) {
            const long gcol = cs.begin[std::size_t(rank)] + j;
            std::uint64_t st = (seed + 0x9E3779B97F4A7C15ull * (std::uint64_t(i) + 1)) ^
                               (0xBF58476D1CE4E5B9ull * (std::uint64_t(gcol) + 1));
            double* col = psi.blocks[i].col(j);
            for (long r = 0; r < d_r; ++r) col[r] = uniform_pm_half(splitmix64(st));
        }
    }
    return psi;
}

void scale(double a, BlockWavefunction& x) {
    for (auto& b : x.blocks)
        for (auto& v : b.a) v *= a;
}

void axpy(double a, const BlockWavefunction& x, BlockWavefunction& y) {
    check_compatible(x, y);
    for (std::size_t i = 0; i < x.blocks.size(); ++i) {
        const auto& xb = x.blocks[i].a;
        auto& yb = y.blocks[i].a;
        for (std::size_t k = 0; k < xb.size(); ++k) yb[k] += a * xb[k];
    }
}

double dot(Communicator& comm, const BlockWavefunction& x, const BlockWavefunction& y) {
    check_compatible(x, y);
    const DistributionLayout& lay = *x.layout;
    const int P = comm.size(), me = comm.rank();
    std::vector<double> partials;
    for (std::size_t i = 0; i < x.blocks.size(); ++i) {
        const long d_r = x.table->pairs[i].d_right;
        for (long j = 0; j < lay.col[i].count[std::size_t(me)]; ++j) {
            const double* xc = x.blocks[i].col(j);
            const double* yc = y.blocks[i].col(j);
            double s = 0.0;
            for (long r = 0; r < d_r; ++r) s += xc[r] * yc[r];
            partials.push_back(s);
        }
    }
    std::vector<double> all = comm.all_gather_v(partials, Phase::reduction);

    // base offset of each rank's contribution, then per-pair offsets inside
    std::vector<std::size_t> base(std::size_t(P), 0);
    {
        std::size_t at = 0;
        for (int p = 0; p < P; ++p) {
            base[std::size_t(p)] = at;
            for (std::size_t i = 0; i < lay.col.size(); ++i)
                at += std::size_t(lay.col[i].count[std::size_t(p)]);
        }
    }
    double s = 0.0;
    std::vector<std::size_t> cursor = base;
    for (std::size_t i = 0; i < lay.col.size(); ++i)
        for (int p = 0; p < P; ++p) {
            const long cnt = lay.col[i].count[std::size_t(p)];
            for (long k = 0; k < cnt; ++k) s += all[cursor[std::size_t(p)] + std::size_t(k)];
            cursor[std::size_t(p)] += std::size_t(cnt);
        }
    return s;
}

double norm(Communicator& comm, const BlockWavefunction& x) {
    return std::sqrt(dot(comm, x, x));
}

void normalize(Communicator& comm, BlockWavefunction& x) {
    double n = norm(comm, x);
    if (n == 0.0) throw StructuralError("cannot normalize the zero state");
    scale(1.0 / n, x);
}

double GatheredState::norm_sq() const {
    double s = 0.0;
    for (const auto& b : blocks)
        for (double v : b.a) s += v * v;
    return s;
}

GatheredState gather_state(Communicator& comm, const BlockWavefunction& psi, int root) {
    GatheredState g;
    g.table = *psi.table;
    const DistributionLayout& lay = *psi.layout;
    const int me = comm.rank();
    for (std::size_t i = 0; i < psi.blocks.size(); ++i) {
        const long d_r = psi.table->pairs[i].d_right;
        const long cnt = lay.col[i].count[std::size_t(me)];
        std::span<const double> local(psi.blocks[i].a.data(), std::size_t(d_r) * std::size_t(cnt));
        std::vector<double> full = comm.gather_v(local, root, Phase::gather);
        if (comm.rank() == root) {
            DenseBlock blk(d_r, psi.table->pairs[i].d_left);
            if (!full.empty()) std::memcpy(blk.a.data(), full.data(), full.size() * sizeof(double));
            g.blocks.push_back(std::move(blk));
        } else {
            g.blocks.emplace_back();
        }
    }
    return g;
}

std::vector<double> gather_full(Communicator& comm, const BlockWavefunction& psi, long oracle_cap,
                                int root) {
    if (psi.table->dim() > oracle_cap)
        throw OracleCapError("gather_full: sector dimension " + std::to_string(psi.table->dim()) +
                                 " exceeds the oracle cap " + std::to_string(oracle_cap),
                             psi.table->dim());
    GatheredState g = gather_state(comm, psi, root);
    if (comm.rank() != root) return {};
    return flatten(g);
}

std::vector<double> flatten(const GatheredState& g) {
    std::vector<double> out;
    out.reserve(std::size_t(g.table.dim()));
    for (const auto& b : g.blocks) out.insert(out.end(), b.a.begin(), b.a.end());
    return out;
}

BlockWavefunction scatter_full(Communicator& comm, const SectorPairTable& table,
                               const DistributionLayout& layout, const std::vector<double>& data,
                               int root) {
    BlockWavefunction psi = make_zero_state(table, layout, comm.rank());
    const int P = comm.size(), me = comm.rank();
    long off = 0;
    for (std::size_t i = 0; i < table.pairs.size(); ++i) {
        const long d_r = table.pairs[i].d_right;
        std::vector<std::vector<double>> parts;
        if (comm.rank() == root) {
            parts.resize(std::size_t(P));
            for (int p = 0; p < P; ++p) {
                const Split& cs = layout.col[i];
                const long cnt = cs.count[std::size_t(p)];
                parts[std::size_t(p)].assign(
                    data.begin() + off + cs.begin[std::size_t(p)] * d_r,
                    data.begin() + off + (cs.begin[std::size_t(p)] + cnt) * d_r);
            }
        }
        std::vector<double> mine = comm.scatter_v(parts, root, Phase::io);
        if (!mine.empty()) std::memcpy(psi.blocks[i].a.data(), mine.data(), mine.size() * sizeof(double));
        off += d_r * table.pairs[i].d_left;
        (void)me;
    }
    return psi;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint32_t kMagic = 0x4E465742u; // "BWFN"
constexpr std::uint32_t kVersion = 1;

struct Writer {
    std::FILE* f;
    void u32(std::uint32_t v) { std::fwrite(&v, 4, 1, f); }
    void u64(std::uint64_t v) { std::fwrite(&v, 8, 1, f); }
    void i32(std::int32_t v) { std::fwrite(&v, 4, 1, f); }
    void f64v(const std::vector<double>& v) { std::fwrite(v.data(), 8, v.size(), f); }
};

struct Reader {
    std::FILE* f;
    std::uint32_t u32() { std::uint32_t v; if (std::fread(&v, 4, 1, f) != 1) fail(); return v; }
    std::uint64_t u64() { std::uint64_t v; if (std::fread(&v, 8, 1, f) != 1) fail(); return v; }
    std::int32_t i32() { std::int32_t v; if (std::fread(&v, 4, 1, f) != 1) fail(); return v; }
    void f64v(std::vector<double>& v) { if (std::fread(v.data(), 8, v.size(), f) != v.size()) fail(); }
    [[noreturn]] void fail() { throw std::runtime_error("state file: truncated or corrupt"); }
};

} // namespace

void write_state_file(const std::string& path, std::uint64_t model_hash,
                      const SectorPairTable& table, const DistributionLayout& layout,
                      const GatheredState& state) {
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open state file for writing: " + path);
    Writer w{f};
    w.u32(kMagic);
    w.u32(kVersion);
    w.u64(model_hash);
    w.u32(8); // scalar width: float64
    w.u32(std::uint32_t(table.target_q.size()));
    for (int c : table.target_q.comps) w.i32(c);
    w.u64(std::uint64_t(table.pairs.size()));
    for (const auto& p : table.pairs) {
        for (int c : p.q_left.comps) w.i32(c);
        for (int c : p.q_right.comps) w.i32(c);
        w.u64(std::uint64_t(p.d_left));
        w.u64(std::uint64_t(p.d_right));
    }
    w.u32(std::uint32_t(layout.P));
    for (std::size_t i = 0; i < table.pairs.size(); ++i) {
        w.u64(std::uint64_t(layout.col[i].width));
        for (int p = 0; p < layout.P; ++p) w.u64(std::uint64_t(layout.col[i].count[std::size_t(p)]));
    }
    for (const auto& b : state.blocks) w.f64v(b.a);
    std::fclose(f);
}

StateFile read_state_file(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("cannot open state file: " + path);
    Reader r{f};
    StateFile out;
    if (r.u32() != kMagic) { std::fclose(f); throw std::runtime_error("state file: bad magic: " + path); }
    if (r.u32() != kVersion) { std::fclose(f); throw std::runtime_error("state file: unsupported version"); }
    out.model_hash = r.u64();
    if (r.u32() != 8) { std::fclose(f); throw std::runtime_error("state file: unsupported scalar type"); }
    const std::uint32_t ncomp = r.u32();
    out.state.table.target_q.comps.resize(ncomp);
    for (auto& c : out.state.table.target_q.comps) c = r.i32();
    const std::uint64_t npairs = r.u64();
    for (std::uint64_t i = 0; i < npairs; ++i) {
        SectorPair p;
        p.q_left.comps.resize(ncomp);
        p.q_right.comps.resize(ncomp);
        for (auto& c : p.q_left.comps) c = r.i32();
        for (auto& c : p.q_right.comps) c = r.i32();
        p.d_left = long(r.u64());
        p.d_right = long(r.u64());
        out.state.table.pairs.push_back(std::move(p));
    }
    out.ranks = int(r.u32());
    for (std::uint64_t i = 0; i < npairs; ++i) {
        r.u64(); // width
        for (int p = 0; p < out.ranks; ++p) r.u64();
    }
    for (const auto& p : out.state.table.pairs) {
        DenseBlock b(p.d_right, p.d_left);
        r.f64v(b.a);
        out.state.blocks.push_back(std::move(b));
    }
    std::fclose(f);
    return out;
}

} // namespace blockwave
