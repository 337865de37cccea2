#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blockwave/layout.hpp"
#include "blockwave/symmetry.hpp"
#include "blockwave/transport.hpp"

namespace blockwave {

// Distributed wavefunction: per sector pair, this rank's share of the
// d_R x d_L block, stored as the first count[rank] real columns of a
// (d_R x width) column-major slab; padded columns stay zero.
struct BlockWavefunction {
    const SectorPairTable* table = nullptr;
    const DistributionLayout* layout = nullptr;
    int rank = 0;
    std::vector<DenseBlock> blocks;
};

BlockWavefunction make_zero_state(const SectorPairTable& table, const DistributionLayout& layout,
                                  int rank);
// Same logical state for every rank count: entries are drawn from a
// per-column counter RNG keyed by (seed, pair, global column).
BlockWavefunction random_state(const SectorPairTable& table, const DistributionLayout& layout,
                               int rank, std::uint64_t seed);

void scale(double a, BlockWavefunction& x);
// y += a * x
void axpy(double a, const BlockWavefunction& x, BlockWavefunction& y);

// Global inner product. Per-column partials are combined in canonical
// (pair, column) order on every rank, so the value is bitwise identical
// for any rank count and scheduling mode.
double dot(Communicator& comm, const BlockWavefunction& x, const BlockWavefunction& y);
double norm(Communicator& comm, const BlockWavefunction& x);
void normalize(Communicator& comm, BlockWavefunction& x);

// Full blocks of one state, gathered on the root rank.
struct GatheredState {
    SectorPairTable table;
    std::vector<DenseBlock> blocks; // d_R x d_L each
    double norm_sq() const;
};

GatheredState gather_state(Communicator& comm, const BlockWavefunction& psi, int root = 0);

// Dense coefficient vector over the global sector basis: pair-major,
// column-major inside each block (the Vec convention). Root only.
std::vector<double> gather_full(Communicator& comm, const BlockWavefunction& psi,
                                long oracle_cap = 1000000, int root = 0);
// Inverse of gather_full; `data` read on root only.
BlockWavefunction scatter_full(Communicator& comm, const SectorPairTable& table,
                               const DistributionLayout& layout, const std::vector<double>& data,
                               int root = 0);

std::vector<double> flatten(const GatheredState& g);

// ---------------------------------------------------------------------------
// State container (binary, little-endian; layout documented in the README)

void write_state_file(const std::string& path, std::uint64_t model_hash,
                      const SectorPairTable& table, const DistributionLayout& layout,
                      const GatheredState& state);

struct StateFile {
    std::uint64_t model_hash = 0;
    int ranks = 1;
    GatheredState state;
};

StateFile read_state_file(const std::string& path);

} // namespace blockwave
