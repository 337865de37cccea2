#pragma once

#include <string>
#include <vector>

#include "blockwave/block_state.hpp"

namespace blockwave {

// Symmetry-resolved entanglement data of one bipartite state. The spectrum
// of the entanglement Hamiltonian is xi = -2 ln(sigma); e^{-xi} = sigma^2
// are the eigenvalues of the left reduced density matrix.
struct SectorSpectrum {
    int pair = 0;
    QuantumNumber q_left, q_right;
    std::vector<double> sigma; // descending
    long chi = 0;              // count of sigma^2 above the cutoff
    double weight = 0.0;       // W_q
};

struct EntanglementReport {
    std::vector<SectorSpectrum> sectors;
    double schmidt_cutoff = 1e-14; // on sigma^2
    double norm_sq = 0.0;
    double entropy = 0.0; // von Neumann, natural log
    std::vector<double> chi_series() const; // per sector, canonical order
};

// Requires a normalized state (|norm - 1| <= 1e-8), by the spec of the
// entanglement spectrum.
EntanglementReport schmidt_decompose(const GatheredState& state, double schmidt_cutoff = 1e-14);

// Process-resolved inverse participation ratio of the entanglement weights.
// `sector` mode assigns whole sectors to processes (contiguous canonical
// groups balanced by chi); `column` mode splits each W_q by the owned
// column weight of the balanced layout.
enum class IprAssignment { sector, column };
const char* ipr_assignment_name(IprAssignment a);

struct IprResult {
    int ranks = 1;
    IprAssignment mode = IprAssignment::sector;
    std::vector<double> w_p; // per process
    double sum() const;
    double max() const;
};

IprResult process_ipr(const EntanglementReport& rep, const GatheredState& state, int ranks,
                      IprAssignment mode);

} // namespace blockwave
