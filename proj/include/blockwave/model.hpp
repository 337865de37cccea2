#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "blockwave/quantum_number.hpp"

namespace blockwave {

enum class ModelKind { heisenberg, hubbard, attractive_hubbard, quantum_impurity };

std::string model_kind_name(ModelKind k);
std::optional<ModelKind> parse_model_kind(const std::string& s);

// Open-chain model family of the engine. The attractive Hubbard model is the
// Hubbard model with U < 0; it shares the same term builder.
struct ModelSpec {
    ModelKind kind = ModelKind::heisenberg;
    int sites = 2;
    double J = 1.0;               // Heisenberg exchange
    double t = 1.0;               // hopping
    double U = 0.0;               // local interaction
    double V = 0.0;               // nearest-neighbour density-density
    std::vector<double> bath_eps; // impurity: bath level energies (size sites-1)
    std::vector<double> bath_v;   // impurity: hybridizations (size sites-1)

    bool fermionic() const { return kind != ModelKind::heisenberg; }
    int qn_components() const { return fermionic() ? 2 : 1; }
    int modes_per_site() const { return fermionic() ? 2 : 1; }

    void validate() const;           // throws ConfigError
    std::string describe() const;    // canonical one-line description (hash input)
};

// ---------------------------------------------------------------------------
// Local operators and Hamiltonian terms

// Local operator tags. `z` is the fermion parity (1 - 2n) on one mode.
enum class OpTag : std::uint8_t { sp, sm, sz, n, cdag, c, z };

const char* op_tag_name(OpTag t);
bool is_fermionic(OpTag t);
// Quantum-number shift carried by the operator, in model components.
QuantumNumber op_delta_q(OpTag t, int spin, const ModelSpec& model);

// Mode address at the model level. spin: -1 spin chains, 0 = up, 1 = down.
struct ModeId {
    int site = 0;
    int spin = -1;
    bool operator==(const ModeId& o) const { return site == o.site && spin == o.spin; }
    bool operator<(const ModeId& o) const { return site != o.site ? site < o.site : spin < o.spin; }
    std::string str() const;
};

struct TermFactor {
    ModeId mode;
    OpTag op;
};

// One product term h = coeff * f_1 f_2 ... f_k (f_k applied first).
struct HamiltonianTerm {
    double coeff = 0.0;
    std::vector<TermFactor> factors;
    QuantumNumber delta_q(const ModelSpec& model) const;
    std::string str() const;
};

// Expands the model into its Hermitian-closed term list.
std::vector<HamiltonianTerm> build_terms(const ModelSpec& spec);

// ---------------------------------------------------------------------------
// Entanglement cut and partition mode maps

enum class CutKind { spatial, spin_space };
enum class Side { left, right };

struct EntanglementCut {
    CutKind kind = CutKind::spatial;
    std::vector<int> left_sites, right_sites;

    // L = sites [0, pos), R = [pos, S)
    static EntanglementCut spatial(int sites, int pos);
    // L = all up modes, R = all down modes (fermionic models only)
    static EntanglementCut spin_space(int sites);
    std::string describe() const;
};

// Partition-internal mode orderings induced by a cut. Fermionic spatial
// partitions put spin-up modes in the low bit positions, then spin-down;
// spin-space partitions carry one spin species each, in site order.
struct PartitionModes {
    std::vector<ModeId> left, right;

    int bits(Side s) const { return int((s == Side::left ? left : right).size()); }
    // (side, bit index) of a model mode; throws StructuralError if unknown
    std::pair<Side, int> locate(const ModeId& m) const;
    const std::vector<ModeId>& modes(Side s) const { return s == Side::left ? left : right; }
};

PartitionModes partition_modes(const ModelSpec& model, const EntanglementCut& cut);

// Quantum number carried by an occupation pattern of the given mode list.
QuantumNumber pattern_quantum_number(const ModelSpec& model, std::span<const ModeId> modes,
                                     std::uint64_t bits);

// ---------------------------------------------------------------------------
// Factor chains on occupation patterns

// A factor bound to a bit position inside one partition (or the full lattice).
struct LocalFactor {
    int bit = 0;
    OpTag op = OpTag::n;
};

// Applies the ordered chain (last element first) to `state`. Fermionic
// ladder operators pick up the Jordan-Wigner sign from the occupied modes
// below their bit. Returns the amplitude; 0 means the state is annihilated.
double apply_factor_chain(std::uint64_t& state, std::span<const LocalFactor> chain);

// ---------------------------------------------------------------------------
// Term splitting across the cut

struct LocalTerm {
    double coeff = 0.0;
    std::vector<LocalFactor> factors;
    std::string label;
};

// Cut-crossing term factorized as coeff * (left chain) x (right chain).
// Jordan-Wigner strings are explicit in the chains (z factors), so the
// tensor product of the two chains reproduces the fermionic term exactly.
struct BoundaryTermPair {
    double coeff = 0.0;
    std::vector<LocalFactor> left, right;
    QuantumNumber dq_left, dq_right;
    std::string label;
};

struct SplitTerms {
    std::vector<LocalTerm> left, right;
    std::vector<BoundaryTermPair> boundary;
};

SplitTerms split_terms(const std::vector<HamiltonianTerm>& terms, const ModelSpec& model,
                       const PartitionModes& pm);

} // namespace blockwave
