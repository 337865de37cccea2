#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blockwave/model.hpp"
#include "blockwave/quantum_number.hpp"

namespace blockwave {

enum class SweepAxis { ranks, chi, U };

// One experiment, parsed from the flat key-value config (see the README for
// the schema). The scheduling mode is a command-line option, not part of
// the experiment: results never depend on it.
struct ExperimentConfig {
    ModelSpec model;
    CutKind cut_kind = CutKind::spatial;
    int cut_position = -1; // default: sites/2

    std::optional<int> two_sz;
    std::optional<int> n_up, n_dn;

    std::vector<int> ranks{1};
    std::uint64_t seed = 1;
    std::string output_dir = "runs/out";
    long oracle_cap = 1000000;

    int max_iterations = 500;
    double tolerance = 1e-12;

    bool analysis = true;
    double schmidt_cutoff = 1e-14;
    std::vector<int> ipr_ranks{1, 2, 4, 8};
    std::optional<std::pair<double, double>> ccdf_window; // nullopt = auto
    double m_parameter = 1.0;
    std::optional<double> pi_parameter;

    double tau = 1.0, phi = 1.0;

    SweepAxis sweep_axis = SweepAxis::ranks;
    std::vector<double> sweep_values;

    bool corrupt_boundary = false; // testing hook: flips one boundary block sign

    QuantumNumber target() const;
    EntanglementCut cut() const;
    // canonical text of the resolved experiment; its FNV-1a hash is embedded
    // in every output file
    std::string resolved_text() const;
    std::uint64_t hash() const;
};

ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");

std::uint64_t fnv1a(const std::string& s);
std::string hash_hex(std::uint64_t h);

} // namespace blockwave
