#pragma once

#include <string>

#include "blockwave/config.hpp"
#include "blockwave/entanglement.hpp"
#include "blockwave/transport.hpp"

namespace blockwave {

void ensure_dir(const std::string& dir);
void write_text_file(const std::string& path, const std::string& content);

std::string counters_to_json(const CounterReport& rep, const std::string& config_hash);

// entanglement_spectrum.csv: q_index,q_label,i,xi
std::string spectrum_csv(const EntanglementReport& rep, const std::string& config_hash);
// sector_weights.csv: q_index,q_label,w_q,chi_q
std::string weights_csv(const EntanglementReport& rep, const std::string& config_hash);
// fits.json: fragmentation fits, N_eff, q*, process IPR curves
std::string fragmentation_json(const EntanglementReport& rep, const GatheredState& state,
                               const ExperimentConfig& cfg, int degenerate /* -1 unknown */);

} // namespace blockwave
