#pragma once

#include <string>

#include "blockwave/config.hpp"
#include "blockwave/transport.hpp"

namespace blockwave {

// Subcommand entry points. Exit codes: 0 success, 1 compute failure,
// 2 configuration error (mapped by the caller from ConfigError).
int cmd_solve(const ExperimentConfig& cfg, Schedule schedule);
int cmd_oracle(const ExperimentConfig& cfg, Schedule schedule);
int cmd_sweep(const ExperimentConfig& cfg, Schedule schedule);
int cmd_analyze(const ExperimentConfig& cfg);

// BLOCKWAVE_OUTPUT_DIR environment override applied to a parsed config.
void apply_env_overrides(ExperimentConfig& cfg);

std::uint64_t model_state_hash(const ExperimentConfig& cfg);

} // namespace blockwave
