#pragma once

#include "tnp/experiments.hpp"

#include <optional>
#include <string>
#include <vector>

namespace tnp::io {

struct SimulationPlan {
    std::vector<ExperimentConfig> configs;  // base seeds already assigned
    std::uint64_t seed = 0;
};

/// Parses a JSON run configuration: either {"experiment": <name>, ...} or an
/// explicit config with keys shape, ranks, snr, alpha, delta, n_train, eta,
/// n_test, reps, seed, methods, distribution and nn:{tcl_ranks, hidden,
/// epochs, batch, rate}. Unknown keys are rejected; all values are validated
/// against the experiment preconditions. Throws std::invalid_argument with
/// the offending key in the message.
SimulationPlan parse_simulation_config(const std::string& json_text,
                                       const std::optional<std::string>& scale_override,
                                       const std::optional<std::uint64_t>& seed_override);

SimulationPlan load_simulation_config(const std::string& path,
                                      const std::optional<std::string>& scale_override,
                                      const std::optional<std::uint64_t>& seed_override);

/// Builds the plan for a named example family at the given scale.
SimulationPlan plan_for_example(const std::string& name, const std::string& scale,
                                std::uint64_t seed);

}  // namespace tnp::io
