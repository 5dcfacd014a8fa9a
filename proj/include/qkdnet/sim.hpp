#pragma once

#include "qkdnet/flow.hpp"
#include "qkdnet/keyaccount.hpp"
#include "qkdnet/postprocess.hpp"
#include "qkdnet/routing.hpp"
#include "qkdnet/topology.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace qkdnet {

struct SimConfig {
    int size = 7;  // inner lattice S
    PlacementPreset preset = PlacementPreset::one_tn_ideal();
    double link_length_km = 1.0;
    double alpha_db_per_km = 0.15;
    std::optional<double> link_success_prob;  // overrides alpha / length
    std::vector<LinkLengthOverride> link_overrides;
    double decoherence = 0.0;
    double bsm_success_prob = 0.85;
    std::uint64_t rounds = 1'000'000;
    RoutingPolicy policy = RoutingPolicy::Static;
    BalancerParams balancer;
    DistillationOptions distill;
    std::uint64_t seed = 1;
    std::uint64_t priority_cadence = 1;
    bool sample_bits = false;  // draw per-bit errors for validation

    /// Throws ConfigError naming the first invalid field.
    void validate() const;
};

struct PairOutcome {
    TerminalPair pair;
    RawKeyPool pool;
    double secret_bits = 0.0;
    double flow = 0.0;  // net flow from pair.first to pair.second
    double waste = 0.0;
};

/// Per-round observer for invariant checks; sees each round's established
/// links (before routing) and the paths the router selected.
using RoundObserver =
    std::function<void(std::uint64_t round, const RoundLinkState& established, const std::vector<CandidatePath>& paths)>;

/// Called every `progress_every` rounds with the number completed.
using ProgressFn = std::function<void(std::uint64_t done, std::uint64_t total)>;

struct RunHooks {
    RoundObserver on_round;
    ProgressFn on_progress;
    std::uint64_t progress_every = 1000;
};

struct SimResult {
    SimConfig config;
    double key_rate = 0.0;
    double flow_value = 0.0;
    double waste_total = 0.0;
    std::uint64_t total_sifted = 0;
    std::vector<PairOutcome> pairs;
    double runtime_s = 0.0;
};

/// Rounds of Stages 1-3, then distillation and max-flow extraction.
/// Deterministic in (config, seed).
[[nodiscard]] SimResult run(const SimConfig& cfg, const RunHooks& hooks = {});

/// Re-runs the final stage on an existing result's raw pools with different
/// post-processing. The raw pools do not depend on distillation options.
[[nodiscard]] SimResult redistill(const SimResult& result, const DistillationOptions& opts);

/// Cartesian product D x policy x seed, ordered in that nesting. Runs in
/// parallel on up to `jobs` threads (0 = hardware concurrency).
[[nodiscard]] std::vector<SimResult> sweep(const SimConfig& base, const std::vector<double>& decoherence_values,
                                           const std::vector<RoutingPolicy>& policies,
                                           const std::vector<std::uint64_t>& seeds, unsigned jobs = 0);

/// Default decoherence grid for sweeps.
[[nodiscard]] std::vector<double> default_decoherence_grid();

}  // namespace qkdnet
