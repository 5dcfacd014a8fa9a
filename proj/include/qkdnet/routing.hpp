#pragma once

#include "qkdnet/entanglement.hpp"
#include "qkdnet/flow.hpp"
#include "qkdnet/rng.hpp"
#include "qkdnet/topology.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace qkdnet {

/// Unordered terminal pair, stored with first < second.
struct TerminalPair {
    int first = 0;
    int second = 0;

    static constexpr TerminalPair of(int a, int b) noexcept { return a < b ? TerminalPair{a, b} : TerminalPair{b, a}; }
    friend constexpr auto operator<=>(const TerminalPair&, const TerminalPair&) = default;
};

/// Every unordered pair over `terminal_count` terminals, lexicographic.
[[nodiscard]] std::vector<TerminalPair> all_terminal_pairs(int terminal_count);

/// Terminal-to-terminal path through repeaters only.
struct CandidatePath {
    TerminalPair endpoints;   // terminal indices
    std::vector<int> nodes;   // node indices, from one terminal to the other
    std::vector<int> links;   // consumed link ids; links.size() == nodes.size() - 1

    [[nodiscard]] int hops() const noexcept { return static_cast<int>(links.size()); }
    [[nodiscard]] int repeaters() const noexcept { return hops() - 1; }
};

struct BalancerParams {
    double sigma = 0.15;  // surplus tolerance
    double delta = 0.05;  // near-minimum tolerance
    double theta = 0.75;  // distance filter, fraction of dist(A,B)

    /// Throws ConfigError unless sigma, delta >= 0 and 0 < theta < 1.
    void validate() const;
};

/// Terminal pairs routed first in the current round.
struct PriorityList {
    std::vector<TerminalPair> pairs;

    [[nodiscard]] bool empty() const noexcept { return pairs.empty(); }
    [[nodiscard]] bool contains(TerminalPair p) const;
};

enum class RoutingPolicy { Static, Dynamic };

[[nodiscard]] std::string_view to_string(RoutingPolicy p);
/// Throws ConfigError for anything but "static" / "dynamic".
[[nodiscard]] RoutingPolicy parse_policy(std::string_view name);

/// Minimum-hop path between two terminals over established links, with
/// uniform random choice among all minimum-hop paths.
[[nodiscard]] std::optional<CandidatePath> shortest_path(const RoundLinkState& state, const Topology& t,
                                                         TerminalPair pair, Rng& rng);

/// Global greedy: repeatedly take a shortest path over all terminal pairs
/// (uniform over tied pairs, then over that pair's shortest paths), consume
/// its links, until nothing connects.
/// `state` is left with the consumed links removed.
[[nodiscard]] std::vector<CandidatePath> static_route(RoundLinkState& state, const Topology& t, Rng& rng);

/// Greedy over the priority pairs first, then over every pair.
[[nodiscard]] std::vector<CandidatePath> dynamic_route(RoundLinkState& state, const Topology& t,
                                                       const PriorityList& prio, Rng& rng);

/// Surplus balancing: locate the fullest edge, walk the shortest A-B corridor
/// through it in the terminal graph, and return its under-full near-minimum
/// pairs that are not too far apart.
[[nodiscard]] PriorityList compute_priorities(const FlowGraph& caps, const Topology& t, const BalancerParams& p,
                                              Rng& rng);

/// Each path independently survives every one of its k Bell measurements
/// with probability R; returns the survivors.
[[nodiscard]] std::vector<CandidatePath> attempt_swapping(std::vector<CandidatePath> paths, double bsm_success,
                                                          Rng& rng);

/// Reusable BFS workspace for the per-round greedy loop.
class PathSelector {
public:
    explicit PathSelector(const Topology& t);

    /// Greedy selection restricted to `eligible` pairs (all pairs if null),
    /// appending to `out` and consuming links from `state`.
    void select(RoundLinkState& state, const std::vector<TerminalPair>* eligible, Rng& rng,
                std::vector<CandidatePath>& out);

    /// Single-pair variant used by shortest_path.
    std::optional<CandidatePath> shortest(const RoundLinkState& state, TerminalPair pair, Rng& rng);

private:
    void bfs(const RoundLinkState& state, int source_terminal, int max_depth);
    CandidatePath trace(const RoundLinkState& state, int source_terminal, int target_terminal, Rng& rng);

    struct Step {
        int node;
        int link;
        double weight;
    };
    struct Candidate {
        int source;
        int target;
    };
    struct Arc {
        int node;
        int link;
    };
    static constexpr int kMaxDegree = 4;

    const Topology* topo_;
    std::vector<Arc> adjacency_;  // kMaxDegree slots per node, node = -1 when unused
    std::vector<std::uint8_t> relays_;
    std::vector<int> queue_;
    // Per source terminal: hop distance to each terminal, and the BFS
    // distance / shortest-path count of every node.
    std::vector<std::vector<int>> term_dist_;
    std::vector<std::vector<int>> bfs_dist_;
    std::vector<std::vector<double>> bfs_count_;
    std::vector<Step> steps_;
    std::vector<Candidate> tied_;
    std::vector<char> allowed_;
    std::vector<char> source_used_;
};

}  // namespace qkdnet
