#include "qkdnet/routing.hpp"

#include "qkdnet/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace qkdnet {

namespace {

constexpr int kUnreached = std::numeric_limits<int>::max();

// Tie-breaking perturbation subtracted from terminal-graph distances; far
// below one hop so it only separates exact ties.
constexpr double kTieBreakScale = 1e-3;

}  // namespace

std::vector<TerminalPair> all_terminal_pairs(int terminal_count) {
    std::vector<TerminalPair> out;
    for (int i = 0; i < terminal_count; ++i)
        for (int j = i + 1; j < terminal_count; ++j) out.push_back({i, j});
    return out;
}

void BalancerParams::validate() const {
    if (!(sigma >= 0.0)) throw ConfigError("sigma", "must be >= 0");
    if (!(delta >= 0.0)) throw ConfigError("delta", "must be >= 0");
    if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("theta", "must lie in (0, 1)");
}

bool PriorityList::contains(TerminalPair p) const {
    return std::ranges::find(pairs, p) != pairs.end();
}

std::string_view to_string(RoutingPolicy p) {
    return p == RoutingPolicy::Static ? "static" : "dynamic";
}

RoutingPolicy parse_policy(std::string_view name) {
    if (name == "static") return RoutingPolicy::Static;
    if (name == "dynamic") return RoutingPolicy::Dynamic;
    throw ConfigError("policy", "unknown policy '" + std::string(name) + "' (expected static or dynamic)");
}

PathSelector::PathSelector(const Topology& t)
    : topo_(&t),
      term_dist_(static_cast<std::size_t>(t.terminal_count()), std::vector<int>(t.terminal_count())),
      bfs_dist_(static_cast<std::size_t>(t.terminal_count())),
      bfs_count_(static_cast<std::size_t>(t.terminal_count())) {
    queue_.reserve(static_cast<std::size_t>(t.node_count()));
    adjacency_.assign(static_cast<std::size_t>(t.node_count()) * kMaxDegree, Arc{-1, -1});
    relays_.resize(static_cast<std::size_t>(t.node_count()));
    for (int v = 0; v < t.node_count(); ++v) {
        relays_[v] = t.is_repeater(v) ? 1 : 0;
        int slot = 0;
        for (const auto& inc : t.incident(v)) adjacency_[static_cast<std::size_t>(v) * kMaxDegree + slot++] = {inc.neighbor, inc.link};
    }
}

void PathSelector::bfs(const RoundLinkState& state, int source_terminal, int max_depth) {
    const Topology& t = *topo_;
    auto& dist = bfs_dist_[source_terminal];
    auto& count = bfs_count_[source_terminal];
    dist.assign(static_cast<std::size_t>(t.node_count()), kUnreached);
    count.assign(static_cast<std::size_t>(t.node_count()), 0.0);

    const int src = t.terminals()[source_terminal];
    dist[src] = 0;
    count[src] = 1.0;
    queue_.clear();
    queue_.push_back(src);
    for (std::size_t head = 0; head < queue_.size(); ++head) {
        const int u = queue_[head];
        // Terminals end a path; only the source and repeaters relay. Levels
        // beyond max_depth are never needed, and counts up to it are final.
        if (u != src && !relays_[u]) continue;
        if (dist[u] >= max_depth) break;
        const Arc* arcs = &adjacency_[static_cast<std::size_t>(u) * kMaxDegree];
        for (int a = 0; a < kMaxDegree && arcs[a].node >= 0; ++a) {
            if (!state.established(arcs[a].link)) continue;
            const int v = arcs[a].node;
            if (dist[v] == kUnreached) {
                dist[v] = dist[u] + 1;
                count[v] = count[u];
                queue_.push_back(v);
            } else if (dist[v] == dist[u] + 1) {
                count[v] += count[u];
            }
        }
    }

    for (int j = 0; j < t.terminal_count(); ++j) {
        const int node = t.terminals()[j];
        term_dist_[source_terminal][j] = j == source_terminal ? kUnreached : dist[node];
    }
}

CandidatePath PathSelector::trace(const RoundLinkState& state, int source_terminal, int target_terminal,
                                  Rng& rng) {
    const Topology& t = *topo_;
    const auto& dist = bfs_dist_[source_terminal];
    const auto& count = bfs_count_[source_terminal];
    const int src = t.terminals()[source_terminal];

    CandidatePath path;
    path.endpoints = TerminalPair::of(source_terminal, target_terminal);
    int v = t.terminals()[target_terminal];
    path.nodes.push_back(v);

    auto& steps = steps_;
    while (v != src) {
        steps.clear();
        double total = 0.0;
        for (const auto& inc : t.incident(v)) {
            const int u = inc.neighbor;
            if (!state.established(inc.link) || dist[u] != dist[v] - 1) continue;
            if (u != src && !t.is_repeater(u)) continue;
            steps.push_back({u, inc.link, count[u]});
            total += count[u];
        }
        // Choosing predecessors proportionally to their path counts yields a
        // uniform draw over all shortest paths.
        double pick = rng.uniform() * total;
        const Step* chosen = &steps.back();
        for (const auto& s : steps) {
            if (pick < s.weight) {
                chosen = &s;
                break;
            }
            pick -= s.weight;
        }
        path.links.push_back(chosen->link);
        path.nodes.push_back(chosen->node);
        v = chosen->node;
    }
    std::ranges::reverse(path.nodes);
    std::ranges::reverse(path.links);
    return path;
}

void PathSelector::select(RoundLinkState& state, const std::vector<TerminalPair>* eligible, Rng& rng,
                          std::vector<CandidatePath>& out) {
    const int nt = topo_->terminal_count();
    auto& allowed = allowed_;
    auto& source_used = source_used_;
    allowed.assign(static_cast<std::size_t>(nt) * nt, eligible ? 0 : 1);
    source_used.assign(static_cast<std::size_t>(nt), eligible ? 0 : 1);
    if (eligible) {
        for (const auto& p : *eligible) {
            allowed[static_cast<std::size_t>(p.first) * nt + p.second] = 1;
            source_used[p.first] = 1;
        }
    }

    auto& tied = tied_;
    while (true) {
        int best = kUnreached;
        tied.clear();
        for (int s = 0; s + 1 < nt; ++s) {
            if (!source_used[s]) continue;
            bfs(state, s, best);
            for (int j = s + 1; j < nt; ++j) {
                if (!allowed[static_cast<std::size_t>(s) * nt + j]) continue;
                const int d = term_dist_[s][j];
                if (d == kUnreached || d > best) continue;
                if (d < best) {
                    best = d;
                    tied.clear();
                }
                tied.push_back({s, j});
            }
        }
        if (tied.empty()) break;

        // Each pair proposes one shortest path; ties between pairs are broken
        // uniformly, independent of how many shortest paths each pair has.
        const Candidate& chosen = tied[rng.below(tied.size())];
        CandidatePath path = trace(state, chosen.source, chosen.target, rng);
        for (int link : path.links) state.consume(link);
        out.push_back(std::move(path));
    }
}

std::optional<CandidatePath> PathSelector::shortest(const RoundLinkState& state, TerminalPair pair, Rng& rng) {
    bfs(state, pair.first, kUnreached);
    if (term_dist_[pair.first][pair.second] == kUnreached) return std::nullopt;
    return trace(state, pair.first, pair.second, rng);
}

std::optional<CandidatePath> shortest_path(const RoundLinkState& state, const Topology& t, TerminalPair pair,
                                           Rng& rng) {
    PathSelector selector(t);
    return selector.shortest(state, TerminalPair::of(pair.first, pair.second), rng);
}

std::vector<CandidatePath> static_route(RoundLinkState& state, const Topology& t, Rng& rng) {
    std::vector<CandidatePath> out;
    PathSelector(t).select(state, nullptr, rng, out);
    return out;
}

std::vector<CandidatePath> dynamic_route(RoundLinkState& state, const Topology& t, const PriorityList& prio,
                                         Rng& rng) {
    std::vector<CandidatePath> out;
    PathSelector selector(t);
    if (!prio.empty()) selector.select(state, &prio.pairs, rng, out);
    selector.select(state, nullptr, rng, out);
    return out;
}

PriorityList compute_priorities(const FlowGraph& caps, const Topology& t, const BalancerParams& p, Rng& rng) {
    const int n = caps.size();
    PriorityList result;
    if (n < 3) return result;
    const int alice = 0;
    const int bob = n - 1;

    const auto edges = caps.edges();
    double c_max = 0.0;
    for (const auto& e : edges) c_max = std::max(c_max, e.capacity);
    // Nothing accumulated yet: no edge holds a surplus.
    if (c_max <= 0.0) return result;

    std::vector<FlowGraph::Edge> fullest;
    for (const auto& e : edges)
        if (e.capacity == c_max) fullest.push_back(e);
    const auto e_max = fullest[rng.below(fullest.size())];

    // Terminal graph weighted by Manhattan distance minus a small random
    // perturbation per edge.
    const auto idx = [n](int i, int j) { return static_cast<std::size_t>(i) * n + j; };
    std::vector<double> w(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double d = manhattan_distance(t.terminal_position(i), t.terminal_position(j));
            const double eps = rng.uniform() * kTieBreakScale;
            w[idx(i, j)] = w[idx(j, i)] = d - eps;
        }
    }

    // Floyd-Warshall with successor reconstruction.
    std::vector<double> d = w;
    std::vector<int> next(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) next[idx(i, j)] = j;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && d[idx(i, k)] + d[idx(k, j)] < d[idx(i, j)]) {
                    d[idx(i, j)] = d[idx(i, k)] + d[idx(k, j)];
                    next[idx(i, j)] = next[idx(i, k)];
                }
    for (int i = 0; i < n; ++i) d[idx(i, i)] = 0.0;

    const auto corridor_length = [&](int ti, int tj) { return d[idx(alice, ti)] + w[idx(ti, tj)] + d[idx(tj, bob)]; };
    int ti = e_max.i;
    int tj = e_max.j;
    if (corridor_length(tj, ti) < corridor_length(ti, tj)) std::swap(ti, tj);

    std::vector<int> walk{alice};
    const auto extend = [&](int from, int to) {
        for (int u = from; u != to;) {
            u = next[idx(u, to)];
            walk.push_back(u);
        }
    };
    extend(alice, ti);
    walk.push_back(tj);
    extend(tj, bob);

    std::set<TerminalPair> corridor;
    for (std::size_t k = 0; k + 1 < walk.size(); ++k)
        if (walk[k] != walk[k + 1]) corridor.insert(TerminalPair::of(walk[k], walk[k + 1]));

    std::vector<TerminalPair> under_full;
    for (const auto& e : corridor)
        if ((1.0 + p.sigma) * caps.capacity(e.first, e.second) <= c_max) under_full.push_back(e);
    if (under_full.empty()) return result;

    double c_min = std::numeric_limits<double>::infinity();
    for (const auto& e : under_full) c_min = std::min(c_min, caps.capacity(e.first, e.second));

    const double ab = manhattan_distance(t.terminal_position(alice), t.terminal_position(bob));
    for (const auto& e : under_full) {
        if (caps.capacity(e.first, e.second) > (1.0 + p.delta) * c_min) continue;
        const double gap = manhattan_distance(t.terminal_position(e.first), t.terminal_position(e.second));
        if (gap >= p.theta * ab) continue;
        result.pairs.push_back(e);
    }
    return result;
}

std::vector<CandidatePath> attempt_swapping(std::vector<CandidatePath> paths, double bsm_success, Rng& rng) {
    std::vector<CandidatePath> survivors;
    survivors.reserve(paths.size());
    for (auto& path : paths) {
        const int k = path.repeaters();
        if (k == 0 || rng.bernoulli(std::pow(bsm_success, k))) survivors.push_back(std::move(path));
    }
    return survivors;
}

}  // namespace qkdnet
