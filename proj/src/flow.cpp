#include "qkdnet/flow.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace qkdnet {

void FlowGraph::set_capacity(int i, int j, double c) {
    if (!(c >= 0.0)) throw std::invalid_argument("flow graph capacity must be >= 0");
    if (i == j) throw std::invalid_argument("flow graph edge must join distinct terminals");
    cap_[at(i, j)] = c;
    cap_[at(j, i)] = c;
}

std::vector<FlowGraph::Edge> FlowGraph::edges() const {
    std::vector<Edge> out;
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) out.push_back({i, j, capacity(i, j)});
    return out;
}

double FlowAssignment::excess(int v) const {
    double sum = 0.0;
    for (int u = 0; u < n_; ++u) sum += (*this)(v, u);
    return sum;
}

MaxFlowResult max_flow(const FlowGraph& g) {
    const int n = g.size();
    MaxFlowResult result{0.0, FlowAssignment(n)};
    if (n < 2) return result;

    double scale = 0.0;
    for (const auto& e : g.edges()) scale = std::max(scale, e.capacity);
    // Residual amounts below this are rounding noise, not capacity.
    const double eps = 1e-12 * std::max(1.0, scale);

    const int s = g.source();
    const int t = g.sink();
    const auto residual = [&](int u, int v) { return g.capacity(u, v) - result.flows(u, v); };

    std::vector<int> parent(static_cast<std::size_t>(n));
    while (true) {
        std::ranges::fill(parent, -1);
        parent[s] = s;
        std::deque<int> queue{s};
        while (!queue.empty() && parent[t] < 0) {
            const int u = queue.front();
            queue.pop_front();
            for (int v = 0; v < n; ++v) {
                if (parent[v] < 0 && residual(u, v) > eps) {
                    parent[v] = u;
                    queue.push_back(v);
                }
            }
        }
        if (parent[t] < 0) break;

        double bottleneck = std::numeric_limits<double>::infinity();
        for (int v = t; v != s; v = parent[v]) bottleneck = std::min(bottleneck, residual(parent[v], v));
        for (int v = t; v != s; v = parent[v]) result.flows.push(parent[v], v, bottleneck);
        result.value += bottleneck;
    }
    return result;
}

double final_key_rate(double flow_value, double rounds) {
    if (!(rounds > 0.0)) throw std::invalid_argument("round count must be > 0");
    return flow_value / rounds;
}

std::vector<EdgeWaste> wasted_key(const FlowGraph& g, const FlowAssignment& flows) {
    std::vector<EdgeWaste> out;
    for (const auto& e : g.edges())
        out.push_back({e.i, e.j, std::max(0.0, e.capacity - std::abs(flows(e.i, e.j)))});
    return out;
}

double total_waste(const std::vector<EdgeWaste>& waste) {
    double sum = 0.0;
    for (const auto& w : waste) sum += w.leftover;
    return sum;
}

}  // namespace qkdnet
