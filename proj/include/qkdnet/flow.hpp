#pragma once

#include <cstddef>
#include <vector>

namespace qkdnet {

/// Terminal-level key graph. Node 0 is Alice (source), the last node is Bob
/// (sink). Capacities are symmetric; a missing pair has capacity 0.
class FlowGraph {
public:
    FlowGraph() = default;
    explicit FlowGraph(int terminal_count)
        : n_(terminal_count), cap_(static_cast<std::size_t>(terminal_count) * terminal_count, 0.0) {}

    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] int source() const noexcept { return 0; }
    [[nodiscard]] int sink() const noexcept { return n_ - 1; }

    [[nodiscard]] double capacity(int i, int j) const { return cap_[at(i, j)]; }
    /// Sets both directions. Negative capacities are rejected.
    void set_capacity(int i, int j, double c);

    struct Edge {
        int i;
        int j;
        double capacity;
    };
    /// All unordered pairs i < j, in lexicographic order.
    [[nodiscard]] std::vector<Edge> edges() const;

private:
    [[nodiscard]] std::size_t at(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

    int n_ = 0;
    std::vector<double> cap_;
};

/// Antisymmetric net flow: flow(i,j) = -flow(j,i).
class FlowAssignment {
public:
    FlowAssignment() = default;
    explicit FlowAssignment(int n) : n_(n), f_(static_cast<std::size_t>(n) * n, 0.0) {}

    [[nodiscard]] int size() const noexcept { return n_; }
    [[nodiscard]] double operator()(int i, int j) const { return f_[static_cast<std::size_t>(i) * n_ + j]; }
    void push(int i, int j, double amount) {
        f_[static_cast<std::size_t>(i) * n_ + j] += amount;
        f_[static_cast<std::size_t>(j) * n_ + i] -= amount;
    }
    /// Net outflow of node v.
    [[nodiscard]] double excess(int v) const;

private:
    int n_ = 0;
    std::vector<double> f_;
};

struct MaxFlowResult {
    double value = 0.0;
    FlowAssignment flows;
};

/// Shortest-augmenting-path (Edmonds-Karp) max flow from Alice to Bob. Each
/// undirected edge is a pair of opposed arcs of equal capacity.
[[nodiscard]] MaxFlowResult max_flow(const FlowGraph& g);

/// |SK_{0,n+1}| / N.
[[nodiscard]] double final_key_rate(double flow_value, double rounds);

struct EdgeWaste {
    int i;
    int j;
    double leftover;
};

/// Capacity minus |net flow| on every edge.
[[nodiscard]] std::vector<EdgeWaste> wasted_key(const FlowGraph& g, const FlowAssignment& flows);
[[nodiscard]] double total_waste(const std::vector<EdgeWaste>& waste);

}  // namespace qkdnet
