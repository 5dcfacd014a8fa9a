#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qkdnet {

struct Position {
    int row = 0;
    int col = 0;

    friend constexpr auto operator<=>(const Position&, const Position&) = default;
};

enum class NodeKind { Alice, Bob, TrustedNode, Repeater };

[[nodiscard]] std::string_view to_string(NodeKind kind);

/// Named trusted-node placements. `diag-a-b-c` names any diagonal two-TN
/// layout; `custom` carries explicit coordinates.
class PlacementPreset {
public:
    enum class Kind { NoTN, OneTNIdeal, OffCenter, TwoTNIdeal, TwoTNCorner, Diagonal, OffDiag, Custom };

    static PlacementPreset no_tn() { return PlacementPreset(Kind::NoTN); }
    static PlacementPreset one_tn_ideal() { return PlacementPreset(Kind::OneTNIdeal); }
    static PlacementPreset off_center() { return PlacementPreset(Kind::OffCenter); }
    static PlacementPreset two_tn_ideal() { return PlacementPreset(Kind::TwoTNIdeal); }
    static PlacementPreset two_tn_corner() { return PlacementPreset(Kind::TwoTNCorner); }
    static PlacementPreset off_diag() { return PlacementPreset(Kind::OffDiag); }
    /// Two TNs on the A-B diagonal at Manhattan gaps (a, b, c).
    static PlacementPreset diagonal(int a, int b, int c);
    static PlacementPreset custom(std::vector<Position> trusted_nodes);

    /// Accepts the canonical names (case-insensitive), `diag-a-b-c`, and
    /// `custom:r,c;r,c;...`. Throws ConfigError on anything else.
    static PlacementPreset parse(std::string_view name);

    /// Every named preset, in display order.
    static std::vector<PlacementPreset> named();

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] std::string name() const;
    [[nodiscard]] const std::vector<Position>& custom_positions() const noexcept { return custom_; }
    [[nodiscard]] const std::vector<int>& gaps() const noexcept { return gaps_; }

    /// Trusted-node coordinates on a lattice with inner size `inner_size`.
    [[nodiscard]] std::vector<Position> trusted_nodes(int inner_size) const;

    friend bool operator==(const PlacementPreset&, const PlacementPreset&) = default;

private:
    explicit PlacementPreset(Kind kind) : kind_(kind) {}

    Kind kind_;
    std::vector<int> gaps_;
    std::vector<Position> custom_;
};

struct Link {
    int a = 0;  // node index, a < b
    int b = 0;
    double length_km = 1.0;
};

struct LinkLengthOverride {
    Position u;
    Position v;
    double length_km = 1.0;
};

/// Square lattice of side S+2 holding an S x S inner lattice whose opposite
/// diagonal corners are Alice and Bob. Nodes are indexed row-major.
class Topology {
public:
    static constexpr int kNoTerminal = -1;

    [[nodiscard]] int side() const noexcept { return side_; }
    [[nodiscard]] int inner_size() const noexcept { return side_ - 2; }
    [[nodiscard]] int node_count() const noexcept { return side_ * side_; }
    [[nodiscard]] int link_count() const noexcept { return static_cast<int>(links_.size()); }

    [[nodiscard]] int index(Position p) const noexcept { return p.row * side_ + p.col; }
    [[nodiscard]] Position position(int node) const noexcept { return {node / side_, node % side_}; }
    [[nodiscard]] bool on_grid(Position p) const noexcept {
        return p.row >= 0 && p.col >= 0 && p.row < side_ && p.col < side_;
    }

    [[nodiscard]] NodeKind kind(int node) const { return kinds_[node]; }
    [[nodiscard]] NodeKind kind(Position p) const { return kinds_[index(p)]; }
    [[nodiscard]] bool is_repeater(int node) const { return kinds_[node] == NodeKind::Repeater; }

    [[nodiscard]] const std::vector<Link>& links() const noexcept { return links_; }
    [[nodiscard]] const Link& link(int id) const { return links_[id]; }
    /// Link id between two adjacent nodes, or nullopt.
    [[nodiscard]] std::optional<int> link_between(int u, int v) const;

    struct Incidence {
        int neighbor;
        int link;
    };
    [[nodiscard]] const std::vector<Incidence>& incident(int node) const { return incidence_[node]; }

    /// Terminal nodes ordered T_0 = Alice, T_1..T_n trusted nodes, T_{n+1} = Bob.
    [[nodiscard]] const std::vector<int>& terminals() const noexcept { return terminals_; }
    [[nodiscard]] int terminal_count() const noexcept { return static_cast<int>(terminals_.size()); }
    [[nodiscard]] int terminal_of(int node) const { return terminal_index_[node]; }
    [[nodiscard]] Position terminal_position(int t) const { return position(terminals_[t]); }
    [[nodiscard]] int alice() const { return terminals_.front(); }
    [[nodiscard]] int bob() const { return terminals_.back(); }

    [[nodiscard]] const PlacementPreset& preset() const noexcept { return preset_; }

    friend Topology build_topology(int, const PlacementPreset&, double, const std::vector<LinkLengthOverride>&);

private:
    Topology(int side, PlacementPreset preset) : side_(side), preset_(std::move(preset)) {}

    int side_;
    PlacementPreset preset_;
    std::vector<NodeKind> kinds_;
    std::vector<Link> links_;
    std::vector<std::vector<Incidence>> incidence_;
    std::vector<int> terminals_;
    std::vector<int> terminal_index_;
};

/// Builds the (S+2)x(S+2) lattice with uniform link length and places the
/// preset's trusted nodes. Throws ConfigError for S < 2 or non-positive
/// lengths, PlacementError for an invalid trusted-node position.
Topology build_topology(int inner_size, const PlacementPreset& preset, double link_length_km = 1.0,
                        const std::vector<LinkLengthOverride>& overrides = {});

[[nodiscard]] constexpr int manhattan_distance(Position u, Position v) noexcept {
    const int dr = u.row > v.row ? u.row - v.row : v.row - u.row;
    const int dc = u.col > v.col ? u.col - v.col : v.col - u.col;
    return dr + dc;
}

[[nodiscard]] int manhattan_distance(const Topology& t, int u, int v);

/// Grid positions linked to `u`.
[[nodiscard]] std::vector<Position> neighbors(const Topology& t, Position u);

}  // namespace qkdnet
