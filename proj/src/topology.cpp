#include "qkdnet/topology.hpp"

#include "qkdnet/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>

namespace qkdnet {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::ranges::transform(out, out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

int parse_int(std::string_view s, std::string_view context) {
    int value = 0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    while (first != last && std::isspace(static_cast<unsigned char>(*first))) ++first;
    while (last != first && std::isspace(static_cast<unsigned char>(*(last - 1)))) --last;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || first == last)
        throw ConfigError("preset", "cannot parse integer '" + std::string(s) + "' in " + std::string(context));
    return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

}  // namespace

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Alice: return "alice";
        case NodeKind::Bob: return "bob";
        case NodeKind::TrustedNode: return "trusted";
        case NodeKind::Repeater: return "repeater";
    }
    return "?";
}

PlacementPreset PlacementPreset::diagonal(int a, int b, int c) {
    PlacementPreset p(Kind::Diagonal);
    p.gaps_ = {a, b, c};
    return p;
}

PlacementPreset PlacementPreset::custom(std::vector<Position> trusted_nodes) {
    PlacementPreset p(Kind::Custom);
    p.custom_ = std::move(trusted_nodes);
    return p;
}

PlacementPreset PlacementPreset::parse(std::string_view raw) {
    const std::string name = lower(raw);
    if (name == "no-tn") return no_tn();
    if (name == "1tn-ideal") return one_tn_ideal();
    if (name == "off-center") return off_center();
    if (name == "2tn-ideal") return two_tn_ideal();
    if (name == "2tn-corner") return two_tn_corner();
    if (name == "off-diag") return off_diag();
    if (name.starts_with("diag-")) {
        const auto parts = split(std::string_view(name).substr(5), '-');
        if (parts.size() != 3) throw ConfigError("preset", "expected diag-a-b-c, got '" + std::string(raw) + "'");
        return diagonal(parse_int(parts[0], name), parse_int(parts[1], name), parse_int(parts[2], name));
    }
    if (name.starts_with("custom:")) {
        std::vector<Position> positions;
        const auto body = std::string_view(name).substr(7);
        if (!body.empty()) {
            for (auto item : split(body, ';')) {
                const auto rc = split(item, ',');
                if (rc.size() != 2) throw ConfigError("preset", "custom position must be 'row,col', got '" + std::string(item) + "'");
                positions.push_back({parse_int(rc[0], name), parse_int(rc[1], name)});
            }
        }
        return custom(std::move(positions));
    }
    throw ConfigError("preset", "unknown preset '" + std::string(raw) + "'");
}

std::vector<PlacementPreset> PlacementPreset::named() {
    return {no_tn(), one_tn_ideal(), off_center(), two_tn_ideal(), two_tn_corner(),
            diagonal(2, 6, 4), diagonal(4, 2, 6), off_diag()};
}

std::string PlacementPreset::name() const {
    switch (kind_) {
        case Kind::NoTN: return "no-TN";
        case Kind::OneTNIdeal: return "1TN-ideal";
        case Kind::OffCenter: return "off-center";
        case Kind::TwoTNIdeal: return "2TN-ideal";
        case Kind::TwoTNCorner: return "2TN-corner";
        case Kind::OffDiag: return "off-diag";
        case Kind::Diagonal:
            return "diag-" + std::to_string(gaps_[0]) + "-" + std::to_string(gaps_[1]) + "-" + std::to_string(gaps_[2]);
        case Kind::Custom: {
            std::string s = "custom:";
            for (std::size_t i = 0; i < custom_.size(); ++i) {
                if (i) s += ';';
                s += std::to_string(custom_[i].row) + "," + std::to_string(custom_[i].col);
            }
            return s;
        }
    }
    return "?";
}

std::vector<Position> PlacementPreset::trusted_nodes(int inner_size) const {
    // Alice sits at (1,1) and Bob at (S,S); steps are taken along the diagonal.
    const int s = inner_size;
    const auto diag = [](int steps) { return Position{1 + steps, 1 + steps}; };
    switch (kind_) {
        case Kind::NoTN: return {};
        case Kind::OneTNIdeal: return {diag((s - 1) / 2)};
        case Kind::OffCenter: return {diag(2)};
        case Kind::TwoTNIdeal: {
            const int third = (s - 1) / 3;
            return {diag(third), diag(s - 1 - third)};
        }
        case Kind::TwoTNCorner: return {{1, s}, {s, 1}};
        case Kind::OffDiag:
            // T_1 two hops from Alice; T_2 on row 3 with row+col = S+2, which
            // makes it equidistant (S-2 hops) from T_1 and Bob.
            return {diag(1), {3, s - 1}};
        case Kind::Diagonal: {
            const int a = gaps_[0], b = gaps_[1], c = gaps_[2];
            if (a <= 0 || b <= 0 || c <= 0 || a % 2 || b % 2 || c % 2)
                throw PlacementError("diagonal gaps must be positive and even, got " + name());
            if (a + b + c != 2 * (s - 1))
                throw PlacementError(name() + " gaps must sum to dist(A,B) = " + std::to_string(2 * (s - 1)));
            return {diag(a / 2), diag((a + b) / 2)};
        }
        case Kind::Custom: return custom_;
    }
    return {};
}

std::optional<int> Topology::link_between(int u, int v) const {
    for (const auto& inc : incidence_[u])
        if (inc.neighbor == v) return inc.link;
    return std::nullopt;
}

Topology build_topology(int inner_size, const PlacementPreset& preset, double link_length_km,
                        const std::vector<LinkLengthOverride>& overrides) {
    if (inner_size < 2) throw ConfigError("size", "lattice size must be >= 2, got " + std::to_string(inner_size));
    if (!(link_length_km > 0.0)) throw ConfigError("link_length_km", "link length must be > 0");

    Topology t(inner_size + 2, preset);
    const int n = t.node_count();
    t.kinds_.assign(n, NodeKind::Repeater);
    t.terminal_index_.assign(n, Topology::kNoTerminal);
    t.incidence_.assign(n, {});

    const Position alice{1, 1};
    const Position bob{inner_size, inner_size};
    t.kinds_[t.index(alice)] = NodeKind::Alice;
    t.kinds_[t.index(bob)] = NodeKind::Bob;

    const auto trusted = preset.trusted_nodes(inner_size);
    std::set<Position> seen{alice, bob};
    for (const auto& p : trusted) {
        const std::string where = "(" + std::to_string(p.row) + "," + std::to_string(p.col) + ")";
        if (!t.on_grid(p)) throw PlacementError("trusted node " + where + " is off the grid");
        if (p == alice || p == bob) throw PlacementError("trusted node " + where + " coincides with Alice or Bob");
        if (!seen.insert(p).second) throw PlacementError("duplicate trusted node " + where);
        t.kinds_[t.index(p)] = NodeKind::TrustedNode;
    }

    t.terminals_.push_back(t.index(alice));
    for (const auto& p : trusted) t.terminals_.push_back(t.index(p));
    t.terminals_.push_back(t.index(bob));
    for (int i = 0; i < t.terminal_count(); ++i) t.terminal_index_[t.terminals_[i]] = i;

    const int side = t.side();
    const auto add_link = [&](int a, int b) {
        const int id = static_cast<int>(t.links_.size());
        t.links_.push_back({a, b, link_length_km});
        t.incidence_[a].push_back({b, id});
        t.incidence_[b].push_back({a, id});
    };
    for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c) {
            const int u = t.index({r, c});
            if (c + 1 < side) add_link(u, t.index({r, c + 1}));
            if (r + 1 < side) add_link(u, t.index({r + 1, c}));
        }
    }

    for (const auto& o : overrides) {
        if (!t.on_grid(o.u) || !t.on_grid(o.v)) throw ConfigError("link_overrides", "endpoint off the grid");
        const auto id = t.link_between(t.index(o.u), t.index(o.v));
        if (!id) throw ConfigError("link_overrides", "positions are not adjacent");
        if (!(o.length_km > 0.0)) throw ConfigError("link_overrides", "link length must be > 0");
        t.links_[*id].length_km = o.length_km;
    }
    return t;
}

int manhattan_distance(const Topology& t, int u, int v) {
    return manhattan_distance(t.position(u), t.position(v));
}

std::vector<Position> neighbors(const Topology& t, Position u) {
    std::vector<Position> out;
    for (const auto& inc : t.incident(t.index(u))) out.push_back(t.position(inc.neighbor));
    return out;
}

}  // namespace qkdnet
