#pragma once

#include "qkdnet/rng.hpp"
#include "qkdnet/topology.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace qkdnet {

/// P = 10^(-alpha L / 10).
[[nodiscard]] double link_success_prob(double alpha_db_per_km, double length_km);

/// Per-link physics: loss and decoherence. When `success_override` is set it
/// replaces the loss formula for every link.
struct LinkModel {
    double alpha_db_per_km = 0.15;
    double decoherence = 0.0;
    std::optional<double> success_override;

    [[nodiscard]] double success_prob(const Link& link) const {
        return success_override ? *success_override : link_success_prob(alpha_db_per_km, link.length_km);
    }
};

/// Links whose entanglement attempt succeeded this round, indexed by link id.
class RoundLinkState {
public:
    RoundLinkState() = default;
    explicit RoundLinkState(std::size_t link_count, bool established = false)
        : established_(link_count, established ? 1 : 0) {}

    [[nodiscard]] bool established(int link) const { return established_[static_cast<std::size_t>(link)] != 0; }
    void set(int link, bool value) { established_[static_cast<std::size_t>(link)] = value ? 1 : 0; }
    void consume(int link) { set(link, false); }

    [[nodiscard]] std::size_t size() const noexcept { return established_.size(); }
    [[nodiscard]] std::size_t count() const;

    friend bool operator==(const RoundLinkState&, const RoundLinkState&) = default;

private:
    std::vector<std::uint8_t> established_;
};

/// Stage-1 draw: each link is present independently with its success
/// probability. Decoherence is not sampled here; it is carried by the path
/// noise class.
[[nodiscard]] RoundLinkState sample_links(const Topology& t, const LinkModel& m, Rng& rng);

/// Precomputed per-link probabilities for the hot loop.
class LinkSampler {
public:
    LinkSampler(const Topology& t, const LinkModel& m);
    void sample(RoundLinkState& state, Rng& rng) const;

private:
    std::vector<double> probs_;
};

/// Weight of the Bell state after k swaps over k+1 links: (1-D)^(k+1).
[[nodiscard]] double path_fidelity(double decoherence, int repeaters);

/// Matched-basis error rate of a k-repeater path: (1 - (1-D)^(k+1)) / 2.
[[nodiscard]] double path_qber(double decoherence, int repeaters);

}  // namespace qkdnet
