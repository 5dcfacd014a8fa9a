#include "qkdnet/entanglement.hpp"

#include <algorithm>
#include <cmath>

namespace qkdnet {

double link_success_prob(double alpha_db_per_km, double length_km) {
    return std::pow(10.0, -alpha_db_per_km * length_km / 10.0);
}

std::size_t RoundLinkState::count() const {
    return static_cast<std::size_t>(std::ranges::count(established_, std::uint8_t{1}));
}

LinkSampler::LinkSampler(const Topology& t, const LinkModel& m) {
    probs_.reserve(t.links().size());
    for (const auto& link : t.links()) probs_.push_back(m.success_prob(link));
}

void LinkSampler::sample(RoundLinkState& state, Rng& rng) const {
    if (state.size() != probs_.size()) state = RoundLinkState(probs_.size());
    for (std::size_t i = 0; i < probs_.size(); ++i) state.set(static_cast<int>(i), rng.bernoulli(probs_[i]));
}

RoundLinkState sample_links(const Topology& t, const LinkModel& m, Rng& rng) {
    RoundLinkState state(t.links().size());
    LinkSampler(t, m).sample(state, rng);
    return state;
}

double path_fidelity(double decoherence, int repeaters) {
    return std::pow(1.0 - decoherence, repeaters + 1);
}

double path_qber(double decoherence, int repeaters) {
    return (1.0 - path_fidelity(decoherence, repeaters)) / 2.0;
}

}  // namespace qkdnet
