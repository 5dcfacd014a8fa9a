#include "oracles.hpp"

#include "qkdnet/entanglement.hpp"

#include <doctest.h>

using namespace qkdnet;

TEST_SUITE("entanglement") {

TEST_CASE("link success probability from fibre loss") {
    CHECK(link_success_prob(0.15, 1.0) == doctest::Approx(0.9660508790).epsilon(1e-9));
    CHECK(link_success_prob(0.0, 1.0) == 1.0);
    CHECK(link_success_prob(0.15, 10.0) == doctest::Approx(0.7079457844).epsilon(1e-9));
}

TEST_CASE("certain success and certain loss") {
    const auto t = build_topology(7, PlacementPreset::no_tn());
    Rng rng(5);
    const auto all = sample_links(t, LinkModel{.success_override = 1.0}, rng);
    CHECK(all.count() == t.links().size());
    const auto none = sample_links(t, LinkModel{.success_override = 0.0}, rng);
    CHECK(none.count() == 0);
    CHECK(none.size() == t.links().size());
}

TEST_CASE("link success frequency matches P within three sigma") {
    const auto t = build_topology(2, PlacementPreset::no_tn());
    const LinkModel model{.alpha_db_per_km = 0.15, .decoherence = 0.0, .success_override = std::nullopt};
    const double p = model.success_prob(t.link(0));
    CHECK(p == doctest::Approx(0.9661).epsilon(1e-4));

    const LinkSampler sampler(t, model);
    RoundLinkState state;
    Rng master(2024);
    constexpr int kRounds = 100000;
    std::vector<int> hits(t.links().size(), 0);
    for (int r = 0; r < kRounds; ++r) {
        Rng rng = master.split(static_cast<std::uint64_t>(r));
        sampler.sample(state, rng);
        for (int l = 0; l < t.link_count(); ++l) hits[static_cast<std::size_t>(l)] += state.established(l);
    }
    for (int h : hits) CHECK(std::abs(h - kRounds * p) <= oracle::three_sigma(kRounds, p));
}

TEST_CASE("distinct links vary independently") {
    const auto t = build_topology(2, PlacementPreset::no_tn());
    const LinkSampler sampler(t, LinkModel{.success_override = 0.5});
    RoundLinkState state;
    Rng rng(9);
    int both = 0;
    constexpr int kRounds = 40000;
    for (int r = 0; r < kRounds; ++r) {
        sampler.sample(state, rng);
        both += state.established(0) && state.established(1);
    }
    CHECK(std::abs(both - kRounds * 0.25) <= oracle::three_sigma(kRounds, 0.25));
}

TEST_CASE("path fidelity") {
    CHECK(path_fidelity(0.02, 1) == doctest::Approx(0.9604).epsilon(1e-12));
    CHECK(path_fidelity(0.02, 3) == doctest::Approx(0.92236816).epsilon(1e-12));
    for (int k = 0; k < 20; ++k) CHECK(path_fidelity(0.0, k) == 1.0);
}

TEST_CASE("path error rate") {
    CHECK(path_qber(0.02, 1) == doctest::Approx(0.0198).epsilon(1e-12));
    CHECK(path_qber(1.0, 0) == doctest::Approx(0.5));
    for (int k = 0; k < 20; ++k) CHECK(path_qber(0.0, k) == 0.0);
}

TEST_CASE("error rate is half the mixed weight and grows with D and k") {
    for (int di = 0; di <= 20; ++di) {
        const double d = di * 0.05;
        for (int k = 0; k < 15; ++k) {
            CHECK(path_qber(d, k) == doctest::Approx((1.0 - path_fidelity(d, k)) / 2.0));
            CHECK(path_qber(d, k + 1) >= path_qber(d, k));
            if (di < 20) CHECK(path_qber(d + 0.05, k) >= path_qber(d, k));
        }
    }
}

}
