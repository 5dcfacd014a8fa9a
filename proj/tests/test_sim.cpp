#include "qkdnet/errors.hpp"
#include "qkdnet/records.hpp"
#include "qkdnet/sim.hpp"

#include <doctest.h>

#include <numeric>
#include <set>
#include <sstream>

using namespace qkdnet;

namespace {

SimConfig small(PlacementPreset preset, RoutingPolicy policy, double d, std::uint64_t rounds = 3000) {
    SimConfig c;
    c.preset = std::move(preset);
    c.policy = policy;
    c.decoherence = d;
    c.rounds = rounds;
    return c;
}

std::string csv_of(const SimResult& r) {
    std::ostringstream os;
    write_results({make_record(r)}, os, OutputFormat::Csv);
    return os.str();
}

double mean_rate(SimConfig c, int seeds) {
    double sum = 0.0;
    for (int s = 1; s <= seeds; ++s) {
        c.seed = static_cast<std::uint64_t>(s);
        sum += run(c).key_rate;
    }
    return sum / seeds;
}

}  // namespace

TEST_SUITE("sim") {

TEST_CASE("identical config and seed reproduce identical records") {
    const auto c = small(PlacementPreset::off_center(), RoutingPolicy::Dynamic, 0.01);
    const auto a = run(c), b = run(c);
    CHECK(csv_of(a) == csv_of(b));
    for (std::size_t i = 0; i < a.pairs.size(); ++i) CHECK(a.pairs[i].pool == b.pairs[i].pool);

    auto other = c;
    other.seed = 2;
    CHECK(csv_of(run(other)) != csv_of(a));
}

TEST_CASE("invalid configs fail before any round runs") {
    int rounds_seen = 0;
    RunHooks hooks;
    hooks.on_round = [&](std::uint64_t, const RoundLinkState&, const std::vector<CandidatePath>&) { ++rounds_seen; };
    const auto expect_field = [&](SimConfig c, const std::string& field) {
        try {
            (void)run(c, hooks);
            FAIL("expected a config error for " << field);
        } catch (const ConfigError& e) {
            CHECK(e.field() == field);
        }
    };
    auto c = small(PlacementPreset::one_tn_ideal(), RoutingPolicy::Static, 0.0);
    auto bad = c;
    bad.rounds = 0;
    expect_field(bad, "rounds");
    bad = c;
    bad.decoherence = 1.5;
    expect_field(bad, "decoherence");
    bad = c;
    bad.bsm_success_prob = -0.1;
    expect_field(bad, "bsm_success_prob");
    bad = c;
    bad.preset = PlacementPreset::custom({{0, 9}});
    expect_field(bad, "preset");
    bad = c;
    bad.balancer.theta = 1.2;
    expect_field(bad, "theta");
    bad = c;
    bad.priority_cadence = 0;
    expect_field(bad, "priority_cadence");
    CHECK(rounds_seen == 0);
}

TEST_CASE("every round obeys the path rules") {
    for (auto policy : {RoutingPolicy::Static, RoutingPolicy::Dynamic}) {
        auto c = small(PlacementPreset::diagonal(2, 6, 4), policy, 0.0, 2000);
        const auto t = build_topology(c.size, c.preset);
        int violations = 0;
        RunHooks hooks;
        hooks.on_round = [&](std::uint64_t, const RoundLinkState& established, const std::vector<CandidatePath>& paths) {
            std::set<int> used;
            for (const auto& p : paths) {
                for (std::size_t i = 1; i + 1 < p.nodes.size(); ++i) violations += !t.is_repeater(p.nodes[i]);
                for (int l : p.links) violations += !established.established(l) || !used.insert(l).second;
            }
        };
        (void)run(c, hooks);
        CHECK(violations == 0);
    }
}

TEST_CASE("flow bookkeeping is consistent") {
    for (const auto& preset : {PlacementPreset::one_tn_ideal(), PlacementPreset::two_tn_corner()}) {
        auto c = small(preset, RoutingPolicy::Dynamic, 0.01);
        c.distill.segmenting = true;
        const auto r = run(c);
        const double secret = std::accumulate(r.pairs.begin(), r.pairs.end(), 0.0,
                                              [](double s, const PairOutcome& p) { return s + p.secret_bits; });
        CHECK(r.flow_value == doctest::Approx(r.key_rate * static_cast<double>(c.rounds)));
        CHECK(secret >= r.flow_value - 1e-9);
        CHECK(r.key_rate >= 0.0);
        CHECK(r.flow_value <= static_cast<double>(r.total_sifted));
        std::uint64_t sifted = 0;
        for (const auto& p : r.pairs) sifted += p.pool.total();
        CHECK(sifted == r.total_sifted);
    }
}

TEST_CASE("without trusted nodes the dynamic policy is the static one") {
    const auto s = run(small(PlacementPreset::no_tn(), RoutingPolicy::Static, 0.01));
    const auto d = run(small(PlacementPreset::no_tn(), RoutingPolicy::Dynamic, 0.01));
    REQUIRE(s.pairs.size() == 1);
    CHECK(s.pairs[0].pool == d.pairs[0].pool);
    CHECK(s.key_rate == d.key_rate);
}

TEST_CASE("redistilling keeps the raw pools") {
    const auto base = run(small(PlacementPreset::two_tn_corner(), RoutingPolicy::Static, 0.03, 5000));
    const auto both = redistill(base, DistillationOptions{.segmenting = true, .cad = true});
    for (std::size_t i = 0; i < base.pairs.size(); ++i) CHECK(both.pairs[i].pool == base.pairs[i].pool);
    CHECK(both.config.distill.cad);
    CHECK(both.key_rate >= base.key_rate);

    auto direct_cfg = base.config;
    direct_cfg.distill = both.config.distill;
    CHECK(run(direct_cfg).key_rate == both.key_rate);
}

TEST_CASE("priority cadence leaves static runs untouched") {
    auto c = small(PlacementPreset::off_center(), RoutingPolicy::Static, 0.0);
    const auto every = run(c);
    c.priority_cadence = 50;
    CHECK(run(c).key_rate == every.key_rate);

    auto d = small(PlacementPreset::off_center(), RoutingPolicy::Dynamic, 0.0);
    d.priority_cadence = 25;
    CHECK(run(d).key_rate > 0.0);
}

TEST_CASE("noise lowers the key rate on average") {
    const auto c = small(PlacementPreset::one_tn_ideal(), RoutingPolicy::Static, 0.0, 5000);
    double last = 2.0;
    for (double d : {0.0, 0.01, 0.02, 0.03}) {
        auto cd = c;
        cd.decoherence = d;
        const double rate = mean_rate(cd, 5);
        CHECK(rate <= last);
        last = rate;
    }
}

TEST_CASE("dynamic routing beats static on an asymmetric placement") {
    for (double d : {0.0, 0.02}) {
        const double s = mean_rate(small(PlacementPreset::off_center(), RoutingPolicy::Static, d, 10000), 5);
        const double dy = mean_rate(small(PlacementPreset::off_center(), RoutingPolicy::Dynamic, d, 10000), 5);
        CAPTURE(d);
        CHECK(dy >= s);
    }
}

TEST_CASE("sweep order, size and determinism") {
    const auto base = small(PlacementPreset::one_tn_ideal(), RoutingPolicy::Static, 0.0, 500);
    const std::vector<double> ds{0.0, 0.02};
    const std::vector<RoutingPolicy> ps{RoutingPolicy::Static, RoutingPolicy::Dynamic};
    const std::vector<std::uint64_t> seeds{3, 4, 5};
    const auto results = sweep(base, ds, ps, seeds, 2);
    REQUIRE(results.size() == 12);
    std::size_t i = 0;
    for (double d : ds)
        for (auto p : ps)
            for (auto s : seeds) {
                CHECK(results[i].config.decoherence == d);
                CHECK(results[i].config.policy == p);
                CHECK(results[i].config.seed == s);
                auto single = base;
                single.decoherence = d;
                single.policy = p;
                single.seed = s;
                CHECK(csv_of(results[i]) == csv_of(run(single)));
                ++i;
            }
    CHECK(sweep(base, {0.0}, {RoutingPolicy::Static}, {1}).size() == 1);
}

TEST_CASE("sweep errors name the offending run") {
    const auto base = small(PlacementPreset::one_tn_ideal(), RoutingPolicy::Static, 0.0, 100);
    try {
        (void)sweep(base, {0.0, 1.5}, {RoutingPolicy::Static}, {9});
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "decoherence");
        CHECK(std::string(e.what()).find("D=1.5") != std::string::npos);
        CHECK(std::string(e.what()).find("seed=9") != std::string::npos);
    }
    CHECK_THROWS_AS((void)sweep(base, {}, {RoutingPolicy::Static}, {1}), ConfigError);
    CHECK_THROWS_AS((void)sweep(base, {0.0}, {}, {1}), ConfigError);
    CHECK_THROWS_AS((void)sweep(base, {0.0}, {RoutingPolicy::Static}, {}), ConfigError);
}

TEST_CASE("default decoherence grid spans the figures") {
    const auto grid = default_decoherence_grid();
    CHECK(grid.size() == 9);
    CHECK(grid.front() == 0.0);
    CHECK(grid.back() == doctest::Approx(0.04));
}

}
