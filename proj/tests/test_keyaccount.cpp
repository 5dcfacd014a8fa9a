#include "oracles.hpp"

#include "qkdnet/keyaccount.hpp"

#include <doctest.h>

using namespace qkdnet;

namespace {

// Seeds whose first fair coin lands heads / tails.
Rng seed_with_first_coin(bool heads) {
    for (std::uint64_t seed = 1;; ++seed) {
        Rng probe(seed);
        if (probe.bernoulli(0.5) == heads) return Rng(seed);
    }
}

}  // namespace

TEST_SUITE("keyaccount") {

TEST_CASE("sifting keeps about half of the surviving paths") {
    RawKeyPool pool({0, 1});
    Rng rng(17);
    constexpr int kPaths = 100000;
    for (int i = 0; i < kPaths; ++i) sift_and_record(pool, 3, rng);
    CHECK(std::abs(static_cast<double>(pool.total()) - kPaths * 0.5) <= oracle::three_sigma(kPaths, 0.5));
    CHECK(pool.count(3) == pool.total());
    CHECK(pool.count(0) == 0);
}

TEST_CASE("matching bases record one bit, mismatched bases none") {
    RawKeyPool pool({0, 2});
    Rng heads = seed_with_first_coin(true);
    CHECK(sift_and_record(pool, 4, heads));
    CHECK(pool.count(4) == 1);
    CHECK(pool.total() == 1);

    const RawKeyPool before = pool;
    Rng tails = seed_with_first_coin(false);
    CHECK_FALSE(sift_and_record(pool, 4, tails));
    CHECK(pool == before);
}

TEST_CASE("capacity estimate of a single noise class") {
    RawKeyPool pool({0, 1});
    pool.add(1, 1000);
    CHECK(estimate_capacity(pool, 0.02, true) == doctest::Approx(719.3677527919).epsilon(1e-9));
    CHECK(estimate_capacity(pool, 0.02, false) == doctest::Approx(719.3677527919).epsilon(1e-9));
    CHECK(estimate_capacity(RawKeyPool({0, 1}), 0.02, true) == 0.0);
}

TEST_CASE("noiseless pools yield one secret bit per sifted bit") {
    RawKeyPool pool({1, 2});
    pool.add(0, 10);
    pool.add(5, 200);
    pool.add(11, 3);
    CHECK(estimate_capacity(pool, 0.0, true) == doctest::Approx(213.0));
    CHECK(estimate_capacity(pool, 0.0, false) == doctest::Approx(213.0));
}

TEST_CASE("segmented estimate never falls below pooled") {
    Rng rng(8);
    for (int trial = 0; trial < 2000; ++trial) {
        RawKeyPool pool({0, 1});
        const int classes = 1 + static_cast<int>(rng.below(8));
        for (int i = 0; i < classes; ++i) pool.add(static_cast<int>(rng.below(14)), 1 + rng.below(5000));
        const double d = 0.05 * rng.uniform();
        const double seg = estimate_capacity(pool, d, true);
        const double pooled = estimate_capacity(pool, d, false);
        CHECK(seg >= pooled - 1e-9 * static_cast<double>(pool.total()));
        CHECK(seg <= static_cast<double>(pool.total()) + 1e-9);
        CHECK(pooled >= 0.0);
    }
}

TEST_CASE("capacity estimates only grow as bits arrive") {
    RawKeyPool pool({0, 1});
    Rng rng(4);
    double last = 0.0;
    for (int i = 0; i < 5000; ++i) {
        pool.add(static_cast<int>(rng.below(12)));
        const double now = estimate_capacity(pool, 0.01, true);
        CHECK(now >= last);
        last = now;
    }
}

TEST_CASE("pooled error rate is the count-weighted mean") {
    RawKeyPool pool({0, 1});
    pool.add(0, 300);
    pool.add(4, 100);
    const double expect = (300 * path_qber(0.03, 0) + 100 * path_qber(0.03, 4)) / 400.0;
    CHECK(pooled_qber(pool, 0.03) == doctest::Approx(expect));
    CHECK(pooled_qber(RawKeyPool({0, 1}), 0.03) == 0.0);
}

TEST_CASE("sampled bit errors match the path error rate within three sigma") {
    const double d = 0.03;
    for (int k : {0, 1, 3, 7}) {
        RawKeyPool pool({0, 1});
        Rng rng(1000 + static_cast<std::uint64_t>(k));
        constexpr int kBits = 40000;
        pool.add(k, kBits);
        for (int i = 0; i < kBits; ++i) sample_bit_error(pool, k, d, rng);
        const double q = path_qber(d, k);
        CAPTURE(k);
        CHECK(std::abs(static_cast<double>(pool.errors(k)) - kBits * q) <= oracle::three_sigma(kBits, q));
    }
}

TEST_CASE("terminal graph shapes") {
    const auto edges_of = [](int n) {
        std::vector<RawKeyPool> pools;
        for (const auto& p : all_terminal_pairs(n)) {
            pools.emplace_back(p);
            pools.back().add(1, 10);
        }
        return build_flow_graph(n, pools, 0.0);
    };
    const auto g2 = edges_of(2);
    CHECK(g2.size() == 2);
    CHECK(g2.edges().size() == 1);
    CHECK(g2.capacity(0, 1) == doctest::Approx(10.0));

    const auto g3 = edges_of(3);
    CHECK(g3.edges().size() == 3);
    for (const auto& e : g3.edges()) CHECK(e.capacity == doctest::Approx(10.0));

    const auto g4 = edges_of(4);
    CHECK(g4.edges().size() == 6);
    CHECK(g4.capacity(0, 3) == doctest::Approx(10.0));
}

TEST_CASE("flow graph from final amounts") {
    const auto g = build_flow_graph(3, {{0, 1}, {1, 2}, {0, 2}}, {5.0, 7.0, 1.5});
    CHECK(g.capacity(1, 0) == 5.0);
    CHECK(g.capacity(2, 1) == 7.0);
    CHECK(g.capacity(0, 2) == 1.5);
}

}
