#include "oracles.hpp"

#include "qkdnet/errors.hpp"
#include "qkdnet/keyaccount.hpp"
#include "qkdnet/postprocess.hpp"

#include <doctest.h>

#include <stdexcept>

using namespace qkdnet;

namespace {

// Smallest Q at which the rate reaches zero, by bisection on [0, 0.5].
double zero_threshold(int block_size) {
    double lo = 0.0, hi = 0.5;
    for (int i = 0; i < 50; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cad_rate(mid, block_size) > 0.0 ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace

TEST_SUITE("postprocess") {

TEST_CASE("binary entropy") {
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.055) == doctest::Approx(0.3072683599).epsilon(1e-9));
    CHECK_THROWS_AS((void)binary_entropy(-0.01), std::domain_error);
    CHECK_THROWS_AS((void)binary_entropy(1.01), std::domain_error);
}

TEST_CASE("entropy agrees with a direct long-double evaluation") {
    for (int i = 0; i <= 1000; ++i) {
        const double x = i / 1000.0;
        CHECK(binary_entropy(x) == doctest::Approx(oracle::entropy(x)).epsilon(1e-12));
    }
}

TEST_CASE("base rate") {
    CHECK(base_rate(0.055) == doctest::Approx(0.385).epsilon(0.001 / 0.385));
    CHECK(base_rate(0.0) == 1.0);
    CHECK(base_rate(0.11) == doctest::Approx(0.0001680837).epsilon(1e-6));
    CHECK(base_rate(0.2) == 0.0);
    CHECK(base_rate(0.5) == 0.0);
}

TEST_CASE("segmented rate") {
    const Segment two[] = {{0.75, 0.04}, {0.25, 0.10}};
    CHECK(segmented_rate(two) == doctest::Approx(0.4020639196).epsilon(1e-9));
    CHECK(segmented_rate(two) == doctest::Approx(0.402).epsilon(0.001 / 0.402));
    const Segment one[] = {{1.0, 0.07}};
    CHECK(segmented_rate(one) == doctest::Approx(base_rate(0.07)));
    const Segment halves[] = {{0.5, 0.0}, {0.5, 0.5}};
    CHECK(segmented_rate(halves) == doctest::Approx(0.5));
}

TEST_CASE("segmented rate rejects bad fractions") {
    const Segment short_sum[] = {{0.5, 0.1}, {0.4, 0.1}};
    CHECK_THROWS_AS((void)segmented_rate(short_sum), std::invalid_argument);
    const Segment negative[] = {{1.5, 0.1}, {-0.5, 0.1}};
    CHECK_THROWS_AS((void)segmented_rate(negative), std::invalid_argument);
}

TEST_CASE("segmenting never loses on random partitions") {
    Rng rng(2718);
    for (int trial = 0; trial < 10000; ++trial) {
        const int parts = 1 + static_cast<int>(rng.below(6));
        std::vector<Segment> segs;
        double total = 0.0, mean_q = 0.0;
        for (int i = 0; i < parts; ++i) {
            segs.push_back({rng.uniform() + 1e-6, 0.5 * rng.uniform()});
            total += segs.back().fraction;
        }
        for (auto& s : segs) {
            s.fraction /= total;
            mean_q += s.fraction * s.qber;
        }
        CHECK(segmented_rate(segs) >= base_rate(mean_q) - 1e-12);
    }
}

TEST_CASE("advantage distillation rate against the reference grid") {
    // Reference values from an independent 400001-point lambda scan.
    CHECK(cad_rate(0.05, 1) == doctest::Approx(0.42720609).epsilon(1e-6));
    CHECK(cad_rate(0.05, 2) == doctest::Approx(0.50571619).epsilon(1e-6));
    CHECK(cad_rate(0.10, 2) == doctest::Approx(0.19676298).epsilon(1e-6));
    CHECK(cad_rate(0.13, 2) == doctest::Approx(0.04815515).epsilon(1e-5));
    CHECK(cad_rate(0.15, 3) == doctest::Approx(0.00983865).epsilon(1e-4));
    CHECK(cad_rate(0.08, 4) == doctest::Approx(0.16181184).epsilon(1e-6));
}

TEST_CASE("noiseless blocks keep full rate") {
    for (int c = 1; c <= 8; ++c) CHECK(cad_rate(0.0, c) == doctest::Approx(1.0));
}

TEST_CASE("zero-rate thresholds") {
    const double one = zero_threshold(1);
    CHECK(one == doctest::Approx(0.110).epsilon(0.0005 / 0.110));
    CHECK(one == doctest::Approx(0.110028).epsilon(1e-5));
    // Independent reference scan puts the two-bit threshold at 0.140709.
    CHECK(zero_threshold(2) == doctest::Approx(0.140709).epsilon(1e-4));
    CHECK(zero_threshold(3) == doctest::Approx(0.154491).epsilon(1e-4));
    CHECK(zero_threshold(2) > one);
}

TEST_CASE("block size one reduces to the base rate") {
    for (int i = 0; i < 500; ++i) {
        const double q = i / 1000.0;
        CHECK(cad_throughput(q, 1) == doctest::Approx(base_rate(q)).epsilon(1e-6).scale(1.0));
    }
}

TEST_CASE("rate does not increase with noise") {
    for (int c = 1; c <= 4; ++c) {
        double last = cad_rate(0.0, c);
        for (int i = 1; i < 250; ++i) {
            const double now = cad_rate(i / 500.0, c);
            CHECK(now <= last + 1e-9);
            last = now;
        }
    }
}

TEST_CASE("throughput accounting") {
    CHECK(cad_block_survival(0.1, 2) == doctest::Approx(0.82));
    CHECK(cad_residual_error(0.1, 2) == doctest::Approx(0.012195121951).epsilon(1e-9));
    CHECK(cad_throughput(0.1, 2) == doctest::Approx(0.41 * cad_rate(0.1, 2)));
    CHECK(cad_throughput(0.0, 2) == doctest::Approx(0.5));
    for (int i = 0; i < 40; ++i) CHECK(cad_throughput(i / 100.0, 1) == doctest::Approx(cad_rate(i / 100.0, 1)));
}

TEST_CASE("optimal block size") {
    CHECK(optimize_cad(0.01, 8).block_size == 1);
    const auto mid = optimize_cad(0.15, 8);
    CHECK(mid.block_size >= 2);
    CHECK(mid.throughput > 0.0);
    CHECK(cad_throughput(0.15, 1) == 0.0);
    const auto hopeless = optimize_cad(0.49, 4);
    CHECK(hopeless.block_size == 1);
    CHECK(hopeless.throughput == 0.0);
    for (int c = 1; c <= 8; ++c) CHECK(optimize_cad(0.12, 8).throughput >= cad_throughput(0.12, c));
}

TEST_CASE("distillation of pools") {
    CHECK(distill(RawKeyPool({0, 1}), 0.02, DistillationOptions{}) == 0.0);

    // Every bit at Q = 0.15: only advantage distillation extracts key.
    RawKeyPool noisy({0, 1});
    noisy.add(0, 10000);
    CHECK(path_qber(0.3, 0) == doctest::Approx(0.15));
    CHECK(distill(noisy, 0.3, DistillationOptions{.cad = true}) > 0.0);
    CHECK(distill(noisy, 0.3, DistillationOptions{}) == 0.0);

    // Segmenting reproduces the per-class weighted rate.
    RawKeyPool mixed({0, 1});
    mixed.add(1, 750);
    mixed.add(9, 250);
    const Segment segs[] = {{0.75, path_qber(0.02, 1)}, {0.25, path_qber(0.02, 9)}};
    CHECK(distill(mixed, 0.02, DistillationOptions{.segmenting = true}) ==
          doctest::Approx(1000.0 * segmented_rate(segs)));
    CHECK(distill(mixed, 0.02, DistillationOptions{}) == doctest::Approx(1000.0 * base_rate(pooled_qber(mixed, 0.02))));
}

TEST_CASE("distillation output lies between zero and the sifted total") {
    Rng rng(6);
    for (int trial = 0; trial < 300; ++trial) {
        RawKeyPool pool({0, 1});
        for (int i = 0; i < 4; ++i) pool.add(static_cast<int>(rng.below(15)), rng.below(3000));
        const double d = 0.08 * rng.uniform();
        for (bool seg : {false, true})
            for (bool cad : {false, true}) {
                const double s = distill(pool, d, DistillationOptions{.segmenting = seg, .cad = cad});
                CHECK(s >= 0.0);
                CHECK(s <= static_cast<double>(pool.total()) + 1e-9);
            }
    }
}

TEST_CASE("distillation options are validated") {
    CHECK_THROWS_AS((DistillationOptions{.cad = true, .cad_max = 0}.validate()), ConfigError);
    CHECK_NOTHROW(DistillationOptions{}.validate());
}

}
