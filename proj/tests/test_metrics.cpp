#include <catch2/catch_amalgamated.hpp>

#include "ictrace/linalg.hpp"
#include "ictrace/metrics.hpp"
#include "ictrace/rng.hpp"

using namespace ictrace;

namespace {

double simulate_seen(int n, long l, int min_count, long trials, std::uint64_t seed) {
    SplitMix64 rng(seed);
    long hits = 0;
    for (long t = 0; t < trials; ++t) {
        int count = 0;
        for (long i = 0; i < l; ++i)
            if (uniform_index(rng, static_cast<std::size_t>(n)) == 0) ++count;
        if (count >= min_count) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(trials);
}

}  // namespace

TEST_CASE("rule following accuracy") {
    const Graph ring = build_ring(5);
    PredictionDistribution dist;
    dist.probs = {0.1, 0.3, 0.1, 0.1, 0.4};  // neighbors of 0 are {1, 4}
    validate(dist);
    REQUIRE(rule_following_accuracy(ring, 0, dist) == Catch::Approx(0.7));

    PredictionDistribution uniform;
    uniform.probs.assign(5, 0.2);
    REQUIRE(rule_following_accuracy(ring, 2, uniform) == Catch::Approx(2.0 / 5.0));

    SECTION("equals one minus the mass off the neighborhood") {
        double off = 0.0;
        for (int u = 0; u < 5; ++u)
            if (!ring.has_edge(0, u)) off += dist.probs[static_cast<std::size_t>(u)];
        REQUIRE(rule_following_accuracy(ring, 0, dist) == Catch::Approx(1.0 - off));
    }

    SECTION("validation") {
        PredictionDistribution bad;
        bad.probs = {0.5, 0.6};
        REQUIRE_THROWS_AS(validate(bad), ArgumentError);
        bad.probs = {-0.1, 1.1};
        REQUIRE_THROWS_AS(validate(bad), ArgumentError);
    }
}

TEST_CASE("memorization probabilities") {
    SECTION("edge cases") {
        REQUIRE(p_seen1(10, 0) == 0.0);
        REQUIRE(p_seen1(1, 1) == 1.0);
        REQUIRE(p_seen2(10, 0) == 0.0);
        REQUIRE(p_seen2(10, 1) == Catch::Approx(0.0).margin(1e-15));
    }

    SECTION("spot values at n = 50, l = 50") {
        REQUIRE(p_seen1(50, 50) == Catch::Approx(0.6358).margin(5e-4));
        REQUIRE(p_seen2(50, 50) == Catch::Approx(0.2641).margin(5e-4));
    }

    SECTION("monte carlo agreement within 0.01") {
        for (int n : {10, 50}) {
            for (long l : {1L, static_cast<long>(n / 2), static_cast<long>(n),
                           static_cast<long>(5 * n)}) {
                const double sim1 = simulate_seen(n, l, 1, 100000, 17);
                const double sim2 = simulate_seen(n, l, 2, 100000, 18);
                REQUIRE(sim1 == Catch::Approx(p_seen1(n, l)).margin(0.01));
                REQUIRE(sim2 == Catch::Approx(p_seen2(n, l)).margin(0.01));
            }
        }
    }

    SECTION("curves are monotone and ordered") {
        std::vector<long> lengths;
        for (long l = 1; l <= 10000; l *= 2) lengths.push_back(l);
        const auto [seen1, seen2] = memorization_curves(50, lengths);
        for (std::size_t i = 0; i < lengths.size(); ++i) {
            if (i > 0) {
                REQUIRE(seen1.points[i].y >= seen1.points[i - 1].y);
                REQUIRE(seen2.points[i].y >= seen2.points[i - 1].y);
            }
            REQUIRE(seen2.points[i].y <= seen1.points[i].y + 1e-15);
        }
        REQUIRE(seen1.points.back().y == Catch::Approx(1.0).margin(1e-3));
        REQUIRE_THROWS_AS(memorization_curves(50, {5, 5}), ArgumentError);
    }
}

TEST_CASE("pc rescaling intervention") {
    SplitMix64 rng(33);
    const int d = 12;
    const Matrix basis = random_orthonormal(d, 3, 5);
    Vector h(d), target(d);
    for (int i = 0; i < d; ++i) {
        h(i) = standard_normal(rng);
        target(i) = standard_normal(rng);
    }

    const Vector moved = rescale_pc_intervention(h, target, basis);

    SECTION("projections match the target") {
        for (int m = 0; m < 3; ++m)
            REQUIRE(moved.dot(basis.col(m)) ==
                    Catch::Approx(target.dot(basis.col(m))).margin(1e-10));
    }

    SECTION("orthogonal complement is untouched") {
        Vector residual_before = h;
        Vector residual_after = moved;
        for (int m = 0; m < 3; ++m) {
            residual_before -= h.dot(basis.col(m)) * basis.col(m);
            residual_after -= moved.dot(basis.col(m)) * basis.col(m);
        }
        REQUIRE((residual_before - residual_after).norm() < 1e-10);
    }

    SECTION("idempotence") {
        const Vector twice = rescale_pc_intervention(moved, target, basis);
        REQUIRE((twice - moved).norm() < 1e-10);
    }

    SECTION("rejects a non-orthonormal basis") {
        Matrix skew = basis;
        skew.col(0) *= 2.0;
        REQUIRE_THROWS_AS(rescale_pc_intervention(h, target, skew), ArgumentError);
    }
}

TEST_CASE("hit at k") {
    const Graph ring = build_ring(5);

    PredictionDistribution all_on_neighbor;
    all_on_neighbor.probs = {0.0, 1.0, 0.0, 0.0, 0.0};
    REQUIRE(hit_at_k(ring, 0, all_on_neighbor, 1) == 1);

    PredictionDistribution all_on_self;
    all_on_self.probs = {1.0, 0.0, 0.0, 0.0, 0.0};
    REQUIRE(hit_at_k(ring, 0, all_on_self, 1) == 0);

    PredictionDistribution uniform;
    uniform.probs.assign(5, 0.2);
    REQUIRE(hit_at_k(ring, 0, uniform, 5) == 1);

    SECTION("ties break toward the lower index") {
        // nodes 0 and 2 tie; k = 1 must consider node 0 first
        PredictionDistribution tie;
        tie.probs = {0.5, 0.0, 0.5, 0.0, 0.0};
        REQUIRE(hit_at_k(ring, 1, tie, 1) == 1);   // 0 is a neighbor of 1
        REQUIRE(hit_at_k(ring, 3, tie, 1) == 0);   // 2 would hit, but 0 sorts first
        REQUIRE(hit_at_k(ring, 3, tie, 2) == 1);
    }

    REQUIRE_THROWS_AS(hit_at_k(ring, 0, uniform, 0), ArgumentError);
}

TEST_CASE("probability mass on target neighbors") {
    const Graph ring = build_ring(5);
    PredictionDistribution dist;
    dist.probs = {0.1, 0.3, 0.1, 0.1, 0.4};
    REQUIRE(prob_mass_on_neighbors(ring, 0, dist) == Catch::Approx(0.7));
    REQUIRE(prob_mass_on_neighbors(ring, 2, dist) == Catch::Approx(0.4));
    PredictionDistribution uniform;
    uniform.probs.assign(5, 0.2);
    REQUIRE(prob_mass_on_neighbors(ring, 3, uniform) == Catch::Approx(0.4));
}
