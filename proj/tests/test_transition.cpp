#include <catch2/catch_amalgamated.hpp>

#include "ictrace/pipeline.hpp"
#include "ictrace/transition.hpp"

using namespace ictrace;

namespace {

/// Two-slope log-log curve: y = a * x^s1 for x < knot, continuous s2 branch
/// after, with optional multiplicative log-normal-ish noise.
Curve synthetic_two_slope(double knot, double s1, double s2, const std::vector<long>& xs,
                          double noise, SplitMix64& rng) {
    Curve c;
    const double a = 0.01;
    for (long x : xs) {
        const double lx = std::log(static_cast<double>(x));
        const double lk = std::log(knot);
        double ly = std::log(a) + (lx < lk ? s1 * (lx - lk) : s2 * (lx - lk));
        if (noise > 0.0) ly += noise * standard_normal(rng);
        c.points.push_back({x, std::exp(ly)});
    }
    return c;
}

std::vector<long> log_grid(long lo, long hi, int count) { return log_spaced_lengths(lo, hi, count); }

}  // namespace

TEST_CASE("log spaced lengths") {
    const auto lengths = log_spaced_lengths(10, 1000, 10);
    REQUIRE(lengths.front() == 10);
    REQUIRE(lengths.back() == 1000);
    for (std::size_t i = 1; i < lengths.size(); ++i) REQUIRE(lengths[i] > lengths[i - 1]);
    REQUIRE_THROWS_AS(log_spaced_lengths(0, 10, 5), ArgumentError);
    REQUIRE_THROWS_AS(log_spaced_lengths(10, 5, 5), ArgumentError);
}

TEST_CASE("breakpoint fit recovers a noise-free knot") {
    SplitMix64 rng(1);
    const auto xs = log_grid(10, 10000, 30);
    const Curve c = synthetic_two_slope(100.0, 0.1, 1.2, xs, 0.0, rng);
    const BreakpointFit fit = fit_breakpoint(c);
    REQUIRE(fit.knot_x == Catch::Approx(100.0).epsilon(0.05));
    REQUIRE(fit.left_slope == Catch::Approx(0.1).margin(0.02));
    REQUIRE(fit.right_slope == Catch::Approx(1.2).margin(0.02));
    REQUIRE_FALSE(fit.degenerate_knot);
    REQUIRE(fit.sse_two_piece <= fit.sse_single_line);
}

TEST_CASE("breakpoint fit flags a single-slope line") {
    SplitMix64 rng(2);
    const auto xs = log_grid(10, 10000, 20);
    Curve c;
    for (long x : xs) c.points.push_back({x, 0.5 * std::pow(static_cast<double>(x), 0.7)});
    const BreakpointFit fit = fit_breakpoint(c);
    REQUIRE(fit.degenerate_knot);
    REQUIRE(fit.sse_two_piece == Catch::Approx(fit.sse_single_line).margin(1e-10));
}

TEST_CASE("breakpoint fit validation") {
    Curve small;
    for (long x : {1L, 2L, 3L, 4L, 5L, 6L, 7L}) small.points.push_back({x, 1.0});
    REQUIRE_THROWS_AS(fit_breakpoint(small), ArgumentError);

    Curve negative;
    for (long x : {1L, 2L, 3L, 4L, 5L, 6L, 7L, 8L}) negative.points.push_back({x, -1.0});
    REQUIRE_THROWS_AS(fit_breakpoint(negative), ArgumentError);

    SECTION("clip_positive prepares flat-zero tails") {
        Curve mixed;
        for (long x : {1L, 2L, 3L, 4L}) mixed.points.push_back({x, 0.0});
        for (long x : {5L, 6L, 7L, 8L}) mixed.points.push_back({x, 0.5});
        REQUIRE(clip_positive(mixed) == 4);
        REQUIRE(mixed.points[0].y == 1e-6);
        REQUIRE_NOTHROW(fit_breakpoint(mixed));
    }
}

TEST_CASE("breakpoint fit is scale equivariant in x") {
    SplitMix64 rng(3);
    const auto xs = log_grid(8, 4000, 24);
    const Curve base = synthetic_two_slope(60.0, 0.2, 1.0, xs, 0.0, rng);
    Curve scaled = base;
    for (auto& p : scaled.points) p.x *= 16;
    const BreakpointFit f1 = fit_breakpoint(base);
    const BreakpointFit f2 = fit_breakpoint(scaled);
    REQUIRE(std::log(f2.knot_x) - std::log(f1.knot_x) ==
            Catch::Approx(std::log(16.0)).margin(1e-9));
}

TEST_CASE("knot recovery under multiplicative noise") {
    SplitMix64 rng(404);
    std::vector<double> relative_errors;
    const auto xs = log_grid(10, 20000, 30);
    for (int trial = 0; trial < 100; ++trial) {
        // knot inside the interior third of the log range
        const double lo = std::log(10.0), hi = std::log(20000.0);
        const double lk = lo + (hi - lo) * (1.0 / 3.0 + uniform_real01(rng) / 3.0);
        const double knot = std::exp(lk);
        const double s1 = 0.05 + 0.25 * uniform_real01(rng);
        const double s2 = 0.8 + 0.7 * uniform_real01(rng);
        const Curve c = synthetic_two_slope(knot, s1, s2, xs, 0.03, rng);
        const BreakpointFit fit = fit_breakpoint(c);
        relative_errors.push_back(std::abs(fit.knot_x - knot) / knot);
    }
    REQUIRE(median(relative_errors) <= 0.10);
}

TEST_CASE("power law fit") {
    SECTION("exact recovery") {
        std::vector<std::pair<double, double>> pts;
        for (double n : {9.0, 16.0, 25.0, 36.0, 49.0})
            pts.emplace_back(n, 3.0 * std::pow(n, 0.5));
        const PowerLawFit fit = fit_power_law(pts);
        REQUIRE(fit.exponent == Catch::Approx(0.5).margin(1e-12));
        REQUIRE(fit.prefactor == Catch::Approx(3.0).margin(1e-10));
        REQUIRE(fit.r2 == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("noisy exponent stays near truth") {
        std::vector<double> exponents;
        for (std::uint64_t seed = 0; seed < 21; ++seed) {
            SplitMix64 rng(seed);
            std::vector<std::pair<double, double>> pts;
            for (double n : {9.0, 16.0, 25.0, 36.0, 49.0, 64.0}) {
                const double noise = 1.0 + 0.05 * (2.0 * uniform_real01(rng) - 1.0);
                pts.emplace_back(n, 2.0 * std::pow(n, 0.65) * noise);
            }
            exponents.push_back(fit_power_law(pts).exponent);
        }
        REQUIRE(median(exponents) >= 0.55);
        REQUIRE(median(exponents) <= 0.75);
    }

    SECTION("prefactor absorbs rescaling, exponent unchanged") {
        std::vector<std::pair<double, double>> pts, scaled;
        for (double n : {10.0, 20.0, 40.0}) {
            pts.emplace_back(n, 5.0 * std::pow(n, 0.8));
            scaled.emplace_back(n, 35.0 * std::pow(n, 0.8));
        }
        REQUIRE(fit_power_law(pts).exponent ==
                Catch::Approx(fit_power_law(scaled).exponent).margin(1e-12));
    }

    SECTION("validation") {
        REQUIRE_THROWS_AS(fit_power_law({{1.0, 1.0}, {2.0, 2.0}}), ArgumentError);
        REQUIRE_THROWS_AS(fit_power_law({{1.0, 1.0}, {2.0, -2.0}, {3.0, 3.0}}), ArgumentError);
    }
}

TEST_CASE("coverage transition") {
    SECTION("ring of three nodes connects within a total batch length of six") {
        const auto res = coverage_transition(build_ring(3), DgpKind::walk, 1.0, 30, 5);
        for (long total : res.per_seed) {
            REQUIRE(total >= 4);  // three starts plus at least one transition
            REQUIRE(total <= 6);
        }
    }

    SECTION("transition length grows with ring size") {
        double previous = 0.0;
        for (int n : {6, 12, 24, 48}) {
            const auto res = coverage_transition(build_ring(n), DgpKind::walk, 1.0, 50, 7);
            REQUIRE(res.median_length >= previous);
            previous = res.median_length;
        }
    }

    SECTION("higher thresholds never trigger earlier, per seed") {
        const Graph g = build_square_grid(4);
        const auto low = coverage_transition(g, DgpKind::walk, 0.5, 25, 9);
        const auto high = coverage_transition(g, DgpKind::walk, 1.0, 25, 9);
        for (std::size_t i = 0; i < low.per_seed.size(); ++i)
            REQUIRE(low.per_seed[i] <= high.per_seed[i]);
    }

    SECTION("pairs kind works and respects pair boundaries") {
        const auto res = coverage_transition(build_ring(8), DgpKind::pairs, 1.0, 20, 3);
        REQUIRE(res.median_length >= 2.0);
    }

    SECTION("unreachable threshold times out") {
        REQUIRE_THROWS_AS(coverage_transition(build_ring(64), DgpKind::walk, 1.0, 1, 0, 2),
                          NumericError);
    }

    SECTION("validation") {
        REQUIRE_THROWS_AS(coverage_transition(build_ring(5), DgpKind::walk, 0.0, 5), ArgumentError);
        const Graph disconnected = make_graph(4, {{0, 1}, {2, 3}});
        REQUIRE_THROWS_AS(coverage_transition(disconnected, DgpKind::walk, 1.0, 5), ArgumentError);
    }
}

TEST_CASE("scaling experiment over small grids") {
    ScalingOptions opts;
    opts.num_seeds = 20;
    const ScalingResult res = scaling_experiment(GraphFamily::square_grid, {3, 4, 5}, DgpKind::walk,
                                                 ScalingMetric::coverage, opts);
    REQUIRE(res.per_size.size() == 3);
    REQUIRE(res.per_size[0].n_nodes == 9);
    REQUIRE(res.per_size[2].n_nodes == 25);
    REQUIRE(res.fit.points.size() == 3);
    REQUIRE(res.per_size[0].t_c <= res.per_size[2].t_c);

    REQUIRE_THROWS_AS(scaling_experiment(GraphFamily::square_grid, {3, 4}, DgpKind::walk,
                                         ScalingMetric::coverage, opts),
                      ArgumentError);
}
