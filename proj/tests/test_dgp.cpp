#include <map>
#include <set>

#include <catch2/catch_amalgamated.hpp>

#include "ictrace/dgp.hpp"
#include "ictrace/io.hpp"
#include "ictrace/rng.hpp"

using namespace ictrace;

namespace {

Graph random_connected_graph(int n, double extra_edge_prob, SplitMix64& rng) {
    std::vector<std::pair<int, int>> edges;
    for (int v = 1; v < n; ++v)
        edges.emplace_back(static_cast<int>(uniform_index(rng, static_cast<std::size_t>(v))), v);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (uniform_real01(rng) < extra_edge_prob) edges.emplace_back(u, v);
    return make_graph(n, std::move(edges));
}

}  // namespace

TEST_CASE("walk validity on fixed graphs") {
    const Graph ring = build_ring(3);
    const ContextSequence seq = sample_walk(ring, 5, 0, 7);
    REQUIRE(seq.tokens.size() == 5);
    REQUIRE(seq.tokens[0] == 0);
    for (std::size_t i = 0; i + 1 < seq.tokens.size(); ++i)
        REQUIRE(ring.has_edge(seq.tokens[i], seq.tokens[i + 1]));
}

TEST_CASE("walk validity property over random graphs") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 4 + static_cast<int>(uniform_index(rng, 12));
        const Graph g = random_connected_graph(n, 0.2, rng);
        const int start = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(n)));
        const long length = 2 + static_cast<long>(uniform_index(rng, 60));
        const ContextSequence seq = sample_walk(g, length, start, rng());
        REQUIRE(static_cast<long>(seq.tokens.size()) == length);
        for (std::size_t i = 0; i + 1 < seq.tokens.size(); ++i)
            REQUIRE(g.has_edge(seq.tokens[i], seq.tokens[i + 1]));
    }
}

TEST_CASE("walk determinism and errors") {
    const Graph grid = build_square_grid(4);
    const ContextSequence a = sample_walk(grid, 50, 3, 99);
    const ContextSequence b = sample_walk(grid, 50, 3, 99);
    REQUIRE(a.tokens == b.tokens);
    REQUIRE(sample_walk(grid, 50, 3, 100).tokens != a.tokens);

    const Graph lonely = make_graph(2, {});
    REQUIRE_THROWS_AS(sample_walk(lonely, 3, 0, 1), ArgumentError);
    REQUIRE_THROWS_AS(sample_walk(grid, 0, 0, 1), ArgumentError);
    REQUIRE_THROWS_AS(sample_walk(grid, 5, 99, 1), ArgumentError);
}

TEST_CASE("walk visit frequency favors inner grid nodes") {
    const Graph grid = build_square_grid(4);
    const ContextSequence seq = sample_walk(grid, 100000, 0, 5);
    std::vector<long> visits(16, 0);
    for (int t : seq.tokens) ++visits[static_cast<std::size_t>(t)];
    // inner 2x2 block: nodes (1,1), (1,2), (2,1), (2,2) = 5, 6, 9, 10
    const double inner = static_cast<double>(visits[5] + visits[6] + visits[9] + visits[10]) / 4.0;
    const double corner = static_cast<double>(visits[0] + visits[3] + visits[12] + visits[15]) / 4.0;
    REQUIRE(inner > corner);
}

TEST_CASE("ring walk long-run frequencies approach uniform") {
    const Graph ring = build_ring(10);
    const long length = 100000;
    std::vector<double> max_errors;
    for (std::uint64_t seed = 0; seed < 11; ++seed) {
        const ContextSequence seq = sample_walk(ring, length, 0, seed);
        std::vector<long> visits(10, 0);
        for (int t : seq.tokens) ++visits[static_cast<std::size_t>(t)];
        double worst = 0.0;
        for (long v : visits)
            worst = std::max(worst, std::abs(static_cast<double>(v) / length - 0.1));
        max_errors.push_back(worst);
    }
    std::sort(max_errors.begin(), max_errors.end());
    REQUIRE(max_errors[max_errors.size() / 2] <= 2.0 / std::sqrt(static_cast<double>(length)));
}

TEST_CASE("pair sampler") {
    const Graph ring4 = build_ring(4);

    SECTION("single pair is a uniformly oriented edge") {
        std::map<std::pair<int, int>, long> counts;
        const long trials = 40000;
        for (long t = 0; t < trials; ++t) {
            const ContextSequence seq = sample_pairs(ring4, 1, 1000 + static_cast<std::uint64_t>(t));
            REQUIRE(seq.tokens.size() == 2);
            REQUIRE(ring4.has_edge(seq.tokens[0], seq.tokens[1]));
            ++counts[{seq.tokens[0], seq.tokens[1]}];
        }
        REQUIRE(counts.size() == 8);  // 4 edges x 2 orientations
        for (const auto& [key, count] : counts) {
            const double freq = static_cast<double>(count) / trials;
            REQUIRE(freq == Catch::Approx(0.125).margin(0.01));
        }
    }

    SECTION("1000 pairs cover every ring-10 edge") {
        const Graph ring10 = build_ring(10);
        const ContextSequence seq = sample_pairs(ring10, 1000, 42);
        std::set<std::pair<int, int>> seen;
        for (std::size_t i = 0; i + 1 < seq.tokens.size(); i += 2)
            seen.emplace(std::min(seq.tokens[i], seq.tokens[i + 1]),
                         std::max(seq.tokens[i], seq.tokens[i + 1]));
        REQUIRE(seen.size() == 10);
    }

    SECTION("determinism and errors") {
        REQUIRE(sample_pairs(ring4, 7, 5).tokens == sample_pairs(ring4, 7, 5).tokens);
        REQUIRE_THROWS_AS(sample_pairs(make_graph(3, {}), 1, 0), ArgumentError);
        REQUIRE_THROWS_AS(sample_pairs(ring4, 0, 0), ArgumentError);
    }
}

TEST_CASE("pair sampler marginals proportional to degree") {
    const Graph grid = build_square_grid(3);  // degrees 2, 3, 4
    const long num_pairs = 60000;
    const ContextSequence seq = sample_pairs(grid, num_pairs, 11);
    std::vector<long> counts(static_cast<std::size_t>(grid.n), 0);
    for (int t : seq.tokens) ++counts[static_cast<std::size_t>(t)];
    const double total = static_cast<double>(2 * num_pairs);
    const double edge2 = 2.0 * static_cast<double>(grid.edges.size());
    for (int v = 0; v < grid.n; ++v) {
        const double expected = static_cast<double>(grid.degree(v)) / edge2;
        const double freq = static_cast<double>(counts[static_cast<std::size_t>(v)]) / total;
        const double sigma = std::sqrt(expected * (1.0 - expected) / total);
        REQUIRE(std::abs(freq - expected) <= 5.0 * sigma);
    }
}

TEST_CASE("prompt batch") {
    const Graph grid = build_square_grid(2);
    const PromptBatch batch = make_batch(grid, 3, DgpKind::walk, 1);
    REQUIRE(batch.sequences.size() == 4);
    for (int k = 0; k < 4; ++k) REQUIRE(batch.sequences[static_cast<std::size_t>(k)].tokens[0] == k);

    SECTION("every node appears across the batch") {
        const Graph ring = build_ring(10);
        const PromptBatch b = make_batch(ring, 4, DgpKind::walk, 9);
        std::set<int> seen;
        for (const auto& seq : b.sequences)
            seen.insert(seq.tokens.begin(), seq.tokens.end());
        REQUIRE(seen.size() == 10);
    }

    SECTION("pairs batch starts with an edge incident to the start node") {
        const Graph ring = build_ring(10);
        const PromptBatch b = make_batch(ring, 8, DgpKind::pairs, 3);
        for (int k = 0; k < ring.n; ++k) {
            const auto& t = b.sequences[static_cast<std::size_t>(k)].tokens;
            REQUIRE(t.size() == 8);
            REQUIRE((t[0] == k || t[1] == k));
            REQUIRE(ring.has_edge(t[0], t[1]));
            for (std::size_t i = 0; i + 1 < t.size(); i += 2) REQUIRE(ring.has_edge(t[i], t[i + 1]));
        }
    }

    SECTION("per-sequence seeds derive from the master seed") {
        const Graph ring = build_ring(6);
        const PromptBatch a = make_batch(ring, 20, DgpKind::walk, 77);
        const PromptBatch b = make_batch(ring, 20, DgpKind::walk, 77);
        for (int k = 0; k < 6; ++k) {
            REQUIRE(a.sequences[static_cast<std::size_t>(k)].tokens ==
                    b.sequences[static_cast<std::size_t>(k)].tokens);
            REQUIRE(a.sequences[static_cast<std::size_t>(k)].seed ==
                    derive_seed(77, static_cast<std::uint64_t>(k)));
        }
    }
}

TEST_CASE("label assignment") {
    const Graph g = build_ring(3);
    const std::vector<std::string> pool = {"apple", "sand", "math"};
    const Vocabulary vocab = assign_labels(g, pool, 4);
    std::set<std::string> used(vocab.labels.begin(), vocab.labels.end());
    REQUIRE(used.size() == 3);
    REQUIRE(used == std::set<std::string>(pool.begin(), pool.end()));

    REQUIRE(assign_labels(g, pool, 4).labels == vocab.labels);
    REQUIRE_THROWS_AS(assign_labels(build_ring(4), pool, 0), ArgumentError);
    REQUIRE_THROWS_AS(assign_labels(g, {"a", "a", "b"}, 0), ArgumentError);

    const Graph g16 = build_square_grid(4);
    std::vector<std::string> pool16;
    for (int i = 0; i < 16; ++i) pool16.push_back("w" + std::to_string(i));
    const Vocabulary v16 = assign_labels(g16, pool16, 8);
    REQUIRE(std::set<std::string>(v16.labels.begin(), v16.labels.end()).size() == 16);
}

TEST_CASE("default label pool is duplicate-free") {
    const auto& pool = default_label_pool();
    REQUIRE(pool.size() >= 200);
    REQUIRE(std::set<std::string>(pool.begin(), pool.end()).size() == pool.size());
}

TEST_CASE("context jsonl round trip is byte identical") {
    const Graph ring = build_ring(5);
    const PromptBatch batch = make_batch(ring, 12, DgpKind::pairs, 17);
    const Vocabulary vocab = assign_labels(ring, default_label_pool(), 2);

    std::string first;
    for (const auto& seq : batch.sequences) first += encode_context_line(seq, &vocab) + "\n";

    std::string second;
    std::istringstream in(first);
    std::string line;
    while (std::getline(in, line)) {
        const DecodedContext d = decode_context_line(line);
        Vocabulary dummy;  // rebuild labels exactly as decoded
        REQUIRE(d.labels.size() == d.sequence.tokens.size());
        nlohmann::json j;
        j["graph"] = d.sequence.graph_ref;
        j["kind"] = dgp_kind_name(d.sequence.kind);
        j["seed"] = d.sequence.seed;
        j["tokens"] = d.sequence.tokens;
        j["labels"] = d.labels;
        second += j.dump() + "\n";
    }
    REQUIRE(first == second);
}
