#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ictrace/graph.hpp"
#include "ictrace/rng.hpp"

namespace ictrace {

enum class DgpKind { walk, pairs };

inline std::string dgp_kind_name(DgpKind k) {
    return k == DgpKind::walk ? "walk" : "pairs";
}

inline DgpKind dgp_kind_from_name(const std::string& name) {
    if (name == "walk") return DgpKind::walk;
    if (name == "pairs") return DgpKind::pairs;
    throw ArgumentError("unknown dgp kind: " + name);
}

/// Token trace over graph-node ids. For walk sequences every consecutive pair
/// is an edge; for pairs sequences the tokens at (2k, 2k+1) are edges and
/// nothing is implied across pair boundaries.
struct ContextSequence {
    std::vector<int> tokens;
    DgpKind kind = DgpKind::walk;
    std::uint64_t seed = 0;
    std::string graph_ref;
};

struct PromptBatch {
    std::vector<ContextSequence> sequences;
};

/// Node index -> label string, a bijection onto a subset of the label pool.
struct Vocabulary {
    std::vector<std::string> labels;
};

inline ContextSequence sample_walk(const Graph& g, long length, int start, std::uint64_t seed) {
    if (length < 1) throw ArgumentError("sample_walk: length must be >= 1");
    if (start < 0 || start >= g.n) throw ArgumentError("sample_walk: start node out of range");
    if (length > 1 && g.adj[start].empty())
        throw ArgumentError("sample_walk: start node " + std::to_string(start) +
                            " has no neighbors");
    ContextSequence seq;
    seq.kind = DgpKind::walk;
    seq.seed = seed;
    seq.graph_ref = graph_id(g);
    seq.tokens.reserve(static_cast<std::size_t>(length));
    SplitMix64 rng(seed);
    int current = start;
    seq.tokens.push_back(current);
    for (long i = 1; i < length; ++i) {
        const auto& nb = g.adj[current];
        if (nb.empty())
            throw ArgumentError("sample_walk: stuck at isolated node " + std::to_string(current));
        current = nb[uniform_index(rng, nb.size())];
        seq.tokens.push_back(current);
    }
    return seq;
}

/// Each pair is an independent uniform edge with uniform orientation.
inline ContextSequence sample_pairs(const Graph& g, long num_pairs, std::uint64_t seed) {
    if (num_pairs < 1) throw ArgumentError("sample_pairs: need at least one pair");
    if (g.edges.empty()) throw ArgumentError("sample_pairs: graph has no edges");
    ContextSequence seq;
    seq.kind = DgpKind::pairs;
    seq.seed = seed;
    seq.graph_ref = graph_id(g);
    seq.tokens.reserve(static_cast<std::size_t>(2 * num_pairs));
    SplitMix64 rng(seed);
    for (long i = 0; i < num_pairs; ++i) {
        auto [u, v] = g.edges[uniform_index(rng, g.edges.size())];
        if (uniform_index(rng, 2) == 1) std::swap(u, v);
        seq.tokens.push_back(u);
        seq.tokens.push_back(v);
    }
    return seq;
}

/// One sequence per node so every token is guaranteed to appear in context.
/// Sequence k starts at node k (walk) or with a uniformly chosen edge incident
/// to node k (pairs). Per-sequence seeds come from derive_seed(master, k), so
/// the batch does not depend on generation order.
inline PromptBatch make_batch(const Graph& g, long length, DgpKind kind, std::uint64_t master_seed) {
    PromptBatch batch;
    batch.sequences.reserve(static_cast<std::size_t>(g.n));
    for (int k = 0; k < g.n; ++k) {
        const std::uint64_t seed = derive_seed(master_seed, static_cast<std::uint64_t>(k));
        if (kind == DgpKind::walk) {
            batch.sequences.push_back(sample_walk(g, length, k, seed));
        } else {
            const long num_pairs = length / 2;
            if (num_pairs < 1) throw ArgumentError("make_batch: pairs kind needs length >= 2");
            if (g.adj[k].empty())
                throw ArgumentError("make_batch: node " + std::to_string(k) + " has no incident edge");
            SplitMix64 rng(seed);
            ContextSequence seq;
            seq.kind = DgpKind::pairs;
            seq.seed = seed;
            seq.graph_ref = graph_id(g);
            seq.tokens.reserve(static_cast<std::size_t>(2 * num_pairs));
            int first = k;
            int second = g.adj[k][uniform_index(rng, g.adj[k].size())];
            if (uniform_index(rng, 2) == 1) std::swap(first, second);
            seq.tokens.push_back(first);
            seq.tokens.push_back(second);
            for (long i = 1; i < num_pairs; ++i) {
                auto [u, v] = g.edges[uniform_index(rng, g.edges.size())];
                if (uniform_index(rng, 2) == 1) std::swap(u, v);
                seq.tokens.push_back(u);
                seq.tokens.push_back(v);
            }
            batch.sequences.push_back(std::move(seq));
        }
    }
    return batch;
}

inline Vocabulary assign_labels(const Graph& g, const std::vector<std::string>& pool,
                                std::uint64_t seed) {
    if (static_cast<int>(pool.size()) < g.n)
        throw ArgumentError("assign_labels: pool of " + std::to_string(pool.size()) +
                            " labels is smaller than n = " + std::to_string(g.n));
    {
        std::set<std::string> distinct(pool.begin(), pool.end());
        if (distinct.size() != pool.size())
            throw ArgumentError("assign_labels: label pool contains duplicates");
    }
    std::vector<std::string> shuffled = pool;
    SplitMix64 rng(seed);
    shuffle(shuffled, rng);
    Vocabulary vocab;
    vocab.labels.assign(shuffled.begin(), shuffled.begin() + g.n);
    return vocab;
}

/// Distinct everyday words for node labels, in the spirit of naming nodes by
/// unrelated concepts. 240 entries; larger graphs need a caller-provided pool.
inline const std::vector<std::string>& default_label_pool() {
    static const std::vector<std::string> pool = {
        "apple", "sand", "math", "bird", "car", "water", "stone", "cloud", "paper", "wolf",
        "amber", "anchor", "anvil", "arrow", "ash", "atlas", "autumn", "badge", "bamboo", "barn",
        "basil", "beacon", "bell", "berry", "blade", "blanket", "bloom", "bolt", "book", "boot",
        "border", "bottle", "branch", "brass", "bread", "breeze", "brick", "bridge", "brook", "brush",
        "bucket", "bulb", "butter", "cabin", "cable", "cactus", "candle", "canyon", "carpet", "castle",
        "cedar", "chair", "chalk", "cherry", "chest", "chime", "cider", "circle", "citrus", "clay",
        "cliff", "clock", "coal", "coast", "cobalt", "coin", "comet", "copper", "coral", "cotton",
        "cradle", "crane", "crater", "crystal", "daisy", "dawn", "delta", "desert", "dew", "diamond",
        "dome", "door", "dune", "dusk", "eagle", "echo", "ember", "engine", "fable", "falcon",
        "feather", "fern", "field", "flame", "flint", "flute", "fog", "forest", "fossil", "fountain",
        "fox", "frost", "garden", "garnet", "gate", "geyser", "ginger", "glacier", "glass", "glove",
        "gorge", "grain", "granite", "grape", "grove", "hammer", "harbor", "hawk", "hazel", "heron",
        "hill", "hinge", "honey", "horizon", "iceberg", "ink", "iron", "island", "ivory", "jade",
        "jasper", "jungle", "kettle", "key", "kite", "ladder", "lagoon", "lake", "lantern", "lark",
        "lava", "leaf", "ledge", "lemon", "lily", "lime", "linen", "lion", "lotus", "lumber",
        "mantle", "maple", "marble", "meadow", "mesa", "mint", "mirror", "mist", "monsoon", "moon",
        "moss", "moth", "mountain", "mule", "nectar", "needle", "nickel", "north", "oak", "oasis",
        "ocean", "olive", "onyx", "opal", "orchard", "otter", "oven", "owl", "palm", "parchment",
        "peach", "pearl", "pebble", "pepper", "pine", "pigeon", "plain", "planet", "plum", "pond",
        "poplar", "prairie", "prism", "quarry", "quartz", "quill", "rain", "raven", "reef", "ribbon",
        "ridge", "river", "robin", "rocket", "root", "rose", "rust", "saddle", "sage", "salt",
        "sapphire", "satchel", "shadow", "shell", "shore", "silver", "sky", "slate", "smoke", "snow",
        "sparrow", "spring", "spruce", "star", "steam", "steel", "storm", "summit", "sunset", "swan",
        "thistle", "thunder", "tide", "timber", "topaz", "torch", "tower", "trail", "tulip", "valley",
    };
    return pool;
}

}  // namespace ictrace
