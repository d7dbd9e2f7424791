#pragma once

#include <set>
#include <utility>
#include <vector>

#include "ictrace/dgp.hpp"
#include "ictrace/graph.hpp"
#include "ictrace/spectral.hpp"

namespace ictrace {

/// Synthetic learner that accumulates the edges it has seen in context and
/// exposes representations built from the observed graph's energy minimizers.
/// Stands in for a model when no activation dump is available.
struct OracleState {
    int n = 0;
    int embed_dim = 3;
    double noise_scale = 0.05;
    std::uint64_t seed = 0;
    std::set<std::pair<int, int>> observed_edges;  // normalized (u < v)
};

inline OracleState make_oracle(int n, int embed_dim = 3, double noise_scale = 0.05,
                               std::uint64_t seed = 0) {
    if (n < 1) throw ArgumentError("make_oracle: need n >= 1");
    if (embed_dim < 2) throw ArgumentError("make_oracle: need embed_dim >= 2");
    if (noise_scale < 0.0) throw ArgumentError("make_oracle: noise_scale must be >= 0");
    return {n, embed_dim, noise_scale, seed, {}};
}

inline void observe_edge(OracleState& state, int u, int v) {
    if (u == v) return;
    if (u < 0 || u >= state.n || v < 0 || v >= state.n)
        throw ArgumentError("oracle: token id out of range");
    state.observed_edges.emplace(std::min(u, v), std::max(u, v));
}

/// Adds every consecutive edge of a walk, or every within-pair edge of a
/// pairs sequence, to the observed graph.
inline OracleState oracle_update(OracleState state, const ContextSequence& context) {
    const auto& t = context.tokens;
    if (context.kind == DgpKind::walk) {
        for (std::size_t i = 0; i + 1 < t.size(); ++i) observe_edge(state, t[i], t[i + 1]);
    } else {
        for (std::size_t i = 0; i + 1 < t.size(); i += 2) observe_edge(state, t[i], t[i + 1]);
    }
    return state;
}

inline Graph observed_graph(const OracleState& state) {
    return make_graph(state.n, {state.observed_edges.begin(), state.observed_edges.end()});
}

/// Representation table from the observed structure. Tokens inside observed
/// components of size >= 2 take coordinates from those components' energy
/// minimizers z^(2) .. z^(embed_dim + 1), column j weighted by
/// (embed_dim - j); every other token is left at zero. Gaussian noise of
/// scale noise_scale is added to all rows, so isolated and unseen tokens end
/// up as pure noise. The noise draw depends only on the state seed, never on
/// what has been observed, which keeps energy comparisons across context
/// lengths free of resampling artifacts.
inline ReprTable oracle_reprs(const OracleState& state, int n) {
    if (n != state.n) throw ArgumentError("oracle_reprs: n does not match oracle state");
    const int d = state.embed_dim;
    Matrix h = Matrix::Zero(n, d);

    const Graph observed = observed_graph(state);
    const ComponentDecomposition comps = connected_components(observed);
    std::vector<int> kept;
    for (const auto& comp : comps.component_sets)
        if (comp.size() >= 2) kept.insert(kept.end(), comp.begin(), comp.end());
    std::sort(kept.begin(), kept.end());

    if (!kept.empty()) {
        const Graph sub = induced_subgraph(observed, kept);
        const int k = std::min(d + 1, sub.n);
        const SpectralBasis basis = energy_minimizers(sub, k);
        for (int j = 1; j < k; ++j) {
            const double weight = static_cast<double>(d - (j - 1));
            for (std::size_t row = 0; row < kept.size(); ++row)
                h(kept[row], j - 1) = weight * basis.vectors(static_cast<Eigen::Index>(row), j);
        }
    }

    if (state.noise_scale > 0.0) {
        SplitMix64 rng(derive_seed(state.seed, 0x6e6f697365ull));  // noise stream
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j) h(i, j) += state.noise_scale * standard_normal(rng);
    }
    return repr_table_from_matrix(std::move(h));
}

/// Uniform distribution over the observed neighbors of `current`; uniform
/// over all nodes when nothing about `current` has been observed.
inline std::vector<double> oracle_predict(const OracleState& state, int current, int n) {
    if (n != state.n) throw ArgumentError("oracle_predict: n does not match oracle state");
    if (current < 0 || current >= n) throw ArgumentError("oracle_predict: node out of range");
    std::vector<double> probs(static_cast<std::size_t>(n), 0.0);
    std::vector<int> observed_neighbors;
    for (const auto& [u, v] : state.observed_edges) {
        if (u == current) observed_neighbors.push_back(v);
        else if (v == current) observed_neighbors.push_back(u);
    }
    if (observed_neighbors.empty()) {
        std::fill(probs.begin(), probs.end(), 1.0 / n);
    } else {
        const double p = 1.0 / static_cast<double>(observed_neighbors.size());
        for (int u : observed_neighbors) probs[static_cast<std::size_t>(u)] = p;
    }
    return probs;
}

}  // namespace ictrace
