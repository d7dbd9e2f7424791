#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ictrace/dgp.hpp"
#include "ictrace/graph.hpp"
#include "ictrace/metrics.hpp"
#include "ictrace/oracle.hpp"
#include "ictrace/spectral.hpp"
#include "ictrace/transition.hpp"

namespace ictrace {

inline std::vector<long> log_spaced_lengths(long lo, long hi, int count) {
    if (lo < 1 || hi < lo || count < 2)
        throw ArgumentError("log_spaced_lengths: need 1 <= lo <= hi and count >= 2");
    std::vector<long> out;
    const double llo = std::log(static_cast<double>(lo));
    const double lhi = std::log(static_cast<double>(hi));
    for (int i = 0; i < count; ++i) {
        const double t = llo + (lhi - llo) * static_cast<double>(i) / (count - 1);
        const long v = std::lround(std::exp(t));
        if (out.empty() || v > out.back()) out.push_back(std::max<long>(lo, v));
    }
    if (out.back() != hi) out.push_back(hi);
    return out;
}

inline double median(std::vector<double> v) {
    if (v.empty()) throw ArgumentError("median: empty input");
    std::sort(v.begin(), v.end());
    const std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

/// Indexed parallel loop; every index writes only its own slot so the result
/// does not depend on scheduling.
template <typename Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
    jobs = std::clamp(jobs, 1, count);
    if (jobs <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int t = 0; t < jobs; ++t) {
        workers.emplace_back([&]() {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
}

namespace detail {

/// Feeds tokens [from, to) of a sequence into the oracle, adding exactly the
/// edges oracle_update(prefix-to) would have added beyond prefix-from.
inline void observe_range(OracleState& state, const ContextSequence& seq, long from, long to) {
    const auto& t = seq.tokens;
    to = std::min<long>(to, static_cast<long>(t.size()));
    if (seq.kind == DgpKind::walk) {
        for (long i = std::max<long>(from, 1); i < to; ++i)
            observe_edge(state, t[static_cast<std::size_t>(i - 1)], t[static_cast<std::size_t>(i)]);
    } else {
        for (long i = std::max<long>(from, 1); i < to; ++i)
            if (i % 2 == 1)
                observe_edge(state, t[static_cast<std::size_t>(i - 1)], t[static_cast<std::size_t>(i)]);
    }
}

}  // namespace detail

/// How well a learner state predicts around the whole graph: rule-following
/// accuracy averaged over every node as the query node. Querying only the
/// final context position would be trivially right for an edge-accumulating
/// learner (it just saw that transition), so this probes unvisited regions
/// too, which is what makes the emergence visible.
inline double node_averaged_accuracy(const Graph& g, const OracleState& state) {
    double total = 0.0;
    for (int v = 0; v < g.n; ++v) {
        PredictionDistribution dist;
        dist.probs = oracle_predict(state, v, g.n);
        total += rule_following_accuracy(g, v, dist);
    }
    return total / static_cast<double>(g.n);
}

struct OracleCurveOptions {
    std::vector<long> lengths;  // ascending evaluation points
    int embed_dim = 3;
    double noise = 0.05;
    int pca_components = 2;
    int jobs = 1;
};

struct SeedCurves {
    std::uint64_t seed = 0;
    std::vector<double> energy_ordered;
    std::vector<double> energy_quadratic;
    std::vector<double> energy_standardized;
    std::vector<double> accuracy;
    std::vector<std::pair<double, double>> cosines;  // |cos| vs z2, z3 per length
};

struct OracleRunResult {
    std::vector<long> lengths;
    std::vector<SeedCurves> per_seed;
    Curve median_accuracy;
    Curve median_energy_ordered;
    Curve median_energy_quadratic;
    Curve median_energy_standardized;
    std::vector<Matrix> pca_scores_first_seed;  // per length, n x pca_components
};

/// Replays each batch through the synthetic learner and records energy,
/// accuracy, PCA, and cosine diagnostics at every requested context length.
/// Representations pool the whole batch (one shared observed graph), while
/// accuracy uses per-sequence observations, mirroring per-prompt prediction.
inline OracleRunResult run_oracle_curves(const Graph& g, const std::vector<PromptBatch>& batches,
                                         const std::vector<std::uint64_t>& batch_seeds,
                                         const OracleCurveOptions& opts) {
    if (batches.empty()) throw ArgumentError("run_oracle_curves: no batches");
    if (batches.size() != batch_seeds.size())
        throw ArgumentError("run_oracle_curves: need one seed per batch");
    if (opts.lengths.empty()) throw ArgumentError("run_oracle_curves: no evaluation lengths");
    for (std::size_t i = 1; i < opts.lengths.size(); ++i)
        if (opts.lengths[i] <= opts.lengths[i - 1])
            throw ArgumentError("run_oracle_curves: lengths must be strictly increasing");

    OracleRunResult result;
    result.lengths = opts.lengths;
    result.per_seed.resize(batches.size());
    result.pca_scores_first_seed.resize(opts.lengths.size());

    parallel_for(static_cast<int>(batches.size()), opts.jobs, [&](int bi) {
        const PromptBatch& batch = batches[static_cast<std::size_t>(bi)];
        if (static_cast<int>(batch.sequences.size()) != g.n)
            throw ArgumentError("run_oracle_curves: batch size must equal node count");
        SeedCurves curves;
        curves.seed = batch_seeds[static_cast<std::size_t>(bi)];

        OracleState pooled = make_oracle(g.n, opts.embed_dim, opts.noise, curves.seed);
        std::vector<OracleState> per_sequence(
            static_cast<std::size_t>(g.n), make_oracle(g.n, opts.embed_dim, opts.noise, curves.seed));

        long done = 0;
        for (std::size_t li = 0; li < opts.lengths.size(); ++li) {
            const long l = opts.lengths[li];
            for (int k = 0; k < g.n; ++k) {
                detail::observe_range(pooled, batch.sequences[static_cast<std::size_t>(k)], done, l);
                detail::observe_range(per_sequence[static_cast<std::size_t>(k)],
                                      batch.sequences[static_cast<std::size_t>(k)], done, l);
            }
            done = l;

            const ReprTable table = oracle_reprs(pooled, g.n);
            curves.energy_ordered.push_back(
                dirichlet_energy(g, table, EnergyConvention::ordered_pair_sum).value);
            curves.energy_quadratic.push_back(
                dirichlet_energy(g, table, EnergyConvention::laplacian_quadratic).value);
            curves.energy_standardized.push_back(standardized_energy(g, table).value);

            double acc = 0.0;
            for (int k = 0; k < g.n; ++k)
                acc += node_averaged_accuracy(g, per_sequence[static_cast<std::size_t>(k)]);
            curves.accuracy.push_back(acc / static_cast<double>(g.n));

            curves.cosines.push_back(cosine_to_spectral(table, g));
            if (bi == 0) {
                const int k = std::min<int>(opts.pca_components,
                                            static_cast<int>(std::min<Eigen::Index>(
                                                table.values.rows() - 1, table.values.cols())));
                result.pca_scores_first_seed[li] = pca(table, k).scores;
            }
        }
        result.per_seed[static_cast<std::size_t>(bi)] = std::move(curves);
    });

    auto median_curve = [&](auto getter, const std::string& tag) {
        Curve c;
        c.tag = tag;
        for (std::size_t li = 0; li < opts.lengths.size(); ++li) {
            std::vector<double> vals;
            for (const auto& sc : result.per_seed) vals.push_back(getter(sc, li));
            c.points.push_back({opts.lengths[li], median(vals)});
        }
        return c;
    };
    result.median_accuracy = median_curve(
        [](const SeedCurves& s, std::size_t i) { return s.accuracy[i]; }, "accuracy");
    result.median_energy_ordered = median_curve(
        [](const SeedCurves& s, std::size_t i) { return s.energy_ordered[i]; }, "energy_ordered");
    result.median_energy_quadratic = median_curve(
        [](const SeedCurves& s, std::size_t i) { return s.energy_quadratic[i]; },
        "energy_quadratic");
    result.median_energy_standardized = median_curve(
        [](const SeedCurves& s, std::size_t i) { return s.energy_standardized[i]; },
        "energy_standardized");
    return result;
}

/// Convenience wrapper: generate one batch per master seed, then run.
inline OracleRunResult run_oracle_pipeline(const Graph& g, DgpKind kind,
                                           const std::vector<std::uint64_t>& seeds,
                                           const OracleCurveOptions& opts) {
    if (opts.lengths.empty()) throw ArgumentError("run_oracle_pipeline: no lengths");
    const long max_len = opts.lengths.back();
    std::vector<PromptBatch> batches(seeds.size());
    parallel_for(static_cast<int>(seeds.size()), opts.jobs, [&](int i) {
        batches[static_cast<std::size_t>(i)] =
            make_batch(g, max_len, kind, seeds[static_cast<std::size_t>(i)]);
    });
    return run_oracle_curves(g, batches, seeds, opts);
}

// ---------------------------------------------------------------------------
// Graph-size scaling
// ---------------------------------------------------------------------------

enum class GraphFamily { ring, square_grid, hex };

inline GraphFamily family_from_name(const std::string& name) {
    if (name == "ring") return GraphFamily::ring;
    if (name == "grid" || name == "square_grid") return GraphFamily::square_grid;
    if (name == "hex") return GraphFamily::hex;
    throw ArgumentError("unknown graph family: " + name);
}

inline std::string family_name(GraphFamily f) {
    switch (f) {
        case GraphFamily::ring: return "ring";
        case GraphFamily::square_grid: return "square_grid";
        case GraphFamily::hex: return "hex";
    }
    return "ring";
}

inline Graph build_family_graph(GraphFamily family, long size) {
    switch (family) {
        case GraphFamily::ring: return build_ring(static_cast<int>(size));
        case GraphFamily::square_grid: return build_square_grid(static_cast<int>(size));
        case GraphFamily::hex: return build_hex(static_cast<int>(size), static_cast<int>(size));
    }
    throw ArgumentError("unknown family");
}

inline DgpKind default_kind(GraphFamily family) {
    return family == GraphFamily::ring ? DgpKind::pairs : DgpKind::walk;
}

enum class ScalingMetric { accuracy_knot, coverage };

inline ScalingMetric metric_from_name(const std::string& name) {
    if (name == "accuracy_knot") return ScalingMetric::accuracy_knot;
    if (name == "coverage") return ScalingMetric::coverage;
    throw ArgumentError("unknown scaling metric: " + name);
}

struct ScalingSizeResult {
    long size_param = 0;
    int n_nodes = 0;
    double t_c = 0.0;
    Curve accuracy;                       // accuracy_knot metric only
    std::optional<BreakpointFit> fit;     // accuracy_knot metric only
    std::vector<long> per_seed_lengths;   // coverage metric only
};

struct ScalingResult {
    PowerLawFit fit;
    std::vector<ScalingSizeResult> per_size;
    GraphFamily family = GraphFamily::square_grid;
    DgpKind kind = DgpKind::walk;
    ScalingMetric metric = ScalingMetric::coverage;
    double threshold = 1.0;
};

struct ScalingOptions {
    int num_seeds = 20;
    std::uint64_t master_seed = 0;
    double threshold = 1.0;
    int lengths_per_decade = 16;  // grid resolution for accuracy curves
    int embed_dim = 3;
    double noise = 0.05;
    int jobs = 1;
};

/// Transition point per graph size, then a power law of T_c against the node
/// count. accuracy_knot runs the full synthetic-learner pipeline and takes
/// the knot of the median accuracy curve on lengths log-spaced from n/2 to
/// 50n; coverage takes the first-passage length of the largest observed
/// component.
inline ScalingResult scaling_experiment(GraphFamily family, const std::vector<long>& sizes,
                                        DgpKind kind, ScalingMetric metric,
                                        const ScalingOptions& opts = {}) {
    if (sizes.size() < 3)
        throw ArgumentError("scaling_experiment: need at least 3 sizes, got " +
                            std::to_string(sizes.size()));
    ScalingResult result;
    result.family = family;
    result.kind = kind;
    result.metric = metric;
    result.threshold = opts.threshold;

    std::vector<std::pair<double, double>> points;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const Graph g = build_family_graph(family, sizes[si]);
        ScalingSizeResult size_result;
        size_result.size_param = sizes[si];
        size_result.n_nodes = g.n;
        const std::uint64_t size_seed = derive_seed(opts.master_seed, si);

        if (metric == ScalingMetric::coverage) {
            const auto cov = coverage_transition(g, kind, opts.threshold, opts.num_seeds, size_seed);
            size_result.t_c = cov.median_length;
            size_result.per_seed_lengths = cov.per_seed;
        } else {
            OracleCurveOptions curve_opts;
            long lo = std::max<long>(2, g.n / 2);
            if (kind == DgpKind::pairs) lo += lo % 2;
            curve_opts.lengths = log_spaced_lengths(lo, 50L * g.n, opts.lengths_per_decade);
            if (kind == DgpKind::pairs) {
                for (auto& l : curve_opts.lengths) l += l % 2;  // whole pairs only
                curve_opts.lengths.erase(
                    std::unique(curve_opts.lengths.begin(), curve_opts.lengths.end()),
                    curve_opts.lengths.end());
            }
            curve_opts.embed_dim = opts.embed_dim;
            curve_opts.noise = opts.noise;
            curve_opts.jobs = opts.jobs;
            std::vector<std::uint64_t> seeds;
            for (int s = 0; s < opts.num_seeds; ++s)
                seeds.push_back(derive_seed(size_seed, static_cast<std::uint64_t>(s)));
            const OracleRunResult run = run_oracle_pipeline(g, kind, seeds, curve_opts);
            Curve curve = run.median_accuracy;
            clip_positive(curve);
            const BreakpointFit fit = fit_breakpoint(curve);
            size_result.accuracy = std::move(curve);
            size_result.fit = fit;
            size_result.t_c = fit.knot_x;
        }
        points.emplace_back(static_cast<double>(g.n), size_result.t_c);
        result.per_size.push_back(std::move(size_result));
    }
    result.fit = fit_power_law(points);
    return result;
}

}  // namespace ictrace
