#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "ictrace/common.hpp"
#include "ictrace/graph.hpp"

namespace ictrace {

enum class PredictionSource { oracle, ingested };

struct PredictionDistribution {
    std::vector<double> probs;
    PredictionSource source = PredictionSource::oracle;
};

inline void validate(const PredictionDistribution& dist) {
    double total = 0.0;
    for (double p : dist.probs) {
        if (p < 0.0) throw ArgumentError("prediction distribution has a negative entry");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw ArgumentError("prediction distribution sums to " + format_double(total));
}

/// Probability mass the prediction places on valid neighbors of the current
/// node; 1.0 means the prediction never leaves the graph structure.
inline double rule_following_accuracy(const Graph& g, int current,
                                      const PredictionDistribution& dist) {
    if (static_cast<int>(dist.probs.size()) != g.n)
        throw ArgumentError("rule_following_accuracy: distribution size does not match n");
    double mass = 0.0;
    for (int u : neighbors(g, current)) mass += dist.probs[static_cast<std::size_t>(u)];
    return mass;
}

/// Same mass, relative to an arbitrary target node.
inline double prob_mass_on_neighbors(const Graph& g, int target,
                                     const PredictionDistribution& dist) {
    return rule_following_accuracy(g, target, dist);
}

/// Probability that a fixed node appears at least once among l i.i.d. uniform
/// draws from n nodes: 1 - ((n-1)/n)^l.
inline double p_seen1(int n, long l) {
    if (n < 1) throw ArgumentError("p_seen1: need n >= 1");
    if (l < 0) throw ArgumentError("p_seen1: need l >= 0");
    return 1.0 - std::pow(static_cast<double>(n - 1) / n, static_cast<double>(l));
}

/// Probability the node appears at least twice:
/// p_seen1 - (l/n) * ((n-1)/n)^(l-1).
inline double p_seen2(int n, long l) {
    if (n < 1) throw ArgumentError("p_seen2: need n >= 1");
    if (l < 0) throw ArgumentError("p_seen2: need l >= 0");
    if (l == 0) return 0.0;
    const double miss = static_cast<double>(n - 1) / n;
    return p_seen1(n, l) -
           (static_cast<double>(l) / n) * std::pow(miss, static_cast<double>(l - 1));
}

struct CurvePoint {
    long x = 0;
    double y = 0.0;
};

/// (context length -> value) series; x strictly increasing.
struct Curve {
    std::vector<CurvePoint> points;
    std::string tag;
};

using AccuracyCurve = Curve;
using EnergyCurve = Curve;

/// Analytic one-shot / two-shot memorization baselines evaluated pointwise.
inline std::pair<AccuracyCurve, AccuracyCurve> memorization_curves(int n,
                                                                   const std::vector<long>& lengths) {
    for (std::size_t i = 1; i < lengths.size(); ++i)
        if (lengths[i] <= lengths[i - 1])
            throw ArgumentError("memorization_curves: lengths must be strictly increasing");
    AccuracyCurve seen1, seen2;
    seen1.tag = "memorization_seen1";
    seen2.tag = "memorization_seen2";
    for (long l : lengths) {
        seen1.points.push_back({l, p_seen1(n, l)});
        seen2.points.push_back({l, p_seen2(n, l)});
    }
    return {seen1, seen2};
}

/// Moves the projection of h onto the (orthonormal) component basis to match
/// the target's projection, leaving the orthogonal complement untouched:
/// h' = h + sum_m (<target, v_m> - <h, v_m>) v_m.
inline Vector rescale_pc_intervention(const Vector& h, const Vector& target_mean,
                                      const Matrix& basis) {
    if (basis.rows() != h.size() || target_mean.size() != h.size())
        throw ArgumentError("rescale_pc_intervention: dimension mismatch");
    const Matrix gram = basis.transpose() * basis;
    if (!gram.isApprox(Matrix::Identity(basis.cols(), basis.cols()), 1e-8))
        throw ArgumentError("rescale_pc_intervention: basis columns are not orthonormal");
    Vector out = h;
    for (Eigen::Index m = 0; m < basis.cols(); ++m) {
        const Vector v = basis.col(m);
        out += (target_mean.dot(v) - h.dot(v)) * v;
    }
    return out;
}

/// 1 when one of the k most probable nodes is a neighbor of `target`.
/// Probability ties resolve toward the lower node index.
inline int hit_at_k(const Graph& g, int target, const PredictionDistribution& dist, int k) {
    if (k < 1) throw ArgumentError("hit_at_k: need k >= 1");
    if (static_cast<int>(dist.probs.size()) != g.n)
        throw ArgumentError("hit_at_k: distribution size does not match n");
    std::vector<int> order(dist.probs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&dist](int a, int b) {
        if (dist.probs[static_cast<std::size_t>(a)] != dist.probs[static_cast<std::size_t>(b)])
            return dist.probs[static_cast<std::size_t>(a)] > dist.probs[static_cast<std::size_t>(b)];
        return a < b;
    });
    const int top = std::min<int>(k, g.n);
    for (int i = 0; i < top; ++i)
        if (g.has_edge(target, order[static_cast<std::size_t>(i)])) return 1;
    return 0;
}

}  // namespace ictrace
