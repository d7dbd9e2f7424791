#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include "ictrace/dgp.hpp"
#include "ictrace/graph.hpp"
#include "ictrace/metrics.hpp"
#include "ictrace/rng.hpp"

namespace ictrace {

struct BreakpointFit {
    double knot_x = 0.0;       // T_c in original x units
    double left_slope = 0.0;   // log-log slopes
    double right_slope = 0.0;
    double knot_log_y = 0.0;   // fitted value at the knot, log units
    double sse_two_piece = 0.0;
    double sse_single_line = 0.0;
    double r2 = 0.0;
    bool degenerate_knot = false;
};

namespace detail {

struct TwoPieceFit {
    double sse = kInfinity;
    double a = 0.0;   // value at knot
    double b1 = 0.0;  // left slope
    double b2 = 0.0;  // right slope
};

/// Least squares for the continuous two-segment model
/// w = a + b1 * min(u - t, 0) + b2 * max(u - t, 0) at a fixed knot t.
inline TwoPieceFit fit_two_piece_at(const std::vector<double>& u, const std::vector<double>& w,
                                    double t) {
    const auto n = static_cast<Eigen::Index>(u.size());
    Matrix design(n, 3);
    Vector rhs(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double s = u[static_cast<std::size_t>(i)] - t;
        design(i, 0) = 1.0;
        design(i, 1) = std::min(s, 0.0);
        design(i, 2) = std::max(s, 0.0);
        rhs(i) = w[static_cast<std::size_t>(i)];
    }
    const Vector coef = design.colPivHouseholderQr().solve(rhs);
    TwoPieceFit fit;
    fit.sse = (design * coef - rhs).squaredNorm();
    fit.a = coef(0);
    fit.b1 = coef(1);
    fit.b2 = coef(2);
    return fit;
}

inline std::pair<double, double> simple_ols(const std::vector<double>& x,
                                            const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
    const double intercept = (sy - slope * sx) / n;
    return {slope, intercept};
}

}  // namespace detail

/// Continuous two-segment linear fit in (log x, log y). The knot is located
/// by a grid search over every interior observed x plus 50 log-uniform
/// interpolants, then refined by golden-section search to 1e-3 in log x.
/// Candidate knots keep at least two points on each side.
inline BreakpointFit fit_breakpoint(const Curve& curve) {
    const auto& pts = curve.points;
    if (pts.size() < 8)
        throw ArgumentError("fit_breakpoint: need at least 8 points, got " +
                            std::to_string(pts.size()));
    std::vector<double> u, w;
    u.reserve(pts.size());
    w.reserve(pts.size());
    for (const auto& p : pts) {
        if (p.x <= 0 || p.y <= 0.0)
            throw ArgumentError("fit_breakpoint: log-log fit needs strictly positive x and y");
        u.push_back(std::log(static_cast<double>(p.x)));
        w.push_back(std::log(p.y));
    }

    // interior band that keeps >= 2 points per segment
    const double lo = u[1];
    const double hi = u[u.size() - 2];
    if (!(lo < hi)) throw ArgumentError("fit_breakpoint: degenerate x grid");

    std::vector<double> candidates;
    for (std::size_t i = 1; i + 1 < u.size(); ++i)
        if (u[i] >= lo && u[i] <= hi) candidates.push_back(u[i]);
    for (int j = 1; j <= 50; ++j)
        candidates.push_back(lo + (hi - lo) * static_cast<double>(j) / 51.0);
    std::sort(candidates.begin(), candidates.end());

    double best_t = candidates.front();
    detail::TwoPieceFit best;
    for (double t : candidates) {
        const auto fit = detail::fit_two_piece_at(u, w, t);
        if (fit.sse < best.sse) {
            best = fit;
            best_t = t;
        }
    }

    // golden-section refinement between the neighboring candidates
    {
        const auto it = std::lower_bound(candidates.begin(), candidates.end(), best_t);
        double a = it == candidates.begin() ? lo : *(it - 1);
        double b = (it + 1) == candidates.end() ? hi : *(it + 1);
        const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - inv_phi * (b - a);
        double x2 = a + inv_phi * (b - a);
        double f1 = detail::fit_two_piece_at(u, w, x1).sse;
        double f2 = detail::fit_two_piece_at(u, w, x2).sse;
        while (b - a > 1e-3) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = detail::fit_two_piece_at(u, w, x1).sse;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = detail::fit_two_piece_at(u, w, x2).sse;
            }
        }
        const double t = (a + b) / 2.0;
        const auto fit = detail::fit_two_piece_at(u, w, t);
        if (fit.sse < best.sse) {
            best = fit;
            best_t = t;
        }
    }

    BreakpointFit out;
    out.knot_x = std::exp(best_t);
    out.left_slope = best.b1;
    out.right_slope = best.b2;
    out.knot_log_y = best.a;
    out.sse_two_piece = best.sse;

    {
        const auto [slope, intercept] = detail::simple_ols(u, w);
        double sse = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double r = w[i] - (intercept + slope * u[i]);
            sse += r * r;
        }
        out.sse_single_line = sse;
    }
    if (out.sse_two_piece > out.sse_single_line) out.sse_two_piece = out.sse_single_line;

    const double mean_w = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
    double sst = 0.0;
    for (double wi : w) sst += (wi - mean_w) * (wi - mean_w);
    out.r2 = sst > 0.0 ? 1.0 - out.sse_two_piece / sst : 1.0;
    out.degenerate_knot =
        (out.sse_single_line - out.sse_two_piece) <= std::max(1e-12, 0.01 * out.sse_single_line);
    return out;
}

/// Clips non-positive y values to `floor` so a curve can enter the log-log
/// fit; returns how many points were clipped.
inline long clip_positive(Curve& curve, double floor = 1e-6) {
    long clipped = 0;
    for (auto& p : curve.points) {
        if (p.y < floor) {
            p.y = floor;
            ++clipped;
        }
    }
    return clipped;
}

struct PowerLawFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    double r2 = 0.0;
    std::vector<std::pair<double, double>> points;  // (n, T_c)
};

/// Ordinary least squares on (log n, log T_c).
inline PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3)
        throw ArgumentError("fit_power_law: need at least 3 points, got " +
                            std::to_string(points.size()));
    std::vector<double> x, y;
    for (const auto& [n, tc] : points) {
        if (n <= 0.0 || tc <= 0.0)
            throw ArgumentError("fit_power_law: all points must be strictly positive");
        x.push_back(std::log(n));
        y.push_back(std::log(tc));
    }
    const auto [slope, intercept] = detail::simple_ols(x, y);
    PowerLawFit fit;
    fit.exponent = slope;
    fit.prefactor = std::exp(intercept);
    fit.points = points;

    double sse = 0.0, sst = 0.0;
    const double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - (intercept + slope * x[i]);
        sse += r * r;
        sst += (y[i] - mean_y) * (y[i] - mean_y);
    }
    fit.r2 = sst > 0.0 ? 1.0 - sse / sst : (sse <= 1e-24 ? 1.0 : 0.0);
    return fit;
}

namespace detail {

struct DisjointSet {
    std::vector<int> parent;
    std::vector<int> size;
    int largest = 1;

    explicit DisjointSet(int n) : parent(static_cast<std::size_t>(n)), size(static_cast<std::size_t>(n), 1) {
        for (int i = 0; i < n; ++i) parent[static_cast<std::size_t>(i)] = i;
    }

    int find(int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    }

    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[static_cast<std::size_t>(a)] < size[static_cast<std::size_t>(b)]) std::swap(a, b);
        parent[static_cast<std::size_t>(b)] = a;
        size[static_cast<std::size_t>(a)] += size[static_cast<std::size_t>(b)];
        largest = std::max(largest, size[static_cast<std::size_t>(a)]);
    }
};

/// Incremental per-sequence token source matching make_batch's draws.
struct SequenceCursor {
    SplitMix64 rng;
    DgpKind kind;
    int start;
    long emitted = 0;
    int walk_current = 0;
    int pending = -1;

    SequenceCursor(const Graph& g, DgpKind k, int start_node, std::uint64_t seed)
        : rng(seed), kind(k), start(start_node) {
        if (g.adj[static_cast<std::size_t>(start_node)].empty())
            throw ArgumentError("coverage_transition: node " + std::to_string(start_node) +
                                " has no incident edge");
    }

    int next(const Graph& g) {
        if (kind == DgpKind::walk) {
            if (emitted == 0) {
                walk_current = start;
            } else {
                const auto& nb = g.adj[static_cast<std::size_t>(walk_current)];
                walk_current = nb[uniform_index(rng, nb.size())];
            }
            ++emitted;
            return walk_current;
        }
        if (emitted % 2 == 1) {
            ++emitted;
            return pending;
        }
        int first, second;
        if (emitted == 0) {
            const auto& nb = g.adj[static_cast<std::size_t>(start)];
            first = start;
            second = nb[uniform_index(rng, nb.size())];
        } else {
            auto [u, v] = g.edges[uniform_index(rng, g.edges.size())];
            first = u;
            second = v;
        }
        if (uniform_index(rng, 2) == 1) std::swap(first, second);
        pending = second;
        ++emitted;
        return first;
    }
};

}  // namespace detail

struct CoverageTransitionResult {
    double median_length = 0.0;       // total batch tokens at first passage
    std::vector<long> per_seed;
};

/// Streams the prompt batch round-robin (one token per sequence per round)
/// and records the total number of tokens consumed across the batch when the
/// union of observed edges first has a largest connected component covering
/// at least threshold * n nodes; median over seeds. Context size is counted
/// in total batch tokens: that is the data budget the batch protocol spends,
/// and it keeps the first-passage measurement fine-grained. Edge accumulation
/// is monotone, so the per-seed crossing is well defined.
inline CoverageTransitionResult coverage_transition(const Graph& g, DgpKind kind, double threshold,
                                                    int num_seeds, std::uint64_t master_seed = 0,
                                                    long max_length = 1000000) {
    if (threshold <= 0.0 || threshold > 1.0)
        throw ArgumentError("coverage_transition: threshold must be in (0, 1]");
    if (num_seeds < 1) throw ArgumentError("coverage_transition: need at least one seed");
    if (connected_components(g).count != 1)
        throw ArgumentError("coverage_transition: graph must be connected");
    const double needed = threshold * g.n - 1e-9;

    CoverageTransitionResult result;
    result.per_seed.reserve(static_cast<std::size_t>(num_seeds));
    for (int s = 0; s < num_seeds; ++s) {
        const std::uint64_t run_seed = derive_seed(master_seed, static_cast<std::uint64_t>(s));
        std::vector<detail::SequenceCursor> cursors;
        cursors.reserve(static_cast<std::size_t>(g.n));
        std::vector<int> previous(static_cast<std::size_t>(g.n), -1);
        for (int k = 0; k < g.n; ++k)
            cursors.emplace_back(g, kind, k, derive_seed(run_seed, static_cast<std::uint64_t>(k)));

        detail::DisjointSet dsu(g.n);
        long found = -1;
        long total_tokens = 0;
        for (long l = 1; l <= max_length && found < 0; ++l) {
            for (int k = 0; k < g.n; ++k) {
                const int token = cursors[static_cast<std::size_t>(k)].next(g);
                ++total_tokens;
                const bool makes_edge = kind == DgpKind::walk ? (l > 1) : (l % 2 == 0);
                if (makes_edge) dsu.unite(previous[static_cast<std::size_t>(k)], token);
                previous[static_cast<std::size_t>(k)] = token;
                if (static_cast<double>(dsu.largest) >= needed) {
                    found = total_tokens;
                    break;
                }
            }
        }
        if (found < 0)
            throw NumericError("coverage_transition: threshold " + format_double(threshold) +
                               " not reached within " + std::to_string(max_length) +
                               " tokens per sequence");
        result.per_seed.push_back(found);
    }

    std::vector<long> sorted = result.per_seed;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    result.median_length = sorted.size() % 2 == 1
                               ? static_cast<double>(sorted[mid])
                               : (static_cast<double>(sorted[mid - 1]) + static_cast<double>(sorted[mid])) / 2.0;
    return result;
}

}  // namespace ictrace
