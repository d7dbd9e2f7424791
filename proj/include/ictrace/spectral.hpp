#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ictrace/graph.hpp"
#include "ictrace/linalg.hpp"
#include "ictrace/representations.hpp"

namespace ictrace {

/// Two equivalent bookkeeping conventions for the same quantity:
/// ordered_pair_sum runs over both orientations of every edge and equals
/// exactly twice the Laplacian quadratic form summed over columns.
enum class EnergyConvention { ordered_pair_sum, laplacian_quadratic };

inline std::string energy_convention_name(EnergyConvention c) {
    return c == EnergyConvention::ordered_pair_sum ? "ordered_pair_sum" : "laplacian_quadratic";
}

struct EnergyValue {
    double value = 0.0;
    EnergyConvention convention = EnergyConvention::laplacian_quadratic;

    bool is_infinite() const { return std::isinf(value); }
};

namespace detail {

inline double edge_energy_sum(const Graph& g, const Matrix& h) {
    if (h.rows() != g.n)
        throw ArgumentError("dirichlet_energy: matrix has " + std::to_string(h.rows()) +
                            " rows for a graph with " + std::to_string(g.n) + " nodes");
    double sum = 0.0;
    for (auto [u, v] : g.edges) sum += (h.row(u) - h.row(v)).squaredNorm();
    return sum;
}

/// Restricts table and graph to covered rows. No-op when everything is valid.
inline std::pair<Graph, Matrix> restrict_to_valid(const Graph& g, const ReprTable& table) {
    if (table.values.rows() != g.n)
        throw ArgumentError("repr table has " + std::to_string(table.values.rows()) +
                            " rows for a graph with " + std::to_string(g.n) + " nodes");
    auto [sub, rows] = valid_submatrix(table);
    if (static_cast<int>(rows.size()) == g.n) return {g, std::move(sub)};
    return {induced_subgraph(g, rows), std::move(sub)};
}

}  // namespace detail

inline EnergyValue dirichlet_energy(const Graph& g, const Matrix& h,
                                    EnergyConvention convention = EnergyConvention::laplacian_quadratic) {
    const double once = detail::edge_energy_sum(g, h);
    return {convention == EnergyConvention::ordered_pair_sum ? 2.0 * once : once, convention};
}

inline EnergyValue dirichlet_energy(const Graph& g, const ReprTable& table,
                                    EnergyConvention convention = EnergyConvention::laplacian_quadratic) {
    auto [sub_graph, sub_values] = detail::restrict_to_valid(g, table);
    return dirichlet_energy(sub_graph, sub_values, convention);
}

/// Column-standardizes (mean 0, population std 1) before measuring. A
/// zero-variance column means some direction is constant, which standardizes
/// to an infinite energy; the value is +inf in that case.
inline EnergyValue standardized_energy(const Graph& g, const ReprTable& table,
                                       EnergyConvention convention = EnergyConvention::laplacian_quadratic) {
    auto [sub_graph, h] = detail::restrict_to_valid(g, table);
    const auto rows = h.rows();
    if (rows == 0) return {0.0, convention};
    for (Eigen::Index c = 0; c < h.cols(); ++c) {
        const double mean = h.col(c).mean();
        h.col(c).array() -= mean;
        const double sd = std::sqrt(h.col(c).squaredNorm() / static_cast<double>(rows));
        if (sd <= 0.0) return {kInfinity, convention};
        h.col(c) /= sd;
    }
    return dirichlet_energy(sub_graph, h, convention);
}

struct SpectralBasis {
    Matrix vectors;      // n x k, column j is the (j+1)-th energy minimizer
    Vector eigenvalues;  // nondecreasing, eigenvalues[j] = E(z^(j+1))
};

namespace detail {

/// Rotates the numerically-zero eigenvalue cluster so the first minimizer is
/// the normalized all-ones vector. For connected graphs the cluster is
/// one-dimensional and this reduces to a sign fix; for disconnected graphs it
/// pins the basis of the zero-energy subspace deterministically.
inline void canonicalize_zero_cluster(EigenDecomposition& dec) {
    const auto n = dec.eigenvectors.rows();
    Eigen::Index q = 0;
    while (q < dec.eigenvalues.size() && dec.eigenvalues(q) < 1e-9) ++q;
    if (q == 0) return;
    const Vector ones_dir = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    Matrix cluster(n, q + 1);
    cluster.col(0) = ones_dir;  // lies in the span: constant on every component
    cluster.rightCols(q) = dec.eigenvectors.leftCols(q);
    Matrix basis = orthonormalize(cluster);
    dec.eigenvectors.leftCols(std::min(q, basis.cols())) = basis.leftCols(std::min(q, basis.cols()));
}

}  // namespace detail

/// First k Dirichlet-energy minimizers of the graph: eigenvectors of L for
/// the k smallest eigenvalues, unit norm, mutually orthogonal, signs fixed.
inline SpectralBasis energy_minimizers(const Graph& g, int k) {
    if (k < 1 || k > g.n)
        throw ArgumentError("energy_minimizers: k must be in [1, n], got " + std::to_string(k));
    EigenDecomposition dec = jacobi_eigen(laplacian(g));
    detail::canonicalize_zero_cluster(dec);
    SpectralBasis basis;
    basis.vectors = dec.eigenvectors.leftCols(k);
    basis.eigenvalues = dec.eigenvalues.head(k);
    fix_column_signs(basis.vectors);
    return basis;
}

struct Embedding {
    Matrix coords;  // n x 2, node i at (z2_i, z3_i)
    bool degenerate = false;
};

/// Planar coordinates from the second and third minimizers. On a disconnected
/// graph those directions only separate components, so the embedding is
/// flagged degenerate.
inline Embedding spectral_embedding(const Graph& g) {
    if (g.n < 3) throw ArgumentError("spectral_embedding: need n >= 3");
    const SpectralBasis basis = energy_minimizers(g, 3);
    Embedding emb;
    emb.coords = basis.vectors.rightCols(2);
    emb.degenerate = connected_components(g).count > 1;
    return emb;
}

struct PcaResult {
    Matrix scores;           // n x k, column m = sigma_m * direction over rows
    Vector singular_values;  // nonincreasing
    Matrix directions;       // d x k right singular vectors
};

/// PCA of the row-centered matrix via eigendecomposition of the smaller Gram
/// matrix. Columns past the numerical rank come back as zeros.
inline PcaResult pca(const Matrix& h, int k) {
    const auto n = h.rows();
    const auto d = h.cols();
    if (k < 1 || k > std::min<Eigen::Index>(n - 1, d))
        throw ArgumentError("pca: k must be in [1, min(n-1, d)] = [1, " +
                            std::to_string(std::min<Eigen::Index>(n - 1, d)) + "], got " +
                            std::to_string(k));
    Matrix centered = h.rowwise() - h.colwise().mean();

    PcaResult out;
    out.scores = Matrix::Zero(n, k);
    out.singular_values = Vector::Zero(k);
    out.directions = Matrix::Zero(d, k);

    Matrix u(n, k), v(d, k);
    Vector sigma(k);
    if (n <= d) {
        const EigenDecomposition dec = jacobi_eigen(centered * centered.transpose());
        for (int m = 0; m < k; ++m) {
            const Eigen::Index src = n - 1 - m;
            sigma(m) = std::sqrt(std::max(0.0, dec.eigenvalues(src)));
            u.col(m) = dec.eigenvectors.col(src);
        }
    } else {
        const EigenDecomposition dec = jacobi_eigen(centered.transpose() * centered);
        for (int m = 0; m < k; ++m) {
            const Eigen::Index src = d - 1 - m;
            sigma(m) = std::sqrt(std::max(0.0, dec.eigenvalues(src)));
            v.col(m) = dec.eigenvectors.col(src);
        }
    }

    const double cutoff = 1e-12 * std::max(sigma(0), 1e-300);
    for (int m = 0; m < k; ++m) {
        if (sigma(m) <= cutoff) continue;  // rank exhausted: leave zeros
        if (n <= d) {
            v.col(m) = centered.transpose() * u.col(m) / sigma(m);
        } else {
            u.col(m) = centered * v.col(m) / sigma(m);
        }
        // sign: largest-magnitude score entry positive, ties at lowest index
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(u(i, m)) > best) {
                best = std::abs(u(i, m));
                arg = i;
            }
        }
        if (u(arg, m) < 0.0) {
            u.col(m) = -u.col(m);
            v.col(m) = -v.col(m);
        }
        out.scores.col(m) = sigma(m) * u.col(m);
        out.singular_values(m) = sigma(m);
        out.directions.col(m) = v.col(m);
    }
    return out;
}

/// PCA over the covered rows only.
inline PcaResult pca(const ReprTable& table, int k) {
    auto [sub, rows] = valid_submatrix(table);
    return pca(sub, k);
}

/// Energy of the PCA score matrix restricted to the 1-based component indices
/// in `dims`, measured against the graph restricted to covered rows.
inline EnergyValue energy_on_components(const Graph& g, const ReprTable& table,
                                        const std::set<int>& dims,
                                        EnergyConvention convention = EnergyConvention::laplacian_quadratic) {
    if (dims.empty()) return {0.0, convention};
    auto [sub_graph, sub_values] = detail::restrict_to_valid(g, table);
    const int max_dim = *dims.rbegin();
    const int min_dim = *dims.begin();
    const int limit = static_cast<int>(std::min<Eigen::Index>(sub_values.rows() - 1, sub_values.cols()));
    if (min_dim < 1 || max_dim > limit)
        throw ArgumentError("energy_on_components: component indices must be in [1, " +
                            std::to_string(limit) + "]");
    const PcaResult p = pca(sub_values, max_dim);
    Matrix selected(sub_values.rows(), static_cast<Eigen::Index>(dims.size()));
    Eigen::Index col = 0;
    for (int dim : dims) selected.col(col++) = p.scores.col(dim - 1);
    return dirichlet_energy(sub_graph, selected, convention);
}

/// Minimum-energy representation with prescribed singular values: the sum of
/// eps[k] * z^(k+1) * v_k^T over an orthonormal set {v_k}. PCA of the result
/// recovers the nontrivial minimizers in order because the weights are
/// distinct and the leading term lies along the all-ones direction that
/// centering removes.
inline ReprTable construct_min_energy_matrix(const Graph& g, const std::vector<double>& epsilons,
                                             int d, std::uint64_t seed = 0) {
    const int s = static_cast<int>(epsilons.size());
    if (s < 1) throw ArgumentError("construct_min_energy_matrix: need at least one weight");
    if (s > std::min(g.n, d) - 1)
        throw ArgumentError("construct_min_energy_matrix: need s <= min(n, d) - 1");
    for (int i = 0; i < s; ++i) {
        if (epsilons[i] <= 0.0)
            throw ArgumentError("construct_min_energy_matrix: weights must be positive");
        if (i > 0 && epsilons[i] >= epsilons[i - 1])
            throw ArgumentError("construct_min_energy_matrix: weights must be strictly decreasing");
    }
    const SpectralBasis basis = energy_minimizers(g, s);
    const Matrix v = random_orthonormal(d, s, seed);
    Matrix h = Matrix::Zero(g.n, d);
    for (int k = 0; k < s; ++k) h += epsilons[k] * basis.vectors.col(k) * v.col(k).transpose();
    return repr_table_from_matrix(std::move(h));
}

struct ZeroEnergyBases {
    Matrix alpha_basis;        // recursion with one free scalar per vector
    Matrix orthonormal_basis;  // Gram-Schmidt over component indicators
    Matrix alpha_gram;         // Gram matrix of alpha_basis columns
};

/// Zero-energy bases for a disconnected graph (q >= 2 components). Column i of
/// alpha_basis is -alpha_i on components 1..i-1 and 1 elsewhere with
/// alpha_i = |U_i ∪ .. ∪ U_q| / |U_1 ∪ .. ∪ U_{i-1}|, which keeps every column
/// orthogonal to the all-ones column; the columns are generally not mutually
/// orthogonal, so the Gram matrix is part of the result. orthonormal_basis is
/// the certified-orthogonal alternative spanning the same indicator space.
inline ZeroEnergyBases zero_energy_basis(const Graph& g) {
    const ComponentDecomposition comps = connected_components(g);
    const int q = comps.count;
    if (q < 2) throw ArgumentError("zero_energy_basis: graph is connected (q = 1)");

    ZeroEnergyBases out;
    out.alpha_basis = Matrix::Ones(g.n, q);
    long prefix = 0;  // |U_1 ∪ .. ∪ U_{i-1}|
    for (int i = 1; i < q; ++i) {
        prefix += static_cast<long>(comps.component_sets[i - 1].size());
        const long rest = g.n - prefix;
        const double alpha = static_cast<double>(rest) / static_cast<double>(prefix);
        for (int comp = 0; comp < i; ++comp)
            for (int node : comps.component_sets[comp]) out.alpha_basis(node, i) = -alpha;
    }
    out.alpha_gram = out.alpha_basis.transpose() * out.alpha_basis;

    Matrix indicators = Matrix::Zero(g.n, q);
    indicators.col(0).setOnes();
    for (int i = 1; i < q; ++i)
        for (int node : comps.component_sets[i - 1]) indicators(node, i) = 1.0;
    out.orthonormal_basis = orthonormalize(indicators);
    if (out.orthonormal_basis.cols() != q)
        throw NumericError("zero_energy_basis: indicator orthonormalization lost rank");
    return out;
}

/// |cos| between the first two principal components and the spectral
/// embedding directions z^(2), z^(3) of the (connected) graph.
inline std::pair<double, double> cosine_to_spectral(const ReprTable& table, const Graph& g) {
    auto [sub, rows] = valid_submatrix(table);
    Graph target = static_cast<int>(rows.size()) == g.n ? g : induced_subgraph(g, rows);
    if (connected_components(target).count != 1)
        throw ArgumentError("cosine_to_spectral: graph (restricted to covered rows) is disconnected");
    if (std::min<Eigen::Index>(sub.rows() - 1, sub.cols()) < 2)
        throw ArgumentError("cosine_to_spectral: fewer than 2 principal components available");
    const PcaResult p = pca(sub, 2);
    const SpectralBasis basis = energy_minimizers(target, 3);
    const double c1 = std::abs(cosine_similarity(p.scores.col(0), basis.vectors.col(1)));
    const double c2 = std::abs(cosine_similarity(p.scores.col(1), basis.vectors.col(2)));
    return {c1, c2};
}

}  // namespace ictrace
