#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "ictrace/common.hpp"
#include "ictrace/rng.hpp"

namespace ictrace {

struct EigenDecomposition {
    Vector eigenvalues;   // ascending
    Matrix eigenvectors;  // column j pairs with eigenvalues[j]
    int sweeps = 0;
};

struct JacobiOptions {
    double tolerance = 1e-12;  // off-diagonal Frobenius mass relative to ||A||_F
    int max_sweeps = 64;
};

/// Cyclic Jacobi eigendecomposition for symmetric matrices. Each sweep walks
/// the upper triangle and applies a Givens rotation that annihilates one
/// off-diagonal entry; convergence is declared when the off-diagonal Frobenius
/// mass drops below tolerance * ||A||_F.
inline EigenDecomposition jacobi_eigen(Matrix a, const JacobiOptions& opts = {}) {
    const auto n = a.rows();
    if (n != a.cols()) throw ArgumentError("jacobi_eigen: matrix must be square");
    Matrix v = Matrix::Identity(n, n);
    EigenDecomposition out;
    if (n == 1) {
        out.eigenvalues = a.diagonal();
        out.eigenvectors = v;
        return out;
    }

    const double scale = a.norm();
    const auto off_diagonal_mass = [&a, n]() {
        double s = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) s += a(p, q) * a(p, q);
        return std::sqrt(2.0 * s);
    };

    int sweeps = 0;
    while (scale > 0.0 && off_diagonal_mass() > opts.tolerance * scale) {
        if (++sweeps > opts.max_sweeps)
            throw NumericError("jacobi_eigen: no convergence after " +
                               std::to_string(opts.max_sweeps) + " sweeps");
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (Eigen::Index r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = a(p, r) = c * arp - s * arq;
                    a(r, q) = a(q, r) = s * arp + c * arq;
                }
                for (Eigen::Index r = 0; r < n; ++r) {
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = c * vrp - s * vrq;
                    v(r, q) = s * vrp + c * vrq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&a](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
    out.eigenvalues = Vector(n);
    out.eigenvectors = Matrix(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out.eigenvalues(j) = a(order[j], order[j]);
        out.eigenvectors.col(j) = v.col(order[j]);
    }
    out.sweeps = sweeps;
    return out;
}

/// Flips each column so its largest-magnitude entry is positive; magnitude
/// ties resolve to the lowest index. Keeps eigenvector output reproducible.
inline void fix_column_signs(Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            const double mag = std::abs(m(i, j));
            if (mag > best) {  // strict: ties keep the lowest index
                best = mag;
                arg = i;
            }
        }
        if (m(arg, j) < 0.0) m.col(j) = -m.col(j);
    }
}

/// Modified Gram-Schmidt. Columns whose residual norm falls below `tol` are
/// dropped, so the result can be thinner than the input.
inline Matrix orthonormalize(const Matrix& input, double tol = 1e-10) {
    Matrix q(input.rows(), input.cols());
    Eigen::Index kept = 0;
    for (Eigen::Index j = 0; j < input.cols(); ++j) {
        Vector col = input.col(j);
        for (int pass = 0; pass < 2; ++pass) {
            for (Eigen::Index i = 0; i < kept; ++i) col -= q.col(i).dot(col) * q.col(i);
        }
        const double norm = col.norm();
        if (norm > tol) q.col(kept++) = col / norm;
    }
    return q.leftCols(kept);
}

/// Random orthonormal d x k matrix (Gaussian entries then Gram-Schmidt).
inline Matrix random_orthonormal(Eigen::Index d, Eigen::Index k, std::uint64_t seed) {
    if (k > d) throw ArgumentError("random_orthonormal: k must be <= d");
    SplitMix64 rng(seed);
    while (true) {
        Matrix m(d, k);
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = 0; j < k; ++j) m(i, j) = standard_normal(rng);
        Matrix q = orthonormalize(m);
        if (q.cols() == k) return q;  // retry on the measure-zero rank-deficient draw
    }
}

/// Largest principal angle (radians) between the column spans of a and b.
inline double max_principal_angle(const Matrix& a, const Matrix& b) {
    Matrix qa = orthonormalize(a);
    Matrix qb = orthonormalize(b);
    if (qa.cols() == 0 || qb.cols() == 0)
        throw ArgumentError("max_principal_angle: empty subspace");
    if (qa.cols() != qb.cols())
        throw ArgumentError("max_principal_angle: subspace dimensions differ");
    Matrix m = qa.transpose() * qb;
    const EigenDecomposition dec = jacobi_eigen(m.transpose() * m);
    const double smallest = std::clamp(dec.eigenvalues(0), 0.0, 1.0);
    return std::acos(std::sqrt(smallest));
}

inline double cosine_similarity(const Vector& a, const Vector& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    return a.dot(b) / (na * nb);
}

}  // namespace ictrace
