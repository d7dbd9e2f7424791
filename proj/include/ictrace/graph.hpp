#pragma once

#include <algorithm>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ictrace/common.hpp"

namespace ictrace {

enum class Topology { ring, square_grid, hex, custom };

inline std::string topology_name(Topology t) {
    switch (t) {
        case Topology::ring: return "ring";
        case Topology::square_grid: return "square_grid";
        case Topology::hex: return "hex";
        case Topology::custom: return "custom";
    }
    return "custom";
}

inline Topology topology_from_name(const std::string& name) {
    if (name == "ring") return Topology::ring;
    if (name == "square_grid") return Topology::square_grid;
    if (name == "hex") return Topology::hex;
    if (name == "custom") return Topology::custom;
    throw ArgumentError("unknown topology: " + name);
}

/// Undirected simple graph. Edges are normalized to (u < v) and sorted, and
/// adjacency lists are sorted, so construction order never leaks into output.
struct Graph {
    int n = 0;
    Topology topology = Topology::custom;
    std::vector<std::pair<int, int>> edges;
    std::vector<std::vector<int>> adj;

    int degree(int v) const { return static_cast<int>(adj.at(v).size()); }
    bool has_edge(int u, int v) const {
        if (u < 0 || u >= n || v < 0 || v >= n) return false;
        const auto& nb = adj[u];
        return std::binary_search(nb.begin(), nb.end(), v);
    }
};

inline Graph make_graph(int n, std::vector<std::pair<int, int>> edges,
                        Topology topology = Topology::custom) {
    if (n < 1) throw ArgumentError("make_graph: node count must be >= 1");
    std::set<std::pair<int, int>> normalized;
    for (auto [u, v] : edges) {
        if (u == v) throw ArgumentError("make_graph: self-loop at node " + std::to_string(u));
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw ArgumentError("make_graph: edge endpoint out of range");
        normalized.emplace(std::min(u, v), std::max(u, v));
    }
    Graph g;
    g.n = n;
    g.topology = topology;
    g.edges.assign(normalized.begin(), normalized.end());
    g.adj.assign(n, {});
    for (auto [u, v] : g.edges) {
        g.adj[u].push_back(v);
        g.adj[v].push_back(u);
    }
    for (auto& nb : g.adj) std::sort(nb.begin(), nb.end());
    return g;
}

inline Graph build_ring(int n) {
    if (n < 3) throw ArgumentError("build_ring: need n >= 3, got " + std::to_string(n));
    std::vector<std::pair<int, int>> edges;
    edges.reserve(n);
    for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return make_graph(n, std::move(edges), Topology::ring);
}

/// m x m lattice, node (r, c) at index r*m + c, edges between horizontal and
/// vertical neighbors.
inline Graph build_square_grid(int m) {
    if (m < 2) throw ArgumentError("build_square_grid: need m >= 2, got " + std::to_string(m));
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(2 * m * (m - 1)));
    for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
            const int idx = r * m + c;
            if (c + 1 < m) edges.emplace_back(idx, idx + 1);
            if (r + 1 < m) edges.emplace_back(idx, idx + m);
        }
    }
    return make_graph(m * m, std::move(edges), Topology::square_grid);
}

/// Brick-wall honeycomb on a rows x cols array: full horizontal rows, and a
/// vertical edge below (r, c) only when r + c is even. Every node keeps
/// degree <= 3 and the result is bipartite by (r + c) parity.
inline Graph build_hex(int rows, int cols) {
    if (rows < 2 || cols < 2)
        throw ArgumentError("build_hex: need rows >= 2 and cols >= 2");
    std::vector<std::pair<int, int>> edges;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int idx = r * cols + c;
            if (c + 1 < cols) edges.emplace_back(idx, idx + 1);
            if (r + 1 < rows && (r + c) % 2 == 0) edges.emplace_back(idx, idx + cols);
        }
    }
    return make_graph(rows * cols, std::move(edges), Topology::hex);
}

inline const std::vector<int>& neighbors(const Graph& g, int v) {
    if (v < 0 || v >= g.n)
        throw ArgumentError("neighbors: node " + std::to_string(v) + " out of range [0, " +
                            std::to_string(g.n) + ")");
    return g.adj[v];
}

/// Adjacency and Laplacian entries are small integers, so the double matrices
/// are exact and L * ones is exactly zero.
inline Matrix adjacency_matrix(const Graph& g) {
    Matrix a = Matrix::Zero(g.n, g.n);
    for (auto [u, v] : g.edges) {
        a(u, v) = 1.0;
        a(v, u) = 1.0;
    }
    return a;
}

inline Matrix laplacian(const Graph& g) {
    Matrix l = Matrix::Zero(g.n, g.n);
    for (auto [u, v] : g.edges) {
        l(u, v) = -1.0;
        l(v, u) = -1.0;
        l(u, u) += 1.0;
        l(v, v) += 1.0;
    }
    return l;
}

struct ComponentDecomposition {
    int count = 0;
    std::vector<int> membership;                 // node -> component index
    std::vector<std::vector<int>> component_sets;  // ordered by smallest member
};

inline ComponentDecomposition connected_components(const Graph& g) {
    ComponentDecomposition out;
    out.membership.assign(g.n, -1);
    for (int start = 0; start < g.n; ++start) {
        if (out.membership[start] != -1) continue;
        const int comp = out.count++;
        std::vector<int> members;
        std::queue<int> frontier;
        frontier.push(start);
        out.membership[start] = comp;
        while (!frontier.empty()) {
            const int v = frontier.front();
            frontier.pop();
            members.push_back(v);
            for (int u : g.adj[v]) {
                if (out.membership[u] == -1) {
                    out.membership[u] = comp;
                    frontier.push(u);
                }
            }
        }
        std::sort(members.begin(), members.end());
        out.component_sets.push_back(std::move(members));
    }
    return out;
}

/// Subgraph induced on `keep` (ascending node ids); kept node i maps to row i.
inline Graph induced_subgraph(const Graph& g, const std::vector<int>& keep) {
    std::vector<int> to_new(g.n, -1);
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const int v = keep[i];
        if (v < 0 || v >= g.n) throw ArgumentError("induced_subgraph: node out of range");
        to_new[v] = static_cast<int>(i);
    }
    std::vector<std::pair<int, int>> edges;
    for (auto [u, v] : g.edges) {
        if (to_new[u] != -1 && to_new[v] != -1) edges.emplace_back(to_new[u], to_new[v]);
    }
    return make_graph(static_cast<int>(keep.size()), std::move(edges), Topology::custom);
}

/// Stable identifier used to tie context files back to their graph.
inline std::string graph_id(const Graph& g) {
    switch (g.topology) {
        case Topology::ring: return "ring-" + std::to_string(g.n);
        case Topology::square_grid: return "square_grid-" + std::to_string(g.n);
        case Topology::hex: return "hex-" + std::to_string(g.n);
        case Topology::custom: break;
    }
    std::uint64_t h = 14695981039346656037ull;
    for (auto [u, v] : g.edges) {
        h = fnv1a64(&u, sizeof(u), h);
        h = fnv1a64(&v, sizeof(v), h);
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return "custom-" + std::to_string(g.n) + "-" + buf;
}

}  // namespace ictrace
