#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "sphertwist/algebra.hpp"
#include "sphertwist/error.hpp"
#include "sphertwist/rng.hpp"

namespace sphertwist {

// Finite multigraph: vertex labels plus a multiset of unordered edges given
// by endpoint indices. Loops are rejected; parallel edges are the whole
// point (they realize intersection number >= 2 with only two vertices).
struct MultiGraph {
    std::vector<std::string> vertices;
    std::vector<std::pair<int, int>> edges;
};

inline void validate_graph(const MultiGraph& g) {
    const int n = static_cast<int>(g.vertices.size());
    require(n > 0, errc::usage, "graph needs at least one vertex");
    for (auto& [v, w] : g.edges) {
        require(v >= 0 && v < n && w >= 0 && w < n, errc::usage, "edge endpoint out of range");
        require(v != w, errc::usage,
                "loop edge at vertex " + g.vertices[static_cast<std::size_t>(v)]);
    }
}

inline int edge_multiplicity(const MultiGraph& g, int v, int w) {
    int m = 0;
    for (auto& [a, b] : g.edges)
        if ((a == v && b == w) || (a == w && b == v)) ++m;
    return m;
}

// The zig-zag algebra of a multigraph. Basis per vertex v: the idempotent
// e_v (degree 0) and the loop l_v (degree 2); per edge, one arrow in each
// direction (degree 1). A back-and-forth pair along one edge composes to the
// loop at its base point, with a sign placing the two directions
// antisymmetrically; every other length-two path vanishes, as does anything
// past degree 2. The loop signs are forced: the trace l_v -> 1 must make the
// pairing graded-symmetric, and in odd degree that means antisymmetric.
//
// Isolated vertices keep their loop, so every vertex projective has
// endomorphism dimensions {0:1, 2:1} regardless of the graph.
template <class K>
GradedAlgebra<K> build_zigzag(const MultiGraph& g) {
    validate_graph(g);
    const int nv = static_cast<int>(g.vertices.size());
    const int ne = static_cast<int>(g.edges.size());

    auto idx_e = [&](int v) { return v; };
    auto idx_f = [&](int t) { return nv + 2 * t; };     // first -> second
    auto idx_b = [&](int t) { return nv + 2 * t + 1; }; // second -> first
    auto idx_l = [&](int v) { return nv + 2 * ne + v; };

    std::vector<std::pair<std::string, int>> basis;
    basis.reserve(static_cast<std::size_t>(2 * nv + 2 * ne));
    for (int v = 0; v < nv; ++v) basis.push_back({"e" + g.vertices[static_cast<std::size_t>(v)], 0});
    for (int t = 0; t < ne; ++t) {
        basis.push_back({"a" + std::to_string(t + 1), 1});
        basis.push_back({"a" + std::to_string(t + 1) + "*", 1});
    }
    for (int v = 0; v < nv; ++v) basis.push_back({"l" + g.vertices[static_cast<std::size_t>(v)], 2});

    using E = AlgElem<K>;
    std::map<std::pair<int, int>, E> products;
    auto one = [](int i) { return E::single(i, K(1)); };

    for (int v = 0; v < nv; ++v) {
        products[{idx_e(v), idx_e(v)}] = one(idx_e(v));
        products[{idx_l(v), idx_e(v)}] = one(idx_l(v));
        products[{idx_e(v), idx_l(v)}] = one(idx_l(v));
    }
    for (int t = 0; t < ne; ++t) {
        const auto [v, w] = g.edges[static_cast<std::size_t>(t)];
        products[{idx_f(t), idx_e(v)}] = one(idx_f(t));
        products[{idx_e(w), idx_f(t)}] = one(idx_f(t));
        products[{idx_b(t), idx_e(w)}] = one(idx_b(t));
        products[{idx_e(v), idx_b(t)}] = one(idx_b(t));
        // Round trips along the same edge; everything else stays zero.
        products[{idx_b(t), idx_f(t)}] = one(idx_l(v));
        products[{idx_f(t), idx_b(t)}] = E::single(idx_l(w), K(-1));
    }

    std::vector<int> idempotents(static_cast<std::size_t>(nv));
    for (int v = 0; v < nv; ++v) idempotents[static_cast<std::size_t>(v)] = idx_e(v);

    std::vector<K> trace(basis.size(), K(0));
    for (int v = 0; v < nv; ++v) trace[static_cast<std::size_t>(idx_l(v))] = K(1);

    return GradedAlgebra<K>(std::move(basis), std::move(products), std::move(idempotents),
                            std::make_pair(2, std::move(trace)));
}

// Index helpers mirroring the layout above, for tests that poke structure
// constants directly.
inline int zigzag_idempotent(const MultiGraph&, int v) { return v; }
inline int zigzag_arrow(const MultiGraph& g, int t, bool backward) {
    return static_cast<int>(g.vertices.size()) + 2 * t + (backward ? 1 : 0);
}
inline int zigzag_loop(const MultiGraph& g, int v) {
    return static_cast<int>(g.vertices.size() + 2 * g.edges.size()) + v;
}

// --- corpora ----------------------------------------------------------------

struct CorpusEntry {
    MultiGraph graph;
    std::vector<int> chosen; // preferred vertex picks for pair-based fuzzing
};

namespace detail {

inline std::vector<std::string> numbered_labels(int n) {
    std::vector<std::string> labels;
    labels.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) labels.push_back(std::to_string(i));
    return labels;
}

inline void enumerate_edge_multisets(const std::vector<std::pair<int, int>>& pairs,
                                     std::size_t from, int budget,
                                     std::vector<std::pair<int, int>>& acc,
                                     const std::vector<std::string>& labels,
                                     std::vector<MultiGraph>& out) {
    if (from == pairs.size()) {
        out.push_back({labels, acc});
        return;
    }
    for (int k = 0; k <= budget; ++k) {
        enumerate_edge_multisets(pairs, from + 1, budget - k, acc, labels, out);
        if (k < budget) acc.push_back(pairs[from]);
    }
    for (int k = 0; k < budget; ++k) acc.pop_back();
}

} // namespace detail

// Every labeled multigraph with at most the given vertex and edge counts,
// in a fixed deterministic order.
inline std::vector<MultiGraph> all_multigraphs(int max_vertices, int max_edges) {
    require(max_vertices >= 1 && max_edges >= 0, errc::usage, "empty enumeration bounds");
    std::vector<MultiGraph> out;
    for (int nv = 1; nv <= max_vertices; ++nv) {
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < nv; ++i)
            for (int j = i + 1; j < nv; ++j) pairs.push_back({i, j});
        std::vector<std::pair<int, int>> acc;
        detail::enumerate_edge_multisets(pairs, 0, max_edges, acc, detail::numbered_labels(nv),
                                         out);
    }
    return out;
}

// Deterministic pseudo-random corpus. The first three entries are pinned to
// the canonical configurations: single edge, double edge, disjoint pair.
inline std::vector<CorpusEntry> corpus(std::uint64_t seed, int max_vertices, int max_edges,
                                       int count) {
    require(max_vertices >= 2, errc::usage, "corpus needs room for two vertices");
    require(max_edges >= 2, errc::usage, "corpus needs room for a double edge");
    require(count >= 3, errc::usage, "corpus always contains the three canonical graphs");

    const auto two = detail::numbered_labels(2);
    std::vector<CorpusEntry> out;
    out.push_back({{two, {{0, 1}}}, {0, 1}});
    out.push_back({{two, {{0, 1}, {0, 1}}}, {0, 1}});
    out.push_back({{two, {}}, {0, 1}});

    Rng rng(seed);
    while (static_cast<int>(out.size()) < count) {
        const int nv = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_vertices)));
        const int ne =
            nv == 1 ? 0 : static_cast<int>(rng.below(static_cast<std::uint64_t>(max_edges + 1)));
        MultiGraph g;
        g.vertices = detail::numbered_labels(nv);
        for (int t = 0; t < ne; ++t) {
            int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(nv)));
            int w = static_cast<int>(rng.below(static_cast<std::uint64_t>(nv)));
            while (w == v) w = static_cast<int>(rng.below(static_cast<std::uint64_t>(nv)));
            g.edges.push_back({std::min(v, w), std::max(v, w)});
        }
        std::vector<int> chosen;
        if (nv == 1)
            chosen = {0};
        else {
            int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(nv)));
            int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(nv)));
            while (b == a) b = static_cast<int>(rng.below(static_cast<std::uint64_t>(nv)));
            chosen = {a, b};
        }
        out.push_back({std::move(g), std::move(chosen)});
    }
    return out;
}

} // namespace sphertwist
