#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "sphertwist/algebra.hpp"
#include "sphertwist/error.hpp"
#include "sphertwist/graded.hpp"
#include "sphertwist/matrix.hpp"
#include "sphertwist/rng.hpp"

namespace sphertwist {

// A one-sided twisted complex over shifted projectives P_v[u], stored flat:
// a list of summands plus the total differential D. The entry from summand s
// to summand t is an element of e_{w_t}·A·e_{v_s}, homogeneous of the forced
// degree 1 - u_s + u_t. Invariants (audit): D*D = 0 and the nonzero-entry
// digraph is acyclic, which certifies the complex is one-sided. Positions are
// not stored; any strictly increasing layering of the entry digraph recovers
// them, and shifting/reindexing never touches the entries.
template <class K>
struct Object {
    struct Summand {
        int idem; // vertex v: the summand is P_v[u]
        int u;    // total shift
    };

    const GradedAlgebra<K>* alg = nullptr;
    std::vector<Summand> summands;
    std::map<std::pair<int, int>, AlgElem<K>> d; // (s, t) -> entry of D from s to t

    int size() const { return static_cast<int>(summands.size()); }

    const AlgElem<K>* entry(int s, int t) const {
        auto it = d.find({s, t});
        return it == d.end() ? nullptr : &it->second;
    }
    void set_entry(int s, int t, AlgElem<K> e) {
        if (e.is_zero_elem())
            d.erase({s, t});
        else
            d[{s, t}] = std::move(e);
    }

    // Multiset of (vertex, shift) classes; two isomorphic minimal objects of
    // necessity agree on it.
    std::vector<std::pair<int, int>> class_multiset() const {
        std::vector<std::pair<int, int>> r;
        r.reserve(summands.size());
        for (auto& s : summands) r.push_back({s.idem, s.u});
        std::sort(r.begin(), r.end());
        return r;
    }
};

// A degree-p morphism between twisted complexes, also stored flat: the entry
// from X-summand s to Y-summand t is an element of forced degree
// p - u_s + u_t (entries whose forced degree is negative must be absent).
template <class K>
struct Morphism {
    int degree = 0;
    std::map<std::pair<int, int>, AlgElem<K>> entries; // (s in X, t in Y)

    const AlgElem<K>* entry(int s, int t) const {
        auto it = entries.find({s, t});
        return it == entries.end() ? nullptr : &it->second;
    }
    void set_entry(int s, int t, AlgElem<K> e) {
        if (e.is_zero_elem())
            entries.erase({s, t});
        else
            entries[{s, t}] = std::move(e);
    }
    bool is_zero() const { return entries.empty(); }
};

// --- basic constructions ----------------------------------------------------

template <class K>
Object<K> projective_object(const GradedAlgebra<K>& alg, int vertex, int shift = 0) {
    require(vertex >= 0 && vertex < alg.vertex_count(), errc::usage, "vertex out of range");
    Object<K> x;
    x.alg = &alg;
    x.summands.push_back({vertex, shift});
    return x;
}

template <class K>
Object<K> zero_object(const GradedAlgebra<K>& alg) {
    Object<K> x;
    x.alg = &alg;
    return x;
}

// Shift by n: summand shifts move by n and the differential picks up the
// usual (-1)^n. With this sign a closed degree-p morphism E -> M becomes,
// entry for entry, a closed degree-0 morphism shift(E, -p) -> M, and the
// cone's X-block is literally the differential of shift(X, 1).
template <class K>
Object<K> shift_object(Object<K> x, int n) {
    for (auto& s : x.summands) s.u += n;
    if (n % 2 != 0)
        for (auto& [st, e] : x.d) e = -e;
    return x;
}

template <class K>
Object<K> direct_sum(const Object<K>& x, const Object<K>& y) {
    require(x.alg == y.alg, errc::usage, "direct sum of objects over different algebras");
    Object<K> r = x;
    const int off = x.size();
    for (auto& s : y.summands) r.summands.push_back(s);
    for (auto& [st, e] : y.d) r.d[{st.first + off, st.second + off}] = e;
    return r;
}

// --- audits -------------------------------------------------------------

// Longest-path layering of the entry digraph; throws errc::invariant if the
// digraph has a cycle (the complex would not be one-sided).
template <class K>
std::vector<int> layering(const Object<K>& x) {
    const int n = x.size();
    std::vector<std::vector<int>> out(n);
    std::vector<int> indeg(n, 0);
    for (auto& [st, e] : x.d) {
        out[static_cast<std::size_t>(st.first)].push_back(st.second);
        ++indeg[static_cast<std::size_t>(st.second)];
    }
    std::vector<int> order, level(n, 0);
    order.reserve(n);
    for (int i = 0; i < n; ++i)
        if (indeg[static_cast<std::size_t>(i)] == 0) order.push_back(i);
    for (std::size_t head = 0; head < order.size(); ++head) {
        int s = order[head];
        for (int t : out[static_cast<std::size_t>(s)]) {
            level[static_cast<std::size_t>(t)] =
                std::max(level[static_cast<std::size_t>(t)], level[static_cast<std::size_t>(s)] + 1);
            if (--indeg[static_cast<std::size_t>(t)] == 0) order.push_back(t);
        }
    }
    require(static_cast<int>(order.size()) == n, errc::invariant,
            "differential digraph has a cycle: complex is not one-sided");
    return level;
}

template <class K>
void object_audit(const Object<K>& x, const std::string& what = "object") {
    require(x.alg != nullptr, errc::usage, what + ": no algebra attached");
    const auto& alg = *x.alg;
    for (auto& [st, e] : x.d) {
        auto [s, t] = st;
        require(s >= 0 && s < x.size() && t >= 0 && t < x.size(), errc::invariant,
                what + ": entry index out of range");
        require(!e.is_zero_elem(), errc::invariant, what + ": stored zero entry");
        const int delta = 1 - x.summands[static_cast<std::size_t>(s)].u +
                          x.summands[static_cast<std::size_t>(t)].u;
        require(alg.degree_of(e) == delta, errc::invariant,
                what + ": differential entry has wrong degree");
        for (auto& [i, c] : e.terms) {
            require(alg.element(i).src == x.summands[static_cast<std::size_t>(s)].idem &&
                        alg.element(i).tgt == x.summands[static_cast<std::size_t>(t)].idem,
                    errc::invariant, what + ": entry not supported on e_w A e_v");
        }
    }
    // D*D = 0, i.e. the Maurer-Cartan equation for the flattened differential.
    std::map<std::pair<int, int>, AlgElem<K>> sq;
    for (auto& [st1, e1] : x.d) {
        auto it = x.d.lower_bound({st1.second, 0});
        for (; it != x.d.end() && it->first.first == st1.second; ++it) {
            AlgElem<K> p = alg.mul(it->second, e1);
            if (!p.is_zero_elem()) {
                auto& acc = sq[{st1.first, it->first.second}];
                acc = acc + p;
            }
        }
    }
    for (auto& [st, e] : sq)
        require(e.is_zero_elem(), errc::invariant,
                what + ": Maurer-Cartan violation, D*D has a nonzero entry");
    layering(x);
}

// --- morphisms ---------------------------------------------------------

template <class K>
void morphism_audit(const Object<K>& x, const Object<K>& y, const Morphism<K>& f,
                    const std::string& what = "morphism") {
    require(x.alg == y.alg && x.alg != nullptr, errc::usage, what + ": algebra mismatch");
    for (auto& [st, e] : f.entries) {
        auto [s, t] = st;
        require(s >= 0 && s < x.size() && t >= 0 && t < y.size(), errc::invariant,
                what + ": entry index out of range");
        require(!e.is_zero_elem(), errc::invariant, what + ": stored zero entry");
        const int delta = f.degree - x.summands[static_cast<std::size_t>(s)].u +
                          y.summands[static_cast<std::size_t>(t)].u;
        require(x.alg->degree_of(e) == delta, errc::invariant, what + ": entry has wrong degree");
        for (auto& [i, c] : e.terms)
            require(x.alg->element(i).src == x.summands[static_cast<std::size_t>(s)].idem &&
                        x.alg->element(i).tgt == y.summands[static_cast<std::size_t>(t)].idem,
                    errc::invariant, what + ": entry not supported on e_w A e_v");
    }
}

// g after f.
template <class K>
Morphism<K> compose(const Object<K>& x, const Object<K>& y, const Object<K>& z,
                    const Morphism<K>& g, const Morphism<K>& f) {
    Morphism<K> r;
    r.degree = f.degree + g.degree;
    std::map<std::pair<int, int>, AlgElem<K>> acc;
    for (auto& [st, ef] : f.entries) {
        auto it = g.entries.lower_bound({st.second, 0});
        for (; it != g.entries.end() && it->first.first == st.second; ++it) {
            AlgElem<K> p = x.alg->mul(it->second, ef);
            if (!p.is_zero_elem()) {
                auto& a = acc[{st.first, it->first.second}];
                a = a + p;
            }
        }
    }
    for (auto& [st, e] : acc)
        if (!e.is_zero_elem()) r.entries[st] = e;
    return r;
}

template <class K>
Morphism<K> morphism_add(const Morphism<K>& a, const Morphism<K>& b, const K& scale_b = K(1)) {
    require(a.degree == b.degree || a.is_zero() || b.is_zero(), errc::usage,
            "adding morphisms of different degrees");
    Morphism<K> r = a;
    r.degree = a.is_zero() ? b.degree : a.degree;
    for (auto& [st, e] : b.entries) {
        AlgElem<K> cur = r.entry(st.first, st.second) ? *r.entry(st.first, st.second)
                                                      : AlgElem<K>::zero();
        r.set_entry(st.first, st.second, cur + e.scaled(scale_b));
    }
    return r;
}

template <class K>
Morphism<K> morphism_scale(Morphism<K> f, const K& c) {
    if (is_zero(c)) return Morphism<K>{f.degree, {}};
    for (auto& [st, e] : f.entries) e = e.scaled(c);
    return f;
}

// d(f) = D_Y o f - (-1)^{|f|} f o D_X.
template <class K>
Morphism<K> morphism_differential(const Object<K>& x, const Object<K>& y, const Morphism<K>& f) {
    Morphism<K> r;
    r.degree = f.degree + 1;
    std::map<std::pair<int, int>, AlgElem<K>> acc;
    for (auto& [st, ef] : f.entries) {
        auto it = y.d.lower_bound({st.second, 0});
        for (; it != y.d.end() && it->first.first == st.second; ++it) {
            AlgElem<K> p = x.alg->mul(it->second, ef);
            if (!p.is_zero_elem()) {
                auto& a = acc[{st.first, it->first.second}];
                a = a + p;
            }
        }
    }
    const K sign = (f.degree % 2 != 0) ? K(-1) : K(1);
    for (auto& [st, ed] : x.d) {
        auto it = f.entries.lower_bound({st.second, 0});
        for (; it != f.entries.end() && it->first.first == st.second; ++it) {
            AlgElem<K> p = x.alg->mul(it->second, ed).scaled(-sign);
            if (!p.is_zero_elem()) {
                auto& a = acc[{st.first, it->first.second}];
                a = a + p;
            }
        }
    }
    for (auto& [st, e] : acc)
        if (!e.is_zero_elem()) r.entries[st] = e;
    return r;
}

template <class K>
bool is_closed(const Object<K>& x, const Object<K>& y, const Morphism<K>& f) {
    return morphism_differential(x, y, f).is_zero();
}

template <class K>
Morphism<K> identity_morphism(const Object<K>& x) {
    Morphism<K> r;
    r.degree = 0;
    for (int s = 0; s < x.size(); ++s)
        r.entries[{s, s}] = AlgElem<K>::single(
            x.alg->idempotent_of_vertex(x.summands[static_cast<std::size_t>(s)].idem), K(1));
    return r;
}

// --- cone ----------------------------------------------------------------

// Cone of a closed degree-0 morphism f: X -> Y. The X-part is shifted up by
// one, its differential negated, and -f glues the halves; the convolution is
// X[1] (+) Y with differential ((-d_X, 0), (-f, d_Y)).
template <class K>
Object<K> dg_cone(const Object<K>& x, const Object<K>& y, const Morphism<K>& f) {
    require(x.alg == y.alg && x.alg != nullptr, errc::usage, "cone: algebra mismatch");
    require(f.degree == 0, errc::precondition, "cone: morphism must have degree 0");
    morphism_audit(x, y, f, "cone map");
    require(is_closed(x, y, f), errc::precondition, "cone: morphism is not closed");
    Object<K> c;
    c.alg = x.alg;
    for (auto& s : x.summands) c.summands.push_back({s.idem, s.u + 1});
    for (auto& s : y.summands) c.summands.push_back(s);
    const int off = x.size();
    for (auto& [st, e] : x.d) c.d[{st.first, st.second}] = -e;
    for (auto& [st, e] : y.d) c.d[{st.first + off, st.second + off}] = e;
    for (auto& [st, e] : f.entries) {
        AlgElem<K> me = -e;
        if (!me.is_zero_elem()) c.d[{st.first, st.second + off}] = me;
    }
    object_audit(c, "cone");
    return c;
}

// --- hom complexes --------------------------------------------------------

// The hom complex of two twisted complexes, with an explicit basis: one
// generator per (X-summand s, Y-summand t, algebra basis element b in
// e_{w_t} A e_{v_s}), of degree deg(b) + u_s - u_t.
template <class K>
struct HomData {
    struct Gen {
        int s, t, b;
    };
    const Object<K>* x = nullptr;
    const Object<K>* y = nullptr;
    std::map<int, std::vector<Gen>> gens; // by morphism degree
    Complex<K> complex;

    int dim(int p) const {
        auto it = gens.find(p);
        return it == gens.end() ? 0 : static_cast<int>(it->second.size());
    }

    Morphism<K> to_morphism(int p, const Vec<K>& coords) const {
        auto it = gens.find(p);
        Morphism<K> f;
        f.degree = p;
        if (it == gens.end()) {
            require(coords.size() == 0, errc::usage, "coordinate size mismatch");
            return f;
        }
        require(coords.size() == static_cast<Eigen::Index>(it->second.size()), errc::usage,
                "coordinate size mismatch");
        for (Eigen::Index i = 0; i < coords.size(); ++i) {
            if (is_zero(coords[i])) continue;
            const Gen& g = it->second[static_cast<std::size_t>(i)];
            AlgElem<K> cur = f.entry(g.s, g.t) ? *f.entry(g.s, g.t) : AlgElem<K>::zero();
            f.set_entry(g.s, g.t, cur + AlgElem<K>::single(g.b, coords[i]));
        }
        return f;
    }

    Vec<K> from_morphism(const Morphism<K>& f) const {
        auto it = gens.find(f.degree);
        const int n = it == gens.end() ? 0 : static_cast<int>(it->second.size());
        Vec<K> v = Vec<K>::Constant(n, K(0));
        std::map<std::tuple<int, int, int>, int> index;
        if (it != gens.end())
            for (int i = 0; i < n; ++i) {
                const Gen& g = it->second[static_cast<std::size_t>(i)];
                index[{g.s, g.t, g.b}] = i;
            }
        for (auto& [st, e] : f.entries)
            for (auto& [b, c] : e.terms) {
                auto jt = index.find({st.first, st.second, b});
                require(jt != index.end(), errc::invariant, "morphism outside hom basis");
                v[jt->second] = c;
            }
        return v;
    }
};

template <class K>
HomData<K> hom_complex(const Object<K>& x, const Object<K>& y) {
    require(x.alg == y.alg && x.alg != nullptr, errc::usage, "hom: algebra mismatch");
    const auto& alg = *x.alg;
    HomData<K> h;
    h.x = &x;
    h.y = &y;
    for (int s = 0; s < x.size(); ++s)
        for (int t = 0; t < y.size(); ++t) {
            const auto& bs = alg.hom_basis(x.summands[static_cast<std::size_t>(s)].idem,
                                           y.summands[static_cast<std::size_t>(t)].idem);
            for (int b : bs) {
                const int p = alg.element(b).degree + x.summands[static_cast<std::size_t>(s)].u -
                              y.summands[static_cast<std::size_t>(t)].u;
                h.gens[p].push_back({s, t, b});
            }
        }
    for (auto& [p, lst] : h.gens) h.complex.space.set(p, static_cast<int>(lst.size()));
    h.complex.diff.degree = 1;

    // d(gamma) = D_Y o gamma - (-1)^p gamma o D_X, expanded over the basis.
    for (auto& [p, lst] : h.gens) {
        auto jt = h.gens.find(p + 1);
        if (jt == h.gens.end()) continue;
        std::map<std::tuple<int, int, int>, int> index;
        for (int i = 0; i < static_cast<int>(jt->second.size()); ++i) {
            const auto& g = jt->second[static_cast<std::size_t>(i)];
            index[{g.s, g.t, g.b}] = i;
        }
        Mat<K> m = zeros<K>(static_cast<Eigen::Index>(jt->second.size()),
                            static_cast<Eigen::Index>(lst.size()));
        const K sign = (p % 2 != 0) ? K(-1) : K(1);
        for (int col = 0; col < static_cast<int>(lst.size()); ++col) {
            const auto& g = lst[static_cast<std::size_t>(col)];
            AlgElem<K> be = AlgElem<K>::single(g.b, K(1));
            auto it = y.d.lower_bound({g.t, 0});
            for (; it != y.d.end() && it->first.first == g.t; ++it) {
                AlgElem<K> prod = alg.mul(it->second, be);
                for (auto& [bb, c] : prod.terms) {
                    auto kt = index.find({g.s, it->first.second, bb});
                    require(kt != index.end(), errc::invariant, "hom differential misses basis");
                    m(kt->second, col) += c;
                }
            }
            for (auto& [st, ed] : x.d) {
                if (st.second != g.s) continue;
                AlgElem<K> prod = alg.mul(be, ed);
                for (auto& [bb, c] : prod.terms) {
                    auto kt = index.find({st.first, g.t, bb});
                    require(kt != index.end(), errc::invariant, "hom differential misses basis");
                    m(kt->second, col) -= sign * c;
                }
            }
        }
        if (!is_zero_matrix(m)) h.complex.diff.set_block(p, m);
    }
    h.complex.audit("hom complex");
    return h;
}

template <class K>
std::map<int, int> hom_cohomology_dims(const Object<K>& x, const Object<K>& y) {
    return cohomology_dims(hom_complex(x, y).complex);
}

// Representatives of a basis of H^p, as coordinate vectors in the degree-p
// generator basis. Deterministic: kernel vectors in echelon order, filtered
// against the image of the previous differential.
template <class K>
std::vector<Vec<K>> cocycle_representatives(const HomData<K>& h, int p) {
    const int n = h.dim(p);
    std::vector<Vec<K>> reps;
    if (n == 0) return reps;
    Mat<K> d_p = h.complex.diff.block(p) ? *h.complex.diff.block(p) : zeros<K>(h.dim(p + 1), n);
    auto rki = rank_kernel_image(d_p);
    Mat<K> prev = h.complex.diff.block(p - 1) ? *h.complex.diff.block(p - 1) : zeros<K>(n, 0);
    Mat<K> span = rank_kernel_image(prev).image;
    for (Eigen::Index j = 0; j < rki.kernel.cols(); ++j) {
        Vec<K> v = rki.kernel.col(j);
        Mat<K> test(n, span.cols() + 1);
        if (span.cols() > 0) test.leftCols(span.cols()) = span;
        test.col(span.cols()) = v;
        if (rank_of(test) > rank_of(span)) {
            reps.push_back(v);
            span = test;
        }
    }
    return reps;
}

// --- minimization -----------------------------------------------------------

// Gaussian elimination of unit entries (scalar multiples of an idempotent,
// which force u_t = u_s - 1). Deterministic pivot order: lowest layer of the
// source summand, then source index, then target index. The result has no
// unit entries, so summand class multisets of isomorphic minimized objects
// must agree.
template <class K>
void minimize(Object<K>& x) {
    for (;;) {
        std::vector<int> level = layering(x);
        std::optional<std::tuple<int, int, int>> best; // (layer, s, t)
        K pivot_scalar(0);
        for (auto& [st, e] : x.d) {
            auto u = x.alg->unit_scalar(e);
            if (!u) continue;
            std::tuple<int, int, int> key{level[static_cast<std::size_t>(st.first)], st.first,
                                           st.second};
            if (!best || key < *best) {
                best = key;
                pivot_scalar = *u;
            }
        }
        if (!best) break;
        const int a = std::get<1>(*best), b = std::get<2>(*best);
        const K cinv = K(1) / pivot_scalar;

        std::vector<std::pair<int, AlgElem<K>>> into_b, out_of_a;
        for (auto& [st, e] : x.d) {
            if (st.second == b && st.first != a) into_b.push_back({st.first, e});
            if (st.first == a && st.second != b) out_of_a.push_back({st.second, e});
        }
        for (auto& [s, eb] : into_b)
            for (auto& [t, ea] : out_of_a) {
                AlgElem<K> cur = x.entry(s, t) ? *x.entry(s, t) : AlgElem<K>::zero();
                x.set_entry(s, t, cur - x.alg->mul(ea, eb).scaled(cinv));
            }

        // Drop summands a and b and reindex.
        std::vector<int> remap(static_cast<std::size_t>(x.size()), -1);
        int next = 0;
        for (int i = 0; i < x.size(); ++i)
            if (i != a && i != b) remap[static_cast<std::size_t>(i)] = next++;
        std::vector<typename Object<K>::Summand> ns;
        ns.reserve(static_cast<std::size_t>(next));
        for (int i = 0; i < x.size(); ++i)
            if (remap[static_cast<std::size_t>(i)] >= 0)
                ns.push_back(x.summands[static_cast<std::size_t>(i)]);
        std::map<std::pair<int, int>, AlgElem<K>> nd;
        for (auto& [st, e] : x.d) {
            int s = remap[static_cast<std::size_t>(st.first)];
            int t = remap[static_cast<std::size_t>(st.second)];
            if (s >= 0 && t >= 0) nd[{s, t}] = e;
        }
        x.summands = std::move(ns);
        x.d = std::move(nd);
    }
    object_audit(x, "minimized object");
}

template <class K>
Object<K> minimized(Object<K> x) {
    minimize(x);
    return x;
}

template <class K>
bool is_minimal(const Object<K>& x) {
    for (auto& [st, e] : x.d)
        if (x.alg->unit_scalar(e)) return false;
    return true;
}

// --- isomorphism up to shift ----------------------------------------------

namespace detail {

// Scalar blocks of a degree-0 morphism between minimal objects: for each
// summand class (v, u), the matrix of idempotent coefficients. A closed
// degree-0 morphism between minimal one-sided complexes is invertible iff
// every class block is invertible (the positive-degree part of the algebra
// generates a nilpotent filtration, so the block-triangular remainder cannot
// obstruct invertibility).
template <class K>
std::vector<Mat<K>> scalar_class_blocks(const Object<K>& x, const Object<K>& y,
                                        const std::vector<std::pair<int, int>>& classes,
                                        const Morphism<K>& f) {
    std::vector<Mat<K>> blocks;
    for (auto& cls : classes) {
        std::vector<int> xs, ys;
        for (int i = 0; i < x.size(); ++i)
            if (x.summands[static_cast<std::size_t>(i)].idem == cls.first &&
                x.summands[static_cast<std::size_t>(i)].u == cls.second)
                xs.push_back(i);
        for (int i = 0; i < y.size(); ++i)
            if (y.summands[static_cast<std::size_t>(i)].idem == cls.first &&
                y.summands[static_cast<std::size_t>(i)].u == cls.second)
                ys.push_back(i);
        Mat<K> m = zeros<K>(static_cast<Eigen::Index>(ys.size()),
                            static_cast<Eigen::Index>(xs.size()));
        const int e = x.alg->idempotent_of_vertex(cls.first);
        for (std::size_t c = 0; c < xs.size(); ++c)
            for (std::size_t r = 0; r < ys.size(); ++r)
                if (const AlgElem<K>* el = f.entry(xs[c], ys[r])) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = el->coeff(e);
        blocks.push_back(std::move(m));
    }
    return blocks;
}

} // namespace detail

// If minimize(x) and minimize(y)[l] are isomorphic, returns (l, iso). The
// shift candidate is forced by the summand class multisets; the isomorphism
// is found inside the space of closed degree-0 morphisms, first by aiming at
// the identity pairing and then by seeded random sampling (any reported
// isomorphism is verified exactly; a miss can only produce a false negative,
// with vanishing probability over a large field).
template <class K>
std::optional<std::pair<int, Morphism<K>>> iso_up_to_shift(const Object<K>& x0,
                                                           const Object<K>& y0) {
    require(x0.alg == y0.alg && x0.alg != nullptr, errc::usage, "iso test: algebra mismatch");
    Object<K> x = minimized(x0), y = minimized(y0);
    if (x.size() == 0 && y.size() == 0) return std::make_pair(0, Morphism<K>{});
    if (x.size() == 0 || y.size() == 0) return std::nullopt;

    auto cx = x.class_multiset(), cy = y.class_multiset();
    if (cx.size() != cy.size()) return std::nullopt;
    // shift_object(y, l) turns class (v, u) into (v, u + l); match minima.
    std::vector<std::pair<int, int>> sx = cx, sy = cy;
    auto by_u = [](const std::pair<int, int>& a, const std::pair<int, int>& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    };
    std::sort(sx.begin(), sx.end(), by_u);
    std::sort(sy.begin(), sy.end(), by_u);
    const int l = sx[0].second - sy[0].second;
    for (auto& c : cy) c.second += l;
    std::sort(cy.begin(), cy.end());
    if (cx != cy) return std::nullopt;

    Object<K> ys = shift_object(y, l);
    HomData<K> h = hom_complex(x, ys);
    const int n0 = h.dim(0);
    if (n0 == 0) return std::nullopt;
    Mat<K> d0 = h.complex.diff.block(0) ? *h.complex.diff.block(0) : zeros<K>(h.dim(1), n0);
    auto rki = rank_kernel_image(d0);
    if (rki.kernel.cols() == 0) return std::nullopt;

    std::vector<std::pair<int, int>> classes = cx;
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    auto finish = [&](const Vec<K>& coords) -> std::optional<std::pair<int, Morphism<K>>> {
        Morphism<K> f = h.to_morphism(0, coords);
        auto blocks = detail::scalar_class_blocks(x, ys, classes, f);
        for (auto& b : blocks) {
            if (b.rows() != b.cols() || !is_invertible(b)) return std::nullopt;
        }
        morphism_audit(x, ys, f, "candidate isomorphism");
        require(is_closed(x, ys, f), errc::invariant, "iso candidate not closed");
        return std::make_pair(l, f);
    };

    // Attempt 1: solve for a closed morphism whose scalar part is the
    // class-by-class identity pairing.
    {
        const auto& lst = h.gens.at(0);
        std::vector<std::pair<Eigen::Index, K>> wanted;
        for (auto& cls : classes) {
            std::vector<int> xs, ys_;
            for (int i = 0; i < x.size(); ++i)
                if (x.summands[static_cast<std::size_t>(i)].idem == cls.first &&
                    x.summands[static_cast<std::size_t>(i)].u == cls.second)
                    xs.push_back(i);
            for (int i = 0; i < ys.size(); ++i)
                if (ys.summands[static_cast<std::size_t>(i)].idem == cls.first &&
                    ys.summands[static_cast<std::size_t>(i)].u == cls.second)
                    ys_.push_back(i);
            const int e = x.alg->idempotent_of_vertex(cls.first);
            for (std::size_t a = 0; a < xs.size(); ++a)
                for (std::size_t b = 0; b < ys_.size(); ++b) {
                    int gi = -1;
                    for (int i = 0; i < static_cast<int>(lst.size()); ++i)
                        if (lst[static_cast<std::size_t>(i)].s == xs[a] &&
                            lst[static_cast<std::size_t>(i)].t == ys_[b] &&
                            lst[static_cast<std::size_t>(i)].b == e) {
                            gi = i;
                            break;
                        }
                    require(gi >= 0, errc::invariant, "identity generator missing from hom basis");
                    wanted.push_back({gi, a == b ? K(1) : K(0)});
                }
        }
        Mat<K> A = zeros<K>(static_cast<Eigen::Index>(wanted.size()),
                            static_cast<Eigen::Index>(rki.kernel.cols()));
        Vec<K> bvec = Vec<K>::Constant(static_cast<Eigen::Index>(wanted.size()), K(0));
        for (Eigen::Index r = 0; r < A.rows(); ++r) {
            A.row(r) = rki.kernel.row(wanted[static_cast<std::size_t>(r)].first);
            bvec[r] = wanted[static_cast<std::size_t>(r)].second;
        }
        if (auto sol = solve<K>(A, bvec)) {
            Vec<K> coords = rki.kernel * (*sol);
            if (auto r = finish(coords)) return r;
        }
    }

    // Attempt 2: seeded sampling inside the closed-morphism space.
    Rng rng(0xA5F07D1EULL);
    for (int trial = 0; trial < 48; ++trial) {
        Vec<K> c = Vec<K>::Constant(rki.kernel.cols(), K(0));
        for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = rng.field_element<K>();
        Vec<K> coords = rki.kernel * c;
        if (auto r = finish(coords)) return r;
    }
    return std::nullopt;
}

// --- convolution ----------------------------------------------------------

// The convolution as an explicit complex of graded vector spaces: the direct
// sum of the shifted projectives with the differential acting by left
// multiplication. Mostly useful as an independent square-zero check and for
// reporting total dimensions.
template <class K>
Complex<K> convolve(const Object<K>& x) {
    require(x.alg != nullptr, errc::usage, "convolve: no algebra attached");
    const auto& alg = *x.alg;
    // Basis of the convolution in degree n: (summand s, projective basis b)
    // with deg(b) - u_s = n.
    std::map<int, std::vector<std::pair<int, int>>> basis;
    for (int s = 0; s < x.size(); ++s) {
        for (int b : alg.projective_basis(x.summands[static_cast<std::size_t>(s)].idem))
            basis[alg.element(b).degree - x.summands[static_cast<std::size_t>(s)].u].push_back(
                {s, b});
    }
    Complex<K> c;
    for (auto& [n, lst] : basis) c.space.set(n, static_cast<int>(lst.size()));
    c.diff.degree = 1;
    for (auto& [n, lst] : basis) {
        auto jt = basis.find(n + 1);
        if (jt == basis.end()) continue;
        std::map<std::pair<int, int>, int> index;
        for (int i = 0; i < static_cast<int>(jt->second.size()); ++i)
            index[jt->second[static_cast<std::size_t>(i)]] = i;
        Mat<K> m = zeros<K>(static_cast<Eigen::Index>(jt->second.size()),
                            static_cast<Eigen::Index>(lst.size()));
        for (int col = 0; col < static_cast<int>(lst.size()); ++col) {
            auto [s, b] = lst[static_cast<std::size_t>(col)];
            auto it = x.d.lower_bound({s, 0});
            for (; it != x.d.end() && it->first.first == s; ++it) {
                AlgElem<K> prod = alg.mul(it->second, AlgElem<K>::single(b, K(1)));
                for (auto& [bb, coeff] : prod.terms) {
                    auto kt = index.find({it->first.second, bb});
                    require(kt != index.end(), errc::invariant, "convolution misses basis");
                    m(kt->second, col) += coeff;
                }
            }
        }
        if (!is_zero_matrix(m)) c.diff.set_block(n, m);
    }
    c.audit("convolution");
    return c;
}

} // namespace sphertwist
