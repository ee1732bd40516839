#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "sphertwist/error.hpp"
#include "sphertwist/graded.hpp"
#include "sphertwist/poly.hpp"
#include "sphertwist/rng.hpp"

namespace sphertwist {

// Which side the square-zero degree-d operator acts on. The matrices are
// stored identically either way; the tag controls tensor signs downstream.
enum class Side { Right, Left };

// A graded module over the graded dual numbers: a complex (space, d) with a
// degree-d operator e satisfying e^2 = 0 and d∘e = (-1)^d e∘d. The generator
// degree d must be nonzero.
template <class K>
struct ADModule {
    GradedVectorSpace space;
    GradedMap<K> differential; // degree +1
    GradedMap<K> epsilon;      // degree d
    int d = 2;
    Side side = Side::Right;
};

template <class K>
void admodule_audit(const ADModule<K>& m, const std::string& what = "module") {
    require(m.d != 0, errc::usage, what + ": the square-zero operator needs nonzero degree");
    require(m.differential.degree == 1, errc::invariant, what + ": differential degree != +1");
    require(m.epsilon.degree == m.d, errc::invariant, what + ": epsilon degree != d");
    check_graded_map_shape(m.differential, m.space, m.space, what + " differential");
    check_graded_map_shape(m.epsilon, m.space, m.space, what + " epsilon");
    require(is_zero_map(compose(m.differential, m.differential)), errc::invariant,
            what + ": d^2 != 0");
    require(is_zero_map(compose(m.epsilon, m.epsilon)), errc::invariant, what + ": e^2 != 0");
    const auto de = compose(m.differential, m.epsilon);
    const auto ed = compose(m.epsilon, m.differential);
    require(is_zero_map(add(de, scale(ed, m.d % 2 == 0 ? K(-1) : K(1)))), errc::invariant,
            what + ": d∘e != (-1)^d e∘d");
}

template <class K>
Complex<K> underlying_complex(const ADModule<K>& m) {
    return Complex<K>{m.space, m.differential};
}

namespace detail {

template <class K>
GradedMap<K> regrade(const GradedMap<K>& f, int s) {
    GradedMap<K> r;
    r.degree = f.degree;
    for (auto& [n, b] : f.blocks) r.blocks[n - s] = b;
    return r;
}

// Assemble a module from an explicit generator list. Generators are placed
// within their degree in list order, except that the list is stable-sorted by
// degree first, so callers control intra-degree order by listing order.
template <class K>
ADModule<K> module_from_generators(int d, Side side, const std::vector<int>& degs,
                                   const std::vector<std::tuple<int, int, K>>& d_entries,
                                   const std::vector<std::tuple<int, int, K>>& e_entries) {
    ADModule<K> m;
    m.d = d;
    m.side = side;
    std::vector<std::pair<int, int>> pos(degs.size()); // generator -> (degree, slot)
    std::map<int, int> counts;
    for (std::size_t i = 0; i < degs.size(); ++i) pos[i] = {degs[i], counts[degs[i]]++};
    for (auto& [g, n] : counts) m.space.set(g, n);

    auto assemble = [&](const std::vector<std::tuple<int, int, K>>& entries, int degree) {
        GradedMap<K> f;
        f.degree = degree;
        std::map<int, Mat<K>> acc;
        for (auto& [src, tgt, c] : entries) {
            require(pos[static_cast<std::size_t>(tgt)].first ==
                        pos[static_cast<std::size_t>(src)].first + degree,
                    errc::invariant, "entry with wrong degree");
            const int g = pos[static_cast<std::size_t>(src)].first;
            auto it = acc.find(g);
            if (it == acc.end())
                it = acc.emplace(g, zeros<K>(m.space.dim(g + degree), m.space.dim(g))).first;
            it->second(pos[static_cast<std::size_t>(tgt)].second,
                       pos[static_cast<std::size_t>(src)].second) += c;
        }
        for (auto& [g, b] : acc) f.set_block(g, b);
        return f;
    };
    m.differential = assemble(d_entries, 1);
    m.epsilon = assemble(e_entries, d);
    admodule_audit(m);
    return m;
}

} // namespace detail

template <class K>
ADModule<K> shift_module(const ADModule<K>& m, int s) {
    ADModule<K> r = m;
    r.space = m.space.shifted(s);
    r.differential = detail::regrade(m.differential, s);
    r.epsilon = detail::regrade(m.epsilon, s);
    return r;
}

// The elementary torsion module of length m >= 1: generators x_j in degree
// j(d-1) and y_j in degree d + j(d-1) for j = 0..m-1, with d(x_j) = y_{j-1}
// and e(x_j) = y_j. Length 0 is the one-dimensional module with e = 0. The
// shift places a degree-g element in degree g - s.
template <class K>
ADModule<K> make_B(int m, int s, int d, Side side = Side::Right) {
    require(m >= 0, errc::usage, "negative torsion length");
    require(d != 0, errc::usage, "the square-zero operator needs nonzero degree");
    std::vector<int> degs;
    std::vector<std::tuple<int, int, K>> d_entries, e_entries;
    if (m == 0) {
        degs = {0};
    } else {
        // x_0..x_{m-1} first, then y_0..y_{m-1}: x's precede y's inside a
        // shared degree.
        for (int j = 0; j < m; ++j) degs.push_back(j * (d - 1));
        for (int j = 0; j < m; ++j) degs.push_back(d + j * (d - 1));
        for (int j = 1; j < m; ++j) d_entries.push_back({j, m + j - 1, K(1)});
        for (int j = 0; j < m; ++j) e_entries.push_back({j, m + j, K(1)});
    }
    auto r = detail::module_from_generators<K>(d, side, degs, d_entries, e_entries);
    return s == 0 ? r : shift_module(r, s);
}

// The free rank-one module (the algebra as a module over itself).
template <class K>
ADModule<K> make_A(int d, Side side = Side::Right) {
    return make_B<K>(1, 0, d, side);
}

// The same matrices carrying a left action.
template <class K>
ADModule<K> make_C(int m, int s, int d) {
    return make_B<K>(m, s, d, Side::Left);
}

template <class K>
ADModule<K> direct_sum_modules(const ADModule<K>& a, const ADModule<K>& b) {
    require(a.d == b.d, errc::usage, "direct sum: mismatched operator degrees");
    require(a.side == b.side, errc::usage, "direct sum: mismatched sides");
    ADModule<K> r;
    r.d = a.d;
    r.side = a.side;
    for (auto& [g, n] : a.space.dims) r.space.set(g, n);
    for (auto& [g, n] : b.space.dims) r.space.set(g, r.space.dim(g) + n);

    auto merge = [&](const GradedMap<K>& fa, const GradedMap<K>& fb, int degree) {
        GradedMap<K> f;
        f.degree = degree;
        for (auto& [g, dim] : r.space.dims) {
            (void)dim;
            const int rows = r.space.dim(g + degree);
            const int cols = r.space.dim(g);
            if (rows == 0 || cols == 0) continue;
            Mat<K> blk = zeros<K>(rows, cols);
            bool any = false;
            if (const Mat<K>* ba = fa.block(g)) {
                blk.topLeftCorner(ba->rows(), ba->cols()) = *ba;
                any = true;
            }
            if (const Mat<K>* bb = fb.block(g)) {
                blk.block(a.space.dim(g + degree), a.space.dim(g), bb->rows(), bb->cols()) = *bb;
                any = true;
            }
            if (any) f.set_block(g, blk);
        }
        return f;
    };
    r.differential = merge(a.differential, b.differential, 1);
    r.epsilon = merge(a.epsilon, b.epsilon, a.d);
    return r;
}

// Conjugate by a random degreewise-invertible degree-0 automorphism. The
// decomposition is a quasi-isomorphism invariant, so it must not notice.
template <class K>
ADModule<K> conjugate_module(const ADModule<K>& m, Rng& rng) {
    std::map<int, Mat<K>> g, ginv;
    for (auto& [n, k] : m.space.dims) {
        Mat<K> a = zeros<K>(k, k);
        std::optional<Mat<K>> inv;
        do {
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) a(i, j) = rng.template field_element<K>();
            inv = inverse(a);
        } while (!inv);
        g[n] = a;
        ginv[n] = *inv;
    }
    auto transform = [&](const GradedMap<K>& f) {
        GradedMap<K> r;
        r.degree = f.degree;
        for (auto& [n, b] : f.blocks) r.set_block(n, Mat<K>(g.at(n + f.degree) * b * ginv.at(n)));
        return r;
    };
    ADModule<K> r = m;
    r.differential = transform(m.differential);
    r.epsilon = transform(m.epsilon);
    return r;
}

// Direct-sum on `count` contractible pads at random degrees: either a bare
// two-term identity complex with e = 0, or its free closure with e acting.
template <class K>
ADModule<K> add_contractible(const ADModule<K>& m, Rng& rng, int count) {
    int lo = -3, hi = 3;
    if (!m.space.dims.empty()) {
        lo = m.space.dims.begin()->first - 2;
        hi = m.space.dims.rbegin()->first + 2;
    }
    ADModule<K> r = m;
    const int d = m.d;
    for (int i = 0; i < count; ++i) {
        const int n = static_cast<int>(rng.range(lo, hi));
        ADModule<K> pad;
        if (rng.coin()) {
            pad = detail::module_from_generators<K>(d, m.side, {n, n + 1}, {{0, 1, K(1)}}, {});
        } else {
            const K sign = d % 2 == 0 ? K(1) : K(-1);
            pad = detail::module_from_generators<K>(d, m.side, {n, n + 1, n + d, n + d + 1},
                                                    {{0, 1, K(1)}, {2, 3, sign}},
                                                    {{0, 2, K(1)}, {1, 3, K(1)}});
        }
        r = direct_sum_modules(r, pad);
    }
    return r;
}

// Rescale the square-zero operator by an invertible scalar; an automorphism
// of the ground algebra, so every derived invariant must be unchanged.
template <class K>
ADModule<K> ind_phi_lambda(const ADModule<K>& m, const K& lambda) {
    require(!is_zero(lambda), errc::usage, "the rescaling scalar must be invertible");
    ADModule<K> r = m;
    r.epsilon = scale(m.epsilon, lambda);
    return r;
}

// --- transfer to one-variable polynomials -----------------------------------

// The module M ⊗ K[q] with differential D = d ⊗ 1 + (-1)^{(d+1)|m|} e(m) ⊗ q,
// where q carries internal degree 1 - d. For d != 1 every homogeneous entry
// is a forced monomial, which is what the graded elimination needs.
template <class K>
struct KoszulDual {
    std::vector<int> degrees; // free generator degrees, ascending flatten
    Mat<Poly<K>> D;           // internal degree +1
};

template <class K>
KoszulDual<K> koszul_dual(const ADModule<K>& m) {
    admodule_audit(m);
    require(m.d != 1, errc::precondition, "d = 1 collapses the auxiliary grading");
    KoszulDual<K> r;
    std::map<int, int> offset; // degree -> first flat index
    for (auto& [g, n] : m.space.dims) {
        offset[g] = static_cast<int>(r.degrees.size());
        for (int i = 0; i < n; ++i) r.degrees.push_back(g);
    }
    const int n = static_cast<int>(r.degrees.size());
    r.D = Mat<Poly<K>>(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) r.D(i, j) = Poly<K>();

    for (auto& [g, b] : m.differential.blocks) {
        const int src = offset.at(g), tgt = offset.at(g + 1);
        for (int i = 0; i < b.rows(); ++i)
            for (int j = 0; j < b.cols(); ++j)
                if (!is_zero(b(i, j))) r.D(tgt + i, src + j) += Poly<K>(b(i, j));
    }
    for (auto& [g, b] : m.epsilon.blocks) {
        const int src = offset.at(g), tgt = offset.at(g + m.d);
        const bool flip = ((static_cast<long long>(m.d + 1) * g) & 1LL) != 0;
        for (int i = 0; i < b.rows(); ++i)
            for (int j = 0; j < b.cols(); ++j)
                if (!is_zero(b(i, j)))
                    r.D(tgt + i, src + j) += Poly<K>::monomial(1, flip ? -b(i, j) : b(i, j));
    }
    return r;
}

// --- classification ----------------------------------------------------------

struct DecompositionReport {
    // (n, shift) with multiplicity by repetition, sorted lexicographically.
    std::vector<std::pair<int, int>> summands;
    bool compact = true; // no length-0 (free-over-K) summands

    std::vector<std::tuple<int, int, int>> grouped() const {
        std::vector<std::tuple<int, int, int>> r;
        for (auto& [n, s] : summands) {
            if (!r.empty() && std::get<0>(r.back()) == n && std::get<1>(r.back()) == s)
                ++std::get<2>(r.back());
            else
                r.push_back({n, s, 1});
        }
        return r;
    }
};

// Split a module into elementary summands, up to quasi-isomorphism: transfer
// to K[q], read off the torsion/free structure of the cohomology by two
// graded eliminations, and translate each piece back.
template <class K>
DecompositionReport decompose(const ADModule<K>& m) {
    auto kd = koszul_dual(m);
    const int n = static_cast<int>(kd.degrees.size());
    DecompositionReport rep;
    if (n == 0) return rep;

    auto snf1 = graded_snf(kd.D, kd.degrees, kd.degrees);
    const int r = snf1.rank;

    if (r == 0) {
        // Zero differential: everything is free.
        for (int i = 0; i < n; ++i) rep.summands.push_back({0, -snf1.col_deg[static_cast<std::size_t>(i)]});
        rep.compact = false;
        std::sort(rep.summands.begin(), rep.summands.end());
        return rep;
    }
    Mat<Poly<K>> c = snf1.vinv * kd.D * snf1.v;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i < r || j >= r)
                require(c(i, j).is_zero_poly(), errc::invariant,
                        "cohomology presentation has support off the expected block");
    if (n - r == 0) return rep; // acyclic

    Mat<Poly<K>> y = c.block(r, 0, n - r, r);
    std::vector<int> row_deg(snf1.col_deg.begin() + r, snf1.col_deg.end());
    std::vector<int> col_deg;
    col_deg.reserve(static_cast<std::size_t>(r));
    for (int j = 0; j < r; ++j) col_deg.push_back(snf1.col_deg[static_cast<std::size_t>(j)] + 1);

    auto snf2 = graded_snf(y, row_deg, col_deg);
    for (int i = 0; i < n - r; ++i) {
        const int g = snf2.row_deg[static_cast<std::size_t>(i)];
        if (i < snf2.rank) {
            const int a = snf2.mat(i, i).order();
            if (a == 0) continue; // unit relation: the generator cancels
            rep.summands.push_back({a, -g - a * (1 - m.d) + 1});
        } else {
            rep.summands.push_back({0, -g});
            rep.compact = false;
        }
    }
    std::sort(rep.summands.begin(), rep.summands.end());
    return rep;
}

template <class K>
bool is_compact(const ADModule<K>& m) {
    return decompose(m).compact;
}

// --- truncated tensor complexes ----------------------------------------------

// The `levels`-fold truncated tensor complex of a right module m and a left
// module n over the same dual numbers. Block k = 1 (rightmost) is the plain
// tensor complex; block k sits at an extra degree offset (k-1)(d-1); the
// connecting map sends block k to block k-1 by
//   x ⊗ y  ->  x·e ⊗ y + τ_k (-1)^{d|x|} x ⊗ e·y.
template <class K>
struct TruncatedTensor {
    Complex<K> complex;
    int levels = 1;
    int d = 2;
    // (level, m-degree, m-slot, n-degree, n-slot) -> (total degree, slot)
    std::map<std::tuple<int, int, int, int, int>, std::pair<int, int>> index;

    std::pair<int, int> position(int k, int gm, int im, int gn, int jn) const {
        auto it = index.find({k, gm, im, gn, jn});
        require(it != index.end(), errc::usage, "no such tensor basis element");
        return it->second;
    }
};

template <class K>
TruncatedTensor<K> truncated_tensor(const ADModule<K>& m, const ADModule<K>& n, int levels) {
    admodule_audit(m, "right-module factor");
    admodule_audit(n, "left-module factor");
    require(m.side == Side::Right, errc::usage, "first tensor factor must carry a right action");
    require(n.side == Side::Left, errc::usage, "second tensor factor must carry a left action");
    require(m.d == n.d, errc::usage, "tensor factors disagree on the operator degree");
    require(levels >= 1, errc::usage, "levels must be >= 1");
    const int d = m.d;

    TruncatedTensor<K> t;
    t.levels = levels;
    t.d = d;
    std::map<int, int> counts;
    for (int k = 1; k <= levels; ++k)
        for (auto& [gm, dm] : m.space.dims)
            for (int im = 0; im < dm; ++im)
                for (auto& [gn, dn] : n.space.dims)
                    for (int jn = 0; jn < dn; ++jn) {
                        const int deg = gm + gn + (k - 1) * (d - 1);
                        t.index[{k, gm, im, gn, jn}] = {deg, counts[deg]++};
                    }
    for (auto& [g, c] : counts) t.complex.space.set(g, c);

    auto sign_of = [](long long parity) { return (parity & 1LL) != 0; };
    std::map<int, Mat<K>> acc;
    auto slot = [&](int deg) -> Mat<K>& {
        auto it = acc.find(deg);
        if (it == acc.end())
            it = acc.emplace(deg, zeros<K>(t.complex.space.dim(deg + 1), t.complex.space.dim(deg)))
                     .first;
        return it->second;
    };

    for (auto& [key, dp] : t.index) {
        const auto [k, gm, im, gn, jn] = key;
        const auto [deg, col] = dp;
        const K sk = sign_of(static_cast<long long>(d + 1) * (k - 1)) ? K(-1) : K(1);

        if (const Mat<K>* b = m.differential.block(gm)) {
            for (int i = 0; i < b->rows(); ++i) {
                if (is_zero((*b)(i, im))) continue;
                const auto [tdeg, row] = t.position(k, gm + 1, i, gn, jn);
                (void)tdeg;
                slot(deg)(row, col) += sk * (*b)(i, im);
            }
        }
        if (const Mat<K>* b = n.differential.block(gn)) {
            const K sx = sign_of(gm) ? K(-1) : K(1);
            for (int i = 0; i < b->rows(); ++i) {
                if (is_zero((*b)(i, jn))) continue;
                const auto [tdeg, row] = t.position(k, gm, im, gn + 1, i);
                (void)tdeg;
                slot(deg)(row, col) += sk * sx * (*b)(i, jn);
            }
        }
        if (k >= 2) {
            const K tauk =
                (sign_of(static_cast<long long>(d + 1) * (k - 2)) ? K(-1) : K(1)) * K(-1);
            if (const Mat<K>* b = m.epsilon.block(gm)) {
                for (int i = 0; i < b->rows(); ++i) {
                    if (is_zero((*b)(i, im))) continue;
                    const auto [tdeg, row] = t.position(k - 1, gm + d, i, gn, jn);
                    (void)tdeg;
                    slot(deg)(row, col) += (*b)(i, im);
                }
            }
            if (const Mat<K>* b = n.epsilon.block(gn)) {
                const K sdx = sign_of(static_cast<long long>(d) * gm) ? K(-1) : K(1);
                for (int i = 0; i < b->rows(); ++i) {
                    if (is_zero((*b)(i, jn))) continue;
                    const auto [tdeg, row] = t.position(k - 1, gm, im, gn + d, i);
                    (void)tdeg;
                    slot(deg)(row, col) += tauk * sdx * (*b)(i, jn);
                }
            }
        }
    }
    for (auto& [g, b] : acc) t.complex.diff.set_block(g, b);
    t.complex.diff.degree = 1;
    t.complex.audit("truncated tensor complex");
    return t;
}

// --- endomorphism dimension bookkeeping --------------------------------------

namespace detail {

// Is u in {lo*c, (lo+1)*c, ..., hi*c}? (c != 0)
inline bool in_progression(long long u, long long c, long long lo, long long hi) {
    if (u % c != 0) return false;
    const long long k = u / c;
    return k >= lo && k <= hi;
}

// dim Hom(M_a, M_b[u]) between q-torsion modules of lengths a, b over K[q]
// (length 0 meaning the free rank-one module), with internal shift u.
inline int torsion_hom_dim(int a, int b, long long u, int d) {
    const long long c = 1 - d;
    int dim = 0;
    if (a == 0 && b == 0) {
        if (u % c == 0 && u / c >= 0) ++dim;
    } else if (a == 0) {
        if (in_progression(u, c, 0, b - 1)) ++dim;
    } else if (b == 0) {
        if (in_progression(u + a * c - 1, c, 0, a - 1)) ++dim;
    } else if (a >= b) {
        if (in_progression(u, c, 0, b - 1)) ++dim;
        if (in_progression(u + a * c - 1, c, 0, b - 1)) ++dim;
    } else {
        if (in_progression(u, c, b - a, b - 1)) ++dim;
        if (in_progression(u + a * c - 1, c, 0, a - 1)) ++dim;
    }
    return dim;
}

} // namespace detail

// Graded endomorphism dimensions of ⊕_i B_{n_i}[s_i]: degree t -> dim
// Hom(M, M[t]) in the derived category, by the transfer dictionary. The
// default window covers the interval where the support forces entries.
inline std::map<int, int> endo_algebra_dims(const std::vector<std::pair<int, int>>& summands,
                                            int d,
                                            std::optional<std::pair<int, int>> window = std::nullopt) {
    require(d != 0 && d != 1, errc::precondition, "endomorphism dims need d outside {0, 1}");
    std::map<int, int> out;
    if (summands.empty()) return out;

    // Support of the underlying graded space and the transfer-side shifts.
    int lo_deg = 0, hi_deg = 0;
    bool first = true;
    std::vector<long long> sigma;
    for (auto& [n, s] : summands) {
        require(n >= 0, errc::usage, "negative torsion length");
        std::vector<int> degs;
        if (n == 0)
            degs = {-s};
        else
            for (int j = 0; j < n; ++j) {
                degs.push_back(j * (d - 1) - s);
                degs.push_back(d + j * (d - 1) - s);
            }
        for (int g : degs) {
            if (first || g < lo_deg) lo_deg = g;
            if (first || g > hi_deg) hi_deg = g;
            first = false;
        }
        sigma.push_back(n == 0 ? s : s + static_cast<long long>(n) * (1 - d) - 1);
    }

    int wlo, whi;
    if (window) {
        wlo = std::min(window->first, window->second);
        whi = std::max(window->first, window->second);
    } else {
        const int spread = hi_deg - lo_deg;
        const int reach = 3 * std::abs(1 - d);
        wlo = -spread - reach;
        whi = spread + reach;
    }

    for (int tdeg = wlo; tdeg <= whi; ++tdeg) {
        int dim = 0;
        for (std::size_t i = 0; i < summands.size(); ++i)
            for (std::size_t j = 0; j < summands.size(); ++j)
                dim += detail::torsion_hom_dim(summands[i].first, summands[j].first,
                                               tdeg + sigma[j] - sigma[i], d);
        if (dim > 0) out[tdeg] = dim;
    }
    return out;
}

} // namespace sphertwist
