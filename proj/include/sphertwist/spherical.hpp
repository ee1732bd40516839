#pragma once

// Spherical objects over a graded Frobenius algebra: twist and inverse twist
// functors, twist powers as one total twisted complex, intersection numbers,
// the fundamental inequality checker, hom complexes as modules over the
// graded dual numbers, and the separating-object construction.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "sphertwist/admodule.hpp"
#include "sphertwist/twisted.hpp"

namespace sphertwist {

// An object E whose endomorphism cohomology is K in degree 0 and K in degree
// d, together with a chosen strictly square-zero cocycle representative of
// the degree-d class.
template <class K>
struct SphericalObject {
    Object<K> object;
    Morphism<K> epsilon_endo; // closed, degree d, squares to zero on the nose
    int d = 2;
};

template <class K>
struct IntersectionProfile {
    std::map<int, int> per_degree;
    int total = 0;
};

template <class K>
IntersectionProfile<K> intersection_number(const Object<K>& m, const Object<K>& n) {
    require(m.alg == n.alg && m.alg != nullptr, errc::usage,
            "AlgebraMismatch: intersection number needs objects over one algebra");
    IntersectionProfile<K> r;
    for (auto& [p, k] : hom_cohomology_dims(m, n)) {
        if (k == 0) continue;
        r.per_degree[p] = k;
        r.total += k;
    }
    return r;
}

namespace detail {

template <class K>
bool vec_is_zero_local(const Vec<K>& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!is_zero(v[i])) return false;
    return true;
}

// Is the closed degree-p element with the given coordinates a coboundary?
template <class K>
bool hom_class_is_zero(const HomData<K>& h, int p, const Vec<K>& v) {
    if (vec_is_zero_local(v)) return true;
    const Mat<K>* prev = h.complex.diff.block(p - 1);
    const int dim = h.dim(p);
    const int cols = prev ? static_cast<int>(prev->cols()) : 0;
    Mat<K> test = zeros<K>(dim, cols + 1);
    if (prev) test.leftCols(cols) = *prev;
    test.col(cols) = v;
    const int base = prev ? rank_of(*prev) : 0;
    return rank_of(test) == base;
}

} // namespace detail

// Decide sphericality and pick the epsilon witness. Returns nullopt when the
// endomorphism cohomology has the wrong dimensions. When the dimensions are
// right but the chosen representative does not square to zero, a coboundary
// correction is solved for; failure to strictify is reported, never papered
// over.
template <class K>
std::optional<SphericalObject<K>> check_spherical(const Object<K>& x, int d,
                                                  bool allow_any_nonzero_d = false) {
    require(x.alg != nullptr, errc::usage, "check_spherical: object without algebra");
    require(d != 0, errc::precondition, "spherical degree d must be nonzero");
    require(allow_any_nonzero_d || d > 1,
            errc::precondition, "spherical degree d must exceed 1 (pass the flag to relax)");
    const auto& frob = x.alg->frobenius();
    require(frob.has_value() && frob->cy_dimension == d, errc::precondition,
            "check_spherical: algebra lacks a Frobenius certificate of dimension d");

    auto h = hom_complex(x, x);
    std::map<int, int> dims;
    for (auto& [p, k] : cohomology_dims(h.complex))
        if (k != 0) dims[p] = k;
    if (dims != std::map<int, int>{{0, 1}, {d, 1}}) return std::nullopt;

    const auto reps = cocycle_representatives(h, d);
    require(reps.size() == 1, errc::invariant, "degree-d class count mismatch");
    Morphism<K> eps = h.to_morphism(d, reps[0]);

    for (int round = 0; round < 8; ++round) {
        const Morphism<K> sq = compose(x, x, x, eps, eps);
        if (sq.is_zero()) return SphericalObject<K>{x, eps, d};

        // Solve (eps + delta(eta))^2 = 0 to first order: the linear system
        // eps*d(eta) + d(eta)*eps = -eps^2 over the degree d-1 hom basis.
        const int dom = h.dim(d - 1);
        const int cod = h.dim(2 * d);
        Mat<K> l = zeros<K>(cod, dom);
        for (int i = 0; i < dom; ++i) {
            Vec<K> unit = Vec<K>::Constant(dom, K(0));
            unit[i] = K(1);
            const Morphism<K> eta = h.to_morphism(d - 1, unit);
            const Morphism<K> de = morphism_differential(x, x, eta);
            const Morphism<K> li =
                morphism_add(compose(x, x, x, eps, de), compose(x, x, x, de, eps));
            l.col(i) = h.from_morphism(li);
        }
        const auto sol = solve<K>(l, Mat<K>(h.from_morphism(morphism_scale(sq, K(-1)))));
        require(sol.has_value(), errc::precondition,
                "NoStrictRepresentative: square-zero correction system is inconsistent");
        const Morphism<K> eta = h.to_morphism(d - 1, Vec<K>(sol->col(0)));
        eps = morphism_add(eps, morphism_differential(x, x, eta));
    }
    fail(errc::precondition, "NoStrictRepresentative: strictification did not terminate");
}

// Audit helper: every invariant of the spherical structure, checked.
template <class K>
void spherical_audit(const SphericalObject<K>& e, const std::string& what = "spherical") {
    object_audit(e.object, what);
    require(e.d != 0, errc::precondition, what + ": d = 0");
    require(e.epsilon_endo.degree == e.d, errc::invariant, what + ": epsilon degree");
    morphism_audit(e.object, e.object, e.epsilon_endo, what + " epsilon");
    require(is_closed(e.object, e.object, e.epsilon_endo), errc::invariant,
            what + ": epsilon is not closed");
    require(compose(e.object, e.object, e.object, e.epsilon_endo, e.epsilon_endo).is_zero(),
            errc::invariant, what + ": epsilon squared is nonzero");
    std::map<int, int> dims;
    for (auto& [p, k] : hom_cohomology_dims(e.object, e.object))
        if (k != 0) dims[p] = k;
    require((dims == std::map<int, int>{{0, 1}, {e.d, 1}}), errc::invariant,
            what + ": endomorphism cohomology is not K + K[-d]");
}

// The vertex projective with its length-2 loop as the epsilon witness.
template <class K>
SphericalObject<K> projective_spherical(const GradedAlgebra<K>& alg, int vertex,
                                        int shift = 0) {
    const auto& frob = alg.frobenius();
    require(frob.has_value(), errc::precondition,
            "projective_spherical: algebra lacks a Frobenius certificate");
    auto s = check_spherical(projective_object(alg, vertex, shift), frob->cy_dimension);
    require(s.has_value(), errc::invariant, "projective object is not spherical");
    return *s;
}

template <class K>
SphericalObject<K> shift_spherical(SphericalObject<K> e, int n) {
    e.object = shift_object(std::move(e.object), n);
    return e; // entries of a degree-d endomorphism are shift-invariant
}

namespace detail {

// Append a copy of `piece` to `tot`, returning the summand offset.
template <class K>
int append_summands(Object<K>& tot, const Object<K>& piece) {
    const int off = tot.size();
    for (auto& s : piece.summands) tot.summands.push_back(s);
    for (auto& [st, e] : piece.d) tot.d[{st.first + off, st.second + off}] = e;
    return off;
}

template <class K>
void add_entry(Object<K>& tot, int s, int t, const AlgElem<K>& e) {
    const AlgElem<K>* cur = tot.entry(s, t);
    tot.set_entry(s, t, cur ? *cur + e : e);
}

} // namespace detail

// T_E(M) = minimize(cone(ev)), the evaluation map assembled from the
// deterministic cocycle basis of the hom complex: a closed degree-p morphism
// E -> M is entry-for-entry a closed degree-0 morphism E[-p] -> M.
template <class K>
Object<K> twist(const SphericalObject<K>& e, const Object<K>& m) {
    require(e.object.alg == m.alg && m.alg != nullptr, errc::usage,
            "AlgebraMismatch: twist needs objects over one algebra");
    auto h = hom_complex(e.object, m);
    Object<K> source;
    source.alg = m.alg;
    Morphism<K> ev;
    for (auto& [p, lst] : h.gens) {
        (void)lst;
        for (auto& rep : cocycle_representatives(h, p)) {
            const Morphism<K> f = h.to_morphism(p, rep);
            const int off = detail::append_summands(source, shift_object(e.object, -p));
            for (auto& [st, ent] : f.entries)
                ev.set_entry(off + st.first, st.second, ent);
        }
    }
    Object<K> c = dg_cone(source, m, ev);
    minimize(c);
    return c;
}

// The inverse twist: cone(M -> Hom(M,E)^dual tensor E) shifted down by one.
// A closed degree-p morphism M -> E is entry-for-entry a closed degree-0
// morphism M -> E[p].
template <class K>
Object<K> inverse_twist(const SphericalObject<K>& e, const Object<K>& m) {
    require(e.object.alg == m.alg && m.alg != nullptr, errc::usage,
            "AlgebraMismatch: inverse twist needs objects over one algebra");
    auto h = hom_complex(m, e.object);
    Object<K> target;
    target.alg = m.alg;
    Morphism<K> coev;
    for (auto& [p, lst] : h.gens) {
        (void)lst;
        for (auto& rep : cocycle_representatives(h, p)) {
            const Morphism<K> f = h.to_morphism(p, rep);
            const int off = detail::append_summands(target, shift_object(e.object, p));
            for (auto& [st, ent] : f.entries)
                coev.set_entry(st.first, off + st.second, ent);
        }
    }
    Object<K> c = shift_object(dg_cone(m, target, coev), -1);
    minimize(c);
    return c;
}

// k-fold twist. For k > 0 this is the convolution of one twisted complex:
// k levels holding Hom(E,N) tensor E (the full hom complex, one shifted copy
// of E per basis element) over N, with
//   - the internal hom differential, sign (-1)^j at level j,
//   - level-to-level maps f |-> f o eps (coefficient +1) and the action of
//     eps on the E factor (coefficient (-1)^(j-1)),
//   - the evaluation map from level 1 onto N.
// The level-j copy of E for a degree-p basis element is shifted by
// -p + (1-j)d + j, which makes every stored entry land in its forced degree
// and the final audit seals the sign bookkeeping. For k < 0 the inverse
// twist is iterated.
template <class K>
Object<K> twist_power(const SphericalObject<K>& e, int k, const Object<K>& n) {
    require(e.object.alg == n.alg && n.alg != nullptr, errc::usage,
            "AlgebraMismatch: twist power needs objects over one algebra");
    require(k != 0, errc::usage, "ZeroPower: twist power requires k != 0");
    if (k < 0) {
        Object<K> m = n;
        for (int i = 0; i < -k; ++i) m = inverse_twist(e, m);
        return m;
    }

    const int d = e.d;
    auto h = hom_complex(e.object, n);
    const Morphism<K> id_e = identity_morphism(e.object);

    Object<K> tot;
    tot.alg = n.alg;
    // offsets[(j, p, i)] -> summand offset of that copy of E
    std::map<std::tuple<int, int, int>, int> offsets;
    for (int j = k; j >= 1; --j)
        for (auto& [p, lst] : h.gens)
            for (int i = 0; i < static_cast<int>(lst.size()); ++i) {
                const int sigma = -p + (1 - j) * d + j;
                offsets[{j, p, i}] =
                    detail::append_summands(tot, shift_object(e.object, sigma));
            }
    const int n_off = detail::append_summands(tot, n);

    for (auto& [key, off] : offsets) {
        const auto [j, p, i] = key;
        const auto& g = h.gens.at(p)[static_cast<std::size_t>(i)];
        const K sj = (j % 2 != 0) ? K(-1) : K(1);
        const K qj = ((j - 1) % 2 != 0) ? K(-1) : K(1);

        // Internal hom differential within level j.
        if (const Mat<K>* blk = h.complex.diff.block(p)) {
            for (int ii = 0; ii < blk->rows(); ++ii) {
                const K c = (*blk)(ii, i);
                if (is_zero(c)) continue;
                const int toff = offsets.at({j, p + 1, ii});
                for (auto& [st, ent] : id_e.entries)
                    detail::add_entry(tot, off + st.first, toff + st.second, ent.scaled(sj * c));
            }
        }

        if (j >= 2) {
            // f |-> f o eps, expanded over the hom basis.
            Morphism<K> b;
            b.degree = p;
            b.set_entry(g.s, g.t, AlgElem<K>::single(g.b, K(1)));
            const Vec<K> w =
                h.from_morphism(compose(e.object, e.object, n, b, e.epsilon_endo));
            for (Eigen::Index ii = 0; ii < w.size(); ++ii) {
                if (is_zero(w[ii])) continue;
                const int toff = offsets.at({j - 1, p + d, static_cast<int>(ii)});
                for (auto& [st, ent] : id_e.entries)
                    detail::add_entry(tot, off + st.first, toff + st.second, ent.scaled(w[ii]));
            }
            // eps acting on the E factor.
            const int toff = offsets.at({j - 1, p, i});
            for (auto& [st, ent] : e.epsilon_endo.entries)
                detail::add_entry(tot, off + st.first, toff + st.second, ent.scaled(qj));
        } else {
            // Evaluation onto N.
            detail::add_entry(tot, off + g.s, n_off + g.t, AlgElem<K>::single(g.b, K(1)));
        }
    }

    object_audit(tot, "twist power total complex");
    minimize(tot);
    return tot;
}

template <class K>
struct FundamentalInequalityReport {
    long long lhs = 0;
    long long rhs = 0;
    bool holds = false;
};

// i(E,M) i(E,N) <= i(T_E^k M, N) + i(M, N); a violation is a soundness bug in
// the caller's hands, reported here as data.
template <class K>
FundamentalInequalityReport<K> check_fundamental_inequality(const SphericalObject<K>& e,
                                                            const Object<K>& m,
                                                            const Object<K>& n, int k) {
    require(k != 0, errc::usage, "ZeroPower: the inequality is about nonzero powers");
    FundamentalInequalityReport<K> r;
    const long long iem = intersection_number(e.object, m).total;
    const long long ien = intersection_number(e.object, n).total;
    r.lhs = iem * ien;
    const Object<K> tm = twist_power(e, k, m);
    r.rhs = intersection_number(tm, n).total + intersection_number(m, n).total;
    r.holds = r.lhs <= r.rhs;
    return r;
}

// Hom(E, N) as a right module over the graded dual numbers K[eps]/(eps^2):
// the action is post-composition f |-> (-1)^(d p) f o eps, the sign making
// the module relation d o eps = (-1)^d eps o d hold on the nose.
template <class K>
ADModule<K> rhom_as_ad_module(const SphericalObject<K>& e, const Object<K>& n) {
    require(e.object.alg == n.alg && n.alg != nullptr, errc::usage,
            "AlgebraMismatch: hom module needs objects over one algebra");
    auto h = hom_complex(e.object, n);
    ADModule<K> m;
    m.space = h.complex.space;
    m.differential = h.complex.diff;
    m.epsilon.degree = e.d;
    for (auto& [p, lst] : h.gens) {
        if (h.dim(p + e.d) == 0) continue;
        Mat<K> blk = zeros<K>(h.dim(p + e.d), static_cast<int>(lst.size()));
        const K sign = (static_cast<long long>(e.d) * p) % 2 != 0 ? K(-1) : K(1);
        for (int i = 0; i < static_cast<int>(lst.size()); ++i) {
            const auto& g = lst[static_cast<std::size_t>(i)];
            Morphism<K> b;
            b.degree = p;
            b.set_entry(g.s, g.t, AlgElem<K>::single(g.b, K(1)));
            const Morphism<K> be =
                morphism_scale(compose(e.object, e.object, n, b, e.epsilon_endo), sign);
            blk.col(i) = h.from_morphism(be);
        }
        if (!is_zero_matrix(blk)) m.epsilon.set_block(p, blk);
    }
    m.d = e.d;
    m.side = Side::Right;
    admodule_audit(m, "hom module");
    return m;
}

// Hom(M, E) as a left module: the action is pre-composition f |-> eps o f,
// which satisfies the module relation with no extra sign.
template <class K>
ADModule<K> lhom_as_ad_module(const Object<K>& m0, const SphericalObject<K>& e) {
    require(e.object.alg == m0.alg && m0.alg != nullptr, errc::usage,
            "AlgebraMismatch: hom module needs objects over one algebra");
    auto h = hom_complex(m0, e.object);
    ADModule<K> m;
    m.space = h.complex.space;
    m.differential = h.complex.diff;
    m.epsilon.degree = e.d;
    for (auto& [p, lst] : h.gens) {
        if (h.dim(p + e.d) == 0) continue;
        Mat<K> blk = zeros<K>(h.dim(p + e.d), static_cast<int>(lst.size()));
        for (int i = 0; i < static_cast<int>(lst.size()); ++i) {
            const auto& g = lst[static_cast<std::size_t>(i)];
            Morphism<K> b;
            b.degree = p;
            b.set_entry(g.s, g.t, AlgElem<K>::single(g.b, K(1)));
            Morphism<K> eb = compose(m0, e.object, e.object, e.epsilon_endo, b);
            eb.degree = p + e.d;
            blk.col(i) = h.from_morphism(eb);
        }
        if (!is_zero_matrix(blk)) m.epsilon.set_block(p, blk);
    }
    m.d = e.d;
    m.side = Side::Left;
    admodule_audit(m, "hom module");
    return m;
}

template <class K>
struct SeparationReport {
    Object<K> s;
    IntersectionProfile<K> profile1;
    IntersectionProfile<K> profile2;
    std::optional<Object<K>> z; // the evaluation source, when the cone branch ran
};

// An object S with i(E1, S) > i(E2, S), following the three-branch
// construction: for small or large intersection one of the pair itself
// works; at i = 2 the cone over the evaluation
//   E1[-d]  (+)  Hom(E2,E1)-classes tensor E2  ->  E1
// separates.
template <class K>
SeparationReport<K> build_separating_object(const SphericalObject<K>& e1,
                                            const SphericalObject<K>& e2) {
    require(e1.object.alg == e2.object.alg && e1.object.alg != nullptr, errc::usage,
            "AlgebraMismatch: separation needs objects over one algebra");
    require(e1.d == e2.d, errc::usage, "separation needs equal spherical degrees");
    require(!iso_up_to_shift(e1.object, e2.object).has_value(), errc::not_distinct,
            "NotDistinct: the objects agree up to shift");

    SeparationReport<K> rep;
    const int i12 = intersection_number(e1.object, e2.object).total;
    if (i12 <= 1) {
        rep.s = e1.object;
    } else if (i12 >= 3) {
        rep.s = e2.object;
    } else {
        Object<K> source;
        source.alg = e1.object.alg;
        Morphism<K> ev;
        const int off0 = detail::append_summands(source, shift_object(e1.object, -e1.d));
        for (auto& [st, ent] : e1.epsilon_endo.entries)
            ev.set_entry(off0 + st.first, st.second, ent);
        auto h = hom_complex(e2.object, e1.object);
        for (auto& [p, lst] : h.gens) {
            (void)lst;
            for (auto& repv : cocycle_representatives(h, p)) {
                const Morphism<K> f = h.to_morphism(p, repv);
                const int off = detail::append_summands(source, shift_object(e2.object, -p));
                for (auto& [st, ent] : f.entries)
                    ev.set_entry(off + st.first, st.second, ent);
            }
        }
        rep.z = source;
        Object<K> c = dg_cone(source, e1.object, ev);
        minimize(c);
        rep.s = c;
    }
    rep.profile1 = intersection_number(e1.object, rep.s);
    rep.profile2 = intersection_number(e2.object, rep.s);
    require(rep.profile1.total > rep.profile2.total, errc::soundness,
            "separating object failed to separate");
    return rep;
}

struct DistinctnessReport {
    bool not_shift_of_each_other = false; // condition (i)
    bool misses_identity = false;         // condition (ii)
    bool epsilon_composites_vanish = false; // condition (iii)
    bool distinct = false;
};

namespace detail {

// Coefficient of [id] in the class of a closed degree-0 endomorphism.
template <class K>
K identity_class_coefficient(const Object<K>& x, const HomData<K>& h, const Morphism<K>& c) {
    const Vec<K> v = h.from_morphism(c);
    const Vec<K> idv = h.from_morphism(identity_morphism(x));
    const Mat<K>* prev = h.complex.diff.block(-1);
    const int dim = h.dim(0);
    const int cols = prev ? static_cast<int>(prev->cols()) : 0;
    Mat<K> a = zeros<K>(dim, cols + 1);
    if (prev) a.leftCols(cols) = *prev;
    a.col(cols) = idv;
    const auto sol = solve<K>(a, Mat<K>(v));
    require(sol.has_value(), errc::invariant, "closed degree-0 endomorphism outside im + K id");
    return (*sol)(cols, 0);
}

// Does any composite of cocycle representatives hom(a,b) x hom(b,a) hit the
// identity class of End(a)?
template <class K>
bool composites_hit_identity(const Object<K>& a, const Object<K>& b) {
    auto hab = hom_complex(a, b);
    auto hba = hom_complex(b, a);
    auto haa = hom_complex(a, a);
    for (auto& [p, lst] : hab.gens) {
        (void)lst;
        if (hba.dim(-p) == 0) continue;
        for (auto& u : cocycle_representatives(hab, p)) {
            const Morphism<K> f = hab.to_morphism(p, u);
            for (auto& w : cocycle_representatives(hba, -p)) {
                const Morphism<K> g = hba.to_morphism(-p, w);
                Morphism<K> c = compose(a, b, a, g, f);
                c.degree = 0;
                if (!is_zero(identity_class_coefficient(a, haa, c))) return true;
            }
        }
    }
    return false;
}

// Do all composites eps_a then hom(a,b) vanish in cohomology?
template <class K>
bool epsilon_composites_vanish_dir(const SphericalObject<K>& ea, const Object<K>& b) {
    auto hab = hom_complex(ea.object, b);
    for (auto& [p, lst] : hab.gens) {
        (void)lst;
        for (auto& u : cocycle_representatives(hab, p)) {
            const Morphism<K> f = hab.to_morphism(p, u);
            Morphism<K> c = compose(ea.object, ea.object, b, f, ea.epsilon_endo);
            c.degree = p + ea.d;
            if (!hom_class_is_zero(hab, p + ea.d, hab.from_morphism(c))) return false;
        }
    }
    return true;
}

} // namespace detail

// The three equivalent distinctness conditions, each computed independently;
// disagreement is a soundness failure.
template <class K>
DistinctnessReport distinctness_criteria(const SphericalObject<K>& e1,
                                         const SphericalObject<K>& e2) {
    require(e1.object.alg == e2.object.alg && e1.object.alg != nullptr, errc::usage,
            "AlgebraMismatch: distinctness needs objects over one algebra");
    require(e1.d == e2.d, errc::usage, "distinctness needs equal spherical degrees");
    DistinctnessReport r;
    r.not_shift_of_each_other = !iso_up_to_shift(e1.object, e2.object).has_value();
    r.misses_identity = !detail::composites_hit_identity(e1.object, e2.object) &&
                        !detail::composites_hit_identity(e2.object, e1.object);
    r.epsilon_composites_vanish = detail::epsilon_composites_vanish_dir(e1, e2.object) &&
                                  detail::epsilon_composites_vanish_dir(e2, e1.object);
    require(r.not_shift_of_each_other == r.misses_identity &&
                r.misses_identity == r.epsilon_composites_vanish,
            errc::soundness, "distinctness criteria disagree");
    r.distinct = r.not_shift_of_each_other;
    return r;
}

} // namespace sphertwist
