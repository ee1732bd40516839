#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "sphertwist/field.hpp"
#include "sphertwist/matrix.hpp"
#include "sphertwist/poly.hpp"
#include "sphertwist/rng.hpp"

using namespace sphertwist;

TYPE_TO_STRING(sphertwist::Fp);
TYPE_TO_STRING(sphertwist::Rational);

namespace {

template <class K>
bool mat_eq(const Mat<K>& a, const Mat<K>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (!(a(i, j) == b(i, j))) return false;
    return true;
}

template <class K>
Mat<K> random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
    Mat<K> m = zeros<K>(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
        for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.field_element<K>();
    return m;
}

template <class K>
Mat<K> random_invertible(Rng& rng, Eigen::Index n) {
    for (;;) {
        Mat<K> m = random_matrix<K>(rng, n, n);
        if (is_invertible(m)) return m;
    }
}

template <class K>
Poly<K> random_poly(Rng& rng, int max_deg) {
    Poly<K> p;
    for (int e = 0; e <= max_deg; ++e)
        if (rng.coin()) p += Poly<K>::monomial(e, rng.field_element<K>());
    return p;
}

// Laplace-expansion determinant, fine at the 4x4 sizes used here. Over K[q]
// a matrix is invertible iff its determinant is a nonzero constant.
template <class K>
Poly<K> poly_det(const Mat<Poly<K>>& m) {
    const Eigen::Index n = m.rows();
    if (n == 0) return Poly<K>(K(1));
    if (n == 1) return m(0, 0);
    Poly<K> acc;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (m(i, 0).is_zero_poly()) continue;
        Mat<Poly<K>> minor = zeros<Poly<K>>(n - 1, n - 1);
        for (Eigen::Index r = 0, rr = 0; r < n; ++r) {
            if (r == i) continue;
            for (Eigen::Index c = 1; c < n; ++c) minor(rr, c - 1) = m(r, c);
            ++rr;
        }
        Poly<K> term = m(i, 0) * poly_det<K>(minor);
        acc = (i % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

template <class K>
K eval_poly(const Poly<K>& p, const K& x) {
    K acc(0), pw(1);
    int e = 0;
    for (auto& [ex, c] : p.terms()) {
        while (e < ex) {
            pw = pw * x;
            ++e;
        }
        acc = acc + c * pw;
    }
    return acc;
}

} // namespace

TEST_CASE("rank of the empty matrix and identities") {
    Mat<Fp> e = zeros<Fp>(0, 0);
    CHECK(rank_of(e) == 0);
    auto rki = rank_kernel_image(e);
    CHECK(rki.rank == 0);
    CHECK(rki.kernel.cols() == 0);
    CHECK(rki.image.cols() == 0);

    {
        modulus_guard g(5);
        CHECK(rank_of(identity<Fp>(3)) == 3);
        CHECK(rank_kernel_image(identity<Fp>(3)).kernel.cols() == 0);
    }
    CHECK(rank_of(identity<Rational>(4)) == 4);
    CHECK(rank_of(zeros<Rational>(3, 7)) == 0);
}

TEST_CASE_TEMPLATE("planted rank factors through kernel and image", K, Fp, Rational) {
    Rng rng(42);
    // A = u1 v1^T + u2 v2^T with independent factors: rank exactly 2.
    Mat<K> u = zeros<K>(4, 2), v = zeros<K>(2, 6);
    u(0, 0) = K(1);
    u(2, 0) = K(1);
    u(3, 0) = K(2);
    u(1, 1) = K(1);
    u(2, 1) = K(3);
    u(3, 1) = K(1);
    v(0, 0) = K(1);
    v(1, 1) = K(1);
    for (Eigen::Index j = 2; j < 6; ++j) {
        v(0, j) = rng.field_element<K>();
        v(1, j) = rng.field_element<K>();
    }
    Mat<K> a = u * v;

    auto rki = rank_kernel_image(a);
    CHECK(rki.rank == 2);
    CHECK(rki.kernel.cols() == 4);
    CHECK(is_zero_matrix<K>(a * rki.kernel));
    CHECK(rank_of(rki.kernel) == 4);
    CHECK(rki.image.cols() == 2);

    // The image columns lie in (and span) the column space.
    Mat<K> both = zeros<K>(4, 8);
    both.leftCols(6) = a;
    both.rightCols(2) = rki.image;
    CHECK(rank_of(both) == 2);
}

TEST_CASE_TEMPLATE("solve and inverse round-trip", K, Fp, Rational) {
    Rng rng(7);
    Mat<K> m = random_invertible<K>(rng, 5);
    Mat<K> x = random_matrix<K>(rng, 5, 2);
    Mat<K> b = m * x;

    auto y = solve<K>(m, b);
    REQUIRE(y.has_value());
    CHECK(mat_eq<K>(*y, x));

    auto minv = inverse<K>(m);
    REQUIRE(minv.has_value());
    CHECK(mat_eq<K>(m * *minv, identity<K>(5)));
    CHECK(mat_eq<K>(*minv * m, identity<K>(5)));

    // Inconsistent system: b outside the column span.
    Mat<K> tall = zeros<K>(2, 1);
    tall(0, 0) = K(1);
    tall(1, 0) = K(1);
    Mat<K> rhs = zeros<K>(2, 1);
    rhs(0, 0) = K(1);
    rhs(1, 0) = K(2);
    CHECK(!solve<K>(tall, rhs).has_value());

    Mat<K> sing = zeros<K>(3, 3);
    sing(0, 0) = K(1);
    CHECK(!inverse<K>(sing).has_value());
    CHECK(!is_invertible(sing));
}

TEST_CASE("rref is idempotent with increasing pivots") {
    Rng rng(11);
    Mat<Fp> m = random_matrix<Fp>(rng, 4, 7);
    m.row(3) = m.row(0) + m.row(1); // force a dependency
    Mat<Fp> r = m;
    auto pivots = rref(r);
    for (std::size_t i = 1; i < pivots.size(); ++i) CHECK(pivots[i - 1] < pivots[i]);
    Mat<Fp> r2 = r;
    auto pivots2 = rref(r2);
    CHECK(pivots == pivots2);
    CHECK(mat_eq<Fp>(r, r2));
    CHECK(static_cast<int>(pivots.size()) == rank_of(m));
}

TEST_CASE_TEMPLATE("polynomial ring arithmetic", K, Fp, Rational) {
    using P = Poly<K>;
    P q = P::q();
    P one(K(1));

    CHECK((q + one) * (q - one) == q * q - one);
    CHECK((q + one) - (q + one) == P());
    CHECK(P().is_zero_poly());
    CHECK(P::monomial(3, K(3)).monic() == P::monomial(3, K(1)));
    CHECK(P::monomial(2, K(1)).degree() == 2);
    CHECK((q * q + q).order() == 1);

    Rng rng(3);
    for (int trial = 0; trial < 25; ++trial) {
        P a = random_poly<K>(rng, 6);
        P b;
        while (b.is_zero_poly()) b = random_poly<K>(rng, 3);
        auto [quo, rem] = a.divmod(b);
        CHECK(a == quo * b + rem);
        CHECK(rem.degree() < b.degree());
    }

    P g = (q + one) * (q + P(K(2)));
    P a = g * (q - one);
    P b = g * (q + P(K(3)));
    CHECK(poly_gcd(a, b) == g.monic());
    CHECK(poly_gcd(P(), a) == a.monic());
}

TEST_CASE_TEMPLATE("smith normal form sorts and witnesses", K, Fp, Rational) {
    using P = Poly<K>;
    P q = P::q();

    // diag(q^2, q) comes out as (q, q^2): ordered by divisibility.
    Mat<P> m = zeros<P>(2, 2);
    m(0, 0) = q * q;
    m(1, 1) = q;
    auto s = smith_normal_form_poly<K>(m);
    REQUIRE(s.diag.size() == 2);
    CHECK(s.diag[0] == q);
    CHECK(s.diag[1] == q * q);
    Mat<P> d = s.u * m * s.v;
    CHECK(d(0, 0) == q);
    CHECK(d(1, 1) == q * q);
    CHECK(d(0, 1).is_zero_poly());
    CHECK(d(1, 0).is_zero_poly());
    CHECK(poly_det<K>(s.u).is_unit());
    CHECK(poly_det<K>(s.v).is_unit());

    // Zero matrix: all-zero diagonal.
    Mat<P> z = zeros<P>(3, 2);
    auto sz = smith_normal_form_poly<K>(z);
    for (auto& e : sz.diag) CHECK(e.is_zero_poly());

    // Leading-coefficient normalization.
    Mat<P> c = zeros<P>(1, 1);
    c(0, 0) = P::monomial(3, K(3));
    CHECK(smith_normal_form_poly<K>(c).diag[0] == P::monomial(3, K(1)));
}

TEST_CASE_TEMPLATE("smith normal form on random matrices", K, Fp, Rational) {
    using P = Poly<K>;
    Rng rng(19);
    for (int trial = 0; trial < 8; ++trial) {
        Mat<P> m = zeros<P>(4, 4);
        for (Eigen::Index j = 0; j < 4; ++j)
            for (Eigen::Index i = 0; i < 4; ++i)
                if (rng.below(3) != 0) m(i, j) = random_poly<K>(rng, 2);

        auto s = smith_normal_form_poly<K>(m);
        Mat<P> d = s.u * m * s.v;
        for (Eigen::Index j = 0; j < 4; ++j)
            for (Eigen::Index i = 0; i < 4; ++i) {
                if (i == j)
                    CHECK(d(i, j) == s.diag[static_cast<std::size_t>(i)]);
                else
                    CHECK(d(i, j).is_zero_poly());
            }
        CHECK(poly_det<K>(s.u).is_unit());
        CHECK(poly_det<K>(s.v).is_unit());

        // Divisibility chain, with zeros only at the tail.
        for (std::size_t t = 1; t < s.diag.size(); ++t) {
            if (s.diag[t].is_zero_poly()) continue;
            REQUIRE(!s.diag[t - 1].is_zero_poly());
            auto [quo, rem] = s.diag[t].divmod(s.diag[t - 1]);
            (void)quo;
            CHECK(rem.is_zero_poly());
        }

        // Invariance under invertible row/column mixing.
        Mat<P> m2 = m;
        for (int k = 0; k < 6; ++k) {
            Eigen::Index i = static_cast<Eigen::Index>(rng.below(4));
            Eigen::Index j = static_cast<Eigen::Index>(rng.below(4));
            if (i == j) continue;
            P f = random_poly<K>(rng, 1);
            if (rng.coin())
                for (Eigen::Index c = 0; c < 4; ++c) m2(i, c) += f * m2(j, c);
            else
                for (Eigen::Index r = 0; r < 4; ++r) m2(r, i) += f * m2(r, j);
        }
        auto s2 = smith_normal_form_poly<K>(m2);
        REQUIRE(s2.diag.size() == s.diag.size());
        for (std::size_t t = 0; t < s.diag.size(); ++t) CHECK(s2.diag[t] == s.diag[t]);
    }
}

TEST_CASE("graded snf diagonalizes the rank-one dual-number matrix") {
    using P = Poly<Fp>;
    Mat<P> m = zeros<P>(2, 2);
    m(1, 0) = P::q();
    auto g = graded_snf<Fp>(m, {0, 2}, {0, 2});
    CHECK(g.rank == 1);
    CHECK(g.mat(0, 0) == P::q());
    CHECK(g.mat(0, 1).is_zero_poly());
    CHECK(g.mat(1, 0).is_zero_poly());
    CHECK(g.mat(1, 1).is_zero_poly());
    CHECK(g.row_deg == std::vector<int>{2, 0});
    CHECK(g.col_deg == std::vector<int>{0, 2});
    CHECK(mat_eq<P>(g.v, identity<P>(2)));
    CHECK(mat_eq<P>(g.vinv, identity<P>(2)));
}

TEST_CASE("graded snf on random homogeneous matrices") {
    using P = Poly<Fp>;
    // Degree bookkeeping below uses q of internal degree -1 (the d = 2 case):
    // an entry col -> row with exponent a is homogeneous of map degree +1
    // exactly when a = row_deg - col_deg - 1.
    Rng rng(23);
    for (int trial = 0; trial < 12; ++trial) {
        const Eigen::Index rows = 5, cols = 4;
        std::vector<int> rd(rows), cd(cols);
        for (auto& x : rd) x = static_cast<int>(rng.below(5));
        for (auto& x : cd) x = static_cast<int>(rng.below(5));
        Mat<P> m = zeros<P>(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) {
                int a = rd[static_cast<std::size_t>(i)] - cd[static_cast<std::size_t>(j)] - 1;
                if (a >= 0 && rng.coin()) m(i, j) = P::monomial(a, rng.nonzero_field_element<Fp>());
            }

        auto g = graded_snf<Fp>(m, rd, cd);

        CHECK(mat_eq<P>(g.v * g.vinv, identity<P>(cols)));
        CHECK(mat_eq<P>(g.vinv * g.v, identity<P>(cols)));

        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) {
                const P& e = g.mat(i, j);
                if (i != j) CHECK(e.is_zero_poly());
                if (e.is_zero_poly()) continue;
                CHECK(e.is_monomial());
                // Homogeneity survives the elimination.
                CHECK(e.order() == g.row_deg[static_cast<std::size_t>(i)] -
                                       g.col_deg[static_cast<std::size_t>(j)] - 1);
            }

        // Exponents along the diagonal are nondecreasing (divisibility order).
        for (Eigen::Index t = 1; t < std::min(rows, cols); ++t) {
            if (g.mat(t, t).is_zero_poly()) continue;
            REQUIRE(!g.mat(t - 1, t - 1).is_zero_poly());
            CHECK(g.mat(t - 1, t - 1).order() <= g.mat(t, t).order());
        }

        // Columns of v beyond the rank are a kernel basis of the input.
        for (Eigen::Index j = g.rank; j < cols; ++j) {
            Mat<P> img = m * g.v.col(j);
            for (Eigen::Index i = 0; i < rows; ++i) CHECK(img(i, 0).is_zero_poly());
        }

        // Rank agrees with the rank over the fraction field, probed by
        // evaluation at random points (maximum over a few probes).
        int probed = 0;
        for (int probe = 0; probe < 4; ++probe) {
            Fp x = rng.nonzero_field_element<Fp>();
            Mat<Fp> mx = zeros<Fp>(rows, cols);
            for (Eigen::Index j = 0; j < cols; ++j)
                for (Eigen::Index i = 0; i < rows; ++i) mx(i, j) = eval_poly<Fp>(m(i, j), x);
            probed = std::max(probed, rank_of(mx));
        }
        CHECK(probed == g.rank);
    }
}

TEST_CASE("field literal parsing round-trips") {
    CHECK(field_from_string<Rational>("3/7") == Rational(3) / 7);
    CHECK(field_from_string<Rational>("-2") == Rational(-2));
    CHECK(field_to_string(Rational(1) / 3) == "1/3");
    CHECK(field_from_string<Fp>("12") == Fp(12));
    CHECK(field_from_string<Fp>("3/7") * Fp(7) == Fp(3));
    CHECK_THROWS_AS(field_from_string<Fp>("abc"), error);
    CHECK_THROWS_AS(field_from_string<Rational>("x/y"), error);
    CHECK_THROWS_AS(Fp::set_modulus(10), error);
    {
        modulus_guard g(101);
        CHECK(Fp::modulus() == 101);
        CHECK(Fp(100) + Fp(1) == Fp(0));
    }
    CHECK(Fp::modulus() == 32003);
}
