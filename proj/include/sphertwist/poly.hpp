#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "sphertwist/error.hpp"
#include "sphertwist/field.hpp"
#include "sphertwist/matrix.hpp"

namespace sphertwist {

// Element of K[q]. Sparse, exponents strictly increasing, no stored zeros.
// The internal degree of q (1-d in every caller) is bookkept by the caller;
// the ring itself is plain univariate.
template <class K>
class Poly {
public:
    Poly() = default;
    Poly(K c) {
        if (!is_zero(c)) terms_.push_back({0, c});
    }
    Poly(int c) : Poly(K(c)) {}

    static Poly monomial(int exponent, K coeff) {
        Poly p;
        if (!is_zero(coeff)) {
            require(exponent >= 0, errc::invariant, "negative exponent in K[q]");
            p.terms_.push_back({exponent, coeff});
        }
        return p;
    }
    static Poly q() { return monomial(1, K(1)); }

    const std::vector<std::pair<int, K>>& terms() const { return terms_; }
    bool is_zero_poly() const { return terms_.empty(); }
    bool is_monomial() const { return terms_.size() <= 1; }

    int degree() const { return terms_.empty() ? -1 : terms_.back().first; }
    int order() const { return terms_.empty() ? -1 : terms_.front().first; } // lowest exponent
    K leading() const { return terms_.empty() ? K(0) : terms_.back().second; }

    bool is_unit() const { return terms_.size() == 1 && terms_[0].first == 0; }

    K coeff(int e) const {
        for (auto& [ex, c] : terms_)
            if (ex == e) return c;
        return K(0);
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r;
        std::size_t i = 0, j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            if (j == b.terms_.size() || (i < a.terms_.size() && a.terms_[i].first < b.terms_[j].first)) {
                r.terms_.push_back(a.terms_[i++]);
            } else if (i == a.terms_.size() || b.terms_[j].first < a.terms_[i].first) {
                r.terms_.push_back(b.terms_[j++]);
            } else {
                K c = a.terms_[i].second + b.terms_[j].second;
                if (!is_zero(c)) r.terms_.push_back({a.terms_[i].first, c});
                ++i;
                ++j;
            }
        }
        return r;
    }
    Poly operator-() const {
        Poly r = *this;
        for (auto& [e, c] : r.terms_) c = -c;
        return r;
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
    friend Poly operator*(const Poly& a, const Poly& b) {
        std::map<int, K> acc;
        for (auto& [ea, ca] : a.terms_)
            for (auto& [eb, cb] : b.terms_) acc[ea + eb] += ca * cb;
        Poly r;
        for (auto& [e, c] : acc)
            if (!is_zero(c)) r.terms_.push_back({e, c});
        return r;
    }
    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    // Euclidean division: *this = q·b + r with deg r < deg b.
    std::pair<Poly, Poly> divmod(const Poly& b) const {
        require(!b.is_zero_poly(), errc::invariant, "division by zero in K[q]");
        Poly quo, rem = *this;
        K lead_inv = K(1) / b.leading();
        while (!rem.is_zero_poly() && rem.degree() >= b.degree()) {
            int e = rem.degree() - b.degree();
            K c = rem.leading() * lead_inv;
            Poly t = monomial(e, c);
            quo += t;
            rem -= t * b;
        }
        return {quo, rem};
    }

    Poly monic() const {
        if (is_zero_poly()) return *this;
        Poly r = *this;
        K inv = K(1) / leading();
        for (auto& [e, c] : r.terms_) c = c * inv;
        return r;
    }

    friend std::ostream& operator<<(std::ostream& os, const Poly& p) {
        if (p.is_zero_poly()) return os << "0";
        bool first = true;
        for (auto& [e, c] : p.terms_) {
            if (!first) os << " + ";
            first = false;
            os << field_to_string(c);
            if (e == 1)
                os << "*q";
            else if (e > 1)
                os << "*q^" << e;
        }
        return os;
    }

private:
    std::vector<std::pair<int, K>> terms_;
};

template <class K>
bool is_zero(const Poly<K>& p) {
    return p.is_zero_poly();
}

template <class K>
Poly<K> poly_gcd(Poly<K> a, Poly<K> b) {
    while (!b.is_zero_poly()) {
        auto [q_, r] = a.divmod(b);
        (void)q_;
        a = b;
        b = r;
    }
    return a.monic();
}

// ---------------------------------------------------------------------------
// Smith normal form over K[q] (Euclidean domain). Row/column elimination with
// the minimal-degree pivot, leftmost column first; returns u, v invertible
// with u·m·v diagonal, entries monic, each dividing the next.
// ---------------------------------------------------------------------------

template <class K>
struct SnfPolyResult {
    Mat<Poly<K>> u, v;
    std::vector<Poly<K>> diag;
};

namespace detail {

template <class K>
bool snf_find_pivot(const Mat<Poly<K>>& m, Eigen::Index from, Eigen::Index& pr, Eigen::Index& pc) {
    int best = -1;
    for (Eigen::Index j = from; j < m.cols(); ++j)
        for (Eigen::Index i = from; i < m.rows(); ++i) {
            const auto& e = m(i, j);
            if (e.is_zero_poly()) continue;
            if (best < 0 || e.degree() < best) {
                best = e.degree();
                pr = i;
                pc = j;
            }
        }
    return best >= 0;
}

} // namespace detail

template <class K>
SnfPolyResult<K> smith_normal_form_poly(Mat<Poly<K>> m) {
    using P = Poly<K>;
    const Eigen::Index rows = m.rows(), cols = m.cols();
    const Eigen::Index n = std::min(rows, cols);
    SnfPolyResult<K> out;
    out.u = identity<P>(rows);
    out.v = identity<P>(cols);

    auto diagonalize_from = [&](Eigen::Index t0) {
        for (Eigen::Index t = t0; t < n; ++t) {
            Eigen::Index pr = t, pc = t;
            if (!detail::snf_find_pivot(m, t, pr, pc)) break;
            if (pr != t) {
                m.row(pr).swap(m.row(t));
                out.u.row(pr).swap(out.u.row(t));
            }
            if (pc != t) {
                m.col(pc).swap(m.col(t));
                out.v.col(pc).swap(out.v.col(t));
            }
            // Reduce until row t and column t are zero outside the pivot; a
            // nonzero remainder has strictly smaller degree and is swapped in
            // as the new pivot, so this terminates.
            bool clean = false;
            while (!clean) {
                clean = true;
                for (Eigen::Index i = t + 1; i < rows; ++i) {
                    if (m(i, t).is_zero_poly()) continue;
                    auto [q_, r] = m(i, t).divmod(m(t, t));
                    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) -= q_ * m(t, j);
                    for (Eigen::Index j = 0; j < rows; ++j) out.u(i, j) -= q_ * out.u(t, j);
                    if (!r.is_zero_poly()) {
                        m.row(i).swap(m.row(t));
                        out.u.row(i).swap(out.u.row(t));
                        clean = false;
                    }
                }
                for (Eigen::Index j = t + 1; j < cols; ++j) {
                    if (m(t, j).is_zero_poly()) continue;
                    auto [q_, r] = m(t, j).divmod(m(t, t));
                    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) -= m(i, t) * q_;
                    for (Eigen::Index i = 0; i < cols; ++i) out.v(i, j) -= out.v(i, t) * q_;
                    if (!r.is_zero_poly()) {
                        m.col(j).swap(m.col(t));
                        out.v.col(j).swap(out.v.col(t));
                        clean = false;
                    }
                }
            }
        }
    };

    diagonalize_from(0);

    // Enforce the divisibility chain: fold an offending later column into the
    // earlier one and re-diagonalize from there. Each repair replaces d_t by a
    // strict divisor (the gcd enters at position t), so the loop terminates.
    bool changed = true;
    while (changed) {
        changed = false;
        for (Eigen::Index t = 0; t < n && !changed; ++t) {
            if (m(t, t).is_zero_poly()) continue;
            for (Eigen::Index s = t + 1; s < n && !changed; ++s) {
                if (m(s, s).is_zero_poly()) continue;
                auto [q_, r] = m(s, s).divmod(m(t, t));
                (void)q_;
                if (r.is_zero_poly()) continue;
                for (Eigen::Index i = 0; i < rows; ++i) m(i, t) += m(i, s);
                for (Eigen::Index i = 0; i < cols; ++i) out.v(i, t) += out.v(i, s);
                diagonalize_from(t);
                changed = true;
            }
        }
    }

    // Monic normalization (unit row scalings).
    for (Eigen::Index t = 0; t < n; ++t) {
        if (m(t, t).is_zero_poly()) continue;
        K c = m(t, t).leading();
        if (is_one(c)) continue;
        K inv = K(1) / c;
        for (Eigen::Index j = 0; j < cols; ++j) m(t, j) = m(t, j) * Poly<K>(inv);
        for (Eigen::Index j = 0; j < rows; ++j) out.u(t, j) = out.u(t, j) * Poly<K>(inv);
    }

    out.diag.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index t = 0; t < n; ++t) out.diag.push_back(m(t, t));
    return out;
}

// ---------------------------------------------------------------------------
// Graded SNF. In the structure-theorem pipeline every matrix is homogeneous
// with respect to row/column internal degrees with deg(q) = 1-d != 0, which
// forces every entry to be a monomial and every Euclidean step to divide
// exactly. Pivot = globally minimal q-exponent, so the diagonal comes out
// divisibility-ordered by construction. Tracks v, v^{-1} and the degree data;
// u is not needed by the caller.
// ---------------------------------------------------------------------------

template <class K>
struct GradedSnfResult {
    Mat<Poly<K>> mat;          // the diagonalized matrix
    Mat<Poly<K>> v, vinv;      // column transform and its inverse
    std::vector<int> row_deg;  // degrees after row permutation
    std::vector<int> col_deg;  // degrees after column ops
    int rank = 0;              // number of nonzero diagonal entries
};

template <class K>
GradedSnfResult<K> graded_snf(Mat<Poly<K>> m, std::vector<int> row_deg, std::vector<int> col_deg) {
    using P = Poly<K>;
    const Eigen::Index rows = m.rows(), cols = m.cols();
    require(static_cast<Eigen::Index>(row_deg.size()) == rows &&
                static_cast<Eigen::Index>(col_deg.size()) == cols,
            errc::invariant, "graded_snf: degree vector mismatch");

    GradedSnfResult<K> out;
    out.v = identity<P>(cols);
    out.vinv = identity<P>(cols);

    for (Eigen::Index t = 0; t < std::min(rows, cols); ++t) {
        // Globally minimal exponent; ties broken leftmost column, topmost row.
        Eigen::Index pr = -1, pc = -1;
        int best = -1;
        for (Eigen::Index j = t; j < cols; ++j)
            for (Eigen::Index i = t; i < rows; ++i) {
                const P& e = m(i, j);
                if (e.is_zero_poly()) continue;
                require(e.is_monomial(), errc::invariant, "graded_snf: non-monomial entry");
                if (best < 0 || e.order() < best) {
                    best = e.order();
                    pr = i;
                    pc = j;
                }
            }
        if (best < 0) break;
        if (pr != t) {
            m.row(pr).swap(m.row(t));
            std::swap(row_deg[pr], row_deg[t]);
        }
        if (pc != t) {
            m.col(pc).swap(m.col(t));
            out.v.col(pc).swap(out.v.col(t));
            out.vinv.row(pc).swap(out.vinv.row(t));
            std::swap(col_deg[pc], col_deg[t]);
        }
        const P piv = m(t, t);
        for (Eigen::Index i = t + 1; i < rows; ++i) {
            if (m(i, t).is_zero_poly()) continue;
            auto [q_, r] = m(i, t).divmod(piv);
            require(r.is_zero_poly(), errc::invariant, "graded_snf: inexact row step");
            for (Eigen::Index j = t; j < cols; ++j) m(i, j) -= q_ * m(t, j);
        }
        for (Eigen::Index j = t + 1; j < cols; ++j) {
            if (m(t, j).is_zero_poly()) continue;
            auto [q_, r] = m(t, j).divmod(piv);
            require(r.is_zero_poly(), errc::invariant, "graded_snf: inexact column step");
            for (Eigen::Index i = t; i < rows; ++i) m(i, j) -= m(i, t) * q_;
            // v ← v·F,  vinv ← F^{-1}·vinv  for the elementary op F.
            for (Eigen::Index i = 0; i < cols; ++i) out.v(i, j) -= out.v(i, t) * q_;
            for (Eigen::Index i = 0; i < cols; ++i) out.vinv(t, i) += q_ * out.vinv(j, i);
        }
        ++out.rank;
    }

    out.mat = std::move(m);
    out.row_deg = std::move(row_deg);
    out.col_deg = std::move(col_deg);
    return out;
}

} // namespace sphertwist
