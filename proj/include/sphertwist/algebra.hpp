#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sphertwist/error.hpp"
#include "sphertwist/field.hpp"
#include "sphertwist/graded.hpp"
#include "sphertwist/matrix.hpp"

namespace sphertwist {

// Sparse linear combination of algebra basis elements, sorted by index.
template <class K>
struct AlgElem {
    std::vector<std::pair<int, K>> terms;

    static AlgElem zero() { return {}; }
    static AlgElem single(int idx, K c) {
        AlgElem e;
        if (!is_zero(c)) e.terms.push_back({idx, c});
        return e;
    }

    bool is_zero_elem() const { return terms.empty(); }

    K coeff(int idx) const {
        for (auto& [i, c] : terms)
            if (i == idx) return c;
        return K(0);
    }

    friend AlgElem operator+(const AlgElem& a, const AlgElem& b) {
        AlgElem r;
        std::size_t i = 0, j = 0;
        while (i < a.terms.size() || j < b.terms.size()) {
            if (j == b.terms.size() || (i < a.terms.size() && a.terms[i].first < b.terms[j].first))
                r.terms.push_back(a.terms[i++]);
            else if (i == a.terms.size() || b.terms[j].first < a.terms[i].first)
                r.terms.push_back(b.terms[j++]);
            else {
                K c = a.terms[i].second + b.terms[j].second;
                if (!is_zero(c)) r.terms.push_back({a.terms[i].first, c});
                ++i, ++j;
            }
        }
        return r;
    }
    AlgElem operator-() const {
        AlgElem r = *this;
        for (auto& [i, c] : r.terms) c = -c;
        return r;
    }
    friend AlgElem operator-(const AlgElem& a, const AlgElem& b) { return a + (-b); }
    AlgElem scaled(const K& c) const {
        AlgElem r;
        if (is_zero(c)) return r;
        r = *this;
        for (auto& [i, x] : r.terms) x = x * c;
        return r;
    }
    friend bool operator==(const AlgElem& a, const AlgElem& b) { return a.terms == b.terms; }
};

// Finite-dimensional graded associative algebra with orthogonal idempotents
// e_v, zero differential, and an optional Frobenius certificate. Every basis
// element is required to be bi-homogeneous: e_w·b = b and b·e_v = b for a
// unique pair (v, w). That pins each element as a morphism P_v -> P_w of
// right projectives (P_v = e_v·A), which is what the twisted-complex layer
// builds on.
template <class K>
class GradedAlgebra {
public:
    struct BasisElement {
        std::string label;
        int degree = 0;
        int src = -1; // v with b·e_v = b
        int tgt = -1; // w with e_w·b = b
    };

    struct Frobenius {
        int cy_dimension = 0;     // pairing has internal degree -cy_dimension
        std::vector<K> trace;     // linear functional on the basis
        Mat<K> pairing;           // pairing(i,j) = trace(b_j · b_i)
    };

    // --- construction ---------------------------------------------------

    GradedAlgebra(std::vector<std::pair<std::string, int>> basis_labels,
                  std::map<std::pair<int, int>, AlgElem<K>> products,
                  std::vector<int> idempotents,
                  std::optional<std::pair<int, std::vector<K>>> frobenius_trace = std::nullopt)
        : idempotents_(std::move(idempotents)) {
        const int n = static_cast<int>(basis_labels.size());
        basis_.resize(basis_labels.size());
        for (int i = 0; i < n; ++i) {
            basis_[i].label = basis_labels[i].first;
            basis_[i].degree = basis_labels[i].second;
        }
        products_.assign(static_cast<std::size_t>(n) * n, AlgElem<K>::zero());
        for (auto& [ij, e] : products) {
            require(ij.first >= 0 && ij.first < n && ij.second >= 0 && ij.second < n, errc::usage,
                    "product index out of range");
            products_[static_cast<std::size_t>(ij.first) * n + ij.second] = e;
        }
        if (frobenius_trace) {
            Frobenius f;
            f.cy_dimension = frobenius_trace->first;
            f.trace = frobenius_trace->second;
            require(static_cast<int>(f.trace.size()) == n, errc::usage, "Frobenius trace size mismatch");
            frobenius_ = std::move(f);
        }
        finalize();
    }

    // --- queries ----------------------------------------------------------

    int size() const { return static_cast<int>(basis_.size()); }
    const BasisElement& element(int i) const { return basis_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& idempotents() const { return idempotents_; }
    bool is_idempotent_index(int i) const {
        for (int e : idempotents_)
            if (e == i) return true;
        return false;
    }
    int idempotent_of_vertex(int v) const { return idempotents_[static_cast<std::size_t>(v)]; }
    int vertex_count() const { return static_cast<int>(idempotents_.size()); }

    const std::optional<Frobenius>& frobenius() const { return frobenius_; }

    // b_i · b_j (b_j applied first when elements are read as morphisms).
    const AlgElem<K>& basis_product(int i, int j) const {
        return products_[static_cast<std::size_t>(i) * size() + j];
    }

    AlgElem<K> mul(const AlgElem<K>& a, const AlgElem<K>& b) const {
        std::map<int, K> acc;
        for (auto& [i, ca] : a.terms)
            for (auto& [j, cb] : b.terms) {
                const AlgElem<K>& p = basis_product(i, j);
                K c = ca * cb;
                for (auto& [x, cx] : p.terms) acc[x] += c * cx;
            }
        AlgElem<K> r;
        for (auto& [x, c] : acc)
            if (!is_zero(c)) r.terms.push_back({x, c});
        return r;
    }

    // Degree of a homogeneous element; errc::invariant if mixed.
    int degree_of(const AlgElem<K>& a) const {
        require(!a.is_zero_elem(), errc::invariant, "degree of zero element");
        int d = basis_[static_cast<std::size_t>(a.terms[0].first)].degree;
        for (auto& [i, c] : a.terms)
            require(basis_[static_cast<std::size_t>(i)].degree == d, errc::invariant,
                    "inhomogeneous algebra element");
        return d;
    }

    // Indices of the hom-space basis e_w · A · e_v, sorted by (degree, index).
    const std::vector<int>& hom_basis(int v, int w) const {
        static const std::vector<int> empty;
        auto it = hom_basis_.find({v, w});
        return it == hom_basis_.end() ? empty : it->second;
    }

    // The right projective P_v = e_v·A: basis indices {b : tgt(b) = v} and dims.
    const std::vector<int>& projective_basis(int v) const {
        return projective_basis_[static_cast<std::size_t>(v)];
    }
    const GradedVectorSpace& projective_space(int v) const {
        return projective_space_[static_cast<std::size_t>(v)];
    }

    // True iff a = c·e_v with c invertible (the minimization pivots).
    std::optional<K> unit_scalar(const AlgElem<K>& a) const {
        if (a.terms.size() != 1) return std::nullopt;
        auto [i, c] = a.terms[0];
        if (!is_idempotent_index(i) || is_zero(c)) return std::nullopt;
        return c;
    }

    std::string describe(const AlgElem<K>& a) const {
        if (a.is_zero_elem()) return "0";
        std::string s;
        for (auto& [i, c] : a.terms) {
            if (!s.empty()) s += " + ";
            s += field_to_string(c) + "*" + basis_[static_cast<std::size_t>(i)].label;
        }
        return s;
    }

private:
    void finalize() {
        const int n = size();
        require(!idempotents_.empty(), errc::usage, "algebra needs at least one idempotent");

        // Orthogonality and unitality of the idempotent set.
        for (int a : idempotents_)
            for (int b : idempotents_) {
                AlgElem<K> expect = (a == b) ? AlgElem<K>::single(a, K(1)) : AlgElem<K>::zero();
                require(basis_product(a, b) == expect, errc::invariant,
                        "idempotents not orthogonal: " + basis_[a].label + "*" + basis_[b].label);
            }

        // Bi-homogeneity: unique source and target idempotent per basis element.
        for (int i = 0; i < n; ++i) {
            int src = -1, tgt = -1;
            AlgElem<K> me = AlgElem<K>::single(i, K(1));
            for (std::size_t vi = 0; vi < idempotents_.size(); ++vi) {
                int e = idempotents_[vi];
                if (basis_product(i, e) == me) {
                    require(src < 0, errc::invariant, "non-unique source idempotent for " + basis_[i].label);
                    src = static_cast<int>(vi);
                }
                if (basis_product(e, i) == me) {
                    require(tgt < 0, errc::invariant, "non-unique target idempotent for " + basis_[i].label);
                    tgt = static_cast<int>(vi);
                }
            }
            require(src >= 0 && tgt >= 0, errc::invariant,
                    "basis element not bi-homogeneous: " + basis_[i].label);
            basis_[i].src = src;
            basis_[i].tgt = tgt;
        }

        // Unit: the sum of idempotents acts as identity on the basis.
        for (int i = 0; i < n; ++i) {
            AlgElem<K> left = AlgElem<K>::zero(), right = AlgElem<K>::zero();
            for (int e : idempotents_) {
                left = left + basis_product(e, i);
                right = right + basis_product(i, e);
            }
            AlgElem<K> me = AlgElem<K>::single(i, K(1));
            require(left == me && right == me, errc::invariant,
                    "unit fails on basis element " + basis_[i].label);
        }

        // Degree additivity and src/tgt composability of all products.
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const AlgElem<K>& p = basis_product(i, j);
                if (p.is_zero_elem()) continue;
                require(basis_[i].src == basis_[j].tgt, errc::invariant,
                        "nonzero product of non-composable elements: " + basis_[i].label + "*" +
                            basis_[j].label);
                for (auto& [x, c] : p.terms) {
                    require(basis_[x].degree == basis_[i].degree + basis_[j].degree, errc::invariant,
                            "product not degree-additive: " + basis_[i].label + "*" + basis_[j].label);
                    require(basis_[x].src == basis_[j].src && basis_[x].tgt == basis_[i].tgt,
                            errc::invariant, "product breaks bi-homogeneity");
                }
            }

        // Associativity on all basis triples.
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    AlgElem<K> left = mul(basis_product(i, j), AlgElem<K>::single(k, K(1)));
                    AlgElem<K> right = mul(AlgElem<K>::single(i, K(1)), basis_product(j, k));
                    require(left == right, errc::invariant,
                            "associativity fails on (" + basis_[i].label + "," + basis_[j].label +
                                "," + basis_[k].label + ")");
                }

        // Hom-space bases and projective modules.
        for (int i = 0; i < n; ++i) hom_basis_[{basis_[i].src, basis_[i].tgt}].push_back(i);
        for (auto& [vw, lst] : hom_basis_) {
            std::stable_sort(lst.begin(), lst.end(), [&](int a, int b) {
                return basis_[a].degree != basis_[b].degree ? basis_[a].degree < basis_[b].degree
                                                            : a < b;
            });
        }
        projective_basis_.resize(idempotents_.size());
        projective_space_.resize(idempotents_.size());
        for (int i = 0; i < n; ++i)
            projective_basis_[static_cast<std::size_t>(basis_[i].tgt)].push_back(i);
        for (std::size_t v = 0; v < idempotents_.size(); ++v)
            for (int i : projective_basis_[v])
                projective_space_[v].set(basis_[i].degree, projective_space_[v].dim(basis_[i].degree) + 1);

        if (frobenius_) audit_frobenius();
    }

    void audit_frobenius() {
        const int n = size();
        Frobenius& f = *frobenius_;
        for (int i = 0; i < n; ++i)
            require(is_zero(f.trace[static_cast<std::size_t>(i)]) || basis_[i].degree == f.cy_dimension,
                    errc::invariant, "Frobenius trace supported off the top degree");
        f.pairing = zeros<K>(n, n);
        auto lambda = [&](const AlgElem<K>& a) {
            K s(0);
            for (auto& [i, c] : a.terms) s += c * f.trace[static_cast<std::size_t>(i)];
            return s;
        };
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                f.pairing(i, j) = lambda(mul(AlgElem<K>::single(j, K(1)), AlgElem<K>::single(i, K(1))));
        require(is_invertible(f.pairing), errc::invariant, "Frobenius pairing degenerate");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                K expect = ((basis_[i].degree * basis_[j].degree) % 2 != 0) ? -f.pairing(j, i)
                                                                            : f.pairing(j, i);
                require(f.pairing(i, j) == expect, errc::invariant,
                        "Frobenius pairing not graded-symmetric");
            }
    }

    std::vector<BasisElement> basis_;
    std::vector<AlgElem<K>> products_;
    std::vector<int> idempotents_;
    std::optional<Frobenius> frobenius_;
    std::map<std::pair<int, int>, std::vector<int>> hom_basis_;
    std::vector<std::vector<int>> projective_basis_;
    std::vector<GradedVectorSpace> projective_space_;
};

} // namespace sphertwist
