#pragma once

#include <map>
#include <ostream>
#include <string>

#include "sphertwist/error.hpp"
#include "sphertwist/matrix.hpp"

namespace sphertwist {

// Finite-support dimension function: degree -> dim, no zero entries stored.
struct GradedVectorSpace {
    std::map<int, int> dims;

    int dim(int degree) const {
        auto it = dims.find(degree);
        return it == dims.end() ? 0 : it->second;
    }
    int total() const {
        int t = 0;
        for (auto& [d, n] : dims) t += n;
        return t;
    }
    void set(int degree, int n) {
        require(n >= 0, errc::invariant, "negative dimension");
        if (n == 0)
            dims.erase(degree);
        else
            dims[degree] = n;
    }
    bool operator==(const GradedVectorSpace& o) const { return dims == o.dims; }

    GradedVectorSpace shifted(int s) const {
        // V[s]_n = V_{n+s}: an element of degree g lands in degree g - s.
        GradedVectorSpace r;
        for (auto& [d, n] : dims) r.dims[d - s] = n;
        return r;
    }
};

// Degree-homogeneous linear map between graded spaces: one block per source
// degree n, mapping V_n -> W_{n+degree}. Blocks absent from the map are zero.
template <class K>
struct GradedMap {
    int degree = 0;
    std::map<int, Mat<K>> blocks;

    const Mat<K>* block(int n) const {
        auto it = blocks.find(n);
        return it == blocks.end() ? nullptr : &it->second;
    }

    // Insert a block, dropping all-zero matrices to keep the support tight.
    void set_block(int n, Mat<K> m) {
        if (m.rows() == 0 || m.cols() == 0 || is_zero_matrix(m)) {
            blocks.erase(n);
            return;
        }
        blocks[n] = std::move(m);
    }
};

// g after f; block degrees add.
template <class K>
GradedMap<K> compose(const GradedMap<K>& g, const GradedMap<K>& f) {
    GradedMap<K> r;
    r.degree = f.degree + g.degree;
    for (auto& [n, fb] : f.blocks) {
        const Mat<K>* gb = g.block(n + f.degree);
        if (!gb) continue;
        require(gb->cols() == fb.rows(), errc::invariant, "graded compose: block shape mismatch");
        r.set_block(n, (*gb) * fb);
    }
    return r;
}

template <class K>
GradedMap<K> scale(const GradedMap<K>& f, const K& c) {
    GradedMap<K> r;
    r.degree = f.degree;
    if (is_zero(c)) return r;
    for (auto& [n, b] : f.blocks) r.set_block(n, Mat<K>(b * c));
    return r;
}

template <class K>
GradedMap<K> add(const GradedMap<K>& f, const GradedMap<K>& g) {
    require(f.degree == g.degree, errc::invariant, "graded add: degree mismatch");
    GradedMap<K> r;
    r.degree = f.degree;
    for (auto& [n, b] : f.blocks) r.blocks[n] = b;
    for (auto& [n, b] : g.blocks) {
        auto it = r.blocks.find(n);
        if (it == r.blocks.end())
            r.blocks[n] = b;
        else {
            require(it->second.rows() == b.rows() && it->second.cols() == b.cols(),
                    errc::invariant, "graded add: block shape mismatch");
            it->second += b;
        }
    }
    // Re-normalize zero blocks away.
    GradedMap<K> out;
    out.degree = r.degree;
    for (auto& [n, b] : r.blocks) out.set_block(n, b);
    return out;
}

template <class K>
bool is_zero_map(const GradedMap<K>& f) {
    for (auto& [n, b] : f.blocks)
        if (!is_zero_matrix(b)) return false;
    return true;
}

// Check block shapes against explicit source/target dimension functions.
template <class K>
void check_graded_map_shape(const GradedMap<K>& f, const GradedVectorSpace& src,
                            const GradedVectorSpace& tgt, const std::string& what) {
    for (auto& [n, b] : f.blocks) {
        require(b.cols() == src.dim(n) && b.rows() == tgt.dim(n + f.degree), errc::invariant,
                what + ": block at degree " + std::to_string(n) + " has wrong shape");
    }
}

// A complex structured on a graded space: square-zero degree-+1 differential.
template <class K>
struct Complex {
    GradedVectorSpace space;
    GradedMap<K> diff; // degree must be +1

    void audit(const std::string& what = "complex") const {
        require(diff.degree == 1, errc::invariant, what + ": differential degree != +1");
        check_graded_map_shape(diff, space, space, what);
        auto sq = compose(diff, diff);
        require(is_zero_map(sq), errc::invariant, what + ": d^2 != 0");
    }
};

// dim H^n = dim ker(d_n) - rank(d_{n-1}), nonzero entries only.
template <class K>
std::map<int, int> cohomology_dims(const Complex<K>& c) {
    std::map<int, int> h;
    for (auto& [n, dim] : c.space.dims) {
        int rank_out = 0, rank_in = 0;
        if (const Mat<K>* b = c.diff.block(n)) rank_out = rank_of(*b);
        if (const Mat<K>* b = c.diff.block(n - 1)) rank_in = rank_of(*b);
        int hn = dim - rank_out - rank_in;
        require(hn >= 0, errc::invariant, "cohomology dimension underflow");
        if (hn > 0) h[n] = hn;
    }
    return h;
}

template <class K>
int total_cohomology(const Complex<K>& c) {
    int t = 0;
    for (auto& [n, dim] : cohomology_dims(c)) t += dim;
    return t;
}

} // namespace sphertwist
