#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "sphertwist/error.hpp"
#include "sphertwist/field.hpp"

namespace sphertwist {

template <class K>
using Mat = Eigen::Matrix<K, Eigen::Dynamic, Eigen::Dynamic>;
template <class K>
using Vec = Eigen::Matrix<K, Eigen::Dynamic, 1>;

template <class K>
Mat<K> zeros(Eigen::Index r, Eigen::Index c) {
    return Mat<K>::Constant(r, c, K(0));
}

template <class K>
Mat<K> identity(Eigen::Index n) {
    Mat<K> m = zeros<K>(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = K(1);
    return m;
}

template <class K>
bool is_zero_matrix(const Mat<K>& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!is_zero(m(i, j))) return false;
    return true;
}

// In-place reduced row echelon form. Pivoting is first-nonzero in column
// order (exact arithmetic needs no magnitude heuristics and golden tests
// need determinism). Returns the pivot columns.
template <class K>
std::vector<Eigen::Index> rref(Mat<K>& a) {
    std::vector<Eigen::Index> pivots;
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < a.cols() && row < a.rows(); ++col) {
        Eigen::Index piv = -1;
        for (Eigen::Index i = row; i < a.rows(); ++i)
            if (!is_zero(a(i, col))) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        if (piv != row) a.row(piv).swap(a.row(row));
        K inv = K(1) / a(row, col);
        for (Eigen::Index j = col; j < a.cols(); ++j) a(row, j) = a(row, j) * inv;
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i == row || is_zero(a(i, col))) continue;
            K f = a(i, col);
            for (Eigen::Index j = col; j < a.cols(); ++j) a(i, j) = a(i, j) - f * a(row, j);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

template <class K>
struct RankKernelImage {
    int rank = 0;
    Mat<K> kernel; // columns span ker(m)
    Mat<K> image;  // columns span im(m): the pivot columns of m
};

template <class K>
RankKernelImage<K> rank_kernel_image(const Mat<K>& m) {
    Mat<K> r = m;
    auto pivots = rref(r);
    RankKernelImage<K> out;
    out.rank = static_cast<int>(pivots.size());

    out.image = zeros<K>(m.rows(), out.rank);
    for (int j = 0; j < out.rank; ++j) out.image.col(j) = m.col(pivots[j]);

    // Back-substitute the free columns of the RREF.
    std::vector<bool> is_pivot(static_cast<std::size_t>(m.cols()), false);
    for (auto p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;
    Eigen::Index nfree = m.cols() - out.rank;
    out.kernel = zeros<K>(m.cols(), nfree);
    Eigen::Index k = 0;
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
        if (is_pivot[static_cast<std::size_t>(col)]) continue;
        out.kernel(col, k) = K(1);
        for (int i = 0; i < out.rank; ++i) out.kernel(pivots[i], k) = -r(i, col);
        ++k;
    }
    return out;
}

template <class K>
int rank_of(const Mat<K>& m) {
    Mat<K> r = m;
    return static_cast<int>(rref(r).size());
}

// Solve a·x = b for all columns of b at once; std::nullopt if inconsistent.
template <class K>
std::optional<Mat<K>> solve(const Mat<K>& a, const Mat<K>& b) {
    require(a.rows() == b.rows(), errc::invariant, "solve: row mismatch");
    Mat<K> aug = zeros<K>(a.rows(), a.cols() + b.cols());
    aug.leftCols(a.cols()) = a;
    aug.rightCols(b.cols()) = b;
    auto pivots = rref(aug);
    for (auto p : pivots)
        if (p >= a.cols()) return std::nullopt; // pivot in the b-block: inconsistent
    Mat<K> x = zeros<K>(a.cols(), b.cols());
    for (std::size_t i = 0; i < pivots.size(); ++i)
        x.row(pivots[i]) = aug.block(static_cast<Eigen::Index>(i), a.cols(), 1, b.cols());
    return x;
}

template <class K>
std::optional<Mat<K>> inverse(const Mat<K>& a) {
    require(a.rows() == a.cols(), errc::invariant, "inverse: not square");
    // Singular a leaves some identity column outside the column span,
    // so solve() already reports failure via inconsistency.
    return solve<K>(a, identity<K>(a.rows()));
}

template <class K>
bool is_invertible(const Mat<K>& a) {
    return a.rows() == a.cols() && rank_of(a) == a.rows();
}

} // namespace sphertwist
