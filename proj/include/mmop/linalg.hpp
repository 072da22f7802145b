#pragma once

// Minimal dense matrix container and the few kernels the extended-precision
// path needs (the sizes here are tiny, <= ~40). Eigen stays the workhorse
// for plain-double decompositions elsewhere.

#include <cassert>
#include <vector>

#include "mmop/dd.hpp"
#include "mmop/errors.hpp"

namespace mmop {

template <class T>
class Grid {
public:
    Grid() = default;
    Grid(int rows, int cols) : r_(rows), c_(cols), v_(static_cast<size_t>(rows) * cols, T(0.0)) {}

    int rows() const { return r_; }
    int cols() const { return c_; }
    T& operator()(int i, int j) { return v_[static_cast<size_t>(i) * c_ + j]; }
    const T& operator()(int i, int j) const { return v_[static_cast<size_t>(i) * c_ + j]; }

    static Grid identity(int n) {
        Grid g(n, n);
        for (int i = 0; i < n; ++i) g(i, i) = T(1.0);
        return g;
    }

    Grid topLeft(int n) const {
        Grid g(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = (*this)(i, j);
        return g;
    }

private:
    int r_ = 0, c_ = 0;
    std::vector<T> v_;
};

template <class T>
Grid<T> matmul(const Grid<T>& a, const Grid<T>& b) {
    assert(a.cols() == b.rows());
    Grid<T> out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            T aik = a(i, k);
            for (int j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
        }
    return out;
}

// inverse of a unit lower triangular matrix (forward substitution per column)
template <class T>
Grid<T> invert_unit_lower(const Grid<T>& L) {
    int n = L.rows();
    Grid<T> inv = Grid<T>::identity(n);
    for (int c = 0; c < n; ++c)
        for (int i = c + 1; i < n; ++i) {
            T s{};
            for (int k = c; k < i; ++k) s += L(i, k) * inv(k, c);
            inv(i, c) = -s;
        }
    return inv;
}

// Solve A x = b by Gaussian elimination with partial (magnitude) pivoting.
// Works for T in {double, Complex, DD, CDD} via mag().
template <class T>
std::vector<T> solve_dense(Grid<T> A, std::vector<T> b) {
    int n = A.rows();
    assert(A.cols() == n && static_cast<int>(b.size()) == n);
    std::vector<int> perm(n);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = mag(A(k, k));
        for (int i = k + 1; i < n; ++i)
            if (mag(A(i, k)) > best) { best = mag(A(i, k)); piv = i; }
        if (best == 0.0) throw SingularSystem("singular linear system", k);
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            T f = A(i, k) / A(k, k);
            A(i, k) = T(0.0);
            for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
            b[i] -= f * b[k];
        }
        (void)perm;
    }
    std::vector<T> x(n);
    for (int i = n - 1; i >= 0; --i) {
        T s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
        x[i] = s / A(i, i);
    }
    return x;
}

// Determinant via the same elimination; returns the signed product of pivots.
template <class T>
T det_dense(Grid<T> A) {
    int n = A.rows();
    T det(1.0);
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = mag(A(k, k));
        for (int i = k + 1; i < n; ++i)
            if (mag(A(i, k)) > best) { best = mag(A(i, k)); piv = i; }
        if (best == 0.0) return T(0.0);
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(A(k, j), A(piv, j));
            det = -det;
        }
        det *= A(k, k);
        for (int i = k + 1; i < n; ++i) {
            T f = A(i, k) / A(k, k);
            for (int j = k + 1; j < n; ++j) A(i, j) -= f * A(k, j);
        }
    }
    return det;
}

// Least-squares / consistent rectangular solve by column-pivoted elimination.
// rows >= cols expected; returns the minimal solution of the pivoted system
// and reports the residual through `residual_out` (max abs of A x - b).
template <class T>
std::vector<T> solve_rectangular(Grid<T> A, std::vector<T> b, double* residual_out) {
    const Grid<T> A0 = A;
    const std::vector<T> b0 = b;
    int m = A.rows(), n = A.cols();
    std::vector<int> piv_row(n, -1);
    int rank_row = 0;
    for (int c = 0; c < n && rank_row < m; ++c) {
        int piv = -1;
        double best = 0.0;
        for (int i = rank_row; i < m; ++i)
            if (mag(A(i, c)) > best) { best = mag(A(i, c)); piv = i; }
        if (piv < 0 || best == 0.0) continue;
        if (piv != rank_row) {
            for (int j = 0; j < n; ++j) std::swap(A(rank_row, j), A(piv, j));
            std::swap(b[rank_row], b[piv]);
        }
        for (int i = 0; i < m; ++i) {
            if (i == rank_row) continue;
            if (mag(A(i, c)) == 0.0) continue;
            T f = A(i, c) / A(rank_row, c);
            for (int j = 0; j < n; ++j) A(i, j) -= f * A(rank_row, j);
            b[i] -= f * b[rank_row];
        }
        piv_row[c] = rank_row;
        ++rank_row;
    }
    std::vector<T> x(n, T(0.0));
    for (int c = 0; c < n; ++c)
        if (piv_row[c] >= 0) x[c] = b[piv_row[c]] / A(piv_row[c], c);
    if (residual_out) {
        double res = 0.0;
        for (int i = 0; i < m; ++i) {
            T s = -b0[i];
            for (int j = 0; j < n; ++j) s += A0(i, j) * x[j];
            res = std::max(res, mag(s));
        }
        *residual_out = res;
    }
    return x;
}

} // namespace mmop
