#include "mmop/gaussborel.hpp"

#include <cmath>

#include "mmop/errors.hpp"

namespace mmop {

namespace {

template <class Real>
struct EliminationResult {
    Grid<Real> S, Sbar;
    std::vector<Real> H;
};

template <class Real>
EliminationResult<Real> eliminate(Grid<Real> A, double pivot_tol) {
    const int T = A.rows();
    Grid<Real> L = Grid<Real>::identity(T);
    std::vector<Real> H(T);
    for (int k = 0; k < T; ++k) {
        double scale = 0.0;
        for (int i = k; i < T; ++i)
            for (int j = k; j < T; ++j) scale = std::max(scale, mag(A(i, j)));
        const Real piv = A(k, k);
        if (mag(piv) <= pivot_tol * scale || scale == 0.0)
            throw QuasidefiniteFailure("vanishing pivot: leading principal minor " +
                                           std::to_string(k + 1) + " is singular to tolerance",
                                       k);
        H[k] = piv;
        for (int i = k + 1; i < T; ++i) {
            const Real f = A(i, k) / piv;
            L(i, k) = f;
            for (int j = k; j < T; ++j) A(i, j) -= f * A(k, j);
        }
    }
    // M = L U with U = upper(A); S = L^{-1}; Sbar = H U^{-T} (unit lower).
    EliminationResult<Real> out;
    out.H = std::move(H);
    out.S = invert_unit_lower(L);
    // solve U^T X = I column-by-column (U^T lower triangular), then scale rows
    Grid<Real> UinvT(T, T);
    for (int c = 0; c < T; ++c) {
        for (int i = 0; i < T; ++i) {
            Real s = i == c ? Real(1.0) : Real(0.0);
            for (int t = 0; t < i; ++t) s -= A(t, i) * UinvT(t, c); // U^T(i,t) = U(t,i) = A(t,i)
            UinvT(i, c) = s / A(i, i);
        }
    }
    out.Sbar = Grid<Real>(T, T);
    for (int i = 0; i < T; ++i)
        for (int j = 0; j < T; ++j) out.Sbar(i, j) = out.H[i] * UinvT(i, j);
    return out;
}

} // namespace

Factorization factorize(const MomentMatrix& M, const FactorizeOptions& opts) {
    const int T = M.trunc;
    Factorization F;
    F.trunc = T;
    const bool extended = opts.extended_precision && M.dd.has_value();
    if (extended) {
        auto res = eliminate<DD>(*M.dd, opts.pivot_tol);
        F.S = Matrix(T, T);
        F.Sbar = Matrix(T, T);
        F.H = Vector(T);
        for (int i = 0; i < T; ++i) {
            F.H[i] = to_double(res.H[i]);
            for (int j = 0; j < T; ++j) {
                F.S(i, j) = to_double(res.S(i, j));
                F.Sbar(i, j) = to_double(res.Sbar(i, j));
            }
        }
        F.dd = Factorization::Extended{std::move(res.S), std::move(res.Sbar), std::move(res.H)};
        return F;
    }
    Grid<double> A(T, T);
    for (int i = 0; i < T; ++i)
        for (int j = 0; j < T; ++j) A(i, j) = M.entries(i, j);
    auto res = eliminate<double>(std::move(A), opts.pivot_tol);
    F.S = Matrix(T, T);
    F.Sbar = Matrix(T, T);
    F.H = Vector(T);
    for (int i = 0; i < T; ++i) {
        F.H[i] = res.H[i];
        for (int j = 0; j < T; ++j) {
            F.S(i, j) = res.S(i, j);
            F.Sbar(i, j) = res.Sbar(i, j);
        }
    }
    return F;
}

double residual(const Factorization& F, const MomentMatrix& M) {
    const double scale = std::max(M.entries.cwiseAbs().maxCoeff(), 1e-300);
    Matrix D = F.S * M.entries * F.Sbar.transpose();
    for (int k = 0; k < F.trunc; ++k) D(k, k) -= F.H[k];
    return D.cwiseAbs().maxCoeff() / scale;
}

} // namespace mmop
