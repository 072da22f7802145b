#pragma once

// Weight grids and their truncated moment matrices. A grid is q x p
// measures on a common interval; entries are polynomial densities, named
// classical weights, or raw moment tables. Moment sequences have exact
// closed forms wherever possible and are also computable in compensated
// (double-double) precision for the extended-precision pipeline.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mmop/linalg.hpp"
#include "mmop/matpoly.hpp"
#include "mmop/poly.hpp"

namespace mmop {

// w(x) = polynomial density against dx on the grid interval
struct PolynomialDensity {
    Poly density;
};

// raw moments mu_n = int x^n dmu; kept in compensated precision so exact
// rational tables survive the ill-conditioned factorizations downstream
struct MomentTable {
    std::vector<DD> values;

    static MomentTable fromDoubles(const std::vector<double>& v) {
        MomentTable t;
        t.values.assign(v.begin(), v.end());
        return t;
    }
};

// named classical weights with exact moments:
//   "lebesgue"            : density 1 on [lo, hi]
//   "jacobi"              : x^alpha (1-x)^beta on [0,1], integer alpha, beta >= 0
struct NamedClassical {
    std::string name;
    int alpha = 0;
    int beta = 0;
};

using WeightSpec = std::variant<PolynomialDensity, MomentTable, NamedClassical>;

struct WeightGrid {
    int q = 0, p = 0;
    double lo = 0.0, hi = 1.0;
    std::vector<WeightSpec> entries; // row-major q x p

    const WeightSpec& at(int b, int a) const { return entries[static_cast<size_t>(b) * p + a]; }
    WeightSpec& at(int b, int a) { return entries[static_cast<size_t>(b) * p + a]; }

    // true when entry (b,a) has a pointwise-evaluable density
    bool hasDensity(int b, int a) const;
    double densityValue(int b, int a, double x) const;

    WeightGrid transposed() const;
    void validate() const;
};

// per-entry moment sequences 0..n_max
template <class Real>
struct MomentGridT {
    int q = 0, p = 0, n_max = 0;
    std::vector<std::vector<Real>> seq; // [b*p+a][n]

    const std::vector<Real>& at(int b, int a) const { return seq[static_cast<size_t>(b) * p + a]; }
};
using MomentGrid = MomentGridT<double>;
using MomentGridDD = MomentGridT<DD>;

// exact closed-form moments (Gauss-Legendre for densities without one)
MomentGrid moments(const WeightGrid& grid, int n_max);
MomentGridDD moments_dd(const WeightGrid& grid, int n_max);
// quadrature path (cross-check for densities; throws for moment tables)
MomentGrid moments_quadrature(const WeightGrid& grid, int n_max);

struct MomentMatrix {
    int trunc = 0;
    int q = 0, p = 0;
    Matrix entries;                 // trunc x trunc
    std::optional<Grid<DD>> dd;     // compensated copy when built extended

    bool extended() const { return dd.has_value(); }
};

// entry(j,k) = mu_{b,a; l+m} with j = q l + b, k = p m + a (b,a zero-based)
MomentMatrix assemble(const MomentGrid& moms, int trunc);
MomentMatrix assemble(const MomentGridDD& moms, int trunc);
MomentMatrix assemble(const WeightGrid& grid, int trunc, bool extended_precision);

// max |entry(j+q,k) - entry(j,k+p)|
double hankel_residual(const MomentMatrix& M);

// Mhat = M R(Lambda_[p]^T), truncated to trunc - p*deg(R) so every retained
// entry is exact. Throws TruncationTooSmall when nothing would remain.
MomentMatrix right_multiply(const MomentMatrix& M, const MatrixPolynomial& R);
// Mhat = L(Lambda_[q]) M, truncated to trunc - q*deg(L).
MomentMatrix left_multiply(const MomentMatrix& M, const MatrixPolynomial& L);

MomentMatrix transpose(const MomentMatrix& M);

// Gauss-Legendre rule on [lo, hi] (Golub-Welsch)
struct QuadratureRule {
    std::vector<double> nodes, weights;
};
QuadratureRule gauss_legendre(int n, double lo, double hi);

std::string to_csv(const Matrix& m);

} // namespace mmop
