#pragma once

// Truncated Gauss-Borel factorization M = S^{-1} H Sbar^{-T} with unit lower
// triangular S, Sbar and diagonal H. Doolittle elimination without pivoting:
// row exchanges would destroy the unitriangular normalization that defines
// the polynomial families, so breakdown is reported, not repaired.

#include <optional>

#include "mmop/measures.hpp"

namespace mmop {

struct Factorization {
    int trunc = 0;
    Matrix S;               // unit lower triangular
    Matrix Sbar;            // unit lower triangular
    Vector H;               // nonzero diagonal (the elimination pivots)

    struct Extended {
        Grid<DD> S, Sbar;
        std::vector<DD> H;
    };
    std::optional<Extended> dd;  // populated by the compensated path

    bool extended() const { return dd.has_value(); }
};

struct FactorizeOptions {
    double pivot_tol = 1e-10;       // relative to the running Schur-complement scale
    bool extended_precision = false; // compensated (double-double) elimination
};

// Throws QuasidefiniteFailure(k) when pivot k falls below
// pivot_tol * max|remaining Schur complement| -- the first singular leading
// principal minor, which is exactly the existence signal downstream.
Factorization factorize(const MomentMatrix& M, const FactorizeOptions& opts = {});

// max |(S M Sbar^T - H)_{jk}| / max|M|
double residual(const Factorization& F, const MomentMatrix& M);

} // namespace mmop
