#pragma once

// Mixed multiple orthogonal families extracted from a Gauss-Borel
// factorization: B(x) = S X_[q](x) (monic) and A(x) = X_[p]^T(x) Sbar^T H^{-1},
// plus the residual checks that certify them (biorthogonality, quasi-diagonal
// orthogonality), the banded recurrence matrix, and CD-kernel slices sampled
// on Jordan-chain data.

#include <complex>
#include <memory>

#include "mmop/gaussborel.hpp"
#include "mmop/measures.hpp"

namespace mmop {

// extended-precision coefficient tables kept alongside the double family
struct FamilyDD {
    std::vector<std::vector<PolyDD>> A; // [n][a]
    std::vector<std::vector<PolyDD>> B; // [n][b]
    std::vector<DD> H;
};

struct OrthoFamily {
    int q = 0, p = 0;
    int count = 0;                        // family indices 0..count-1
    std::vector<std::vector<Poly>> A;     // [n][a], a = 0..p-1
    std::vector<std::vector<Poly>> B;     // [n][b], b = 0..q-1
    Vector H;
    std::shared_ptr<const FamilyDD> dd;   // present when built extended

    bool extended() const { return dd != nullptr; }

    // evaluate with compensated Horner when available (order-th derivative)
    Complex evalA(int n, int a, Complex x, int order = 0) const;
    Complex evalB(int n, int b, Complex x, int order = 0) const;
};

OrthoFamily build_family(const Factorization& F, int q, int p);

// max |int sum_b sum_a B_n^(b) dmu_{b,a} A_m^(a) - delta_{nm}| over n,m < upto
double biorthogonality_residual(const OrthoFamily& fam, const WeightGrid& grid, int upto);

// Quasi-diagonal orthogonality over the stated ceil-based index ranges.
// Indices at or beyond the unitriangular diagonal (ql+b >= n on the A side,
// pm+a >= n on the B side) cannot vanish -- they equal entries of S^{-1} /
// H Sbar^{-T} -- and are flagged with their values instead of folded into
// the residual maximum.
struct QuasidiagIndex {
    char side;     // 'A' or 'B'
    int n;
    int comp;      // b or a, zero-based
    int power;     // l or m
    double value;
};
struct QuasidiagReport {
    double max_residual = 0.0;      // over non-flagged indices
    std::vector<QuasidiagIndex> flagged;
};
QuasidiagReport quasidiag_residual(const OrthoFamily& fam, const WeightGrid& grid, int upto);

// T = S Lambda_[q] S^{-1} truncated; (p,q)-banded, rows 0..trunc-1-q exact
Matrix recurrence_matrix(const Factorization& F, int q, int p);

// CD kernel sampled on one Jordan-chain level:
//   slice_l(y)[b] = sum_{i<n} w_i(level) B_i^(b)(y)
// where w_i(level) = sum_{l<=level} (1/l!) sum_a v_{level-l,a} A_i^{(a),(l)}(x0).
struct KernelSlice {
    int n = 0;
    Complex root;
    std::vector<std::vector<CPoly>> levels; // [level][b] polynomials in y
};
KernelSlice kernel_slice(const OrthoFamily& fam, int n, Complex root,
                         const std::vector<CVector>& chain);

std::string family_to_csv(const OrthoFamily& fam);

} // namespace mmop
