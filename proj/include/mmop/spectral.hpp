#pragma once

// Spectral data of a regular matrix polynomial: clustered eigenvalues of
// det R(x), canonical sets of left Jordan chains, the defining chain
// residual, and the divisibility certificate built from it.

#include "mmop/matpoly.hpp"

namespace mmop {

struct EigenData {
    struct Root {
        Complex value;
        int multiplicity;
    };
    std::vector<Root> roots;
    int total = 0; // sum of multiplicities = Np - r
};

struct JordanChain {
    std::vector<CVector> vectors; // v_0 (eigenvector) .. v_{kappa-1}, row vectors as CVector
    int length() const { return static_cast<int>(vectors.size()); }
};

struct JordanChainSet {
    struct PerRoot {
        Complex root;
        std::vector<JordanChain> chains; // ordered longest first
    };
    std::vector<PerRoot> roots;

    int total_length() const {
        int t = 0;
        for (const auto& r : roots)
            for (const auto& c : r.chains) t += c.length();
        return t;
    }
};

// Roots of det R(x) via a balanced companion matrix, clustered by
// single-linkage with the given radius (0 -> default 1e-6 * spectral scale).
// Multiplicity = cluster size, value = cluster mean.
// Pre: R regular and satisfying the leading-block conditions.
// Throws RootCountMismatch when the recovered count differs from Np - r.
EigenData det_roots(const MatrixPolynomial& R, double cluster_radius = 0.0);

// Canonical left Jordan chains per root: nullspace growth of the stacked
// derivative (block-Toeplitz) systems; chains selected longest-first with
// Gram-Schmidt deflation on leading vectors. Each chain is scaled so its
// leading vector has unit inf-norm with first nonzero entry positive real.
// Throws ChainDeficiency if the total chain length at some root cannot
// reach its multiplicity within tolerances.
JordanChainSet left_jordan_chains(const MatrixPolynomial& R, const EigenData& eig,
                                  double rank_tol = 1e-8);

// max_i || sum_{l<=i} (1/l!) v_{i-l} R^(l)(x0) ||_inf  (the defining sums)
double verify_chain(const MatrixPolynomial& R, Complex x0,
                    const std::vector<CVector>& chain);

// Same defining sums with a (rectangular) polynomial matrix G in place of R;
// near-zero certifies that R left-divides G. Scaled by the magnitude of the
// largest term so the residual is dimensionless.
class PolyMatrix; // below
double divisibility_check(const PolyMatrix& G, const JordanChainSet& chains);
double divisibility_check(const MatrixPolynomial& R_as_G, const JordanChainSet& chains);

// rows x cols matrix of complex scalar polynomials
class PolyMatrix {
public:
    PolyMatrix(int rows, int cols) : r_(rows), c_(cols), e_(static_cast<size_t>(rows) * cols) {}
    int rows() const { return r_; }
    int cols() const { return c_; }
    CPoly& at(int i, int j) { return e_[static_cast<size_t>(i) * c_ + j]; }
    const CPoly& at(int i, int j) const { return e_[static_cast<size_t>(i) * c_ + j]; }

    static PolyMatrix from(const MatrixPolynomial& R);

    CMatrix eval(Complex x, int order = 0) const;

private:
    int r_, c_;
    std::vector<CPoly> e_;
};

} // namespace mmop
