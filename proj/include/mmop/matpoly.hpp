#pragma once

// Square matrix polynomials R(x) = sum_l R_l x^l with real coefficients:
// evaluation (with derivatives), determinant, structural validation of the
// leading/sub-leading block pattern, banded shift-operator images, and
// coefficient-matching left division.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mmop/linalg.hpp"
#include "mmop/poly.hpp"

namespace mmop {

using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

// Result of validating the leading and sub-leading coefficient blocks.
// When satisfies_c2 holds, det R(x) has degree size*degree - r and the
// shift image R(Lambda_[p]^T) carries exactly that many subdiagonals.
struct StructureReport {
    int r = 0;
    bool satisfies_c2 = false;
    int det_degree = 0;
    std::string violation; // empty when satisfies_c2
};

class MatrixPolynomial {
public:
    // Coefficients lowest degree first; all must be size x size. Trailing
    // coefficients that vanish relative to the largest entry are trimmed,
    // so degree() is the true degree. The zero polynomial is stored as a
    // single zero coefficient and reported non-regular downstream.
    static MatrixPolynomial fromCoeffs(std::vector<Matrix> coeffs, double trim_tol = 1e-12);

    static MatrixPolynomial identity(int size);

    // scalar polynomial promoted to 1x1
    static MatrixPolynomial scalar(const Poly& pol);

    int size() const { return size_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    const Matrix& coeff(int l) const { return coeffs_[l]; }
    const std::vector<Matrix>& coeffs() const { return coeffs_; }
    bool isZero() const;

    // order-th derivative of R at x; order 0 is plain evaluation
    Matrix eval(double x, int order = 0) const;
    CMatrix eval(Complex x, int order = 0) const;

    // det R(x) as a scalar polynomial, by evaluation at Chebyshev points of
    // a scaled interval and Vandermonde interpolation. Throws NonRegular if
    // every sample vanishes to tolerance.
    Poly determinant() const;

    // Detects the rank deficiency r from the leading block pattern
    //   R_N = [[0, I_{p-r}], [0, 0]]
    // and checks I_r in the lower-left block of R_{N-1} (skipped for r=0).
    StructureReport validateStructure(double tol = 1e-9) const;
    StructureReport validateStructureOrThrow(double tol = 1e-9) const;

    // T x T truncation of R(Lambda_[s]^T): block (i,j) = R_{i-j}, lower banded.
    // Requires T >= s*(degree+1).
    Matrix shiftImage(int block, int trunc) const;
    // T x T truncation of R(Lambda_[s]) (untransposed shift): block (i,j) = R_{j-i}.
    Matrix shiftImageUpper(int block, int trunc) const;

    MatrixPolynomial transpose() const;

    // entry (i,j) as a scalar polynomial
    Poly entry(int i, int j) const;

private:
    MatrixPolynomial() = default;
    int size_ = 0;
    std::vector<Matrix> coeffs_;
};

// Solve sum_abar R_{a,abar}(x) Q^(abar)(x) = G_a(x) for the row Q of p scalar
// polynomials by coefficient matching over bounded-degree unknowns
// (quotient degree bound: max deg G - (deg R - 1), clamped at 0).
// Returns the quotient row and the max absolute coefficient mismatch.
// Throws DivisionFailure when the residual exceeds tol * scale(G).
struct LeftDivision {
    std::vector<Poly> quotient;
    double residual = 0.0;
};
LeftDivision left_divide(const MatrixPolynomial& R, const std::vector<Poly>& G,
                         double tol = 1e-8);

// Complex-coefficient variant used by the Christoffel pipeline (sample data
// are complex); same contract.
struct LeftDivisionC {
    std::vector<CPoly> quotient;
    double residual = 0.0;
};
LeftDivisionC left_divide(const MatrixPolynomial& R, const std::vector<CPoly>& G,
                          double tol = 1e-8);

} // namespace mmop
