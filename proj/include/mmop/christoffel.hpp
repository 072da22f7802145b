#pragma once

// The Christoffel machinery: Jordan-sampled value tables, tau determinants,
// the connection-matrix linear solves, determinant formulas for the
// perturbed families, the existence scan, and right/left pipelines.

#include <optional>

#include "mmop/families.hpp"
#include "mmop/spectral.hpp"

namespace mmop {

// Rows are spectral samples (root i, chain j, level l) in canonical order,
// M_total = Np - r rows; columns are family indices. Entry (row, n) is the
// chain-weighted derivative sample of A_n at the row's root. Values carry a
// compensated copy when the family was built in extended precision.
struct SampleTable {
    struct RowKey {
        int root, chain, level;
    };
    int m_total = 0;
    int n_hi = 0; // columns 0..n_hi
    std::vector<RowKey> keys;
    std::vector<std::vector<Complex>> val;          // [row][n]
    std::vector<std::vector<CDD>> vdd;              // same, compensated (may be empty)

    Complex at(int row, int n) const { return val[row][n]; }
    CDD atx(int row, int n) const {
        if (!vdd.empty()) return vdd[row][n];
        return CDD(DD(val[row][n].real()), DD(val[row][n].imag()));
    }
    bool extended() const { return !vdd.empty(); }
};

SampleTable sample_table(const OrthoFamily& fam, const JordanChainSet& chains, int n_hi);

// tau_n = det of the M x M block with columns n .. n+M-1 (1 for M = 0)
Complex tau(const SampleTable& table, int n);

struct TauSequence {
    std::vector<Complex> values;
    std::vector<bool> zero_flag;
    int first_flag = -1; // -1 when none

    bool ok() const { return first_flag < 0; }
};

// zero flags at |tau_n| < tau_tol * geometric mean of neighbouring |tau|
TauSequence existence_scan(const SampleTable& table, int n_max, double tau_tol = 1e-9);

// subdiagonal entries (Omega_{c+1,c}, ..., Omega_{c+M,c}) of column c,
// from the sample-value linear system (the solve is authoritative)
CVector omega_column(const SampleTable& table, int col);

// |Omega_{n+M,n} - (-1)^M tau_n/tau_{n+1}| / |tau_n/tau_{n+1}|
double tau_consistency(const SampleTable& table, int n);

// Bhat_{n-1}^{(b)}(y): kernel-column determinant over tau_{n-1};
// monic by construction. Requires table columns through n+M-2.
CPoly perturbed_B(const SampleTable& table, const OrthoFamily& fam, int n, int b);

// Row n of the perturbed A family: the products G_{n,a} = [R(x) Ahat(x)]_{n+1,a}
// by the bordered determinant over tau_{n+1}, the divisibility certificate on
// that column, and the quotient row from coefficient-matching left division.
struct PerturbedARow {
    std::vector<CPoly> product;   // per a
    std::vector<CPoly> quotient;  // per a
    double divisibility_residual = 0.0; // chain residual of the product column
    double division_residual = 0.0;     // left-division coefficient mismatch
};
PerturbedARow perturbed_A(const SampleTable& table, const OrthoFamily& fam,
                          const MatrixPolynomial& R, const JordanChainSet& chains,
                          int n, double div_tol = 1e-8);

struct PerturbOptions {
    int n_max = 8;            // compute/compare families up to this index
    double pivot_tol = 1e-10;
    double rank_tol = 1e-8;
    double tau_tol = 1e-9;
    double compare_tol = 1e-6;
    double cluster_radius = 0.0; // 0 -> default
    bool extended_precision = false;
};

struct ConnectionData {
    int m_total = 0;
    TauSequence tau;
    std::vector<CVector> omega_columns;       // columns 0..n_max
    std::vector<std::vector<Poly>> B_hat;     // [n][b], n <= n_max (when existence holds)
    std::vector<std::vector<Poly>> A_hat;     // [n][a]
    Vector H_hat;                             // formula-path H (leading coefficients)
    std::vector<double> tau_consistency;      // per column
    std::vector<double> divisibility;         // per row n
    std::vector<double> division;             // per row n
    double max_imag = 0.0;                    // conjugation-closure diagnostic
};

struct PerturbRun {
    int q = 0, p = 0;
    MatrixPolynomial R;
    StructureReport structure;
    Poly det;
    EigenData eig;
    JordanChainSet chains;
    MomentMatrix moments;      // original, geared to the pipeline truncation
    Factorization fact;
    OrthoFamily fam;
    SampleTable table;
    ConnectionData conn;
    bool existence_ok = false;

    // connection-identity diagnostics (populated when existence holds)
    double conn_A_residual = 0.0;    // ||A(x) Omega - R(x) Ahat(x)|| / scale
    double conn_B_residual = 0.0;    // ||Omega Bhat(x) - B(x)|| / scale
    double kernel_residual = 0.0;    // kernel connection at sampled (x, y)

    PerturbRun(MatrixPolynomial r) : R(std::move(r)) {}
};

PerturbRun perturb_right(const WeightGrid& grid, const MatrixPolynomial& R,
                         const PerturbOptions& opts);

// Left perturbation via transposition duality: runs the right pipeline on
// (grid^T, L^T) and maps the results back into the left frame.
struct LeftPerturbRun {
    PerturbRun transposed;                    // right-frame run on the dual data
    std::vector<std::vector<Poly>> B_hat;     // left-frame families
    std::vector<std::vector<Poly>> A_hat;
    Vector H_hat;

    LeftPerturbRun(PerturbRun t) : transposed(std::move(t)) {}
};
LeftPerturbRun perturb_left(const WeightGrid& grid, const MatrixPolynomial& L,
                            const PerturbOptions& opts);

// truncation used by the pipelines (and by the oracle for comparability)
int pipeline_truncation(int n_max, int p, int degR);

} // namespace mmop
