#pragma once

// Independent ground truth for the Christoffel pipeline: factorize the
// perturbed moment matrix directly (sharing only the measures and
// factorization layers, none of the formula code) and compare families,
// connection matrix, and H against the formula path.

#include "mmop/christoffel.hpp"

namespace mmop {

enum class PerturbSide { right, left };

struct DirectPerturbed {
    MomentMatrix moments;   // perturbed, truncated exactly
    Factorization fact;
    OrthoFamily fam;
};

// Factorizes M R(Lambda^T) (right) or L(Lambda) M (left) from scratch.
// QuasidefiniteFailure(k) here is the ground-truth existence failure.
DirectPerturbed direct_perturbed(const MomentMatrix& M, const MatrixPolynomial& R,
                                 PerturbSide side, const FactorizeOptions& opts = {});

struct ComparisonReport {
    // coefficientwise max relative differences per family index
    std::vector<double> b_residual;
    std::vector<double> a_residual;        // after block normalization
    std::vector<double> omega_residual;    // per compared column
    std::vector<double> h_residual;
    double worst = 0.0;
    bool pass = false;
    double tolerance = 0.0;
};

// Compares a formula-path run against the directly factorized ground truth.
// Omega is recomputed as S Shat^{-1} and compared column-by-column with the
// solved columns; Ahat is compared after normalizing the per-block leading
// coefficient matrix (upper triangular) to the identity on both sides.
ComparisonReport compare(const PerturbRun& run, const DirectPerturbed& direct,
                         double tolerance);

// Full verification pass: pipeline + oracle + agreement of the existence
// signals. When the tau scan flags a zero, the oracle must break down and
// the observed pivot index is recorded (empirically first_flag - 1).
struct VerifyOutcome {
    bool existence_ok = false;
    int tau_flag_index = -1;
    int pivot_failure_index = -1;   // -1 when the oracle factorized fine
    bool signals_agree = false;     // both exist or both fail
    std::optional<ComparisonReport> comparison;
};
VerifyOutcome verify_against_oracle(const PerturbRun& run, const PerturbOptions& opts);

} // namespace mmop
