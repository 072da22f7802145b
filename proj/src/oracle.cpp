#include "mmop/oracle.hpp"

#include <cmath>

#include "mmop/errors.hpp"

namespace mmop {

DirectPerturbed direct_perturbed(const MomentMatrix& M, const MatrixPolynomial& R,
                                 PerturbSide side, const FactorizeOptions& opts) {
    DirectPerturbed out;
    out.moments = side == PerturbSide::right ? right_multiply(M, R) : left_multiply(M, R);
    out.fact = factorize(out.moments, opts);
    out.fam = build_family(out.fact, out.moments.q, out.moments.p);
    return out;
}

namespace {

double rel_diff(const Poly& x, const Poly& y) {
    double scale = 1.0, diff = 0.0;
    const int n = std::max(x.degree(), y.degree());
    for (int k = 0; k <= n; ++k) {
        scale = std::max({scale, std::abs(x.coeff(k)), std::abs(y.coeff(k))});
        diff = std::max(diff, std::abs(x.coeff(k) - y.coeff(k)));
    }
    return diff / scale;
}

// normalize the p x p block containing columns kp..kp+p-1 so its leading
// coefficient matrix (upper triangular, diag 1/H) becomes the identity
std::vector<std::vector<Poly>> normalize_blocks(const std::vector<std::vector<Poly>>& A,
                                                int p, int upto) {
    std::vector<std::vector<Poly>> out(A.begin(), A.begin() + upto + 1);
    for (int k = 0; (k + 1) * p - 1 <= upto; ++k) {
        Matrix nu = Matrix::Zero(p, p);
        for (int j = 0; j < p; ++j)
            for (int a = 0; a < p; ++a) nu(a, j) = A[k * p + j][a].coeff(k);
        Matrix inv = nu.triangularView<Eigen::Upper>().solve(Matrix::Identity(p, p));
        for (int j = 0; j < p; ++j)
            for (int a = 0; a < p; ++a) {
                Poly acc;
                for (int i = 0; i < p; ++i)
                    acc = acc + A[k * p + i][a].scaled(inv(i, j));
                acc.trim();
                out[k * p + j][a] = std::move(acc);
            }
    }
    return out;
}

} // namespace

ComparisonReport compare(const PerturbRun& run, const DirectPerturbed& direct,
                         double tolerance) {
    ComparisonReport rep;
    rep.tolerance = tolerance;
    const int q = run.q, p = run.p;
    const int M = run.conn.m_total;
    const int upto = std::min<int>(static_cast<int>(run.conn.B_hat.size()) - 1,
                                   direct.fam.count - 1);

    rep.b_residual.resize(upto + 1, 0.0);
    for (int n = 0; n <= upto; ++n)
        for (int b = 0; b < q; ++b)
            rep.b_residual[n] =
                std::max(rep.b_residual[n], rel_diff(run.conn.B_hat[n][b], direct.fam.B[n][b]));

    const auto norm_formula = normalize_blocks(run.conn.A_hat, p, upto);
    const auto norm_direct = normalize_blocks(direct.fam.A, p, upto);
    const int blocks_top = (upto + 1) / p * p - 1; // last index inside a complete block
    rep.a_residual.resize(upto + 1, 0.0);
    for (int n = 0; n <= blocks_top; ++n)
        for (int a = 0; a < p; ++a)
            rep.a_residual[n] =
                std::max(rep.a_residual[n], rel_diff(norm_formula[n][a], norm_direct[n][a]));

    // Omega = S Shat^{-1} (compensated when available), full columns only
    const int Th = direct.fact.trunc;
    Matrix omega_direct;
    if (run.fact.dd && direct.fact.dd) {
        Grid<DD> Strunc(Th, Th);
        for (int i = 0; i < Th; ++i)
            for (int j = 0; j < Th; ++j) Strunc(i, j) = run.fact.dd->S(i, j);
        Grid<DD> Shinv = invert_unit_lower(direct.fact.dd->S);
        Grid<DD> om = matmul(Strunc, Shinv);
        omega_direct = Matrix(Th, Th);
        for (int i = 0; i < Th; ++i)
            for (int j = 0; j < Th; ++j) omega_direct(i, j) = to_double(om(i, j));
    } else {
        Matrix Shinv =
            direct.fact.S.triangularView<Eigen::UnitLower>().solve(Matrix::Identity(Th, Th));
        omega_direct = run.fact.S.topLeftCorner(Th, Th) * Shinv;
    }
    const int cols = static_cast<int>(run.conn.omega_columns.size());
    for (int c = 0; c < cols && c + M < Th; ++c) {
        if (run.conn.omega_columns[c].size() != M) continue;
        double scale = 1.0, diff = 0.0;
        for (int j = 1; j <= M; ++j) {
            const double solved = run.conn.omega_columns[c][j - 1].real();
            const double truth = omega_direct(c + j, c);
            scale = std::max({scale, std::abs(solved), std::abs(truth)});
            diff = std::max(diff, std::abs(solved - truth));
        }
        rep.omega_residual.push_back(diff / scale);
    }

    rep.h_residual.resize(upto + 1, 0.0);
    for (int n = 0; n <= upto && n < run.conn.H_hat.size(); ++n) {
        const double f = run.conn.H_hat[n];
        const double d = direct.fact.H[n];
        rep.h_residual[n] = std::abs(f - d) / std::max(std::abs(d), 1e-300);
    }

    for (double v : rep.b_residual) rep.worst = std::max(rep.worst, v);
    for (double v : rep.a_residual) rep.worst = std::max(rep.worst, v);
    for (double v : rep.omega_residual) rep.worst = std::max(rep.worst, v);
    for (double v : rep.h_residual) rep.worst = std::max(rep.worst, v);
    rep.pass = rep.worst < tolerance;
    return rep;
}

VerifyOutcome verify_against_oracle(const PerturbRun& run, const PerturbOptions& opts) {
    VerifyOutcome out;
    out.existence_ok = run.existence_ok;
    out.tau_flag_index = run.conn.tau.first_flag;
    try {
        DirectPerturbed direct = direct_perturbed(
            run.moments, run.R, PerturbSide::right, {opts.pivot_tol, opts.extended_precision});
        out.pivot_failure_index = -1;
        out.signals_agree = run.existence_ok;
        if (run.existence_ok) out.comparison = compare(run, direct, opts.compare_tol);
    } catch (const QuasidefiniteFailure& f) {
        out.pivot_failure_index = f.index;
        out.signals_agree = !run.existence_ok;
    }
    return out;
}

} // namespace mmop
