#include "mmop/christoffel.hpp"

#include <cmath>
#include <random>

#include "mmop/errors.hpp"

namespace mmop {

namespace {

CDD embed(Complex z) { return CDD(DD(z.real()), DD(z.imag())); }
Complex round_c(CDD z) { return {to_double(z.re), to_double(z.im)}; }

// compensated Horner for a dd-coefficient polynomial at a complex point
CDD horner_dd(const PolyDD& pol, CDD x, int order) {
    CDD acc{};
    for (int l = pol.degree(); l >= order; --l) {
        double fac = 1.0;
        for (int t = l; t > l - order; --t) fac *= t;
        acc = acc * x + CDD(pol.coeffs()[l] * DD(fac));
    }
    return acc;
}

CDD horner_d(const Poly& pol, CDD x, int order) {
    CDD acc{};
    for (int l = pol.degree(); l >= order; --l) {
        double fac = 1.0;
        for (int t = l; t > l - order; --t) fac *= t;
        acc = acc * x + CDD(DD(pol.coeff(l) * fac));
    }
    return acc;
}

// determinant of the table block with the given columns, in compensated
// complex arithmetic
CDD block_det(const SampleTable& t, const std::vector<int>& cols,
              const std::vector<int>& rows) {
    const int m = static_cast<int>(cols.size());
    Grid<CDD> g(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) g(i, j) = t.atx(rows[i], cols[j]);
    return det_dense(std::move(g));
}

std::vector<int> iota_vec(int n) {
    std::vector<int> v(n);
    for (int i = 0; i < n; ++i) v[i] = i;
    return v;
}

} // namespace

SampleTable sample_table(const OrthoFamily& fam, const JordanChainSet& chains, int n_hi) {
    SampleTable t;
    t.m_total = chains.total_length();
    t.n_hi = std::min(n_hi, fam.count - 1);
    for (int ri = 0; ri < static_cast<int>(chains.roots.size()); ++ri)
        for (int ci = 0; ci < static_cast<int>(chains.roots[ri].chains.size()); ++ci)
            for (int l = 0; l < chains.roots[ri].chains[ci].length(); ++l)
                t.keys.push_back({ri, ci, l});

    const int rows = static_cast<int>(t.keys.size());
    t.val.assign(rows, std::vector<Complex>(t.n_hi + 1));
    t.vdd.assign(rows, std::vector<CDD>(t.n_hi + 1));
    for (int row = 0; row < rows; ++row) {
        const auto& key = t.keys[row];
        const auto& per = chains.roots[key.root];
        const auto& chain = per.chains[key.chain].vectors;
        const CDD x0 = embed(per.root);
        for (int n = 0; n <= t.n_hi; ++n) {
            CDD tot{};
            double fac = 1.0;
            for (int l = 0; l <= key.level; ++l) {
                if (l > 0) fac *= l;
                const CVector& v = chain[key.level - l];
                for (int a = 0; a < fam.p; ++a) {
                    CDD value = fam.dd ? horner_dd(fam.dd->A[n][a], x0, l)
                                       : horner_d(fam.A[n][a], x0, l);
                    tot += embed(v[a] / fac) * value;
                }
            }
            t.vdd[row][n] = tot;
            t.val[row][n] = round_c(tot);
        }
    }
    if (!fam.dd) t.vdd.clear();
    return t;
}

Complex tau(const SampleTable& table, int n) {
    const int M = table.m_total;
    if (M == 0) return {1.0, 0.0};
    if (n + M - 1 > table.n_hi) throw InvalidInput("tau index beyond sample table");
    std::vector<int> cols(M);
    for (int i = 0; i < M; ++i) cols[i] = n + i;
    return round_c(block_det(table, cols, iota_vec(M)));
}

TauSequence existence_scan(const SampleTable& table, int n_max, double tau_tol) {
    TauSequence seq;
    const int count = std::min(n_max + 1, table.n_hi - table.m_total + 2);
    seq.values.resize(count);
    for (int n = 0; n < count; ++n) seq.values[n] = tau(table, n);
    seq.zero_flag.assign(count, false);
    for (int n = 0; n < count; ++n) {
        const double prev = n > 0 ? std::abs(seq.values[n - 1]) : -1.0;
        const double next = n + 1 < count ? std::abs(seq.values[n + 1]) : -1.0;
        double scale;
        if (prev >= 0.0 && next >= 0.0) scale = std::sqrt(prev * next);
        else if (prev >= 0.0) scale = prev;
        else if (next >= 0.0) scale = next;
        else scale = 1.0;
        scale = std::max(scale, 1e-300);
        if (std::abs(seq.values[n]) < tau_tol * scale) {
            seq.zero_flag[n] = true;
            if (seq.first_flag < 0) seq.first_flag = n;
        }
    }
    return seq;
}

CVector omega_column(const SampleTable& table, int col) {
    const int M = table.m_total;
    CVector out(M);
    if (M == 0) return out;
    if (col + M > table.n_hi) throw InvalidInput("omega column beyond sample table");
    Grid<CDD> A(M, M);
    std::vector<CDD> b(M);
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < M; ++j) A(i, j) = table.atx(i, col + 1 + j);
        b[i] = -table.atx(i, col);
    }
    std::vector<CDD> x;
    try {
        x = solve_dense(std::move(A), std::move(b));
    } catch (const SingularSystem&) {
        throw SingularSystem("sample-value system singular (tau breakdown)", col);
    }
    for (int j = 0; j < M; ++j) out[j] = round_c(x[j]);
    return out;
}

double tau_consistency(const SampleTable& table, int n) {
    const int M = table.m_total;
    if (M == 0) return 0.0;
    const CVector colv = omega_column(table, n);
    const Complex ratio = tau(table, n) / tau(table, n + 1);
    const Complex want = (M % 2 == 0 ? 1.0 : -1.0) * ratio;
    return std::abs(colv[M - 1] - want) / std::max(std::abs(want), 1e-300);
}

CPoly perturbed_B(const SampleTable& table, const OrthoFamily& fam, int n, int b) {
    const int M = table.m_total;
    if (n < 1 || n - 1 >= fam.count) throw InvalidInput("perturbed_B index out of range");
    if (M == 0) return to_complex_poly(fam.B[n - 1][b]);
    const Complex tprev = tau(table, n - 1);
    if (std::abs(tprev) == 0.0)
        throw ExistenceFailure("tau vanished; perturbed family does not exist", n - 1);

    // kernel columns K_row(y) = sum_{i<n} table(row,i) B_i^{(b)}(y)
    std::vector<std::vector<CDD>> K(M);
    int maxdeg = 0;
    for (int i = 0; i < n; ++i) maxdeg = std::max(maxdeg, fam.B[i][b].degree());
    for (int row = 0; row < M; ++row) {
        K[row].assign(maxdeg + 1, CDD{});
        for (int i = 0; i < n; ++i) {
            const CDD w = table.atx(row, i);
            if (fam.dd) {
                const auto& c = fam.dd->B[i][b].coeffs();
                for (size_t k = 0; k < c.size(); ++k) K[row][k] += w * CDD(c[k]);
            } else {
                const auto& c = fam.B[i][b].coeffs();
                for (size_t k = 0; k < c.size(); ++k) K[row][k] += w * CDD(DD(c[k]));
            }
        }
    }
    // expand det[[K | A-block cols n..n+M-2]] along the kernel column
    std::vector<CDD> acc(maxdeg + 1, CDD{});
    std::vector<int> cols(M - 1);
    for (int i = 0; i < M - 1; ++i) cols[i] = n + i;
    for (int row = 0; row < M; ++row) {
        std::vector<int> rows;
        for (int t2 = 0; t2 < M; ++t2)
            if (t2 != row) rows.push_back(t2);
        CDD minor = M == 1 ? CDD(DD(1.0)) : block_det(table, cols, rows);
        const double sign = row % 2 == 0 ? 1.0 : -1.0;
        for (int k = 0; k <= maxdeg; ++k) acc[k] += CDD(DD(sign)) * K[row][k] * minor;
    }
    const CDD tp = M == 1 ? table.atx(0, n - 1) : block_det(table, [&] {
        std::vector<int> cs(M);
        for (int i = 0; i < M; ++i) cs[i] = n - 1 + i;
        return cs;
    }(), iota_vec(M));
    std::vector<Complex> out(maxdeg + 1);
    for (int k = 0; k <= maxdeg; ++k) out[k] = round_c(acc[k] / tp);
    CPoly res(std::move(out));
    res.trim();
    return res;
}

PerturbedARow perturbed_A(const SampleTable& table, const OrthoFamily& fam,
                          const MatrixPolynomial& R, const JordanChainSet& chains,
                          int n, double div_tol) {
    const int M = table.m_total;
    const int p = fam.p;
    if (n + M > table.n_hi) throw InvalidInput("perturbed_A index beyond sample table");
    PerturbedARow out;
    out.product.resize(p);

    const Complex tnext = tau(table, n + 1);
    if (std::abs(tnext) == 0.0)
        throw ExistenceFailure("tau vanished; perturbed family does not exist", n + 1);

    // minors of the M x (M+1) block over columns n..n+M, skipping column n+k
    std::vector<CDD> minors(M + 1);
    for (int k = 0; k <= M; ++k) {
        std::vector<int> cols;
        for (int t2 = 0; t2 <= M; ++t2)
            if (t2 != k) cols.push_back(n + t2);
        minors[k] = M == 0 ? CDD(DD(1.0)) : block_det(table, cols, iota_vec(M));
    }
    CDD tn1 = M == 0 ? CDD(DD(1.0)) : block_det(table, [&] {
        std::vector<int> cs(M);
        for (int i = 0; i < M; ++i) cs[i] = n + 1 + i;
        return cs;
    }(), iota_vec(M));

    for (int a = 0; a < p; ++a) {
        int maxdeg = 0;
        for (int k = 0; k <= M; ++k) maxdeg = std::max(maxdeg, fam.A[n + k][a].degree());
        std::vector<CDD> g(maxdeg + 1, CDD{});
        for (int k = 0; k <= M; ++k) {
            const double sign = k % 2 == 0 ? 1.0 : -1.0;
            if (fam.dd) {
                const auto& c = fam.dd->A[n + k][a].coeffs();
                for (size_t t2 = 0; t2 < c.size(); ++t2)
                    g[t2] += CDD(c[t2] * DD(sign)) * minors[k];
            } else {
                const auto& c = fam.A[n + k][a].coeffs();
                for (size_t t2 = 0; t2 < c.size(); ++t2)
                    g[t2] += CDD(DD(c[t2] * sign)) * minors[k];
            }
        }
        std::vector<Complex> gc(maxdeg + 1);
        for (int t2 = 0; t2 <= maxdeg; ++t2) gc[t2] = round_c(g[t2] / tn1);
        out.product[a] = CPoly(std::move(gc));
        out.product[a].trim();
    }

    // Jordan-chain inheritance certificate before dividing
    PolyMatrix col(p, 1);
    for (int a = 0; a < p; ++a) col.at(a, 0) = out.product[a];
    out.divisibility_residual = divisibility_check(col, chains);

    LeftDivisionC div = left_divide(R, out.product, div_tol);
    out.quotient = std::move(div.quotient);
    out.division_residual = div.residual;
    return out;
}

int pipeline_truncation(int n_max, int p, int degR) { return n_max + p * degR + 2; }

namespace {

// formula-path H: reciprocal of the leading coefficient of the monic-slot
// component of Ahat_n
double leading_H(const std::vector<std::vector<Poly>>& A_hat, int n, int p) {
    const int a = n % p;
    const int deg = n / p;
    const double c = A_hat[n][a].coeff(deg);
    return c != 0.0 ? 1.0 / c : 0.0;
}

Poly real_checked(const CPoly& cp, double* max_imag) {
    double scale = 0.0;
    for (const auto& v : cp.coeffs()) scale = std::max(scale, std::abs(v));
    for (const auto& v : cp.coeffs())
        *max_imag = std::max(*max_imag, std::abs(v.imag()) / std::max(scale, 1e-300));
    return real_part(cp);
}

} // namespace

PerturbRun perturb_right(const WeightGrid& grid, const MatrixPolynomial& R,
                         const PerturbOptions& opts) {
    grid.validate();
    PerturbRun run(R);
    run.q = grid.q;
    run.p = grid.p;
    if (R.size() != grid.p)
        throw InvalidInput("right perturbation must be p x p");
    run.structure = R.validateStructureOrThrow();
    run.det = R.determinant();
    const int M = run.structure.det_degree;

    if (M > 0) {
        run.eig = det_roots(R, opts.cluster_radius);
        run.chains = left_jordan_chains(R, run.eig, opts.rank_tol);
    }

    const int T = pipeline_truncation(opts.n_max, grid.p, R.degree());
    run.moments = assemble(grid, T, opts.extended_precision);
    run.fact = factorize(run.moments, {opts.pivot_tol, opts.extended_precision});
    run.fam = build_family(run.fact, grid.q, grid.p);

    run.table = sample_table(run.fam, run.chains, opts.n_max + M);
    run.conn.m_total = M;
    run.conn.tau = existence_scan(run.table, opts.n_max + 1, opts.tau_tol);
    run.existence_ok = run.conn.tau.ok();
    if (!run.existence_ok) return run;

    const int n_hi = opts.n_max;
    run.conn.omega_columns.resize(n_hi + 1);
    run.conn.tau_consistency.resize(n_hi + 1);
    for (int c = 0; c <= n_hi && c + M <= run.table.n_hi; ++c) {
        run.conn.omega_columns[c] = omega_column(run.table, c);
        run.conn.tau_consistency[c] = tau_consistency(run.table, c);
    }

    run.conn.B_hat.resize(n_hi + 1);
    run.conn.A_hat.resize(n_hi + 1);
    run.conn.divisibility.resize(n_hi + 1);
    run.conn.division.resize(n_hi + 1);
    run.conn.H_hat = Vector(n_hi + 1);
    for (int n = 0; n <= n_hi; ++n) {
        run.conn.B_hat[n].resize(grid.q);
        for (int b = 0; b < grid.q; ++b)
            run.conn.B_hat[n][b] =
                real_checked(perturbed_B(run.table, run.fam, n + 1, b), &run.conn.max_imag);
        if (n + M <= run.table.n_hi) {
            PerturbedARow row = perturbed_A(run.table, run.fam, R, run.chains, n);
            run.conn.A_hat[n].resize(grid.p);
            for (int a = 0; a < grid.p; ++a)
                run.conn.A_hat[n][a] = real_checked(row.quotient[a], &run.conn.max_imag);
            run.conn.divisibility[n] = row.divisibility_residual;
            run.conn.division[n] = row.division_residual;
        }
    }
    for (int n = 0; n <= n_hi; ++n)
        run.conn.H_hat[n] = leading_H(run.conn.A_hat, n, grid.p);

    // connection identities at deterministic pseudo-random sample points
    std::mt19937 rng(987431u);
    std::uniform_real_distribution<double> ud(grid.lo - 0.5, grid.hi + 0.5);
    const int n_conn = n_hi; // every term through n_max is available
    for (int trial = 0; trial < 10; ++trial) {
        const double x = ud(rng);
        // A-side: A(x) Omega - R(x) Ahat(x), column n
        for (int n = 0; n <= n_conn; ++n) {
            const Matrix Rx = R.eval(x);
            double scale = 1.0;
            for (int a = 0; a < grid.p; ++a) {
                Complex lhs = run.fam.evalA(n, a, x);
                scale = std::max(scale, std::abs(lhs));
                for (int j = 1; j <= M; ++j) {
                    const Complex term =
                        run.conn.omega_columns[n][j - 1] * run.fam.evalA(n + j, a, x);
                    scale = std::max(scale, std::abs(term));
                    lhs += term;
                }
                Complex rhs = 0.0;
                for (int abar = 0; abar < grid.p; ++abar)
                    rhs += Rx(a, abar) * run.conn.A_hat[n][abar].eval(Complex(x, 0.0));
                run.conn_A_residual =
                    std::max(run.conn_A_residual, std::abs(lhs - rhs) / scale);
            }
            // B-side: Bhat_n + sum_i Omega_{n,n-i} Bhat_{n-i} = B_n
            for (int b = 0; b < grid.q; ++b) {
                Complex lhs = run.conn.B_hat[n][b].eval(Complex(x, 0.0));
                double scale_b = std::max(1.0, std::abs(lhs));
                for (int i = 1; i <= std::min(n, M); ++i) {
                    const Complex term = run.conn.omega_columns[n - i][i - 1] *
                                         run.conn.B_hat[n - i][b].eval(Complex(x, 0.0));
                    scale_b = std::max(scale_b, std::abs(term));
                    lhs += term;
                }
                const Complex rhs = run.fam.evalB(n, b, x);
                run.conn_B_residual =
                    std::max(run.conn_B_residual, std::abs(lhs - rhs) / scale_b);
            }
        }
    }

    // kernel connection R(x) Khat^{[n]}(x,y) = K^{[n]}(x,y) + [A][Omega_M][Bhat]
    std::uniform_real_distribution<double> udy(grid.lo, grid.hi);
    for (int trial = 0; trial < 5; ++trial) {
        const double x = ud(rng), y = udy(rng);
        for (int n = 2; n <= std::min(8, n_conn); ++n) {
            const Matrix Rx = R.eval(x);
            double scale = 1.0;
            for (int a = 0; a < grid.p; ++a)
                for (int b = 0; b < grid.q; ++b) {
                    Complex lhs = 0.0;
                    for (int abar = 0; abar < grid.p; ++abar) {
                        Complex khat = 0.0; // perturbed kernel from formula families
                        for (int i = 0; i < n; ++i)
                            khat += run.conn.A_hat[i][abar].eval(Complex(x, 0.0)) *
                                    run.conn.B_hat[i][b].eval(Complex(y, 0.0));
                        lhs += Rx(a, abar) * khat;
                    }
                    Complex rhs = 0.0;
                    for (int i = 0; i < n; ++i)
                        rhs += run.fam.evalA(i, a, x) * run.fam.evalB(i, b, y);
                    for (int j = 0; j < M; ++j)
                        for (int i = 1; i <= M - j; ++i) {
                            if (n - i < 0) continue;
                            const Complex term = run.fam.evalA(n + j, a, x) *
                                                 run.conn.omega_columns[n - i][j + i - 1] *
                                                 run.conn.B_hat[n - i][b].eval(Complex(y, 0.0));
                            scale = std::max(scale, std::abs(term));
                            rhs += term;
                        }
                    scale = std::max({scale, std::abs(lhs), std::abs(rhs)});
                    run.kernel_residual =
                        std::max(run.kernel_residual, std::abs(lhs - rhs) / scale);
                }
        }
    }
    return run;
}

LeftPerturbRun perturb_left(const WeightGrid& grid, const MatrixPolynomial& L,
                            const PerturbOptions& opts) {
    grid.validate();
    if (L.size() != grid.q)
        throw InvalidInput("left perturbation must be q x q");
    LeftPerturbRun out(perturb_right(grid.transposed(), L.transpose(), opts));
    const PerturbRun& t = out.transposed;
    if (!t.existence_ok) return out;

    const int count = static_cast<int>(t.conn.B_hat.size());
    out.B_hat.resize(count);
    out.A_hat.resize(count);
    out.H_hat = t.conn.H_hat;
    for (int n = 0; n < count; ++n) {
        // dual-frame swap: left Bhat components are the transposed-run Ahat
        // scaled by H, left Ahat components are the transposed-run Bhat / H
        out.B_hat[n].resize(grid.q);
        for (int b = 0; b < grid.q && n < static_cast<int>(t.conn.A_hat.size()); ++b)
            out.B_hat[n][b] = t.conn.A_hat[n][b].scaled(t.conn.H_hat[n]);
        out.A_hat[n].resize(grid.p);
        for (int a = 0; a < grid.p; ++a)
            out.A_hat[n][a] = t.conn.B_hat[n][a].scaled(1.0 / t.conn.H_hat[n]);
    }
    return out;
}

} // namespace mmop
