#include "mmop/families.hpp"

#include <cmath>
#include <cstdio>

#include "mmop/errors.hpp"

namespace mmop {

namespace {

Complex to_complex(CDD v) { return {to_double(v.re), to_double(v.im)}; }

// Horner with derivative order for dd coefficients at a complex point
Complex eval_dd(const PolyDD& pol, Complex x, int order) {
    CDD acc{};
    CDD xz(DD(x.real()), DD(x.imag()));
    for (int l = pol.degree(); l >= order; --l) {
        double fac = 1.0;
        for (int t = l; t > l - order; --t) fac *= t;
        acc = acc * xz + CDD(pol.coeffs()[l] * DD(fac));
    }
    return to_complex(acc);
}

} // namespace

Complex OrthoFamily::evalA(int n, int a, Complex x, int order) const {
    if (dd) return eval_dd(dd->A[n][a], x, order);
    return A[n][a].eval(x, order);
}

Complex OrthoFamily::evalB(int n, int b, Complex x, int order) const {
    if (dd) return eval_dd(dd->B[n][b], x, order);
    return B[n][b].eval(x, order);
}

OrthoFamily build_family(const Factorization& F, int q, int p) {
    const int T = F.trunc;
    OrthoFamily fam;
    fam.q = q;
    fam.p = p;
    fam.count = T;
    fam.H = F.H;
    fam.A.resize(T);
    fam.B.resize(T);
    auto ddpay = F.dd ? std::make_shared<FamilyDD>() : nullptr;
    if (ddpay) {
        ddpay->A.resize(T);
        ddpay->B.resize(T);
        ddpay->H = F.dd->H;
    }
    for (int n = 0; n < T; ++n) {
        fam.B[n].resize(q);
        for (int b = 0; b < q; ++b) {
            std::vector<double> c;
            for (int l = 0; q * l + b <= n; ++l) c.push_back(F.S(n, q * l + b));
            fam.B[n][b] = Poly(c.empty() ? std::vector<double>{0.0} : std::move(c));
            fam.B[n][b].trim();
        }
        fam.A[n].resize(p);
        for (int a = 0; a < p; ++a) {
            std::vector<double> c;
            for (int m = 0; p * m + a <= n; ++m) c.push_back(F.Sbar(n, p * m + a) / F.H[n]);
            fam.A[n][a] = Poly(c.empty() ? std::vector<double>{0.0} : std::move(c));
            fam.A[n][a].trim();
        }
        if (ddpay) {
            ddpay->B[n].resize(q);
            for (int b = 0; b < q; ++b) {
                std::vector<DD> c;
                for (int l = 0; q * l + b <= n; ++l) c.push_back(F.dd->S(n, q * l + b));
                ddpay->B[n][b] = PolyDD(c.empty() ? std::vector<DD>{DD(0.0)} : std::move(c));
            }
            ddpay->A[n].resize(p);
            for (int a = 0; a < p; ++a) {
                std::vector<DD> c;
                for (int m = 0; p * m + a <= n; ++m)
                    c.push_back(F.dd->Sbar(n, p * m + a) / F.dd->H[n]);
                ddpay->A[n][a] = PolyDD(c.empty() ? std::vector<DD>{DD(0.0)} : std::move(c));
            }
        }
    }
    fam.dd = std::move(ddpay);
    return fam;
}

namespace {

// pairing <B_n, A_m> = sum_{b,a} sum_{i,j} B_n^(b)[i] mu_{b,a;i+j} A_m^(a)[j],
// accumulated in compensated precision when the family carries it
double pairing(const OrthoFamily& fam, const MomentGridDD& moms, int n, int m) {
    DD tot(0.0);
    for (int b = 0; b < fam.q; ++b)
        for (int a = 0; a < fam.p; ++a) {
            const auto& mu = moms.at(b, a);
            if (fam.dd) {
                const auto& cb = fam.dd->B[n][b].coeffs();
                const auto& ca = fam.dd->A[m][a].coeffs();
                for (size_t i = 0; i < cb.size(); ++i)
                    for (size_t j = 0; j < ca.size(); ++j)
                        tot += cb[i] * ca[j] * mu[i + j];
            } else {
                const auto& cb = fam.B[n][b].coeffs();
                const auto& ca = fam.A[m][a].coeffs();
                for (size_t i = 0; i < cb.size(); ++i)
                    for (size_t j = 0; j < ca.size(); ++j)
                        tot += DD(cb[i]) * DD(ca[j]) * mu[i + j];
            }
        }
    return to_double(tot);
}

// <x^l w_{b,.}, A_n> (A-side quasi-diagonal integrand)
double pairing_powA(const OrthoFamily& fam, const MomentGridDD& moms, int b, int l, int n) {
    DD tot(0.0);
    for (int a = 0; a < fam.p; ++a) {
        const auto& mu = moms.at(b, a);
        if (fam.dd) {
            const auto& ca = fam.dd->A[n][a].coeffs();
            for (size_t j = 0; j < ca.size(); ++j) tot += ca[j] * mu[l + j];
        } else {
            const auto& ca = fam.A[n][a].coeffs();
            for (size_t j = 0; j < ca.size(); ++j) tot += DD(ca[j]) * mu[l + j];
        }
    }
    return to_double(tot);
}

// <B_n, x^m w_{.,a}> (B-side)
double pairing_powB(const OrthoFamily& fam, const MomentGridDD& moms, int n, int a, int m) {
    DD tot(0.0);
    for (int b = 0; b < fam.q; ++b) {
        const auto& mu = moms.at(b, a);
        if (fam.dd) {
            const auto& cb = fam.dd->B[n][b].coeffs();
            for (size_t i = 0; i < cb.size(); ++i) tot += cb[i] * mu[m + i];
        } else {
            const auto& cb = fam.B[n][b].coeffs();
            for (size_t i = 0; i < cb.size(); ++i) tot += DD(cb[i]) * mu[m + i];
        }
    }
    return to_double(tot);
}

int max_degree(const OrthoFamily& fam, int upto) {
    int d = 0;
    for (int n = 0; n < upto && n < fam.count; ++n) {
        for (const auto& pol : fam.A[n]) d = std::max(d, pol.degree());
        for (const auto& pol : fam.B[n]) d = std::max(d, pol.degree());
    }
    return d;
}

} // namespace

double biorthogonality_residual(const OrthoFamily& fam, const WeightGrid& grid, int upto) {
    upto = std::min(upto, fam.count);
    MomentGridDD moms = moments_dd(grid, 2 * max_degree(fam, upto) + 1);
    double res = 0.0;
    for (int n = 0; n < upto; ++n)
        for (int m = 0; m < upto; ++m) {
            const double want = n == m ? 1.0 : 0.0;
            res = std::max(res, std::abs(pairing(fam, moms, n, m) - want));
        }
    return res;
}

QuasidiagReport quasidiag_residual(const OrthoFamily& fam, const WeightGrid& grid, int upto) {
    upto = std::min(upto, fam.count);
    const int q = fam.q, p = fam.p;
    QuasidiagReport rep;
    const int maxdeg = max_degree(fam, upto);
    // largest power needed: ceil((n+1)/q) or /p, bounded by upto
    MomentGridDD moms = moments_dd(grid, maxdeg + upto + 2);
    for (int n = 0; n < upto; ++n) {
        for (int b = 0; b < q; ++b) {
            // paper range l in {0..ceil((n-(b+1)+2)/q)-1}, b one-based there
            const int top = static_cast<int>(std::ceil(double(n - b + 1) / q)) - 1;
            for (int l = 0; l <= top; ++l) {
                const double v = pairing_powA(fam, moms, b, l, n);
                if (q * l + b >= n)
                    rep.flagged.push_back({'A', n, b, l, v});
                else
                    rep.max_residual = std::max(rep.max_residual, std::abs(v));
            }
        }
        for (int a = 0; a < p; ++a) {
            const int top = static_cast<int>(std::ceil(double(n - a + 1) / p)) - 1;
            for (int m = 0; m <= top; ++m) {
                const double v = pairing_powB(fam, moms, n, a, m);
                if (p * m + a >= n)
                    rep.flagged.push_back({'B', n, a, m, v});
                else
                    rep.max_residual = std::max(rep.max_residual, std::abs(v));
            }
        }
    }
    return rep;
}

Matrix recurrence_matrix(const Factorization& F, int q, int p) {
    const int T = F.trunc;
    if (T < p + q + 2) throw InvalidInput("truncation too small for a recurrence matrix");
    if (F.dd) {
        // T = S Lambda_[q] S^{-1} in compensated precision
        const auto& S = F.dd->S;
        Grid<DD> Sinv = invert_unit_lower(S);
        Grid<DD> out(T, T);
        for (int i = 0; i < T; ++i)
            for (int j = 0; j < T; ++j) {
                DD s{};
                for (int k = 0; k + q < T; ++k) {
                    // (S Lambda_[q])(i,k) = S(i,k) shifted: Lambda_[q](m,k)=delta_{k,m+q}
                    s += S(i, k) * Sinv(k + q, j);
                }
                out(i, j) = s;
            }
        Matrix m(T, T);
        for (int i = 0; i < T; ++i)
            for (int j = 0; j < T; ++j) m(i, j) = to_double(out(i, j));
        return m;
    }
    Matrix lam = Matrix::Zero(T, T);
    for (int k = 0; k + q < T; ++k) lam(k, k + q) = 1.0;
    Matrix Sinv = F.S.triangularView<Eigen::UnitLower>().solve(Matrix::Identity(T, T));
    return F.S * lam * Sinv;
}

KernelSlice kernel_slice(const OrthoFamily& fam, int n, Complex root,
                         const std::vector<CVector>& chain) {
    if (n > fam.count) throw InvalidInput("kernel slice index beyond family count");
    KernelSlice slice;
    slice.n = n;
    slice.root = root;
    const int L = static_cast<int>(chain.size());
    slice.levels.resize(L);
    for (int level = 0; level < L; ++level) {
        slice.levels[level].resize(fam.q);
        // weights w_i = sum_{l<=level} (1/l!) sum_a v_{level-l,a} A_i^{(a),(l)}(x0)
        std::vector<Complex> w(n);
        for (int i = 0; i < n; ++i) {
            Complex tot = 0.0;
            double fac = 1.0;
            for (int l = 0; l <= level; ++l) {
                if (l > 0) fac *= l;
                for (int a = 0; a < fam.p; ++a)
                    tot += chain[level - l][a] / fac * fam.evalA(i, a, root, l);
            }
            w[i] = tot;
        }
        for (int b = 0; b < fam.q; ++b) {
            CPoly acc;
            for (int i = 0; i < n; ++i)
                acc = acc + to_complex_poly(fam.B[i][b]).scaled(w[i]);
            acc.trim();
            slice.levels[level][b] = std::move(acc);
        }
    }
    return slice;
}

std::string family_to_csv(const OrthoFamily& fam) {
    std::string out = "family,n,component,degree,coefficients\n";
    char buf[64];
    auto emit = [&](const char* name, int n, int comp, const Poly& pol) {
        out += name;
        out += ',' + std::to_string(n) + ',' + std::to_string(comp + 1) + ',' +
               std::to_string(pol.degree());
        for (double c : pol.coeffs()) {
            std::snprintf(buf, sizeof(buf), ",%.17g", c);
            out += buf;
        }
        out += '\n';
    };
    for (int n = 0; n < fam.count; ++n)
        for (int b = 0; b < fam.q; ++b) emit("B", n, b, fam.B[n][b]);
    for (int n = 0; n < fam.count; ++n)
        for (int a = 0; a < fam.p; ++a) emit("A", n, a, fam.A[n][a]);
    return out;
}

} // namespace mmop
