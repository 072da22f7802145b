#include "mmop/measures.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <type_traits>

#include "mmop/errors.hpp"

namespace mmop {

bool WeightGrid::hasDensity(int b, int a) const {
    return !std::holds_alternative<MomentTable>(at(b, a));
}

double WeightGrid::densityValue(int b, int a, double x) const {
    const WeightSpec& w = at(b, a);
    if (const auto* pd = std::get_if<PolynomialDensity>(&w)) return pd->density.eval(x);
    if (const auto* nc = std::get_if<NamedClassical>(&w)) {
        if (nc->name == "lebesgue") return 1.0;
        if (nc->name == "jacobi")
            return std::pow(x, nc->alpha) * std::pow(1.0 - x, nc->beta);
    }
    throw InvalidInput("weight entry has no pointwise density");
}

WeightGrid WeightGrid::transposed() const {
    WeightGrid t;
    t.q = p;
    t.p = q;
    t.lo = lo;
    t.hi = hi;
    t.entries.resize(entries.size());
    for (int b = 0; b < q; ++b)
        for (int a = 0; a < p; ++a) t.entries[static_cast<size_t>(a) * q + b] = at(b, a);
    return t;
}

void WeightGrid::validate() const {
    if (q <= 0 || p <= 0) throw InvalidInput("grid needs positive q and p");
    if (!(lo < hi)) throw InvalidInput("grid interval must satisfy lo < hi");
    if (static_cast<int>(entries.size()) != q * p)
        throw InvalidInput("grid needs q*p weight entries");
    for (const auto& w : entries)
        if (const auto* nc = std::get_if<NamedClassical>(&w)) {
            if (nc->name != "lebesgue" && nc->name != "jacobi")
                throw InvalidInput("unknown classical weight: " + nc->name);
            if (nc->alpha < 0 || nc->beta < 0)
                throw InvalidInput("jacobi weight needs nonnegative integer exponents");
            if (nc->name == "jacobi" && (lo != 0.0 || hi != 1.0))
                throw InvalidInput("jacobi weight is defined on [0,1]");
        }
}

namespace {

template <class Real>
Real pow_int_or(Real base, int e);

template <>
double pow_int_or<double>(double base, int e) { return std::pow(base, e); }
template <>
DD pow_int_or<DD>(DD base, int e) { return pow_int(base, e); }

template <class Real>
std::vector<Real> moments_of(const WeightSpec& w, double lo, double hi, int n_max) {
    std::vector<Real> out(n_max + 1, Real(0.0));
    if (const auto* pd = std::get_if<PolynomialDensity>(&w)) {
        // int_lo^hi x^{n+k} dx summed over density coefficients
        const auto& c = pd->density.coeffs();
        for (int n = 0; n <= n_max; ++n) {
            Real s(0.0);
            for (size_t k = 0; k < c.size(); ++k) {
                const int e = n + static_cast<int>(k) + 1;
                Real term = (pow_int_or(Real(hi), e) - pow_int_or(Real(lo), e)) / Real(static_cast<double>(e));
                s += Real(c[k]) * term;
            }
            out[n] = s;
        }
        return out;
    }
    if (const auto* mt = std::get_if<MomentTable>(&w)) {
        if (static_cast<int>(mt->values.size()) <= n_max)
            throw InsufficientMomentTable("moment table shorter than requested degree");
        for (int n = 0; n <= n_max; ++n) {
            if constexpr (std::is_same_v<Real, DD>)
                out[n] = mt->values[n];
            else
                out[n] = to_double(mt->values[n]);
        }
        return out;
    }
    const auto& nc = std::get<NamedClassical>(w);
    if (nc.name == "lebesgue") {
        for (int n = 0; n <= n_max; ++n)
            out[n] = (pow_int_or(Real(hi), n + 1) - pow_int_or(Real(lo), n + 1)) / Real(static_cast<double>(n + 1));
        return out;
    }
    // jacobi on [0,1]: int x^{n+alpha} (1-x)^beta = B(n+alpha+1, beta+1)
    //                = (n+alpha)! beta! / (n+alpha+beta+1)!
    for (int n = 0; n <= n_max; ++n) {
        Real v(1.0);
        // beta! / prod_{t=n+alpha+1}^{n+alpha+beta+1} t
        for (int t = 1; t <= nc.beta; ++t) v *= Real(static_cast<double>(t));
        for (int t = n + nc.alpha + 1; t <= n + nc.alpha + nc.beta + 1; ++t)
            v /= Real(static_cast<double>(t));
        out[n] = v;
    }
    return out;
}

template <class Real>
MomentGridT<Real> moments_impl(const WeightGrid& grid, int n_max) {
    grid.validate();
    if (n_max < 0) throw InvalidInput("n_max must be nonnegative");
    MomentGridT<Real> out;
    out.q = grid.q;
    out.p = grid.p;
    out.n_max = n_max;
    out.seq.resize(static_cast<size_t>(grid.q) * grid.p);
    for (int b = 0; b < grid.q; ++b)
        for (int a = 0; a < grid.p; ++a)
            out.seq[static_cast<size_t>(b) * grid.p + a] =
                moments_of<Real>(grid.at(b, a), grid.lo, grid.hi, n_max);
    return out;
}

} // namespace

MomentGrid moments(const WeightGrid& grid, int n_max) { return moments_impl<double>(grid, n_max); }
MomentGridDD moments_dd(const WeightGrid& grid, int n_max) { return moments_impl<DD>(grid, n_max); }

MomentGrid moments_quadrature(const WeightGrid& grid, int n_max) {
    grid.validate();
    MomentGrid out;
    out.q = grid.q;
    out.p = grid.p;
    out.n_max = n_max;
    out.seq.resize(static_cast<size_t>(grid.q) * grid.p);
    for (int b = 0; b < grid.q; ++b)
        for (int a = 0; a < grid.p; ++a) {
            if (!grid.hasDensity(b, a))
                throw InvalidInput("quadrature moments need a density entry");
            int deg = 0;
            if (const auto* pd = std::get_if<PolynomialDensity>(&grid.at(b, a)))
                deg = pd->density.degree();
            else {
                const auto& nc = std::get<NamedClassical>(grid.at(b, a));
                deg = nc.alpha + nc.beta;
            }
            const int nodes = (n_max + deg) / 2 + 1;
            QuadratureRule rule = gauss_legendre(nodes, grid.lo, grid.hi);
            std::vector<double> seq(n_max + 1, 0.0);
            for (size_t i = 0; i < rule.nodes.size(); ++i) {
                const double wv = rule.weights[i] * grid.densityValue(b, a, rule.nodes[i]);
                double pw = 1.0;
                for (int n = 0; n <= n_max; ++n) {
                    seq[n] += wv * pw;
                    pw *= rule.nodes[i];
                }
            }
            out.seq[static_cast<size_t>(b) * grid.p + a] = std::move(seq);
        }
    return out;
}

namespace {

template <class Real>
void fill_entries(const MomentGridT<Real>& moms, int trunc, Grid<Real>& m) {
    const int q = moms.q, p = moms.p;
    const int need = (trunc - 1) / q + (trunc - 1) / p;
    if (moms.n_max < need)
        throw InvalidInput("moment sequences too short for requested truncation");
    for (int j = 0; j < trunc; ++j) {
        const int l = j / q, b = j % q;
        for (int k = 0; k < trunc; ++k) {
            const int mm = k / p, a = k % p;
            m(j, k) = moms.at(b, a)[l + mm];
        }
    }
}

} // namespace

MomentMatrix assemble(const MomentGrid& moms, int trunc) {
    MomentMatrix M;
    M.trunc = trunc;
    M.q = moms.q;
    M.p = moms.p;
    Grid<double> g(trunc, trunc);
    fill_entries(moms, trunc, g);
    M.entries = Matrix(trunc, trunc);
    for (int i = 0; i < trunc; ++i)
        for (int j = 0; j < trunc; ++j) M.entries(i, j) = g(i, j);
    return M;
}

MomentMatrix assemble(const MomentGridDD& moms, int trunc) {
    MomentMatrix M;
    M.trunc = trunc;
    M.q = moms.q;
    M.p = moms.p;
    Grid<DD> g(trunc, trunc);
    fill_entries(moms, trunc, g);
    M.dd = g;
    M.entries = Matrix(trunc, trunc);
    for (int i = 0; i < trunc; ++i)
        for (int j = 0; j < trunc; ++j) M.entries(i, j) = to_double(g(i, j));
    return M;
}

MomentMatrix assemble(const WeightGrid& grid, int trunc, bool extended_precision) {
    const int need = (trunc - 1) / grid.q + (trunc - 1) / grid.p + 1;
    if (extended_precision) return assemble(moments_dd(grid, need), trunc);
    return assemble(moments(grid, need), trunc);
}

double hankel_residual(const MomentMatrix& M) {
    double res = 0.0;
    for (int j = 0; j + M.q < M.trunc; ++j)
        for (int k = 0; k + M.p < M.trunc; ++k)
            res = std::max(res, std::abs(M.entries(j + M.q, k) - M.entries(j, k + M.p)));
    return res;
}

namespace {

// banded product against the shift image, in either precision
template <class Real>
Grid<Real> banded_right_product(const Grid<Real>& M, const MatrixPolynomial& R, int p, int keep) {
    const int T = M.rows();
    const int N = R.degree();
    Grid<Real> out(keep, keep);
    for (int j = 0; j < keep; ++j)
        for (int k = 0; k < keep; ++k) {
            Real s{};
            // R(Lambda^T)(m,k) = R_{m/p - k/p}(m%p, k%p)
            for (int l = 0; l <= N; ++l) {
                const int bm = k / p + l;
                for (int ii = 0; ii < p; ++ii) {
                    const int m = bm * p + ii;
                    if (m >= T) continue;
                    const double rv = R.size() == 1 ? (ii == k % p ? R.coeff(l)(0, 0) : 0.0)
                                                    : R.coeff(l)(ii, k % p);
                    if (rv != 0.0) s += M(j, m) * Real(rv);
                }
            }
            out(j, k) = s;
        }
    return out;
}

template <class Real>
Grid<Real> banded_left_product(const MatrixPolynomial& L, const Grid<Real>& M, int q, int keep) {
    const int T = M.rows();
    const int N = L.degree();
    Grid<Real> out(keep, keep);
    for (int j = 0; j < keep; ++j)
        for (int k = 0; k < keep; ++k) {
            Real s{};
            // L(Lambda)(j,m) = L_{m/q - j/q}(j%q, m%q)
            for (int l = 0; l <= N; ++l) {
                const int bm = j / q + l;
                for (int ii = 0; ii < q; ++ii) {
                    const int m = bm * q + ii;
                    if (m >= T) continue;
                    const double lv = L.size() == 1 ? (j % q == ii ? L.coeff(l)(0, 0) : 0.0)
                                                    : L.coeff(l)(j % q, ii);
                    if (lv != 0.0) s += Real(lv) * M(m, k);
                }
            }
            out(j, k) = s;
        }
    return out;
}

Grid<double> to_grid(const Matrix& m) {
    Grid<double> g(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) g(i, j) = m(i, j);
    return g;
}

template <class Real>
Matrix to_matrix(const Grid<Real>& g) {
    Matrix m(g.rows(), g.cols());
    for (int i = 0; i < g.rows(); ++i)
        for (int j = 0; j < g.cols(); ++j) m(i, j) = to_double(g(i, j));
    return m;
}

} // namespace

MomentMatrix right_multiply(const MomentMatrix& M, const MatrixPolynomial& R) {
    if (R.size() != M.p && R.size() != 1)
        throw InvalidInput("right perturbation size must equal p");
    const int keep = M.trunc - M.p * R.degree();
    if (keep <= 0 || M.trunc < M.p * (R.degree() + 1))
        throw TruncationTooSmall("moment matrix too small for this perturbation");
    MomentMatrix out;
    out.trunc = keep;
    out.q = M.q;
    out.p = M.p;
    if (M.dd) {
        Grid<DD> g = banded_right_product(*M.dd, R, M.p, keep);
        out.dd = g;
        out.entries = to_matrix(g);
    } else {
        out.entries = to_matrix(banded_right_product(to_grid(M.entries), R, M.p, keep));
    }
    return out;
}

MomentMatrix left_multiply(const MomentMatrix& M, const MatrixPolynomial& L) {
    if (L.size() != M.q && L.size() != 1)
        throw InvalidInput("left perturbation size must equal q");
    const int keep = M.trunc - M.q * L.degree();
    if (keep <= 0 || M.trunc < M.q * (L.degree() + 1))
        throw TruncationTooSmall("moment matrix too small for this perturbation");
    MomentMatrix out;
    out.trunc = keep;
    out.q = M.q;
    out.p = M.p;
    if (M.dd) {
        Grid<DD> g = banded_left_product(L, *M.dd, M.q, keep);
        out.dd = g;
        out.entries = to_matrix(g);
    } else {
        out.entries = to_matrix(banded_left_product(L, to_grid(M.entries), M.q, keep));
    }
    return out;
}

MomentMatrix transpose(const MomentMatrix& M) {
    MomentMatrix out;
    out.trunc = M.trunc;
    out.q = M.p;
    out.p = M.q;
    out.entries = M.entries.transpose();
    if (M.dd) {
        Grid<DD> g(M.trunc, M.trunc);
        for (int i = 0; i < M.trunc; ++i)
            for (int j = 0; j < M.trunc; ++j) g(i, j) = (*M.dd)(j, i);
        out.dd = g;
    }
    return out;
}

QuadratureRule gauss_legendre(int n, double lo, double hi) {
    if (n < 1) n = 1;
    // Golub-Welsch: eigen-decompose the Jacobi matrix for Legendre
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        const double bk = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = bk;
        J(k - 1, k) = bk;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int k = 0; k < n; ++k) {
        rule.nodes[k] = mid + half * es.eigenvalues()[k];
        const double v0 = es.eigenvectors()(0, k);
        rule.weights[k] = 2.0 * v0 * v0 * half;
    }
    return rule;
}

std::string to_csv(const Matrix& m) {
    std::string out;
    char buf[64];
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            out += buf;
            out += j + 1 < m.cols() ? ',' : '\n';
        }
    }
    return out;
}

} // namespace mmop
