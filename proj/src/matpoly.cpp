#include "mmop/matpoly.hpp"

#include <cmath>
#include <numbers>

#include "mmop/errors.hpp"

namespace mmop {

MatrixPolynomial MatrixPolynomial::fromCoeffs(std::vector<Matrix> coeffs, double trim_tol) {
    if (coeffs.empty()) throw InvalidInput("matrix polynomial needs at least one coefficient");
    const int p = static_cast<int>(coeffs[0].rows());
    if (p <= 0 || coeffs[0].cols() != p)
        throw InvalidInput("matrix polynomial coefficients must be square");
    double scale = 0.0;
    for (const auto& c : coeffs) {
        if (c.rows() != p || c.cols() != p)
            throw InvalidInput("matrix polynomial coefficients must share one size");
        scale = std::max(scale, c.cwiseAbs().maxCoeff());
    }
    const double tol = trim_tol * scale;
    while (coeffs.size() > 1 && coeffs.back().cwiseAbs().maxCoeff() <= tol)
        coeffs.pop_back();
    MatrixPolynomial r;
    r.size_ = p;
    r.coeffs_ = std::move(coeffs);
    return r;
}

MatrixPolynomial MatrixPolynomial::identity(int size) {
    return fromCoeffs({Matrix::Identity(size, size)});
}

MatrixPolynomial MatrixPolynomial::scalar(const Poly& pol) {
    std::vector<Matrix> c;
    for (double v : pol.coeffs()) c.push_back(Matrix::Constant(1, 1, v));
    return fromCoeffs(std::move(c));
}

bool MatrixPolynomial::isZero() const {
    return degree() == 0 && coeffs_[0].cwiseAbs().maxCoeff() == 0.0;
}

Matrix MatrixPolynomial::eval(double x, int order) const {
    Matrix acc = Matrix::Zero(size_, size_);
    for (int l = degree(); l >= order; --l) {
        double fac = 1.0;
        for (int t = l; t > l - order; --t) fac *= t;
        acc = acc * x + coeffs_[l] * fac;
    }
    return acc;
}

CMatrix MatrixPolynomial::eval(Complex x, int order) const {
    CMatrix acc = CMatrix::Zero(size_, size_);
    for (int l = degree(); l >= order; --l) {
        double fac = 1.0;
        for (int t = l; t > l - order; --t) fac *= t;
        acc = acc * x + coeffs_[l].cast<Complex>() * fac;
    }
    return acc;
}

Poly MatrixPolynomial::determinant() const {
    const int n = degree() * size_;       // attainable determinant degree
    const int npts = n + 1;
    double scale = 0.0;
    for (const auto& c : coeffs_) scale = std::max(scale, c.cwiseAbs().maxCoeff());
    const double radius = std::max(1.0, scale);

    Eigen::VectorXd xs(npts), vals(npts);
    double vmax = 0.0;
    for (int k = 0; k < npts; ++k) {
        double x = npts == 1 ? 0.0
                             : radius * std::cos(std::numbers::pi * k / (npts - 1));
        xs[k] = x;
        vals[k] = eval(x).determinant();
        vmax = std::max(vmax, std::abs(vals[k]));
    }
    const double detscale = std::pow(std::max(scale, 1.0), size_);
    if (vmax <= 1e-12 * detscale)
        throw NonRegular("determinant vanishes at all sample points");

    Eigen::MatrixXd V(npts, npts);
    for (int k = 0; k < npts; ++k) {
        double pw = 1.0;
        for (int j = 0; j < npts; ++j) {
            V(k, j) = pw;
            pw *= xs[k];
        }
    }
    Eigen::VectorXd c = V.colPivHouseholderQr().solve(vals);
    Poly out(std::vector<double>(c.data(), c.data() + npts));
    out.trim();
    return out;
}

StructureReport MatrixPolynomial::validateStructure(double tol) const {
    StructureReport rep;
    const int p = size_;
    const int N = degree();
    const Matrix& RN = coeffs_[N];
    const double scale = std::max(1.0, RN.cwiseAbs().maxCoeff());
    const double eps = tol * scale;

    int found = -1;
    std::string why;
    for (int r = 0; r < p; ++r) {
        bool ok = true;
        for (int i = 0; i < p && ok; ++i)
            for (int j = 0; j < p && ok; ++j) {
                double want = (i < p - r && j >= r && j - r == i) ? 1.0 : 0.0;
                if (std::abs(RN(i, j) - want) > eps) ok = false;
            }
        if (ok) { found = r; break; }
    }
    if (found < 0) {
        rep.satisfies_c2 = false;
        rep.violation = "leading coefficient does not match [[0, I_{p-r}],[0, 0]] for any r";
        rep.det_degree = -1;
        return rep;
    }
    rep.r = found;
    rep.det_degree = N * p - found;
    if (found > 0) {
        if (N == 0) {
            rep.satisfies_c2 = false;
            rep.violation = "degree 0 with singular leading coefficient";
            return rep;
        }
        const Matrix& RN1 = coeffs_[N - 1];
        for (int i = 0; i < found; ++i)
            for (int j = 0; j < found; ++j) {
                double want = i == j ? 1.0 : 0.0;
                if (std::abs(RN1(p - found + i, j) - want) > eps) {
                    rep.satisfies_c2 = false;
                    rep.violation = "sub-leading lower-left block is not the identity";
                    return rep;
                }
            }
    }
    rep.satisfies_c2 = true;
    return rep;
}

StructureReport MatrixPolynomial::validateStructureOrThrow(double tol) const {
    StructureReport rep = validateStructure(tol);
    if (!rep.satisfies_c2)
        throw StructureViolation("perturbation does not satisfy the leading-block conditions: " + rep.violation,
                                 rep.violation);
    return rep;
}

Matrix MatrixPolynomial::shiftImage(int block, int trunc) const {
    const int s = block;
    if (s <= 0 || trunc <= 0) throw InvalidInput("shift image needs positive block size and truncation");
    if (trunc < s * (degree() + 1))
        throw TruncationTooSmall("truncation smaller than s*(N+1)");
    Matrix out = Matrix::Zero(trunc, trunc);
    for (int i = 0; i < trunc; ++i)
        for (int j = 0; j < trunc; ++j) {
            int bi = i / s, bj = j / s;
            int l = bi - bj;
            if (l < 0 || l > degree()) continue;
            if (size_ == s)
                out(i, j) = coeffs_[l](i % s, j % s);
            else if (size_ == 1)
                out(i, j) = (i % s == j % s) ? coeffs_[l](0, 0) : 0.0;
            else
                throw InvalidInput("block size must equal the polynomial size (or 1 for scalars)");
        }
    return out;
}

Matrix MatrixPolynomial::shiftImageUpper(int block, int trunc) const {
    Matrix lower = transpose().shiftImage(block, trunc);
    // R(Lambda_[s]) block (i,j) = R_{j-i}; building it as (R^T(Lambda^T))^T
    // keeps a single banded assembly path.
    return lower.transpose();
}

MatrixPolynomial MatrixPolynomial::transpose() const {
    std::vector<Matrix> c;
    c.reserve(coeffs_.size());
    for (const auto& m : coeffs_) c.push_back(m.transpose());
    return fromCoeffs(std::move(c), 0.0);
}

Poly MatrixPolynomial::entry(int i, int j) const {
    std::vector<double> c(coeffs_.size());
    for (size_t l = 0; l < coeffs_.size(); ++l) c[l] = coeffs_[l](i, j);
    Poly out(std::move(c));
    out.trim();
    return out;
}

namespace {

template <class Scalar, class PolyT>
std::pair<std::vector<PolyT>, double>
left_divide_impl(const MatrixPolynomial& R, const std::vector<PolyT>& G) {
    const int p = R.size();
    if (static_cast<int>(G.size()) != p)
        throw InvalidInput("left division needs one right-hand polynomial per row");
    const int N = R.degree();
    int degG = 0;
    for (const auto& g : G) degG = std::max(degG, g.degree());
    const int dq = std::max(degG - (N - 1), 0);

    const int nunk = p * (dq + 1);
    const int neq = p * (N + dq + 1);
    Grid<Scalar> A(neq, nunk);
    std::vector<Scalar> b(neq, Scalar(0.0));
    for (int a = 0; a < p; ++a)
        for (int k = 0; k < N + dq + 1; ++k) {
            const int row = a * (N + dq + 1) + k;
            b[row] = Scalar(G[a].coeff(k));
            for (int abar = 0; abar < p; ++abar)
                for (int m = 0; m <= dq; ++m) {
                    const int l = k - m;
                    if (l >= 0 && l <= N)
                        A(row, abar * (dq + 1) + m) += Scalar(R.coeff(l)(a, abar));
                }
        }
    double residual = 0.0;
    std::vector<Scalar> sol = solve_rectangular(std::move(A), std::move(b), &residual);
    std::vector<PolyT> Q(p);
    for (int abar = 0; abar < p; ++abar) {
        std::vector<Scalar> c(sol.begin() + abar * (dq + 1), sol.begin() + (abar + 1) * (dq + 1));
        Q[abar] = PolyT(std::move(c));
        Q[abar].trim();
    }
    return {std::move(Q), residual};
}

template <class PolyT>
double coeff_scale(const std::vector<PolyT>& G) {
    double s = 0.0;
    for (const auto& g : G)
        for (const auto& v : g.coeffs()) s = std::max(s, mag(v));
    return std::max(s, 1.0);
}

} // namespace

LeftDivision left_divide(const MatrixPolynomial& R, const std::vector<Poly>& G, double tol) {
    auto [Q, residual] = left_divide_impl<double, Poly>(R, G);
    if (residual > tol * coeff_scale(G))
        throw DivisionFailure("left division residual above tolerance", residual);
    return {std::move(Q), residual};
}

LeftDivisionC left_divide(const MatrixPolynomial& R, const std::vector<CPoly>& G, double tol) {
    auto [Q, residual] = left_divide_impl<Complex, CPoly>(R, G);
    if (residual > tol * coeff_scale(G))
        throw DivisionFailure("left division residual above tolerance", residual);
    return {std::move(Q), residual};
}

} // namespace mmop
