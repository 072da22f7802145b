#include "mmop/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmop/errors.hpp"

namespace mmop {

namespace {

// roots of a scalar polynomial via the balanced companion matrix
std::vector<Complex> poly_roots(const Poly& pol) {
    Poly p = pol;
    p.trim();
    const int n = p.degree();
    if (n == 0) return {};
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    const double lead = p.coeff(n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -p.coeff(i) / lead;
    // Parlett-Reinsch style balancing pass
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            double rnorm = C.row(i).cwiseAbs().sum();
            double cnorm = C.col(i).cwiseAbs().sum();
            if (rnorm == 0.0 || cnorm == 0.0) continue;
            int expo = 0;
            std::frexp(rnorm / cnorm, &expo);
            expo /= 2;
            if (expo != 0) {
                const double sc = std::ldexp(1.0, expo);
                const double sr = std::ldexp(1.0, -expo);
                if (std::ldexp(cnorm, expo) + std::ldexp(rnorm, -expo) < 0.9 * (cnorm + rnorm)) {
                    changed = true;
                    C.row(i) *= sr;
                    C.col(i) *= sc;
                }
            }
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    std::vector<Complex> out(n);
    for (int i = 0; i < n; ++i) out[i] = es.eigenvalues()[i];
    return out;
}

} // namespace

EigenData det_roots(const MatrixPolynomial& R, double cluster_radius) {
    const StructureReport rep = R.validateStructureOrThrow();
    const Poly det = R.determinant();
    std::vector<Complex> raw = poly_roots(det);
    if (static_cast<int>(raw.size()) != rep.det_degree)
        throw RootCountMismatch("determinant degree does not match Np - r");

    double scale = 1.0;
    for (Complex z : raw) scale = std::max(scale, std::abs(z));
    const double radius = cluster_radius > 0.0 ? cluster_radius : 1e-6 * scale;

    // single-linkage clustering
    std::sort(raw.begin(), raw.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    std::vector<int> label(raw.size());
    std::iota(label.begin(), label.end(), 0);
    bool merged = true;
    while (merged) {
        merged = false;
        for (size_t i = 0; i < raw.size(); ++i)
            for (size_t j = i + 1; j < raw.size(); ++j)
                if (label[i] != label[j] && std::abs(raw[i] - raw[j]) < radius) {
                    const int from = label[j], to = label[i];
                    for (auto& l : label)
                        if (l == from) l = to;
                    merged = true;
                }
    }
    EigenData out;
    std::vector<int> seen;
    for (size_t i = 0; i < raw.size(); ++i) {
        if (std::find(seen.begin(), seen.end(), label[i]) != seen.end()) continue;
        seen.push_back(label[i]);
        Complex sum = 0.0;
        int count = 0;
        for (size_t j = 0; j < raw.size(); ++j)
            if (label[j] == label[i]) { sum += raw[j]; ++count; }
        Complex value = sum / static_cast<double>(count);
        // conjugate-pair symmetrization: real polynomial, so a cluster whose
        // mean is nearly real is snapped onto the axis
        if (std::abs(value.imag()) < radius) value.imag(0.0);
        out.roots.push_back({value, count});
        out.total += count;
    }
    if (out.total != rep.det_degree)
        throw RootCountMismatch("clustered multiplicities do not sum to Np - r");
    std::sort(out.roots.begin(), out.roots.end(), [](const auto& a, const auto& b) {
        return a.value.real() != b.value.real() ? a.value.real() < b.value.real()
                                                : a.value.imag() < b.value.imag();
    });
    return out;
}

namespace {

// stacked chain system: a row vector z = [v_0 .. v_{k-1}] is a chain of
// length k iff z * Tk = 0 with block (j,i) = R^{(i-j)}(x0)/(i-j)! for j <= i
CMatrix chain_system(const MatrixPolynomial& R, Complex x0, int k) {
    const int p = R.size();
    CMatrix Tk = CMatrix::Zero(k * p, k * p);
    std::vector<CMatrix> dv(k);
    double fac = 1.0;
    for (int l = 0; l < k; ++l) {
        if (l > 0) fac *= l;
        dv[l] = R.eval(x0, l) / fac;
    }
    for (int j = 0; j < k; ++j)
        for (int i = j; i < k; ++i) Tk.block(j * p, i * p, p, p) = dv[i - j];
    return Tk;
}

// orthonormal basis of the left nullspace of Tk (right nullspace of Tk^T)
CMatrix left_nullspace(const CMatrix& Tk, double rank_tol) {
    Eigen::JacobiSVD<CMatrix> svd(Tk.transpose(), Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tol = rank_tol * std::max(sv.size() ? sv[0] : 0.0, 1e-300);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > tol) ++rank;
    const int dim = static_cast<int>(Tk.rows()) - rank;
    CMatrix basis(dim, Tk.rows());
    // right null vectors v of Tk^T give rows z = v^T with z Tk = 0
    for (int i = 0; i < dim; ++i) basis.row(i) = svd.matrixV().col(rank + i).transpose();
    return basis;
}

void normalize_chain(std::vector<CVector>& chain) {
    CVector& v0 = chain[0];
    int arg = 0;
    double best = 0.0;
    for (int i = 0; i < v0.size(); ++i)
        if (std::abs(v0[i]) > best) { best = std::abs(v0[i]); arg = i; }
    if (best == 0.0) return;
    int first = 0;
    while (first < v0.size() && std::abs(v0[first]) <= 1e-12 * best) ++first;
    const Complex piv = v0[first < v0.size() ? first : arg];
    const Complex scale = (std::abs(piv) / piv) / best;
    for (auto& v : chain) v *= scale;
}

} // namespace

JordanChainSet left_jordan_chains(const MatrixPolynomial& R, const EigenData& eig,
                                  double rank_tol) {
    const int p = R.size();
    JordanChainSet set;
    for (const auto& root : eig.roots) {
        const Complex x0 = root.value;
        const int K = root.multiplicity;
        JordanChainSet::PerRoot per;
        per.root = x0;

        // grow nullspace dims d_k until they saturate at K
        std::vector<CMatrix> bases;
        std::vector<int> dims;
        int kmax = 0;
        for (int k = 1; k <= K; ++k) {
            CMatrix basis = left_nullspace(chain_system(R, x0, k), rank_tol);
            const int d = static_cast<int>(basis.rows());
            if (!dims.empty() && d <= dims.back()) break;
            bases.push_back(std::move(basis));
            dims.push_back(d);
            kmax = k;
            if (d >= K) break;
        }
        if (dims.empty() || dims.back() != K)
            throw ChainDeficiency("chain lengths at a root do not reach its multiplicity");

        // number of chains of length exactly k: (d_k - d_{k-1}) - (d_{k+1} - d_k)
        auto dim_at = [&](int k) {
            if (k <= 0) return 0;
            if (k > kmax) return dims.back();
            return dims[k - 1];
        };

        // pick chains longest first, deflating leading vectors
        std::vector<CVector> leads; // orthonormalized chosen leading vectors
        auto deflated_norm = [&](const CVector& v) {
            CVector w = v;
            for (const auto& u : leads) w -= (u.dot(w)) * u;
            return w.norm();
        };
        for (int k = kmax; k >= 1; --k) {
            const int want = (dim_at(k) - dim_at(k - 1)) - (dim_at(k + 1) - dim_at(k));
            for (int c = 0; c < want; ++c) {
                // choose the basis vector of N_k with the largest deflated v_0 part
                const CMatrix& basis = bases[k - 1];
                int best_i = -1;
                double best_n = 0.0;
                for (int i = 0; i < basis.rows(); ++i) {
                    CVector v0 = basis.row(i).segment(0, p).transpose();
                    const double nn = deflated_norm(v0);
                    if (nn > best_n) { best_n = nn; best_i = i; }
                }
                if (best_i < 0 || best_n <= rank_tol)
                    throw ChainDeficiency("no independent leading vector for a required chain");
                std::vector<CVector> chain(k);
                for (int j = 0; j < k; ++j)
                    chain[j] = basis.row(best_i).segment(j * p, p).transpose();
                // record the (deflated, normalized) leading direction
                CVector w = chain[0];
                for (const auto& u : leads) w -= (u.dot(w)) * u;
                w.normalize();
                leads.push_back(w);
                normalize_chain(chain);
                per.chains.push_back({std::move(chain)});
            }
        }
        std::sort(per.chains.begin(), per.chains.end(),
                  [](const JordanChain& a, const JordanChain& b) { return a.length() > b.length(); });
        int total = 0;
        for (const auto& c : per.chains) total += c.length();
        if (total != K)
            throw ChainDeficiency("canonical set does not reach the root multiplicity");
        set.roots.push_back(std::move(per));
    }
    return set;
}

PolyMatrix PolyMatrix::from(const MatrixPolynomial& R) {
    PolyMatrix G(R.size(), R.size());
    for (int i = 0; i < R.size(); ++i)
        for (int j = 0; j < R.size(); ++j) G.at(i, j) = to_complex_poly(R.entry(i, j));
    return G;
}

CMatrix PolyMatrix::eval(Complex x, int order) const {
    CMatrix out(r_, c_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) out(i, j) = at(i, j).eval(x, order);
    return out;
}

namespace {

// defining chain sums applied to G; `scaled` divides by the largest term
// magnitude so huge-coefficient blocks stay comparable
double chain_residual_on(const PolyMatrix& G, Complex x0, const std::vector<CVector>& chain,
                         bool scaled) {
    const int L = static_cast<int>(chain.size());
    std::vector<CMatrix> dv(L);
    double fac = 1.0;
    for (int l = 0; l < L; ++l) {
        if (l > 0) fac *= l;
        dv[l] = G.eval(x0, l) / fac;
    }
    double res = 0.0, scale = 1.0;
    for (int i = 0; i < L; ++i) {
        Eigen::RowVectorXcd sum = Eigen::RowVectorXcd::Zero(G.cols());
        for (int l = 0; l <= i; ++l) {
            Eigen::RowVectorXcd term = chain[i - l].transpose() * dv[l];
            scale = std::max(scale, term.cwiseAbs().maxCoeff());
            sum += term;
        }
        res = std::max(res, sum.cwiseAbs().maxCoeff());
    }
    return scaled ? res / scale : res;
}

} // namespace

double verify_chain(const MatrixPolynomial& R, Complex x0, const std::vector<CVector>& chain) {
    return chain_residual_on(PolyMatrix::from(R), x0, chain, /*scaled=*/false);
}

double divisibility_check(const PolyMatrix& G, const JordanChainSet& chains) {
    double res = 0.0;
    for (const auto& per : chains.roots)
        for (const auto& chain : per.chains)
            res = std::max(res, chain_residual_on(G, per.root, chain.vectors, /*scaled=*/true));
    return res;
}

double divisibility_check(const MatrixPolynomial& R_as_G, const JordanChainSet& chains) {
    return divisibility_check(PolyMatrix::from(R_as_G), chains);
}

} // namespace mmop
