#pragma once

// Scalar polynomials as dense coefficient vectors, lowest degree first.
// Real<->complex promotion is handled at the evaluation call sites.

#include <algorithm>
#include <complex>
#include <utility>
#include <vector>

#include "mmop/dd.hpp"

namespace mmop {

using Complex = std::complex<double>;

template <class T>
class BasicPoly {
public:
    BasicPoly() : c_(1, T(0.0)) {}
    explicit BasicPoly(std::vector<T> coeffs) : c_(std::move(coeffs)) {
        if (c_.empty()) c_.assign(1, T(0.0));
    }

    static BasicPoly constant(T v) { return BasicPoly(std::vector<T>{v}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<T>& coeffs() const { return c_; }
    T coeff(int k) const { return k >= 0 && k < static_cast<int>(c_.size()) ? c_[k] : T(0.0); }
    T& at(int k) {
        if (k >= static_cast<int>(c_.size())) c_.resize(k + 1, T(0.0));
        return c_[k];
    }

    // drop trailing coefficients below rel_tol * max |coeff|
    void trim(double rel_tol = 1e-12) {
        double scale = 0.0;
        for (const auto& v : c_) scale = std::max(scale, mag(v));
        double tol = rel_tol * scale;
        while (c_.size() > 1 && mag(c_.back()) <= tol) c_.pop_back();
    }

    template <class X>
    auto eval(X x, int order = 0) const {
        using R = decltype(std::declval<T>() * x);
        R acc{};
        // Horner over the factorial-weighted shifted coefficients
        for (int l = degree(); l >= order; --l) {
            double fac = 1.0;
            for (int t = l; t > l - order; --t) fac *= t;
            acc = acc * x + R(c_[l] * T(fac));
        }
        return acc;
    }

    BasicPoly derivative() const {
        if (degree() == 0) return BasicPoly();
        std::vector<T> d(c_.size() - 1);
        for (size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * T(static_cast<double>(k));
        return BasicPoly(std::move(d));
    }

    BasicPoly operator+(const BasicPoly& o) const {
        std::vector<T> out(std::max(c_.size(), o.c_.size()), T(0.0));
        for (size_t k = 0; k < c_.size(); ++k) out[k] = out[k] + c_[k];
        for (size_t k = 0; k < o.c_.size(); ++k) out[k] = out[k] + o.c_[k];
        return BasicPoly(std::move(out));
    }

    BasicPoly operator-(const BasicPoly& o) const {
        std::vector<T> out(std::max(c_.size(), o.c_.size()), T(0.0));
        for (size_t k = 0; k < c_.size(); ++k) out[k] = out[k] + c_[k];
        for (size_t k = 0; k < o.c_.size(); ++k) out[k] = out[k] - o.c_[k];
        return BasicPoly(std::move(out));
    }

    BasicPoly operator*(const BasicPoly& o) const {
        std::vector<T> out(c_.size() + o.c_.size() - 1, T(0.0));
        for (size_t i = 0; i < c_.size(); ++i)
            for (size_t j = 0; j < o.c_.size(); ++j)
                out[i + j] = out[i + j] + c_[i] * o.c_[j];
        return BasicPoly(std::move(out));
    }

    BasicPoly scaled(T s) const {
        std::vector<T> out(c_);
        for (auto& v : out) v = v * s;
        return BasicPoly(std::move(out));
    }

private:
    std::vector<T> c_;
};

inline double mag(Complex z) { return std::abs(z.real()) + std::abs(z.imag()); }

using Poly = BasicPoly<double>;
using CPoly = BasicPoly<Complex>;
using PolyDD = BasicPoly<DD>;
using CPolyDD = BasicPoly<CDD>;

inline Poly to_double_poly(const PolyDD& p) {
    std::vector<double> c(p.coeffs().size());
    for (size_t k = 0; k < c.size(); ++k) c[k] = to_double(p.coeffs()[k]);
    Poly out(std::move(c));
    out.trim();
    return out;
}

inline PolyDD to_dd_poly(const Poly& p) {
    std::vector<DD> c(p.coeffs().size());
    for (size_t k = 0; k < c.size(); ++k) c[k] = DD(p.coeffs()[k]);
    return PolyDD(std::move(c));
}

inline CPoly to_complex_poly(const Poly& p) {
    std::vector<Complex> c(p.coeffs().size());
    for (size_t k = 0; k < c.size(); ++k) c[k] = Complex(p.coeffs()[k], 0.0);
    return CPoly(std::move(c));
}

inline Poly real_part(const CPoly& p) {
    std::vector<double> c(p.coeffs().size());
    for (size_t k = 0; k < c.size(); ++k) c[k] = p.coeffs()[k].real();
    Poly out(std::move(c));
    out.trim();
    return out;
}

inline double max_imag(const CPoly& p) {
    double m = 0.0;
    for (const auto& v : p.coeffs()) m = std::max(m, std::abs(v.imag()));
    return m;
}

} // namespace mmop
