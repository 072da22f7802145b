#pragma once

// Compensated (double-double) arithmetic: an unevaluated sum hi+lo of two
// doubles giving ~31 significant digits. Used by the extended-precision
// elimination path where Hankel-type conditioning exhausts plain double.
// Algorithms are the classical error-free transforms (Dekker, Knuth) with
// the product split done by FMA.

#include <cmath>

namespace mmop {

struct DD {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DD() = default;
    constexpr DD(double h) : hi(h), lo(0.0) {}
    constexpr DD(double h, double l) : hi(h), lo(l) {}
    constexpr DD(int v) : hi(static_cast<double>(v)), lo(0.0) {}
    constexpr DD(long v) : hi(static_cast<double>(v)), lo(0.0) {}

    explicit operator double() const { return hi + lo; }
};

namespace detail {

inline DD two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline DD quick_two_sum(double a, double b) {
    // requires |a| >= |b|
    double s = a + b;
    return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
    double pr = a * b;
    return {pr, std::fma(a, b, -pr)};
}

} // namespace detail

inline DD operator+(DD a, DD b) {
    DD s = detail::two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return detail::quick_two_sum(s.hi, s.lo);
}

inline DD operator-(DD a) { return {-a.hi, -a.lo}; }
inline DD operator-(DD a, DD b) { return a + (-b); }

inline DD operator*(DD a, DD b) {
    DD pr = detail::two_prod(a.hi, b.hi);
    pr.lo += a.hi * b.lo + a.lo * b.hi;
    return detail::quick_two_sum(pr.hi, pr.lo);
}

inline DD operator/(DD a, DD b) {
    double q1 = a.hi / b.hi;
    DD rem = a - b * DD(q1);
    double q2 = rem.hi / b.hi;
    rem = rem - b * DD(q2);
    double q3 = rem.hi / b.hi;
    DD q = detail::quick_two_sum(q1, q2);
    return q + DD(q3);
}

inline DD& operator+=(DD& a, DD b) { a = a + b; return a; }
inline DD& operator-=(DD& a, DD b) { a = a - b; return a; }
inline DD& operator*=(DD& a, DD b) { a = a * b; return a; }
inline DD& operator/=(DD& a, DD b) { a = a / b; return a; }

inline bool operator==(DD a, DD b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator!=(DD a, DD b) { return !(a == b); }
inline bool operator<(DD a, DD b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(DD a, DD b) { return b < a; }
inline bool operator<=(DD a, DD b) { return !(b < a); }
inline bool operator>=(DD a, DD b) { return !(a < b); }

inline DD abs(DD a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }
inline double to_double(DD a) { return a.hi + a.lo; }
inline double to_double(double a) { return a; }

inline DD sqrt(DD a) {
    if (a.hi <= 0.0) return DD(std::sqrt(a.hi));
    double x = std::sqrt(a.hi);
    DD xd(x);
    // one Newton step doubles the accurate digits
    return (xd + a / xd) * DD(0.5);
}

inline DD pow_int(DD base, int e) {
    DD out(1.0);
    DD b = base;
    int n = e < 0 ? -e : e;
    while (n) {
        if (n & 1) out *= b;
        b *= b;
        n >>= 1;
    }
    return e < 0 ? DD(1.0) / out : out;
}

// Complex double-double, just enough for Horner evaluation and small
// Gaussian eliminations over spectral samples.
struct CDD {
    DD re, im;

    CDD() = default;
    CDD(DD r) : re(r), im(0.0) {}
    CDD(DD r, DD i) : re(r), im(i) {}
    CDD(double r) : re(r), im(0.0) {}
    CDD(double r, double i) : re(r), im(i) {}
};

inline CDD operator+(CDD a, CDD b) { return {a.re + b.re, a.im + b.im}; }
inline CDD operator-(CDD a, CDD b) { return {a.re - b.re, a.im - b.im}; }
inline CDD operator-(CDD a) { return {-a.re, -a.im}; }
inline CDD operator*(CDD a, CDD b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline CDD operator/(CDD a, CDD b) {
    DD den = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / den, (a.im * b.re - a.re * b.im) / den};
}
inline CDD& operator+=(CDD& a, CDD b) { a = a + b; return a; }
inline CDD& operator-=(CDD& a, CDD b) { a = a - b; return a; }
inline CDD& operator*=(CDD& a, CDD b) { a = a * b; return a; }

// magnitude surrogate for pivoting; cheap and monotone enough
inline double mag(CDD a) { return std::abs(to_double(a.re)) + std::abs(to_double(a.im)); }
inline double mag(DD a) { return std::abs(to_double(a)); }
inline double mag(double a) { return std::abs(a); }

} // namespace mmop
