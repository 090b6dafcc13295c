#pragma once

#include <cmath>

namespace curvetree {

// Double-double arithmetic: an unevaluated sum hi + lo with |lo| <= ulp(hi)/2,
// giving roughly twice the mantissa of a double. Used where polynomial
// evaluation cancels below the double noise floor (flat functions near tips
// of level curves, tightly clustered polar branches).
struct dd {
    double hi = 0.0;
    double lo = 0.0;

    dd() = default;
    dd(double h) : hi(h), lo(0.0) {}
    dd(double h, double l) : hi(h), lo(l) {}

    double value() const { return hi + lo; }
};

namespace dd_detail {

inline dd two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline dd quick_two_sum(double a, double b) {
    double s = a + b;
    return {s, b - (s - a)};
}

inline dd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

} // namespace dd_detail

inline dd operator+(const dd& a, const dd& b) {
    dd s = dd_detail::two_sum(a.hi, b.hi);
    s.lo += a.lo + b.lo;
    return dd_detail::quick_two_sum(s.hi, s.lo);
}

inline dd operator-(const dd& a, const dd& b) { return a + dd{-b.hi, -b.lo}; }

inline dd operator*(const dd& a, const dd& b) {
    dd p = dd_detail::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return dd_detail::quick_two_sum(p.hi, p.lo);
}

inline dd dd_pow(dd base, unsigned e) {
    dd result(1.0);
    while (e > 0) {
        if (e & 1u) result = result * base;
        base = base * base;
        e >>= 1u;
    }
    return result;
}

} // namespace curvetree
