#pragma once

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "curvetree/errors.hpp"

namespace curvetree {

// Exact rational number. Thin wrapper over GMP's mpq_class that keeps the
// value canonical (reduced, positive denominator) after every operation.
class Rational {
public:
    Rational() : q_(0) {}
    Rational(long v) : q_(v) {}
    Rational(int v) : q_(static_cast<long>(v)) {}
    Rational(long num, long den) : q_(num, den) {
        if (den == 0) throw DegenerateInput("rational with zero denominator");
        q_.canonicalize();
    }
    explicit Rational(const mpq_class& q) : q_(q) { q_.canonicalize(); }

    // Exact value of a finite double (doubles are dyadic rationals).
    static Rational from_double(double v) {
        if (!std::isfinite(v)) throw DegenerateInput("non-finite value has no exact rational form");
        Rational r;
        r.q_ = mpq_class(v);
        return r;
    }

    // "123", "123/456" or "12.75"; digits only, no sign.
    static Rational from_literal(std::string_view text) {
        auto slash = text.find('/');
        auto dot = text.find('.');
        Rational r;
        if (slash != std::string_view::npos) {
            mpz_class num(std::string(text.substr(0, slash)), 10);
            mpz_class den(std::string(text.substr(slash + 1)), 10);
            if (den == 0) throw DegenerateInput("rational literal with zero denominator");
            r.q_ = mpq_class(num, den);
        } else if (dot != std::string_view::npos) {
            std::string digits(text.substr(0, dot));
            std::string frac(text.substr(dot + 1));
            mpz_class num(digits + frac, 10);
            mpz_class den;
            mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
            r.q_ = mpq_class(num, den);
        } else {
            r.q_ = mpq_class(mpz_class(std::string(text), 10));
        }
        r.q_.canonicalize();
        return r;
    }

    friend Rational operator+(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ + b.q_)); }
    friend Rational operator-(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ - b.q_)); }
    friend Rational operator*(const Rational& a, const Rational& b) { return Rational(mpq_class(a.q_ * b.q_)); }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.is_zero()) throw DegenerateInput("rational division by zero");
        return Rational(mpq_class(a.q_ / b.q_));
    }
    Rational operator-() const { return Rational(mpq_class(-q_)); }

    Rational& operator+=(const Rational& o) { q_ += o.q_; q_.canonicalize(); return *this; }
    Rational& operator-=(const Rational& o) { q_ -= o.q_; q_.canonicalize(); return *this; }
    Rational& operator*=(const Rational& o) { q_ *= o.q_; q_.canonicalize(); return *this; }

    bool operator==(const Rational& o) const { return q_ == o.q_; }
    std::strong_ordering operator<=>(const Rational& o) const {
        int c = cmp(q_, o.q_);
        if (c < 0) return std::strong_ordering::less;
        if (c > 0) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    bool is_zero() const { return sgn(q_) == 0; }
    int sign() const { return sgn(q_); }
    bool is_integer() const { return q_.get_den() == 1; }

    double to_double() const { return q_.get_d(); }

    std::string to_string() const {
        if (is_integer()) return q_.get_num().get_str();
        return q_.get_num().get_str() + "/" + q_.get_den().get_str();
    }

    const mpq_class& raw() const { return q_; }

private:
    mpq_class q_;
};

} // namespace curvetree
