#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "curvetree/dd.hpp"
#include "curvetree/errors.hpp"
#include "curvetree/rational.hpp"

namespace curvetree {

enum class Var { x, y };

// Exponent pair of a monomial x^i * y^j.
struct Monomial {
    int i = 0;
    int j = 0;
    auto operator<=>(const Monomial&) const = default;
};

// Sparse bivariate polynomial in (x, y) with exact rational coefficients.
// Invariants: no stored zero coefficients, exponent pairs unique, exponents
// capped at kMaxExponent per variable.
class Polynomial {
public:
    static constexpr int kMaxExponent = 64;

    using TermMap = std::map<Monomial, Rational>;

    Polynomial() = default;

    static Polynomial constant(Rational c) {
        Polynomial p;
        p.add_term(0, 0, c);
        return p;
    }
    static Polynomial variable(Var v) {
        Polynomial p;
        p.add_term(v == Var::x ? 1 : 0, v == Var::x ? 0 : 1, Rational(1));
        return p;
    }
    static Polynomial monomial(int i, int j, Rational c) {
        Polynomial p;
        p.add_term(i, j, c);
        return p;
    }

    void add_term(int i, int j, const Rational& c) {
        if (c.is_zero()) return;
        if (i < 0 || j < 0) throw DegenerateInput("negative exponent");
        if (i > kMaxExponent || j > kMaxExponent)
            throw ExponentOverflow("exponent exceeds cap " + std::to_string(kMaxExponent));
        Monomial m{i, j};
        auto it = terms_.find(m);
        if (it == terms_.end()) {
            terms_.emplace(m, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Degree of the zero polynomial is defined as -1.
    int degree() const {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, m.i + m.j);
        return d;
    }
    int degree_in(Var v) const {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, v == Var::x ? m.i : m.j);
        return d;
    }

    Rational coeff(int i, int j) const {
        auto it = terms_.find(Monomial{i, j});
        return it == terms_.end() ? Rational(0) : it->second;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        Polynomial r = a;
        for (const auto& [m, c] : b.terms_) r.add_term(m.i, m.j, c);
        return r;
    }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
        Polynomial r = a;
        for (const auto& [m, c] : b.terms_) r.add_term(m.i, m.j, -c);
        return r;
    }
    Polynomial operator-() const {
        Polynomial r;
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
        return r;
    }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial r;
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_)
                r.add_term(ma.i + mb.i, ma.j + mb.j, ca * cb);
        return r;
    }

    Polynomial pow(unsigned e) const {
        Polynomial result = constant(Rational(1));
        Polynomial base = *this;
        while (e > 0) {
            if (e & 1u) result = result * base;
            e >>= 1u;
            if (e > 0) base = base * base;
        }
        return result;
    }

    Polynomial derivative(Var v) const {
        Polynomial r;
        for (const auto& [m, c] : terms_) {
            if (v == Var::x) {
                if (m.i > 0) r.add_term(m.i - 1, m.j, c * Rational(m.i));
            } else {
                if (m.j > 0) r.add_term(m.i, m.j - 1, c * Rational(m.j));
            }
        }
        return r;
    }

    // Compensated (Kahan-Babuska) evaluation. Deterministic: terms are summed
    // in the canonical map order. May return +-inf on overflow.
    double evaluate(double x, double y) const {
        double sum = 0.0, comp = 0.0;
        for (const auto& [m, c] : terms_) {
            double t = c.to_double() * pow_int(x, m.i) * pow_int(y, m.j);
            double tmp = sum + t;
            if (std::fabs(sum) >= std::fabs(t))
                comp += (sum - tmp) + t;
            else
                comp += (t - tmp) + sum;
            sum = tmp;
        }
        return sum + comp;
    }

    // Evaluation plus the sum of term magnitudes, which bounds the roundoff
    // noise floor of the double result (noise ~ abs_sum * 2^-50).
    std::pair<double, double> evaluate_with_scale(double x, double y) const {
        double sum = 0.0, comp = 0.0, abs_sum = 0.0;
        for (const auto& [m, c] : terms_) {
            double t = c.to_double() * pow_int(x, m.i) * pow_int(y, m.j);
            abs_sum += std::fabs(t);
            double tmp = sum + t;
            if (std::fabs(sum) >= std::fabs(t))
                comp += (sum - tmp) + t;
            else
                comp += (t - tmp) + sum;
            sum = tmp;
        }
        return {sum + comp, abs_sum};
    }

    dd evaluate_dd(double x, double y) const {
        dd sum(0.0);
        dd dx(x), dy(y);
        for (const auto& [m, c] : terms_) {
            double chi = c.to_double();
            dd t = dd(chi) * dd_pow(dx, m.i) * dd_pow(dy, m.j);
            // Coefficients that are not exactly representable get a correction.
            if (std::isfinite(chi)) {
                Rational rest = c - Rational::from_double(chi);
                if (!rest.is_zero()) t = t + dd(rest.to_double()) * dd_pow(dx, m.i) * dd_pow(dy, m.j);
            }
            sum = sum + t;
        }
        return sum;
    }

    Rational evaluate_exact(const Rational& x, const Rational& y) const {
        Rational sum(0);
        for (const auto& [m, c] : terms_) {
            Rational t = c;
            for (int k = 0; k < m.i; ++k) t *= x;
            for (int k = 0; k < m.j; ++k) t *= y;
            sum += t;
        }
        return sum;
    }

    // True when every term contains a positive power of x.
    bool divisible_by_x() const {
        if (terms_.empty()) return true;
        for (const auto& [m, c] : terms_)
            if (m.i == 0) return false;
        return true;
    }

    // f(x, -y) == f(x, y), i.e. all odd powers of y absent.
    bool symmetric_in_y() const {
        for (const auto& [m, c] : terms_)
            if (m.j % 2 != 0) return false;
        return true;
    }

    bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        // Graded order, highest total degree first.
        std::vector<std::pair<Monomial, Rational>> ts(terms_.begin(), terms_.end());
        std::sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) {
            int da = a.first.i + a.first.j, db = b.first.i + b.first.j;
            if (da != db) return da > db;
            if (a.first.i != b.first.i) return a.first.i > b.first.i;
            return a.first.j > b.first.j;
        });
        std::string out;
        bool first = true;
        for (const auto& [m, c] : ts) {
            Rational a = c;
            if (first) {
                if (a.sign() < 0) { out += "-"; a = -a; }
            } else {
                out += a.sign() < 0 ? " - " : " + ";
                if (a.sign() < 0) a = -a;
            }
            bool unit = (a == Rational(1));
            bool has_vars = (m.i > 0 || m.j > 0);
            if (!unit || !has_vars) out += a.to_string();
            if (m.i > 0) {
                if (!unit) out += "*";
                out += "x";
                if (m.i > 1) out += "^" + std::to_string(m.i);
            }
            if (m.j > 0) {
                if (!unit || m.i > 0) out += "*";
                out += "y";
                if (m.j > 1) out += "^" + std::to_string(m.j);
            }
            first = false;
        }
        return out;
    }

private:
    static double pow_int(double b, int e) {
        double r = 1.0;
        while (e > 0) {
            if (e & 1) r *= b;
            b *= b;
            e >>= 1;
        }
        return r;
    }

    TermMap terms_;
};

inline Polynomial partial_derivative(const Polynomial& p, Var v) { return p.derivative(v); }

inline double evaluate(const Polynomial& p, double x, double y) { return p.evaluate(x, y); }

// --- Expression parser -------------------------------------------------
//
// expr   := ['+'|'-'] term (('+'|'-') term)*
// term   := factor ('*'? factor)*
// factor := base ('^' uint)?
// base   := 'x' | 'y' | number | '(' expr ')'
// number := uint ('/' uint)? | decimal
//
// Whitespace is insignificant; juxtaposition multiplies. The optional sign
// before the first term lets printed polynomials with a negative leading
// coefficient round-trip.

namespace parse_detail {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Polynomial run() {
        Polynomial p = expr();
        skip_ws();
        if (pos_ != text_.size()) throw ParseError(pos_, "unexpected trailing input");
        return p;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    Polynomial expr() {
        skip_ws();
        bool negate = false;
        if (peek() == '+' || peek() == '-') {
            negate = (text_[pos_] == '-');
            ++pos_;
        }
        Polynomial acc = term();
        if (negate) acc = -acc;
        while (true) {
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos_;
                Polynomial t = term();
                acc = (c == '+') ? acc + t : acc - t;
            } else {
                break;
            }
        }
        return acc;
    }

    Polynomial term() {
        Polynomial acc = factor();
        while (true) {
            char c = peek();
            if (c == '*') {
                ++pos_;
                acc = acc * factor();
            } else if (c == 'x' || c == 'y' || c == '(' ||
                       std::isdigit(static_cast<unsigned char>(c))) {
                acc = acc * factor();
            } else if (std::isalpha(static_cast<unsigned char>(c))) {
                throw UnknownIdentifier(std::string("unknown identifier '") + c +
                                        "' (at offset " + std::to_string(pos_) + ")");
            } else {
                break;
            }
        }
        return acc;
    }

    Polynomial factor() {
        Polynomial b = base();
        if (peek() == '^') {
            std::size_t caret = pos_;
            ++pos_;
            unsigned e = parse_uint();
            if (e > static_cast<unsigned>(Polynomial::kMaxExponent))
                throw ExponentOverflow("exponent " + std::to_string(e) + " exceeds cap " +
                                       std::to_string(Polynomial::kMaxExponent) +
                                       " (at offset " + std::to_string(caret) + ")");
            b = b.pow(e);
        }
        return b;
    }

    Polynomial base() {
        char c = peek();
        if (c == 'x') { ++pos_; return Polynomial::variable(Var::x); }
        if (c == 'y') { ++pos_; return Polynomial::variable(Var::y); }
        if (c == '(') {
            ++pos_;
            Polynomial inner = expr();
            if (peek() != ')') throw ParseError(pos_, "expected ')'");
            ++pos_;
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return Polynomial::constant(number());
        if (std::isalpha(static_cast<unsigned char>(c)))
            throw UnknownIdentifier(std::string("unknown identifier '") + c +
                                    "' (at offset " + std::to_string(pos_) + ")");
        throw ParseError(pos_, "expected 'x', 'y', a number or '('");
    }

    unsigned parse_uint() {
        skip_ws();
        std::size_t start = pos_;
        unsigned long v = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            v = v * 10 + static_cast<unsigned long>(text_[pos_] - '0');
            if (v > 1000000) throw ExponentOverflow("exponent too large (at offset " + std::to_string(start) + ")");
            ++pos_;
        }
        if (pos_ == start) throw ParseError(pos_, "expected an unsigned integer");
        return static_cast<unsigned>(v);
    }

    std::string digit_run() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) throw ParseError(pos_, "expected digits");
        return std::string(text_.substr(start, pos_ - start));
    }

    Rational number() {
        std::string head = digit_run();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            std::string frac = digit_run();
            return Rational::from_literal(head + "." + frac);
        }
        if (peek() == '/') {
            std::size_t slash = pos_;
            ++pos_;
            std::string den = digit_run();
            if (den.find_first_not_of('0') == std::string::npos)
                throw ParseError(slash, "zero denominator");
            return Rational::from_literal(head + "/" + den);
        }
        return Rational::from_literal(head);
    }
};

} // namespace parse_detail

inline Polynomial parse_polynomial(std::string_view text) {
    return parse_detail::Parser(text).run();
}

// --- Hessian ------------------------------------------------------------

enum class Definiteness {
    positive_definite,
    positive_semidefinite,
    indefinite,
    negative_semidefinite,
    negative_definite,
};

// Symmetric 2x2 matrix of second partials evaluated at a point.
struct SymMatrix2 {
    double a11 = 0, a12 = 0, a22 = 0;

    double det() const { return a11 * a22 - a12 * a12; }

    // Sylvester criterion on leading principal minors.
    Definiteness classify() const {
        double d = det();
        if (a11 > 0 && d > 0) return Definiteness::positive_definite;
        if (a11 < 0 && d > 0) return Definiteness::negative_definite;
        if (d < 0) return Definiteness::indefinite;
        double tr = a11 + a22;
        if (tr > 0) return Definiteness::positive_semidefinite;
        if (tr < 0) return Definiteness::negative_semidefinite;
        return Definiteness::positive_semidefinite; // zero matrix
    }
};

inline SymMatrix2 hessian_at(const Polynomial& p, double x, double y) {
    Polynomial px = p.derivative(Var::x);
    Polynomial py = p.derivative(Var::y);
    return SymMatrix2{
        px.derivative(Var::x).evaluate(x, y),
        px.derivative(Var::y).evaluate(x, y),
        py.derivative(Var::y).evaluate(x, y),
    };
}

// Exact classification of the Hessian at a rational point (typically the
// origin, where sign decisions must not depend on floating-point noise).
inline Definiteness hessian_definiteness_exact(const Polynomial& p, const Rational& x,
                                               const Rational& y) {
    Polynomial px = p.derivative(Var::x);
    Polynomial py = p.derivative(Var::y);
    Rational a11 = px.derivative(Var::x).evaluate_exact(x, y);
    Rational a12 = px.derivative(Var::y).evaluate_exact(x, y);
    Rational a22 = py.derivative(Var::y).evaluate_exact(x, y);
    Rational d = a11 * a22 - a12 * a12;
    int sd = d.sign(), s11 = a11.sign();
    if (s11 > 0 && sd > 0) return Definiteness::positive_definite;
    if (s11 < 0 && sd > 0) return Definiteness::negative_definite;
    if (sd < 0) return Definiteness::indefinite;
    int str = (a11 + a22).sign();
    if (str > 0) return Definiteness::positive_semidefinite;
    if (str < 0) return Definiteness::negative_semidefinite;
    return Definiteness::positive_semidefinite;
}

} // namespace curvetree
