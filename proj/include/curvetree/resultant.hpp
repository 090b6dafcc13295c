#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "curvetree/errors.hpp"
#include "curvetree/polynomial.hpp"

namespace curvetree {

// Univariate polynomial in an auxiliary variable t whose coefficients are
// bivariate polynomials in (x, y). Index k holds the coefficient of t^k.
// Invariant: the leading coefficient is a nonzero polynomial.
class UniPolyOverPoly {
public:
    UniPolyOverPoly() = default;
    explicit UniPolyOverPoly(std::vector<Polynomial> coeffs) : coeffs_(std::move(coeffs)) {
        while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
    }

    // Builds p(x,y) - t^1*c1 - ... from a dense list of t-coefficients.
    static UniPolyOverPoly from_coefficients(std::vector<Polynomial> coeffs) {
        return UniPolyOverPoly(std::move(coeffs));
    }

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }

    const Polynomial& coeff(int k) const {
        static const Polynomial zero;
        if (k < 0 || k > degree()) return zero;
        return coeffs_[static_cast<std::size_t>(k)];
    }

private:
    std::vector<Polynomial> coeffs_;
};

namespace resultant_detail {

// Determinant by Laplace expansion along rows, memoized on the set of
// still-available columns. Exact over the rational polynomial ring and
// efficient on the sparse, banded Sylvester matrices this module produces.
class DetWorker {
public:
    explicit DetWorker(const std::vector<std::vector<Polynomial>>& m) : m_(m), n_(m.size()) {}

    Polynomial run() { return expand(0, (n_ >= 64 ? ~0ull : ((1ull << n_) - 1ull))); }

private:
    const std::vector<std::vector<Polynomial>>& m_;
    std::size_t n_;
    std::unordered_map<std::uint64_t, Polynomial> memo_;

    Polynomial expand(std::size_t row, std::uint64_t cols) {
        if (row == n_) return Polynomial::constant(Rational(1));
        auto it = memo_.find(cols);
        if (it != memo_.end()) return it->second;
        Polynomial acc;
        int parity = 0;
        for (std::size_t c = 0; c < n_; ++c) {
            if (!(cols & (1ull << c))) continue;
            const Polynomial& entry = m_[row][c];
            if (!entry.is_zero()) {
                Polynomial sub = expand(row + 1, cols & ~(1ull << c));
                Polynomial contrib = entry * sub;
                acc = (parity % 2 == 0) ? acc + contrib : acc - contrib;
            }
            ++parity;
        }
        memo_.emplace(cols, acc);
        return acc;
    }
};

} // namespace resultant_detail

// Resultant of g and h with respect to t: the determinant of their Sylvester
// matrix, an exact polynomial in (x, y). Eliminates t from a pair such as
// (x - p(t), y - q(t)), yielding the implicit equation of the parametrised
// curve.
inline Polynomial sylvester_resultant(const UniPolyOverPoly& g, const UniPolyOverPoly& h) {
    int m = g.degree();
    int n = h.degree();
    if (m < 1 || n < 1)
        throw DegenerateInput("sylvester_resultant requires both degrees in t to be >= 1");
    std::size_t size = static_cast<std::size_t>(m + n);
    if (size > 63) throw DegenerateInput("sylvester matrix too large");

    std::vector<std::vector<Polynomial>> s(size, std::vector<Polynomial>(size));
    // n rows of g's coefficients, highest power first, then m rows of h's.
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k)
            s[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + k)] = g.coeff(m - k);
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k)
            s[static_cast<std::size_t>(n + r)][static_cast<std::size_t>(r + k)] = h.coeff(n - k);

    return resultant_detail::DetWorker(s).run();
}

} // namespace curvetree
