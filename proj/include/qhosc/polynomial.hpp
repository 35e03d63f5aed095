#pragma once
/// @file polynomial.hpp
/// @brief Dense coefficient polynomials over real or complex scalars.

#include "qhosc/numeric.hpp"

#include <algorithm>
#include <vector>

namespace qhosc {

/// Coefficient sequence; coeffs[k] multiplies x^k. C may be a real scalar or
/// Complex<T>. Trailing zeros are kept unless trim() is called, so degree()
/// reports the index of the last nonzero coefficient.
template <class C>
class PolySeries {
public:
    PolySeries() = default;
    explicit PolySeries(std::vector<C> coeffs) : c_(std::move(coeffs)) {}

    static PolySeries constant(const C& c) { return PolySeries(std::vector<C>{c}); }
    static PolySeries monomial(int k, const C& c = C(1)) {
        std::vector<C> v(static_cast<std::size_t>(k) + 1, C(0));
        v[static_cast<std::size_t>(k)] = c;
        return PolySeries(std::move(v));
    }

    const std::vector<C>& coeffs() const { return c_; }
    std::size_t size() const { return c_.size(); }

    /// Coefficient of x^k (zero beyond the stored range).
    C coeff(std::size_t k) const { return k < c_.size() ? c_[k] : C(0); }
    void set_coeff(std::size_t k, const C& v) {
        if (k >= c_.size()) c_.resize(k + 1, C(0));
        c_[k] = v;
    }

    /// -1 for the zero polynomial.
    int degree() const {
        for (std::size_t k = c_.size(); k-- > 0;)
            if (c_[k] != C(0)) return static_cast<int>(k);
        return -1;
    }
    bool is_zero() const { return degree() < 0; }

    PolySeries& trim() {
        c_.resize(static_cast<std::size_t>(degree() + 1));
        return *this;
    }

    /// Horner evaluation, highest power first.
    template <class X>
    X operator()(const X& x) const {
        X acc(0);
        for (std::size_t k = c_.size(); k-- > 0;) acc = acc * x + X(c_[k]);
        return acc;
    }

    /// sum_k |c_k| |x|^k: the magnitude scale of a Horner evaluation.
    template <class T>
    T eval_scale(const T& x) const {
        const T xmag = magnitude(x);
        T acc(0);
        for (std::size_t k = c_.size(); k-- > 0;) acc = acc * xmag + magnitude(c_[k]);
        return acc;
    }

    PolySeries& operator+=(const PolySeries& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), C(0));
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        return *this;
    }
    PolySeries& operator-=(const PolySeries& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), C(0));
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        return *this;
    }
    PolySeries& operator*=(const C& s) {
        for (auto& v : c_) v *= s;
        return *this;
    }

    friend PolySeries operator+(PolySeries a, const PolySeries& b) { return a += b; }
    friend PolySeries operator-(PolySeries a, const PolySeries& b) { return a -= b; }
    friend PolySeries operator*(PolySeries a, const C& s) { return a *= s; }
    friend PolySeries operator*(const C& s, PolySeries a) { return a *= s; }
    friend PolySeries operator*(const PolySeries& a, const PolySeries& b) {
        if (a.c_.empty() || b.c_.empty()) return PolySeries();
        std::vector<C> r(a.c_.size() + b.c_.size() - 1, C(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return PolySeries(std::move(r));
    }
    friend bool operator==(const PolySeries& a, const PolySeries& b) {
        std::size_t n = std::max(a.c_.size(), b.c_.size());
        for (std::size_t k = 0; k < n; ++k)
            if (a.coeff(k) != b.coeff(k)) return false;
        return true;
    }

    /// x * p(x).
    PolySeries shifted_up() const {
        std::vector<C> r(c_.size() + 1, C(0));
        std::copy(c_.begin(), c_.end(), r.begin() + 1);
        return PolySeries(std::move(r));
    }

    /// p(x + h), exact for exact coefficients (Horner composition).
    PolySeries translate(const C& h) const {
        PolySeries acc;
        for (std::size_t k = c_.size(); k-- > 0;) {
            PolySeries next = acc.shifted_up() + acc * h;
            next += PolySeries::constant(c_[k]);
            acc = std::move(next);
        }
        return acc;
    }

    /// p(s x).
    PolySeries scale_argument(const C& s) const {
        std::vector<C> r(c_);
        C f(1);
        for (auto& v : r) {
            v *= f;
            f *= s;
        }
        return PolySeries(std::move(r));
    }

    template <class D, class F>
    PolySeries<D> map(F&& f) const {
        std::vector<D> r;
        r.reserve(c_.size());
        for (const auto& v : c_) r.push_back(f(v));
        return PolySeries<D>(std::move(r));
    }

private:
    std::vector<C> c_;
};

}  // namespace qhosc
