#pragma once
/// @file context.hpp
/// @brief Deformation parameter plus precision and truncation settings.

#include "qhosc/numeric.hpp"

#include <optional>

namespace qhosc {

/// Carries q and the truncation policy. Every evaluation takes one of these;
/// the working precision is the mantissa size of the scalar type T.
template <class T>
class PrecisionContext {
public:
    explicit PrecisionContext(const T& q, std::optional<T> series_tol = std::nullopt, int max_terms = 4096)
        : q_(q), max_terms_(max_terms) {
        if (!(q_ > 0 && q_ < 1)) throw DomainError("q must satisfy 0 < q < 1, got " + short_decimal(q_));
        if (max_terms_ < 16) throw DomainError("max_terms must be at least 16");
        if (series_tol) {
            if (!(*series_tol > 0)) throw DomainError("series_tol must be positive");
            tol_ = *series_tol;
        } else {
            tol_ = default_tolerance();
        }
    }

    const T& q() const { return q_; }
    const T& series_tol() const { return tol_; }
    int max_terms() const { return max_terms_; }

    /// Mantissa bits of T; exact mode reports INT_MAX.
    int precision_bits() const {
        if constexpr (is_exact_v<T>)
            return std::numeric_limits<int>::max();
        else
            return mantissa_bits<T>();
    }
    static constexpr bool exact() { return is_exact_v<T>; }

    /// About ten bits above the rounding level; 1e-30 in exact mode, where
    /// it only governs the few places that still truncate.
    static T default_tolerance() {
        if constexpr (is_exact_v<T>)
            return T(1) / T(bmp::pow(Integer(10), 30));
        else
            return ldexp_value(T(1), -(mantissa_bits<T>() - 10));
    }

private:
    static T ldexp_value(const T& x, int e) {
        using std::ldexp;
        using boost::multiprecision::ldexp;
        return ldexp(x, e);
    }

    T q_;
    T tol_;
    int max_terms_;
};

template <class T>
PrecisionContext<T> make_context(const std::string& q, std::optional<T> tol = std::nullopt) {
    return PrecisionContext<T>(parse_number<T>(q), tol);
}

}  // namespace qhosc
