#pragma once
/// @file qkernel.hpp
/// @brief q-numbers, q-Pochhammer symbols, the coefficients b_n, the
///        generalized factorial, basic hypergeometric series, the
///        generalized exponential and the orthogonality weight W.

#include "qhosc/context.hpp"
#include "qhosc/numeric.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qhosc {

namespace detail {

/// Sums t_0 + t_1 + ... where t_{k+1} = t_k * ratio(k).
///
/// Stops once three consecutive terms are below tol*|S| and the geometric
/// tail bound |t_k| rho/(1-rho), with rho = |ratio(k+1)|, is below tol*|S|.
/// The bound is valid for ratios that are eventually non-increasing in
/// modulus, which holds for every series in this library.
template <class S, class T, class Ratio>
S sum_ratio_series(S term, Ratio&& ratio, const PrecisionContext<T>& ctx, const char* what,
                   int* terms_used = nullptr) {
    S sum = term;
    const T& tol = ctx.series_tol();
    int window = 0;
    int k = 0;
    for (;; ++k) {
        if (k >= ctx.max_terms())
            throw NoConvergenceError(std::string(what) + ": no convergence within " +
                                     std::to_string(ctx.max_terms()) + " terms");
        S next = term * ratio(k);
        if (next == S(0)) break;
        sum += next;
        checked(sum, what);
        T mag = magnitude(next);
        T smag = magnitude(sum);
        window = (mag <= tol * smag) ? window + 1 : 0;
        term = next;
        if (window >= 3) {
            T rho = magnitude(ratio(k + 1));
            if (rho < 1 && mag * rho <= tol * smag * (1 - rho)) {
                ++k;
                break;
            }
        }
    }
    if (terms_used) *terms_used = k + 1;
    return sum;
}

}  // namespace detail

// ---------------------------------------------------------------- q-arithmetic

/// [n]_q = (1 - q^n)/(1 - q).
template <class T>
T q_number(int n, const PrecisionContext<T>& ctx) {
    if (n < 0) throw DomainError("q_number: n must be nonnegative");
    const T& q = ctx.q();
    return (1 - ipow(q, n)) / (1 - q);
}

/// (a;q)_k = prod_{s<k} (1 - a q^s); S is T or Complex<T>.
template <class S, class T>
S q_pochhammer(const S& a, int k, const PrecisionContext<T>& ctx) {
    if (k < 0) throw DomainError("q_pochhammer: k must be nonnegative");
    S p(1);
    T qs(1);
    for (int s = 0; s < k; ++s) {
        p *= S(1) - a * qs;
        qs *= ctx.q();
    }
    return checked(p, "q_pochhammer");
}

template <class S, class T>
struct InfiniteProduct {
    S value;
    /// Bound on |log(exact/value)| from the discarded factors.
    T log_error_bound;
    int factors;
};

/// (a;q)_inf truncated at the first S with |a| q^S < series_tol and a
/// log-sum tail bound |a|q^S / ((1-q)(1-|a|q^S)) below series_tol.
template <class S, class T>
InfiniteProduct<S, T> q_pochhammer_inf_report(const S& a, const PrecisionContext<T>& ctx) {
    static_assert(!is_exact_v<T>, "infinite products need a floating context");
    const T& q = ctx.q();
    const T& tol = ctx.series_tol();
    T amag = magnitude(a);
    S p(1);
    T qs(1);
    int s = 0;
    for (;; ++s) {
        T dev = amag * qs;
        if (dev < tol) {
            T bound = dev / ((1 - q) * (1 - dev));
            if (bound <= tol) return {p, bound, s};
        }
        if (s >= ctx.max_terms())
            throw NoConvergenceError("q_pochhammer_inf: tail bound not reached within max_terms");
        p *= S(1) - a * qs;
        checked(p, "q_pochhammer_inf");
        qs *= q;
    }
}

template <class S, class T>
S q_pochhammer_inf(const S& a, const PrecisionContext<T>& ctx) {
    return q_pochhammer_inf_report(a, ctx).value;
}

/// b_n^2 = q^{-(2n+1)} (1 - q^{n+1}); b_{-1}^2 = 0. Exact in rational mode.
template <class T>
T b_coeff_sq(int n, const PrecisionContext<T>& ctx) {
    if (n < -1) throw DomainError("b_coeff: n must be >= -1");
    if (n == -1) return T(0);
    const T& q = ctx.q();
    return checked(T((1 - ipow(q, n + 1)) / ipow(q, 2LL * n + 1)), "b_coeff");
}

namespace detail {
template <class T>
PrecisionContext<widened_t<T>> widen(const PrecisionContext<T>& ctx) {
    using W = widened_t<T>;
    return PrecisionContext<W>(convert<W>(ctx.q()), std::nullopt, ctx.max_terms());
}
}  // namespace detail

/// b_n, evaluated with guard bits and rounded once.
template <class T>
T b_coeff(int n, const PrecisionContext<T>& ctx) {
    static_assert(!is_exact_v<T>, "b_n is irrational in general; use b_coeff_sq in exact mode");
    auto w = detail::widen(ctx);
    return checked(convert<T>(sqrt_value(b_coeff_sq(n, w))), "b_coeff");
}

namespace detail {
template <class T>
T rho_factorial_closed(int n, const PrecisionContext<T>& ctx) {
    const T& q = ctx.q();
    T kappa = q / (1 - q);
    return ipow(kappa, n) * q_pochhammer(q, n, ctx) / ipow(q, static_cast<long long>(n) * n);
}
template <class T>
T rho_factorial_running(int n, const PrecisionContext<T>& ctx) {
    const T& q = ctx.q();
    T kappa = q / (1 - q);
    T p(1);
    for (int k = 1; k <= n; ++k) p *= kappa * b_coeff_sq(k - 1, ctx);
    return p;
}
}  // namespace detail

/// rho_n! = (q/(1-q))^n q^{-n^2} (q;q)_n (closed form, guard bits).
template <class T>
T rho_factorial(int n, const PrecisionContext<T>& ctx) {
    if (n < 0) throw DomainError("rho_factorial: n must be nonnegative");
    auto w = detail::widen(ctx);
    return checked(convert<T>(detail::rho_factorial_closed(n, w)), "rho_factorial");
}

/// prod_{k=1}^n (q/(1-q)) b_{k-1}^2 (second computation path, guard bits).
template <class T>
T rho_factorial_product(int n, const PrecisionContext<T>& ctx) {
    if (n < 0) throw DomainError("rho_factorial: n must be nonnegative");
    auto w = detail::widen(ctx);
    return checked(convert<T>(detail::rho_factorial_running(n, w)), "rho_factorial");
}

// ---------------------------------------------------------------- r phi s

template <class T>
struct HypergeometricSpec {
    std::vector<Complex<T>> upper;
    std::vector<Complex<T>> lower;
    Complex<T> z;
    /// Number of the last nonzero term when an upper parameter is q^{-n}.
    std::optional<int> terminating_at;
};

/// Basic hypergeometric series r phi s(upper; lower; q, z).
///
/// Terminating input is summed exactly over terminating_at+1 terms (exact
/// in rational mode). Non-terminating input needs a floating context and
/// 1+s-r >= 0; the d = 0 case additionally needs |z| < 1.
template <class T>
Complex<T> phi_rs(const HypergeometricSpec<T>& spec, const PrecisionContext<T>& ctx) {
    using C = Complex<T>;
    const T& q = ctx.q();
    const int r = static_cast<int>(spec.upper.size());
    const int s = static_cast<int>(spec.lower.size());
    const int d = 1 + s - r;
    if (spec.z == C(0)) return C(1);

    auto ratio = [&](int k) {
        T qk = ipow(q, k);
        C num = spec.z * ipow(qk, d);
        if (d % 2 != 0) num = -num;
        for (const auto& a : spec.upper) num *= C(1) - a * qk;
        C den(1 - qk * q);
        for (const auto& b : spec.lower) {
            C f = C(1) - b * qk;
            if (f == C(0))
                throw DomainError("phi_rs: lower parameter produces a zero denominator at k=" +
                                  std::to_string(k + 1));
            den *= f;
        }
        return num / den;
    };

    if (spec.terminating_at) {
        int n = *spec.terminating_at;
        if (n < 0) throw DomainError("phi_rs: terminating_at must be nonnegative");
        C term(1), sum(1);
        for (int k = 0; k < n; ++k) {
            term *= ratio(k);
            sum += term;
        }
        return checked(sum, "phi_rs");
    }
    if constexpr (is_exact_v<T>) {
        throw DomainError("phi_rs: non-terminating series need a floating context");
    } else {
        if (d < 0)
            throw FormalSeriesError("phi_rs: 1+s-r < 0 and no termination; the series is formal");
        if (d == 0 && !(abs(spec.z) < 1))
            throw FormalSeriesError("phi_rs: 1+s-r = 0 requires |z| < 1");
        return detail::sum_ratio_series(C(1), ratio, ctx, "phi_rs");
    }
}

// ---------------------------------------------------------------- gex, W

/// gex(x) = sum_n q^{n^2} x^n / (q;q)_n; S is T or Complex<T>.
template <class S, class T>
S gen_exponential(const S& x, const PrecisionContext<T>& ctx) {
    static_assert(!is_exact_v<T>, "gen_exponential needs a floating context");
    const T& q = ctx.q();
    auto ratio = [&](int n) {
        T qn = ipow(q, n);
        return S(x * (qn * qn * q / (1 - qn * q)));
    };
    return detail::sum_ratio_series(S(1), ratio, ctx, "gen_exponential");
}

/// W(x) = 1 / prod_{s>=0} (1 + x^2 q^{2s}), real-product form.
template <class T>
T weight_W(const T& x, const PrecisionContext<T>& ctx) {
    static_assert(!is_exact_v<T>, "weight_W needs a floating context");
    const T& q = ctx.q();
    T q2 = q * q;
    T x2 = x * x;
    T p(1);
    T f = x2;
    for (int s = 0;; ++s) {
        if (f / (1 - q2) <= ctx.series_tol()) break;
        if (s >= ctx.max_terms()) throw NoConvergenceError("weight_W: product did not settle");
        p *= 1 + f;
        f *= q2;
    }
    return 1 / checked(p, "weight_W");
}

}  // namespace qhosc
