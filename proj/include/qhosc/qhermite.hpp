#pragma once
/// @file qhermite.hpp
/// @brief Discrete q-Hermite II polynomials h_n(x;q), the normalized family
///        Psi_n, generating-function diagnostics and the q-difference check.

#include "qhosc/polynomial.hpp"
#include "qhosc/qkernel.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace qhosc {

/// h_0..h_{n_max} from x h_n = h_{n+1} + b_{n-1}^2 h_{n-1}, h_0 = 1.
template <class T>
std::vector<PolySeries<T>> hermite2_family(int n_max, const PrecisionContext<T>& ctx) {
    if (n_max < 0) throw DomainError("hermite2: n must be nonnegative");
    std::vector<PolySeries<T>> h;
    h.reserve(static_cast<std::size_t>(n_max) + 1);
    h.push_back(PolySeries<T>::constant(T(1)));
    if (n_max >= 1) h.push_back(PolySeries<T>::monomial(1));
    for (int n = 1; n < n_max; ++n) {
        PolySeries<T> next = h[n].shifted_up() - h[n - 1] * b_coeff_sq(n - 1, ctx);
        for (const auto& c : next.coeffs()) checked(c, "hermite2_coeffs");
        h.push_back(std::move(next));
    }
    return h;
}

template <class T>
PolySeries<T> hermite2_coeffs(int n, const PrecisionContext<T>& ctx) {
    return hermite2_family(n, ctx).back();
}

namespace detail {
template <class T>
Complex<T> hermite2_direct_sum(int n, const Complex<T>& x, const PrecisionContext<T>& ctx) {
    using C = Complex<T>;
    const T& q = ctx.q();
    HypergeometricSpec<T> spec;
    spec.upper = {C(ipow(q, -n)), C::i() * x};
    spec.z = C(T(-ipow(q, n)));
    spec.terminating_at = n;
    C s = phi_rs(spec, ctx);
    long long binom = static_cast<long long>(n) * (n - 1) / 2;
    return C(i_pow<T>(-n) * s * ipow(q, -binom));
}
}  // namespace detail

/// i^{-n} q^{-C(n,2)} 2phi0(q^{-n}, ix; -; q, -q^n), summed as a terminating
/// series of n+1 terms.
template <class T>
Complex<T> hermite2_eval_direct(int n, const Complex<T>& x, const PrecisionContext<T>& ctx) {
    if (n < 0) throw DomainError("hermite2: n must be nonnegative");
    if constexpr (is_exact_v<T>) {
        return detail::hermite2_direct_sum(n, x, ctx);
    } else {
        // The terminating sum cancels down from terms of size q^{-n(n-1)/2}.
        // Guard bits absorb moderate loss; when less than half the working
        // precision would survive, the sum is taken exactly on the binary
        // values of q and x.
        using std::log2;
        const double loss_bits = 0.5 * n * (n - 1) * -static_cast<double>(log2(ctx.q()));
        if (loss_bits > mantissa_bits<widened_t<T>>() - mantissa_bits<T>() / 2 && n <= 64) {
            PrecisionContext<Rational> e(exact_rational(ctx.q()));
            Complex<Rational> xe(exact_rational(x.re), exact_rational(x.im));
            return convert<T>(detail::hermite2_direct_sum(n, xe, e));
        }
        auto w = detail::widen(ctx);
        return checked(convert<T>(detail::hermite2_direct_sum(n, convert<widened_t<T>>(x), w)),
                       "hermite2_eval_direct");
    }
}

/// q^{n^2/2} / sqrt((q;q)_n), with guard bits.
template <class T>
T psi_prefactor(int n, const PrecisionContext<T>& ctx) {
    if (n < 0) throw DomainError("psi: n must be nonnegative");
    auto w = detail::widen(ctx);
    using W = widened_t<T>;
    W v = ipow(w.q(), static_cast<long long>(n) * n) / q_pochhammer(w.q(), n, w);
    return convert<T>(sqrt_value(v));
}

/// Psi_n(x) = prefactor * h_n(x), Horner on the recurrence coefficients.
template <class T>
T psi_eval(int n, const T& x, const PrecisionContext<T>& ctx) {
    return psi_prefactor(n, ctx) * hermite2_coeffs(n, ctx)(x);
}

/// Psi_0(x)..Psi_{count-1}(x) from x Psi_n = b_n Psi_{n+1} + b_{n-1} Psi_{n-1}.
template <class S, class T>
std::vector<S> psi_sequence(const S& x, int count, const PrecisionContext<T>& ctx,
                            const std::vector<T>* b = nullptr) {
    std::vector<S> psi;
    if (count <= 0) return psi;
    std::vector<T> local;
    if (!b) {
        local.reserve(static_cast<std::size_t>(count));
        for (int n = 0; n < count; ++n) local.push_back(b_coeff(n, ctx));
        b = &local;
    }
    psi.reserve(static_cast<std::size_t>(count));
    psi.push_back(S(1));
    if (count > 1) psi.push_back(S(x / (*b)[0]));
    for (int n = 1; n + 1 < count; ++n)
        psi.push_back(S((x * psi[n] - psi[n - 1] * (*b)[n - 1]) / (*b)[n]));
    return psi;
}

/// |x Psi_n - b_n Psi_{n+1} - b_{n-1} Psi_{n-1}| with Psi from psi_eval.
template <class T>
T normalized_recurrence_residual(int n, const T& x, const PrecisionContext<T>& ctx) {
    T lhs = x * psi_eval(n, x, ctx);
    T rhs = b_coeff(n, ctx) * psi_eval(n + 1, x, ctx);
    if (n > 0) rhs += b_coeff(n - 1, ctx) * psi_eval(n - 1, x, ctx);
    return abs_value(T(lhs - rhs));
}

// ---------------------------------------------------------------- generating function

/// Candidate weights w_n in sum_n w_n h_n(x) tau^n.
enum class WeightHypothesis {
    unweighted,                  ///< w_n = 1
    divided_by_qpochhammer,      ///< w_n = 1/(q;q)_n
    divided_with_qpower,         ///< w_n = q^{C(n,2)}/(q;q)_n
    divided_with_qpower_squared  ///< w_n = q^{n(n-1)}/(q;q)_n
};

inline constexpr WeightHypothesis all_weight_hypotheses[] = {
    WeightHypothesis::unweighted, WeightHypothesis::divided_by_qpochhammer,
    WeightHypothesis::divided_with_qpower, WeightHypothesis::divided_with_qpower_squared};

inline std::string to_string(WeightHypothesis h) {
    switch (h) {
        case WeightHypothesis::unweighted: return "unweighted";
        case WeightHypothesis::divided_by_qpochhammer: return "divided-by-qpochhammer";
        case WeightHypothesis::divided_with_qpower: return "divided-with-qpower";
        case WeightHypothesis::divided_with_qpower_squared: return "divided-with-qpower-squared";
    }
    return "?";
}

template <class T>
T hypothesis_weight(WeightHypothesis h, int n, const PrecisionContext<T>& ctx) {
    const T& q = ctx.q();
    switch (h) {
        case WeightHypothesis::unweighted: return T(1);
        case WeightHypothesis::divided_by_qpochhammer: return 1 / q_pochhammer(q, n, ctx);
        case WeightHypothesis::divided_with_qpower:
            return ipow(q, static_cast<long long>(n) * (n - 1) / 2) / q_pochhammer(q, n, ctx);
        case WeightHypothesis::divided_with_qpower_squared:
            return ipow(q, static_cast<long long>(n) * (n - 1)) / q_pochhammer(q, n, ctx);
    }
    return T(1);
}

/// Taylor coefficients in tau of (i tau;q)_inf 1phi1(ix; i tau; q, -i tau)
/// up to tau^order, from the Euler expansion of (i tau q^k;q)_inf. Exact in
/// rational mode.
template <class T>
std::vector<Complex<T>> genfn_closed_coefficients(const Complex<T>& x, int order, const PrecisionContext<T>& ctx) {
    using C = Complex<T>;
    const T& q = ctx.q();
    std::vector<C> outer(static_cast<std::size_t>(order) + 1);
    C ix = C::i() * x;
    for (int k = 0; k <= order; ++k) {
        C v = q_pochhammer(ix, k, ctx) * i_pow<T>(-k) * ipow(q, static_cast<long long>(k) * (k - 1) / 2) /
              q_pochhammer(q, k, ctx);
        outer[k] = (k % 2) ? C(-v) : v;
    }
    std::vector<C> c(static_cast<std::size_t>(order) + 1, C(0));
    for (int n = 0; n <= order; ++n) {
        for (int k = 0; k <= n; ++k) {
            int j = n - k;
            T inner = ipow(q, static_cast<long long>(j) * (j - 1) / 2 + static_cast<long long>(k) * j) /
                      q_pochhammer(q, j, ctx);
            if (j % 2) inner = -inner;
            c[n] += outer[k] * i_pow<T>(j) * inner;
        }
    }
    return c;
}

template <class T>
struct GenFnHypothesisResult {
    WeightHypothesis hypothesis;
    std::vector<T> abs_residual;  ///< per order
    std::vector<T> rel_residual;  ///< per order, relative to max(|closed|, |weighted|)
    T max_abs_residual;
    /// Largest order n such that orders 0..n all match within tol; -1 if order 0 fails.
    int matches_through;
};

template <class T>
struct GenFnReport {
    int order;
    T x;
    Complex<T> tau;
    T tol;
    std::vector<Complex<T>> closed_coefficients;
    std::vector<T> h_values;
    std::vector<GenFnHypothesisResult<T>> hypotheses;
    /// Closed form evaluated at tau (floating mode only; equals 1 at tau=0).
    Complex<T> closed_value;
    /// sum_{n<=order} closed_coefficients[n] tau^n.
    Complex<T> truncated_value;

    const GenFnHypothesisResult<T>& result(WeightHypothesis h) const {
        for (const auto& r : hypotheses)
            if (r.hypothesis == h) return r;
        throw DomainError("unknown hypothesis");
    }
    /// Hypotheses matching every order up to `order`.
    std::vector<WeightHypothesis> matching() const {
        std::vector<WeightHypothesis> m;
        for (const auto& r : hypotheses)
            if (r.matches_through == order) m.push_back(r.hypothesis);
        return m;
    }
};

/// Compares the closed-form Taylor coefficients against w_n h_n(x) for every
/// weight hypothesis. In exact mode residuals are exact and tau only enters
/// through truncated_value.
template <class T>
GenFnReport<T> generating_fn_report(const T& x, const Complex<T>& tau, int order, const PrecisionContext<T>& ctx,
                                    std::optional<T> tol = std::nullopt) {
    using C = Complex<T>;
    if (order < 0 || order > 20) throw DomainError("generating_fn_report: order must be in [0, 20]");
    if (!(norm(tau) < 1)) throw DomainError("generating_fn_report: need |tau| < 1");
    GenFnReport<T> rep;
    rep.order = order;
    rep.x = x;
    rep.tau = tau;
    if constexpr (is_exact_v<T>)
        rep.tol = tol.value_or(T(0));
    else
        rep.tol = tol.value_or(T(1e-20));
    rep.closed_coefficients = genfn_closed_coefficients(C(x), order, ctx);
    auto h = hermite2_family(order, ctx);
    for (int n = 0; n <= order; ++n) rep.h_values.push_back(h[n](x));

    for (auto hyp : all_weight_hypotheses) {
        GenFnHypothesisResult<T> r{hyp, {}, {}, T(0), -1};
        bool ok = true;
        for (int n = 0; n <= order; ++n) {
            C weighted(hypothesis_weight(hyp, n, ctx) * rep.h_values[n]);
            T a = magnitude(C(rep.closed_coefficients[n] - weighted));
            T s = std::max(magnitude(rep.closed_coefficients[n]), magnitude(weighted));
            T rel = s == 0 ? T(0) : T(a / s);
            r.abs_residual.push_back(a);
            r.rel_residual.push_back(rel);
            r.max_abs_residual = std::max(r.max_abs_residual, a);
            ok = ok && rel <= rep.tol;
            if (ok) r.matches_through = n;
        }
        rep.hypotheses.push_back(std::move(r));
    }

    C tn(1);
    rep.truncated_value = C(0);
    for (int n = 0; n <= order; ++n) {
        rep.truncated_value += rep.closed_coefficients[n] * tn;
        tn *= tau;
    }
    if constexpr (is_exact_v<T>) {
        rep.closed_value = rep.truncated_value;
    } else {
        C itau = C::i() * tau;
        HypergeometricSpec<T> spec;
        spec.upper = {C::i() * C(x)};
        spec.lower = {itau};
        spec.z = -itau;
        rep.closed_value = q_pochhammer_inf(itau, ctx) * phi_rs(spec, ctx);
    }
    return rep;
}

// ---------------------------------------------------------------- q-difference equation

/// RHS - LHS of
///   -(1-q^n) x^2 h_n(x) = q h_n(x-i) - (1+q+x^2) h_n(x) + (1+x^2) h_n(x+i)
/// as an exact polynomial with complex coefficients.
template <class T>
PolySeries<Complex<T>> qdiff_equation_check(int n, const PrecisionContext<T>& ctx) {
    using C = Complex<T>;
    const T& q = ctx.q();
    PolySeries<C> h = hermite2_coeffs(n, ctx).template map<C>([](const T& v) { return C(v); });
    PolySeries<C> x2 = PolySeries<C>::monomial(2);
    PolySeries<C> rhs = h.translate(C(T(0), T(-1))) * C(q);
    rhs -= (PolySeries<C>::constant(C(1 + q)) + x2) * h;
    rhs += (PolySeries<C>::constant(C(1)) + x2) * h.translate(C(T(0), T(1)));
    PolySeries<C> lhs = x2 * h * C(T(-(1 - ipow(q, n))));
    PolySeries<C> res = rhs - lhs;
    return res.trim();
}

}  // namespace qhosc
