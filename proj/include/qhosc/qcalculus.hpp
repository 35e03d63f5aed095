#pragma once
/// @file qcalculus.hpp
/// @brief q-derivative, deformed derivative, Jackson integrals, the two-sided
///        hat q-integral and integration-by-parts validators.
///
/// Lattice functions are addressed by exponent: index m stands for the point
/// x0 q^m (default base x0 = 1), so q^{-1}x and q^{-2}x are m-1 and m-2.

#include "qhosc/polynomial.hpp"
#include "qhosc/qkernel.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

namespace qhosc {

// ---------------------------------------------------------------- derivatives

/// (F(x) - F(qx)) / (x(1-q)).
template <class T, class F>
T q_derivative(F&& f, const T& x, const PrecisionContext<T>& ctx) {
    if (x == 0) throw DomainError("q_derivative: x must be nonzero");
    const T& q = ctx.q();
    return (f(x) - f(T(q * x))) / (x * (1 - q));
}

/// (f(q^{-2}x) - f(q^{-1}x)) / (q^{-1}x).
template <class T, class F>
T deformed_derivative(F&& f, const T& x, const PrecisionContext<T>& ctx) {
    if (x == 0) throw DomainError("deformed_derivative: x must be nonzero");
    const T& q = ctx.q();
    T x1 = x / q;
    T x2 = x1 / q;
    return (f(x2) - f(x1)) / x1;
}

/// Exact q-derivative of a polynomial: x^n -> [n]_q x^{n-1}.
template <class T>
PolySeries<T> q_derivative(const PolySeries<T>& p, const PrecisionContext<T>& ctx) {
    std::vector<T> r(p.size() > 1 ? p.size() - 1 : 1, T(0));
    for (std::size_t n = 1; n < p.size(); ++n) r[n - 1] = p.coeff(n) * q_number(static_cast<int>(n), ctx);
    return PolySeries<T>(std::move(r));
}

/// Exact deformed derivative of a polynomial: x^n -> b_{n-1}^2 x^{n-1}.
template <class T>
PolySeries<T> deformed_derivative(const PolySeries<T>& p, const PrecisionContext<T>& ctx) {
    std::vector<T> r(p.size() > 1 ? p.size() - 1 : 1, T(0));
    for (std::size_t n = 1; n < p.size(); ++n) r[n - 1] = p.coeff(n) * b_coeff_sq(static_cast<int>(n) - 1, ctx);
    return PolySeries<T>(std::move(r));
}

/// Residual of the deformed product rule
///   variant 1: D(uv) = v(q^{-2}x) Du + u(q^{-1}x) Dv
///   variant 2: D(uv) = v(q^{-1}x) Du + u(q^{-2}x) Dv
/// as an exact polynomial (zero when the rule holds).
template <class T>
PolySeries<T> leibniz_residual(const PolySeries<T>& u, const PolySeries<T>& v, int variant,
                               const PrecisionContext<T>& ctx) {
    if (variant != 1 && variant != 2) throw DomainError("leibniz_residual: variant must be 1 or 2");
    const T& q = ctx.q();
    T s1 = 1 / q, s2 = 1 / (q * q);
    PolySeries<T> du = deformed_derivative(u, ctx), dv = deformed_derivative(v, ctx);
    PolySeries<T> lhs = deformed_derivative(PolySeries<T>(u * v), ctx);
    PolySeries<T> rhs = variant == 1 ? v.scale_argument(s2) * du + u.scale_argument(s1) * dv
                                     : v.scale_argument(s1) * du + u.scale_argument(s2) * dv;
    PolySeries<T> r = lhs - rhs;
    return r.trim();
}

// ---------------------------------------------------------------- lattice sums

/// Result of a truncated lattice sum.
template <class T>
struct LatticeSum {
    T value;
    /// Geometric estimate of the discarded terms on both branches.
    T tail_bound;
    T largest_upward;
    T largest_downward;
    int terms_upward;
    int terms_downward;
};

namespace detail {

template <class T>
struct BranchSum {
    T sum;
    T tail;
    T largest;
    int count;
};

/// Adds term(0), term(1), ... until three consecutive terms fall below
/// tol * max(|S|, largest term) and the ratio of the last two terms gives a
/// geometric tail below the same threshold.
template <class T, class Term>
BranchSum<T> walk_branch(Term&& term, const PrecisionContext<T>& ctx, const char* what) {
    BranchSum<T> b{T(0), T(0), T(0), 0};
    const T& tol = ctx.series_tol();
    T prev(0);
    int window = 0;
    for (int k = 0;; ++k) {
        if (k >= ctx.max_terms())
            throw NoConvergenceError(std::string(what) + ": lattice terms did not decay within max_terms");
        T t = term(k);
        checked(t, what);
        b.sum += t;
        T mag = abs_value(t);
        b.largest = std::max(b.largest, mag);
        b.count = k + 1;
        T thr = tol * std::max(abs_value(b.sum), b.largest);
        window = mag <= thr ? window + 1 : 0;
        if (window >= 3) {
            T rho = prev == 0 ? T(0) : T(mag / prev);
            if (rho < 1) {
                T tail = rho == 0 ? T(0) : T(mag * rho / (1 - rho));
                if (tail <= thr) {
                    b.tail = tail;
                    return b;
                }
            }
        }
        prev = mag;
    }
}

/// Tail estimate for a branch cut at a fixed depth.
template <class T>
T fixed_branch_tail(const T& last, const T& before_last) {
    T a = abs_value(last), b = abs_value(before_last);
    if (a == 0) return T(0);
    if (b == 0 || !(a < b)) return std::numeric_limits<T>::infinity();
    T rho = a / b;
    return a * rho / (1 - rho);
}

}  // namespace detail

enum class JacksonKind { zero_to_x, zero_to_inf, minus_inf_to_inf };

/// Jackson integrals on the lattice {q^n x}:
///   zero_to_x:        x(1-q) sum_{n>=0} q^n f(q^n x)
///   zero_to_inf:      x(1-q) sum_{n in Z} q^n f(q^n x)
///   minus_inf_to_inf: x(1-q) sum_{n in Z} q^n [f(q^n x) + f(-q^n x)]
template <class T, class F>
LatticeSum<T> jackson_integral(F&& f, JacksonKind kind, const T& x, const PrecisionContext<T>& ctx) {
    static_assert(!is_exact_v<T>, "callable Jackson integrals need a floating context; use the polynomial overload");
    if (!(x > 0)) throw DomainError("jackson_integral: x must be positive");
    const T& q = ctx.q();
    const bool both_signs = kind == JacksonKind::minus_inf_to_inf;
    auto g = [&](const T& t) { return both_signs ? T(f(t) + f(T(-t))) : T(f(t)); };
    T pref = x * (1 - q);
    T qn(1);
    auto down = detail::walk_branch<T>(
        [&](int) {
            T t = qn * g(T(qn * x));
            qn *= q;
            return t;
        },
        ctx, "jackson_integral");
    LatticeSum<T> r{pref * down.sum, pref * down.tail, T(0), pref * down.largest, 0, down.count};
    if (kind != JacksonKind::zero_to_x) {
        T qm = 1 / q;
        auto up = detail::walk_branch<T>(
            [&](int) {
                T t = qm * g(T(qm * x));
                qm /= q;
                return t;
            },
            ctx, "jackson_integral");
        r.value += pref * up.sum;
        r.tail_bound += pref * up.tail;
        r.largest_upward = pref * up.largest;
        r.terms_upward = up.count;
    }
    return r;
}

/// Exact zero_to_x Jackson integral of a polynomial:
/// x^k -> x^{k+1} (1-q)/(1-q^{k+1}).
template <class T>
T jackson_integral(const PolySeries<T>& p, const T& x, const PrecisionContext<T>& ctx) {
    const T& q = ctx.q();
    T s(0);
    T xp = x;
    for (std::size_t k = 0; k < p.size(); ++k) {
        s += p.coeff(k) * xp * (1 - q) / (1 - ipow(q, static_cast<long long>(k) + 1));
        xp *= x;
    }
    return s;
}

// ---------------------------------------------------------------- lattice functions

/// Samples f(x0 q^m) for m in [m_min, m_max].
template <class T>
struct LatticeFunction {
    T base{1};
    int m_min = 0;
    int m_max = -1;
    std::vector<T> values;

    bool contains(int m) const { return m >= m_min && m <= m_max; }
    const T& at(int m) const {
        if (!contains(m))
            throw DomainError("LatticeFunction: exponent " + std::to_string(m) + " outside [" + std::to_string(m_min) +
                              ", " + std::to_string(m_max) + "]");
        return values[static_cast<std::size_t>(m - m_min)];
    }
    const T& operator()(int m) const { return at(m); }

    template <class F>
    static LatticeFunction sample(F&& f, int m_min, int m_max, const PrecisionContext<T>& ctx, const T& base = T(1)) {
        LatticeFunction lf{base, m_min, m_max, {}};
        for (int m = m_min; m <= m_max; ++m) lf.values.push_back(f(T(base * ipow(ctx.q(), m))));
        return lf;
    }
};

/// A function known on the exponent lattice, plus its boundary limits.
template <class T>
struct LatticeView {
    std::function<T(int)> at;
    T base{1};
    std::optional<int> m_min;
    std::optional<int> m_max;
    std::optional<T> limit_zero;
    std::optional<T> limit_inf;

    static LatticeView from_lattice(const LatticeFunction<T>& lf, std::optional<T> at_zero = std::nullopt,
                                    std::optional<T> at_inf = std::nullopt) {
        return {[lf](int m) { return lf.at(m); }, lf.base, lf.m_min, lf.m_max, at_zero, at_inf};
    }
    template <class F>
    static LatticeView from_callable(F f, const PrecisionContext<T>& ctx, const T& base = T(1),
                                     std::optional<T> at_inf = std::nullopt) {
        T q = ctx.q();
        return {[f, q, base](int m) { return T(f(T(base * ipow(q, m)))); }, base, std::nullopt, std::nullopt,
                T(f(T(0))), at_inf};
    }
};

// ---------------------------------------------------------------- hat integral

/// Prefactor of the two-sided hat q-integral.
///   telescoping:   1/q, the value for which the integral of the deformed
///                  derivative of F telescopes to F(inf) - F(0) for every q;
///   alt_prefactor: (1-q)/q^2, which agrees with 1/q only at q = 1/2.
enum class HatNormalization { telescoping, alt_prefactor };

template <class T>
T hat_prefactor(HatNormalization n, const PrecisionContext<T>& ctx) {
    const T& q = ctx.q();
    return n == HatNormalization::telescoping ? T(1 / q) : T((1 - q) / (q * q));
}

/// c * sum_{k=0}^{K_up} y h(y) at y = q^{-(k-1)}  +  c * sum_{k=0}^{K_down} y h(y)
/// at y = q^{k+2}, with h addressed by lattice exponent (y = x0 q^m).
/// Throws NoConvergenceError when the upward branch is still growing at K_up
/// and its last term is not negligible.
template <class T, class H>
LatticeSum<T> hat_q_integral(H&& h_at, const PrecisionContext<T>& ctx, int K_up = 60, int K_down = 60,
                             HatNormalization norm = HatNormalization::telescoping, const T& base = T(1)) {
    if (K_up < 1 || K_down < 1) throw DomainError("hat_q_integral: truncation depths must be positive");
    const T& q = ctx.q();
    const T c = hat_prefactor(norm, ctx);
    auto term = [&](int m) { return T(base * ipow(q, m) * h_at(m)); };

    LatticeSum<T> r{T(0), T(0), T(0), T(0), K_up + 1, K_down + 1};
    std::vector<T> up, down;
    for (int k = 0; k <= K_up; ++k) up.push_back(checked(term(1 - k), "hat_q_integral"));
    for (int k = 0; k <= K_down; ++k) down.push_back(checked(term(k + 2), "hat_q_integral"));
    for (const auto& t : up) {
        r.value += t;
        r.largest_upward = std::max(r.largest_upward, abs_value(t));
    }
    for (const auto& t : down) {
        r.value += t;
        r.largest_downward = std::max(r.largest_downward, abs_value(t));
    }
    T scale = std::max(r.largest_upward, r.largest_downward);
    T last_up = abs_value(up.back());
    if (last_up > abs_value(up[up.size() - 2]) && last_up > ctx.series_tol() * scale)
        throw NoConvergenceError("hat_q_integral: upward branch still growing at K=" + std::to_string(K_up));
    r.tail_bound = c * (detail::fixed_branch_tail(up.back(), up[up.size() - 2]) +
                        detail::fixed_branch_tail(down.back(), down[down.size() - 2]));
    r.value *= c;
    r.largest_upward *= c;
    r.largest_downward *= c;
    return r;
}

/// Hat integral over (0, a] with a = x0 q^{m_a}: c * sum_{k>=0} y h(y) at
/// y = a q^{k+2}, truncated after K terms.
template <class T, class H>
T hat_q_integral_to(H&& h_at, int m_a, int K, const PrecisionContext<T>& ctx,
                    HatNormalization norm = HatNormalization::telescoping, const T& base = T(1)) {
    const T& q = ctx.q();
    T s(0);
    for (int k = 0; k <= K; ++k) {
        int m = m_a + k + 2;
        s += base * ipow(q, m) * h_at(m);
    }
    return checked(T(hat_prefactor(norm, ctx) * s), "hat_q_integral_to");
}

// ---------------------------------------------------------------- integration by parts

enum class IbpVariant { ip1, ip2, ip3 };

template <class T>
struct IbpResult {
    T lhs;
    T rhs;
    T residual;
    /// Truncation mismatch of the boundary term plus a rounding allowance.
    T bound;
    bool within_bound() const { return residual <= bound; }
};

/// Depth at which x0 q^K drops below series_tol (used for downward branches).
template <class T>
int default_downward_depth(const PrecisionContext<T>& ctx) {
    using std::log;
    double lq = static_cast<double>(log(ctx.q()));
    double lt = static_cast<double>(log(ctx.series_tol()));
    int k = static_cast<int>(std::ceil(lt / lq)) + 4;
    return std::min(k, ctx.max_terms());
}

/// |LHS - RHS| of the chosen identity (0 < a <= inf):
///   ip1: int_0^a u(x/q) Dv = [uv]_0^a - int_0^a v(x/q^2) Du
///   ip2: int_0^a u(x/q^2) Dv = [uv]_0^a - int_0^a v(x/q) Du
///   ip3 (a = inf): int_0^inf u(x) D[v(q.)](x) = [uv]_0^inf - int_0^inf v(x/q^2) Du
/// Finite a is given by its lattice exponent m_a (a = x0 q^{m_a}); pass
/// std::nullopt for a = inf, in which case K_up bounds the upward branch.
/// Boundary limits come from the views (uv(0) defaults to u(0)v(0); uv(inf)
/// to u(inf)v(inf), else 0).
template <class T>
IbpResult<T> ibp_residual(const LatticeView<T>& u, const LatticeView<T>& v, IbpVariant variant, std::optional<int> m_a,
                          const PrecisionContext<T>& ctx, int K_up = 60, int K_down = -1,
                          std::optional<std::type_identity_t<T>> uv_at_inf = std::nullopt) {
    if (variant == IbpVariant::ip3 && m_a) throw DomainError("ibp_residual: ip3 is the a = inf form");
    if (u.base != v.base) throw DomainError("ibp_residual: u and v must share the lattice base");
    const T& q = ctx.q();
    const T base = u.base;
    const T c = hat_prefactor(HatNormalization::telescoping, ctx);

    int lo = m_a ? *m_a + 2 : 1 - K_up;
    int hi = lo + (K_down < 0 ? default_downward_depth(ctx) : K_down);
    if (!m_a) hi = std::max(hi, 2);
    for (const auto* f : {&u, &v}) {
        if (f->m_max) hi = std::min(hi, *f->m_max);
        if (f->m_min && lo - 2 < *f->m_min)
            throw DomainError("ibp_residual: lattice function does not reach exponent " + std::to_string(lo - 2));
    }
    if (hi <= lo) throw DomainError("ibp_residual: empty lattice range");

    auto y = [&](int m) { return T(base * ipow(q, m)); };
    auto D = [&](const LatticeView<T>& g, int m) { return T(q * (g.at(m - 2) - g.at(m - 1)) / y(m)); };

    T lhs(0), rhs_int(0), mag(0);
    for (int m = lo; m <= hi; ++m) {
        T l, r;
        switch (variant) {
            case IbpVariant::ip1:
                l = u.at(m - 1) * D(v, m);
                r = v.at(m - 2) * D(u, m);
                break;
            case IbpVariant::ip2:
                l = u.at(m - 2) * D(v, m);
                r = v.at(m - 1) * D(u, m);
                break;
            case IbpVariant::ip3:
                l = u.at(m) * q * (v.at(m - 1) - v.at(m)) / y(m);
                r = v.at(m - 2) * D(u, m);
                break;
        }
        lhs += c * y(m) * l;
        rhs_int += c * y(m) * r;
        mag += abs_value(T(c * y(m) * l)) + abs_value(T(c * y(m) * r));
    }

    T uv0 = (u.limit_zero && v.limit_zero) ? T(*u.limit_zero * *v.limit_zero) : T(u.at(hi) * v.at(hi));
    T uv_top;
    if (m_a) {
        uv_top = u.at(*m_a) * v.at(*m_a);
    } else if (uv_at_inf) {
        uv_top = *uv_at_inf;
    } else if (u.limit_inf && v.limit_inf) {
        uv_top = *u.limit_inf * *v.limit_inf;
    } else {
        uv_top = T(0);
    }
    T rhs = uv_top - uv0 - rhs_int;

    // The truncated sums telescope exactly onto products of u and v at the
    // lattice points next to the cut; their distance from the limits is the
    // truncation error.
    T e_low(0), e_high(0);
    for (int i = hi - 2; i <= hi; ++i)
        for (int j = hi - 2; j <= hi; ++j) e_low = std::max(e_low, abs_value(T(u.at(i) * v.at(j) - uv0)));
    if (!m_a)
        for (int i = lo - 2; i <= lo; ++i)
            for (int j = lo - 2; j <= lo; ++j) e_high = std::max(e_high, abs_value(T(u.at(i) * v.at(j) - uv_top)));
    T rounding = 64 * machine_eps<T>() * (mag + abs_value(uv0) + abs_value(uv_top));
    return {lhs, rhs, abs_value(T(lhs - rhs)), 4 * (e_low + e_high) + rounding};
}

}  // namespace qhosc
