#pragma once
/// @file extremal.hpp
/// @brief Discrete (N-extremal, phi = 0) measure of the indeterminate moment
///        problem: bracket numbers, first/second-kind coefficients, the
///        carrier equation, its roots and the loadings.
///
/// Conventions. [s] = b_{s-1}^2 / b_0^2 and xi = x / b_0, so the monic
/// polynomials satisfy xi p_n = p_{n+1} + [n] p_{n-1} and the normalized
/// P_n(xi) = p_n / sqrt([n]!) coincide with Psi_n(x). The second kind Q_n
/// obeys the same normalized recurrence with Q_0 = 0, Q_1 = 1.

#include "qhosc/polynomial.hpp"
#include "qhosc/qhermite.hpp"
#include "qhosc/qkernel.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace qhosc {

// ---------------------------------------------------------------- brackets

/// [s] = q^{-2(s-1)} [s]_q; [0] = 0. Exact in rational mode.
template <class T>
T bracket(int s, const PrecisionContext<T>& ctx) {
    if (s < 0) throw DomainError("bracket: s must be nonnegative");
    if (s == 0) return T(0);
    return ipow(ctx.q(), -2LL * (s - 1)) * q_number(s, ctx);
}

/// b_{s-1}^2 / b_0^2 (second path to [s]).
template <class T>
T bracket_ratio(int s, const PrecisionContext<T>& ctx) {
    if (s < 0) throw DomainError("bracket: s must be nonnegative");
    return b_coeff_sq(s - 1, ctx) / b_coeff_sq(0, ctx);
}

/// [1][3]...[2k-1]; 1 for k = 0.
template <class T>
T odd_double_factorial(int k, const PrecisionContext<T>& ctx) {
    T p(1);
    for (int j = 1; j <= k; ++j) p *= bracket(2 * j - 1, ctx);
    return p;
}

/// [2][4]...[2k-2]; 1 for k <= 1.
template <class T>
T even_double_factorial(int k, const PrecisionContext<T>& ctx) {
    T p(1);
    for (int j = 1; j < k; ++j) p *= bracket(2 * j, ctx);
    return p;
}

/// [1][2]...[n].
template <class T>
T bracket_factorial(int n, const PrecisionContext<T>& ctx) {
    T p(1);
    for (int s = 1; s <= n; ++s) p *= bracket(s, ctx);
    return p;
}

// ---------------------------------------------------------------- alpha, beta

namespace detail {
/// L_i(U) = sum_{k = lower(i)}^{U} [k] L_{i-1}(k-2), L_0 = 1, returned for U = upper.
template <class T, class Lower>
T nested_bracket_sum(int depth, int upper, Lower&& lower, const PrecisionContext<T>& ctx) {
    if (depth == 0) return T(1);
    if (upper < 1) return T(0);
    std::vector<T> br(static_cast<std::size_t>(upper) + 1);
    for (int k = 0; k <= upper; ++k) br[k] = bracket(k, ctx);
    // prev[U + 2] holds L_{i-1}(U) for U in [-2, upper].
    std::vector<T> prev(static_cast<std::size_t>(upper) + 3, T(1)), cur(prev.size());
    for (int i = 1; i <= depth; ++i) {
        T run(0);
        for (int u = -2; u <= upper; ++u) {
            if (u >= lower(i) && u >= 1) run += br[u] * prev[static_cast<std::size_t>(u - 2 + 2)];
            cur[static_cast<std::size_t>(u + 2)] = run;
        }
        std::swap(prev, cur);
    }
    return prev[static_cast<std::size_t>(upper + 2)];
}
}  // namespace detail

/// alpha_{2m-1, n-1} (arguments are m and n) = sum_{k1=2m-1}^{n-1} [k1] sum_{k2=2m-3}^{k1-2} [k2] ... (m nested sums);
/// alpha_{-1, .} = 1.
template <class T>
T alpha_coeff(int m, int n, const PrecisionContext<T>& ctx) {
    if (m < 0 || n < 0) throw DomainError("alpha_coeff: indices must be nonnegative");
    return detail::nested_bracket_sum(m, n - 1, [](int i) { return 2 * i - 1; }, ctx);
}

/// beta_{2m, n} (arguments are m and n) = sum_{k1=2m}^{n} [k1] sum_{k2=2m-2}^{k1-2} [k2] ...; beta_{0, n} = 1.
template <class T>
T beta_coeff(int m, int n, const PrecisionContext<T>& ctx) {
    if (m < 0 || n < 0) throw DomainError("beta_coeff: indices must be nonnegative");
    return detail::nested_bracket_sum(m, n, [](int i) { return 2 * i; }, ctx);
}

/// Monic p_n(xi) = sum_{m=0}^{floor(n/2)} (-1)^m alpha_{2m-1,n-1} xi^{n-2m}.
template <class T>
PolySeries<T> first_kind_monic(int n, const PrecisionContext<T>& ctx) {
    if (n < 0) throw DomainError("first_kind_monic: n must be nonnegative");
    PolySeries<T> p;
    for (int m = 0; 2 * m <= n; ++m) {
        T a = alpha_coeff(m, n, ctx);
        p.set_coeff(static_cast<std::size_t>(n - 2 * m), m % 2 ? T(-a) : a);
    }
    return p;
}

/// Monic numerator of Q_{n+1}: q_{n+1}(xi) = sum_m (-1)^m beta_{2m,n} xi^{n-2m}.
template <class T>
PolySeries<T> second_kind_monic(int n_plus_1, const PrecisionContext<T>& ctx) {
    if (n_plus_1 < 0) throw DomainError("second_kind_monic: index must be nonnegative");
    if (n_plus_1 == 0) return PolySeries<T>::constant(T(0));
    int n = n_plus_1 - 1;
    PolySeries<T> p;
    for (int m = 0; 2 * m <= n; ++m) {
        T b = beta_coeff(m, n, ctx);
        p.set_coeff(static_cast<std::size_t>(n - 2 * m), m % 2 ? T(-b) : b);
    }
    return p;
}

/// Monic family by xi y_n = y_{n+1} + [n] y_{n-1} from the given seeds.
template <class T>
std::vector<PolySeries<T>> monic_recurrence_family(int n_max, const PolySeries<T>& y0, const PolySeries<T>& y1,
                                                   const PrecisionContext<T>& ctx) {
    std::vector<PolySeries<T>> y{y0, y1};
    for (int n = 1; n < n_max; ++n) {
        PolySeries<T> next = y[n].shifted_up() - y[n - 1] * bracket(n, ctx);
        y.push_back(next.trim());
    }
    y.resize(static_cast<std::size_t>(n_max) + 1);
    return y;
}

// ---------------------------------------------------------------- evaluation

namespace detail {
/// b_n cache, extended on demand.
template <class T>
class JacobiCache {
public:
    explicit JacobiCache(const PrecisionContext<T>& ctx) : ctx_(ctx) {}
    const T& b(int n) {
        while (static_cast<int>(b_.size()) <= n) b_.push_back(b_coeff(static_cast<int>(b_.size()), ctx_));
        return b_[static_cast<std::size_t>(n)];
    }
    /// (-1)^k sqrt([2k-2]!!/[2k-1]!!) for k >= 1.
    const T& carrier_coeff(int k) {
        while (static_cast<int>(d_.size()) < k) {
            int j = static_cast<int>(d_.size()) + 1;
            if (j > 1) ratio_sq_ = ratio_sq_ * bracket(2 * j - 2, ctx_) / bracket(2 * j - 1, ctx_);
            T d = sqrt_value(ratio_sq_);
            d_.push_back(j % 2 ? T(-d) : d);
        }
        return d_[static_cast<std::size_t>(k - 1)];
    }
    const PrecisionContext<T>& ctx() const { return ctx_; }

private:
    const PrecisionContext<T>& ctx_;
    std::vector<T> b_;
    std::vector<T> d_;
    T ratio_sq_{1};
};
}  // namespace detail

template <class T>
struct SecondKindValue {
    T closed_form;
    T recurrence;
    T discrepancy;
};

/// Q_n at x (xi = x/b_0) by the beta closed form and by the recurrence
/// x Q_k = b_k Q_{k+1} + b_{k-1} Q_{k-1}, Q_0 = 0, Q_1 = 1.
template <class T>
SecondKindValue<T> second_kind_eval(int n, const T& x, const PrecisionContext<T>& ctx) {
    if (n < 0) throw DomainError("second_kind_eval: n must be nonnegative");
    if (n == 0) return {T(0), T(0), T(0)};
    T xi = x / b_coeff(0, ctx);
    T closed = second_kind_monic(n, ctx)(xi) / sqrt_value(bracket_factorial(n, ctx));
    T q0(0), q1(1);
    for (int k = 1; k < n; ++k) {
        T q2 = (x * q1 - b_coeff(k - 1, ctx) * q0) / b_coeff(k, ctx);
        q0 = q1;
        q1 = q2;
    }
    return {closed, q1, abs_value(T(closed - q1))};
}

template <class T>
struct CarrierValue {
    T value;
    /// |last retained term| * rho/(1-rho) from the last two terms.
    T tail_estimate;
    int terms_used;
};

namespace detail {
template <class T>
CarrierValue<T> carrier_eval(const T& x, int k_terms, JacobiCache<T>& jc) {
    const auto& ctx = jc.ctx();
    const T& tol = ctx.series_tol();
    const T xi = x / jc.b(0);
    T p0(1), p1 = x / jc.b(0);  // Psi_0, Psi_1
    int n = 1;                 // p1 = Psi_n
    T sum(0), prev(0), last(0);
    int window = 0;
    for (int k = 1;; ++k) {
        while (n < 2 * k - 1) {
            T p2 = (x * p1 - jc.b(n - 1) * p0) / jc.b(n);
            p0 = p1;
            p1 = p2;
            ++n;
        }
        T term = jc.carrier_coeff(k) * p1;
        sum += term;
        prev = last;
        last = abs_value(term);
        if (k_terms > 0) {
            if (k >= k_terms) {
                T rho = prev == 0 ? T(0) : T(last / prev);
                T tail = rho < 1 ? T(last * rho / (1 - rho)) : last;
                return {1 + xi * sum, abs_value(xi) * tail, k};
            }
            continue;
        }
        T thr = tol * std::max(abs_value(sum), T(1));
        window = last <= thr ? window + 1 : 0;
        if (window >= 3 && last <= prev) {
            T rho = prev == 0 ? T(0) : T(last / prev);
            return {1 + xi * sum, abs_value(xi) * last * rho / (1 - rho), k};
        }
        if (k >= ctx.max_terms()) throw NoConvergenceError("carrier_function: terms did not decay within max_terms");
    }
}
}  // namespace detail

/// 1 + xi sum_{k>=1} (-1)^k sqrt([2k-2]!!/[2k-1]!!) Psi_{2k-1}(x), xi = x/b_0.
/// k_terms = 0 selects adaptive truncation.
template <class T>
CarrierValue<T> carrier_function(const T& x, int k_terms, const PrecisionContext<T>& ctx) {
    detail::JacobiCache<T> jc(ctx);
    return detail::carrier_eval(x, k_terms, jc);
}

template <class T>
struct CarrierPoint {
    T x;
    /// A(x)/B'(x) from the loading series.
    T loading;
    /// 1 / sum_n Psi_n(x)^2 (second route).
    T christoffel;
    /// Rounding floor of A/B' (from the absolute term sums) plus truncation.
    /// Loadings below this floor carry no information.
    T error_estimate;
    int terms_used;
};

/// Roots of the carrier function in [-search_bound, search_bound]: sign scan
/// on (0, bound] with step grid_step * max(1, x), Illinois refinement to
/// working precision (at least 10^{-bits/4} relative), mirrored to the
/// negative axis. Parity is checked on every root.
template <class T>
std::vector<T> carrier_roots(const T& search_bound, const PrecisionContext<T>& ctx, int k_terms = 0,
                             const T& grid_step = T(1) / 32) {
    if (!(search_bound > 0)) throw DomainError("carrier_roots: search_bound must be positive");
    if (!(grid_step > 0)) throw DomainError("carrier_roots: grid_step must be positive");
    detail::JacobiCache<T> jc(ctx);
    auto f = [&](const T& x) { return detail::carrier_eval(x, k_terms, jc).value; };
    // Refinement continues past the guaranteed 10^{-bits/4} until the
    // iteration stalls at working precision: the loadings are only as
    // accurate as the roots.
    T target = 4 * machine_eps<T>();
    auto refine = [&](T lo, T hi, T flo, T fhi) {
        int side = 0;
        T x = lo;
        for (int it = 0; it < 4 * ctx.max_terms(); ++it) {
            if (hi - lo <= target * std::max(T(1), abs_value(lo))) break;
            // Illinois step; a bisection every eighth iteration bounds the worst case.
            T cand = (it % 8 == 7) ? T((lo + hi) / 2) : T(hi - fhi * (hi - lo) / (fhi - flo));
            if (!(cand > lo && cand < hi)) cand = (lo + hi) / 2;
            if (cand == lo || cand == hi) break;
            x = cand;
            T fx = f(x);
            if (fx == 0) return x;
            if ((fx < 0) == (flo < 0)) {
                lo = x;
                flo = fx;
                if (side == -1) fhi /= 2;
                side = -1;
            } else {
                hi = x;
                fhi = fx;
                if (side == 1) flo /= 2;
                side = 1;
            }
        }
        return abs_value(flo) < abs_value(fhi) ? lo : hi;
    };
    std::vector<T> pos;
    T a(0), fa = f(a);
    while (a < search_bound) {
        T b = std::min(T(a + grid_step * std::max(T(1), a)), search_bound);
        T fb = f(b);
        if (fb == 0)
            pos.push_back(b);
        else if (fa != 0 && (fa < 0) != (fb < 0))
            pos.push_back(refine(a, b, fa, fb));
        a = b;
        fa = fb;
    }
    std::vector<T> roots;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
        if (f(T(-*it)) != f(*it)) throw DomainError("carrier_roots: parity violated");
        roots.push_back(-*it);
    }
    roots.insert(roots.end(), pos.begin(), pos.end());
    return roots;
}

/// Loadings sigma(x_k) = A(x_k) / B'(x_k) with
///   A(x)  = xi sum_j Q_j(0) Q_j(x),
///   B'(x) = d/dxi [xi sum_j Q_j(0) Psi_j(x)] = sum_j Q_j(0) (Psi_j + x Psi_j'),
/// and the Christoffel value 1/sum_n Psi_n(x)^2 for comparison.
template <class T>
std::vector<CarrierPoint<T>> loadings(const std::vector<T>& roots, const PrecisionContext<T>& ctx) {
    detail::JacobiCache<T> jc(ctx);
    const T& tol = ctx.series_tol();
    std::vector<CarrierPoint<T>> out;
    for (const T& x : roots) {
        T p0(1), p1 = x / jc.b(0);        // Psi
        T d0(0), d1 = 1 / jc.b(0);        // Psi'
        T s0(0), s1(1);                   // Q at x
        T z0(0), z1(1);                   // Q at 0
        T A = z1 * s1;                    // j = 1 terms
        T B = z1 * (p1 + x * d1);
        T absA = abs_value(A), absB = abs_value(B);
        T chris = p0 * p0 + p1 * p1;
        int window = 0;
        int n = 1;
        T lastA(0), lastB(0), lastC(0);
        for (;; ++n) {
            if (n > ctx.max_terms()) throw NoConvergenceError("loadings: series did not decay within max_terms");
            const T& bn = jc.b(n);
            const T& bm = jc.b(n - 1);
            T p2 = (x * p1 - bm * p0) / bn;
            T d2 = (p1 + x * d1 - bm * d0) / bn;
            T s2 = (x * s1 - bm * s0) / bn;
            T z2 = (-bm * z0) / bn;
            p0 = p1; p1 = p2;
            d0 = d1; d1 = d2;
            s0 = s1; s1 = s2;
            z0 = z1; z1 = z2;
            lastA = z1 * s1;
            lastB = z1 * (p1 + x * d1);
            lastC = p1 * p1;
            A += lastA;
            B += lastB;
            absA += abs_value(lastA);
            absB += abs_value(lastB);
            chris += lastC;
            bool small = abs_value(lastA) <= tol * abs_value(A) && abs_value(lastB) <= tol * abs_value(B) &&
                         lastC <= tol * chris;
            window = small ? window + 1 : 0;
            if (window >= 4) break;
        }
        T xi = x / jc.b(0);
        A *= xi;
        absA *= abs_value(xi);
        if (abs_value(B) <= tol * std::max(T(1), abs_value(A)))
            throw DegenerateRootError("loadings: derivative series vanishes at x = " + short_decimal(x));
        T sigma = A / B;
        T c = 1 / chris;
        T err = (16 * machine_eps<T>() * static_cast<int>(n) + tol) * (absA + abs_value(sigma) * absB) / abs_value(B);
        out.push_back({x, sigma, c, err, n});
    }
    return out;
}

/// max_{m,n<=n_max} |sum_k sigma_k Psi_m(x_k) Psi_n(x_k) - delta_mn|.
template <class T>
T loadings_gram_deviation(const std::vector<CarrierPoint<T>>& pts, int n_max, const PrecisionContext<T>& ctx) {
    std::vector<std::vector<T>> psi;
    for (const auto& p : pts) psi.push_back(psi_sequence(p.x, n_max + 1, ctx));
    T dev(0);
    for (int m = 0; m <= n_max; ++m)
        for (int n = 0; n <= n_max; ++n) {
            T g(0);
            for (std::size_t k = 0; k < pts.size(); ++k) g += pts[k].loading * psi[k][m] * psi[k][n];
            dev = std::max(dev, abs_value(T(g - (m == n ? 1 : 0))));
        }
    return dev;
}

template <class T>
T total_mass(const std::vector<CarrierPoint<T>>& pts) {
    T s(0);
    for (const auto& p : pts) s += p.loading;
    return s;
}

}  // namespace qhosc
