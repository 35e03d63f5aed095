#pragma once
/// @file qmeasure.hpp
/// @brief Lattice weight f with f(qy) - f(q^2 y) = -q y f(y), its moments,
///        the point-mass measures built from it and the unity (Gram) check.

#include "qhosc/qcalculus.hpp"
#include "qhosc/qkernel.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace qhosc {

/// g_m ~ f(q^m) on [m_min, m_max].
template <class T>
struct LatticeWeight {
    int m_min;
    int m_max;
    std::vector<T> values;
    /// Exponent where the tail normalization g -> 1 is read off (= m_max).
    int tail_init_index;
    /// max over interior m of |g_{m+1} - g_{m+2} + q^{m+1} g_m| / scale.
    T residual_max;
    /// |g_{m_max} - 1|.
    T tail_deviation;
    /// max relative gap between g and the forward recursion started from the
    /// two deepest values.
    T forward_check_max_rel;
    T min_value;

    const T& at(int m) const {
        if (m < m_min || m > m_max)
            throw DomainError("LatticeWeight: exponent " + std::to_string(m) + " outside [" + std::to_string(m_min) +
                              ", " + std::to_string(m_max) + "]");
        return values[static_cast<std::size_t>(m - m_min)];
    }
    bool all_positive() const { return min_value > 0; }
    LatticeFunction<T> as_lattice_function() const { return {T(1), m_min, m_max, values}; }
};

namespace detail {
template <class T>
int gaussian_cutoff(const PrecisionContext<T>& ctx) {
    using std::log;
    double lq = static_cast<double>(log(ctx.q()));
    double lt = static_cast<double>(log(ctx.series_tol()));
    return static_cast<int>(std::ceil(std::sqrt(2.0 * lt / lq))) + 6;
}
}  // namespace detail

/// Lattice solution of f(qy) - f(q^2 y) = -q y f(y) with f(0) = 1 and
/// f(inf) = 0, for m in [-K, M].
///
/// The solution is taken as the lattice-aligned q-Borel-Laplace sum of the
/// formal power series sum_n q^{-C(n,2)} (-y)^n / (q;q)_n:
///
///   g_m = theta^{-1} sum_{j in Z} q^{(j-m)(j-m-1)/2} / (-q^j; q)_inf,
///   theta = sum_{n in Z} q^{n(n-1)/2},
///
/// which satisfies the difference equation term by term, is positive, and
/// tends to 1 as m -> inf. Every term is positive, so there is no
/// cancellation. The forward recursion g_{m+2} = g_{m+1} + q^{m+1} g_m (also
/// free of cancellation) run from the two deepest values serves as an
/// independent check; disagreement raises InstabilityError.
template <class T>
LatticeWeight<T> lattice_weight(int K, int M, const PrecisionContext<T>& ctx) {
    static_assert(!is_exact_v<T>, "lattice_weight needs a floating context");
    if (K < 4 || M < 4) throw DomainError("lattice_weight: K and M must be at least 4");
    const T& q = ctx.q();
    const T& tol = ctx.series_tol();
    const int span = detail::gaussian_cutoff(ctx);
    const int m_min = -K, m_max = M;
    const int j_lo = m_min - span, j_hi = m_max + span;

    // 1/(-q^j;q)_inf for j in [j_lo, j_hi], by (-q^j)_inf = (1+q^j)(-q^{j+1})_inf.
    std::vector<T> inv_p(static_cast<std::size_t>(j_hi - j_lo + 1));
    T p = q_pochhammer_inf(T(-ipow(q, j_hi)), ctx);
    for (int j = j_hi; j >= j_lo; --j) {
        if (j < j_hi) p *= 1 + ipow(q, j);
        inv_p[static_cast<std::size_t>(j - j_lo)] = 1 / checked(p, "lattice_weight");
    }
    auto kernel = [&](long long t) { return ipow(q, t * (t - 1) / 2); };
    T theta(0);
    for (int n = -span; n <= span + 1; ++n) theta += kernel(n);

    LatticeWeight<T> w{m_min, m_max, {}, m_max, T(0), T(0), T(0), T(0)};
    w.values.reserve(static_cast<std::size_t>(m_max - m_min + 1));
    for (int m = m_min; m <= m_max; ++m) {
        T s(0);
        for (int j = j_lo; j <= j_hi; ++j) s += kernel(j - m) * inv_p[static_cast<std::size_t>(j - j_lo)];
        T edge = kernel(j_lo - m) * inv_p.front() + kernel(j_hi - m) * inv_p.back();
        if (edge > tol * s)
            throw InstabilityError("lattice_weight: Borel-Laplace sum not settled at m=" + std::to_string(m));
        w.values.push_back(checked(T(s / theta), "lattice_weight"));
    }

    w.min_value = *std::min_element(w.values.begin(), w.values.end());
    w.tail_deviation = abs_value(T(w.values.back() - 1));
    for (int m = m_min; m + 2 <= m_max; ++m) {
        T a = w.at(m + 1), b = w.at(m + 2), c = ipow(q, m + 1) * w.at(m);
        T scale = abs_value(a) + abs_value(b) + abs_value(c);
        if (scale > 0) w.residual_max = std::max(w.residual_max, T(abs_value(T(a - b + c)) / scale));
    }

    T r0 = w.values[0], r1 = w.values[1];
    const int steps = m_max - m_min;
    T allowed = 8 * tol + 16 * steps * machine_eps<T>();
    for (int m = m_min; m + 2 <= m_max; ++m) {
        T r2 = r1 + ipow(q, m + 1) * r0;
        T g = w.at(m + 2);
        T rel = abs_value(T(r2 - g)) / abs_value(g);
        w.forward_check_max_rel = std::max(w.forward_check_max_rel, rel);
        r0 = r1;
        r1 = r2;
    }
    if (w.forward_check_max_rel > allowed)
        throw InstabilityError("lattice_weight: forward recursion disagrees by " +
                               short_decimal(w.forward_check_max_rel, 4) + " (relative)");
    return w;
}

// ---------------------------------------------------------------- formal series

template <class T>
struct FormalPartial {
    /// Sum of the terms before the smallest one (optimal truncation).
    T partial_sum;
    int smallest_index;
    T smallest_term;
    /// True for y > 0: the terms eventually grow without bound.
    bool divergent;
};

/// Optimal truncation of sum_n q^{-C(n,2)} (-y)^n / (q;q)_n over n < n_terms.
template <class T>
FormalPartial<T> formal_series_partial(const T& y, int n_terms, const PrecisionContext<T>& ctx) {
    if (n_terms < 1 || n_terms > ctx.max_terms()) throw DomainError("formal_series_partial: bad n_terms");
    if (y < 0) throw DomainError("formal_series_partial: y must be nonnegative");
    if (y == 0) return {T(1), 0, T(1), false};
    const T& q = ctx.q();
    std::vector<T> terms{T(1)};
    for (int n = 0; n + 1 < n_terms; ++n) terms.push_back(terms.back() * (-y) / ipow(q, n) / (1 - ipow(q, n + 1)));
    std::size_t best = 0;
    for (std::size_t n = 1; n < terms.size(); ++n)
        if (abs_value(terms[n]) < abs_value(terms[best])) best = n;
    T s(0);
    for (std::size_t n = 0; n < best; ++n) s += terms[n];
    return {s, static_cast<int>(best), abs_value(terms[best]), true};
}

// ---------------------------------------------------------------- moments

/// I_n = q^{-n^2} (q;q)_n.
template <class T>
T moment_closed_form(int n, const PrecisionContext<T>& ctx) {
    if (n < 0) throw DomainError("moment: n must be nonnegative");
    return q_pochhammer(ctx.q(), n, ctx) / ipow(ctx.q(), static_cast<long long>(n) * n);
}

template <class T>
struct MomentResult {
    int n;
    T lattice_value;
    T closed_form;
    T rel_deviation;
    T tail_bound;
};

/// Lattice evaluation of int_0^inf x^n f(q^{-2}x) dx (hat integral) using a
/// precomputed weight covering [-K-2, M].
template <class T>
MomentResult<T> moment_In(int n, const LatticeWeight<T>& w, const PrecisionContext<T>& ctx, int K, int M,
                          HatNormalization norm = HatNormalization::telescoping) {
    if (n < 0) throw DomainError("moment_In: n must be nonnegative");
    if (w.m_min > -K - 1 || w.m_max < M - 2 + 2) throw DomainError("moment_In: lattice weight range too small");
    const T& q = ctx.q();
    auto h = [&](int m) { return T(ipow(q, static_cast<long long>(m) * n) * w.at(m - 2)); };
    auto s = hat_q_integral(h, ctx, K, M - 2, norm);
    T cf = moment_closed_form(n, ctx);
    return {n, s.value, cf, T(abs_value(T(s.value - cf)) / cf), s.tail_bound};
}

template <class T>
MomentResult<T> moment_In(int n, const PrecisionContext<T>& ctx, int K = 60, int M = 120,
                          HatNormalization norm = HatNormalization::telescoping) {
    return moment_In(n, lattice_weight(K + 2, M, ctx), ctx, K, M, norm);
}

// ---------------------------------------------------------------- measures

enum class MeasureVariable {
    y_variable,       ///< masses of the weight in y
    x_variable,       ///< masses of W-hat(x) dx, x = q y/(1-q)
    z_plane_radial    ///< masses of dmu(|z|^2) after angular integration, in x = |z|^2
};

inline std::string to_string(MeasureVariable v) {
    switch (v) {
        case MeasureVariable::y_variable: return "y";
        case MeasureVariable::x_variable: return "x";
        case MeasureVariable::z_plane_radial: return "z";
    }
    return "?";
}

template <class T>
struct DiscreteMeasure {
    MeasureVariable variable;
    std::vector<T> support;
    std::vector<T> weights;
    std::vector<int> exponents;  ///< y = q^m
    std::vector<int> branch;     ///< 0 upward (y >= q), 1 downward
    /// N^2(x) at each support point (x and z variables only).
    std::vector<T> normalizer;
    T kappa;      ///< q/(1-q), with x = kappa y
    T prefactor;  ///< c in the y-masses c y f(q^{-2}y)
    int K;
    int M;

    bool all_positive() const {
        return std::all_of(weights.begin(), weights.end(), [](const T& v) { return v > 0; });
    }
    T min_weight() const { return *std::min_element(weights.begin(), weights.end()); }
};

/// Point masses on y in {q^{1-k}: 0<=k<=K} (upward, increasing) followed by
/// {q^{k+2}: 0<=k<=M-2} (downward, decreasing).
///   y-variable: c y f(q^{-2} y)
///   x-variable: x = kappa y, mass N^2(x) c y f(q^{-2}y) / pi
///   z-plane:    x = |z|^2, mass N^2(x) c y f(q^{-2}y)
/// The x and z constants follow from requiring the Stieltjes moments
/// rho_n! of W = W-hat / N^2.
template <class T>
DiscreteMeasure<T> build_measure(MeasureVariable target, const LatticeWeight<T>& w, const PrecisionContext<T>& ctx,
                                 int K, int M, HatNormalization norm = HatNormalization::telescoping) {
    if (w.m_min > -K - 1 || w.m_max < M) throw DomainError("build_measure: lattice weight range too small");
    const T& q = ctx.q();
    const T pi = boost::math::constants::pi<T>();
    DiscreteMeasure<T> d;
    d.variable = target;
    d.kappa = q / (1 - q);
    d.prefactor = hat_prefactor(norm, ctx);
    d.K = K;
    d.M = M;
    auto add = [&](int m, int br) {
        T y = ipow(q, m);
        T mass = d.prefactor * y * w.at(m - 2);
        d.exponents.push_back(m);
        d.branch.push_back(br);
        if (target == MeasureVariable::y_variable) {
            d.support.push_back(y);
            d.weights.push_back(mass);
        } else {
            T n2 = gen_exponential(y, ctx);
            d.normalizer.push_back(n2);
            d.support.push_back(d.kappa * y);
            d.weights.push_back(target == MeasureVariable::x_variable ? T(n2 * mass / pi) : T(n2 * mass));
        }
    };
    for (int k = 0; k <= K; ++k) add(1 - k, 0);
    for (int k = 0; k <= M - 2; ++k) add(k + 2, 1);
    return d;
}

template <class T>
DiscreteMeasure<T> build_measure(MeasureVariable target, const PrecisionContext<T>& ctx, int K = 60, int M = 120,
                                 HatNormalization norm = HatNormalization::telescoping) {
    return build_measure(target, lattice_weight(K + 2, M, ctx), ctx, K, M, norm);
}

/// n-th moment of the underlying weight:
///   y: sum w y^n            (target I_n)
///   x: pi sum (w/N^2) x^n   (target rho_n!)
///   z: sum (w/N^2) x^n      (target rho_n!)
template <class T>
T measure_moment(const DiscreteMeasure<T>& d, int n) {
    const T pi = boost::math::constants::pi<T>();
    T s(0);
    for (std::size_t j = 0; j < d.support.size(); ++j) {
        T v = d.weights[j] * ipow(d.support[j], n);
        if (d.variable != MeasureVariable::y_variable) v /= d.normalizer[j];
        s += v;
    }
    return d.variable == MeasureVariable::x_variable ? T(pi * s) : s;
}

template <class T>
T moment_target(MeasureVariable v, int n, const PrecisionContext<T>& ctx) {
    return v == MeasureVariable::y_variable ? moment_closed_form(n, ctx) : rho_factorial(n, ctx);
}

/// (1/2pi) int_0^{2pi} e^{i(m-n)theta} dtheta, exactly.
inline int angular_factor(int m, int n) { return m == n ? 1 : 0; }

template <class T>
struct GramReport {
    int n_max;
    /// G_nn = (1/rho_n!) sum_j mass_j N^{-2}(x_j) x_j^n.
    std::vector<T> diagonal;
    T max_deviation;
    /// Largest |G_mn|, m != n (angular orthogonality makes these exactly 0).
    T off_diagonal_max;
    bool weights_positive;
};

/// Gram matrix of the coherent-state projectors against the z-plane measure.
template <class T>
GramReport<T> unity_check(int n_max, const PrecisionContext<T>& ctx, int K = 60, int M = 120) {
    if (n_max < 0 || n_max > 8) throw DomainError("unity_check: n_max must be in [0, 8]");
    auto d = build_measure(MeasureVariable::z_plane_radial, ctx, K, M);
    GramReport<T> g{n_max, {}, T(0), T(0), d.all_positive()};
    for (int m = 0; m <= n_max; ++m)
        for (int n = 0; n <= n_max; ++n) {
            if (angular_factor(m, n) == 0) continue;
            T gnn = measure_moment(d, n) / rho_factorial(n, ctx);
            g.diagonal.push_back(gnn);
            g.max_deviation = std::max(g.max_deviation, abs_value(T(gnn - 1)));
        }
    return g;
}

}  // namespace qhosc
