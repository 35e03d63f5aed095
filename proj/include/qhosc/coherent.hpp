#pragma once
/// @file coherent.hpp
/// @brief Eigenstates of the lowering operator: coefficients, normalization,
///        overlap kernel, eigen-residual and the closed-form comparison.
///
/// Every finite complex label z is admissible (the normalizer is entire).

#include "qhosc/qhermite.hpp"
#include "qhosc/qkernel.hpp"
#include "qhosc/qoscillator.hpp"

#include <optional>
#include <vector>

namespace qhosc {

namespace detail {
/// sum_n w^n / rho_n!, via t_{n+1}/t_n = w / (kappa b_n^2).
template <class S, class T>
S rho_series(const S& w, const PrecisionContext<T>& ctx) {
    const T& q = ctx.q();
    const T kappa = q / (1 - q);
    auto ratio = [&](int n) { return S(w / (kappa * b_coeff_sq(n, ctx))); };
    return sum_ratio_series(S(1), ratio, ctx, "coherent normalizer");
}

template <class T>
Complex<T> complex_sqrt(const Complex<T>& z) {
    T r = abs(z);
    T re = sqrt_value(T((r + z.re) / 2));
    T im = sqrt_value(T((r - z.re) / 2));
    if (z.im < 0) im = -im;
    return Complex<T>(re, im);
}
}  // namespace detail

/// N^2(t) = sum_n t^n / rho_n! = gex((1-q) t / q), evaluated with guard bits.
template <class T>
T cs_norm_sq(const T& t, const PrecisionContext<T>& ctx) {
    if (t < 0) throw DomainError("cs_norm_sq: t must be nonnegative");
    auto w = detail::widen(ctx);
    return convert<T>(detail::rho_series(convert<widened_t<T>>(t), w));
}

/// Unnormalized kernel sum_n (conj(z1) z2)^n / rho_n!.
template <class T>
Complex<T> overlap(const Complex<T>& z1, const Complex<T>& z2, const PrecisionContext<T>& ctx) {
    using W = widened_t<T>;
    auto w = detail::widen(ctx);
    Complex<W> arg = convert<W>(conj(z1)) * convert<W>(z2);
    return convert<T>(detail::rho_series(arg, w));
}

/// Overlap divided by N(|z1|^2) N(|z2|^2).
template <class T>
Complex<T> normalized_overlap(const Complex<T>& z1, const Complex<T>& z2, const PrecisionContext<T>& ctx) {
    return overlap(z1, z2, ctx) / sqrt_value(T(cs_norm_sq(norm(z1), ctx) * cs_norm_sq(norm(z2), ctx)));
}

template <class T>
struct CoherentStateVector {
    Complex<T> z;
    int trunc;
    /// c_0..c_trunc.
    std::vector<Complex<T>> coeffs;
    /// N^2(|z|^2), summed to convergence.
    T norm_sq;
    /// (sum_{n>trunc} |z|^{2n}/rho_n!) / N^2, so that sum |c_n|^2 = 1 - tail_bound.
    T tail_bound;

    T coeff_norm_sq() const {
        T s(0);
        for (const auto& c : coeffs) s += norm(c);
        return s;
    }
};

/// sqrt(q/(1-q)) b_n for n < count (raising-operator entries, guard bits).
template <class T>
std::vector<T> ladder_entries(int count, const PrecisionContext<T>& ctx) {
    auto w = detail::widen(ctx);
    using W = widened_t<T>;
    W kappa = w.q() / (1 - w.q());
    std::vector<T> l;
    for (int n = 0; n < count; ++n) l.push_back(convert<T>(sqrt_value(W(kappa * b_coeff_sq(n, w)))));
    return l;
}

/// c_n = N^{-1}(|z|^2) z^n / sqrt(rho_n!), built by c_{n+1} = c_n z / (sqrt(q/(1-q)) b_n).
template <class T>
CoherentStateVector<T> cs_coeffs(const Complex<T>& z, int trunc, const PrecisionContext<T>& ctx) {
    if (trunc < 0) throw DomainError("cs_coeffs: trunc must be nonnegative");
    using C = Complex<T>;
    CoherentStateVector<T> v{z, trunc, {}, T(1), T(0)};
    T t = norm(z);
    v.norm_sq = cs_norm_sq(t, ctx);
    auto ell = ladder_entries(trunc, ctx);
    C c(T(1) / sqrt_value(v.norm_sq));
    v.coeffs.push_back(c);
    for (int n = 0; n < trunc; ++n) {
        c = c * z / ell[n];
        v.coeffs.push_back(checked(c, "cs_coeffs"));
    }
    if (t == 0) return v;

    // Tail of sum t^n / rho_n! beyond trunc, summed until negligible.
    const T& q = ctx.q();
    const T kappa = q / (1 - q);
    T term = norm(v.coeffs.back()) * v.norm_sq;
    T tail(0);
    const T& tol = ctx.series_tol();
    for (int n = trunc;; ++n) {
        if (n - trunc > ctx.max_terms())
            throw TruncationError("cs_coeffs: tail bound not reached within max_terms");
        term *= t / (kappa * b_coeff_sq(n, ctx));
        tail += term;
        if (term <= tol * tail) break;
    }
    v.tail_bound = tail / v.norm_sq;
    return v;
}

template <class T>
struct EigenResidual {
    T residual;
    /// |c_T| sqrt(q/(1-q)) b_{T-1} + tail_bound |z| + rounding allowance.
    T bound;
    bool within_bound() const { return residual <= bound; }
};

/// ||a^- v - z v|| with v = cs_coeffs(z, trunc) and a^- the (trunc+1)-square
/// lowering matrix.
template <class T>
EigenResidual<T> cs_eigen_residual(const Complex<T>& z, int trunc, const PrecisionContext<T>& ctx) {
    if (trunc < 4) throw DomainError("cs_eigen_residual: trunc must be at least 4");
    auto v = cs_coeffs(z, trunc, ctx);
    auto lad = build_ladder(trunc + 1, ctx);
    auto av = lad.lowering.apply(v.coeffs);
    T r2(0), scale(0);
    for (int n = 0; n <= trunc; ++n) {
        r2 += norm(Complex<T>(av[n] - z * v.coeffs[n]));
        scale += magnitude(av[n]) + magnitude(Complex<T>(z * v.coeffs[n]));
    }
    T zmag = abs(z);
    T last = abs(v.coeffs.back()) * lad.raising(trunc, trunc - 1).re;
    T bound = last + v.tail_bound * zmag + 16 * machine_eps<T>() * scale;
    return {sqrt_value(r2), bound};
}

template <class T>
struct ClosedFormReport {
    Complex<T> z;
    T x;
    int trunc;
    /// sum_{n<=trunc} c_n Psi_n(x): the canonical value.
    Complex<T> direct;
    /// (u;q)_inf 1phi1(ix; u; q, -u), u = i sqrt(q(1-q)) z.
    Complex<T> closed_unnormalized;
    /// closed_unnormalized / N(|z|^2).
    Complex<T> closed_value;
    T closed_residual;
    /// closed_unnormalized / sqrt(sum_n p^{n(n-1)} ((1-q)|z|^2)^n / (p;p)_n), p = -iq.
    Complex<T> closed_value_alt_normalizer;
    T alt_normalizer_residual;
    /// Per weight hypothesis: |N^{-1} sum_{n<=trunc} w_n h_n(x) tau^n - closed_value|,
    /// tau = sqrt(q(1-q)) z.
    std::vector<std::pair<WeightHypothesis, T>> hypothesis_residuals;
};

/// Closed-form diagnostics for <x|z>; the direct coefficient sum is the oracle.
template <class T>
ClosedFormReport<T> cs_closed_form_report(const Complex<T>& z, const T& x, const PrecisionContext<T>& ctx,
                                          int trunc = 60) {
    using C = Complex<T>;
    const T& q = ctx.q();
    ClosedFormReport<T> rep;
    rep.z = z;
    rep.x = x;
    rep.trunc = trunc;

    auto v = cs_coeffs(z, trunc, ctx);
    auto psi = psi_sequence(x, trunc + 1, ctx);
    rep.direct = C(0);
    for (int n = 0; n <= trunc; ++n) rep.direct += v.coeffs[n] * psi[n];

    T s = sqrt_value(T(q * (1 - q)));
    C tau = z * s;
    C u = C::i() * tau;
    HypergeometricSpec<T> spec;
    spec.upper = {C::i() * C(x)};
    spec.lower = {u};
    spec.z = -u;
    rep.closed_unnormalized = q_pochhammer_inf(u, ctx) * phi_rs(spec, ctx);
    T nz = sqrt_value(v.norm_sq);
    rep.closed_value = rep.closed_unnormalized / nz;
    rep.closed_residual = abs(C(rep.closed_value - rep.direct));

    // sum_n p^{n(n-1)} w^n / (p;p)_n with p = -iq.
    C p(T(0), T(-q));
    C w((1 - q) * norm(z));
    auto ratio = [&](int n) {
        C pn = cpow(p, static_cast<unsigned long long>(n));
        return C(w * pn * pn / (C(1) - pn * p));
    };
    C alt = detail::sum_ratio_series(C(1), ratio, ctx, "alternate normalizer");
    rep.closed_value_alt_normalizer = rep.closed_unnormalized / detail::complex_sqrt(alt);
    rep.alt_normalizer_residual = abs(C(rep.closed_value_alt_normalizer - rep.direct));

    // Monic h_n(x) by recurrence.
    std::vector<T> h{T(1), x};
    for (int n = 1; n < trunc; ++n) h.push_back(x * h[n] - b_coeff_sq(n - 1, ctx) * h[n - 1]);
    for (auto hyp : all_weight_hypotheses) {
        C acc(0), tn(1);
        for (int n = 0; n <= trunc; ++n) {
            acc += tn * (hypothesis_weight(hyp, n, ctx) * h[n]);
            tn *= tau;
        }
        rep.hypothesis_residuals.emplace_back(hyp, abs(C(acc / nz - rep.closed_value)));
    }
    return rep;
}

}  // namespace qhosc
