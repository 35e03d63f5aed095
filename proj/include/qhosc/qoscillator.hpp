#pragma once
/// @file qoscillator.hpp
/// @brief Fock-basis sections of the position, momentum, ladder, number and
///        Hamiltonian operators, the spectrum, and algebra verification.

#include "qhosc/qkernel.hpp"

#include <string>
#include <utility>
#include <vector>

namespace qhosc {

/// Dense dim x dim complex matrix. valid_block is the size of the top-left
/// block whose entries agree with the infinite operator.
template <class T>
class TruncatedOperator {
public:
    using C = Complex<T>;

    TruncatedOperator(int dim, int valid_block)
        : dim_(dim), valid_(valid_block), a_(static_cast<std::size_t>(dim) * dim, C(0)) {
        if (dim < 1) throw DomainError("TruncatedOperator: dim must be positive");
    }

    int dim() const { return dim_; }
    int valid_block() const { return valid_; }

    const C& operator()(int r, int c) const { return a_[idx(r, c)]; }
    C& operator()(int r, int c) { return a_[idx(r, c)]; }

    TruncatedOperator conj_transpose() const {
        TruncatedOperator t(dim_, valid_);
        for (int r = 0; r < dim_; ++r)
            for (int c = 0; c < dim_; ++c) t(c, r) = conj((*this)(r, c));
        return t;
    }

    /// Product; valid block shrinks by one (factors are banded with width 1).
    friend TruncatedOperator operator*(const TruncatedOperator& a, const TruncatedOperator& b) {
        check_same(a, b);
        TruncatedOperator p(a.dim_, std::max(0, std::min(a.valid_, b.valid_) - 1));
        for (int r = 0; r < a.dim_; ++r)
            for (int k = 0; k < a.dim_; ++k) {
                const C& ark = a(r, k);
                if (ark == C(0)) continue;
                for (int c = 0; c < a.dim_; ++c) {
                    const C& bkc = b(k, c);
                    if (bkc == C(0)) continue;
                    p(r, c) += ark * bkc;
                }
            }
        return p;
    }
    friend TruncatedOperator operator+(const TruncatedOperator& a, const TruncatedOperator& b) {
        check_same(a, b);
        TruncatedOperator s(a.dim_, std::min(a.valid_, b.valid_));
        for (std::size_t i = 0; i < a.a_.size(); ++i) s.a_[i] = a.a_[i] + b.a_[i];
        return s;
    }
    friend TruncatedOperator operator-(const TruncatedOperator& a, const TruncatedOperator& b) {
        check_same(a, b);
        TruncatedOperator s(a.dim_, std::min(a.valid_, b.valid_));
        for (std::size_t i = 0; i < a.a_.size(); ++i) s.a_[i] = a.a_[i] - b.a_[i];
        return s;
    }
    friend TruncatedOperator operator*(const C& f, const TruncatedOperator& a) {
        TruncatedOperator s(a);
        for (auto& v : s.a_) v = f * v;
        return s;
    }

    /// Entrywise modulus, used to build rounding scales of products.
    TruncatedOperator abs_entries() const {
        TruncatedOperator m(*this);
        for (auto& v : m.a_) v = C(magnitude(v));
        return m;
    }

    std::vector<C> apply(const std::vector<C>& v) const {
        if (static_cast<int>(v.size()) != dim_) throw DomainError("apply: dimension mismatch");
        std::vector<C> out(v.size(), C(0));
        for (int r = 0; r < dim_; ++r)
            for (int c = 0; c < dim_; ++c)
                if ((*this)(r, c) != C(0)) out[r] += (*this)(r, c) * v[c];
        return out;
    }

    friend bool operator==(const TruncatedOperator& a, const TruncatedOperator& b) {
        return a.dim_ == b.dim_ && a.a_ == b.a_;
    }

private:
    std::size_t idx(int r, int c) const {
        if (r < 0 || c < 0 || r >= dim_ || c >= dim_) throw DomainError("TruncatedOperator: index out of range");
        return static_cast<std::size_t>(r) * dim_ + c;
    }
    static void check_same(const TruncatedOperator& a, const TruncatedOperator& b) {
        if (a.dim_ != b.dim_) throw DomainError("TruncatedOperator: dimension mismatch");
    }

    int dim_;
    int valid_;
    std::vector<C> a_;
};

namespace detail {
inline void require_dim(int dim, int min_dim, const char* what) {
    if (dim < min_dim)
        throw DomainError(std::string(what) + ": dim must be at least " + std::to_string(min_dim));
}

/// q/(1-q) with guard bits.
template <class T>
T kappa(const PrecisionContext<T>& ctx) {
    auto w = widen(ctx);
    return convert<T>(w.q() / (1 - w.q()));
}
}  // namespace detail

/// X|n> = b_n|n+1> + b_{n-1}|n-1>.
template <class T>
TruncatedOperator<T> build_position(int dim, const PrecisionContext<T>& ctx) {
    detail::require_dim(dim, 2, "build_position");
    TruncatedOperator<T> x(dim, dim);
    for (int n = 0; n + 1 < dim; ++n) {
        T b = b_coeff(n, ctx);
        x(n + 1, n) = b;
        x(n, n + 1) = b;
    }
    return x;
}

/// P|n> = i(b_n|n+1> - b_{n-1}|n-1>).
template <class T>
TruncatedOperator<T> build_momentum(int dim, const PrecisionContext<T>& ctx) {
    detail::require_dim(dim, 2, "build_momentum");
    TruncatedOperator<T> p(dim, dim);
    for (int n = 0; n + 1 < dim; ++n) {
        T b = b_coeff(n, ctx);
        p(n + 1, n) = Complex<T>(T(0), b);
        p(n, n + 1) = Complex<T>(T(0), T(-b));
    }
    return p;
}

template <class T>
struct LadderPair {
    TruncatedOperator<T> lowering;
    TruncatedOperator<T> raising;
};

/// Raising operator has sqrt(q/(1-q)) b_n at (n+1, n); lowering is its
/// conjugate transpose.
template <class T>
LadderPair<T> build_ladder(int dim, const PrecisionContext<T>& ctx) {
    detail::require_dim(dim, 2, "build_ladder");
    auto w = detail::widen(ctx);
    using W = widened_t<T>;
    W kappa = w.q() / (1 - w.q());
    TruncatedOperator<T> up(dim, dim);
    for (int n = 0; n + 1 < dim; ++n)
        up(n + 1, n) = checked(convert<T>(sqrt_value(W(kappa * b_coeff_sq(n, w)))), "build_ladder");
    return {up.conj_transpose(), up};
}

template <class T>
TruncatedOperator<T> build_number(int dim) {
    detail::require_dim(dim, 1, "build_number");
    TruncatedOperator<T> n(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = T(k);
    return n;
}

/// a^+ a^- + a^- a^+ (ladder form).
template <class T>
TruncatedOperator<T> build_hamiltonian(int dim, const PrecisionContext<T>& ctx) {
    auto l = build_ladder(dim, ctx);
    return l.raising * l.lowering + l.lowering * l.raising;
}

/// (1/2) q/(1-q) (X^2 + P^2) (position-momentum form).
template <class T>
TruncatedOperator<T> build_hamiltonian_xp(int dim, const PrecisionContext<T>& ctx) {
    auto x = build_position(dim, ctx);
    auto p = build_momentum(dim, ctx);
    T half_kappa = detail::kappa(ctx) / 2;
    return Complex<T>(half_kappa) * (x * x + p * p);
}

// ---------------------------------------------------------------- spectrum

namespace detail {
template <class W>
W lambda_qnumber_path(int n, const PrecisionContext<W>& w) {
    const W& q = w.q();
    W v = ipow(q, -2LL * n) * q_number(n + 1, w);
    if (n > 0) v += ipow(q, -2LL * (n - 1)) * q_number(n, w);
    return v;
}
template <class W>
W lambda_b_path(int n, const PrecisionContext<W>& w) {
    const W& q = w.q();
    return q / (1 - q) * (b_coeff_sq(n - 1, w) + b_coeff_sq(n, w));
}
}  // namespace detail

/// lambda_n = q^{-2n}[n+1]_q + q^{-2(n-1)}[n]_q.
template <class T>
T spectrum_value(int n, const PrecisionContext<T>& ctx) {
    if (n < 0) throw DomainError("spectrum: n must be nonnegative");
    auto w = detail::widen(ctx);
    return checked(convert<T>(detail::lambda_qnumber_path(n, w)), "spectrum");
}

/// lambda_n = q/(1-q) (b_{n-1}^2 + b_n^2), second path.
template <class T>
T spectrum_value_via_b(int n, const PrecisionContext<T>& ctx) {
    if (n < 0) throw DomainError("spectrum: n must be nonnegative");
    auto w = detail::widen(ctx);
    return checked(convert<T>(detail::lambda_b_path(n, w)), "spectrum");
}

template <class T>
struct SpectrumTable {
    std::vector<std::pair<int, T>> rows;
    /// max |path1 - path2| in units of epsilon * |lambda|.
    T max_path_ulps;
};

template <class T>
SpectrumTable<T> spectrum(int n_max, const PrecisionContext<T>& ctx) {
    if (n_max < 0) throw DomainError("spectrum: n_max must be nonnegative");
    SpectrumTable<T> t{{}, T(0)};
    for (int n = 0; n <= n_max; ++n) {
        T a = spectrum_value(n, ctx);
        T b = spectrum_value_via_b(n, ctx);
        if constexpr (!is_exact_v<T>) t.max_path_ulps = std::max(t.max_path_ulps, T(abs_value(T(a - b)) / (machine_eps<T>() * a)));
        if (!t.rows.empty() && !(a > t.rows.back().second))
            throw DomainError("spectrum: values not strictly increasing");
        t.rows.emplace_back(n, a);
    }
    return t;
}

// ---------------------------------------------------------------- verification

template <class T>
struct IdentityCheck {
    std::string name;
    T max_residual;
    /// max over entries of residual / (epsilon * scale), scale = sum of the
    /// magnitudes of the terms entering that entry.
    T max_ulps;
    int row;
    int col;
    T tolerance_ulps;
    bool pass() const { return max_ulps <= tolerance_ulps; }
};

template <class T>
struct AlgebraReport {
    int dim;
    int valid_block;
    std::vector<IdentityCheck<T>> checks;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.pass()) return false;
        return true;
    }
    /// Throws AlgebraViolation naming the first failing identity and entry.
    void require() const {
        for (const auto& c : checks)
            if (!c.pass())
                throw AlgebraViolation(c.name + " violated at entry (" + std::to_string(c.row) + "," +
                                       std::to_string(c.col) + "): residual " + short_decimal(c.max_residual) +
                                       " = " + short_decimal(c.max_ulps, 4) + " ulp");
    }
};

namespace detail {
/// Compares lhs against rhs on the valid block, with per-entry scale.
template <class T>
IdentityCheck<T> compare_block(const std::string& name, const TruncatedOperator<T>& lhs,
                               const TruncatedOperator<T>& rhs, const TruncatedOperator<T>& scale, int block,
                               const T& tol_ulps) {
    IdentityCheck<T> chk{name, T(0), T(0), 0, 0, tol_ulps};
    const T eps = machine_eps<T>();
    for (int r = 0; r < block; ++r)
        for (int c = 0; c < block; ++c) {
            T res = magnitude(Complex<T>(lhs(r, c) - rhs(r, c)));
            T s = scale(r, c).re + magnitude(rhs(r, c));
            T ulps = res == 0 ? T(0) : (s == 0 ? T(std::numeric_limits<int>::max()) : T(res / (eps * s)));
            if (ulps > chk.max_ulps) {
                chk.max_ulps = ulps;
                chk.row = r;
                chk.col = c;
            }
            chk.max_residual = std::max(chk.max_residual, res);
        }
    return chk;
}

template <class T, class F>
TruncatedOperator<T> diagonal(int dim, int valid, F&& f) {
    TruncatedOperator<T> d(dim, valid);
    for (int n = 0; n < dim; ++n) d(n, n) = f(n);
    return d;
}
}  // namespace detail

/// Checks, on the top-left (dim-1) block:
///   a^- a^+ = q^{-2N}[N+1],  a^+ a^- = q^{-2(N-1)}[N],
///   a^- a^+ - q^{-1} a^+ a^- = q^{-2N},  a^- a^+ - q^{-2} a^+ a^- = q^{-N},
///   a^+ a^- + a^- a^+ = diag(lambda_n) = (1/2) q/(1-q) (X^2 + P^2).
template <class T>
AlgebraReport<T> verify_algebra(int dim, const PrecisionContext<T>& ctx, const T& tol_ulps = T(4)) {
    static_assert(!is_exact_v<T>, "verify_algebra works at floating precision");
    detail::require_dim(dim, 3, "verify_algebra");
    using C = Complex<T>;
    using Op = TruncatedOperator<T>;
    auto w = detail::widen(ctx);
    using W = widened_t<T>;
    const W& qw = w.q();
    const int block = dim - 1;
    AlgebraReport<T> rep{dim, block, {}};

    auto lad = build_ladder(dim, ctx);
    const Op& lo = lad.lowering;
    const Op& up = lad.raising;
    Op lu = lo * up, ul = up * lo;
    Op lu_s = lo.abs_entries() * up.abs_entries(), ul_s = up.abs_entries() * lo.abs_entries();

    auto rd = [&](const W& v) { return C(convert<T>(v)); };
    Op r1 = detail::diagonal<T>(dim, block, [&](int n) { return rd(ipow(qw, -2LL * n) * q_number(n + 1, w)); });
    Op r2 = detail::diagonal<T>(dim, block, [&](int n) { return rd(ipow(qw, -2LL * (n - 1)) * q_number(n, w)); });
    Op r3 = detail::diagonal<T>(dim, block, [&](int n) { return rd(ipow(qw, -2LL * n)); });
    Op r4 = detail::diagonal<T>(dim, block, [&](int n) { return rd(ipow(qw, -1LL * n)); });
    Op lam = detail::diagonal<T>(dim, block, [&](int n) { return C(spectrum_value(n, ctx)); });

    C qinv(convert<T>(W(1 / qw)));
    C qinv2(convert<T>(W(1 / (qw * qw))));

    rep.checks.push_back(detail::compare_block("lowering*raising = q^{-2N}[N+1]", lu, r1, lu_s, block, tol_ulps));
    rep.checks.push_back(detail::compare_block("raising*lowering = q^{-2(N-1)}[N]", ul, r2, ul_s, block, tol_ulps));
    rep.checks.push_back(detail::compare_block("lowering*raising - q^{-1} raising*lowering = q^{-2N}",
                                               lu - qinv * ul, r3, lu_s + qinv * ul_s, block, tol_ulps));
    rep.checks.push_back(detail::compare_block("lowering*raising - q^{-2} raising*lowering = q^{-N}",
                                               lu - qinv2 * ul, r4, lu_s + qinv2 * ul_s, block, tol_ulps));

    Op h = ul + lu;
    rep.checks.push_back(detail::compare_block("raising*lowering + lowering*raising = diag(lambda)", h, lam,
                                               ul_s + lu_s, block, tol_ulps));
    auto x = build_position(dim, ctx);
    auto p = build_momentum(dim, ctx);
    C hk(detail::kappa(ctx) / 2);
    Op hxp = hk * (x * x + p * p);
    Op hxp_s = hk * (x.abs_entries() * x.abs_entries() + p.abs_entries() * p.abs_entries());
    rep.checks.push_back(detail::compare_block("(1/2) q/(1-q) (X^2+P^2) = diag(lambda)", hxp, lam, hxp_s, block,
                                               tol_ulps));
    rep.checks.push_back(
        detail::compare_block("ladder and position-momentum Hamiltonians agree", h, hxp, ul_s + lu_s, block, tol_ulps));
    return rep;
}

/// |H e_n - lambda_n e_n| on a section of size dim (n < dim-1).
template <class T>
T hamiltonian_eigen_residual(int n, int dim, const PrecisionContext<T>& ctx) {
    if (n < 0 || n >= dim - 1) throw DomainError("hamiltonian_eigen_residual: need 0 <= n < dim-1");
    auto h = build_hamiltonian(dim, ctx);
    std::vector<Complex<T>> e(static_cast<std::size_t>(dim), Complex<T>(0));
    e[n] = Complex<T>(1);
    auto he = h.apply(e);
    T lam = spectrum_value(n, ctx);
    T r(0);
    for (int k = 0; k < dim; ++k) {
        Complex<T> d = he[k] - (k == n ? Complex<T>(lam) : Complex<T>(0));
        r += norm(d);
    }
    return sqrt_value(r);
}

}  // namespace qhosc
