#pragma once
// Command implementations, instantiated once per precision in dispatch_*.cpp.

#include "run_config.hpp"

#include "qhosc/qhosc.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace qhosc::cli {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    parts.push_back(cur);
    return parts;
}

inline int parse_int(const std::string& s, const char* what) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw UsageError(std::string("invalid ") + what + ": '" + s + "'");
    }
}

/// "N" or "A:B" (inclusive).
inline std::pair<int, int> parse_range(const std::string& s, const char* what) {
    auto parts = split(s, ':');
    if (parts.size() == 1) {
        int v = parse_int(parts[0], what);
        return {v, v};
    }
    if (parts.size() != 2) throw UsageError(std::string("invalid ") + what + " range: '" + s + "'");
    int a = parse_int(parts[0], what), b = parse_int(parts[1], what);
    if (b < a) throw UsageError(std::string("empty ") + what + " range: '" + s + "'");
    return {a, b};
}

inline Rational parse_value(const std::string& s, const char* what) {
    try {
        return parse_rational(s);
    } catch (const DomainError&) {
        throw UsageError(std::string("invalid ") + what + ": '" + s + "'");
    }
}

/// Comma-separated list of exact values.
inline std::vector<Rational> parse_list(const std::string& s, const char* what) {
    std::vector<Rational> v;
    for (const auto& p : split(s, ',')) v.push_back(parse_value(p, what));
    return v;
}

/// "re" or "re,im".
template <class T>
Complex<T> parse_complex(const std::string& s) {
    auto parts = split(s, ',');
    if (parts.size() > 2) throw UsageError("invalid complex value '" + s + "' (expected re or re,im)");
    T re = convert<T>(parse_value(parts[0], "z"));
    T im = parts.size() == 2 ? convert<T>(parse_value(parts[1], "z")) : T(0);
    return Complex<T>(re, im);
}

template <class T>
Json complex_json(const Complex<T>& z) {
    return Json{{"re", to_decimal(z.re)}, {"im", to_decimal(z.im)}};
}

template <class T>
PrecisionContext<T> context(const RunConfig& cfg) {
    Rational q = parse_value(cfg.q, "q");
    if (!(q > 0 && q < 1)) throw UsageError("q must lie in (0, 1), got " + cfg.q);
    return PrecisionContext<T>(convert<T>(q));
}

inline PrecisionContext<Rational> exact_context(const RunConfig& cfg) {
    return PrecisionContext<Rational>(parse_value(cfg.q, "q"));
}

inline void require_n_max(int n_max, int lo, int hi, const char* cmd) {
    if (n_max < lo || n_max > hi)
        throw UsageError(std::string(cmd) + ": --n-max must be in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                         "]");
}

}  // namespace detail

// ---------------------------------------------------------------- poly

template <class T>
Output cmd_poly(const RunConfig& cfg) {
    auto ctx = detail::context<T>(cfg);
    auto [n_lo, n_hi] = detail::parse_range(cfg.n, "n");
    if (n_lo < 0) throw UsageError("poly: n must be nonnegative");
    auto xs = detail::parse_list(cfg.x, "x");
    const bool want_h = cfg.kind != "psi", want_psi = cfg.kind != "h";

    Output o;
    o.header = {"n", "x"};
    if (want_h) o.header.push_back("h");
    if (want_psi) o.header.push_back("psi");
    o.meta["kind"] = cfg.kind;
    o.meta["exact"] = cfg.exact;

    std::vector<PolySeries<T>> fam = hermite2_family(n_hi, ctx);
    std::vector<PolySeries<Rational>> exact_fam;
    if (cfg.exact) exact_fam = hermite2_family(n_hi, detail::exact_context(cfg));
    for (int n = n_lo; n <= n_hi; ++n)
        for (const Rational& xr : xs) {
            T x = convert<T>(xr);
            std::vector<std::string> row{std::to_string(n), cfg.exact ? to_decimal(xr) : to_decimal(x)};
            if (want_h) row.push_back(cfg.exact ? to_decimal(exact_fam[n](xr)) : to_decimal(fam[n](x)));
            if (want_psi) row.push_back(to_decimal(T(psi_prefactor(n, ctx) * fam[n](x))));
            o.rows.push_back(std::move(row));
        }
    return o;
}

// ---------------------------------------------------------------- verify

inline Json check_json(const CheckRecord& c) {
    Json params = Json::object();
    for (const auto& [k, v] : c.params) params[k] = v;
    return Json{{"id", c.id},         {"params", params},          {"residual", c.residual}, {"bound", c.bound},
                {"pass", c.pass},     {"diagnostic", c.diagnostic}, {"detail", c.detail}};
}

template <class T>
Output cmd_verify(const RunConfig& cfg) {
    auto ctx = detail::context<T>(cfg);
    auto exact = detail::exact_context(cfg);
    SuiteOptions so;
    so.n_max = cfg.n_max;
    so.dim = cfg.dim;
    so.tol = cfg.tol;
    so.bound = cfg.bound;
    so.K = cfg.K;
    so.M = cfg.M;
    if (cfg.dim < 4) throw UsageError("verify: --dim must be at least 4");

    std::vector<std::string> suites;
    if (cfg.suite == "all")
        suites = suite_names();
    else if (std::find(suite_names().begin(), suite_names().end(), cfg.suite) != suite_names().end())
        suites = {cfg.suite};
    else
        throw UsageError("verify: unknown suite '" + cfg.suite + "'");

    Output o;
    o.header = {"suite", "id", "params", "residual", "bound", "pass", "diagnostic", "detail"};
    Json reports = Json::array();
    bool all_pass = true;
    for (const auto& s : suites) {
        VerifyReport r;
        try {
            r = run_suite(s, ctx, exact, so);
        } catch (const Error& e) {
            throw StageError(e.kind(), s, e.what());
        }
        all_pass = all_pass && r.passed();
        Json checks = Json::array();
        for (const auto& c : r.checks) {
            checks.push_back(check_json(c));
            std::string params;
            for (const auto& [k, v] : c.params) params += (params.empty() ? "" : ";") + k + "=" + v;
            o.rows.push_back({s, c.id, params, c.residual, c.bound, c.pass ? "true" : "false",
                              c.diagnostic ? "true" : "false", c.detail});
        }
        reports.push_back(Json{{"suite", r.suite}, {"pass", r.passed()}, {"checks", checks}});
    }
    o.meta["pass"] = all_pass;
    o.body = Json{{"reports", reports}};
    o.exit_code = all_pass ? exit_ok : exit_verify_failed;
    return o;
}

// ---------------------------------------------------------------- table

template <class T>
Output cmd_table(const RunConfig& cfg) {
    auto ctx = detail::context<T>(cfg);
    const int n_max = cfg.n_max < 0 ? 10 : cfg.n_max;
    Output o;
    o.meta["what"] = cfg.what;
    o.header = {"n", "value"};
    if (cfg.what == "spectrum") {
        detail::require_n_max(n_max, 0, 4000, "table");
        for (const auto& [n, v] : spectrum(n_max, ctx).rows) o.rows.push_back({std::to_string(n), to_decimal(v)});
    } else if (cfg.what == "bn") {
        detail::require_n_max(n_max, 0, 4000, "table");
        for (int n = 0; n <= n_max; ++n) o.rows.push_back({std::to_string(n), to_decimal(b_coeff(n, ctx))});
    } else if (cfg.what == "rho") {
        detail::require_n_max(n_max, 0, 4000, "table");
        for (int n = 0; n <= n_max; ++n) o.rows.push_back({std::to_string(n), to_decimal(rho_factorial(n, ctx))});
    } else if (cfg.what == "moments") {
        detail::require_n_max(n_max, 0, 30, "table");
        o.header = {"n", "value", "lattice_value", "rel_deviation"};
        o.meta["K"] = cfg.K;
        o.meta["M"] = cfg.M;
        auto w = lattice_weight(cfg.K + 2, cfg.M, ctx);
        for (int n = 0; n <= n_max; ++n) {
            auto m = moment_In(n, w, ctx, cfg.K, cfg.M);
            o.rows.push_back({std::to_string(n), to_decimal(m.closed_form), to_decimal(m.lattice_value),
                              to_decimal(m.rel_deviation)});
        }
    } else if (cfg.what == "weight") {
        o.header = {"m", "y", "value"};
        auto w = lattice_weight(cfg.K, cfg.M, ctx);
        for (int m = w.m_min; m <= w.m_max; ++m)
            o.rows.push_back({std::to_string(m), to_decimal(ipow(ctx.q(), m)), to_decimal(w.at(m))});
        o.meta["all_positive"] = w.all_positive();
        o.meta["residual_max"] = to_decimal(w.residual_max);
    } else {
        throw UsageError("table: unknown --what '" + cfg.what + "' (spectrum, bn, rho, moments, weight)");
    }
    return o;
}

// ---------------------------------------------------------------- measure

template <class T>
Output cmd_measure(const RunConfig& cfg) {
    auto ctx = detail::context<T>(cfg);
    Output o;
    o.meta["type"] = cfg.type;
    if (cfg.type == "extremal") {
        T bound = convert<T>(detail::parse_value(cfg.bound, "bound"));
        if (!(bound > 0)) throw UsageError("measure: --bound must be positive");
        auto pts = loadings(carrier_roots(bound, ctx), ctx);
        o.header = {"x", "loading", "christoffel", "error_estimate"};
        for (const auto& p : pts)
            o.rows.push_back({to_decimal(p.x), to_decimal(p.loading), to_decimal(p.christoffel),
                              to_decimal(p.error_estimate)});
        o.meta["bound"] = cfg.bound;
        o.meta["total_mass"] = to_decimal(total_mass(pts));
        o.meta["gram_deviation_n3"] = to_decimal(loadings_gram_deviation(pts, 3, ctx));
        return o;
    }
    MeasureVariable v;
    if (cfg.type == "y")
        v = MeasureVariable::y_variable;
    else if (cfg.type == "x")
        v = MeasureVariable::x_variable;
    else if (cfg.type == "z")
        v = MeasureVariable::z_plane_radial;
    else
        throw UsageError("measure: unknown --type '" + cfg.type + "' (y, x, z, extremal)");
    auto d = build_measure(v, ctx, cfg.K, cfg.M);
    o.header = {"exponent", "support", "weight"};
    for (std::size_t j = 0; j < d.support.size(); ++j)
        o.rows.push_back({std::to_string(d.exponents[j]), to_decimal(d.support[j]), to_decimal(d.weights[j])});
    o.meta["K"] = cfg.K;
    o.meta["M"] = cfg.M;
    o.meta["prefactor"] = to_decimal(d.prefactor);
    o.meta["all_positive"] = d.all_positive();
    o.meta["min_weight"] = to_decimal(d.min_weight());
    Json moments = Json::array();
    for (int n = 0; n <= 4; ++n) {
        T got = measure_moment(d, n), want = moment_target(v, n, ctx);
        moments.push_back(Json{{"n", n}, {"value", to_decimal(got)}, {"target", to_decimal(want)},
                               {"rel_deviation", to_decimal(T(abs_value(T(got - want)) / want))}});
    }
    o.meta["moments"] = moments;
    return o;
}

// ---------------------------------------------------------------- cs

template <class T>
Output cmd_cs(const RunConfig& cfg) {
    auto ctx = detail::context<T>(cfg);
    if (cfg.trunc < 4) throw UsageError("cs: --trunc must be at least 4");
    Complex<T> z = detail::parse_complex<T>(cfg.z);
    auto v = cs_coeffs(z, cfg.trunc, ctx);
    auto res = cs_eigen_residual(z, cfg.trunc, ctx);
    Output o;
    o.header = {"n", "re", "im"};
    for (int n = 0; n <= cfg.trunc; ++n)
        o.rows.push_back({std::to_string(n), to_decimal(v.coeffs[n].re), to_decimal(v.coeffs[n].im)});
    o.meta["z"] = detail::complex_json(z);
    o.meta["trunc"] = cfg.trunc;
    o.meta["norm_sq"] = to_decimal(v.norm_sq);
    o.meta["tail_bound"] = to_decimal(v.tail_bound);
    o.meta["eigen_residual"] = to_decimal(res.residual);
    o.meta["eigen_bound"] = to_decimal(res.bound);
    o.meta["within_bound"] = res.within_bound();
    if (cfg.cs_x) {
        T x = convert<T>(detail::parse_value(*cfg.cs_x, "x"));
        auto rep = cs_closed_form_report(z, x, ctx, cfg.trunc);
        Json hyp = Json::object();
        for (const auto& [h, r] : rep.hypothesis_residuals) hyp[to_string(h)] = to_decimal(r);
        o.meta["closed_form"] = Json{{"x", to_decimal(x)},
                                     {"direct", detail::complex_json(rep.direct)},
                                     {"closed_value", detail::complex_json(rep.closed_value)},
                                     {"closed_residual", to_decimal(rep.closed_residual)},
                                     {"alt_normalizer_residual", to_decimal(rep.alt_normalizer_residual)},
                                     {"hypothesis_residuals", hyp}};
    }
    return o;
}

template <class T>
Output run_command(const RunConfig& cfg) {
    if (cfg.command == "poly") return cmd_poly<T>(cfg);
    if (cfg.command == "verify") return cmd_verify<T>(cfg);
    if (cfg.command == "table") return cmd_table<T>(cfg);
    if (cfg.command == "measure") return cmd_measure<T>(cfg);
    if (cfg.command == "cs") return cmd_cs<T>(cfg);
    throw UsageError("unknown command '" + cfg.command + "'");
}

}  // namespace qhosc::cli
