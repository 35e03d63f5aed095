#include "test_support.hpp"

using namespace qhosc;
using qt::num;
using C = Complex<Real>;

TEST(Normalizer, FrozenAndGexPath) {
    auto c = qt::ctx("0.5");
    Real t = num("0.3");
    EXPECT_REL(cs_norm_sq(t, c), "1.3151611163144802887874524116577321774040397619292420189666778607261188064168387572", "1e-70");
    for (const char* q : {"0.3", "0.5", "0.8"}) {
        auto cq = qt::ctx(q);
        auto w = detail::widen(cq);
        using W = widened_t<Real>;
        for (Real s : {num("0.1"), num("1.7"), num("4")}) {
            W arg = convert<W>(cq.q());
            arg = (1 - arg) * convert<W>(s) / arg;
            Real via_gex = convert<Real>(gen_exponential(arg, w));
            EXPECT_LE(qt::rel_err(cs_norm_sq(s, cq), via_gex), 2 * machine_eps<Real>()) << q;
        }
    }
    EXPECT_THROW(cs_norm_sq(Real(-1), c), DomainError);
}

TEST(Coefficients, NormAndTail) {
    for (const char* q : {"0.3", "0.5", "0.8"}) {
        auto c = qt::ctx(q);
        auto v = cs_coeffs(C(num("1.2"), num("-0.7")), 30, c);
        ASSERT_EQ(v.coeffs.size(), 31u);
        EXPECT_LE(abs_value(Real(v.coeff_norm_sq() + v.tail_bound - 1)), 64 * machine_eps<Real>()) << q;
        EXPECT_GT(v.tail_bound, Real(0));
    }
    auto zero = cs_coeffs(C(0), 5, qt::ctx("0.5"));
    EXPECT_EQ(zero.coeffs[0], C(1));
    EXPECT_EQ(zero.coeffs[3], C(0));
}

TEST(Coefficients, MatchFactorialForm) {
    // c_n = z^n / sqrt(rho_n!) / N.
    auto c = qt::ctx("0.3");
    C z(num("0.4"), num("0.9"));
    auto v = cs_coeffs(z, 12, c);
    Real nrm = sqrt_value(v.norm_sq);
    for (int n = 0; n <= 12; ++n) {
        C want = cpow(z, n) / Real(sqrt_value(rho_factorial(n, c)) * nrm);
        EXPECT_LE(abs(C(v.coeffs[n] - want)) / abs(want), 32 * machine_eps<Real>()) << n;
    }
}

TEST(EigenResidual, BelowBound) {
    for (const char* q : {"0.3", "0.5", "0.8"}) {
        auto c = qt::ctx(q);
        for (C z : {C(num("2")), C(num("0.5"), num("-1.5")), C(num("-1.2"), num("1.6"))}) {
            auto r = cs_eigen_residual(z, 60, c);
            EXPECT_TRUE(r.within_bound()) << q;
            EXPECT_LT(r.bound, num("1e-30")) << q;
        }
    }
    EXPECT_THROW(cs_eigen_residual(C(1), 2, qt::ctx("0.5")), DomainError);
}

TEST(Overlap, HermitianAndNormalized) {
    auto c = qt::ctx("0.5");
    C a(num("0.3"), num("0.8")), b(num("-1.1"), num("0.2"));
    C ab = overlap(a, b, c), ba = overlap(b, a, c);
    EXPECT_LE(abs(C(ab - conj(ba))), num("1e-70"));
    C self = normalized_overlap(a, a, c);
    EXPECT_LE(abs(C(self - C(1))), num("1e-70"));
    EXPECT_LT(abs(normalized_overlap(a, b, c)), Real(1));
}

TEST(ClosedForm, AgreesWithCoefficientSum) {
    for (const char* q : {"0.3", "0.5", "0.8"}) {
        auto c = qt::ctx(q);
        auto rep = cs_closed_form_report(C(num("0.6"), num("0.3")), num("0.8"), c);
        EXPECT_LE(rep.closed_residual, num("1e-30")) << q;
        // The product-form normalizer with base -iq does not reproduce N.
        EXPECT_GT(rep.alt_normalizer_residual, num("1e-6")) << q;
        for (const auto& [h, r] : rep.hypothesis_residuals) {
            if (h == WeightHypothesis::divided_with_qpower_squared) {
                EXPECT_LE(r, num("1e-30")) << q;
            } else {
                EXPECT_GT(r, num("1e-10")) << q << " " << to_string(h);
            }
        }
    }
}
