#include "test_support.hpp"

using namespace qhosc;
using qt::num;

TEST(Hermite2, MonicWithParity) {
    for (const char* q : {"1/2", "3/10", "4/5"}) {
        auto fam = hermite2_family(12, qt::exact(q));
        for (int n = 0; n <= 12; ++n) {
            EXPECT_EQ(fam[n].degree(), n);
            EXPECT_EQ(fam[n].coeff(n), Rational(1));
            for (int k = n - 1; k >= 0; k -= 2) EXPECT_EQ(fam[n].coeff(k), Rational(0)) << q << " n=" << n;
        }
    }
}

TEST(Hermite2, SmallDegreesAtHalf) {
    auto e = qt::exact("1/2");
    using P = PolySeries<Rational>;
    EXPECT_EQ(hermite2_coeffs(2, e), P(std::vector<Rational>{-1, 0, 1}));
    EXPECT_EQ(hermite2_coeffs(3, e), P(std::vector<Rational>{0, -7, 0, 1}));
    EXPECT_EQ(hermite2_coeffs(2, e)(Rational(1)), Rational(0));
    EXPECT_THROW(hermite2_family(-1, e), DomainError);
}

TEST(Hermite2, DirectSumEqualsRecurrenceExactly) {
    for (const char* q : {"1/2", "3/10", "4/5"}) {
        auto e = qt::exact(q);
        auto fam = hermite2_family(9, e);
        for (int n = 0; n <= 9; ++n)
            for (Rational x : {Rational(0), Rational(1, 2), Rational(-1), Rational(2), Rational(-7, 3)}) {
                auto d = hermite2_eval_direct(n, Complex<Rational>(x), e);
                EXPECT_EQ(d.im, Rational(0));
                EXPECT_EQ(d.re, fam[n](x)) << q << " n=" << n;
            }
    }
}

TEST(Hermite2, DirectSumFrozen) {
    auto d = hermite2_eval_direct(5, Complex<Real>(num("0.7")), qt::ctx("0.3"));
    EXPECT_REL(d.re, "113359.40643317295805178749851817981676234991278429778658402343816152686751680807465", "1e-70");
    EXPECT_LE(abs_value(d.im), num("1e-60"));
    auto d6 = hermite2_eval_direct(6, Complex<Real>(num("-1.25")), qt::ctx("0.8"));
    EXPECT_REL(d6.re, "0.77476681326515972614288330078125", "1e-70");
}

TEST(Hermite2, DirectSumAtLowQUsesEnoughBits) {
    // Terms reach q^{-C(n,2)}; at q = 0.1, n = 15 that is 10^105.
    auto c = qt::ctx("0.1");
    auto fam = hermite2_family(15, c);
    Real x = num("1.5");
    auto d = hermite2_eval_direct(15, Complex<Real>(x), c);
    EXPECT_LE(abs_value(Real(d.re - fam[15](x))) / fam[15].eval_scale(x), num("1e-60"));
}

TEST(Psi, Frozen) {
    EXPECT_REL(psi_eval(3, num("1.5"), qt::ctx("0.5")),
               "-0.54970568423995243030514902359674971650178072247369903769873095338563718829927162079", "1e-70");
    EXPECT_REL(psi_eval(4, num("-0.5"), qt::ctx("0.3")),
               "0.069054547842759792567377720241555947088805693819990925848035829538081186246091962614", "1e-70");
}

TEST(Psi, RecurrenceAgreesWithCoefficients) {
    for (const char* q : {"0.3", "0.5", "0.8"}) {
        auto c = qt::ctx(q);
        for (Real x : {num("-2"), num("0.5"), num("1")}) {
            auto seq = psi_sequence(x, 16, c);
            auto fam = hermite2_family(15, c);
            for (int n = 0; n < 16; ++n) {
                Real scale = std::max(Real(psi_prefactor(n, c) * fam[n].eval_scale(x)), Real(1));
                EXPECT_LE(abs_value(Real(seq[n] - psi_eval(n, x, c))) / scale, num("1e-65")) << q << " n=" << n;
            }
            for (int n = 0; n < 10; ++n) EXPECT_LE(normalized_recurrence_residual(n, x, c), num("1e-60"));
        }
    }
}

TEST(Psi, PrefactorClosedForm) {
    // Psi_1 = x/b_0 and b_0 = sqrt((1-q)/q).
    auto c = qt::ctx("0.3");
    Real x = num("0.9");
    EXPECT_LE(qt::rel_err(psi_eval(1, x, c), Real(x / b_coeff(0, c))), 4 * machine_eps<Real>());
}

TEST(QDiff, ResidualsExact) {
    for (const char* q : {"1/2", "3/10"}) {
        auto e = qt::exact(q);
        EXPECT_TRUE(qdiff_equation_check(0, e).is_zero());
        // Hand expansion for h_1 = x: i(1-q) + i x^2 + (1-q) x^3.
        Rational c = 1 - e.q();
        using C = Complex<Rational>;
        PolySeries<C> want(std::vector<C>{C(Rational(0), c), C(0), C::i(), C(c)});
        EXPECT_EQ(qdiff_equation_check(1, e), want) << q;
        for (int n = 2; n <= 5; ++n) EXPECT_FALSE(qdiff_equation_check(n, e).is_zero());
    }
    EXPECT_EQ(poly_to_string(qdiff_equation_check(1, qt::exact("1/2"))), "(0.5)i + (1)i x^2 + (0.5) x^3");
}

TEST(GeneratingFunction, WeightHypotheses) {
    auto c = qt::ctx("0.5");
    auto rep = generating_fn_report(num("0.7"), Complex<Real>(num("0.3")), 10, c, std::optional<Real>(num("1e-20")));
    EXPECT_EQ(rep.result(WeightHypothesis::divided_with_qpower_squared).matches_through, 10);
    EXPECT_EQ(rep.result(WeightHypothesis::unweighted).matches_through, 0);
    EXPECT_EQ(rep.result(WeightHypothesis::divided_by_qpochhammer).matches_through, 1);
    EXPECT_LT(rep.result(WeightHypothesis::divided_with_qpower).matches_through, 10);
    ASSERT_EQ(rep.matching().size(), 1u);
    // Truncating at order 10 leaves a tail of order tau^11.
    EXPECT_LE(abs(Complex<Real>(rep.closed_value - rep.truncated_value)), num("1e-6"));
}

TEST(GeneratingFunction, OrderOneFactorExact) {
    for (const char* q : {"1/2", "3/10", "4/5"}) {
        auto e = qt::exact(q);
        Rational x(7, 10);
        auto cc = genfn_closed_coefficients(Complex<Rational>(x), 3, e);
        EXPECT_EQ(cc[0], Complex<Rational>(1));
        EXPECT_EQ(cc[1].im, Rational(0));
        EXPECT_EQ(x / cc[1].re, 1 - e.q()) << q;
        auto rep = generating_fn_report(x, Complex<Rational>(Rational(1, 4)), 8, e);
        EXPECT_EQ(rep.result(WeightHypothesis::divided_with_qpower_squared).max_abs_residual, Rational(0));
    }
}
