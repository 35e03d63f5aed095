#include "test_support.hpp"

using namespace qhosc;
using qt::num;

TEST(QNumber, Exact) {
    auto e = qt::exact("1/2");
    EXPECT_EQ(q_number(0, e), Rational(0));
    EXPECT_EQ(q_number(3, e), Rational(7, 4));
    EXPECT_THROW(q_number(-1, e), DomainError);
}

TEST(QPochhammer, Exact) {
    auto e = qt::exact("1/2");
    EXPECT_EQ(q_pochhammer(Rational(1, 2), 3, e), Rational(21, 64));
    EXPECT_EQ(q_pochhammer(Rational(5), 0, e), Rational(1));
    // (q^{-2};q)_3 has the factor 1 - q^{-2} q^2 = 0.
    EXPECT_EQ(q_pochhammer(Rational(4), 3, e), Rational(0));
}

TEST(QPochhammer, InfiniteProduct) {
    auto c = qt::ctx("0.5");
    auto rep = q_pochhammer_inf_report(Real(0.5), c);
    EXPECT_REL(rep.value, "0.28878809508660242127889972192923078008891190484068578411474106618490224090684701257", "1e-70");
    EXPECT_LE(rep.log_error_bound, c.series_tol());
}

TEST(BCoeff, ExactValues) {
    auto e = qt::exact("1/2");
    EXPECT_EQ(b_coeff_sq(-1, e), Rational(0));
    EXPECT_EQ(b_coeff_sq(0, e), Rational(1));
    EXPECT_EQ(b_coeff_sq(1, e), Rational(6));
    EXPECT_EQ(b_coeff_sq(2, e), Rational(28));
    auto e3 = qt::exact("3/10");
    EXPECT_EQ(b_coeff_sq(1, e3), Rational(910, 27));
}

TEST(BCoeff, SquareMatches) {
    for (const char* q : {"0.3", "0.5", "0.8"}) {
        auto c = qt::ctx(q);
        // Reference: exact b_n^2 at the binary value of q.
        PrecisionContext<Rational> e(exact_rational(c.q()));
        for (int n = 0; n <= 20; ++n) {
            Real b = b_coeff(n, c);
            Real want = convert<Real>(b_coeff_sq(n, e));
            EXPECT_LE(qt::rel_err(Real(b * b), want), 2 * machine_eps<Real>()) << q << " n=" << n;
        }
    }
}

TEST(RhoFactorial, FrozenAndTwoPaths) {
    auto c = qt::ctx("0.5");
    EXPECT_REL(rho_factorial(5, c), "9999360", "1e-75");
    for (const char* q : {"0.3", "0.5", "0.8"}) {
        auto cq = qt::ctx(q);
        PrecisionContext<Rational> e(exact_rational(cq.q()));
        Rational kappa = e.q() / (1 - e.q());
        for (int n = 1; n <= 20; ++n) {
            EXPECT_LE(qt::rel_err(rho_factorial(n, cq), rho_factorial_product(n, cq)), 2 * machine_eps<Real>());
            Real ratio = rho_factorial(n, cq) / rho_factorial(n - 1, cq);
            EXPECT_LE(qt::rel_err(ratio, convert<Real>(Rational(kappa * b_coeff_sq(n - 1, e)))), 4 * machine_eps<Real>());
        }
    }
}

TEST(PhiRs, TerminatingQBinomialExact) {
    // 1phi0(q^{-n}; -; q, z) = (z q^{-n}; q)_n.
    auto e = qt::exact("1/2");
    for (int n = 0; n <= 6; ++n) {
        Rational z(1, 3);
        HypergeometricSpec<Rational> spec;
        spec.upper = {Complex<Rational>(ipow(e.q(), -n))};
        spec.z = Complex<Rational>(z);
        spec.terminating_at = n;
        auto s = phi_rs(spec, e);
        EXPECT_EQ(s, Complex<Rational>(q_pochhammer(Rational(z * ipow(e.q(), -n)), n, e))) << n;
    }
}

TEST(PhiRs, QBinomialTheorem) {
    // 1phi0(a; -; q, z) = (az;q)_inf / (z;q)_inf for |z| < 1.
    auto c = qt::ctx("0.6");
    using C = Complex<Real>;
    C a(num("0.4"), num("-1.1")), z(num("0.3"), num("0.2"));
    HypergeometricSpec<Real> spec;
    spec.upper = {a};
    spec.z = z;
    C lhs = phi_rs(spec, c);
    C rhs = q_pochhammer_inf(C(a * z), c) / q_pochhammer_inf(z, c);
    EXPECT_LE(abs(C(lhs - rhs)) / abs(rhs), num("1e-70"));
}

TEST(PhiRs, FormalAndExactModes) {
    auto c = qt::ctx("0.5");
    HypergeometricSpec<Real> spec;
    spec.upper = {Complex<Real>(2), Complex<Real>(3)};
    spec.z = Complex<Real>(num("0.1"));
    EXPECT_THROW(phi_rs(spec, c), FormalSeriesError);
    HypergeometricSpec<Real> one;
    one.upper = {Complex<Real>(2)};
    one.z = Complex<Real>(2);
    EXPECT_THROW(phi_rs(one, c), FormalSeriesError);
    HypergeometricSpec<Rational> r;
    r.upper = {Complex<Rational>(2)};
    r.z = Complex<Rational>(Rational(1, 3));
    EXPECT_THROW(phi_rs(r, qt::exact("1/2")), DomainError);
}

TEST(GenExponential, Frozen) {
    EXPECT_REL(gen_exponential(Real(1), qt::ctx("0.5")),
               "2.1726687508496636560169136098593128206564369351096088602950505343027397138223191734", "1e-70");
    EXPECT_REL(gen_exponential(num("0.35"), qt::ctx("0.3")),
               "1.1515590539927330608403317972152678986505987169053843103197351222184142838710733554", "1e-70");
    EXPECT_EQ(gen_exponential(Real(0), qt::ctx("0.5")), Real(1));
}

TEST(WeightW, FrozenAndEven) {
    auto c = qt::ctx("0.5");
    EXPECT_REL(weight_W(Real(1), c), "0.36875612707690056275084567228081991548234517993772556214571251834820152563388418413", "1e-70");
    EXPECT_EQ(weight_W(num("1.7"), c), weight_W(num("-1.7"), c));
    EXPECT_EQ(weight_W(Real(0), c), Real(1));
}
