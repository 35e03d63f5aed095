#include "test_support.hpp"

using namespace qhosc;
using qt::num;

TEST(Spectrum, HalfIsIntegral) {
    auto e = qt::exact("1/2");
    EXPECT_EQ(spectrum_value(0, e), Rational(1));
    EXPECT_EQ(spectrum_value(1, e), Rational(7));
    EXPECT_EQ(spectrum_value(2, e), Rational(34));
    for (int n = 0; n <= 12; ++n) EXPECT_EQ(spectrum_value(n, e), spectrum_value_via_b(n, e));
}

TEST(Spectrum, TwoPathsWithinTwoUlp) {
    for (const char* q : {"0.3", "0.5", "0.8"}) {
        auto t = spectrum(30, qt::ctx(q));
        EXPECT_LE(t.max_path_ulps, Real(2)) << q;
        ASSERT_EQ(t.rows.size(), 31u);
    }
    EXPECT_THROW(spectrum(-1, qt::ctx("0.5")), DomainError);
}

TEST(Operators, AdjointStructure) {
    auto c = qt::ctx("0.3");
    const int dim = 10;
    auto x = build_position(dim, c);
    auto p = build_momentum(dim, c);
    auto lad = build_ladder(dim, c);
    EXPECT_EQ(x.conj_transpose(), x);
    EXPECT_EQ(p.conj_transpose(), p);
    EXPECT_EQ(lad.raising.conj_transpose(), lad.lowering);
    auto n = build_number<Real>(dim);
    for (int k = 0; k < dim; ++k) EXPECT_EQ(n(k, k), Complex<Real>(k));
    EXPECT_THROW(build_position(1, c), DomainError);
    EXPECT_THROW(verify_algebra(2, c), DomainError);
}

TEST(Operators, RaisingActsOnFockBasis) {
    // a^+ |n> = sqrt(q/(1-q)) b_n |n+1>; at q = 1/2 this is b_n.
    auto c = qt::ctx("0.5");
    auto lad = build_ladder(6, c);
    for (int n = 0; n < 5; ++n) EXPECT_LE(qt::rel_err(lad.raising(n + 1, n).re, b_coeff(n, c)), machine_eps<Real>());
}

TEST(Algebra, IdentitiesWithinFourUlp) {
    for (const char* q : {"0.3", "0.5", "0.8"})
        for (int dim : {4, 8, 16}) {
            auto rep = verify_algebra(dim, qt::ctx(q));
            EXPECT_EQ(rep.checks.size(), 7u);
            for (const auto& chk : rep.checks) EXPECT_TRUE(chk.pass()) << q << " dim=" << dim << " " << chk.name;
            EXPECT_NO_THROW(rep.require());
        }
}

TEST(Algebra, DetectsWrongCoefficients) {
    // A negative tolerance fails every identity.
    auto rep = verify_algebra(8, qt::ctx("0.3"), Real(-1));
    EXPECT_FALSE(rep.passed());
    EXPECT_THROW(rep.require(), AlgebraViolation);
}

TEST(Hamiltonian, EigenResidual) {
    for (const char* q : {"0.3", "0.8"}) {
        auto c = qt::ctx(q);
        for (int n = 0; n < 8; ++n) {
            Real lam = spectrum_value(n, c);
            EXPECT_LE(hamiltonian_eigen_residual(n, 10, c), 16 * machine_eps<Real>() * lam) << q << " n=" << n;
        }
    }
}

TEST(Hamiltonian, LongDouble) {
    auto c = make_context<long double>("0.5");
    auto rep = verify_algebra(12, c);
    EXPECT_TRUE(rep.passed());
}
