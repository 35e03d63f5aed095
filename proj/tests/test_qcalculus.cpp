#include "test_support.hpp"

using namespace qhosc;
using qt::num;
using P = PolySeries<Rational>;

namespace {
std::vector<std::pair<P, P>> pairs() {
    return {{P::monomial(1), P::monomial(2)},
            {P(std::vector<Rational>{1, 2, 0, -3}), P(std::vector<Rational>{Rational(-1, 2), 0, 5})},
            {P(std::vector<Rational>{0, 0, 0, 0, 1}), P(std::vector<Rational>{7, 1, Rational(1, 3)})},
            {P(std::vector<Rational>{2, Rational(-5, 7)}), P(std::vector<Rational>{0, 0, 0, 0, 0, 9})}};
}
}  // namespace

TEST(QDerivative, PolynomialExact) {
    auto e = qt::exact("1/2");
    // x^3 -> [3]_q x^2 = 7/4 x^2.
    EXPECT_EQ(q_derivative(P::monomial(3), e), P(std::vector<Rational>{0, 0, Rational(7, 4)}));
    // Deformed: x^3 -> b_2^2 x^2 = 28 x^2.
    EXPECT_EQ(deformed_derivative(P::monomial(3), e), P(std::vector<Rational>{0, 0, 28}));
    EXPECT_EQ(deformed_derivative(P::constant(5), e), P::constant(0));
}

TEST(QDerivative, CallableMatchesPolynomial) {
    auto c = qt::ctx("0.3");
    auto f = [](const Real& x) { return Real(x * x * x - 2 * x); };
    PolySeries<Real> p(std::vector<Real>{0, -2, 0, 1});
    for (Real x : {num("0.4"), num("-1.5"), num("3")}) {
        EXPECT_LE(qt::rel_err(q_derivative(f, x, c), q_derivative(p, c)(x)), num("1e-70"));
        EXPECT_LE(qt::rel_err(deformed_derivative(f, x, c), deformed_derivative(p, c)(x)), num("1e-70"));
    }
    EXPECT_THROW(q_derivative(f, Real(0), c), DomainError);
}

TEST(DeformedDerivative, ReproducesGex) {
    for (const char* q : {"0.3", "0.5", "0.8"}) {
        auto c = qt::ctx(q);
        auto g = [&](const Real& x) { return gen_exponential(x, c); };
        for (int i = 0; i <= 19; ++i) {
            Real x = num("0.1") + num("1.9") * i / 19;
            EXPECT_LE(qt::rel_err(deformed_derivative(g, x, c), g(x)), num("1e-20")) << q << " x=" << x;
        }
    }
}

TEST(Leibniz, BothVariantsExact) {
    for (const char* q : {"1/2", "3/10", "4/5"}) {
        auto e = qt::exact(q);
        for (const auto& [u, v] : pairs())
            for (int variant : {1, 2}) EXPECT_TRUE(leibniz_residual(u, v, variant, e).is_zero()) << q;
    }
    EXPECT_THROW(leibniz_residual(P::monomial(1), P::monomial(1), 3, qt::exact("1/2")), DomainError);
}

TEST(Leibniz, PlainProductRuleFails) {
    // D(uv) = u Dv + v Du does not hold for the deformed derivative.
    auto e = qt::exact("1/2");
    P u = P::monomial(1), v = P::monomial(2);
    P plain = u * deformed_derivative(v, e) + v * deformed_derivative(u, e);
    EXPECT_FALSE((deformed_derivative(P(u * v), e) - plain).is_zero());
}

TEST(Jackson, OfQDerivativeExact) {
    for (const char* q : {"1/2", "3/10"}) {
        auto e = qt::exact(q);
        for (const auto& pr : pairs())
            for (const P* p : {&pr.first, &pr.second})
                for (Rational x : {Rational(1), Rational(3, 2), Rational(-2, 5)})
                    EXPECT_EQ(jackson_integral(q_derivative(*p, e), x, e), (*p)(x) - (*p)(Rational(0))) << q;
    }
}

TEST(Jackson, CallableAgainstClosedForms) {
    auto c = qt::ctx("0.5");
    // int_0^1 x^2 d_q x = (1-q)/(1-q^3).
    auto r = jackson_integral([](const Real& x) { return Real(x * x); }, JacksonKind::zero_to_x, Real(1), c);
    EXPECT_LE(qt::rel_err(r.value, Real(Real(4) / 7)), num("1e-70"));
    // W is even, so the two-sided integral is twice the half-line one.
    auto w = [&](const Real& x) { return weight_W(x, c); };
    auto full = jackson_integral(w, JacksonKind::minus_inf_to_inf, Real(1), c);
    auto half = jackson_integral(w, JacksonKind::zero_to_inf, Real(1), c);
    EXPECT_LE(qt::rel_err(full.value, Real(2 * half.value)), num("1e-70"));
    EXPECT_THROW(jackson_integral(w, JacksonKind::zero_to_x, Real(-1), c), DomainError);
}

TEST(HatPrefactor, AgreesOnlyAtHalf) {
    EXPECT_EQ(hat_prefactor(HatNormalization::telescoping, qt::exact("1/2")),
              hat_prefactor(HatNormalization::alt_prefactor, qt::exact("1/2")));
    EXPECT_NE(hat_prefactor(HatNormalization::telescoping, qt::exact("3/10")),
              hat_prefactor(HatNormalization::alt_prefactor, qt::exact("3/10")));
}

TEST(IntegrationByParts, FiniteInterval) {
    for (const char* q : {"0.3", "0.5", "0.8"}) {
        auto c = qt::ctx(q);
        for (const auto& [u, v] : pairs()) {
            auto view = [&](const P& p) {
                PolySeries<Real> pt = p.template map<Real>([](const Rational& x) { return convert<Real>(x); });
                return LatticeView<Real>::from_callable([pt](const Real& x) { return pt(x); }, c);
            };
            for (auto var : {IbpVariant::ip1, IbpVariant::ip2})
                for (int m_a : {0, 3, -2}) {
                    auto res = ibp_residual(view(u), view(v), var, m_a, c);
                    EXPECT_TRUE(res.within_bound()) << q << " m_a=" << m_a;
                    EXPECT_LE(res.residual / std::max(Real(abs_value(res.lhs) + abs_value(res.rhs)), Real(1)),
                              num("1e-20"));
                }
        }
    }
}

TEST(IntegrationByParts, HalfLineAgainstWeight) {
    auto c = qt::ctx("0.5");
    auto w = lattice_weight(64, 124, c);
    LatticeView<Real> v{[&w](int m) { return Real(-w.at(m)); }, Real(1), w.m_min, w.m_max, Real(-1), Real(0)};
    for (int n = 1; n <= 3; ++n) {
        Real q = c.q();
        LatticeView<Real> u{[q, n](int m) { return ipow(q, static_cast<long long>(m) * n); }, Real(1), std::nullopt,
                            std::nullopt, Real(0), std::nullopt};
        auto res = ibp_residual(u, v, IbpVariant::ip3, std::nullopt, c, 60, -1, Real(0));
        EXPECT_LE(res.residual / std::max(Real(abs_value(res.lhs) + abs_value(res.rhs)), Real(1)), num("1e-20"));
    }
    EXPECT_THROW(ibp_residual(v, v, IbpVariant::ip3, 0, c), DomainError);
}
