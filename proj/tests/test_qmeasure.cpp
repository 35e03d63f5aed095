#include "test_support.hpp"

using namespace qhosc;
using qt::num;

TEST(LatticeWeight, SolvesDifferenceEquation) {
    for (const char* q : {"0.3", "0.5", "0.8"}) {
        auto c = qt::ctx(q);
        auto w = lattice_weight(62, 120, c);
        EXPECT_LE(w.residual_max, num("1e-70")) << q;
        // g_m approaches 1 geometrically in q^m.
        EXPECT_LE(w.tail_deviation, 10 * ipow(c.q(), 120)) << q;
        EXPECT_LT(lattice_weight(62, 240, c).tail_deviation, w.tail_deviation * ipow(c.q(), 60)) << q;
        EXPECT_TRUE(w.all_positive());
        EXPECT_EQ(w.m_min, -62);
        EXPECT_EQ(w.m_max, 120);
    }
    auto w = lattice_weight(8, 8, qt::ctx("0.5"));
    EXPECT_THROW(w.at(9), DomainError);
    EXPECT_THROW(lattice_weight(2, 8, qt::ctx("0.5")), DomainError);
}

TEST(LatticeWeight, DecreasesTowardInfinity) {
    // f(0) = 1 and f decreases in y, so g_m increases with m.
    auto w = lattice_weight(20, 40, qt::ctx("0.5"));
    for (int m = w.m_min; m < w.m_max; ++m) EXPECT_LT(w.at(m), w.at(m + 1));
}

TEST(Moments, ClosedFormExact) {
    auto e = qt::exact("1/2");
    EXPECT_EQ(moment_closed_form(0, e), Rational(1));
    EXPECT_EQ(moment_closed_form(1, e), Rational(1));
    EXPECT_EQ(moment_closed_form(2, e), Rational(6));
    for (int n = 1; n <= 10; ++n)
        EXPECT_EQ(moment_closed_form(n, e), b_coeff_sq(n - 1, e) * moment_closed_form(n - 1, e));
}

TEST(Moments, LatticeMatchesClosedForm) {
    for (const char* q : {"0.3", "0.5", "0.8"}) {
        auto c = qt::ctx(q);
        auto w = lattice_weight(62, 120, c);
        Real prev(0);
        for (int n = 0; n <= 8; ++n) {
            auto m = moment_In(n, w, c, 60, 120);
            EXPECT_LE(m.rel_deviation, num("1e-8")) << q << " n=" << n;
            if (n > 0) EXPECT_LE(qt::rel_err(m.lattice_value, Real(b_coeff_sq(n - 1, c) * prev)), num("1e-8"));
            prev = m.lattice_value;
        }
    }
}

TEST(Moments, AltPrefactorOffAwayFromHalf) {
    auto c = qt::ctx("0.3");
    auto good = moment_In(0, c, 60, 120, HatNormalization::telescoping);
    auto alt = moment_In(0, c, 60, 120, HatNormalization::alt_prefactor);
    EXPECT_LE(good.rel_deviation, num("1e-8"));
    // (1-q)/q^2 over 1/q is (1-q)/q = 7/3 at q = 0.3.
    EXPECT_LE(qt::rel_err(alt.lattice_value / good.lattice_value, Real(Real(7) / 3)), num("1e-60"));
}

TEST(Measure, MomentsReproduceTargets) {
    auto c = qt::ctx("0.5");
    for (auto v : {MeasureVariable::y_variable, MeasureVariable::x_variable, MeasureVariable::z_plane_radial}) {
        auto d = build_measure(v, c);
        EXPECT_TRUE(d.all_positive());
        EXPECT_EQ(d.support.size(), d.weights.size());
        for (int n = 0; n <= 4; ++n)
            EXPECT_LE(qt::rel_err(measure_moment(d, n), moment_target(v, n, c)), num("1e-6"))
                << to_string(v) << " n=" << n;
    }
}

TEST(Measure, SupportOnGeometricLattice) {
    auto c = qt::ctx("0.3");
    auto d = build_measure(MeasureVariable::x_variable, c, 10, 12);
    Real kappa = c.q() / (1 - c.q());
    for (std::size_t j = 0; j < d.support.size(); ++j)
        EXPECT_LE(qt::rel_err(d.support[j], Real(kappa * ipow(c.q(), d.exponents[j]))), 4 * machine_eps<Real>());
    EXPECT_EQ(d.support.size(), static_cast<std::size_t>(10 + 1 + 12 - 1));
}

TEST(Unity, GramDiagonal) {
    auto g = unity_check(6, qt::ctx("0.5"));
    ASSERT_EQ(g.diagonal.size(), 7u);
    for (const auto& v : g.diagonal) EXPECT_LE(abs_value(Real(v - 1)), num("1e-6"));
    EXPECT_EQ(g.off_diagonal_max, Real(0));
    EXPECT_THROW(unity_check(9, qt::ctx("0.5")), DomainError);
}

TEST(FormalSeries, OptimalTruncation) {
    auto c = qt::ctx("0.5");
    auto z = formal_series_partial(Real(0), 10, c);
    EXPECT_EQ(z.partial_sum, Real(1));
    EXPECT_FALSE(z.divergent);
    auto p = formal_series_partial(num("0.01"), 40, c);
    EXPECT_TRUE(p.divergent);
    EXPECT_GT(p.smallest_index, 0);
    EXPECT_LT(p.smallest_index, 40);
    EXPECT_THROW(formal_series_partial(Real(-1), 10, c), DomainError);
}
