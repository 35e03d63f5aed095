#pragma once

#include "qhosc/qhosc.hpp"

#include <gtest/gtest.h>

#include <string>

namespace qt {

using qhosc::Rational;
using qhosc::Real;

inline qhosc::PrecisionContext<Real> ctx(const std::string& q) { return qhosc::make_context<Real>(q); }
inline qhosc::PrecisionContext<Rational> exact(const std::string& q) {
    return qhosc::PrecisionContext<Rational>(qhosc::parse_rational(q));
}
inline Real num(const std::string& s) { return qhosc::parse_number<Real>(s); }

inline Real rel_err(const Real& got, const Real& want) {
    using boost::multiprecision::abs;
    return want == 0 ? Real(abs(got)) : Real(abs(got - want) / abs(want));
}

}  // namespace qt

#define EXPECT_REL(got, want, tol) \
    EXPECT_LE(qt::rel_err((got), qt::num(want)), qt::num(tol)) << "got " << qhosc::to_decimal(Real(got))
