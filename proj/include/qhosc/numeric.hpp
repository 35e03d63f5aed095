#pragma once
/// @file numeric.hpp
/// @brief Scalar types, complex pairs, error hierarchy and small helpers
///        shared by every qhosc module.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ios>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace qhosc {

namespace bmp = boost::multiprecision;

template <unsigned Bits>
using BinFloat = bmp::number<bmp::cpp_bin_float<Bits, bmp::digit_base_2>, bmp::et_off>;

/// Default extended-precision real (256-bit mantissa).
using Real = BinFloat<256>;
/// Exact rational used by the symbolic identity checkers.
using Rational = bmp::number<bmp::cpp_rational_backend, bmp::et_off>;
using Integer = bmp::number<bmp::cpp_int_backend<>, bmp::et_off>;

// ---------------------------------------------------------------- errors

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "Error"; }
};

#define QHOSC_DEFINE_ERROR(Name)                                          \
    class Name : public Error {                                           \
    public:                                                               \
        using Error::Error;                                               \
        const char* kind() const noexcept override { return #Name; }      \
    };

QHOSC_DEFINE_ERROR(DomainError)
QHOSC_DEFINE_ERROR(OverflowError)
QHOSC_DEFINE_ERROR(NoConvergenceError)
QHOSC_DEFINE_ERROR(FormalSeriesError)
QHOSC_DEFINE_ERROR(TruncationError)
QHOSC_DEFINE_ERROR(InstabilityError)
QHOSC_DEFINE_ERROR(AlgebraViolation)
QHOSC_DEFINE_ERROR(DegenerateRootError)

#undef QHOSC_DEFINE_ERROR

// ---------------------------------------------------------------- traits

template <class T>
struct is_exact : std::false_type {};
template <>
struct is_exact<Rational> : std::true_type {};
template <class T>
inline constexpr bool is_exact_v = is_exact<T>::value;

/// Same scalar with 64 extra mantissa bits; used for guard-digit evaluation
/// of matrix entries that must be correctly rounded.
template <class T>
struct widened {
    using type = T;
};
template <unsigned Bits>
struct widened<BinFloat<Bits>> {
    using type = BinFloat<Bits + 64>;
};
template <>
struct widened<double> {
    using type = BinFloat<128>;
};
template <>
struct widened<long double> {
    using type = BinFloat<128>;
};
template <class T>
using widened_t = typename widened<T>::type;

/// Mantissa bits of T (0 for exact types).
template <class T>
constexpr int mantissa_bits() {
    if constexpr (is_exact_v<T>)
        return 0;
    else
        return std::numeric_limits<T>::digits;
}

template <class T>
T machine_eps() {
    if constexpr (is_exact_v<T>)
        return T(0);
    else
        return std::numeric_limits<T>::epsilon();
}

// ---------------------------------------------------------------- scalar helpers

template <class T>
T abs_value(const T& x) {
    return x < 0 ? T(-x) : x;
}

template <class T>
bool is_finite_value(const T& x) {
    if constexpr (is_exact_v<T>) {
        (void)x;
        return true;
    } else {
        using std::isfinite;
        using boost::multiprecision::isfinite;
        return isfinite(x);
    }
}

/// Throws OverflowError unless x is finite.
template <class T>
const T& checked(const T& x, const char* what) {
    if (!is_finite_value(x)) {
        std::string msg = std::string(what) + ": result left the representable range";
        if constexpr (!is_exact_v<T>)
            msg += " at " + std::to_string(mantissa_bits<T>()) +
                   " mantissa bits; use exact mode or a wider exponent type";
        throw OverflowError(msg);
    }
    return x;
}

/// Integer power by repeated squaring; negative exponents invert at the end.
template <class T>
T ipow(const T& base, long long e) {
    bool inv = e < 0;
    unsigned long long k = inv ? static_cast<unsigned long long>(-e) : static_cast<unsigned long long>(e);
    T result(1);
    T b = base;
    while (k) {
        if (k & 1u) result *= b;
        k >>= 1u;
        if (k) b *= b;
    }
    if (inv) {
        if (result == 0) throw DomainError("ipow: zero base with negative exponent");
        result = T(1) / result;
    }
    return result;
}

template <class T>
T sqrt_value(const T& x) {
    static_assert(!is_exact_v<T>, "square roots are not available in exact mode");
    using std::sqrt;
    return sqrt(x);
}

/// Rational -> binary float, rounded once to nearest (ties to even).
template <class To>
To rational_to_float(const Rational& x) {
    using std::ldexp;
    Integer num = bmp::numerator(x), den = bmp::denominator(x);
    if (num == 0) return To(0);
    const bool neg = num < 0;
    if (neg) num = -num;
    const long long p = mantissa_bits<To>();
    // Scale so the integer quotient carries p significant bits plus at least
    // two more for the rounding decision; the remainder is the sticky bit.
    const long long s = p + 2 - (static_cast<long long>(bmp::msb(num)) - static_cast<long long>(bmp::msb(den)));
    if (s >= 0)
        num <<= static_cast<unsigned>(s);
    else
        den <<= static_cast<unsigned>(-s);
    Integer quo, rem;
    bmp::divide_qr(num, den, quo, rem);
    const long long extra = static_cast<long long>(bmp::msb(quo)) + 1 - p;
    const Integer half = Integer(1) << static_cast<unsigned>(extra - 1);
    const Integer low = quo & ((half << 1) - 1);
    quo >>= static_cast<unsigned>(extra);
    if (low > half || (low == half && (rem != 0 || bmp::bit_test(quo, 0)))) ++quo;
    long long e = extra - s;
    if (bmp::msb(quo) == static_cast<unsigned>(p)) {
        quo >>= 1;
        ++e;
    }
    To m;
    if constexpr (std::is_floating_point_v<To>)
        m = static_cast<To>(quo.template convert_to<unsigned long long>());
    else
        m = To(quo);
    To r = ldexp(m, static_cast<int>(e));
    return neg ? To(-r) : r;
}

/// Converts between scalar types; rational -> float is correctly rounded.
template <class To, class From>
To convert(const From& x) {
    if constexpr (std::is_same_v<To, From>) {
        return x;
    } else if constexpr (std::is_same_v<From, Rational>) {
        if constexpr (is_exact_v<To>)
            return To(bmp::numerator(x)) / To(bmp::denominator(x));
        else
            return rational_to_float<To>(x);
    } else if constexpr (std::is_floating_point_v<To>) {
        return static_cast<To>(x);
    } else {
        return To(x);
    }
}

/// The exact binary value of a floating x as a rational.
template <class T>
Rational exact_rational(const T& x) {
    if constexpr (is_exact_v<T>) {
        return Rational(x);
    } else {
        using std::frexp;
        using std::ldexp;
        if (!is_finite_value(x)) throw DomainError("exact_rational: value is not finite");
        if (x == 0) return Rational(0);
        int e = 0;
        T m = frexp(x, &e);
        const int bits = mantissa_bits<T>();
        T scaled = ldexp(m, bits);
        Integer num;
        if constexpr (std::is_floating_point_v<T>) {
            using std::fabs;
            num = Integer(static_cast<unsigned long long>(fabs(scaled)));
            if (scaled < 0) num = -num;
        } else
            num = scaled.template convert_to<Integer>();
        Rational r(num);
        int shift = e - bits;
        Integer p2 = Integer(1) << (shift < 0 ? -shift : shift);
        return shift < 0 ? Rational(r / p2) : Rational(r * p2);
    }
}

/// Parses "p/q", an integer, or a decimal with optional exponent into an
/// exact rational. Throws DomainError on malformed input.
inline Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw DomainError("empty number");
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rational num = parse_rational(s.substr(0, slash));
        Rational den = parse_rational(s.substr(slash + 1));
        if (den == 0) throw DomainError("zero denominator in '" + text + "'");
        return num / den;
    }
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
    Integer mant = 0;
    long long scale = 0;
    bool digits = false, dot = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') {
            mant = mant * 10 + (c - '0');
            if (dot) --scale;
            digits = true;
        } else if (c == '.' && !dot) {
            dot = true;
        } else {
            break;
        }
    }
    if (!digits) throw DomainError("malformed number '" + text + "'");
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') throw DomainError("malformed number '" + text + "'");
        ++i;
        std::size_t used = 0;
        long long e = 0;
        try {
            e = std::stoll(s.substr(i), &used);
        } catch (const std::exception&) {
            throw DomainError("malformed exponent in '" + text + "'");
        }
        if (i + used != s.size()) throw DomainError("malformed number '" + text + "'");
        scale += e;
    }
    if (scale > 100000 || scale < -100000) throw DomainError("exponent out of range in '" + text + "'");
    Rational r(mant);
    Integer p10 = bmp::pow(Integer(10), static_cast<unsigned>(scale < 0 ? -scale : scale));
    r = scale < 0 ? Rational(r / Rational(p10)) : Rational(r * Rational(p10));
    return neg ? Rational(-r) : r;
}

/// Parses a number string directly into T (correctly rounded from the
/// exact rational value).
template <class T>
T parse_number(const std::string& text) {
    return convert<T>(parse_rational(text));
}

/// Exact decimal expansion when the denominator is 2^a 5^b, else "p/q".
inline std::string exact_to_decimal(const Rational& x) {
    Integer num = boost::multiprecision::numerator(x), den = boost::multiprecision::denominator(x);
    Integer d = den;
    int twos = 0, fives = 0;
    while (d % 2 == 0) { d /= 2; ++twos; }
    while (d % 5 == 0) { d /= 5; ++fives; }
    if (d != 1) {
        std::ostringstream os;
        os << x;
        return os.str();
    }
    int digits = std::max(twos, fives);
    if (digits == 0) return num.str();
    Integer scaled = num * boost::multiprecision::pow(Integer(10), static_cast<unsigned>(digits)) / den;
    bool neg = scaled < 0;
    std::string s = (neg ? Integer(-scaled) : scaled).str();
    if (static_cast<int>(s.size()) <= digits) s.insert(0, static_cast<std::size_t>(digits + 1 - s.size()), '0');
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    return neg ? "-" + s : s;
}

/// Decimal string with enough digits to round-trip at T's precision.
template <class T>
std::string to_decimal(const T& x) {
    if constexpr (is_exact_v<T>) {
        return exact_to_decimal(Rational(x));
    } else if constexpr (std::is_floating_point_v<T>) {
        std::ostringstream os;
        os << std::setprecision(std::numeric_limits<T>::max_digits10) << std::scientific << x;
        return os.str();
    } else {
        return x.str(std::numeric_limits<T>::max_digits10, std::ios_base::scientific);
    }
}

/// Short decimal for messages.
template <class T>
std::string short_decimal(const T& x, int digits = 8) {
    if constexpr (is_exact_v<T>) {
        return short_decimal(convert<BinFloat<128>>(x), digits);
    } else {
        std::ostringstream os;
        os << std::setprecision(digits) << x;
        return os.str();
    }
}

// ---------------------------------------------------------------- complex

/// Minimal complex pair usable with exact rationals as well as floats
/// (std::complex is only specified for the built-in floating types).
template <class T>
struct Complex {
    T re{};
    T im{};

    Complex() = default;
    Complex(const T& r) : re(r), im(0) {}  // NOLINT: implicit on purpose
    Complex(int r) : re(r), im(0) {}       // NOLINT
    Complex(const T& r, const T& i) : re(r), im(i) {}

    static Complex i() { return Complex(T(0), T(1)); }

    Complex& operator+=(const Complex& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Complex& operator-=(const Complex& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Complex& operator*=(const Complex& o) {
        T r = re * o.re - im * o.im;
        im = re * o.im + im * o.re;
        re = r;
        return *this;
    }
    Complex& operator/=(const Complex& o) {
        T d = o.re * o.re + o.im * o.im;
        if (d == 0) throw DomainError("complex division by zero");
        T r = (re * o.re + im * o.im) / d;
        im = (im * o.re - re * o.im) / d;
        re = r;
        return *this;
    }
    Complex& operator*=(const T& s) {
        re *= s;
        im *= s;
        return *this;
    }
    Complex& operator/=(const T& s) {
        re /= s;
        im /= s;
        return *this;
    }

    friend Complex operator+(Complex a, const Complex& b) { return a += b; }
    friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
    friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
    friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
    friend Complex operator*(Complex a, const T& s) { return a *= s; }
    friend Complex operator*(const T& s, Complex a) { return a *= s; }
    friend Complex operator/(Complex a, const T& s) { return a /= s; }
    friend Complex operator-(const Complex& a) { return Complex(T(-a.re), T(-a.im)); }
    friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }
};

template <class T>
Complex<T> conj(const Complex<T>& z) {
    return Complex<T>(z.re, T(-z.im));
}

/// |z|^2, exact for rationals.
template <class T>
T norm(const Complex<T>& z) {
    return z.re * z.re + z.im * z.im;
}

template <class T>
T abs(const Complex<T>& z) {
    static_assert(!is_exact_v<T>, "complex modulus needs a floating type");
    using std::hypot;
    using boost::multiprecision::hypot;
    return hypot(z.re, z.im);
}

/// Magnitude usable for tolerance tests in both modes (sum of |re|,|im|
/// for exact types, modulus otherwise).
template <class T>
T magnitude(const Complex<T>& z) {
    if constexpr (is_exact_v<T>)
        return abs_value(z.re) + abs_value(z.im);
    else
        return abs(z);
}
template <class T>
T magnitude(const T& x) {
    return abs_value(x);
}

template <class T>
bool is_finite_value(const Complex<T>& z) {
    return is_finite_value(z.re) && is_finite_value(z.im);
}

template <class T>
const Complex<T>& checked(const Complex<T>& z, const char* what) {
    checked(z.re, what);
    checked(z.im, what);
    return z;
}

/// i^k for integer k (exact).
template <class T>
Complex<T> i_pow(long long k) {
    long long r = ((k % 4) + 4) % 4;
    switch (r) {
        case 0: return Complex<T>(T(1), T(0));
        case 1: return Complex<T>(T(0), T(1));
        case 2: return Complex<T>(T(-1), T(0));
        default: return Complex<T>(T(0), T(-1));
    }
}

template <class T>
Complex<T> cpow(const Complex<T>& z, unsigned long long k) {
    Complex<T> r(T(1));
    Complex<T> b = z;
    while (k) {
        if (k & 1u) r *= b;
        k >>= 1u;
        if (k) b *= b;
    }
    return r;
}

template <class To, class From>
Complex<To> convert(const Complex<From>& z) {
    return Complex<To>(convert<To>(z.re), convert<To>(z.im));
}

}  // namespace qhosc
