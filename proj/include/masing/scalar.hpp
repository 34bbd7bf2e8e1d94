#ifndef MASING_SCALAR_HPP
#define MASING_SCALAR_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

namespace masing
{

// Expression templates are disabled so that generic code can use `auto`
// on arithmetic results without dangling references.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                              boost::multiprecision::et_off>;

enum class Backend { rational, floating };

template <typename T>
struct scalar_traits;

template <>
struct scalar_traits<Rational> {
    static constexpr Backend backend = Backend::rational;
    static constexpr bool exact = true;
    static constexpr const char *name = "rational";
};

template <>
struct scalar_traits<double> {
    static constexpr Backend backend = Backend::floating;
    static constexpr bool exact = false;
    static constexpr const char *name = "float";
};

template <typename T>
concept Scalar = requires { scalar_traits<T>::exact; };

template <typename T>
inline constexpr bool is_exact_v = scalar_traits<T>::exact;

inline const char *backend_name(Backend b)
{
    return b == Backend::rational ? "rational" : "float";
}

inline Backend parse_backend(std::string_view s)
{
    if (s == "rational") {
        return Backend::rational;
    }
    if (s == "float") {
        return Backend::floating;
    }
    throw std::invalid_argument("unknown backend '" + std::string(s) + "' (expected rational|float)");
}

template <Scalar T>
T abs_value(const T &x)
{
    return x < T(0) ? T(-x) : x;
}

inline double to_double(const Rational &x)
{
    return x.convert_to<double>();
}

inline double to_double(double x)
{
    return x;
}

// Exact conversion: every finite double is a dyadic rational.
inline Rational rational_from_double(double x)
{
    if (!std::isfinite(x)) {
        throw std::invalid_argument("non-finite value cannot be converted to a rational");
    }
    int exp = 0;
    double mant = std::frexp(x, &exp);
    // mant * 2^53 is an integer
    auto m = static_cast<std::int64_t>(std::ldexp(mant, 53));
    exp -= 53;
    Rational r(m);
    if (exp > 0) {
        r *= Rational(Integer(1) << exp);
    } else if (exp < 0) {
        r /= Rational(Integer(1) << -exp);
    }
    return r;
}

template <Scalar T>
T scalar_cast(const Rational &x)
{
    if constexpr (std::is_same_v<T, Rational>) {
        return x;
    } else {
        return to_double(x);
    }
}

template <Scalar T>
T scalar_cast(double x)
{
    if constexpr (std::is_same_v<T, Rational>) {
        return rational_from_double(x);
    } else {
        return x;
    }
}

namespace detail
{

// Decimal integer with optional sign; cpp_int would read a leading 0 as octal.
inline Integer parse_integer(std::string s)
{
    bool negative = false;
    if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
        negative = s[0] == '-';
        s.erase(0, 1);
    }
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
        throw std::invalid_argument("malformed integer '" + s + "'");
    }
    s.erase(0, std::min(s.find_first_not_of('0'), s.size() - 1));
    Integer z(s);
    return negative ? Integer(-z) : z;
}

} // namespace detail

/// Parses "n", "n/d" or a decimal literal ("0.25", "-1e-3") as an exact rational.
inline Rational parse_rational(std::string_view text)
{
    std::string s(text);
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            Integer num = detail::parse_integer(s.substr(0, slash));
            Integer den = detail::parse_integer(s.substr(slash + 1));
            if (den == 0) {
                throw std::invalid_argument("zero denominator in '" + s + "'");
            }
            return Rational(num, den);
        }
        if (s.find_first_of(".eE") == std::string::npos) {
            return Rational(detail::parse_integer(s));
        }
    } catch (const std::runtime_error &) {
        throw std::invalid_argument("malformed rational '" + s + "'");
    }
    // Decimal literal: mantissa digits over a power of ten.
    std::string mant = s;
    long exp10 = 0;
    auto e = s.find_first_of("eE");
    if (e != std::string::npos) {
        mant = s.substr(0, e);
        try {
            exp10 = std::stol(s.substr(e + 1));
        } catch (const std::exception &) {
            throw std::invalid_argument("malformed rational '" + s + "'");
        }
    }
    auto dot = mant.find('.');
    if (dot != std::string::npos) {
        exp10 -= static_cast<long>(mant.size() - dot - 1);
        mant.erase(dot, 1);
    }
    Rational r;
    try {
        r = Rational(detail::parse_integer(mant));
    } catch (const std::exception &) {
        throw std::invalid_argument("malformed rational '" + s + "'");
    }
    Integer p10 = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(exp10 < 0 ? -exp10 : exp10));
    return exp10 < 0 ? Rational(r / Rational(p10)) : Rational(r * Rational(p10));
}

inline std::string format_rational(const Rational &x)
{
    auto num = boost::multiprecision::numerator(x);
    auto den = boost::multiprecision::denominator(x);
    if (den == 1) {
        return num.str();
    }
    return num.str() + "/" + den.str();
}

/// Round-trip decimal rendering of a double.
inline std::string format_double(double x)
{
    std::ostringstream os;
    os.precision(std::numeric_limits<double>::max_digits10);
    os << x;
    return os.str();
}

/// Exact square root of a rational when it exists.
inline bool exact_sqrt(const Rational &x, Rational &out)
{
    if (x < 0) {
        return false;
    }
    auto num = boost::multiprecision::numerator(x);
    auto den = boost::multiprecision::denominator(x);
    Integer rn = boost::multiprecision::sqrt(num);
    Integer rd = boost::multiprecision::sqrt(den);
    if (rn * rn != num || rd * rd != den) {
        return false;
    }
    out = Rational(rn, rd);
    return true;
}

inline bool exact_sqrt(double x, double &out)
{
    if (x < 0) {
        return false;
    }
    out = std::sqrt(x);
    return true;
}

} // namespace masing

#endif
