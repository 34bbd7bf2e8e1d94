#ifndef MASING_TESTS_SUPPORT_HPP
#define MASING_TESTS_SUPPORT_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <tuple>

#include <masing/scalar.hpp>
#include <masing/series.hpp>

namespace masing::testing
{

inline Rational q(const std::string &s)
{
    return parse_rational(s);
}

inline Rational q(long n, long d = 1)
{
    return Rational(n) / Rational(d);
}

/// Series2 from (i, j, coefficient) triples.
template <Scalar T = Rational>
Series2<T> poly(int order, std::initializer_list<std::tuple<int, int, T>> terms)
{
    Series2<T> s(order);
    for (const auto &[i, j, c] : terms) {
        s.at(i, j) += c;
    }
    return s;
}

template <Scalar T = Rational>
Series1<T> poly1(int order, std::initializer_list<std::pair<int, T>> terms)
{
    Series1<T> s(order);
    for (const auto &[k, c] : terms) {
        s.at(k) += c;
    }
    return s;
}

/// Small random rationals num/den with |num| <= 9, 1 <= den <= 6; zero with probability 1/8.
class RationalGen
{
public:
    explicit RationalGen(std::uint64_t seed) : m_rng(seed) {}

    Rational next()
    {
        if (m_rng() % 8 == 0) {
            return Rational(0);
        }
        const long num = static_cast<long>(m_rng() % 19) - 9;
        const long den = static_cast<long>(m_rng() % 6) + 1;
        return Rational(num) / Rational(den);
    }

    Rational nonzero()
    {
        Rational r = next();
        while (r == 0) {
            r = next();
        }
        return r;
    }

    double uniform(double lo, double hi)
    {
        const double x = static_cast<double>(m_rng() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * x;
    }

    Series2<Rational> series2(int order)
    {
        Series2<Rational> s(order);
        for (int d = 0; d <= order; ++d) {
            for (int j = 0; j <= d; ++j) {
                s.at(d - j, j) = next();
            }
        }
        return s;
    }

    /// Series1 with zero constant term.
    Series1<Rational> germ(int order, int max_degree)
    {
        Series1<Rational> s(order);
        for (int k = 1; k <= std::min(order, max_degree); ++k) {
            s.at(k) = next();
        }
        return s;
    }

    std::mt19937_64 &engine()
    {
        return m_rng;
    }

private:
    std::mt19937_64 m_rng;
};

} // namespace masing::testing

#endif
