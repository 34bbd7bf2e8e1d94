#ifndef MASING_SERIES_HPP
#define MASING_SERIES_HPP

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <masing/scalar.hpp>

namespace masing
{

inline constexpr int default_order = 8;

enum class Var { u, v };

class backend_mismatch : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

class closedness_error : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

// Truncated power series in one variable t, coefficients c_0 .. c_N.
template <Scalar T>
class Series1
{
public:
    Series1() : Series1(0) {}
    explicit Series1(int order) : m_coeffs(checked_size(order), T(0)) {}
    explicit Series1(std::vector<T> coeffs) : m_coeffs(std::move(coeffs))
    {
        if (m_coeffs.empty()) {
            m_coeffs.emplace_back(0);
        }
    }

    int order() const
    {
        return static_cast<int>(m_coeffs.size()) - 1;
    }
    // Zero beyond the truncation order.
    T coeff(int k) const
    {
        return k >= 0 && k <= order() ? m_coeffs[static_cast<std::size_t>(k)] : T(0);
    }
    T &at(int k)
    {
        if (k < 0 || k > order()) {
            throw std::out_of_range("Series1 index " + std::to_string(k) + " outside order "
                                    + std::to_string(order()));
        }
        return m_coeffs[static_cast<std::size_t>(k)];
    }
    const std::vector<T> &coeffs() const
    {
        return m_coeffs;
    }

    static Series1 variable(int order)
    {
        Series1 s(order);
        if (order >= 1) {
            s.m_coeffs[1] = T(1);
        }
        return s;
    }

    Series1 truncated(int order) const
    {
        Series1 r(order);
        for (int k = 0; k <= std::min(order, this->order()); ++k) {
            r.m_coeffs[static_cast<std::size_t>(k)] = m_coeffs[static_cast<std::size_t>(k)];
        }
        return r;
    }

    Series1 derivative() const
    {
        if (order() < 1) {
            throw std::domain_error("cannot differentiate an order-0 series");
        }
        Series1 r(order() - 1);
        for (int k = 1; k <= order(); ++k) {
            r.m_coeffs[static_cast<std::size_t>(k - 1)] = T(k) * m_coeffs[static_cast<std::size_t>(k)];
        }
        return r;
    }

    T evaluate(const T &t) const
    {
        T acc(0);
        for (int k = order(); k >= 0; --k) {
            acc = acc * t + m_coeffs[static_cast<std::size_t>(k)];
        }
        return acc;
    }

    bool is_zero() const
    {
        return std::all_of(m_coeffs.begin(), m_coeffs.end(), [](const T &c) { return c == T(0); });
    }

    friend Series1 operator+(const Series1 &a, const Series1 &b)
    {
        Series1 r(std::min(a.order(), b.order()));
        for (int k = 0; k <= r.order(); ++k) {
            r.m_coeffs[static_cast<std::size_t>(k)] = a.coeff(k) + b.coeff(k);
        }
        return r;
    }
    friend Series1 operator-(const Series1 &a, const Series1 &b)
    {
        Series1 r(std::min(a.order(), b.order()));
        for (int k = 0; k <= r.order(); ++k) {
            r.m_coeffs[static_cast<std::size_t>(k)] = a.coeff(k) - b.coeff(k);
        }
        return r;
    }
    friend Series1 operator-(const Series1 &a)
    {
        Series1 r(a.order());
        for (int k = 0; k <= r.order(); ++k) {
            r.m_coeffs[static_cast<std::size_t>(k)] = -a.coeff(k);
        }
        return r;
    }
    friend Series1 operator*(const Series1 &a, const Series1 &b)
    {
        Series1 r(std::min(a.order(), b.order()));
        for (int i = 0; i <= r.order(); ++i) {
            if (a.coeff(i) == T(0)) {
                continue;
            }
            for (int j = 0; i + j <= r.order(); ++j) {
                r.m_coeffs[static_cast<std::size_t>(i + j)] += a.coeff(i) * b.coeff(j);
            }
        }
        return r;
    }
    friend Series1 operator*(const T &s, const Series1 &a)
    {
        Series1 r(a.order());
        for (int k = 0; k <= r.order(); ++k) {
            r.m_coeffs[static_cast<std::size_t>(k)] = s * a.coeff(k);
        }
        return r;
    }

    friend bool operator==(const Series1 &a, const Series1 &b) = default;

private:
    static std::size_t checked_size(int order)
    {
        if (order < 0) {
            throw std::invalid_argument("negative truncation order");
        }
        return static_cast<std::size_t>(order) + 1;
    }

    std::vector<T> m_coeffs;
};

template <Scalar T>
struct ComplexSeries1 {
    Series1<T> re;
    Series1<T> im;

    int order() const
    {
        return std::min(re.order(), im.order());
    }
};

// Truncated bivariate Taylor polynomial; only c_{ij} with i + j <= N are stored,
// in degree-major order.
template <Scalar T>
class Series2
{
public:
    Series2() : Series2(0) {}
    explicit Series2(int order) : m_order(order)
    {
        if (order < 0) {
            throw std::invalid_argument("negative truncation order");
        }
        m_coeffs.assign(storage_size(order), T(0));
    }

    static std::size_t storage_size(int order)
    {
        auto n = static_cast<std::size_t>(order) + 1;
        return n * (n + 1) / 2;
    }
    static std::size_t index(int i, int j)
    {
        auto d = static_cast<std::size_t>(i + j);
        return d * (d + 1) / 2 + static_cast<std::size_t>(j);
    }

    int order() const
    {
        return m_order;
    }
    T coeff(int i, int j) const
    {
        if (i < 0 || j < 0 || i + j > m_order) {
            return T(0);
        }
        return m_coeffs[index(i, j)];
    }
    T &at(int i, int j)
    {
        if (i < 0 || j < 0 || i + j > m_order) {
            throw std::out_of_range("Series2 index (" + std::to_string(i) + "," + std::to_string(j)
                                    + ") outside order " + std::to_string(m_order));
        }
        return m_coeffs[index(i, j)];
    }
    const std::vector<T> &raw() const
    {
        return m_coeffs;
    }

    static Series2 constant(const T &c, int order)
    {
        Series2 s(order);
        s.m_coeffs[0] = c;
        return s;
    }
    static Series2 variable(Var var, int order)
    {
        Series2 s(order);
        if (order >= 1) {
            s.at(var == Var::u ? 1 : 0, var == Var::u ? 0 : 1) = T(1);
        }
        return s;
    }
    static Series2 monomial(int i, int j, const T &c, int order)
    {
        Series2 s(order);
        if (i + j <= order) {
            s.at(i, j) = c;
        }
        return s;
    }
    // Series1 g(t) read as a function of u or of v alone.
    static Series2 from_series1(const Series1<T> &g, Var var)
    {
        Series2 s(g.order());
        for (int k = 0; k <= g.order(); ++k) {
            s.at(var == Var::u ? k : 0, var == Var::u ? 0 : k) = g.coeff(k);
        }
        return s;
    }

    Series2 truncated(int order) const
    {
        Series2 r(order);
        for (int d = 0; d <= std::min(order, m_order); ++d) {
            for (int j = 0; j <= d; ++j) {
                r.m_coeffs[index(d - j, j)] = m_coeffs[index(d - j, j)];
            }
        }
        return r;
    }

    T constant_term() const
    {
        return m_coeffs[0];
    }

    bool is_zero() const
    {
        return std::all_of(m_coeffs.begin(), m_coeffs.end(), [](const T &c) { return c == T(0); });
    }

    T max_abs() const
    {
        T m(0);
        for (const auto &c : m_coeffs) {
            m = std::max(m, abs_value(c));
        }
        return m;
    }

    template <typename F>
    void for_each_nonzero(F &&f) const
    {
        for (int d = 0; d <= m_order; ++d) {
            for (int j = 0; j <= d; ++j) {
                const auto &c = m_coeffs[index(d - j, j)];
                if (c != T(0)) {
                    f(d - j, j, c);
                }
            }
        }
    }

    friend Series2 operator+(const Series2 &a, const Series2 &b)
    {
        Series2 r(std::min(a.m_order, b.m_order));
        for (std::size_t k = 0; k < r.m_coeffs.size(); ++k) {
            r.m_coeffs[k] = a.m_coeffs[k] + b.m_coeffs[k];
        }
        return r;
    }
    friend Series2 operator-(const Series2 &a, const Series2 &b)
    {
        Series2 r(std::min(a.m_order, b.m_order));
        for (std::size_t k = 0; k < r.m_coeffs.size(); ++k) {
            r.m_coeffs[k] = a.m_coeffs[k] - b.m_coeffs[k];
        }
        return r;
    }
    friend Series2 operator-(const Series2 &a)
    {
        Series2 r(a.m_order);
        for (std::size_t k = 0; k < r.m_coeffs.size(); ++k) {
            r.m_coeffs[k] = -a.m_coeffs[k];
        }
        return r;
    }
    friend Series2 operator*(const Series2 &a, const Series2 &b)
    {
        const int n = std::min(a.m_order, b.m_order);
        Series2 r(n);
        for (int da = 0; da <= n; ++da) {
            for (int ja = 0; ja <= da; ++ja) {
                const T &ca = a.m_coeffs[index(da - ja, ja)];
                if (ca == T(0)) {
                    continue;
                }
                for (int db = 0; da + db <= n; ++db) {
                    for (int jb = 0; jb <= db; ++jb) {
                        const T &cb = b.m_coeffs[index(db - jb, jb)];
                        if (cb != T(0)) {
                            r.m_coeffs[index(da - ja + db - jb, ja + jb)] += ca * cb;
                        }
                    }
                }
            }
        }
        return r;
    }
    friend Series2 operator*(const T &s, const Series2 &a)
    {
        Series2 r(a.m_order);
        for (std::size_t k = 0; k < r.m_coeffs.size(); ++k) {
            r.m_coeffs[k] = s * a.m_coeffs[k];
        }
        return r;
    }
    friend Series2 operator+(const Series2 &a, const T &s)
    {
        Series2 r = a;
        r.m_coeffs[0] += s;
        return r;
    }
    friend Series2 operator+(const T &s, const Series2 &a)
    {
        return a + s;
    }
    friend Series2 operator-(const Series2 &a, const T &s)
    {
        Series2 r = a;
        r.m_coeffs[0] -= s;
        return r;
    }

    Series2 &operator+=(const Series2 &b)
    {
        return *this = *this + b;
    }
    Series2 &operator-=(const Series2 &b)
    {
        return *this = *this - b;
    }

    friend bool operator==(const Series2 &a, const Series2 &b) = default;

private:
    int m_order;
    std::vector<T> m_coeffs;
};

template <Scalar U, Scalar T>
Series2<U> series_cast(const Series2<T> &a)
{
    Series2<U> r(a.order());
    a.for_each_nonzero([&](int i, int j, const T &c) {
        if constexpr (std::is_same_v<U, T>) {
            r.at(i, j) = c;
        } else {
            r.at(i, j) = scalar_cast<U>(c);
        }
    });
    return r;
}

template <Scalar U, Scalar T>
Series1<U> series_cast(const Series1<T> &a)
{
    std::vector<U> c;
    for (const auto &x : a.coeffs()) {
        if constexpr (std::is_same_v<U, T>) {
            c.push_back(x);
        } else {
            c.push_back(scalar_cast<U>(x));
        }
    }
    return Series1<U>(std::move(c));
}

/// Partial derivative; the result has order N - 1.
template <Scalar T>
Series2<T> differentiate(const Series2<T> &a, Var var)
{
    if (a.order() < 1) {
        throw std::domain_error("cannot differentiate an order-0 series");
    }
    Series2<T> r(a.order() - 1);
    for (int d = 0; d < a.order(); ++d) {
        for (int j = 0; j <= d; ++j) {
            const int i = d - j;
            r.at(i, j) = var == Var::u ? T(i + 1) * a.coeff(i + 1, j) : T(j + 1) * a.coeff(i, j + 1);
        }
    }
    return r;
}

/// Multiplication by u or v. Unlike a generic product this raises the order by one,
/// since every stored coefficient of the result is exact.
template <Scalar T>
Series2<T> mul_var(const Series2<T> &a, Var var)
{
    Series2<T> r(a.order() + 1);
    a.for_each_nonzero([&](int i, int j, const T &c) { r.at(var == Var::u ? i + 1 : i, var == Var::u ? j : j + 1) = c; });
    return r;
}

/// Antiderivative vanishing on {var = 0}; order N + 1.
template <Scalar T>
Series2<T> integrate(const Series2<T> &a, Var var)
{
    Series2<T> r(a.order() + 1);
    a.for_each_nonzero([&](int i, int j, const T &c) {
        if (var == Var::u) {
            r.at(i + 1, j) = c / T(i + 1);
        } else {
            r.at(i, j + 1) = c / T(j + 1);
        }
    });
    return r;
}

/// Bivariate Horner evaluation, v-major: sum_j v^j (sum_i c_ij u^i).
template <Scalar T>
T evaluate(const Series2<T> &a, const T &u, const T &v)
{
    const int n = a.order();
    T acc(0);
    for (int j = n; j >= 0; --j) {
        T row(0);
        for (int i = n - j; i >= 0; --i) {
            row = row * u + a.coeff(i, j);
        }
        acc = acc * v + row;
    }
    return acc;
}

namespace detail
{

inline std::vector<std::vector<Integer>> binomials(int n)
{
    std::vector<std::vector<Integer>> b(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        b[k].assign(static_cast<std::size_t>(k) + 1, Integer(1));
        for (int m = 1; m < k; ++m) {
            b[k][m] = b[k - 1][m - 1] + b[k - 1][m];
        }
    }
    return b;
}

template <Scalar T>
T integer_to(const Integer &z)
{
    if constexpr (std::is_same_v<T, Rational>) {
        return Rational(z);
    } else {
        return z.template convert_to<double>();
    }
}

template <Scalar T>
std::vector<T> powers(const T &x, int n)
{
    std::vector<T> p(static_cast<std::size_t>(n) + 1, T(1));
    for (int k = 1; k <= n; ++k) {
        p[k] = p[k - 1] * x;
    }
    return p;
}

} // namespace detail

/// Taylor recentering: returns a(u + u0, v + v0), order preserved.
template <Scalar T>
Series2<T> compose_shift(const Series2<T> &a, const T &u0, const T &v0)
{
    const int n = a.order();
    const auto binom = detail::binomials(n);
    const auto pu = detail::powers(u0, n);
    const auto pv = detail::powers(v0, n);
    Series2<T> r(n);
    a.for_each_nonzero([&](int i, int j, const T &c) {
        for (int k = 0; k <= i; ++k) {
            const T ck = c * detail::integer_to<T>(binom[i][k]) * pu[i - k];
            for (int l = 0; l <= j; ++l) {
                r.at(k, l) += ck * detail::integer_to<T>(binom[j][l]) * pv[j - l];
            }
        }
    });
    return r;
}

template <Scalar T>
bool nearly_zero(const Series2<T> &a, const T &scale)
{
    if constexpr (is_exact_v<T>) {
        (void)scale;
        return a.is_zero();
    } else {
        return a.max_abs() <= 1e-9 * std::max(T(1), scale);
    }
}

/// Reconstructs Z with Z(0,0) = 0, Z_u = P, Z_v = Q from a closed 1-form P du + Q dv,
/// integrating along (0,0) -> (u,0) -> (u,v). Result order is min(order P, order Q) + 1.
template <Scalar T>
Series2<T> path_integrate(const Series2<T> &p, const Series2<T> &q)
{
    const int n = std::min(p.order(), q.order());
    const Series2<T> pn = p.truncated(n);
    const Series2<T> qn = q.truncated(n);
    if (n >= 1) {
        const auto defect = differentiate(pn, Var::v) - differentiate(qn, Var::u);
        if (!nearly_zero(defect, std::max(pn.max_abs(), qn.max_abs()))) {
            throw closedness_error("path_integrate: P dv-derivative and Q du-derivative disagree; "
                                   "the 1-form is not closed");
        }
    }
    // Z(u,0) = int_0^u P(s,0) ds, then add int_0^v Q(u,t) dt.
    Series2<T> p_axis(n);
    for (int i = 0; i <= n; ++i) {
        p_axis.at(i, 0) = pn.coeff(i, 0);
    }
    return integrate(p_axis, Var::u) + integrate(qn, Var::v);
}

/// g(s) for a Series1 g and a Series2 s without constant term (Horner in s).
template <Scalar T>
Series2<T> compose(const Series1<T> &g, const Series2<T> &s)
{
    if (s.constant_term() != T(0)) {
        throw std::invalid_argument("compose: inner series must vanish at the origin");
    }
    const int n = std::min(g.order(), s.order());
    Series2<T> acc(n);
    const Series2<T> sn = s.truncated(n);
    for (int k = g.order(); k >= 0; --k) {
        acc = acc * sn + g.coeff(k);
    }
    return acc;
}

/// a(U(u,v), V(u,v)) for inner series without constant terms.
template <Scalar T>
Series2<T> compose(const Series2<T> &a, const Series2<T> &uu, const Series2<T> &vv)
{
    if (uu.constant_term() != T(0) || vv.constant_term() != T(0)) {
        throw std::invalid_argument("compose: inner series must vanish at the origin");
    }
    const int n = std::min({a.order(), uu.order(), vv.order()});
    std::vector<Series2<T>> upow{Series2<T>::constant(T(1), n)};
    std::vector<Series2<T>> vpow{Series2<T>::constant(T(1), n)};
    for (int k = 1; k <= n; ++k) {
        upow.push_back(upow.back() * uu.truncated(n));
        vpow.push_back(vpow.back() * vv.truncated(n));
    }
    Series2<T> r(n);
    a.truncated(n).for_each_nonzero([&](int i, int j, const T &c) { r += c * (upow[i] * vpow[j]); });
    return r;
}

/// (base + s)^alpha for a series s without constant term and base > 0, by the binomial series.
inline Series2<double> pow_series(double base, const Series2<double> &s, double alpha)
{
    if (s.constant_term() != 0.0) {
        throw std::invalid_argument("pow_series: perturbation must vanish at the origin");
    }
    const int n = s.order();
    Series1<double> g(n);
    double binom = 1.0;
    for (int k = 0; k <= n; ++k) {
        g.at(k) = binom * std::pow(base, alpha - k);
        binom *= (alpha - k) / (k + 1);
    }
    return compose(g, s);
}

} // namespace masing

#endif
