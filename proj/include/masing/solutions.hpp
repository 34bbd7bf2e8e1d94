#ifndef MASING_SOLUTIONS_HPP
#define MASING_SOLUTIONS_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

#include <masing/jet.hpp>
#include <masing/series.hpp>

namespace masing
{

// Initial data for the four constructors. All germs are based at the origin,
// so every supplied function must vanish at t = 0.
template <Scalar T>
struct Holomorphic {
    ComplexSeries1<T> h; // p + i y = h(u + i v)
};

template <Scalar T>
struct DAlembert {
    Series1<T> phi, psi; // y = phi(u+v) + psi(u-v), p = -phi(u+v) + psi(u-v)
};

template <Scalar T>
struct Cauchy {
    Series1<T> z0, z1; // Z(0, v), Z_u(0, v)
    T c;
};

template <Scalar T>
struct Developable {
    Series1<T> phi, psi; // p = phi(v), y = psi(v) - phi'(v) u
};

template <Scalar T>
using InitialData = std::variant<Holomorphic<T>, DAlembert<T>, Cauchy<T>, Developable<T>>;

namespace detail
{

template <Scalar T>
void require_vanishing(const Series1<T> &s, const char *what)
{
    if (s.coeff(0) != T(0)) {
        throw std::invalid_argument(std::string(what) + " must vanish at the origin (constant term 0)");
    }
}

template <Scalar T>
void require_contact(const LegendrianMapJet<T> &f, const char *who)
{
    const auto [du, dv] = contact_pullback(f);
    const T scale = std::max({T(1), f.z.max_abs(), f.p.max_abs(), f.y.max_abs()});
    if (!nearly_zero(du, scale) || !nearly_zero(dv, scale)) {
        throw std::logic_error(std::string(who) + ": constructed jet violates the contact condition");
    }
}

// Adapted chart x = u, q = v: dz = p du + v dy fixes z once y and p are known.
template <Scalar T>
LegendrianMapJet<T> adapted_from(const Series2<T> &y, const Series2<T> &p, int n)
{
    const auto yu = differentiate(y, Var::u);
    const auto yv = differentiate(y, Var::v);
    const auto z = path_integrate(Series2<T>(p.truncated(n)) + mul_var(yu, Var::v), mul_var(yv, Var::v));
    return {Series2<T>::variable(Var::u, n), y.truncated(n), z.truncated(n), p.truncated(n),
            Series2<T>::variable(Var::v, n), Chart::adapted};
}

} // namespace detail

/// Hess = 1 solution from a holomorphic germ h: p + i y = h(u + i v), x = u, q = v.
template <Scalar T>
LegendrianMapJet<T> build_hess_positive(const ComplexSeries1<T> &h, int n = default_order)
{
    detail::require_vanishing(h.re, "h (real part)");
    detail::require_vanishing(h.im, "h (imaginary part)");
    // Real and imaginary parts of w^k, w = u + i v.
    Series2<T> wr = Series2<T>::constant(T(1), n);
    Series2<T> wi(n);
    Series2<T> p(n), y(n);
    for (int k = 1; k <= n; ++k) {
        Series2<T> nr = (mul_var(wr, Var::u) - mul_var(wi, Var::v)).truncated(n);
        Series2<T> ni = (mul_var(wr, Var::v) + mul_var(wi, Var::u)).truncated(n);
        wr = std::move(nr);
        wi = std::move(ni);
        const T a = h.re.coeff(k);
        const T b = h.im.coeff(k);
        if (a != T(0)) {
            p += a * wr;
            y += a * wi;
        }
        if (b != T(0)) {
            p -= b * wi;
            y += b * wr;
        }
    }
    auto f = detail::adapted_from(y, p, n);
    detail::require_contact(f, "build_hess_positive");
    return f;
}

/// Hess = -1 solution from the d'Alembert data of the wave system p_v = -y_u, p_u = -y_v.
template <Scalar T>
LegendrianMapJet<T> build_hess_negative(const Series1<T> &phi, const Series1<T> &psi, int n = default_order)
{
    detail::require_vanishing(phi, "phi");
    detail::require_vanishing(psi, "psi");
    const auto u = Series2<T>::variable(Var::u, n);
    const auto v = Series2<T>::variable(Var::v, n);
    const auto fp = compose(phi.truncated(n), u + v);
    const auto fm = compose(psi.truncated(n), u - v);
    auto f = detail::adapted_from(Series2<T>(fp + fm), Series2<T>(fm - fp), n);
    detail::require_contact(f, "build_hess_negative");
    return f;
}

/// Formal solution of Z_uu + c (1 + Z_u^2 + v^2)^2 Z_vv = 0 with Z(0,v) = z0, Z_u(0,v) = z1.
/// Each pass reads the u^k row of the right-hand side, which involves only rows <= k + 1
/// of Z, and fixes row k + 2.
template <Scalar T>
Series2<T> solve_gauss_ck(const T &c, const Series1<T> &z0, const Series1<T> &z1, int n = default_order)
{
    if (c == T(0)) {
        throw std::invalid_argument("solve_gauss_ck requires c != 0 (use build_developable for K = 0)");
    }
    detail::require_vanishing(z0, "Z0");
    detail::require_vanishing(z1, "Z1");
    if (z0.coeff(1) != T(0)) {
        throw std::invalid_argument("Z0 must have zero linear term (Z_v(0,0) = 0)");
    }
    if (n < 2) {
        throw std::invalid_argument("solve_gauss_ck requires order >= 2");
    }
    Series2<T> zz(n);
    for (int j = 0; j <= n; ++j) {
        zz.at(0, j) = z0.coeff(j);
    }
    for (int j = 0; j + 1 <= n; ++j) {
        zz.at(1, j) = z1.coeff(j);
    }
    const auto v = Series2<T>::variable(Var::v, n);
    for (int k = 0; k + 2 <= n; ++k) {
        const auto zu = differentiate(zz, Var::u);
        const auto zvv = differentiate(differentiate(zz, Var::v), Var::v);
        const auto w = T(1) + zu * zu + v * v;
        const auto rhs = T(-c) * (w * w * zvv);
        const T denom = T((k + 2) * (k + 1));
        for (int j = 0; k + 2 + j <= n; ++j) {
            zz.at(k + 2, j) = rhs.coeff(k, j) / denom;
        }
    }
    return zz;
}

/// Residual of the reduced equation, order N - 2.
template <Scalar T>
Series2<T> gauss_ck_residual(const Series2<T> &zz, const T &c)
{
    const int n = zz.order();
    const auto zu = differentiate(zz, Var::u);
    const auto zvv = differentiate(differentiate(zz, Var::v), Var::v);
    const auto v = Series2<T>::variable(Var::v, n);
    const auto w = T(1) + zu * zu + v * v;
    return differentiate(zu, Var::u) + c * (w * w * zvv);
}

/// Undoes the partial Legendre reduction: (u, -Z_v, Z - v Z_v, Z_u, v), order N - 1.
template <Scalar T>
LegendrianMapJet<T> lift_gauss(const Series2<T> &zz, const T &c)
{
    (void)c;
    const int m = zz.order() - 1;
    const auto zv = differentiate(zz, Var::v);
    LegendrianMapJet<T> f{Series2<T>::variable(Var::u, m),
                          Series2<T>(-zv).truncated(m),
                          (zz - mul_var(zv, Var::v)).truncated(m),
                          differentiate(zz, Var::u).truncated(m),
                          Series2<T>::variable(Var::v, m),
                          Chart::adapted};
    detail::require_contact(f, "lift_gauss");
    return f;
}

/// Hess = 0 solution (u, psi(v) - phi'(v) u, z, phi(v), v) with p_u = 0 and p_v + y_u = 0.
template <Scalar T>
LegendrianMapJet<T> build_developable(const Series1<T> &phi, const Series1<T> &psi, int n = default_order)
{
    detail::require_vanishing(phi, "phi");
    detail::require_vanishing(psi, "psi");
    Series2<T> y(n), p(n);
    for (int j = 0; j <= n; ++j) {
        p.at(0, j) = phi.coeff(j);
        y.at(0, j) = psi.coeff(j);
    }
    for (int j = 0; j + 1 <= n; ++j) {
        y.at(1, j) = -T(j + 1) * phi.coeff(j + 1);
    }
    auto f = detail::adapted_from(y, p, n);
    detail::require_contact(f, "build_developable");
    return f;
}

/// L(x, y, z, p, q) = (x, q, z - y q, p, -y).
template <Scalar T>
LegendrianMapJet<T> partial_legendre(const LegendrianMapJet<T> &f)
{
    return {f.x, f.q, f.z - f.y * f.q, f.p, -f.y, Chart::general};
}

/// L^{-1}(x, y, z, p, q) = (x, -q, z - y q, p, y).
template <Scalar T>
LegendrianMapJet<T> partial_legendre_inverse(const LegendrianMapJet<T> &f)
{
    return {f.x, -f.q, f.z - f.y * f.q, f.p, f.y, Chart::general};
}

/// (u, v^2, u v^3, v^3, 3/2 u v): integral but not immersive at the origin.
template <Scalar T>
LegendrianMapJet<T> open_umbrella(int n = default_order)
{
    using S = Series2<T>;
    return {S::variable(Var::u, n), S::monomial(0, 2, T(1), n), S::monomial(1, 3, T(1), n), S::monomial(0, 3, T(1), n),
            S::monomial(1, 1, T(3) / T(2), n), Chart::general};
}

template <Scalar T>
LegendrianMapJet<T> build(const InitialData<T> &data, int n = default_order)
{
    return std::visit(
        [n](const auto &d) -> LegendrianMapJet<T> {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, Holomorphic<T>>) {
                return build_hess_positive(d.h, n);
            } else if constexpr (std::is_same_v<D, DAlembert<T>>) {
                return build_hess_negative(d.phi, d.psi, n);
            } else if constexpr (std::is_same_v<D, Cauchy<T>>) {
                return lift_gauss(solve_gauss_ck(d.c, d.z0, d.z1, n), d.c);
            } else {
                return build_developable(d.phi, d.psi, n);
            }
        },
        data);
}

/// The system each initial-data variant solves.
template <Scalar T>
MongeAmpereSystem<T> system_of(const InitialData<T> &data)
{
    return std::visit(
        [](const auto &d) -> MongeAmpereSystem<T> {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, Holomorphic<T>>) {
                return MongeAmpereSystem<T>::hess(T(1));
            } else if constexpr (std::is_same_v<D, DAlembert<T>>) {
                return MongeAmpereSystem<T>::hess(T(-1));
            } else if constexpr (std::is_same_v<D, Cauchy<T>>) {
                return MongeAmpereSystem<T>::gauss(d.c);
            } else {
                return MongeAmpereSystem<T>::hess(T(0));
            }
        },
        data);
}

inline const char *variant_name(std::size_t index)
{
    static const char *names[] = {"holomorphic", "dalembert", "cauchy", "developable"};
    return index < 4 ? names[index] : "?";
}

/// Series1 from a config value: either a plain coefficient list [c0, c1, ...] or the
/// wire object. The result has exactly the given order.
template <Scalar T>
Series1<T> series1_from_config(const json &j, int order)
{
    Series1<T> s(order);
    if (j.is_array()) {
        for (std::size_t k = 0; k < j.size() && static_cast<int>(k) <= order; ++k) {
            s.at(static_cast<int>(k)) = scalar_from_json<T>(j[k]);
        }
        return s;
    }
    const auto w = series1_from_json_any<T>(j);
    for (int k = 0; k <= std::min(order, w.order()); ++k) {
        s.at(k) = w.coeff(k);
    }
    return s;
}

template <Scalar T>
json to_json(const InitialData<T> &data)
{
    json j{{"variant", variant_name(data.index())}};
    std::visit(
        [&](const auto &d) {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, Holomorphic<T>>) {
                j["series"] = json{{"re", to_json(d.h.re)}, {"im", to_json(d.h.im)}};
            } else if constexpr (std::is_same_v<D, Cauchy<T>>) {
                j["c"] = scalar_to_json(d.c);
                j["series"] = json{{"z0", to_json(d.z0)}, {"z1", to_json(d.z1)}};
            } else {
                j["series"] = json{{"phi", to_json(d.phi)}, {"psi", to_json(d.psi)}};
            }
        },
        data);
    return j;
}

/// {"variant": ..., "c": ..., "series": {...}}; absent series default to zero.
template <Scalar T>
InitialData<T> initial_data_from_json(const json &j, int order)
{
    const auto variant = j.at("variant").get<std::string>();
    const json series = j.value("series", json::object());
    auto get = [&](const char *key) {
        return series.contains(key) ? series1_from_config<T>(series.at(key), order) : Series1<T>(order);
    };
    if (variant == "holomorphic") {
        return Holomorphic<T>{ComplexSeries1<T>{get("re"), get("im")}};
    }
    if (variant == "dalembert") {
        return DAlembert<T>{get("phi"), get("psi")};
    }
    if (variant == "cauchy") {
        if (!j.contains("c")) {
            throw std::invalid_argument("cauchy initial data requires the field 'c'");
        }
        return Cauchy<T>{get("z0"), get("z1"), scalar_from_json<T>(j.at("c"))};
    }
    if (variant == "developable") {
        return Developable<T>{get("phi"), get("psi")};
    }
    throw std::invalid_argument("unknown initial data variant '" + variant
                                + "' (expected holomorphic|dalembert|cauchy|developable)");
}

template <Scalar U, Scalar T>
InitialData<U> initial_data_cast(const InitialData<T> &data)
{
    return std::visit(
        [](const auto &d) -> InitialData<U> {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, Holomorphic<T>>) {
                return Holomorphic<U>{ComplexSeries1<U>{series_cast<U>(d.h.re), series_cast<U>(d.h.im)}};
            } else if constexpr (std::is_same_v<D, DAlembert<T>>) {
                return DAlembert<U>{series_cast<U>(d.phi), series_cast<U>(d.psi)};
            } else if constexpr (std::is_same_v<D, Cauchy<T>>) {
                return Cauchy<U>{series_cast<U>(d.z0), series_cast<U>(d.z1), scalar_cast<U>(d.c)};
            } else {
                return Developable<U>{series_cast<U>(d.phi), series_cast<U>(d.psi)};
            }
        },
        data);
}

struct SphereChart {
    Series2<double> x1, x2, x3, y1, y2, y3;
};

/// Back to R^3 x S^2: x1 = z, x2 = x, x3 = y, y1 = (1 + p^2 + q^2)^{-1/2} > 0,
/// y2 = -p y1, y3 = -q y1.
inline SphereChart gauss_chart_to_sphere(const LegendrianMapJet<double> &f)
{
    const int n = f.order();
    const auto g = f.truncated(n);
    const auto s = g.p * g.p + g.q * g.q;
    const double s0 = s.constant_term();
    const auto y1 = pow_series(1.0 + s0, s - s0, -0.5);
    return {g.z, g.x, g.y, y1, -(g.p * y1), -(g.q * y1)};
}

/// y1^2 + y2^2 + y3^2 - 1.
inline Series2<double> sphere_normalization_residual(const SphereChart &s)
{
    return s.y1 * s.y1 + s.y2 * s.y2 + s.y3 * s.y3 - 1.0;
}

/// du and dv components of y1 dx1 + y2 dx2 + y3 dx3.
inline std::pair<Series2<double>, Series2<double>> sphere_contact_pullback(const SphereChart &s)
{
    auto comp = [&](Var var) {
        return s.y1 * differentiate(s.x1, var) + s.y2 * differentiate(s.x2, var) + s.y3 * differentiate(s.x3, var);
    };
    return {comp(Var::u), comp(Var::v)};
}

} // namespace masing

#endif
