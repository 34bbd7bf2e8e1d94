#ifndef MASING_JET_HPP
#define MASING_JET_HPP

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include <masing/series.hpp>
#include <masing/series_json.hpp>

namespace masing
{

enum class Chart { adapted, general };

inline const char *chart_name(Chart c)
{
    return c == Chart::adapted ? "adapted" : "general";
}

/// Germ of an integral map (u, v) -> (x, y, z, p, q) in the contact space with
/// theta = dz - p dx - q dy. In the adapted chart x = u and q = v exactly.
template <Scalar T>
struct LegendrianMapJet {
    Series2<T> x, y, z, p, q;
    Chart chart = Chart::general;

    int order() const
    {
        return std::min({x.order(), y.order(), z.order(), p.order(), q.order()});
    }

    LegendrianMapJet truncated(int n) const
    {
        return {x.truncated(n), y.truncated(n), z.truncated(n), p.truncated(n), q.truncated(n), chart};
    }

    friend bool operator==(const LegendrianMapJet &, const LegendrianMapJet &) = default;
};

enum class Family { hess, gauss };

inline const char *family_name(Family f)
{
    return f == Family::hess ? "hess" : "gauss";
}

/// Hess = c:  omega = c dx^dy - dp^dq.
/// K = c (chart on R^3 x S^2):  omega = c (1 + p^2 + q^2)^2 dx^dy - dp^dq.
template <Scalar T>
struct MongeAmpereSystem {
    Family family = Family::hess;
    T c = T(1);

    static MongeAmpereSystem hess(const T &c)
    {
        return {Family::hess, c};
    }
    static MongeAmpereSystem gauss(const T &c)
    {
        return {Family::gauss, c};
    }
};

/// du^dv coefficient of the pullback of da^db.
template <Scalar T>
Series2<T> wedge_pullback(const Series2<T> &a, const Series2<T> &b)
{
    return differentiate(a, Var::u) * differentiate(b, Var::v) - differentiate(a, Var::v) * differentiate(b, Var::u);
}

/// Components (du, dv) of f*theta, each of order N - 1.
template <Scalar T>
std::pair<Series2<T>, Series2<T>> contact_pullback(const LegendrianMapJet<T> &f)
{
    const int n = f.order();
    const auto g = f.truncated(n);
    const auto du = differentiate(g.z, Var::u) - g.p * differentiate(g.x, Var::u) - g.q * differentiate(g.y, Var::u);
    const auto dv = differentiate(g.z, Var::v) - g.p * differentiate(g.x, Var::v) - g.q * differentiate(g.y, Var::v);
    return {du, dv};
}

template <Scalar T>
json to_json(const LegendrianMapJet<T> &f)
{
    return json{{"chart", chart_name(f.chart)}, {"x", to_json(f.x)}, {"y", to_json(f.y)}, {"z", to_json(f.z)},
                {"p", to_json(f.p)}, {"q", to_json(f.q)}};
}

template <Scalar T>
LegendrianMapJet<T> jet_from_json(const json &j, bool strict_backend = true)
{
    auto read = [&](const char *k) {
        return strict_backend ? series2_from_json<T>(j.at(k)) : series2_from_json_any<T>(j.at(k));
    };
    LegendrianMapJet<T> f{read("x"), read("y"), read("z"), read("p"), read("q"), Chart::general};
    const auto chart = j.value("chart", std::string("general"));
    if (chart == "adapted") {
        f.chart = Chart::adapted;
    } else if (chart != "general") {
        throw std::invalid_argument("unknown chart tag '" + chart + "'");
    }
    return f;
}

template <Scalar U, Scalar T>
LegendrianMapJet<U> jet_cast(const LegendrianMapJet<T> &f)
{
    return {series_cast<U>(f.x), series_cast<U>(f.y), series_cast<U>(f.z), series_cast<U>(f.p), series_cast<U>(f.q),
            f.chart};
}

} // namespace masing

#endif
