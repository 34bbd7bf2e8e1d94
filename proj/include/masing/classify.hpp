#ifndef MASING_CLASSIFY_HPP
#define MASING_CLASSIFY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <masing/jet.hpp>
#include <masing/legendrian.hpp>
#include <masing/series.hpp>

namespace masing
{

enum class Leg { pi1, pi2 };

inline const char *leg_name(Leg l)
{
    return l == Leg::pi1 ? "pi1" : "pi2";
}

inline Leg parse_leg(std::string_view s)
{
    if (s == "pi1") {
        return Leg::pi1;
    }
    if (s == "pi2") {
        return Leg::pi2;
    }
    throw std::invalid_argument("unknown leg '" + std::string(s) + "' (expected pi1|pi2)");
}

enum class Verdict { immersion, cuspidal_edge, swallowtail, degenerate, unresolved };

inline const char *verdict_name(Verdict v)
{
    switch (v) {
        case Verdict::immersion:
            return "immersion";
        case Verdict::cuspidal_edge:
            return "cuspidal_edge";
        case Verdict::swallowtail:
            return "swallowtail";
        case Verdict::degenerate:
            return "degenerate";
        case Verdict::unresolved:
            return "unresolved";
    }
    return "?";
}

inline Verdict parse_verdict(std::string_view s)
{
    for (auto v : {Verdict::immersion, Verdict::cuspidal_edge, Verdict::swallowtail, Verdict::degenerate,
                   Verdict::unresolved}) {
        if (s == verdict_name(v)) {
            return v;
        }
    }
    throw std::invalid_argument("unknown verdict '" + std::string(s) + "'");
}

class locus_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

template <Scalar T>
using Point = std::array<T, 2>;

template <Scalar T>
struct SingularityReport {
    Point<T> point{};
    Leg leg = Leg::pi1;
    Verdict verdict = Verdict::unresolved;
    T delta{};
    Point<T> grad_delta{};
    T det{};            // det(gamma'(0), eta(0))
    T det_derivative{}; // d/dt det(gamma'(t), eta(t)) at 0
    Point<T> tangent{};
    Point<T> eta{};
};

template <Scalar T>
json to_json(const SingularityReport<T> &r)
{
    auto pt = [](const Point<T> &p) { return json::array({scalar_to_json(p[0]), scalar_to_json(p[1])}); };
    return json{{"point", pt(r.point)},
                {"leg", leg_name(r.leg)},
                {"verdict", verdict_name(r.verdict)},
                {"delta", scalar_to_json(r.delta)},
                {"grad_delta", pt(r.grad_delta)},
                {"det", scalar_to_json(r.det)},
                {"det_derivative", scalar_to_json(r.det_derivative)},
                {"tangent", pt(r.tangent)},
                {"eta", pt(r.eta)}};
}

/// Components of pi o f. The pi2 ordering (p, q, px + qy - z) is used for both
/// families; the Gauss chart only permutes the target coordinates.
template <Scalar T>
Projection<T> front_components(const LegendrianMapJet<T> &f, Leg leg)
{
    if (leg == Leg::pi1) {
        return project_pi1(f);
    }
    return project_pi2(f, MongeAmpereSystem<T>::hess(T(1)));
}

/// Jacobian determinant whose zero set is the singular locus: det d(x, y) for pi1,
/// det d(p, q) for pi2. In the adapted chart these are y_v and p_u.
template <Scalar T>
Series2<T> delta_series(const LegendrianMapJet<T> &f, Leg leg)
{
    return leg == Leg::pi1 ? wedge_pullback(f.x, f.y) : wedge_pullback(f.p, f.q);
}

/// f(u + u0, v + v0) - f(u0, v0).
template <Scalar T>
LegendrianMapJet<T> recenter(const LegendrianMapJet<T> &f, const Point<T> &at)
{
    auto shift = [&](const Series2<T> &s) {
        auto r = compose_shift(s, at[0], at[1]);
        r.at(0, 0) = T(0);
        return r;
    };
    return {shift(f.x), shift(f.y), shift(f.z), shift(f.p), shift(f.q), f.chart};
}

enum class ChartPair { xp, xq, yp, yq };

inline const char *chart_pair_name(ChartPair c)
{
    switch (c) {
        case ChartPair::xp:
            return "xp";
        case ChartPair::xq:
            return "xq";
        case ChartPair::yp:
            return "yp";
        case ChartPair::yq:
            return "yq";
    }
    return "?";
}

template <Scalar T>
struct AdaptedJet {
    LegendrianMapJet<T> jet;
    ChartPair pair = ChartPair::xq;
    bool swapped = false; // (x, y, z, p, q) -> (y, x, z, q, p) was applied
};

/// Reparametrizes f by the coordinate pair with the largest Jacobian determinant at the
/// origin, so that the pair becomes (u, v) up to its base value. The (y, *) pairs are
/// moved to (x, *) by the contact swap (x, y, z, p, q) -> (y, x, z, q, p).
template <Scalar T>
AdaptedJet<T> adapt_chart(const LegendrianMapJet<T> &f)
{
    const int n = f.order();
    if (n < 1) {
        throw std::invalid_argument("adapt_chart: jet order must be at least 1");
    }
    const auto g = f.truncated(n);
    const std::array<std::pair<ChartPair, std::pair<const Series2<T> *, const Series2<T> *>>, 4> pairs{{
        {ChartPair::xp, {&g.x, &g.p}},
        {ChartPair::xq, {&g.x, &g.q}},
        {ChartPair::yp, {&g.y, &g.p}},
        {ChartPair::yq, {&g.y, &g.q}},
    }};
    int best = -1;
    T best_det = T(0);
    for (int k = 0; k < 4; ++k) {
        const auto &a = *pairs[k].second.first;
        const auto &b = *pairs[k].second.second;
        const T d = abs_value(T(a.coeff(1, 0) * b.coeff(0, 1) - a.coeff(0, 1) * b.coeff(1, 0)));
        if (d > best_det) {
            best_det = d;
            best = k;
        }
    }
    bool singular = best < 0;
    if constexpr (!is_exact_v<T>) {
        singular = singular || best_det <= 1e-12;
    }
    if (singular) {
        throw std::invalid_argument("adapt_chart: no coordinate pair is a local diffeomorphism at the origin");
    }
    auto a = *pairs[best].second.first;
    auto b = *pairs[best].second.second;
    a.at(0, 0) = T(0);
    b.at(0, 0) = T(0);
    const T m00 = a.coeff(1, 0), m01 = a.coeff(0, 1), m10 = b.coeff(1, 0), m11 = b.coeff(0, 1);
    const T det = m00 * m11 - m01 * m10;
    const T i00 = m11 / det, i01 = -m01 / det, i10 = -m10 / det, i11 = m00 / det;
    const auto s = Series2<T>::variable(Var::u, n);
    const auto t = Series2<T>::variable(Var::v, n);
    Series2<T> uu = i00 * s + i01 * t;
    Series2<T> vv = i10 * s + i11 * t;
    // Each pass fixes one more degree of the inverse.
    for (int k = 1; k < n; ++k) {
        const auto ea = compose(a, uu, vv) - s;
        const auto eb = compose(b, uu, vv) - t;
        uu -= i00 * ea + i01 * eb;
        vv -= i10 * ea + i11 * eb;
    }
    LegendrianMapJet<T> r{compose(g.x, uu, vv), compose(g.y, uu, vv), compose(g.z, uu, vv), compose(g.p, uu, vv),
                          compose(g.q, uu, vv), Chart::general};
    AdaptedJet<T> out{r, pairs[best].first, false};
    if (out.pair == ChartPair::yp || out.pair == ChartPair::yq) {
        out.jet = {r.y, r.x, r.z, r.q, r.p, Chart::general};
        out.swapped = true;
    }
    const auto &j = out.jet;
    if ((out.pair == ChartPair::xq || out.pair == ChartPair::yp) && j.x.constant_term() == T(0)
        && j.q.constant_term() == T(0)) {
        out.jet.chart = Chart::adapted;
    }
    return out;
}

namespace detail
{

template <Scalar T>
bool zero_within(const T &x, double tol, double scale)
{
    if constexpr (is_exact_v<T>) {
        (void)tol;
        (void)scale;
        return x == T(0);
    } else {
        return std::abs(x) <= tol * std::max(1.0, scale);
    }
}

template <Scalar T>
T det2(const Point<T> &a, const Point<T> &b)
{
    return a[0] * b[1] - a[1] * b[0];
}

} // namespace detail

/// KRSUY criterion from the 2-jet at the point: gamma is the implicit graph of
/// {Delta = 0}, eta is read off the dominant row of the Jacobian, and both
/// derivatives are taken analytically. Exact in the rational backend.
template <Scalar T>
SingularityReport<T> classify_point_implicit(const LegendrianMapJet<T> &f, Leg leg, const Point<T> &at = {},
                                             double tol = 1e-9)
{
    if (f.order() < 3) {
        throw std::invalid_argument("classify_point: jet order must be at least 3");
    }
    const auto g = (at[0] == T(0) && at[1] == T(0)) ? f : recenter(f, at);
    const auto comps = front_components(g, leg);
    const auto delta = delta_series(g, leg);
    const double scale = to_double(delta.max_abs());

    SingularityReport<T> r;
    r.point = at;
    r.leg = leg;
    r.delta = delta.coeff(0, 0);
    const T du = delta.coeff(1, 0), dv = delta.coeff(0, 1);
    r.grad_delta = {du, dv};
    if (!detail::zero_within(r.delta, tol, scale)) {
        r.verdict = Verdict::immersion;
        return r;
    }
    if (detail::zero_within(du, tol, scale) && detail::zero_within(dv, tol, scale)) {
        r.verdict = Verdict::degenerate;
        return r;
    }
    const T duu = T(2) * delta.coeff(2, 0), duv = delta.coeff(1, 1), dvv = T(2) * delta.coeff(0, 2);
    Point<T> g1, g2;
    if (abs_value(du) >= abs_value(dv)) {
        const T s = -dv / du;
        g1 = {s, T(1)};
        g2 = {T(-(dvv + T(2) * duv * s + duu * s * s) / du), T(0)};
    } else {
        const T s = -du / dv;
        g1 = {T(1), s};
        g2 = {T(0), T(-(duu + T(2) * duv * s + dvv * s * s) / dv)};
    }

    int row = -1;
    T best = T(0);
    for (int k = 0; k < 3; ++k) {
        for (const T &e : {comps[k].coeff(1, 0), comps[k].coeff(0, 1)}) {
            if (abs_value(e) > best) {
                best = abs_value(e);
                row = k;
            }
        }
    }
    double jscale = 0;
    for (const auto &c : comps) {
        jscale = std::max(jscale, to_double(c.max_abs()));
    }
    if (row < 0 || detail::zero_within(best, tol, jscale)) {
        r.verdict = Verdict::degenerate;
        return r;
    }
    const auto &a = comps[row];
    const T au = a.coeff(1, 0), av = a.coeff(0, 1);
    const T auu = T(2) * a.coeff(2, 0), auv = a.coeff(1, 1), avv = T(2) * a.coeff(0, 2);
    Point<T> eta{T(-av), au};
    Point<T> eta1{T(-(auv * g1[0] + avv * g1[1])), T(auu * g1[0] + auv * g1[1])};
    const T norm = abs_value(eta[0]) >= abs_value(eta[1]) ? eta[0] : eta[1];
    for (int k = 0; k < 2; ++k) {
        eta[k] /= norm;
        eta1[k] /= norm;
    }
    r.tangent = g1;
    r.eta = eta;
    r.det = detail::det2(g1, eta);
    r.det_derivative = detail::det2(g2, eta) + detail::det2(g1, eta1);
    if (!detail::zero_within(r.det, tol, 1.0)) {
        r.verdict = Verdict::cuspidal_edge;
    } else if (!detail::zero_within(r.det_derivative, tol, 1.0)) {
        r.verdict = Verdict::swallowtail;
    } else {
        r.verdict = Verdict::unresolved;
    }
    return r;
}

struct ContinuationOptions {
    double step = 1e-2;
    double newton_tol = 1e-12;
    int max_iterations = 50;
    int max_steps = 400;
    double tol = 1e-9;
    // Tracing stops once a point leaves [u_min, u_max] x [v_min, v_max].
    std::optional<std::array<double, 4>> bounds;
};

struct Locus {
    std::vector<Point<double>> points;
    std::size_t seed_index = 0;
    bool closed = false;
};

/// Float evaluation of pi o f, its Jacobian and Delta anywhere in the parameter plane.
class FrontField
{
public:
    FrontField(const LegendrianMapJet<double> &f, Leg leg)
        : m_leg(leg), m_comps(front_components(f, leg)), m_delta(delta_series(f, leg))
    {
        for (int k = 0; k < 3; ++k) {
            m_du[k] = differentiate(m_comps[k], Var::u);
            m_dv[k] = differentiate(m_comps[k], Var::v);
        }
        m_delta_u = differentiate(m_delta, Var::u);
        m_delta_v = differentiate(m_delta, Var::v);
        m_scale = std::max(1.0, m_delta.max_abs());
    }

    Leg leg() const
    {
        return m_leg;
    }

    double scale() const
    {
        return m_scale;
    }

    const Projection<double> &components() const
    {
        return m_comps;
    }

    double delta(const Point<double> &x) const
    {
        return evaluate(m_delta, x[0], x[1]);
    }

    Point<double> grad(const Point<double> &x) const
    {
        return {evaluate(m_delta_u, x[0], x[1]), evaluate(m_delta_v, x[0], x[1])};
    }

    std::array<Point<double>, 3> jacobian(const Point<double> &x) const
    {
        std::array<Point<double>, 3> j;
        for (int k = 0; k < 3; ++k) {
            j[k] = {evaluate(m_du[k], x[0], x[1]), evaluate(m_dv[k], x[0], x[1])};
        }
        return j;
    }

    std::array<double, 3> map(const Point<double> &x) const
    {
        return {evaluate(m_comps[0], x[0], x[1]), evaluate(m_comps[1], x[0], x[1]),
                evaluate(m_comps[2], x[0], x[1])};
    }

    /// Unit tangent of the level set through x: the gradient rotated by -90 degrees.
    std::optional<Point<double>> tangent(const Point<double> &x) const
    {
        const auto g = grad(x);
        const double n = std::hypot(g[0], g[1]);
        if (n <= m_tol * m_scale) {
            return std::nullopt;
        }
        return Point<double>{g[1] / n, -g[0] / n};
    }

    /// Unit kernel vector of the Jacobian (smallest eigenvector of J^T J) and the largest singular value.
    std::pair<Point<double>, double> kernel(const Point<double> &x) const
    {
        const auto j = jacobian(x);
        double a = 0, b = 0, c = 0;
        for (const auto &row : j) {
            a += row[0] * row[0];
            b += row[0] * row[1];
            c += row[1] * row[1];
        }
        const double mid = 0.5 * (a + c);
        const double rad = std::hypot(0.5 * (a - c), b);
        const double lo = mid - rad, hi = mid + rad;
        Point<double> e1{b, lo - a}, e2{lo - c, b};
        Point<double> e = std::hypot(e1[0], e1[1]) >= std::hypot(e2[0], e2[1]) ? e1 : e2;
        double n = std::hypot(e[0], e[1]);
        if (n == 0.0) {
            e = a <= c ? Point<double>{1.0, 0.0} : Point<double>{0.0, 1.0};
            n = 1.0;
        }
        e = {e[0] / n, e[1] / n};
        if ((std::abs(e[0]) >= std::abs(e[1]) ? e[0] : e[1]) < 0) {
            e = {-e[0], -e[1]};
        }
        return {e, std::sqrt(std::max(hi, 0.0))};
    }

    double jacobian_scale() const
    {
        double s = 1.0;
        for (int k = 0; k < 3; ++k) {
            s = std::max({s, m_du[k].max_abs(), m_dv[k].max_abs()});
        }
        return s;
    }

    void set_tol(double tol)
    {
        m_tol = tol;
    }

private:
    Leg m_leg;
    Projection<double> m_comps;
    std::array<Series2<double>, 3> m_du, m_dv;
    Series2<double> m_delta, m_delta_u, m_delta_v;
    double m_scale = 1.0;
    double m_tol = 1e-9;
};

/// Newton projection of x onto {Delta = 0} along the gradient.
inline std::optional<Point<double>> project_to_locus(const FrontField &field, Point<double> x,
                                                     const ContinuationOptions &opt = {})
{
    for (int it = 0; it <= opt.max_iterations; ++it) {
        const double d = field.delta(x);
        if (std::abs(d) <= opt.newton_tol * field.scale()) {
            return x;
        }
        const auto g = field.grad(x);
        const double gg = g[0] * g[0] + g[1] * g[1];
        if (gg <= opt.tol * opt.tol * field.scale() * field.scale()) {
            return std::nullopt;
        }
        x = {x[0] - d * g[0] / gg, x[1] - d * g[1] / gg};
    }
    return std::nullopt;
}

/// Pseudo-arclength corrector: Delta(x) = 0 and t0 . (x - x0) = s.
inline std::optional<Point<double>> correct_on_locus(const FrontField &field, const Point<double> &x0,
                                                     const Point<double> &t0, double s,
                                                     const ContinuationOptions &opt = {})
{
    Point<double> x{x0[0] + s * t0[0], x0[1] + s * t0[1]};
    for (int it = 0; it <= opt.max_iterations; ++it) {
        const double d = field.delta(x);
        const double r = t0[0] * (x[0] - x0[0]) + t0[1] * (x[1] - x0[1]) - s;
        if (std::abs(d) <= opt.newton_tol * field.scale() && std::abs(r) <= opt.newton_tol) {
            return x;
        }
        const auto g = field.grad(x);
        const double det = g[0] * t0[1] - g[1] * t0[0];
        if (std::abs(det) <= opt.tol * field.scale()) {
            return std::nullopt;
        }
        const double dx0 = (-d * t0[1] + g[1] * r) / det;
        const double dx1 = (-g[0] * r + t0[0] * d) / det;
        x = {x[0] + dx0, x[1] + dx1};
        if (!std::isfinite(x[0]) || !std::isfinite(x[1])) {
            return std::nullopt;
        }
        // Roundoff floor: the update no longer moves x.
        if (std::hypot(dx0, dx1) <= 1e-15 * std::max(1.0, std::hypot(x[0], x[1]))) {
            if (std::abs(field.delta(x)) <= opt.tol * field.scale()) {
                return x;
            }
        }
    }
    return std::nullopt;
}

namespace detail
{

inline bool outside(const Point<double> &x, const ContinuationOptions &opt)
{
    if (!opt.bounds) {
        return false;
    }
    const auto &b = *opt.bounds;
    return x[0] < b[0] || x[0] > b[1] || x[1] < b[2] || x[1] > b[3];
}

// March from x0 along dir * tangent until a stop condition; returns the new points.
inline std::vector<Point<double>> march(const FrontField &field, const Point<double> &x0, double dir,
                                        const ContinuationOptions &opt, bool &closed)
{
    std::vector<Point<double>> out;
    auto t0 = field.tangent(x0);
    if (!t0) {
        return out;
    }
    Point<double> prev{dir * (*t0)[0], dir * (*t0)[1]};
    Point<double> x = x0;
    for (int k = 0; k < opt.max_steps; ++k) {
        auto t = field.tangent(x);
        if (!t) {
            break;
        }
        if ((*t)[0] * prev[0] + (*t)[1] * prev[1] < 0) {
            t = Point<double>{-(*t)[0], -(*t)[1]};
        }
        auto y = correct_on_locus(field, x, *t, opt.step, opt);
        if (!y) {
            break;
        }
        out.push_back(*y);
        prev = *t;
        x = *y;
        if (out.size() > 2 && std::hypot(x[0] - x0[0], x[1] - x0[1]) < 0.5 * opt.step) {
            closed = true;
            out.pop_back();
            break;
        }
        if (outside(x, opt)) {
            break;
        }
    }
    return out;
}

} // namespace detail

/// Pseudo-arclength continuation of {Delta = 0} through the seed in both directions.
/// The polyline is ordered along the rotated gradient (Delta_v, -Delta_u).
inline Locus trace_singular_locus(const FrontField &field, const Point<double> &seed,
                                  const ContinuationOptions &opt = {})
{
    auto x0 = project_to_locus(field, seed, opt);
    if (!x0) {
        throw locus_error("trace_singular_locus: Newton projection of the seed did not converge");
    }
    if (!field.tangent(*x0)) {
        throw locus_error("trace_singular_locus: degenerate seed (grad Delta = 0)");
    }
    Locus locus;
    bool closed = false;
    auto fwd = detail::march(field, *x0, 1.0, opt, closed);
    std::vector<Point<double>> back;
    if (!closed) {
        bool unused = false;
        back = detail::march(field, *x0, -1.0, opt, unused);
    }
    locus.points.assign(back.rbegin(), back.rend());
    locus.seed_index = locus.points.size();
    locus.points.push_back(*x0);
    locus.points.insert(locus.points.end(), fwd.begin(), fwd.end());
    locus.closed = closed;
    return locus;
}

inline Locus trace_singular_locus(const LegendrianMapJet<double> &f, Leg leg, const Point<double> &seed,
                                  double step = 1e-2, int count = 400, double tol = 1e-9)
{
    ContinuationOptions opt;
    opt.step = step;
    opt.max_steps = count;
    opt.tol = tol;
    FrontField field(f, leg);
    field.set_tol(tol);
    return trace_singular_locus(field, seed, opt);
}

/// Sign-continuous unit kernel vectors of d(pi o f) along the polyline.
inline std::vector<Point<double>> kernel_field(const FrontField &field, const std::vector<Point<double>> &points)
{
    std::vector<Point<double>> etas;
    etas.reserve(points.size());
    for (const auto &x : points) {
        auto e = field.kernel(x).first;
        if (!etas.empty() && e[0] * etas.back()[0] + e[1] * etas.back()[1] < 0) {
            e = {-e[0], -e[1]};
        }
        etas.push_back(e);
    }
    return etas;
}

inline std::vector<Point<double>> kernel_field(const LegendrianMapJet<double> &f, Leg leg, const Locus &locus)
{
    return kernel_field(FrontField(f, leg), locus.points);
}

/// det(T, eta) along the polyline, with T the oriented unit tangent.
inline std::vector<double> det_along(const FrontField &field, const std::vector<Point<double>> &points,
                                     const std::vector<Point<double>> &etas)
{
    std::vector<double> d(points.size(), 0.0);
    for (std::size_t k = 0; k < points.size(); ++k) {
        const auto t = field.tangent(points[k]);
        d[k] = t ? detail::det2(*t, etas[k]) : 0.0;
    }
    return d;
}

/// KRSUY criterion on the traced locus: det(gamma', eta) at the point and its
/// derivative by central differences at pseudo-arclength +-step.
inline SingularityReport<double> classify_point_traced(const FrontField &field, const Point<double> &at,
                                                       const ContinuationOptions &opt = {})
{
    SingularityReport<double> r;
    r.point = at;
    r.leg = field.leg();
    r.delta = field.delta(at);
    r.grad_delta = field.grad(at);
    if (std::abs(r.delta) > opt.tol * field.scale()) {
        r.verdict = Verdict::immersion;
        return r;
    }
    const auto t0 = field.tangent(at);
    const auto [eta0, sigma] = field.kernel(at);
    if (!t0 || sigma <= opt.tol * field.jacobian_scale()) {
        r.verdict = Verdict::degenerate;
        return r;
    }
    r.tangent = *t0;
    r.eta = eta0;
    r.det = detail::det2(*t0, eta0);

    auto det_at = [&](const Point<double> &x) -> std::optional<double> {
        const auto t = field.tangent(x);
        if (!t) {
            return std::nullopt;
        }
        auto e = field.kernel(x).first;
        if (e[0] * eta0[0] + e[1] * eta0[1] < 0) {
            e = {-e[0], -e[1]};
        }
        return detail::det2(*t, e);
    };
    auto central = [&](double h) -> std::optional<double> {
        const auto xp = correct_on_locus(field, at, *t0, h, opt);
        const auto xm = correct_on_locus(field, at, *t0, -h, opt);
        const auto dp = xp ? det_at(*xp) : std::nullopt;
        const auto dm = xm ? det_at(*xm) : std::nullopt;
        if (!dp || !dm) {
            return std::nullopt;
        }
        return (*dp - *dm) / (2 * h);
    };
    double h = opt.step;
    std::optional<double> d1, d2;
    for (int attempt = 0; attempt < 4 && !(d1 && d2); ++attempt, h *= 0.5) {
        d1 = central(h);
        d2 = central(0.5 * h);
    }
    if (!(d1 && d2)) {
        r.verdict = Verdict::unresolved;
        return r;
    }
    // Richardson extrapolation of the two central differences.
    r.det_derivative = (4 * *d2 - *d1) / 3;
    if (std::abs(r.det) > opt.tol) {
        r.verdict = Verdict::cuspidal_edge;
    } else if (std::abs(r.det_derivative) > opt.tol) {
        r.verdict = Verdict::swallowtail;
    } else {
        r.verdict = Verdict::unresolved;
    }
    return r;
}

/// Exact implicit path for rationals, traced path for floats.
template <Scalar T>
SingularityReport<T> classify_point(const LegendrianMapJet<T> &f, Leg leg, const Point<T> &at = {},
                                    double tol = 1e-9)
{
    if constexpr (is_exact_v<T>) {
        return classify_point_implicit(f, leg, at, tol);
    } else {
        if (f.order() < 3) {
            throw std::invalid_argument("classify_point: jet order must be at least 3");
        }
        ContinuationOptions opt;
        opt.tol = tol;
        FrontField field(f, leg);
        field.set_tol(tol);
        return classify_point_traced(field, at, opt);
    }
}

/// Points of the polyline where det(gamma', eta) changes sign, refined by bisection
/// in pseudo-arclength between neighbouring samples.
inline std::vector<Point<double>> det_sign_changes(const FrontField &field, const Locus &locus,
                                                   const ContinuationOptions &opt = {})
{
    std::vector<Point<double>> out;
    const auto &pts = locus.points;
    if (pts.size() < 2) {
        return out;
    }
    const auto etas = kernel_field(field, pts);
    const auto d = det_along(field, pts, etas);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
        if (d[k] == 0.0) {
            out.push_back(pts[k]);
            continue;
        }
        if (!(d[k] * d[k + 1] < 0)) {
            continue;
        }
        const auto t = field.tangent(pts[k]);
        if (!t) {
            continue;
        }
        const auto &x0 = pts[k];
        const double span = t->at(0) * (pts[k + 1][0] - x0[0]) + t->at(1) * (pts[k + 1][1] - x0[1]);
        auto det_s = [&](double s) -> std::optional<std::pair<double, Point<double>>> {
            const auto x = correct_on_locus(field, x0, *t, s, opt);
            if (!x) {
                return std::nullopt;
            }
            const auto tt = field.tangent(*x);
            if (!tt) {
                return std::nullopt;
            }
            auto e = field.kernel(*x).first;
            if (e[0] * etas[k][0] + e[1] * etas[k][1] < 0) {
                e = {-e[0], -e[1]};
            }
            return std::make_pair(detail::det2(*tt, e), *x);
        };
        double lo = 0.0, hi = span, dlo = d[k];
        Point<double> best = pts[k];
        bool ok = true;
        for (int it = 0; it < 60 && std::abs(hi - lo) > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            const auto v = det_s(mid);
            if (!v) {
                ok = false;
                break;
            }
            best = v->second;
            if (v->first == 0.0) {
                break;
            }
            if ((v->first < 0) == (dlo < 0)) {
                lo = mid;
                dlo = v->first;
            } else {
                hi = mid;
            }
        }
        if (ok) {
            out.push_back(best);
        }
    }
    return out;
}

/// Zeros of Delta on the edges of a grid x grid lattice over the box
/// {u0, u1, v0, v1}, located by bisection.
inline std::vector<Point<double>> locus_seeds(const FrontField &field, int grid, const std::array<double, 4> &box)
{
    std::vector<Point<double>> seeds;
    if (grid < 1) {
        return seeds;
    }
    const double hu = (box[1] - box[0]) / grid;
    const double hv = (box[3] - box[2]) / grid;
    std::vector<double> val((grid + 1) * (grid + 1));
    auto node = [&](int i, int j) { return Point<double>{box[0] + i * hu, box[2] + j * hv}; };
    for (int i = 0; i <= grid; ++i) {
        for (int j = 0; j <= grid; ++j) {
            val[i * (grid + 1) + j] = field.delta(node(i, j));
        }
    }
    auto root = [&](Point<double> a, Point<double> b, double fa) {
        for (int it = 0; it < 60; ++it) {
            const Point<double> m{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
            const double fm = field.delta(m);
            if (fm == 0.0) {
                return m;
            }
            if ((fm < 0) == (fa < 0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        return Point<double>{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    };
    for (int i = 0; i <= grid; ++i) {
        for (int j = 0; j <= grid; ++j) {
            const double f0 = val[i * (grid + 1) + j];
            if (f0 == 0.0) {
                seeds.push_back(node(i, j));
                continue;
            }
            if (i < grid && f0 * val[(i + 1) * (grid + 1) + j] < 0) {
                seeds.push_back(root(node(i, j), node(i + 1, j), f0));
            }
            if (j < grid && f0 * val[i * (grid + 1) + j + 1] < 0) {
                seeds.push_back(root(node(i, j), node(i, j + 1), f0));
            }
        }
    }
    return seeds;
}

/// Every locus component met by the seeding lattice, traced inside opt.bounds.
/// Seeds within two steps of an already traced point are skipped; degenerate
/// seeds are dropped.
inline std::vector<Locus> trace_loci(const FrontField &field, int grid, const ContinuationOptions &opt)
{
    if (!opt.bounds) {
        throw std::invalid_argument("trace_loci: bounds required");
    }
    std::vector<Locus> out;
    std::vector<Point<double>> traced;
    for (const auto &seed : locus_seeds(field, grid, *opt.bounds)) {
        const bool seen = std::any_of(traced.begin(), traced.end(), [&](const Point<double> &p) {
            return std::hypot(p[0] - seed[0], p[1] - seed[1]) < 2 * opt.step;
        });
        if (seen) {
            continue;
        }
        try {
            out.push_back(trace_singular_locus(field, seed, opt));
        } catch (const locus_error &) {
            continue;
        }
        traced.insert(traced.end(), out.back().points.begin(), out.back().points.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Coefficient stratifications

enum class StratumFamily { hess1, gauss, developable };

inline const char *stratum_family_name(StratumFamily f)
{
    switch (f) {
        case StratumFamily::hess1:
            return "hess1";
        case StratumFamily::gauss:
            return "gauss";
        case StratumFamily::developable:
            return "developable";
    }
    return "?";
}

struct Condition {
    std::string coefficient;
    bool nonzero = false;

    bool operator==(const Condition &) const = default;
};

struct Stratum {
    StratumFamily family = StratumFamily::hess1;
    std::string label;      // "(i)".."(iv)", "W0".."W4", "outside"
    std::string case_label; // matching case (i)..(iv) for the Gauss strata; empty otherwise
    std::vector<Condition> conditions;
    bool generic = false; // one of the strata that occur for generic solutions
    std::optional<Verdict> pi1, pi2;
};

inline json to_json(const Stratum &s)
{
    json conds = json::array();
    for (const auto &c : s.conditions) {
        conds.push_back(json{{"coefficient", c.coefficient}, {"nonzero", c.nonzero}});
    }
    json j{{"family", stratum_family_name(s.family)},
           {"label", s.label},
           {"case", s.case_label},
           {"conditions", conds},
           {"generic", s.generic}};
    j["pi1"] = s.pi1 ? json(verdict_name(*s.pi1)) : json(nullptr);
    j["pi2"] = s.pi2 ? json(verdict_name(*s.pi2)) : json(nullptr);
    return j;
}

namespace detail
{

template <Scalar T>
bool nonzero_coeff(const T &x, double tol, double scale)
{
    return !zero_within(x, tol, scale);
}

template <Scalar T, std::size_t K>
double coeff_scale(const std::array<T, K> &c)
{
    double s = 0;
    for (const auto &x : c) {
        s = std::max(s, std::abs(to_double(x)));
    }
    return s;
}

inline std::vector<Condition> conds(std::initializer_list<std::pair<const char *, bool>> list)
{
    std::vector<Condition> v;
    for (const auto &[name, nz] : list) {
        v.push_back({name, nz});
    }
    return v;
}

} // namespace detail

/// Cases of a Hess = 1 jet in terms of the cubic h = sum (a_k + i b_k) w^k.
template <Scalar T>
Stratum stratify_hess1(const T &a1, const T &b1, const T &a2, const T &b2, const T &a3, const T &b3,
                       double tol = 1e-9)
{
    const double sc = detail::coeff_scale(std::array<T, 6>{a1, b1, a2, b2, a3, b3});
    auto nz = [&](const T &x) { return detail::nonzero_coeff(x, tol, sc); };
    Stratum s;
    s.family = StratumFamily::hess1;
    const auto imm = Verdict::immersion, cusp = Verdict::cuspidal_edge, st = Verdict::swallowtail;
    if (nz(a1)) {
        s.label = "(i)";
        s.conditions = detail::conds({{"a1", true}});
        s.pi1 = imm;
        s.pi2 = imm;
    } else if (nz(a2) && nz(b2)) {
        s.label = "(ii)";
        s.conditions = detail::conds({{"a1", false}, {"a2", true}, {"b2", true}});
        s.pi1 = cusp;
        s.pi2 = cusp;
    } else if (nz(a2) && nz(a3)) {
        s.label = "(iii)";
        s.conditions = detail::conds({{"a1", false}, {"a2", true}, {"b2", false}, {"a3", true}});
        s.pi1 = st;
        s.pi2 = cusp;
    } else if (nz(b2) && nz(a3)) {
        s.label = "(iv)";
        s.conditions = detail::conds({{"a1", false}, {"a2", false}, {"b2", true}, {"a3", true}});
        s.pi1 = cusp;
        s.pi2 = st;
    } else {
        s.label = "outside";
        s.conditions = detail::conds({{"a1", false}});
        return s;
    }
    s.generic = true;
    return s;
}

/// W-strata of a Gauss-chart jet in terms of the prolongation coefficients.
template <Scalar T>
Stratum stratify_gauss(const T &b, const T &c, const T &f, const T &g, const T &k, const T &l, double tol = 1e-9)
{
    const double sc = detail::coeff_scale(std::array<T, 6>{b, c, f, g, k, l});
    auto nz = [&](const T &x) { return detail::nonzero_coeff(x, tol, sc); };
    Stratum s;
    s.family = StratumFamily::gauss;
    const auto imm = Verdict::immersion, cusp = Verdict::cuspidal_edge, st = Verdict::swallowtail;
    const bool nc = nz(c), nf = nz(f), ng = nz(g), nl = nz(l);
    if (nc) {
        s.label = "W0";
        s.case_label = "(i)";
        s.conditions = detail::conds({{"C", true}});
        s.pi1 = imm;
        s.pi2 = imm;
        s.generic = true;
    } else if (nf && ng) {
        s.label = "W1";
        s.case_label = "(ii)";
        s.conditions = detail::conds({{"C", false}, {"F", true}, {"G", true}});
        s.pi1 = cusp;
        s.pi2 = cusp;
        s.generic = true;
    } else if (nf && nl) {
        s.label = "W1_2";
        s.case_label = "(iv)";
        s.conditions = detail::conds({{"C", false}, {"F", true}, {"G", false}, {"L", true}});
        s.pi1 = st;
        s.pi2 = cusp;
        s.generic = true;
    } else if (ng && nl) {
        s.label = "W2_2";
        s.case_label = "(iii)";
        s.conditions = detail::conds({{"C", false}, {"F", false}, {"G", true}, {"L", true}});
        s.pi1 = cusp;
        s.pi2 = st;
        s.generic = true;
    } else if (nl) {
        s.label = "W1_3";
        s.conditions = detail::conds({{"C", false}, {"F", false}, {"G", false}, {"L", true}});
    } else if (ng) {
        s.label = "W2_3";
        s.conditions = detail::conds({{"C", false}, {"F", false}, {"G", true}, {"L", false}});
    } else if (nf) {
        s.label = "W3_3";
        s.conditions = detail::conds({{"C", false}, {"F", true}, {"G", false}, {"L", false}});
    } else {
        s.label = "W4";
        s.conditions = detail::conds({{"C", false}, {"F", false}, {"G", false}, {"L", false}});
    }
    (void)b;
    (void)k;
    return s;
}

/// Cases of the pi1 front of a developable (Hess = 0) jet.
template <Scalar T>
Stratum stratify_developable(const T &bt, const T &ct, const T &c, const T &dt, double tol = 1e-9)
{
    const double sc = detail::coeff_scale(std::array<T, 4>{bt, ct, c, dt});
    auto nz = [&](const T &x) { return detail::nonzero_coeff(x, tol, sc); };
    Stratum s;
    s.family = StratumFamily::developable;
    if (nz(bt)) {
        s.label = "(i)";
        s.conditions = detail::conds({{"Bt", true}});
        s.pi1 = Verdict::immersion;
    } else if (nz(ct) && nz(c)) {
        s.label = "(ii)";
        s.conditions = detail::conds({{"Bt", false}, {"Ct", true}, {"C", true}});
        s.pi1 = Verdict::cuspidal_edge;
    } else if (!nz(ct) && nz(c) && nz(dt)) {
        s.label = "(iii)";
        s.conditions = detail::conds({{"Bt", false}, {"Ct", false}, {"C", true}, {"Dt", true}});
        s.pi1 = Verdict::swallowtail;
    } else {
        s.label = "outside";
        s.conditions = detail::conds({{"Bt", false}});
        return s;
    }
    s.generic = true;
    return s;
}

/// (a1, b1, a2, b2, a3, b3) of an adapted Hess = 1 jet at the origin, read from y.
template <Scalar T>
std::array<T, 6> hess1_coefficients(const LegendrianMapJet<T> &f)
{
    const auto &y = f.y;
    return {y.coeff(0, 1), y.coeff(1, 0),   T(y.coeff(1, 1) / T(2)), y.coeff(2, 0), T(y.coeff(2, 1) / T(3)),
            y.coeff(3, 0)};
}

/// (B, C, F, G, K, L) of a lifted Gauss-chart jet: p = Z_u and y = -Z_v at the origin.
template <Scalar T>
std::array<T, 6> gauss_coefficients(const LegendrianMapJet<T> &f)
{
    return {f.p.coeff(0, 1),          T(-f.y.coeff(0, 1)),          T(T(2) * f.p.coeff(0, 2)),
            T(T(-2) * f.y.coeff(0, 2)), T(T(6) * f.p.coeff(0, 3)), T(T(-6) * f.y.coeff(0, 3))};
}

/// (Bt, Ct, C, Dt) = (y_v, y_vv, p_vv, y_vvv) of an adapted developable jet at the origin.
template <Scalar T>
std::array<T, 4> developable_coefficients(const LegendrianMapJet<T> &f)
{
    return {f.y.coeff(0, 1), T(T(2) * f.y.coeff(0, 2)), T(T(2) * f.p.coeff(0, 2)), T(T(6) * f.y.coeff(0, 3))};
}

} // namespace masing

#endif
