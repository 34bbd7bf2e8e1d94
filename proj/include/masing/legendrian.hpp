#ifndef MASING_LEGENDRIAN_HPP
#define MASING_LEGENDRIAN_HPP

#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <masing/jet.hpp>
#include <masing/series.hpp>
#include <masing/series_json.hpp>

namespace masing
{

enum class Form { theta, omega, factorization_left, factorization_right, normalization };

inline const char *form_name(Form f)
{
    switch (f) {
        case Form::theta:
            return "theta";
        case Form::omega:
            return "omega";
        case Form::factorization_left:
            return "factorization-left";
        case Form::factorization_right:
            return "factorization-right";
        case Form::normalization:
            return "normalization";
    }
    return "?";
}

template <Scalar T>
struct ResidualReport {
    Form form;
    // One entry for 2-forms and scalars; (du, dv) for the contact form;
    // (re, im) for the complex factorization.
    std::vector<Series2<T>> residual;
    T max_abs = T(0);
    bool exact_zero = true;

    static ResidualReport make(Form form, std::vector<Series2<T>> parts)
    {
        ResidualReport r{form, std::move(parts)};
        for (const auto &s : r.residual) {
            r.max_abs = std::max(r.max_abs, s.max_abs());
            r.exact_zero = r.exact_zero && s.is_zero();
        }
        return r;
    }

    /// Exact zero for rationals; max_abs <= tol for floats.
    bool passes(double tol = 1e-9) const
    {
        if constexpr (is_exact_v<T>) {
            (void)tol;
            return exact_zero;
        } else {
            return max_abs <= tol;
        }
    }

    int order() const
    {
        return residual.empty() ? -1 : residual.front().order();
    }
};

template <Scalar T>
json to_json(const ResidualReport<T> &r)
{
    json parts = json::array();
    for (const auto &s : r.residual) {
        parts.push_back(to_json(s));
    }
    return json{{"form", form_name(r.form)}, {"order", r.order()}, {"exact_zero", r.exact_zero},
                {"max_abs", to_double(r.max_abs)}, {"residual", parts}};
}

/// f*(dz - p dx - q dy) as (du, dv) components of order N - 1.
template <Scalar T>
ResidualReport<T> contact_residual(const LegendrianMapJet<T> &f)
{
    auto [du, dv] = contact_pullback(f);
    return ResidualReport<T>::make(Form::theta, {std::move(du), std::move(dv)});
}

/// du^dv coefficient of f*omega, order N - 1 of the jet.
template <Scalar T>
ResidualReport<T> ma_residual(const LegendrianMapJet<T> &f, const MongeAmpereSystem<T> &sys)
{
    const auto g = f.truncated(f.order());
    Series2<T> r = sys.c * wedge_pullback(g.x, g.y) - wedge_pullback(g.p, g.q);
    if (sys.family == Family::gauss) {
        const auto w = T(1) + g.p * g.p + g.q * g.q;
        r = sys.c * (w * w * wedge_pullback(g.x, g.y)) - wedge_pullback(g.p, g.q);
    }
    return ResidualReport<T>::make(Form::omega, {std::move(r)});
}

template <Scalar T>
using Projection = std::array<Series2<T>, 3>;

/// pi_1(x, y, z, p, q) = (x, y, z).
template <Scalar T>
Projection<T> project_pi1(const LegendrianMapJet<T> &f)
{
    return {f.x, f.y, f.z};
}

/// Hess: (p, q, p x + q y - z).  Gauss chart: (x p + y q - z, p, q).
template <Scalar T>
Projection<T> project_pi2(const LegendrianMapJet<T> &f, const MongeAmpereSystem<T> &sys)
{
    auto height = f.p * f.x + f.q * f.y - f.z;
    if (sys.family == Family::gauss) {
        return {std::move(height), f.p, f.q};
    }
    return {f.p, f.q, std::move(height)};
}

namespace detail
{

// Pulled-back complex 1-form a_u du + a_v dv, each coefficient split as re + i im.
template <Scalar T>
struct ComplexForm {
    Series2<T> u_re, u_im, v_re, v_im;
};

template <Scalar T>
Series2<T> complex_wedge_re(const ComplexForm<T> &a, const ComplexForm<T> &b)
{
    return (a.u_re * b.v_re - a.u_im * b.v_im) - (a.v_re * b.u_re - a.v_im * b.u_im);
}

template <Scalar T>
Series2<T> complex_wedge_im(const ComplexForm<T> &a, const ComplexForm<T> &b)
{
    return (a.u_re * b.v_im + a.u_im * b.v_re) - (a.v_re * b.u_im + a.v_im * b.u_re);
}

// s W da + sign db where s = sqrt(-c) is real (imaginary = false) or i * sigma.
template <Scalar T>
ComplexForm<T> scaled_sum(const T &s, bool imaginary, const Series2<T> &w, const Series2<T> &a, const Series2<T> &b,
                          const T &sign)
{
    const auto au = w * differentiate(a, Var::u);
    const auto av = w * differentiate(a, Var::v);
    const auto bu = sign * differentiate(b, Var::u);
    const auto bv = sign * differentiate(b, Var::v);
    const Series2<T> zero(bu.order());
    if (imaginary) {
        return {bu, s * au, bv, s * av};
    }
    return {s * au + bu, zero, s * av + bv, zero};
}

} // namespace detail

/// Pullbacks of (s W dx + dq)^(s W dy - dp) and (s W dx - dq)^(s W dy + dp),
/// s = sqrt(-c), W = 1 (Hess) or 1 + p^2 + q^2 (Gauss chart). Both vanish to
/// order N - 2 on any generalized geometric solution. For c > 0 the
/// computation is carried out on (re, im) pairs.
template <Scalar T>
std::pair<ResidualReport<T>, ResidualReport<T>> factorization_residual(const LegendrianMapJet<T> &f,
                                                                       const MongeAmpereSystem<T> &sys)
{
    if (sys.c == T(0)) {
        throw std::invalid_argument("factorization_residual requires c != 0");
    }
    const bool imaginary = sys.c > T(0);
    T s;
    if (!exact_sqrt(imaginary ? T(sys.c) : T(-sys.c), s)) {
        throw std::invalid_argument("factorization_residual: |c| has no exact square root in the rational backend; "
                                    "use the float backend");
    }
    const int n = f.order();
    const auto g = f.truncated(n);
    const Series2<T> w = sys.family == Family::gauss ? Series2<T>(T(1) + g.p * g.p + g.q * g.q)
                                                     : Series2<T>::constant(T(1), n);
    const auto a1 = detail::scaled_sum(s, imaginary, w, g.x, g.q, T(1));
    const auto a2 = detail::scaled_sum(s, imaginary, w, g.y, g.p, T(-1));
    const auto a3 = detail::scaled_sum(s, imaginary, w, g.x, g.q, T(-1));
    const auto a4 = detail::scaled_sum(s, imaginary, w, g.y, g.p, T(1));
    const int m = std::max(n - 2, 0);
    auto left = ResidualReport<T>::make(Form::factorization_left,
                                        {detail::complex_wedge_re(a1, a2).truncated(m),
                                         detail::complex_wedge_im(a1, a2).truncated(m)});
    auto right = ResidualReport<T>::make(Form::factorization_right,
                                         {detail::complex_wedge_re(a3, a4).truncated(m),
                                          detail::complex_wedge_im(a3, a4).truncated(m)});
    return {std::move(left), std::move(right)};
}

/// Linear parts (A, B, C, D, E) of function germs H = A x + B y + C z + D p + E q + O(2)
/// at f(0) with H o f = 0 modulo (u, v)-degree > deg.
template <Scalar T>
struct FullnessReport {
    int degree = 0;
    std::vector<std::array<T, 5>> basis; // reduced row-echelon basis of the admissible space
    std::array<T, 5> contact_covector{};  // theta at f(0): (-p0, -q0, 1, 0, 0)
    bool full = false;                    // every admissible linear part is a multiple of theta

    int dimension() const
    {
        return static_cast<int>(basis.size());
    }
};

namespace detail
{

template <Scalar T>
bool pivot_nonzero(const T &x, const T &scale)
{
    if constexpr (is_exact_v<T>) {
        (void)scale;
        return x != T(0);
    } else {
        return abs_value(x) > 1e-9 * std::max(T(1), scale);
    }
}

} // namespace detail

template <Scalar T>
FullnessReport<T> fullness_check(const LegendrianMapJet<T> &f, int deg)
{
    if (deg < 1 || deg > f.order()) {
        throw std::invalid_argument("fullness_check: degree must lie in 1..order of the jet");
    }
    const std::array<const Series2<T> *, 5> comps{&f.x, &f.y, &f.z, &f.p, &f.q};
    std::array<Series2<T>, 5> g;
    for (int k = 0; k < 5; ++k) {
        g[k] = comps[k]->truncated(deg) - comps[k]->constant_term();
    }
    const auto rows = Series2<T>::storage_size(deg);

    // Products of the shifted components for every exponent vector of degree 2..deg,
    // built degree by degree from the previous layer.
    using Exps = std::array<int, 5>;
    std::map<Exps, Series2<T>> layer;
    for (int k = 0; k < 5; ++k) {
        Exps e{};
        e[k] = 1;
        layer.emplace(e, g[k]);
    }
    std::vector<std::vector<T>> higher;
    for (int d = 2; d <= deg; ++d) {
        std::map<Exps, Series2<T>> next;
        for (const auto &[e, s] : layer) {
            // Multiply only by variables at or after the last nonzero exponent to avoid repeats.
            int last = 0;
            for (int k = 0; k < 5; ++k) {
                if (e[k] != 0) {
                    last = k;
                }
            }
            for (int k = last; k < 5; ++k) {
                Exps e2 = e;
                ++e2[k];
                auto prod = s * g[k];
                if (!prod.is_zero()) {
                    higher.push_back(prod.raw());
                }
                next.emplace(e2, std::move(prod));
            }
        }
        layer = std::move(next);
    }

    // Echelon basis of the span of the higher-order columns.
    T scale(1);
    for (const auto &col : higher) {
        for (const auto &x : col) {
            scale = std::max(scale, abs_value(x));
        }
    }
    std::vector<std::vector<T>> basis;
    std::vector<std::size_t> pivots;
    auto reduce = [&](std::vector<T> col) {
        for (std::size_t b = 0; b < basis.size(); ++b) {
            const T &x = col[pivots[b]];
            if (x != T(0)) {
                const T factor = x;
                for (std::size_t r = 0; r < rows; ++r) {
                    col[r] -= factor * basis[b][r];
                }
            }
        }
        return col;
    };
    auto insert = [&](std::vector<T> col) {
        col = reduce(std::move(col));
        std::size_t piv = rows;
        T best(0);
        for (std::size_t r = 0; r < rows; ++r) {
            if (detail::pivot_nonzero(col[r], scale) && (piv == rows || abs_value(col[r]) > best)) {
                piv = r;
                best = abs_value(col[r]);
                if constexpr (is_exact_v<T>) {
                    break;
                }
            }
        }
        if (piv == rows) {
            return;
        }
        const T inv = T(1) / col[piv];
        for (auto &x : col) {
            x *= inv;
        }
        col[piv] = T(1);
        for (auto &b : basis) {
            const T x = b[piv];
            if (x != T(0)) {
                for (std::size_t r = 0; r < rows; ++r) {
                    b[r] -= x * col[r];
                }
            }
        }
        basis.push_back(std::move(col));
        pivots.push_back(piv);
    };
    for (auto &col : higher) {
        if (basis.size() == rows) {
            break;
        }
        insert(std::move(col));
    }

    // Project the linear columns onto the complement of that span; the admissible
    // linear parts are the kernel of the projected 5-column matrix.
    std::vector<std::vector<T>> lin(5);
    for (int k = 0; k < 5; ++k) {
        lin[k] = reduce(g[k].raw());
        for (std::size_t b = 0; b < pivots.size(); ++b) {
            lin[k][pivots[b]] = T(0);
        }
    }
    // Row-reduce the rows x 5 matrix.
    std::vector<std::vector<T>> m(rows, std::vector<T>(5));
    for (std::size_t r = 0; r < rows; ++r) {
        for (int k = 0; k < 5; ++k) {
            m[r][k] = lin[k][r];
        }
    }
    std::vector<int> pivot_col;
    std::size_t prow = 0;
    for (int k = 0; k < 5 && prow < rows; ++k) {
        std::size_t best = rows;
        for (std::size_t r = prow; r < rows; ++r) {
            if (detail::pivot_nonzero(m[r][k], scale) && (best == rows || abs_value(m[r][k]) > abs_value(m[best][k]))) {
                best = r;
            }
        }
        if (best == rows) {
            continue;
        }
        std::swap(m[prow], m[best]);
        const T inv = T(1) / m[prow][k];
        for (auto &x : m[prow]) {
            x *= inv;
        }
        for (std::size_t r = 0; r < rows; ++r) {
            if (r != prow && m[r][k] != T(0)) {
                const T factor = m[r][k];
                for (int c = 0; c < 5; ++c) {
                    m[r][c] -= factor * m[prow][c];
                }
            }
        }
        pivot_col.push_back(k);
        ++prow;
    }

    FullnessReport<T> rep;
    rep.degree = deg;
    for (int k = 0; k < 5; ++k) {
        if (std::find(pivot_col.begin(), pivot_col.end(), k) != pivot_col.end()) {
            continue;
        }
        std::array<T, 5> vec{};
        vec[k] = T(1);
        for (std::size_t i = 0; i < pivot_col.size(); ++i) {
            vec[pivot_col[i]] = -m[i][k];
        }
        rep.basis.push_back(vec);
    }
    rep.contact_covector = {T(-f.p.constant_term()), T(-f.q.constant_term()), T(1), T(0), T(0)};
    rep.full = true;
    for (const auto &b : rep.basis) {
        // b must be b[2] * theta.
        for (int k = 0; k < 5; ++k) {
            const T diff = b[k] - b[2] * rep.contact_covector[k];
            if (detail::pivot_nonzero(diff, T(1))) {
                rep.full = false;
            }
        }
    }
    return rep;
}

template <Scalar T>
json to_json(const FullnessReport<T> &r)
{
    json basis = json::array();
    for (const auto &b : r.basis) {
        json row = json::array();
        for (const auto &x : b) {
            row.push_back(scalar_to_json(x));
        }
        basis.push_back(row);
    }
    return json{{"degree", r.degree}, {"dimension", r.dimension()}, {"full", r.full}, {"basis", basis}};
}

} // namespace masing

#endif
