// Acceptance run: one PASS/FAIL line per criterion; exit status is the number of failures.
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <masing/classify.hpp>
#include <masing/genericity.hpp>
#include <masing/legendrian.hpp>
#include <masing/solutions.hpp>

#include "support.hpp"

using namespace masing;
using masing::testing::poly;
using masing::testing::poly1;
using masing::testing::q;
using masing::testing::RationalGen;

namespace
{

using S = Series2<Rational>;
using Jet = LegendrianMapJet<Rational>;

class Check
{
public:
    void expect(bool ok, const std::string &what)
    {
        if (!ok && m_failures.size() < 5) {
            m_failures.push_back(what);
        }
        m_all = m_all && ok;
        ++m_count;
    }

    bool ok() const
    {
        return m_all;
    }
    int count() const
    {
        return m_count;
    }
    const std::vector<std::string> &failures() const
    {
        return m_failures;
    }

private:
    bool m_all = true;
    int m_count = 0;
    std::vector<std::string> m_failures;
};

Rational pick(RationalGen &gen, int req)
{
    if (req == 0) {
        return Rational(0);
    }
    return req == 1 ? gen.nonzero() : gen.next();
}

Jet hess1_jet(const std::array<Rational, 6> &c, int n = 6)
{
    return build_hess_positive(
        ComplexSeries1<Rational>{poly1(n, {{1, c[0]}, {2, c[2]}, {3, c[4]}}), poly1(n, {{1, c[1]}, {2, c[3]}, {3, c[5]}})},
        n);
}

Jet gauss_jet(const Rational &c, const std::array<Rational, 6> &k, int n = 6)
{
    const auto z0 = poly1(n, {{2, k[1] / 2}, {3, k[3] / 6}, {4, k[5] / 24}});
    const auto z1 = poly1(n, {{1, k[0]}, {2, k[2] / 2}, {3, k[4] / 6}});
    return lift_gauss(solve_gauss_ck(c, z0, z1, n), c);
}

Jet developable_jet(const std::array<Rational, 4> &k, RationalGen &gen, int n = 6)
{
    auto phi = poly1(n, {{1, gen.next()}, {2, k[2] / 2}, {3, gen.next()}, {4, gen.next()}});
    auto psi = poly1(n, {{1, k[0]}, {2, k[1] / 2}, {3, k[3] / 6}, {4, gen.next()}});
    return build_developable(phi, psi, n);
}

InitialData<double> sweep_base(const std::string &family)
{
    json j;
    if (family == "hess1") {
        j = {{"variant", "holomorphic"}, {"series", {{"re", {0, 0, 1}}}}};
    } else if (family == "hess-1") {
        j = {{"variant", "dalembert"}, {"series", {{"phi", {0, 0, 1}}, {"psi", {0, 1}}}}};
    } else if (family == "gauss c=1") {
        j = {{"variant", "cauchy"}, {"c", 1}, {"series", {{"z0", {0, 0, 0.5}}}}};
    } else if (family == "gauss c=-1") {
        j = {{"variant", "cauchy"}, {"c", -1}, {"series", {{"z0", {0, 0, 0.5}}}}};
    } else {
        j = {{"variant", "developable"}, {"series", {{"psi", {0, 1}}}}};
    }
    return initial_data_from_json<double>(j, 8);
}

const std::vector<std::string> &sweep_families()
{
    static const std::vector<std::string> f{"hess1", "hess-1", "gauss c=1", "gauss c=-1", "developable"};
    return f;
}

std::map<std::string, StratumTally> &sweeps()
{
    static std::map<std::string, StratumTally> cache;
    if (cache.empty()) {
        for (const auto &name : sweep_families()) {
            cache[name] = sample_and_tally(sweep_base(name), 0.5, 200, 16, 2024);
        }
    }
    return cache;
}

// 1. Worked example at N = 4.
void golden_example(Check &ck)
{
    const auto f = build_hess_positive(ComplexSeries1<Rational>{poly1(4, {{2, q(1)}, {3, q(1)}}), Series1<Rational>(4)}, 4);
    ck.expect(f.x == S::variable(Var::u, 4), "x = u");
    ck.expect(f.y == poly(4, {{1, 1, q(2)}, {2, 1, q(3)}, {0, 3, q(-1)}}), "y");
    ck.expect(f.z == poly(4, {{3, 0, q(1, 3)}, {1, 2, q(1)}, {4, 0, q(1, 4)}, {2, 2, q(3, 2)}, {0, 4, q(-3, 4)}}), "z");
    ck.expect(f.p == poly(4, {{2, 0, q(1)}, {0, 2, q(-1)}, {3, 0, q(1)}, {1, 2, q(-3)}}), "p");
    ck.expect(f.q == S::variable(Var::v, 4), "q = v");
    const auto pi2 = project_pi2(f, MongeAmpereSystem<Rational>::hess(q(1)));
    ck.expect(pi2[2] == poly(4, {{3, 0, q(2, 3)}, {4, 0, q(3, 4)}, {2, 2, q(-3, 2)}, {0, 4, q(-1, 4)}}),
              "pi2 third component");
    ck.expect(classify_point(f, Leg::pi1).verdict == Verdict::swallowtail, "pi1 swallowtail");
    ck.expect(classify_point(f, Leg::pi2).verdict == Verdict::cuspidal_edge, "pi2 cuspidal edge");
}

// 2. Normal forms through the exact path.
void normal_forms(Check &ck)
{
    const int n = 6;
    const Jet cusp{S::variable(Var::u, n), poly(n, {{0, 2, q(1)}}), poly(n, {{0, 3, q(2, 3)}}), S(n),
                   S::variable(Var::v, n), Chart::adapted};
    ck.expect(delta_series(cusp, Leg::pi1) == poly(n - 1, {{0, 1, q(2)}}), "cusp Delta = 2v");
    const auto rc = classify_point(cusp, Leg::pi1);
    ck.expect(rc.det == 1, "cusp det = 1");
    ck.expect(rc.verdict == Verdict::cuspidal_edge, "cusp verdict");

    const Jet tail{S::variable(Var::u, n), poly(n, {{0, 3, q(1)}, {1, 1, q(1)}}),
                   poly(n, {{0, 4, q(3, 4)}, {1, 2, q(1, 2)}}), poly(n, {{0, 2, q(-1, 2)}}), S::variable(Var::v, n),
                   Chart::adapted};
    ck.expect(delta_series(tail, Leg::pi1) == poly(n - 1, {{0, 2, q(3)}, {1, 0, q(1)}}), "swallowtail Delta");
    const auto rs = classify_point(tail, Leg::pi1);
    ck.expect(rs.det == 0, "swallowtail det = 0");
    const Rational v1 = rs.tangent[1];
    ck.expect(v1 != 0 && abs_value(rs.det_derivative) == 6 * v1 * v1, "|det'| = 6 v'(0)^2");
    ck.expect(rs.verdict == Verdict::swallowtail, "swallowtail verdict");
}

// 3. Contact and omega residuals for random rational data.
void residual_suite(Check &ck)
{
    RationalGen gen(301);
    const int n = 6;
    auto check = [&](const Jet &f, const MongeAmpereSystem<Rational> &sys, const std::string &what) {
        ck.expect(contact_residual(f).exact_zero, what + " theta");
        ck.expect(ma_residual(f, sys).exact_zero, what + " omega");
    };
    for (int t = 0; t < 100; ++t) {
        check(build_hess_positive(ComplexSeries1<Rational>{gen.germ(n, n), gen.germ(n, n)}, n),
              MongeAmpereSystem<Rational>::hess(q(1)), "hess+1");
        check(build_hess_negative(gen.germ(n, n), gen.germ(n, n), n), MongeAmpereSystem<Rational>::hess(q(-1)),
              "hess-1");
        for (const Rational &c : {q(1), q(-1)}) {
            auto z0 = gen.germ(n, n);
            z0.at(1) = 0;
            const auto f = lift_gauss(solve_gauss_ck(c, z0, gen.germ(n, n), n), c);
            check(f, MongeAmpereSystem<Rational>::gauss(c), "gauss");
        }
        check(build_developable(gen.germ(n, n), gen.germ(n, n), n), MongeAmpereSystem<Rational>::hess(q(0)),
              "developable");
    }
}

// 4. Degree <= 4 prolongation coefficients against the closed forms.
void ck_relations(Check &ck)
{
    RationalGen gen(401);
    for (int t = 0; t < 100; ++t) {
        const Rational c = gen.nonzero();
        const Rational b = gen.next(), cc = gen.next(), f = gen.next(), g = gen.next(), k = gen.next(),
                       l = gen.next();
        const auto z0 = poly1(6, {{2, cc / 2}, {3, g / 6}, {4, l / 24}});
        const auto z1 = poly1(6, {{1, b}, {2, f / 2}, {3, k / 6}});
        const auto zz = solve_gauss_ck(c, z0, z1, 6);
        const Rational a = -c * cc, d = -c * f, e = -c * g;
        const Rational i = 4 * c * c * b * cc * cc - c * k;
        const Rational j = -4 * c * (b * b + 1) * cc - c * l;
        const Rational h = -4 * c * c * c * cc * cc * cc + 4 * c * c * (b * b + 1) * cc + c * c * l;
        const auto expected =
            poly(4, {{2, 0, a / 2}, {1, 1, b}, {0, 2, cc / 2}, {3, 0, d / 6}, {2, 1, e / 2}, {1, 2, f / 2},
                     {0, 3, g / 6}, {4, 0, h / 24}, {3, 1, i / 6}, {2, 2, j / 4}, {1, 3, k / 6}, {0, 4, l / 24}});
        ck.expect(zz.truncated(4) == expected, "closed form");
    }
}

// 5. f*(dx^dy) = f*(dp^dq) on Hess = 1 jets, and the two loci coincide.
void sing1_identity(Check &ck)
{
    RationalGen gen(501);
    for (int t = 0; t < 100; ++t) {
        const auto f = build_hess_positive(ComplexSeries1<Rational>{gen.germ(7, 7), gen.germ(7, 7)}, 7);
        ck.expect((wedge_pullback(f.x, f.y) - wedge_pullback(f.p, f.q)).is_zero(), "dx^dy - dp^dq");
        ck.expect(delta_series(f, Leg::pi1) == delta_series(f, Leg::pi2), "Delta_pi1 = Delta_pi2");
    }
    const auto &t = sweeps().at("hess1");
    ck.expect(t.singular_points > 0 && t.simultaneity_violations == 0, "sweep simultaneity");
    // A non-solution Legendrian jet separates the loci: the developable pi2 is singular everywhere.
    RationalGen g2(502);
    const auto d = build_developable(g2.germ(6, 6), poly1(6, {{1, q(1)}}), 6);
    ck.expect(!delta_series(d, Leg::pi1).is_zero() && delta_series(d, Leg::pi2).is_zero(), "contrast");
}

// 6. Stratum predictions, exact and float.
void stratification(Check &ck)
{
    const int per = 50;
    auto verdicts = [&](const Jet &f, const Stratum &s, const std::string &label) {
        ck.expect(label.ends_with(s.label) && s.generic, label + " stratum");
        const auto fd = jet_cast<double>(f);
        ck.expect(classify_point(f, Leg::pi1).verdict == *s.pi1, label + " pi1 exact");
        ck.expect(classify_point(fd, Leg::pi1, {}, 1e-9).verdict == *s.pi1, label + " pi1 float");
        if (s.pi2) {
            ck.expect(classify_point(f, Leg::pi2).verdict == *s.pi2, label + " pi2 exact");
            ck.expect(classify_point(fd, Leg::pi2, {}, 1e-9).verdict == *s.pi2, label + " pi2 float");
        }
    };

    RationalGen gen(601);
    const std::vector<std::pair<std::string, std::array<int, 6>>> hess{
        {"(i)", {1, -1, -1, -1, -1, -1}},
        {"(ii)", {0, -1, 1, 1, -1, -1}},
        {"(iii)", {0, -1, 1, 0, 1, -1}},
        {"(iv)", {0, -1, 0, 1, 1, -1}},
    };
    for (const auto &[label, req] : hess) {
        for (int t = 0; t < per; ++t) {
            std::array<Rational, 6> c;
            for (int k = 0; k < 6; ++k) {
                c[k] = pick(gen, req[k]);
            }
            verdicts(hess1_jet(c), stratify_hess1(c[0], c[1], c[2], c[3], c[4], c[5]), label);
        }
    }
    const std::vector<std::pair<std::string, std::array<int, 6>>> gauss{
        {"W0", {-1, 1, -1, -1, -1, -1}},
        {"W1", {-1, 0, 1, 1, -1, -1}},
        {"W1_2", {-1, 0, 1, 0, -1, 1}},
        {"W2_2", {-1, 0, 0, 1, -1, 1}},
    };
    for (const auto &[label, req] : gauss) {
        for (int t = 0; t < per; ++t) {
            std::array<Rational, 6> k;
            for (int i = 0; i < 6; ++i) {
                k[i] = pick(gen, req[i]);
            }
            const Rational c = gen.nonzero();
            verdicts(gauss_jet(c, k), stratify_gauss(k[0], k[1], k[2], k[3], k[4], k[5]), label);
        }
    }
    const std::vector<std::pair<std::string, std::array<int, 4>>> dev{
        {"(i)", {1, -1, -1, -1}},
        {"(ii)", {0, 1, 1, -1}},
        {"(iii)", {0, 0, 1, 1}},
    };
    for (const auto &[label, req] : dev) {
        for (int t = 0; t < per; ++t) {
            std::array<Rational, 4> k;
            for (int i = 0; i < 4; ++i) {
                k[i] = pick(gen, req[i]);
            }
            verdicts(developable_jet(k, gen), stratify_developable(k[0], k[1], k[2], k[3]), "dev " + label);
        }
    }
}

// 7. Open umbrella.
void open_umbrella_checks(Check &ck)
{
    const auto f = open_umbrella<Rational>(9);
    ck.expect(contact_residual(f).exact_zero, "theta");
    // The residual is affine in c; its value at c = 0 and its slope pin it down for every c.
    const auto r0 = ma_residual(f, MongeAmpereSystem<Rational>::hess(q(0))).residual[0];
    const auto r1 = ma_residual(f, MongeAmpereSystem<Rational>::hess(q(1))).residual[0];
    const int m = r0.order();
    ck.expect(r0 == poly(m, {{0, 3, q(9, 2)}}), "constant part (9/2) v^3");
    ck.expect(r1 - r0 == poly(m, {{0, 1, q(2)}}), "slope 2v");
    for (const Rational &c : {q(-3), q(-1, 2), q(1, 3), q(2)}) {
        const auto r = ma_residual(f, MongeAmpereSystem<Rational>::hess(c)).residual[0];
        ck.expect(r == poly(m, {{0, 1, 2 * c}, {0, 3, q(9, 2)}}) && !r.is_zero(), "2cv + (9/2)v^3");
    }
    for (int d = 3; d <= 8; ++d) {
        const auto rep = fullness_check(f, d);
        const std::array<Rational, 5> z_axis{0, 0, 1, 0, 0};
        ck.expect(rep.dimension() == 1 && rep.basis[0] == z_axis && rep.full,
                  "degree " + std::to_string(d) + " admissible space = z-axis");
    }
}

// 8. Developable collapse.
void developable_collapse(Check &ck)
{
    RationalGen gen(801);
    for (int t = 0; t < 100; ++t) {
        const auto f = build_developable(gen.germ(7, 7), gen.germ(7, 7), 7);
        const auto c = project_pi2(f, MongeAmpereSystem<Rational>::hess(q(0)));
        ck.expect(wedge_pullback(c[0], c[1]).is_zero() && wedge_pullback(c[0], c[2]).is_zero()
                      && wedge_pullback(c[1], c[2]).is_zero(),
                  "pi2 minors");
    }
    const auto &t = sweeps().at("developable");
    const std::set<std::string> allowed{"immersion", "cuspidal_edge", "swallowtail"};
    for (const auto &[leg, m] : t.verdicts) {
        for (const auto &[k, v] : m) {
            ck.expect(leg == "pi1" && allowed.count(k) == 1, "pi1 verdict " + k);
        }
    }
    ck.expect(t.singular_points > 0, "singular points found");
}

// 9. Genericity sweeps.
void genericity(Check &ck)
{
    for (const auto &name : sweep_families()) {
        const auto &t = sweeps().at(name);
        ck.expect(t.samples == 200, name + " samples");
        ck.expect(t.unresolved == 0, name + " unresolved = " + std::to_string(t.unresolved));
        ck.expect(t.deep_hits == 0, name + " deep hits = " + std::to_string(t.deep_hits));
    }
    for (const auto &name : sweep_families()) {
        const auto again = sample_and_tally(sweep_base(name), 0.5, 200, 16, 2024);
        ck.expect(to_json(again).dump() == to_json(sweeps().at(name)).dump(), name + " reproducible");
        ck.expect(to_csv(again) == to_csv(sweeps().at(name)), name + " csv reproducible");
    }
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<void(Check &)>>> criteria{
        {"golden worked example: components, dual height, pi1 swallowtail / pi2 cuspidal edge", golden_example},
        {"normal forms: cusp det = 1, swallowtail det = 0 with |det'| = 6 v'(0)^2", normal_forms},
        {"residual suite: 100 random rational jets per family, theta and omega exactly zero", residual_suite},
        {"prolongation closed forms through degree 4 on 100 random tuples", ck_relations},
        {"Hess = 1 identity dx^dy = dp^dq and simultaneous loci", sing1_identity},
        {"stratum cross-validation: 50 samples per stratum, exact and float", stratification},
        {"open umbrella: theta = 0, omega = 2cv + (9/2)v^3, z-axis fullness at degrees 3..8", open_umbrella_checks},
        {"developable collapse: pi2 minors vanish, pi1 verdicts generic", developable_collapse},
        {"genericity sweeps: 0 unresolved, 0 deep hits, reproducible tallies", genericity},
    };
    int failures = 0;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Check ck;
        const auto t0 = std::chrono::steady_clock::now();
        std::string error;
        try {
            criteria[k].second(ck);
        } catch (const std::exception &e) {
            error = e.what();
        }
        const bool pass = error.empty() && ck.ok();
        failures += pass ? 0 : 1;
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %zu: %s  %s  [%d checks, %.2fs]\n", k + 1, pass ? "PASS" : "FAIL",
                    criteria[k].first.c_str(), ck.count(), secs);
        if (!error.empty()) {
            std::printf("    exception: %s\n", error.c_str());
        }
        for (const auto &f : ck.failures()) {
            std::printf("    failed: %s\n", f.c_str());
        }
    }
    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("acceptance: %d/%zu criteria passed in %.2fs\n", static_cast<int>(criteria.size()) - failures,
                criteria.size(), total);
    return failures;
}
