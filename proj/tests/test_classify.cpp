#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include <masing/classify.hpp>
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

Jet cusp_form(int n = 6)
{
    return {S::variable(Var::u, n), poly(n, {{0, 2, q(1)}}), poly(n, {{0, 3, q(2, 3)}}), S(n), S::variable(Var::v, n),
            Chart::adapted};
}

Jet swallowtail_form(int n = 6)
{
    return {S::variable(Var::u, n), poly(n, {{0, 3, q(1)}, {1, 1, q(1)}}),
            poly(n, {{0, 4, q(3, 4)}, {1, 2, q(1, 2)}}), poly(n, {{0, 2, q(-1, 2)}}), S::variable(Var::v, n),
            Chart::adapted};
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
    // p = phi(v) with phi'' (0) = C; y(0, v) = psi(v) with (psi', psi'', psi''') = (Bt, Ct, Dt).
    auto phi = poly1(n, {{1, gen.next()}, {2, k[2] / 2}, {3, gen.next()}, {4, gen.next()}});
    auto psi = poly1(n, {{1, k[0]}, {2, k[1] / 2}, {3, k[3] / 6}, {4, gen.next()}});
    return build_developable(phi, psi, n);
}

// Random value honoring a zero / nonzero requirement; -1 leaves it free.
Rational pick(RationalGen &gen, int req)
{
    if (req == 0) {
        return Rational(0);
    }
    return req == 1 ? gen.nonzero() : gen.next();
}

void expect_verdicts(const Jet &f, const Stratum &s, const std::string &what)
{
    ASSERT_TRUE(s.generic) << what;
    const auto r1 = classify_point(f, Leg::pi1);
    EXPECT_EQ(r1.verdict, *s.pi1) << what << " pi1 exact";
    const auto fd = jet_cast<double>(f);
    EXPECT_EQ(classify_point(fd, Leg::pi1).verdict, *s.pi1) << what << " pi1 float";
    if (s.pi2) {
        EXPECT_EQ(classify_point(f, Leg::pi2).verdict, *s.pi2) << what << " pi2 exact";
        EXPECT_EQ(classify_point(fd, Leg::pi2).verdict, *s.pi2) << what << " pi2 float";
    }
}

} // namespace

TEST(Delta, Examples)
{
    EXPECT_EQ(delta_series(cusp_form(), Leg::pi1), poly(5, {{0, 1, q(2)}}));
    EXPECT_EQ(delta_series(swallowtail_form(), Leg::pi1), poly(5, {{0, 2, q(3)}, {1, 0, q(1)}}));
    const auto f = build_hess_positive(ComplexSeries1<Rational>{poly1(4, {{2, q(1)}, {3, q(1)}}), Series1<Rational>(4)}, 4);
    EXPECT_EQ(delta_series(f, Leg::pi1), poly(3, {{1, 0, q(2)}, {2, 0, q(3)}, {0, 2, q(-3)}}));
    EXPECT_EQ(delta_series(f, Leg::pi2), differentiate(f.p, Var::u));
}

TEST(ClassifyExact, CuspidalEdgeNormalForm)
{
    const auto r = classify_point(cusp_form(), Leg::pi1);
    EXPECT_EQ(r.verdict, Verdict::cuspidal_edge);
    EXPECT_EQ(r.det, 1);
    EXPECT_EQ(r.eta, (Point<Rational>{0, 1}));
    EXPECT_EQ(r.tangent, (Point<Rational>{1, 0}));
}

TEST(ClassifyExact, SwallowtailNormalForm)
{
    const auto r = classify_point(swallowtail_form(), Leg::pi1);
    EXPECT_EQ(r.verdict, Verdict::swallowtail);
    EXPECT_EQ(r.det, 0);
    // gamma = (-3 t^2, t): v'(0) = 1, |u''(0)| = 6 v'(0)^2
    EXPECT_EQ(r.tangent, (Point<Rational>{0, 1}));
    EXPECT_EQ(r.det_derivative, -6);
    EXPECT_EQ(r.eta, (Point<Rational>{0, 1}));
}

TEST(ClassifyExact, WorkedExample)
{
    const auto f = build_hess_positive(ComplexSeries1<Rational>{poly1(4, {{2, q(1)}, {3, q(1)}}), Series1<Rational>(4)}, 4);
    const auto r1 = classify_point(f, Leg::pi1);
    EXPECT_EQ(r1.verdict, Verdict::swallowtail);
    EXPECT_EQ(r1.det_derivative, 3);
    const auto r2 = classify_point(f, Leg::pi2);
    EXPECT_EQ(r2.verdict, Verdict::cuspidal_edge);
    EXPECT_EQ(r2.eta, (Point<Rational>{1, 0}));
}

TEST(ClassifyExact, ImmersionDegenerateAndOrder)
{
    const auto f = hess1_jet({1, 0, 0, 0, 0, 0});
    EXPECT_EQ(classify_point(f, Leg::pi1).verdict, Verdict::immersion);
    EXPECT_EQ(classify_point(f, Leg::pi2).verdict, Verdict::immersion);
    const Jet strip{S::variable(Var::u, 5), S(5), S(5), S(5), S::variable(Var::v, 5), Chart::adapted};
    EXPECT_EQ(classify_point(strip, Leg::pi1).verdict, Verdict::degenerate);
    EXPECT_THROW(classify_point(cusp_form().truncated(2), Leg::pi1), std::invalid_argument);
}

TEST(ClassifyExact, RecenteredPoints)
{
    for (const auto &t : {q(1, 3), q(-2), q(5, 7)}) {
        const auto rc = classify_point(cusp_form(), Leg::pi1, Point<Rational>{t, 0});
        EXPECT_EQ(rc.verdict, Verdict::cuspidal_edge) << t;
        // Away from the origin the swallowtail locus u = -3 v^2 consists of cuspidal edges.
        const auto rs = classify_point(swallowtail_form(), Leg::pi1, Point<Rational>{Rational(-3 * t * t), t});
        EXPECT_EQ(rs.verdict, Verdict::cuspidal_edge) << t;
        EXPECT_EQ(rs.delta, 0);
        const auto ri = classify_point(swallowtail_form(), Leg::pi1, Point<Rational>{t, t});
        EXPECT_EQ(ri.verdict, Verdict::immersion);
    }
}

TEST(ClassifyFloat, NormalFormsOnTracedLocus)
{
    const auto c = classify_point(jet_cast<double>(cusp_form()), Leg::pi1);
    EXPECT_EQ(c.verdict, Verdict::cuspidal_edge);
    EXPECT_NEAR(c.det, 1.0, 1e-12);
    const auto s = classify_point(jet_cast<double>(swallowtail_form()), Leg::pi1);
    EXPECT_EQ(s.verdict, Verdict::swallowtail);
    EXPECT_NEAR(s.det, 0.0, 1e-12);
    EXPECT_NEAR(std::abs(s.det_derivative), 6.0, 1e-4);
}

TEST(ClassifyFloat, AgreesWithImplicitPathAwayFromOrigin)
{
    const auto f = jet_cast<double>(
        build_hess_positive(ComplexSeries1<Rational>{poly1(6, {{2, q(1)}, {3, q(1)}}), Series1<Rational>(6)}, 6));
    FrontField field(f, Leg::pi1);
    ContinuationOptions opt;
    opt.bounds = std::array<double, 4>{-0.5, 0.5, -0.5, 0.5};
    const auto locus = trace_singular_locus(field, {0.0, 0.0}, opt);
    for (std::size_t k = 0; k < locus.points.size(); k += 7) {
        const auto &x = locus.points[k];
        const auto a = classify_point_traced(field, x, opt);
        const auto b = classify_point_implicit(f, Leg::pi1, x);
        EXPECT_EQ(a.verdict, b.verdict) << x[0] << "," << x[1];
    }
}

TEST(Trace, SwallowtailLocus)
{
    const auto f = jet_cast<double>(swallowtail_form());
    const auto locus = trace_singular_locus(f, Leg::pi1, {0.0, 0.0}, 1e-2, 100);
    EXPECT_EQ(locus.points.size(), 201u);
    for (const auto &x : locus.points) {
        EXPECT_NEAR(x[0], -3 * x[1] * x[1], 1e-10);
    }
    for (std::size_t k = 1; k < locus.points.size(); ++k) {
        const double d = std::hypot(locus.points[k][0] - locus.points[k - 1][0], locus.points[k][1] - locus.points[k - 1][1]);
        EXPECT_GE(d, 1e-2 * 0.999);
        EXPECT_LE(d, 1e-2 * 1.2);
    }
}

TEST(Trace, CuspLocusAndWorkedExample)
{
    const auto c = trace_singular_locus(jet_cast<double>(cusp_form()), Leg::pi1, {0.3, 0.05}, 1e-2, 50);
    for (const auto &x : c.points) {
        EXPECT_NEAR(x[1], 0.0, 1e-12);
    }
    const auto f = jet_cast<double>(
        build_hess_positive(ComplexSeries1<Rational>{poly1(4, {{2, q(1)}, {3, q(1)}}), Series1<Rational>(4)}, 4));
    const auto w = trace_singular_locus(f, Leg::pi1, {0.0, 0.0}, 1e-3, 20);
    for (const auto &x : w.points) {
        // u = (3/2) v^2 + O(v^3)
        EXPECT_NEAR(x[0], 1.5 * x[1] * x[1], 20 * std::pow(std::abs(x[1]), 3) + 1e-12);
    }
}

TEST(Trace, Errors)
{
    const LegendrianMapJet<double> strip{Series2<double>::variable(Var::u, 4), Series2<double>(4), Series2<double>(4),
                                         Series2<double>(4), Series2<double>::variable(Var::v, 4), Chart::adapted};
    EXPECT_THROW(trace_singular_locus(strip, Leg::pi1, {0.0, 0.0}), locus_error);
    // Delta = 1 + v^2 never vanishes.
    const LegendrianMapJet<double> none{Series2<double>::variable(Var::u, 4),
                                        Series2<double>::variable(Var::v, 4)
                                            + Series2<double>::monomial(0, 3, 1.0 / 3.0, 4),
                                        Series2<double>(4), Series2<double>(4), Series2<double>(4), Chart::general};
    EXPECT_THROW(trace_singular_locus(none, Leg::pi1, {0.5, 0.5}), locus_error);
}

TEST(KernelField, Examples)
{
    const auto cf = jet_cast<double>(cusp_form());
    FrontField field(cf, Leg::pi1);
    const auto locus = trace_singular_locus(field, {0.0, 0.0});
    for (const auto &e : kernel_field(field, locus.points)) {
        EXPECT_NEAR(e[0], 0.0, 1e-12);
        EXPECT_NEAR(e[1], 1.0, 1e-12);
    }
    const LegendrianMapJet<double> strip{Series2<double>::variable(Var::u, 4), Series2<double>(4), Series2<double>(4),
                                         Series2<double>(4), Series2<double>::variable(Var::v, 4), Chart::adapted};
    FrontField sf(strip, Leg::pi1);
    for (const auto &x : {Point<double>{0, 0}, Point<double>{0.3, -0.2}}) {
        const auto [e, sigma] = sf.kernel(x);
        EXPECT_NEAR(e[0], 0.0, 1e-15);
        EXPECT_NEAR(e[1], 1.0, 1e-15);
        EXPECT_NEAR(sigma, 1.0, 1e-15);
    }
}

TEST(DetSignChanges, FindsTheSwallowtail)
{
    const auto f = jet_cast<double>(swallowtail_form());
    FrontField field(f, Leg::pi1);
    const auto locus = trace_singular_locus(field, {-0.03, 0.1});
    const auto hits = det_sign_changes(field, locus);
    ASSERT_EQ(hits.size(), 1u);
    EXPECT_NEAR(hits[0][0], 0.0, 1e-10);
    EXPECT_NEAR(hits[0][1], 0.0, 1e-10);
    EXPECT_EQ(classify_point_traced(field, hits[0]).verdict, Verdict::swallowtail);
}

TEST(Stratify, Examples)
{
    const auto iii = stratify_hess1(q(0), q(0), q(1), q(0), q(1), q(0));
    EXPECT_EQ(iii.label, "(iii)");
    EXPECT_EQ(*iii.pi1, Verdict::swallowtail);
    EXPECT_EQ(*iii.pi2, Verdict::cuspidal_edge);
    EXPECT_EQ(stratify_hess1(q(1), q(0), q(0), q(0), q(0), q(0)).label, "(i)");
    EXPECT_EQ(stratify_hess1(q(0), q(0), q(1), q(1), q(0), q(0)).label, "(ii)");
    EXPECT_EQ(stratify_hess1(q(0), q(0), q(0), q(1), q(1), q(0)).label, "(iv)");
    EXPECT_FALSE(stratify_hess1(q(0), q(5), q(0), q(0), q(1), q(1)).generic);

    const auto w0 = stratify_gauss(q(0), q(1), q(0), q(0), q(0), q(0));
    EXPECT_EQ(w0.label, "W0");
    EXPECT_EQ(*w0.pi2, Verdict::immersion);
    EXPECT_EQ(stratify_gauss(q(0), q(0), q(1), q(1), q(0), q(0)).case_label, "(ii)");
    const auto w22 = stratify_gauss(q(0), q(0), q(0), q(1), q(0), q(1));
    EXPECT_EQ(w22.label, "W2_2");
    EXPECT_EQ(w22.case_label, "(iii)");
    EXPECT_EQ(*w22.pi2, Verdict::swallowtail);
    const auto w12 = stratify_gauss(q(0), q(0), q(1), q(0), q(0), q(1));
    EXPECT_EQ(w12.label, "W1_2");
    EXPECT_EQ(*w12.pi1, Verdict::swallowtail);
    EXPECT_EQ(stratify_gauss(q(0), q(0), q(0), q(0), q(0), q(1)).label, "W1_3");
    EXPECT_EQ(stratify_gauss(q(0), q(0), q(0), q(1), q(0), q(0)).label, "W2_3");
    EXPECT_EQ(stratify_gauss(q(0), q(0), q(1), q(0), q(0), q(0)).label, "W3_3");
    EXPECT_EQ(stratify_gauss(q(1), q(0), q(0), q(0), q(1), q(0)).label, "W4");

    EXPECT_EQ(stratify_developable(q(1), q(0), q(0), q(0)).label, "(i)");
    EXPECT_EQ(*stratify_developable(q(0), q(1), q(1), q(0)).pi1, Verdict::cuspidal_edge);
    EXPECT_EQ(*stratify_developable(q(0), q(0), q(1), q(1)).pi1, Verdict::swallowtail);
    EXPECT_FALSE(stratify_developable(q(0), q(1), q(0), q(1)).generic);
    EXPECT_FALSE(stratify_developable(0.0, 1e-12, 1.0, 1e-11).generic);
}

TEST(Stratify, CoefficientsReadBackFromJets)
{
    RationalGen gen(41);
    for (int trial = 0; trial < 20; ++trial) {
        std::array<Rational, 6> c;
        for (auto &x : c) {
            x = gen.next();
        }
        EXPECT_EQ(hess1_coefficients(hess1_jet(c)), c);
        const Rational cc = gen.nonzero();
        EXPECT_EQ(gauss_coefficients(gauss_jet(cc, c, 6)), c);
    }
}

TEST(CrossValidation, Hess1Strata)
{
    // zero / nonzero / free requirements for (a1, b1, a2, b2, a3, b3)
    const std::vector<std::pair<std::string, std::array<int, 6>>> strata{
        {"(i)", {1, -1, -1, -1, -1, -1}},
        {"(ii)", {0, -1, 1, 1, -1, -1}},
        {"(iii)", {0, -1, 1, 0, 1, -1}},
        {"(iv)", {0, -1, 0, 1, 1, -1}},
    };
    RationalGen gen(42);
    for (const auto &[label, req] : strata) {
        for (int trial = 0; trial < 20; ++trial) {
            std::array<Rational, 6> c;
            for (int k = 0; k < 6; ++k) {
                c[k] = pick(gen, req[k]);
            }
            const auto s = stratify_hess1(c[0], c[1], c[2], c[3], c[4], c[5]);
            ASSERT_EQ(s.label, label);
            expect_verdicts(hess1_jet(c), s, label);
        }
    }
}

TEST(CrossValidation, GaussStrata)
{
    // (B, C, F, G, K, L)
    const std::vector<std::pair<std::string, std::array<int, 6>>> strata{
        {"W0", {-1, 1, -1, -1, -1, -1}},
        {"W1", {-1, 0, 1, 1, -1, -1}},
        {"W1_2", {-1, 0, 1, 0, -1, 1}},
        {"W2_2", {-1, 0, 0, 1, -1, 1}},
    };
    RationalGen gen(43);
    for (const auto &[label, req] : strata) {
        for (int trial = 0; trial < 20; ++trial) {
            std::array<Rational, 6> k;
            for (int i = 0; i < 6; ++i) {
                k[i] = pick(gen, req[i]);
            }
            const Rational c = gen.nonzero();
            const auto s = stratify_gauss(k[0], k[1], k[2], k[3], k[4], k[5]);
            ASSERT_EQ(s.label, label);
            expect_verdicts(gauss_jet(c, k), s, label);
        }
    }
}

TEST(CrossValidation, DevelopableStrata)
{
    // (Bt, Ct, C, Dt)
    const std::vector<std::pair<std::string, std::array<int, 4>>> strata{
        {"(i)", {1, -1, -1, -1}},
        {"(ii)", {0, 1, 1, -1}},
        {"(iii)", {0, 0, 1, 1}},
    };
    RationalGen gen(44);
    for (const auto &[label, req] : strata) {
        for (int trial = 0; trial < 20; ++trial) {
            std::array<Rational, 4> k;
            for (int i = 0; i < 4; ++i) {
                k[i] = pick(gen, req[i]);
            }
            const auto f = developable_jet(k, gen);
            EXPECT_EQ(developable_coefficients(f), k);
            const auto s = stratify_developable(k[0], k[1], k[2], k[3]);
            ASSERT_EQ(s.label, label);
            expect_verdicts(f, s, label);
            EXPECT_EQ(classify_point(f, Leg::pi2).verdict, Verdict::degenerate);
        }
    }
}

TEST(Simultaneity, Hess1LegsShareTheLocus)
{
    RationalGen gen(45);
    for (int trial = 0; trial < 30; ++trial) {
        const auto f = build_hess_positive(ComplexSeries1<Rational>{gen.germ(6, 6), gen.germ(6, 6)}, 6);
        EXPECT_EQ(delta_series(f, Leg::pi1), delta_series(f, Leg::pi2));
    }
}

TEST(AdaptChart, RecoversAdaptedChartAfterReparametrization)
{
    const auto f = build_hess_positive(ComplexSeries1<Rational>{poly1(6, {{2, q(1)}, {3, q(1)}}), Series1<Rational>(6)}, 6);
    // (u, v) -> (2u + v + v^2, u - v + u v)
    const auto uu = poly(6, {{1, 0, q(2)}, {0, 1, q(1)}, {0, 2, q(1)}});
    const auto vv = poly(6, {{1, 0, q(1)}, {0, 1, q(-1)}, {1, 1, q(1)}});
    const Jet g{compose(f.x, uu, vv), compose(f.y, uu, vv), compose(f.z, uu, vv), compose(f.p, uu, vv),
                compose(f.q, uu, vv), Chart::general};
    const auto a = adapt_chart(g);
    EXPECT_EQ(a.pair, ChartPair::xq);
    EXPECT_EQ(a.jet.chart, Chart::adapted);
    EXPECT_EQ(a.jet, f);
    EXPECT_EQ(classify_point(a.jet, Leg::pi1).verdict, Verdict::swallowtail);
    // Classification does not depend on the chart.
    EXPECT_EQ(classify_point(g, Leg::pi1).verdict, Verdict::swallowtail);
    EXPECT_EQ(classify_point(g, Leg::pi2).verdict, Verdict::cuspidal_edge);

    const Jet swapped{f.y, f.x, f.z, f.q, f.p, Chart::general};
    const auto b = adapt_chart(swapped);
    EXPECT_EQ(b.pair, ChartPair::yp);
    EXPECT_TRUE(b.swapped);
    EXPECT_EQ(b.jet, f);

    const Jet flat{S(4), S(4), S(4), S(4), S(4), Chart::general};
    EXPECT_THROW(adapt_chart(flat), std::invalid_argument);
}

TEST(ReportJson, Fields)
{
    const auto j = to_json(classify_point(swallowtail_form(), Leg::pi1));
    EXPECT_EQ(j.at("verdict"), "swallowtail");
    EXPECT_EQ(j.at("det_derivative"), "-6");
    EXPECT_EQ(j.at("leg"), "pi1");
    EXPECT_EQ(to_json(stratify_gauss(q(0), q(0), q(1), q(0), q(0), q(1))).at("pi1"), "swallowtail");
}
