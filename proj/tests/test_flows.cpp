#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_support.hpp"

namespace polyflow {
namespace {

using namespace polyflow::testing;

double flux_sum(const Polygon& p, const std::vector<double>& f) {
    const auto len = edge_lengths(p);
    double s = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) s += len[j] * f[j];
    return s;
}

std::vector<double> exact_point_source_flux(const Polygon& p, Vec2 pole = {}) {
    const auto w = vertices(p);
    const auto len = edge_lengths(p);
    std::vector<double> f(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) f[j] = subtended_angle(w[p.cls().prev(j)], w[j], pole) / len[j];
    return f;
}

TEST(Pcf, SquareAndHexagon) {
    for (double f : eval_pcf(unit_square())) EXPECT_NEAR(f, -2.0, 1e-15);
    EXPECT_NEAR(*VelocityLaw::pcf().declared_mu(*square_class()), -8.0, 1e-14);
    for (double f : eval_pcf(regular_hexagon())) EXPECT_NEAR(f, -1.0, 1e-14);
    EXPECT_NEAR(*VelocityLaw::pcf().declared_mu(*hexagon_class()), -12.0 * std::tan(kPi / 6), 1e-14);
    EXPECT_NEAR(*VelocityLaw::pcf().declared_mu(*hexagon_class()), -6.9282, 1e-4);
}

TEST(Pcf, ScaleCovariance) {
    std::mt19937_64 rng(21);
    for (const Polygon& base : class_bases()) {
        const Polygon p = random_member(base, rng);
        const auto f = eval_pcf(p);
        for (double s : {0.3, 1.7, 5.0}) {
            const auto fs = eval_pcf(scale(p, s));
            for (std::size_t j = 0; j < f.size(); ++j) EXPECT_NEAR(fs[j], f[j] / s, 1e-12);
        }
    }
}

TEST(Pcf, CollapseThrows) {
    try {
        eval_pcf(Polygon(square_class(), {0.5, 0.5, -0.5, 0.5}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::EdgeCollapse);
    }
}

TEST(ApPcf, RegularPolygonsAreStationary) {
    for (double f : eval_ap_pcf(unit_square())) EXPECT_NEAR(f, 0.0, 1e-15);
    for (double f : eval_ap_pcf(regular_hexagon(0.7))) EXPECT_NEAR(f, 0.0, 1e-14);
    std::vector<double> a;
    for (int k = 0; k < 7; ++k) a.push_back(0.3 + 2 * kPi * k / 7);
    for (double f : eval_ap_pcf(Polygon(class_from_normals(a), std::vector<double>(7, 2.0)))) {
        EXPECT_NEAR(f, 0.0, 1e-14);
    }
}

TEST(ApPcf, Rectangle) {
    const auto k = curvatures(rectangle());
    EXPECT_LE(max_abs_diff(k, {2, 1, 2, 1}), 1e-15);
    const auto f = eval_ap_pcf(rectangle());
    EXPECT_LE(max_abs_diff(f, {-2.0 / 3, 1.0 / 3, -2.0 / 3, 1.0 / 3}), 1e-15);
}

TEST(Cas, ResidualsOnRandomPolygons) {
    std::mt19937_64 rng(17);
    const auto pcf = VelocityLaw::pcf();
    const auto ap = VelocityLaw::ap_pcf();
    for (const Polygon& base : class_bases()) {
        for (int i = 0; i < 100; ++i) {
            const Polygon p = random_member(base, rng);
            EXPECT_LE(std::abs(cas_residual(pcf, p, 0.0)), 1e-10);
            EXPECT_LE(std::abs(cas_residual(ap, p, 0.0)), 1e-12);
        }
    }
}

TEST(Cas, NoDeclaredMu) {
    const auto law = VelocityLaw::custom("zero", [](const Polygon& p, double) { return std::vector<double>(p.size()); });
    EXPECT_FALSE(law.declared_mu(*square_class()).has_value());
    try {
        cas_residual(law, unit_square(), 0.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::NoDeclaredMu);
    }
}

TEST(VelocityLaw, WrongSpeedCountRejected) {
    const auto law = VelocityLaw::custom("short", [](const Polygon&, double) { return std::vector<double>(2); });
    EXPECT_THROW(law.evaluate(unit_square(), 0.0), Error);
}

TEST(VelocityLaw, KindsAndNames) {
    EXPECT_EQ(to_string(VelocityLaw::pcf().kind()), "pcf");
    EXPECT_EQ(to_string(VelocityLaw::ap_pcf().kind()), "ap_pcf");
    const auto adv = VelocityLaw::advected(VectorField::rotation(1.0), 6);
    EXPECT_EQ(adv.kind(), FlowKind::Advected);
    EXPECT_EQ(adv.quadrature_order(), 6u);
    ASSERT_NE(adv.field(), nullptr);
    EXPECT_EQ(adv.field()->name, "rotation");
    EXPECT_NEAR(*adv.declared_mu(*square_class()), 0.0, 1e-15);
    EXPECT_EQ(*VelocityLaw::advected(VectorField::rotation(1.0), 4, 3.5).declared_mu(*square_class()), 3.5);
}

TEST(EdgeFlux, ConstantField) {
    const auto u = VectorField::uniform({1.0, 0.0});
    std::mt19937_64 rng(2);
    for (const Polygon& base : class_bases()) {
        const Polygon p = random_member(base, rng);
        const auto f = eval_advected(p, u, 3);
        for (std::size_t j = 0; j < p.size(); ++j) EXPECT_NEAR(f[j], p.cls().normal(j).x, 1e-15);
        EXPECT_NEAR(flux_sum(p, f), 0.0, 1e-12);
    }
}

TEST(EdgeFlux, Rotation) {
    const auto u = VectorField::rotation(1.0);
    std::mt19937_64 rng(4);
    for (const Polygon& base : class_bases()) {
        const Polygon p = random_member(base, rng);
        const auto w = vertices(p);
        const auto f = eval_advected(p, u, 1);
        for (std::size_t j = 0; j < p.size(); ++j) {
            const Vec2 m = 0.5 * (w[p.cls().prev(j)] + w[j]);
            const Vec2 n = p.cls().normal(j);
            EXPECT_NEAR(f[j], -m.y * n.x + m.x * n.y, 1e-14);
        }
        EXPECT_NEAR(flux_sum(p, f), 0.0, 1e-12);
    }
}

TEST(EdgeFlux, CubicFieldsExactAtOrderTwo) {
    // Simpson's rule is exact for cubics and serves as the symbolic reference.
    const VectorField u{"cubic",
                        [](Vec2 x) {
                            return Vec2{x.x * x.x * x.x - 2.0 * x.x * x.y + 0.5, x.x * x.y * x.y + x.y * x.y - 3.0 * x.x};
                        },
                        {}};
    std::mt19937_64 rng(8);
    for (const Polygon& base : class_bases()) {
        for (int i = 0; i < 20; ++i) {
            const Polygon p = random_member(base, rng);
            const auto w = vertices(p);
            for (std::size_t j = 0; j < p.size(); ++j) {
                const Vec2 a = w[p.cls().prev(j)];
                const Vec2 b = w[j];
                const Vec2 n = p.cls().normal(j);
                const double simpson =
                    (dot(u(a), n) + 4.0 * dot(u(0.5 * (a + b)), n) + dot(u(b), n)) / 6.0;
                EXPECT_NEAR(edge_average_flux(p, j, u, 2), simpson, 1e-12);
            }
        }
    }
}

TEST(EdgeFlux, PointSourceMatchesAngleFormula) {
    // Every edge of the regular hexagon subtends pi/3 at its centre.
    const auto u = VectorField::point_source({0.0, 0.0});
    const Polygon p = regular_hexagon();
    const auto exact = exact_point_source_flux(p);
    for (double f : exact) EXPECT_NEAR(f * edge_lengths(p)[0], kPi / 3, 1e-14);
    EXPECT_LE(max_abs_diff(eval_advected(p, u, 8), exact), 1e-8);
}

TEST(EdgeFlux, PointSourceExactAngleSum) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 50; ++i) {
        const Polygon p = random_member(unit_square(), rng, 0.05);
        const auto w = vertices(p);
        if (winding_number(w, {0.0, 0.0}) == 0) continue;
        EXPECT_NEAR(flux_sum(p, exact_point_source_flux(p)), 2 * kPi, 1e-12);
    }
}

TEST(EdgeFlux, ResidualShrinksWithOrder) {
    const auto u = VectorField::point_source({0.1, 0.05});
    const Polygon p = unit_square();
    double previous = 1.0;
    for (std::size_t order : {2u, 4u, 8u}) {
        const auto law = VelocityLaw::advected(u, order, 2 * kPi);
        const double r = std::abs(cas_residual(law, p, 0.0));
        EXPECT_LT(r, previous) << order;
        previous = r;
    }
}

TEST(EdgeFlux, SingularFlux) {
    EXPECT_NEAR(singular_flux(VectorField::point_source({0.3, -0.2})), 2 * kPi, 1e-12);
    EXPECT_NEAR(singular_flux(VectorField::point_source({0.0, 0.0}, 0.5)), kPi, 1e-12);
    EXPECT_EQ(singular_flux(VectorField::rotation(2.0)), 0.0);
    const auto law = VelocityLaw::advected(VectorField::point_source({0.0, 0.0}));
    EXPECT_NEAR(*law.declared_mu(*square_class()), 2 * kPi, 1e-12);
}

TEST(EdgeFlux, SingularPointOnEdge) {
    const auto u = VectorField::point_source({0.5, 0.0});
    try {
        edge_average_flux(unit_square(), 0, u, 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SingularFieldOnEdge);
    }
    EXPECT_NO_THROW(edge_average_flux(unit_square(), 1, u, 4));
}

TEST(EdgeFlux, SingularPointOutside) {
    try {
        eval_advected(unit_square(), VectorField::point_source({3.0, 3.0}), 4);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::GeometryViolation);
    }
}

TEST(LipschitzProbe, ConstantLawIsZero) {
    const auto law = VelocityLaw::custom("const", [](const Polygon& p, double) { return std::vector<double>(p.size(), 1.5); });
    EXPECT_EQ(lipschitz_probe(law, unit_square(), 0.0, 0.01, 100, 1), 0.0);
}

TEST(LipschitzProbe, ApPcfStableAcrossSeeds) {
    const auto law = VelocityLaw::ap_pcf();
    std::vector<double> values;
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) values.push_back(lipschitz_probe(law, unit_square(), 0.0, 0.01, 400, seed));
    double mean = 0.0;
    for (double v : values) mean += v / static_cast<double>(values.size());
    EXPECT_GT(mean, 0.0);
    EXPECT_TRUE(std::isfinite(mean));
    for (double v : values) EXPECT_NEAR(v, mean, 0.2 * mean);
}

TEST(LipschitzProbe, GrowsAsShortestEdgeShrinks) {
    const auto law = VelocityLaw::pcf();
    double previous = 0.0;
    for (double eps : {0.4, 0.2, 0.1, 0.05}) {
        // rectangle with edges eps, 1, eps, 1
        const Polygon p(square_class(), {0.5, 0.5 * eps, 0.5, 0.5 * eps});
        const double lip = lipschitz_probe(law, p, 0.0, 0.1 * eps, 200, 7);
        EXPECT_GT(lip, previous) << eps;
        previous = lip;
    }
}

TEST(LipschitzProbe, BallLeavingAdmissibleSet) {
    try {
        lipschitz_probe(VelocityLaw::pcf(), unit_square(), 0.0, 3.0, 50, 0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::InvalidBall);
    }
}

}  // namespace
}  // namespace polyflow
