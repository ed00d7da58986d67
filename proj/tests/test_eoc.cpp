#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"

namespace polyflow {
namespace {

using namespace polyflow::testing;

Polygon eoc_rectangle() { return Polygon(square_class(), {0.7, 0.5, 0.7, 0.5}); }

TEST(EocTable, Orders) {
    const std::vector<double> taus{0.1, 0.05, 0.025};
    const std::vector<double> errors{4e-2, 1e-2, 2.5e-3};
    const auto rows = eoc_table(taus, errors);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_FALSE(rows[0].order.has_value());
    EXPECT_NEAR(*rows[1].order, 2.0, 1e-12);
    EXPECT_NEAR(*rows[2].order, 2.0, 1e-12);
}

TEST(EocTable, ZeroOrInfiniteErrorHasNoOrder) {
    const std::vector<double> taus{0.1, 0.05, 0.025};
    const std::vector<double> errors{0.0, 1e-3, std::numeric_limits<double>::infinity()};
    const auto rows = eoc_table(taus, errors);
    EXPECT_FALSE(rows[1].order.has_value());
    EXPECT_FALSE(rows[2].order.has_value());
}

TEST(SelfSimilar, ClosedForm) {
    const auto exact = self_similar_pcf(Polygon(square_class(), {1, 1, 1, 1}));
    EXPECT_NEAR(exact(0.3)[2], std::sqrt(0.4), 1e-15);
    EXPECT_THROW(self_similar_pcf(rectangle()), Error);
    // any class works once heights are equal
    EXPECT_NEAR(self_similar_pcf(regular_hexagon(2.0))(1.0)[0], std::sqrt(2.0), 1e-15);
}

TEST(TrajectoryError, AgainstExact) {
    EocProblem<VelocityLaw> problem{Polygon(square_class(), {1, 1, 1, 1}), VelocityLaw::pcf(), 0.3, {}};
    const std::vector<double> taus{1e-2, 5e-3};
    const auto rows = eoc_study(problem, taus, self_similar_pcf(problem.initial));
    for (const auto& r : rows) EXPECT_LE(r.error, 1e-11);
}

TEST(TrajectoryError, EulerAgainstExactIsFirstOrder) {
    EocProblem<VelocityLaw> problem{Polygon(square_class(), {1, 1, 1, 1}), VelocityLaw::pcf(), 0.3, {}};
    problem.config.scheme = Scheme::Euler;
    const std::vector<double> taus{1e-2, 5e-3, 2.5e-3};
    const auto rows = eoc_study(problem, taus, self_similar_pcf(problem.initial));
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_NEAR(*rows[i].order, 1.0, 0.1);
}

StepRecord at(double t, std::vector<double> h) {
    StepRecord r;
    r.t = t;
    r.h = std::move(h);
    return r;
}

TEST(TrajectoryError, MatchesCommonTimesOnly) {
    Trajectory a, b;
    a.cls = b.cls = square_class();
    for (double t : {0.0, 0.1, 0.2}) a.records.push_back(at(t, {t, 0, 0, 0}));
    for (double t : {0.0, 0.05, 0.1, 0.15, 0.2}) b.records.push_back(at(t, {0, 0, 0, 0}));
    b.records[1].h[0] = 100.0;  // not on a's grid
    EXPECT_NEAR(trajectory_error(a, b), 0.2, 1e-15);
    a.termination = Termination::EdgeCollapse;
    EXPECT_TRUE(std::isinf(trajectory_error(a, b)));
}

TEST(EocStudy, ReferenceRunOrders) {
    EocProblem<VelocityLaw> problem{eoc_rectangle(), VelocityLaw::ap_pcf(), 0.5, {}};
    const std::vector<double> taus{4e-2, 2e-2, 1e-2};
    const auto mid = eoc_study(problem, taus, 1e-3);
    for (std::size_t i = 1; i < mid.size(); ++i) EXPECT_NEAR(*mid[i].order, 2.0, 0.15);
    problem.config.scheme = Scheme::Euler;
    const auto eul = eoc_study(problem, taus, 1e-3);
    for (std::size_t i = 1; i < eul.size(); ++i) EXPECT_NEAR(*eul[i].order, 1.0, 0.15);
}

TEST(EocStudy, SingleTauHasEmptyOrder) {
    EocProblem<VelocityLaw> problem{eoc_rectangle(), VelocityLaw::ap_pcf(), 0.2, {}};
    const std::vector<double> taus{2e-2};
    const auto rows = eoc_study(problem, taus, 1e-3);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_FALSE(rows[0].order.has_value());
    EXPECT_GT(rows[0].error, 0.0);
}

TEST(EocStudy, ReferenceUnavailable) {
    EocProblem<VelocityLaw> problem{eoc_rectangle(), VelocityLaw::ap_pcf(), 0.2, {}};
    const std::vector<double> taus{4e-2, 2e-2};
    try {
        eoc_study(problem, taus, 1e-2);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ReferenceUnavailable);
    }
    EocProblem<VelocityLaw> dying{Polygon(square_class(), {1, 1, 1, 1}), VelocityLaw::pcf(), 0.7, {}};
    try {
        eoc_study(dying, taus, 1e-3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::ReferenceUnavailable);
    }
}

TEST(EocStudy, InitialPerturbationScalesLinearly) {
    // error <= omega(tau) + C d(Gamma(0), Gamma^0): compare runs from perturbed
    // data against the unperturbed reference with tau small enough that the
    // perturbation term dominates.
    SolverConfig cfg;
    cfg.tau = 1e-3;
    const Trajectory reference = run(eoc_rectangle(), VelocityLaw::ap_pcf(), cfg, 0.5);
    auto error_for = [&](double delta) {
        std::vector<double> h = eoc_rectangle().heights();
        h[0] += delta;
        h[1] -= 0.5 * delta;
        const Trajectory traj = run(Polygon(square_class(), h), VelocityLaw::ap_pcf(), cfg, 0.5);
        return trajectory_error(traj, reference);
    };
    const double e1 = error_for(1e-4);
    const double e2 = error_for(2e-4);
    EXPECT_GT(e1, 0.0);
    const double c1 = e1 / 1e-4;
    const double c2 = e2 / 2e-4;
    EXPECT_LE(e2, 2.0 * e1 * 1.05);
    EXPECT_LE(std::max(c1, c2) / std::min(c1, c2), 1.5);
}

}  // namespace
}  // namespace polyflow
