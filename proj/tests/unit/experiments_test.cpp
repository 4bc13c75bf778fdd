#include <gtest/gtest.h>

#include "fkpp/error.hpp"
#include "fkpp/experiments.hpp"
#include "support.hpp"

namespace fkpp {
namespace {

using test::pi;

ExperimentSpec checkerboard(SweepKind kind, std::vector<double> values) {
    ExperimentSpec e;
    e.name = "cb";
    e.landscape = {PresetKind::Checkerboard, {{"r0", 1.0}, {"q", 1.0}}, 1, 1};
    e.grid.space_points = 8;
    e.grid.pheno = {{2.0, 9, Boundary::Neumann, -1.0}};
    e.grid.spacing = 0.25;
    e.sweep = {kind, std::move(values), false};
    return e;
}

TEST(Spec, HashIsStableAndSensitive) {
    const auto a = checkerboard(SweepKind::Period, {0.5, 1.0});
    const auto h = spec_hash(a);
    EXPECT_EQ(h.size(), 16u);
    EXPECT_EQ(h, spec_hash(a));
    auto b = a;
    b.grid.space_points = 9;
    EXPECT_NE(spec_hash(b), h);
    b = a;
    b.tolerances.eps_mono = 2e-8;
    EXPECT_NE(spec_hash(b), h);
}

TEST(Spec, Validation) {
    EXPECT_NO_THROW(validate(checkerboard(SweepKind::Period, {0.5, 1.0})));
    EXPECT_THROW(validate(checkerboard(SweepKind::Period, {1.0, 1.0})), InvalidArgument);
    EXPECT_THROW(validate(checkerboard(SweepKind::Period, {2.0, 1.0})), InvalidArgument);
    auto e = checkerboard(SweepKind::None, {});
    e.simulate = true;
    EXPECT_THROW(validate(e), InvalidArgument);
    e.horizon = 1.0;
    EXPECT_NO_THROW(validate(e));
    e.name.clear();
    EXPECT_THROW(validate(e), InvalidArgument);
}

TEST(Runners, EigenIsBitwiseRepeatable) {
    const auto e = checkerboard(SweepKind::None, {});
    const auto a = run_eigen(e), b = run_eigen(e);
    ASSERT_TRUE(a.passed);
    EXPECT_EQ(a.runner, "eigen");
    EXPECT_EQ(a.spec_hash, spec_hash(e));
    EXPECT_EQ(a.curves[0].points[0].lambda, b.curves[0].points[0].lambda);
}

TEST(Runners, ConstantLandscapeSweepsAreFlat) {
    for (auto kind : {SweepKind::Period, SweepKind::Diffusivity}) {
        auto e = checkerboard(kind, {0.25, 1.0, 4.0});
        e.landscape = {PresetKind::Constant, {{"c", 0.2}}, 1, 1};
        const auto rec = run_monotonicity(e);
        EXPECT_TRUE(rec.passed);
        for (const auto& p : rec.curves[0].points) EXPECT_NEAR(p.lambda, 0.2, 1e-10);
    }
}

TEST(Runners, SweepsAreMonotoneAndThreadIndependent) {
    const auto period = checkerboard(SweepKind::Period, {0.5, 1.0, 2.0, 4.0});
    const auto one = run_monotonicity(period, {1, {}});
    const auto two = run_monotonicity(period, {3, {}});
    ASSERT_TRUE(one.passed) << one.failures.front();
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(one.curves[0].points[i].lambda, two.curves[0].points[i].lambda);
        if (i) EXPECT_GE(one.curves[0].points[i].lambda, one.curves[0].points[i - 1].lambda - 1e-8);
    }
    const auto diff = run_monotonicity(checkerboard(SweepKind::Diffusivity, {0.25, 1.0, 4.0, 16.0}));
    ASSERT_TRUE(diff.passed);
    for (const auto& p : diff.curves[0].points) EXPECT_LE(std::abs(p.lambda - *p.lambda_scaled), 1e-6);
}

TEST(Runners, TruncationConstantGap) {
    auto e = checkerboard(SweepKind::Radius, {0.5, 1.0, 2.0});
    e.landscape = {PresetKind::Constant, {{"c", 0.1}}, 1, 1};
    e.grid.spacing = 1.0 / 8;
    e.grid.pheno = {{4.0, 33, Boundary::Neumann, -2.0}};
    e.grid.truncation_kinds = {ProblemKind::PeriodicDirichletTheta};
    const auto rec = run_truncation_study(e);
    ASSERT_TRUE(rec.passed);
    const auto& c = rec.curves[0];
    EXPECT_NEAR(*c.reference_lambda, 0.1, 1e-10);
    for (const auto& p : c.points) {
        const double s = std::sin(pi * e.grid.spacing / (4 * p.parameter));
        EXPECT_NEAR(0.1 - p.lambda, 4.0 / (e.grid.spacing * e.grid.spacing) * s * s, 1e-9);
    }
}

TEST(Runners, DichotomyShiftCheckAndClasses) {
    auto e = checkerboard(SweepKind::Shift, {-0.2, 0.2});
    e.sweep.relative = true;
    e.simulate = true;
    e.horizon = 60.0;
    e.initial = {InitialKind::ConstantPatch, {}, {}};
    const auto rec = run_dichotomy(e);
    ASSERT_TRUE(rec.passed) << rec.failures.front();
    const auto& pts = rec.curves[0].points;
    ASSERT_EQ(pts.size(), 2u);
    for (const auto& p : pts) EXPECT_LE(std::abs(*p.shift_error), 1e-10);
    EXPECT_EQ(*pts[0].classification, Classification::Extinct);
    EXPECT_EQ(*pts[1].classification, Classification::Persist);
    EXPECT_NEAR(critical_shift(e) + pts[0].lambda, pts[0].parameter, 1e-10);
}

TEST(Runners, DichotomyFlagsContradiction) {
    auto e = checkerboard(SweepKind::Shift, {-0.5});
    e.sweep.relative = true;
    e.simulate = true;
    e.horizon = 1.0;  // far too short to reach the extinction threshold
    const auto rec = run_dichotomy(e);
    EXPECT_FALSE(rec.passed);
    EXPECT_FALSE(rec.failures.empty());
}

TEST(Runners, SimulationMonitorsHold) {
    auto e = checkerboard(SweepKind::None, {});
    e.landscape = {PresetKind::EnvGradient, {{"B", 1.0}, {"r0", 1.0}}, 1, 1};
    e.simulate = true;
    e.horizon = 5.0;
    e.initial = {InitialKind::GaussianBump, {}, {}};
    const auto rec = run_simulation(e);
    ASSERT_TRUE(rec.passed);
    const auto& m = *rec.curves[0].points[0].monitors;
    EXPECT_EQ(m.bound_violations, 0);
    EXPECT_EQ(m.coth_violations, 0);
    EXPECT_GT(m.coth_checks, 0);
}

TEST(Runners, WrongSweepKindRejected) {
    EXPECT_THROW(run_truncation_study(checkerboard(SweepKind::Period, {1.0})), InvalidArgument);
    EXPECT_THROW(run_dichotomy(checkerboard(SweepKind::Radius, {1.0})), InvalidArgument);
}

}  // namespace
}  // namespace fkpp
