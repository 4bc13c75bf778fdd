#include <gtest/gtest.h>

#include "fkpp/dynamics.hpp"
#include "fkpp/error.hpp"
#include "support.hpp"

namespace fkpp {
namespace {

using test::pi;
using test::preset;

TEST(Rho, ConstantAndZero) {
    const Grid g = test::unit_grid(8, 9);
    for (double v : compute_rho(std::vector<double>(g.total_nodes(), 1.0), g)) EXPECT_NEAR(v, 1.0, 1e-15);
    for (double v : compute_rho(std::vector<double>(g.total_nodes(), 0.0), g)) EXPECT_EQ(v, 0.0);
    EXPECT_THROW(compute_rho(std::vector<double>(5, 1.0), g), InvalidArgument);
}

TEST(Rho, SeparableMatchesDirectSum) {
    const Grid g = build_grid({{1.0, 6, Boundary::Periodic, 0.0}},
                              {{2.0, 9, Boundary::Neumann, -1.0}, {1.0, 5, Boundary::Neumann, 0.0}});
    std::vector<double> u(g.total_nodes());
    auto f = [](double x) { return 1.0 + std::sin(2 * pi * x); };
    auto gfun = [](double a, double b) { return std::exp(-a * a) * (1.0 + b); };
    for (std::size_t i = 0; i < u.size(); ++i) {
        const auto x = g.space_point(g.space_index_of(i));
        const auto t = g.pheno_point(g.pheno_index_of(i));
        u[i] = f(x[0]) * gfun(t[0], t[1]);
    }
    // direct double trapezoid sum
    const Axis& a = g.pheno_axes()[0];
    const Axis& b = g.pheno_axes()[1];
    double q = 0.0;
    for (int i = 0; i < a.points; ++i)
        for (int j = 0; j < b.points; ++j) q += a.weight(i) * b.weight(j) * gfun(a.coordinate(i), b.coordinate(j));
    const auto rho = compute_rho(u, g);
    for (std::size_t s = 0; s < g.space_nodes(); ++s)
        EXPECT_NEAR(rho[s], f(g.space_point(s)[0]) * q, 1e-13);
}

TEST(Rho, DirichletAxisIncludesZeroEnds) {
    const double h = 0.125;
    const Grid g = build_grid({{1.0, 4, Boundary::Periodic, 0.0}}, {dirichlet_window(1.0, h)});
    const auto rho = compute_rho(std::vector<double>(g.total_nodes(), 1.0), g);
    // 2/h - 1 interior nodes at full weight, zero end values
    EXPECT_NEAR(rho[0], 2.0 - h, 1e-14);
}

TEST(Initial, Presets) {
    const Grid g = test::unit_grid(8, 9, 2.0, -1.0);
    const auto flat = make_initial({InitialKind::ConstantPatch, {{"amplitude", 0.7}}, {}}, g);
    for (double v : flat) EXPECT_EQ(v, 0.7);
    const auto patch = make_initial(
        {InitialKind::ConstantPatch, {{"x_lo", 0.0}, {"x_hi", 0.5}, {"theta_lo", -0.5}, {"theta_hi", 0.5}}, {}}, g);
    EXPECT_EQ(patch[g.index(1, 4)], 1.0);
    EXPECT_EQ(patch[g.index(6, 4)], 0.0);
    EXPECT_EQ(patch[g.index(1, 0)], 0.0);
    const auto bump = make_initial({InitialKind::GaussianBump, {{"x0", 0.5}, {"theta0", 0.0}}, {}}, g);
    EXPECT_NEAR(bump[g.index(4, 4)], 1.0, 1e-15);
    for (double v : bump) EXPECT_GE(v, 0.0);
    EXPECT_THROW(make_initial({InitialKind::GaussianBump, {{"sigma_x", 0.0}}, {}}, g), InvalidArgument);
    EXPECT_THROW(make_initial({InitialKind::ConstantPatch, {{"amplitude", -1.0}}, {}}, g), InvalidArgument);
    EXPECT_THROW(make_initial({InitialKind::Custom, {}, {}}, g), InvalidArgument);
}

TEST(Step, LogisticReduction) {
    const Grid g = test::unit_grid(8, 9);
    SimulationSetup setup{g, std::vector<double>(g.total_nodes(), 1.0), 1.0, 20.0, 1e-3, {}, 1e-6, true, std::nullopt};
    const auto traj = simulate(setup, std::vector<double>(g.total_nodes(), 0.1));
    const double exact = 1.0 / (1.0 + 9.0 * std::exp(-20.0));
    for (double v : traj.final.rho) EXPECT_LE(std::abs(v - exact) / exact, 1e-3);
    for (double s : traj.sup_rho) EXPECT_LE(s, 1.0 + 1e-12);
    EXPECT_EQ(traj.final.monitors.bound_violations, 0);
}

TEST(Step, DiffusionConservesMass) {
    const Grid g = build_grid({{1.0, 12, Boundary::Periodic, 0.0}}, {{2.0, 11, Boundary::Neumann, -1.0}});
    const HeatPropagator prop(g, 1.3, 0.01);
    auto u = make_initial({InitialKind::GaussianBump, {}, {}}, g);
    const double m0 = total_mass(u, g);
    for (int k = 0; k < 100; ++k) {
        const double before = total_mass(u, g);
        prop.apply(u);
        EXPECT_LE(std::abs(total_mass(u, g) - before), 1e-12 * m0);
    }
}

TEST(Step, ZeroFitnessOnlyLosesMassToCompetition) {
    const Grid g = build_grid({{1.0, 12, Boundary::Periodic, 0.0}}, {{2.0, 11, Boundary::Neumann, -1.0}});
    const std::vector<double> zero(g.total_nodes(), 0.0);
    const auto op = assemble_operator(g, zero, 1.0);
    for (auto scheme : {DiffusionScheme::Exponential, DiffusionScheme::BackwardEuler}) {
        const SplittingIntegrator integ(op, zero, {scheme, 1e-14});
        SimState s = make_state(g, make_initial({InitialKind::GaussianBump, {}, {}}, g));
        for (int k = 0; k < 10; ++k) {
            const double before = s.mass;
            s = integ.step(s, 0.01);
            EXPECT_LT(s.mass, before);
        }
    }
}

TEST(Step, ZeroStaysZero) {
    const Grid g = test::unit_grid(8, 9);
    const auto r = sample_on_grid(preset(PresetKind::Checkerboard, {{"r0", 1.0}}), g);
    SimulationSetup setup{g, r, 1.0, 2.0, 0.05, {}, 1e-6, true, std::nullopt};
    const auto traj = simulate(setup, std::vector<double>(g.total_nodes(), 0.0));
    for (double v : traj.final.u) EXPECT_EQ(v, 0.0);
}

TEST(Step, PositivityAndRhoConsistency) {
    const Grid g = test::unit_grid(16, 17, 2.0, -1.0);
    const auto r = sample_on_grid(preset(PresetKind::Checkerboard, {{"r0", 2.0}, {"q", 3.0}}), g);
    const auto op = assemble_operator(g, r, 1.0);
    for (auto scheme : {DiffusionScheme::Exponential, DiffusionScheme::BackwardEuler}) {
        SimState s = make_state(g, make_initial({InitialKind::GaussianBump, {{"sigma_x", 0.05}}, {}}, g));
        for (int k = 0; k < 40; ++k) {
            s = step(s, 0.05, r, op, {scheme, 1e-13});
            for (double v : s.u) ASSERT_GE(v, 0.0);
            const auto rho = compute_rho(s.u, g);
            for (std::size_t i = 0; i < rho.size(); ++i) EXPECT_NEAR(rho[i], s.rho[i], 1e-13);
        }
    }
}

TEST(Step, LinearisedFlowPreservesOrder) {
    const Grid g = test::unit_grid(16, 9, 2.0, -1.0);
    const auto r = sample_on_grid(preset(PresetKind::Checkerboard, {{"r0", 1.0}, {"q", 1.0}}), g);
    std::mt19937_64 rng(4);
    auto ua = test::random_vector(g.total_nodes(), rng, 0.0, 1.0);
    auto ub = ua;
    for (auto& v : ub) v += std::uniform_real_distribution<double>(0.0, 0.5)(rng);
    const double frozen_rho = 0.6, dt = 0.05;
    const HeatPropagator prop(g, 1.0, dt);
    auto react = [&](std::vector<double>& u) {
        for (std::size_t i = 0; i < u.size(); ++i) u[i] *= std::exp(0.5 * dt * (r[i] - frozen_rho));
    };
    for (int k = 0; k < 50; ++k) {
        for (auto* u : {&ua, &ub}) {
            react(*u);
            prop.apply(*u);
            react(*u);
        }
        for (std::size_t i = 0; i < ua.size(); ++i) ASSERT_LE(ua[i], ub[i]);
    }
}

TEST(Propagator, MetzlerExponential) {
    const std::vector<double> zero(9, 0.0);
    const auto id = metzler_exponential(zero, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(id[i * 3 + j], i == j ? 1.0 : 0.0, 1e-15);
    // 2x2 generator [[-a, a], [b, -b]] has a closed-form exponential
    const double a = 2.0, b = 0.5;
    const auto e = metzler_exponential(std::vector<double>{-a, a, b, -b}, 2);
    const double s = a + b, decay = std::exp(-s);
    EXPECT_NEAR(e[0], (b + a * decay) / s, 1e-13);
    EXPECT_NEAR(e[1], a * (1 - decay) / s, 1e-13);
    EXPECT_NEAR(e[2], b * (1 - decay) / s, 1e-13);
    EXPECT_NEAR(e[3], (a + b * decay) / s, 1e-13);
    EXPECT_THROW(metzler_exponential(std::vector<double>{0.0, -1.0, 0.0, 0.0}, 2), InvalidArgument);
}

TEST(Bounds, AprioriCeiling) {
    EXPECT_EQ(apriori_ceiling(2.0, 1.0), 2.0);
    EXPECT_EQ(apriori_ceiling(0.1, 1.0), 1.0);
    const Grid g = test::unit_grid(4, 3);
    SimState s = make_state(g, std::vector<double>(g.total_nodes(), 1.5));
    EXPECT_TRUE(rho_apriori_bound(s, 1.5));
    EXPECT_FALSE(rho_apriori_bound(s, 1.0));
    EXPECT_EQ(s.monitors.bound_violations, 1);
    EXPECT_NEAR(s.monitors.worst_bound_ratio, 1.5, 1e-12);
}

TEST(Bounds, CothClosedForms) {
    EXPECT_NEAR(coth_bound(4.0, 0.0, 0.7), 2.7, 1e-12);
    EXPECT_NEAR(coth_bound(4.0, 1e3, 0.7), 2.0, 1e-12);
    EXPECT_THROW(coth_bound(0.0, 1.0, 0.5), InvalidArgument);
    EXPECT_THROW(coth_bound(-1.0, 1.0, 0.5), InvalidArgument);
}

TEST(Bounds, CothIncreasingInH) {
    for (double tau : {0.0, 0.1, 1.0, 5.0})
        for (double rho : {0.0, 0.5, 3.0}) {
            double prev = 0.0;
            for (double H = 0.01; H < 20.0; H *= 1.3) {
                const double v = coth_bound(H, tau, rho);
                EXPECT_GT(v, prev);
                prev = v;
            }
        }
}

TEST(Classify, NegativeFitnessGoesExtinct) {
    const Landscape r = preset(PresetKind::Constant, {{"c", -1.0}});
    const Grid g = test::unit_grid(8, 9, 2.0, -1.0);
    const auto res = classify_long_time(r, g, {InitialKind::ConstantPatch, {}, {}}, 20.0);
    EXPECT_EQ(res.classification, Classification::Extinct);
    EXPECT_NEAR(decay_rate_estimate(res.trajectory), -1.0, 1e-2);
}

TEST(Classify, PositiveFitnessPersists) {
    const Landscape r = preset(PresetKind::Constant, {{"c", 1.0}});
    const Grid g = test::unit_grid(8, 9);
    const auto res = classify_long_time(r, g, {InitialKind::ConstantPatch, {{"amplitude", 0.2}}, {}}, 30.0);
    EXPECT_EQ(res.classification, Classification::Persist);
    EXPECT_NEAR(res.trajectory.sup_rho.back(), 1.0, 1e-6);
}

TEST(Classify, ConstantNegativeRateEqualsC) {
    const double c = -0.4;
    const Landscape r = preset(PresetKind::Constant, {{"c", c}});
    const Grid g = test::unit_grid(8, 9, 2.0, -1.0);
    const auto res = classify_long_time(r, g, {InitialKind::GaussianBump, {}, {}}, 40.0);
    EXPECT_EQ(res.classification, Classification::Extinct);
    EXPECT_NEAR(decay_rate_estimate(res.trajectory), c, 1e-2);
}

TEST(Classify, UndecidedInBetween) {
    Trajectory t;
    for (int i = 0; i <= 10; ++i) {
        t.times.push_back(i);
        t.sup_rho.push_back(5e-3);
        t.sup_u.push_back(5e-3);
    }
    EXPECT_EQ(classify(t), Classification::Undecided);
    t.sup_rho.back() = 6e-3;
    for (auto& v : t.sup_rho) v *= 1e-2;
    EXPECT_EQ(classify(t), Classification::Undecided);  // small but rising at the end
}

TEST(Classify, DefaultDtPolicy) {
    EXPECT_DOUBLE_EQ(default_dt(0.5, 0.2), 0.1);
    EXPECT_DOUBLE_EQ(default_dt(2.0, 3.0), 0.02);
}

}  // namespace
}  // namespace fkpp
