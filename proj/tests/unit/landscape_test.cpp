#include <gtest/gtest.h>

#include "fkpp/error.hpp"
#include "support.hpp"

namespace fkpp {
namespace {

using test::preset;

double at(const Landscape& r, double x, double theta) {
    const double xs[] = {x}, ts[] = {theta};
    return r(xs, ts);
}

TEST(Landscape, ConstantPreset) {
    const Landscape r = preset(PresetKind::Constant, {{"c", 0.5}});
    EXPECT_EQ(at(r, 0.3, -0.7), 0.5);
    EXPECT_EQ(r.sup_r(), 0.5);
}

TEST(Landscape, ZeroSeparable) {
    const Landscape r = preset(PresetKind::Separable, {{"a0", 0}, {"a1", 0}, {"b0", 0}, {"b2", 0}});
    for (double x : {0.0, 0.3, 0.9})
        for (double t : {-1.0, 0.0, 0.4}) EXPECT_EQ(at(r, x, t), 0.0);
}

TEST(Landscape, SeparableFormula) {
    const Landscape r = preset(PresetKind::Separable, {{"a0", 0.2}, {"a1", 0.5}, {"b0", 0.1}, {"b2", 2.0}});
    EXPECT_NEAR(at(r, 0.25, 0.5), 0.2 + 0.1 - 0.5, 1e-15);
}

TEST(Landscape, EnvGradientPeakOnDiagonal) {
    const Landscape r = preset(PresetKind::EnvGradient, {{"B", 1.0}, {"r0", 1.0}});
    EXPECT_EQ(at(r, 0.0, 0.0), 1.0);
    EXPECT_NEAR(at(r, 0.3, 0.3), 1.0, 1e-15);
    EXPECT_LT(at(r, 0.3, -0.1), 1.0);
    EXPECT_THROW(preset(PresetKind::EnvGradient, {{"B", 0.0}, {"r0", 1.0}}), InvalidArgument);
    EXPECT_THROW(preset(PresetKind::EnvGradient, {{"r0", 1.0}}), InvalidArgument);
}

TEST(Landscape, ParameterValidation) {
    EXPECT_THROW(preset(PresetKind::Constant, {}), InvalidArgument);
    EXPECT_THROW(preset(PresetKind::Constant, {{"c", 1.0}, {"bogus", 2.0}}), InvalidArgument);
    EXPECT_THROW(preset(PresetKind::Checkerboard, {{"r0", 1.0}, {"q", -1.0}}), InvalidArgument);
    EXPECT_THROW(preset(PresetKind::Constant, {{"c", 1.0}, {"theta_lo", 1.0}, {"theta_hi", 0.0}}),
                 InvalidArgument);
    EXPECT_THROW(preset_kind_from_string("Plaid"), InvalidArgument);
}

std::vector<Landscape> all_presets() {
    return {preset(PresetKind::Constant, {{"c", -0.3}}),
            preset(PresetKind::Separable, {{"a0", 0.2}, {"a1", 0.5}, {"b0", 0.1}, {"b2", 1.0}}),
            preset(PresetKind::Checkerboard, {{"r0", 1.0}, {"c", 0.1}, {"q", 0.5}}),
            preset(PresetKind::EnvGradient, {{"B", 1.5}, {"r0", 1.0}}),
            preset(PresetKind::ConfinedZone, {{"r0", 1.0}, {"r1", 0.5}, {"radius", 0.3}})};
}

TEST(Landscape, PeriodicInSpace) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0), t(-1.0, 1.0);
    for (const auto& r : all_presets())
        for (int i = 0; i < 200; ++i) {
            const double x = u(rng), th = t(rng);
            for (int k : {-3, -1, 1, 2, 5}) EXPECT_NEAR(at(r, x + k, th), at(r, x, th), 1e-12);
        }
}

TEST(Landscape, SupDominatesSamples) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0), t(-1.0, 1.0);
    for (const auto& r : all_presets()) {
        ASSERT_TRUE(std::isfinite(r.sup_r()));
        for (int i = 0; i < 2000; ++i) EXPECT_LE(at(r, u(rng), t(rng)), r.sup_r());
    }
}

TEST(Landscape, TailRadiusHonoured) {
    for (const auto& r : all_presets()) {
        if (!r.tail_radius()) continue;
        const double M = *r.tail_radius();
        for (double x = 0.0; x < 1.0; x += 0.05)
            for (double s : {1.0 + 1e-9, 1.5, 3.0}) {
                EXPECT_LE(at(r, x, s * M), 0.0);
                EXPECT_LE(at(r, x, -s * M), 0.0);
            }
    }
}

TEST(Landscape, RescalePeriod) {
    const Landscape r = preset(PresetKind::Checkerboard, {{"r0", 1.0}, {"q", 1.0}});
    const Landscape r1 = rescale_period(r, 1.0);
    const Landscape r2 = rescale_period(r, 2.0);
    EXPECT_EQ(r2.period().front(), 2.0);
    EXPECT_EQ(r2.sup_r(), r.sup_r());
    for (double x = 0.01; x < 1.0; x += 0.07)
        for (double t : {-0.5, 0.0, 0.8}) {
            EXPECT_EQ(at(r1, x, t), at(r, x, t));
            EXPECT_EQ(at(r2, 2 * x, t), at(r, x, t));
        }
    // favourable patch [0, 1/2) doubles to [0, 1)
    EXPECT_GT(at(r2, 0.9, 0.0), 0.0);
    EXPECT_LT(at(r, 0.9, 0.0), 0.0);
    EXPECT_THROW(rescale_period(r, 0.0), InvalidArgument);
    EXPECT_THROW(rescale_period(r, -1.0), InvalidArgument);
}

TEST(Landscape, ShiftLandscape) {
    const Landscape r = preset(PresetKind::Checkerboard, {{"r0", 1.0}});
    const Landscape s = shift_landscape(r, 0.25);
    EXPECT_EQ(s.sup_r(), r.sup_r() + 0.25);
    EXPECT_EQ(at(s, 0.7, 0.1), at(r, 0.7, 0.1) + 0.25);
}

TEST(Landscape, SampleOnGrid) {
    const Landscape r = preset(PresetKind::Separable, {{"a0", 0.0}, {"a1", 1.0}, {"b0", 0.0}, {"b2", 1.0}});
    const Grid g = test::unit_grid(8, 5, 2.0, -1.0);
    const auto v = sample_on_grid(r, g);
    ASSERT_EQ(v.size(), g.total_nodes());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double x = g.space_point(g.space_index_of(i))[0];
        const double t = g.pheno_point(g.pheno_index_of(i))[0];
        EXPECT_EQ(v[i], at(r, x, t));
    }
    const double off[] = {0.25};
    const auto w = sample_on_grid(r, g, off);
    EXPECT_NEAR(w[g.index(0, 2)], at(r, 0.25, 0.0), 1e-15);

    const Grid wrong = build_grid({{2.0, 8, Boundary::Periodic, 0.0}}, {{1.0, 5, Boundary::Neumann, 0.0}});
    EXPECT_THROW(sample_on_grid(r, wrong), InvalidArgument);
    const Grid window = build_grid({dirichlet_window(1.5, 0.25)}, {{1.0, 5, Boundary::Neumann, 0.0}});
    EXPECT_NO_THROW(sample_on_grid(r, window));
}

TEST(Landscape, CellFractionSnapsBoundaries) {
    EXPECT_EQ(cell_fraction(0.5 - 1e-14, 1.0), 0.5);
    EXPECT_EQ(cell_fraction(1.0 - 1e-14, 1.0), 0.0);
    EXPECT_NEAR(cell_fraction(-0.25, 1.0), 0.75, 1e-15);
    EXPECT_NEAR(cell_fraction(3.0, 2.0), 0.5, 1e-15);
}

}  // namespace
}  // namespace fkpp
