#include <gtest/gtest.h>

#include <random>

#include "tfq/tfq.hpp"

using namespace tfq;

namespace {

Signal pair_state(const SpatialGrid& g) {
    return sample_superposition({GaussianState::coherent(0.75, 0.75), GaussianState::coherent(-0.75, -0.75)}, g);
}

}  // namespace

TEST(Covariance, WignerUnderFourierAndScale) {
    const auto g = make_spatial_grid(512, 8.0);
    const Signal f = pair_state(g);
    EXPECT_LE(covariance_residual(wigner_kernel(), fourier_map(), f).residual, 1e-4);
    EXPECT_LE(covariance_residual(wigner_kernel(), scale(1.5), f).residual, 1e-4);
    EXPECT_LE(covariance_residual(wigner_kernel(), shear(1.0), f).residual, 1e-4);
}

TEST(Covariance, BornJordanFailsUnderShear) {
    const auto g = make_spatial_grid(512, 8.0);
    const Signal f = pair_state(g);
    const auto bj = born_jordan_kernel();
    EXPECT_LE(covariance_residual(bj, fourier_map(), f).residual, 1e-4);
    EXPECT_GE(covariance_residual(bj, shear(1.0), f).residual, 0.01);
}

TEST(Covariance, IdentityMapHasZeroResidual) {
    const auto g = make_spatial_grid(256, 8.0);
    const auto r = covariance_residual(born_jordan_kernel(), validate_symplectic(RMatrix::Identity(2, 2)), pair_state(g));
    EXPECT_LE(r.residual, 1e-14);
    EXPECT_LE(r.norm_change, 1e-14);
}

TEST(Covariance, BilinearIsCoarserThanSpectral) {
    const auto g = make_spatial_grid(256, 8.0);
    const Signal f = pair_state(g);
    const double spectral = covariance_residual(wigner_kernel(), rotation(kPi / 8), f).residual;
    const double bilinear = covariance_residual(wigner_kernel(), rotation(kPi / 8), f, Interpolation::bilinear).residual;
    EXPECT_LT(spectral, bilinear);
    EXPECT_LT(bilinear, 0.2);
}

TEST(Translation, ZeroShiftIsExact) {
    const auto g = make_spatial_grid(256, 8.0);
    EXPECT_EQ(translation_residual(born_jordan_kernel(), 0.0, 0.0, pair_state(g)), 0.0);
}

TEST(Translation, OnGridShiftsForBothKernels) {
    const auto g = make_spatial_grid(256, 8.0);
    const Signal f = pair_state(g);
    for (const auto& k : {wigner_kernel(), born_jordan_kernel()}) {
        EXPECT_LE(translation_residual(k, 10 * g.dx(), -6 * g.dp(), f), 1e-8) << k.name;
        EXPECT_LE(translation_residual(k, -1.0, 0.5, f), 1e-8) << k.name;
    }
}

TEST(Translation, OffGridShiftIsRejected) {
    const auto g = make_spatial_grid(256, 8.0);
    EXPECT_THROW(translation_residual(wigner_kernel(), 0.5 * g.dx(), 0.0, pair_state(g)), InvalidArgument);
}

TEST(Interference, SingleStateHasNoCrossMass) {
    const auto g = make_spatial_grid(256, 8.0);
    const PhaseField w = wigner_discrete(sample_state(GaussianState::coherent(), g));
    const auto r = interference_mass(w, {{0.0, 0.0}}, 0.6);
    EXPECT_EQ(r.midpoint_count, 0);
    EXPECT_EQ(r.cross_mass, 0.0);
    EXPECT_EQ(r.ratio, 0.0);
    // Integral of 2 e^{-r^2/hbar} over the disk is 2 pi hbar (1 - e^{-rho^2/hbar}).
    EXPECT_NEAR(r.signal_mass, 2.0 * kPi * kDefaultHbar * (1.0 - std::exp(-0.36 / kDefaultHbar)), 1e-3);
}

TEST(Interference, TwoStateWignerCrossMassIsComparableToSignal) {
    const auto g = make_spatial_grid(512, 8.0);
    const std::vector<PhasePoint> c{{1.5, 0.0}, {-1.5, 0.0}};
    const Signal f = sample_superposition(coherent_states(c), g);
    const auto r = interference_mass(wigner_discrete(f), c, 0.6);
    EXPECT_EQ(r.midpoint_count, 1);
    EXPECT_GT(r.cross_mass, 0.5 * r.signal_mass);
    EXPECT_LT(r.cross_mass, 2.0 * r.signal_mass);
}

TEST(Interference, BornJordanDampsDiagonalCrossTerms) {
    const auto g = make_spatial_grid(512, 8.0);
    const auto c = diamond_centers(2.0, kPi / 4);
    const Signal f = sample_superposition(coherent_states(c), g);
    const PhaseField w = wigner_discrete(f);
    const auto rw = interference_mass(w, c, 0.6);
    const auto rb = interference_mass(cohen_apply(w, born_jordan_kernel()), c, 0.6);
    EXPECT_LT(rb.cross_mass, rw.cross_mass);
}

TEST(Interference, DiamondHasFiveMidpoints) {
    EXPECT_EQ(unique_midpoints(diamond_centers(2.0, 0.3)).size(), 5u);
    EXPECT_EQ(unique_midpoints({{0, 0}, {1, 0}, {2, 0}}).size(), 3u);
}

TEST(Interference, OverlappingOrEscapingDisksAreRejected) {
    const auto g = make_spatial_grid(64, 4.0);
    const PhaseField z = PhaseField::zeros(PhaseGrid(g));
    EXPECT_THROW(interference_mass(z, {{0.5, 0.0}, {-0.5, 0.0}}, 0.6), ConfigurationError);
    EXPECT_THROW(interference_mass(z, {{3.8, 0.0}}, 0.6), ConfigurationError);
    EXPECT_THROW(interference_mass(z, {{0.0, 0.0}}, 0.0), InvalidArgument);
    EXPECT_THROW(interference_mass(z, {{0.0, 0.0}}, 0.5, 0), InvalidArgument);
}

TEST(Interference, MassesConvergeUnderGridRefinement) {
    const auto c = diamond_centers(2.0, 0.2);
    auto masses = [&](int n) {
        const auto g = make_spatial_grid(n, 8.0);
        return interference_mass(wigner_discrete(sample_superposition(coherent_states(c), g)), c, 0.6);
    };
    const auto a = masses(256), b = masses(512);
    EXPECT_NEAR(a.signal_mass, b.signal_mass, 1e-2 * b.signal_mass);
    EXPECT_NEAR(a.cross_mass, b.cross_mass, 1e-2 * b.cross_mass);
}

TEST(Interference, MassesInvariantUnderOnGridShift) {
    const auto g = make_spatial_grid(512, 8.0);
    const auto c = diamond_centers(2.0, 0.0);
    const Signal f = sample_superposition(coherent_states(c), g);
    const double x0 = 16 * g.dx(), p0 = -8 * g.dp();
    std::vector<PhasePoint> moved;
    for (const auto& q : c) moved.push_back({q.x + x0, q.p + p0});
    const auto a = interference_mass(wigner_discrete(f), c, 0.6);
    const auto b = interference_mass(wigner_discrete(heisenberg_shift(f, x0, p0)), moved, 0.6);
    EXPECT_NEAR(a.signal_mass, b.signal_mass, 1e-8);
    EXPECT_NEAR(a.cross_mass, b.cross_mass, 1e-8);
}

TEST(Diamond, AnglesSpanInterval) {
    DiamondConfig cfg;
    const auto a = cfg.angles();
    ASSERT_EQ(a.size(), 9u);
    EXPECT_DOUBLE_EQ(a.front(), 0.0);
    EXPECT_DOUBLE_EQ(a.back(), kPi / 4);
    cfg.n_steps = 0;
    EXPECT_THROW(cfg.validate(), InvalidArgument);
}

TEST(Diamond, SingleStepMatchesClosedForm) {
    DiamondConfig cfg;
    cfg.n_steps = 1;
    cfg.base_angle = 0.1;
    cfg.distributions = {"wigner"};
    const auto steps = diamond_experiment(cfg);
    ASSERT_EQ(steps.size(), 1u);
    const auto& field = steps[0].results[0].field;
    const auto closed = superposition_wigner(coherent_states(diamond_centers(cfg.radius, 0.1)));
    const auto& g = field.grid();
    double worst = 0.0;
    RVector z(2);
    for (int k = 0; k < g.size(); ++k)
        for (int j = 0; j < g.size(); ++j) {
            z << g.x(j), g.p(k);
            worst = std::max(worst, std::abs(field(k, j).real() - closed(z).real()));
        }
    EXPECT_LE(worst, 1e-6);
    EXPECT_EQ(steps[0].results[0].report.midpoint_count, 5);
    for (const auto& [name, v] : steps[0].results[0].report.residuals) EXPECT_LE(v, 1e-8) << name;
}

TEST(Diamond, RelativeSpread) {
    EXPECT_DOUBLE_EQ(relative_spread({}), 0.0);
    EXPECT_DOUBLE_EQ(relative_spread({2.0, 1.0, 1.5}), 0.5);
}
