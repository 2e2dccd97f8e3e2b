#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tfq/tfq.hpp"

using namespace tfq;

namespace {

PhaseField constant_symbol(const PhaseGrid& g, double v) {
    return PhaseField(g, FieldMatrix::Constant(g.size(), g.size(), cplx(v, 0.0)), ValueKind::real);
}

PhaseField symbol_from(const PhaseGrid& g, const std::function<double(double, double)>& a) {
    FieldMatrix v(g.size(), g.size());
    for (int k = 0; k < g.size(); ++k)
        for (int j = 0; j < g.size(); ++j) v(k, j) = a(g.x(j), g.p(k));
    return PhaseField(g, std::move(v), ValueKind::real);
}

}  // namespace

TEST(WeylMatrix, UnitSymbolIsIdentity) {
    const auto s = make_spatial_grid(128, 8.0);
    const auto a = weyl_matrix(constant_symbol(PhaseGrid(s), 1.0));
    EXPECT_LE((a.matrix - CMatrix::Identity(128, 128)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(WeylMatrix, PositionSymbolIsDiagonal) {
    const auto s = make_spatial_grid(64, 4.0);
    const PhaseGrid g(s);
    const auto a = weyl_matrix(symbol_from(g, [](double x, double) { return x; }));
    EXPECT_LE((a.matrix - position_operator(s).matrix).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(WeylMatrix, MomentumSymbolDifferentiatesGaussian) {
    const auto s = make_spatial_grid(256, 8.0);
    const PhaseGrid g(s);
    const auto a = weyl_matrix(symbol_from(g, [](double, double p) { return p; }));
    const cplx m(1.0, 0.4);
    const Signal f = sample_state(GaussianState::scalar(m, 0.2, 0.0), s);
    const Signal out = a.apply(f);
    double worst = 0.0;
    for (int j = 0; j < s.size(); ++j) {
        if (std::abs(s.x(j)) >= 4.0) continue;
        // -i hbar d/dx of e^{-m (x - x0)^2 / 2 hbar} is i m (x - x0) times the state.
        const cplx expected = cplx(0.0, 1.0) * m * (s.x(j) - 0.2) * f.values(j);
        worst = std::max(worst, std::abs(out.values(j) - expected));
    }
    EXPECT_LE(worst, 1e-6);
}

TEST(WeylMatrix, RejectsNonFiniteSymbol) {
    const PhaseGrid g(make_spatial_grid(16, 4.0));
    FieldMatrix v = FieldMatrix::Zero(16, 16);
    v(2, 3) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(weyl_matrix(PhaseField(g, v)), NumericError);
}

TEST(WeylMatrix, RealSymbolGivesSelfAdjointOperator) {
    const PhaseGrid g(make_spatial_grid(128, 8.0));
    std::mt19937_64 rng(4);
    const auto a = weyl_matrix(random_smooth_symbol(g, rng));
    EXPECT_LE((a.matrix - a.matrix.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BjSymbol, LowOrderSymbolsUnchanged) {
    const PhaseGrid g(make_spatial_grid(256, 8.0));
    for (auto [s, r] : {std::pair{0, 0}, {0, 1}, {1, 0}}) {
        const auto a = monomial_symbol(g, s, r);
        const auto b = bj_symbol(a);
        double worst = 0.0;
        for (int k = 0; k < g.size(); ++k)
            for (int j = 0; j < g.size(); ++j)
                if (std::abs(g.x(j)) < 2.0 && std::abs(g.p(k)) < 2.0) worst = std::max(worst, std::abs(b(k, j) - a(k, j)));
        EXPECT_LE(worst, 1e-8) << "s=" << s << " r=" << r;
    }
}

TEST(BjSymbol, MixedQuarticSymbolChanges) {
    const auto sg = make_spatial_grid(256, 8.0);
    const PhaseGrid g(sg);
    const auto a = monomial_symbol(g, 2, 2);
    const auto probes = default_probes(sg);
    EXPECT_GT(central_block_distance(weyl_matrix(a), weyl_matrix(bj_symbol(a)), probes), 1e-3);
}

TEST(BjMonomial, MatchesSymbolRouteForLowOrders) {
    const auto sg = make_spatial_grid(256, 8.0);
    const PhaseGrid g(sg);
    const auto probes = default_probes(sg);
    for (int s = 0; s <= 3; ++s)
        for (int r = 0; r + s <= 3; ++r) {
            const double d = central_block_distance(bj_monomial_matrix(sg, s, r), bj_matrix(monomial_symbol(g, s, r)), probes);
            EXPECT_LE(d, 1e-5) << "s=" << s << " r=" << r;
        }
}

TEST(BjMonomial, OrderOneIsSymmetrizedProduct) {
    const auto sg = make_spatial_grid(64, 4.0);
    const CMatrix x = position_operator(sg).matrix, p = momentum_operator(sg).matrix;
    const CMatrix expected = 0.5 * (p * x + x * p);
    EXPECT_LE((bj_monomial_matrix(sg, 1, 1).matrix - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(BjMonomial, RejectsHighOrderAndNegativeExponents) {
    const auto sg = make_spatial_grid(32, 4.0);
    EXPECT_THROW(bj_monomial_matrix(sg, 3, 2), UnsupportedOrder);
    EXPECT_THROW(bj_monomial_matrix(sg, 0, 5), UnsupportedOrder);
    EXPECT_THROW(bj_monomial_matrix(sg, -1, 0), InvalidArgument);
    EXPECT_NO_THROW(bj_monomial_matrix(sg, 2, 2));
}

TEST(CanonicalCommutator, ActsAsIHbarOnCentralBlock) {
    const auto sg = make_spatial_grid(256, 8.0);
    const auto x = position_operator(sg), p = momentum_operator(sg);
    const CMatrix comm = x.matrix * p.matrix - p.matrix * x.matrix;
    for (const auto& f : default_probes(sg)) {
        const CVector d = comm * f.values - cplx(0.0, sg.hbar()) * f.values;
        double worst = 0.0;
        for (int j = 0; j < sg.size(); ++j)
            if (std::abs(sg.x(j)) < 4.0) worst = std::max(worst, std::abs(d(j)));
        EXPECT_LE(worst, 1e-6);
    }
}

TEST(Pairing, OperatorMatchesDistributionForSmoothSymbols) {
    const auto sg = make_spatial_grid(256, 8.0);
    const PhaseGrid g(sg);
    std::mt19937_64 rng(31);
    const Signal f = sample_state(GaussianState::coherent(0.5, -0.3), sg);
    const Signal h = sample_state(GaussianState::scalar({1.5, -0.2}, -0.4, 0.6), sg);
    for (int t = 0; t < 5; ++t) EXPECT_LE(operator_vs_distribution_check(random_smooth_symbol(g, rng), f, h), 1e-6);
}

TEST(Pairing, UnitSymbolGivesInnerProduct) {
    const auto sg = make_spatial_grid(128, 8.0);
    const PhaseGrid g(sg);
    const Signal f = sample_state(GaussianState::coherent(0.5, 0.0), sg);
    const Signal h = sample_state(GaussianState::coherent(-0.5, 0.25), sg);
    EXPECT_LE(operator_vs_distribution_check(constant_symbol(g, 1.0), f, h), 1e-12);
}

TEST(SymbolTaper, ProfileValues) {
    const auto w = SymbolTaper::for_extent(8.0);
    EXPECT_DOUBLE_EQ(w.edge, 5.5);
    EXPECT_DOUBLE_EQ(w.width, 0.6);
    EXPECT_NEAR(w(0.0), 1.0, 1e-15);
    EXPECT_NEAR(w(5.5), 0.5, 1e-12);
    EXPECT_NEAR(w(8.0), 0.5 * (std::erf(13.5 / 0.6) - std::erf(2.5 / 0.6)), 1e-20);
    EXPECT_LE(w(8.0), 1e-8);
}

TEST(OperatorMatrix, RejectsForeignGrid) {
    const auto a = identity_operator(make_spatial_grid(16, 4.0));
    const Signal f(make_spatial_grid(16, 5.0), CVector::Zero(16));
    EXPECT_THROW(a.apply(f), InvalidArgument);
}
