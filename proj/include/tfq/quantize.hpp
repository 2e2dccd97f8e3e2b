#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "tfq/core.hpp"
#include "tfq/fft.hpp"
#include "tfq/gaussians.hpp"
#include "tfq/parallel.hpp"
#include "tfq/tfdist.hpp"

namespace tfq {

/// Dense operator on grid samples: (A f)_j = sum_j' matrix(j, j') f_j' (dx weighting folded in).
struct OperatorMatrix {
    SpatialGrid grid;
    CMatrix matrix;

    Signal apply(const Signal& f) const {
        if (!(f.grid == grid)) throw InvalidArgument("operator and signal live on different grids");
        return Signal(grid, matrix * f.values);
    }
    OperatorMatrix operator*(const OperatorMatrix& o) const { return {grid, matrix * o.matrix}; }
};

/// Weyl operator of a sampled symbol a(x_j, p_k):
/// matrix(j, j') = (1/N) sum_k e^{2 pi i (k - c)(j - j')/N} a((x_j + x_j')/2, p_k) for j - j' in (-N/2, N/2).
/// Midpoint values come from trigonometric upsampling along x.
inline OperatorMatrix weyl_matrix(const PhaseField& symbol) {
    if (!symbol.values().allFinite()) throw NumericError("symbol contains non-finite values");
    const auto& axis = symbol.grid().axis();
    const int n = axis.size(), c = n / 2;

    // half[h, k]: symbol at x = x_0 + h dx/2, transformed over k into the offset index.
    FieldMatrix half(2 * n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
        fft::Buffer row(n), up, scratch;
        for (std::size_t k = b; k < e; ++k) {
            for (int j = 0; j < n; ++j) row[j] = symbol(static_cast<int>(k), j);
            fft::upsample(row, up, 2, scratch);
            for (int h = 0; h < 2 * n; ++h) half(h, static_cast<Eigen::Index>(k)) = up[h];
        }
    });
    fft::centered_dft_rows(half, +1);
    half /= static_cast<double>(n);

    CMatrix m = CMatrix::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int jp = 0; jp < n; ++jp) {
            const int d = j - jp;
            if (d > -c && d < c) m(j, jp) = half(j + jp, d + c);
        }
    return {axis, m};
}

/// Born-Jordan symbol: a convolved with the Born-Jordan kernel, done in the ambiguity domain.
inline PhaseField bj_symbol(const PhaseField& symbol) {
    const PhaseField out = cohen_apply(PhaseField(symbol.grid(), symbol.values(), ValueKind::complex),
                                       born_jordan_kernel(symbol.grid().axis().hbar_config()));
    return out;
}

inline OperatorMatrix bj_matrix(const PhaseField& symbol) { return weyl_matrix(bj_symbol(symbol)); }

inline OperatorMatrix identity_operator(const SpatialGrid& grid) {
    return {grid, CMatrix::Identity(grid.size(), grid.size())};
}

inline OperatorMatrix position_operator(const SpatialGrid& grid) {
    CVector x(grid.size());
    for (int j = 0; j < grid.size(); ++j) x(j) = grid.x(j);
    return {grid, x.asDiagonal()};
}

/// -i hbar d/dx realised spectrally: inverse DFT * diag(p_k) * DFT.
inline OperatorMatrix momentum_operator(const SpatialGrid& grid) {
    const int n = grid.size();
    FieldMatrix m = FieldMatrix::Identity(n, n);
    fft::centered_dft_cols(m, -1);
    for (int k = 0; k < n; ++k) m.row(k) *= grid.p(k);
    fft::centered_dft_cols(m, +1);
    m /= static_cast<double>(n);
    return {grid, m};
}

inline constexpr int kMaxMonomialOrder = 4;

/// (1/(s+1)) sum_{l=0}^{s} P^{s-l} X^r P^l.
inline OperatorMatrix bj_monomial_matrix(const SpatialGrid& grid, int s, int r) {
    if (s < 0 || r < 0) throw InvalidArgument("monomial exponents must be nonnegative");
    if (s + r > kMaxMonomialOrder) throw UnsupportedOrder("monomial order s + r must not exceed 4");
    const CMatrix x = position_operator(grid).matrix, p = momentum_operator(grid).matrix;
    const int n = grid.size();
    CMatrix xr = CMatrix::Identity(n, n);
    for (int i = 0; i < r; ++i) xr = x * xr;
    std::vector<CMatrix> ppow{CMatrix::Identity(n, n)};
    for (int i = 0; i < s; ++i) ppow.push_back(p * ppow.back());
    CMatrix acc = CMatrix::Zero(n, n);
    for (int l = 0; l <= s; ++l) acc += ppow[s - l] * xr * ppow[l];
    return {grid, acc / static_cast<double>(s + 1)};
}

/// Smooth window w(t) = (erf((t + edge)/width) - erf((t - edge)/width)) / 2 applied in x and p,
/// so polynomial symbols vanish before the grid boundary.
struct SymbolTaper {
    double edge;
    double width;

    double operator()(double t) const { return 0.5 * (std::erf((t + edge) / width) - std::erf((t - edge) / width)); }

    /// Edge at 0.6875 and width at 0.075 of the half extent.
    static SymbolTaper for_extent(double half_extent) { return {0.6875 * half_extent, 0.075 * half_extent}; }
};

/// p^s x^r on the phase grid, optionally tapered in both variables.
inline PhaseField monomial_symbol(const PhaseGrid& grid, int s, int r, bool taper = true) {
    const int n = grid.size();
    const SymbolTaper wx = SymbolTaper::for_extent(-grid.x(0)), wp = SymbolTaper::for_extent(-grid.p(0));
    FieldMatrix a(n, n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            double v = std::pow(grid.p(k), s) * std::pow(grid.x(j), r);
            if (taper) v *= wx(grid.x(j)) * wp(grid.p(k));
            a(k, j) = v;
        }
    return PhaseField(grid, std::move(a), ValueKind::real);
}

/// |<A f, g> - dx dp sum a conj(W(g, f))| / (||f|| ||g|| max|a|).
inline double operator_vs_distribution_check(const PhaseField& symbol, const Signal& f, const Signal& g) {
    const OperatorMatrix a = weyl_matrix(symbol);
    const cplx lhs = inner_product(a.apply(f), g);
    const FieldMatrix w = cross_wigner_matrix(g, f);
    const cplx rhs = symbol.grid().cell_area() * (symbol.values().array() * w.array().conjugate()).sum();
    const double scale = f.norm() * g.norm() * std::max(symbol.values().cwiseAbs().maxCoeff(), 1e-300);
    return std::abs(lhs - rhs) / scale;
}

/// max over probes of sup |(A - B) f| on |x| < x_max / 2.
inline double central_block_distance(const OperatorMatrix& a, const OperatorMatrix& b, const std::vector<Signal>& probes) {
    const auto& grid = a.grid;
    const double half = 0.5 * -grid.x(0);
    double worst = 0.0;
    for (const auto& f : probes) {
        const CVector d = (a.matrix - b.matrix) * f.values;
        for (int j = 0; j < grid.size(); ++j)
            if (std::abs(grid.x(j)) < half) worst = std::max(worst, std::abs(d(j)));
    }
    return worst;
}

/// Normalised Gaussians used as probes for operator comparisons.
inline std::vector<Signal> default_probes(const SpatialGrid& grid) {
    return {sample_state(GaussianState::coherent(0.3, 0.4), grid), sample_state(GaussianState::coherent(-0.8, -0.5), grid),
            sample_state(GaussianState::scalar({1.3, 0.6}, 0.4, 0.0), grid)};
}

/// Sum of four random Gaussian bumps in phase space, each modulated by a slow plane wave.
inline PhaseField random_smooth_symbol(const PhaseGrid& grid, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> centre(-2.0, 2.0), width(0.5, 1.5), coeff(-1.0, 1.0), wave(-1.5, 1.5);
    struct Bump {
        double x, p, s, c, kx, kp;
    };
    std::vector<Bump> bumps;
    for (int i = 0; i < 4; ++i) bumps.push_back({centre(rng), centre(rng), width(rng), coeff(rng), wave(rng), wave(rng)});
    const int n = grid.size();
    FieldMatrix a(n, n);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            double v = 0.0;
            for (const auto& b : bumps) {
                const double dx = grid.x(j) - b.x, dp = grid.p(k) - b.p;
                v += b.c * std::exp(-(dx * dx + dp * dp) / (2.0 * b.s * b.s)) * std::cos(b.kx * grid.x(j) + b.kp * grid.p(k));
            }
            a(k, j) = v;
        }
    return PhaseField(grid, std::move(a), ValueKind::real);
}

}  // namespace tfq
