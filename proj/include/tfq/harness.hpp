#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tfq/core.hpp"
#include "tfq/fft.hpp"
#include "tfq/gaussians.hpp"
#include "tfq/parallel.hpp"
#include "tfq/resample.hpp"
#include "tfq/symplectic.hpp"
#include "tfq/tfdist.hpp"

namespace tfq {

/// Named, ordered residual values attached to a report.
using Residuals = std::vector<std::pair<std::string, double>>;

struct CovarianceReport {
    SymplecticMap map;
    std::string distribution;
    /// ||Q(S f) - Q f o S^-1||_2 / ||Q f||_2 on the common grid.
    double residual = 0.0;
    /// Relative norm change of the metaplectic action.
    double norm_change = 0.0;
    PhaseGrid grid;
};

inline double relative_l2(const FieldMatrix& a, const FieldMatrix& reference) {
    const double denom = reference.norm();
    const double num = (a - reference).norm();
    if (denom == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / denom;
}

/// Compares Q(S f) with Q f resampled at S^-1 z.
inline CovarianceReport covariance_residual(const CohenKernel& kernel, const SymplecticMap& s, const Signal& f,
                                            Interpolation method = Interpolation::spectral) {
    if (s.dimension() != 1) throw InvalidArgument("covariance residual is implemented for n = 1");
    const PhaseField q0 = cohen_distribution(f, kernel);
    const auto moved = metaplectic_apply_detailed(s, f);
    const PhaseField q1 = cohen_distribution(moved.signal, kernel);
    const PhaseField expected = apply_linear_map(q0, s.inverse(), method);
    const FieldMatrix a = q1.values().real().cast<cplx>();
    const FieldMatrix b = expected.values().real().cast<cplx>();
    const double denom = q0.values().real().norm();
    return {s, kernel.name, denom > 0.0 ? (a - b).norm() / denom : 0.0, moved.total_norm_change, q0.grid()};
}

inline bool on_grid(double value, double step) { return std::abs(value / step - std::round(value / step)) <= 1e-9; }

/// ||Q(T(z0) f) - Q f(. - z0)|| / ||Q f|| for an on-grid shift z0 = (x0, p0).
inline double translation_residual(const CohenKernel& kernel, double x0, double p0, const Signal& f) {
    const auto& g = f.grid;
    if (!on_grid(x0, g.dx()) || !on_grid(p0, g.dp())) throw InvalidArgument("translation must be on the grid");
    const PhaseField q = cohen_distribution(f, kernel);
    const PhaseField moved = cohen_distribution(heisenberg_shift(f, x0, p0), kernel);
    const PhaseField expected = shift_field(q, grid_steps(x0, g.dx()), grid_steps(p0, g.dp()));
    return relative_l2(moved.values(), q.values().norm() > 0.0 ? expected.values() : q.values());
}

// ---------------------------------------------------------------------------------------------
// Interference masses

struct PhasePoint {
    double x = 0.0;
    double p = 0.0;
};

struct InterferenceReport {
    double angle = 0.0;
    std::string distribution;
    double signal_mass = 0.0;
    double cross_mass = 0.0;
    double ratio = 0.0;
    int midpoint_count = 0;
    Residuals residuals;
};

/// Pairwise midpoints, with duplicates (within 1e-9) merged.
inline std::vector<PhasePoint> unique_midpoints(const std::vector<PhasePoint>& centers) {
    std::vector<PhasePoint> mids;
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t k = 0; k < i; ++k) {
            const PhasePoint m{0.5 * (centers[i].x + centers[k].x), 0.5 * (centers[i].p + centers[k].p)};
            const bool seen = std::any_of(mids.begin(), mids.end(), [&](const PhasePoint& q) {
                return std::abs(q.x - m.x) <= 1e-9 && std::abs(q.p - m.p) <= 1e-9;
            });
            if (!seen) mids.push_back(m);
        }
    return mids;
}

inline constexpr int kDefaultOversample = 4;

/// L1 mass of |Q| inside disks of radius rho around the centres (signal) and their pairwise
/// midpoints (cross). The field is trigonometrically upsampled by `oversample` first.
inline InterferenceReport interference_mass(const PhaseField& field, const std::vector<PhasePoint>& centers, double rho,
                                            int oversample = kDefaultOversample) {
    if (!(rho > 0.0)) throw InvalidArgument("disk radius must be positive");
    if (oversample < 1) throw InvalidArgument("oversample factor must be at least 1");
    const auto& grid = field.grid();
    const auto mids = unique_midpoints(centers);

    std::vector<PhasePoint> all = centers;
    all.insert(all.end(), mids.begin(), mids.end());
    for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& c = all[i];
        if (c.x - rho < grid.x(0) || c.x + rho > grid.x(grid.size() - 1) || c.p - rho < grid.p(0) ||
            c.p + rho > grid.p(grid.size() - 1))
            throw ConfigurationError("disk around (" + std::to_string(c.x) + ", " + std::to_string(c.p) +
                                     ") leaves the grid");
        for (std::size_t k = 0; k < i; ++k)
            if (std::hypot(c.x - all[k].x, c.p - all[k].p) <= 2.0 * rho)
                throw ConfigurationError("interference disks overlap");
    }

    const FieldMatrix fine = oversample > 1 ? fft::upsample(field.values(), oversample) : field.values();
    const double fdx = grid.dx() / oversample, fdp = grid.dp() / oversample;
    const double cell = fdx * fdp;
    const auto nf = static_cast<int>(fine.rows());
    auto disk_mass = [&](const PhasePoint& c) {
        const int j0 = std::max(0, static_cast<int>(std::floor((c.x - rho - grid.x(0)) / fdx)));
        const int j1 = std::min(nf - 1, static_cast<int>(std::ceil((c.x + rho - grid.x(0)) / fdx)));
        const int k0 = std::max(0, static_cast<int>(std::floor((c.p - rho - grid.p(0)) / fdp)));
        const int k1 = std::min(nf - 1, static_cast<int>(std::ceil((c.p + rho - grid.p(0)) / fdp)));
        double acc = 0.0;
        for (int k = k0; k <= k1; ++k) {
            const double dp = grid.p(0) + k * fdp - c.p;
            for (int j = j0; j <= j1; ++j) {
                const double dx = grid.x(0) + j * fdx - c.x;
                if (dx * dx + dp * dp <= rho * rho) acc += std::abs(fine(k, j));
            }
        }
        return acc * cell;
    };

    InterferenceReport report;
    for (const auto& c : centers) report.signal_mass += disk_mass(c);
    for (const auto& m : mids) report.cross_mass += disk_mass(m);
    const double total = report.signal_mass + report.cross_mass;
    report.ratio = total > 0.0 ? report.cross_mass / total : 0.0;
    report.midpoint_count = static_cast<int>(mids.size());
    return report;
}

// ---------------------------------------------------------------------------------------------
// Diamond experiment

struct DiamondConfig {
    double radius = 2.0;
    double rho = 0.6;
    int n_points = 512;
    double x_max = 8.0;
    double hbar = kDefaultHbar;
    double base_angle = 0.0;
    double final_angle = kPi / 4.0;
    int n_steps = 9;
    std::vector<std::string> distributions{"wigner", "bj"};
    int oversample = kDefaultOversample;

    void validate() const {
        if (n_steps < 1) throw InvalidArgument("n_steps must be at least 1");
        if (!(radius > 0.0)) throw InvalidArgument("diamond radius must be positive");
        if (distributions.empty()) throw InvalidArgument("at least one distribution is required");
    }
    std::vector<double> angles() const {
        std::vector<double> out;
        for (int i = 0; i < n_steps; ++i)
            out.push_back(n_steps == 1 ? base_angle : base_angle + i * (final_angle - base_angle) / (n_steps - 1));
        return out;
    }
};

/// z_j = a (cos(theta + j pi/2), sin(theta + j pi/2)), j = 0..3.
inline std::vector<PhasePoint> diamond_centers(double radius, double angle) {
    std::vector<PhasePoint> out;
    for (int j = 0; j < 4; ++j) {
        const double t = angle + j * kPi / 2.0;
        out.push_back({radius * std::cos(t), radius * std::sin(t)});
    }
    return out;
}

inline std::vector<GaussianState> coherent_states(const std::vector<PhasePoint>& centers) {
    std::vector<GaussianState> out;
    for (const auto& c : centers) out.push_back(GaussianState::coherent(c.x, c.p));
    return out;
}

struct DistributionResult {
    std::string distribution;
    PhaseField field;
    InterferenceReport report;
};

struct DiamondStep {
    double angle = 0.0;
    std::vector<DistributionResult> results;
};

/// Largest deviation of the field's marginals from |f|^2 and |F f|^2.
inline std::pair<double, double> marginal_errors(const PhaseField& field, const Signal& f) {
    const auto m = marginals(field);
    return {(m.position - position_density(f)).cwiseAbs().maxCoeff(),
            (m.momentum - momentum_density(f)).cwiseAbs().maxCoeff()};
}

inline std::vector<DiamondStep> diamond_experiment(const DiamondConfig& cfg) {
    cfg.validate();
    const HBarConfig hbar(cfg.hbar);
    const auto grid = make_spatial_grid(cfg.n_points, cfg.x_max, hbar);
    std::vector<CohenKernel> kernels;
    for (const auto& name : cfg.distributions) kernels.push_back(kernel_by_name(name, hbar));

    const auto angles = cfg.angles();
    std::vector<std::optional<DiamondStep>> slots(angles.size());
    parallel_for(angles.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            const auto centers = diamond_centers(cfg.radius, angles[i]);
            const Signal f = sample_superposition(coherent_states(centers), grid);
            const PhaseField w = wigner_discrete(f);
            DiamondStep step{angles[i], {}};
            for (std::size_t d = 0; d < kernels.size(); ++d) {
                PhaseField q = kernels[d].name == "wigner" ? w : cohen_apply(w, kernels[d]);
                auto report = interference_mass(q, centers, cfg.rho, cfg.oversample);
                report.angle = angles[i];
                report.distribution = cfg.distributions[d];
                const auto [ex, ep] = marginal_errors(q, f);
                report.residuals = {{"position_marginal", ex}, {"momentum_marginal", ep}};
                step.results.push_back({cfg.distributions[d], std::move(q), std::move(report)});
            }
            slots[i] = std::move(step);
        }
    });
    std::vector<DiamondStep> out;
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

/// Spread of a sequence relative to its maximum: (max - min) / max.
inline double relative_spread(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *hi != 0.0 ? (*hi - *lo) / *hi : 0.0;
}

}  // namespace tfq
