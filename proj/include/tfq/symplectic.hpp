#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "tfq/core.hpp"
#include "tfq/fft.hpp"
#include "tfq/parallel.hpp"

namespace tfq {

inline SymplecticMap rotation(double theta) {
    RMatrix s(2, 2);
    s << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
    return validate_symplectic(s);
}

inline SymplecticMap fourier_map(int n = 1) {
    return SymplecticMap(symplectic_j(n), {FourierJ{n}});
}

/// M_L = diag(L^-1, L^T).
inline SymplecticMap scale(const RMatrix& l) {
    if (l.rows() != l.cols() || l.rows() == 0) throw InvalidArgument("L must be square");
    if (!(std::abs(l.determinant()) > 1e-12)) throw InvalidArgument("L is singular");
    const ScaleGen gen{l};
    return SymplecticMap(generator_matrix(gen), {gen});
}
inline SymplecticMap scale(double l) { return scale(RMatrix::Constant(1, 1, l)); }

/// [[I, 0], [P, I]] for symmetric P.
inline SymplecticMap shear(const RMatrix& p) {
    if (p.rows() != p.cols() || p.rows() == 0) throw InvalidArgument("P must be square");
    if ((p - p.transpose()).norm() > 1e-14 * std::max(1.0, p.norm())) throw InvalidArgument("P must be symmetric");
    const ChirpGen gen{p};
    return SymplecticMap(generator_matrix(gen), {gen});
}
inline SymplecticMap shear(double p) { return shear(RMatrix::Constant(1, 1, p)); }

inline SymplecticMap compose(const SymplecticMap& a, const SymplecticMap& b) {
    std::vector<Generator> gens = a.factorization();
    gens.insert(gens.end(), b.factorization().begin(), b.factorization().end());
    if (a.factorization().empty() || b.factorization().empty()) gens.clear();
    RMatrix s = a.matrix() * b.matrix();
    if (s.rows() == 2) return validate_symplectic(s);
    return SymplecticMap(std::move(s), std::move(gens));
}

/// Generator list whose matrix product is S (n = 1).
inline std::vector<Generator> factor_sl2(const SymplecticMap& s) {
    if (s.dimension() != 1) throw InvalidArgument("factor_sl2 needs a 2x2 map");
    return detail::factor_sl2_matrix(s.matrix());
}

// ---------------------------------------------------------------------------------------------
// Discrete metaplectic action

struct FourierStep {};
struct ScaleStep {
    double l;
};
struct ChirpStep {
    double p;
};
using MetaplecticStep = std::variant<FourierStep, ScaleStep, ChirpStep>;

inline std::string step_name(const MetaplecticStep& s) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, FourierStep>) return "fourier";
            else if constexpr (std::is_same_v<T, ScaleStep>) return "scale(" + std::to_string(v.l) + ")";
            else return "chirp(" + std::to_string(v.p) + ")";
        },
        s);
}

/// Ordered operator steps realizing S; the first entry acts first on the signal.
/// The global metaplectic sign is not tracked.
struct MetaplecticAction {
    SymplecticMap source;
    std::vector<MetaplecticStep> steps;
};

/// Matrix product G1 G2 ... Gm acts on signals as Gm first, so operator order is reversed.
inline MetaplecticAction metaplectic_action(const SymplecticMap& s) {
    if (s.dimension() != 1) throw InvalidArgument("discrete metaplectic action is implemented for n = 1");
    const auto gens = s.factorization().empty() ? factor_sl2(s) : s.factorization();
    MetaplecticAction action{s, {}};
    for (auto it = gens.rbegin(); it != gens.rend(); ++it) {
        std::visit(
            [&](const auto& g) {
                using T = std::decay_t<decltype(g)>;
                if constexpr (std::is_same_v<T, FourierJ>) action.steps.emplace_back(FourierStep{});
                else if constexpr (std::is_same_v<T, ScaleGen>) action.steps.emplace_back(ScaleStep{g.L(0, 0)});
                else action.steps.emplace_back(ChirpStep{g.P(0, 0)});
            },
            *it);
    }
    return action;
}

inline constexpr double kMetaplecticNormTolerance = 1e-8;

/// Result of applying a metaplectic action together with its error budget.
struct MetaplecticResult {
    Signal signal;
    /// Relative norm change per step, | ||out|| - ||in|| | / ||in||.
    std::vector<double> step_norm_change;
    double total_norm_change = 0.0;
};

namespace detail {

/// g(x_j) = dx / sqrt(2 pi hbar) sum_j' e^{-i x_j x_j' / hbar} f(x_j'), a direct DTFT so the
/// output grid equals the input grid for any hbar.
inline CVector fourier_step(const Signal& f) {
    const auto& g = f.grid;
    const int n = g.size();
    const double pref = g.dx() / std::sqrt(g.hbar_config().cell());
    CVector out(n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
        for (std::size_t row = b; row < e; ++row) {
            const double x = g.x(static_cast<int>(row));
            cplx acc{};
            for (int j = 0; j < n; ++j) acc += std::polar(1.0, -x * g.x(j) / g.hbar()) * f.values(j);
            out(static_cast<Eigen::Index>(row)) = pref * acc;
        }
    });
    return out;
}

/// sqrt|L| f(L x) by band-limited interpolation; points leaving the window are zero.
inline CVector scale_step(const Signal& f, double l) {
    const auto& g = f.grid;
    RVector pts(g.size());
    for (int j = 0; j < g.size(); ++j) pts(j) = l * g.x(j);
    return std::sqrt(std::abs(l)) * fft::trig_evaluate(f.values, g.x_min(), g.dx(), pts);
}

inline CVector chirp_step(const Signal& f, double p) {
    const auto& g = f.grid;
    CVector out(g.size());
    for (int j = 0; j < g.size(); ++j) out(j) = std::polar(1.0, p * g.x(j) * g.x(j) / (2.0 * g.hbar())) * f.values(j);
    return out;
}

}  // namespace detail

inline Signal apply_step(const MetaplecticStep& step, const Signal& f) {
    return std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, FourierStep>) return Signal(f.grid, detail::fourier_step(f));
            else if constexpr (std::is_same_v<T, ScaleStep>) return Signal(f.grid, detail::scale_step(f, s.l));
            else return Signal(f.grid, detail::chirp_step(f, s.p));
        },
        step);
}

/// Applies the action step by step. Throws RangeError when a step loses more than 1e-8 of the
/// norm (energy pushed off the grid).
inline MetaplecticResult metaplectic_apply_detailed(const MetaplecticAction& action, const Signal& f) {
    MetaplecticResult result{f, {}, 0.0};
    const double n0 = f.norm();
    for (const auto& step : action.steps) {
        const double before = result.signal.norm();
        result.signal = apply_step(step, result.signal);
        const double after = result.signal.norm();
        const double change = before > 0.0 ? std::abs(after - before) / before : 0.0;
        result.step_norm_change.push_back(change);
        if (change > kMetaplecticNormTolerance) {
            const double tail = before > 0.0 ? std::max(0.0, 1.0 - (after * after) / (before * before)) : 0.0;
            throw RangeError("metaplectic step " + step_name(step) + " moved energy off the grid (norm change " +
                                 std::to_string(change) + ")",
                             tail);
        }
    }
    result.total_norm_change = n0 > 0.0 ? std::abs(result.signal.norm() - n0) / n0 : 0.0;
    return result;
}

inline MetaplecticResult metaplectic_apply_detailed(const SymplecticMap& s, const Signal& f) {
    return metaplectic_apply_detailed(metaplectic_action(s), f);
}

inline Signal metaplectic_apply(const SymplecticMap& s, const Signal& f) {
    return metaplectic_apply_detailed(s, f).signal;
}

}  // namespace tfq
