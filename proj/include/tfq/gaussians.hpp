#pragma once

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <vector>

#include "tfq/core.hpp"

namespace tfq {

/// z -> value on R^{2n}; Gaussian oracles are returned as closures so the caller picks the resolution.
using PhaseEvaluator = std::function<cplx(const RVector&)>;

inline constexpr double kConditionLimit = 1e12;

namespace detail {

template <class Matrix>
Matrix guarded_inverse(const Matrix& m, const char* what) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    const double smax = s(0), smin = s(s.size() - 1);
    if (!(smin > 0.0) || smax / smin > kConditionLimit)
        throw DomainError(std::string(what) + " is singular or ill-conditioned");
    return m.fullPivLu().inverse();
}

inline bool real_part_positive_definite(const CMatrix& m) {
    const RMatrix x = 0.5 * (m.real() + m.real().transpose());
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(x);
    return eig.eigenvalues().minCoeff() > 0.0;
}

/// prod_k mu_k^{-1/2} over the eigenvalues of m, each root taken with positive real part.
inline cplx inverse_sqrt_det(const CMatrix& m) {
    Eigen::ComplexEigenSolver<CMatrix> eig(m, false);
    cplx acc = 1.0;
    for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) acc /= std::sqrt(eig.eigenvalues()(k));
    return acc;
}

inline cplx quadratic_form(const CMatrix& f, const RVector& z) { return z.cast<cplx>().dot(f * z.cast<cplx>()); }

}  // namespace detail

struct FresnelForm {
    cplx scale;    ///< (det M)^{-1/2}, eigenvalue roots with positive real part
    CMatrix m_inv;
};

/// Fourier transform of a complex Gaussian: F(e^{-Mx^2/2hbar}) = (det M)^{-1/2} e^{-M^{-1}p^2/2hbar}.
inline FresnelForm fresnel_fourier_form(const CMatrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) throw InvalidArgument("M must be square");
    if ((m - m.transpose()).norm() > GaussianState::kSymmetryTolerance * std::max(1.0, m.norm()))
        throw InvalidArgument("M is not symmetric");
    if (!detail::real_part_positive_definite(m)) throw DomainError("Re M is not positive definite");
    return {detail::inverse_sqrt_det(m), detail::guarded_inverse(m, "M")};
}

/// amplitude * exp(-(1/hbar) G (z - z0).(z - z0)).
struct GaussianWignerForm {
    RMatrix g;
    double amplitude = 0.0;
    RVector center;
    double hbar = kDefaultHbar;

    double operator()(const RVector& z) const {
        const RVector d = z - center;
        return amplitude * std::exp(-d.dot(g * d) / hbar);
    }
    double operator()(double x, double p) const {
        RVector z(2);
        z << x, p;
        return (*this)(z);
    }
};

/// Wigner transform of weight * T(z0) psi_M: G = [[X + Y X^-1 Y, Y X^-1], [X^-1 Y, X^-1]],
/// amplitude |weight|^2 (1/pi hbar)^n.
inline GaussianWignerForm wigner_of_gaussian(const GaussianState& state, HBarConfig hbar = {}) {
    const int n = state.dimension();
    const RMatrix x = state.x_part(), y = state.y_part();
    const RMatrix xi = detail::guarded_inverse(x, "X");
    GaussianWignerForm form;
    form.g.resize(2 * n, 2 * n);
    form.g.topLeftCorner(n, n) = x + y * xi * y;
    form.g.topRightCorner(n, n) = y * xi;
    form.g.bottomLeftCorner(n, n) = xi * y;
    form.g.bottomRightCorner(n, n) = xi;
    form.g = 0.5 * (form.g + form.g.transpose()).eval();
    form.amplitude = std::norm(state.weight()) * std::pow(1.0 / (kPi * hbar.value()), n);
    form.center = state.center();
    form.hbar = hbar.value();
    return form;
}

/// W(psi_M, psi_M')(z) = (1/pi hbar)^n C exp(-(1/hbar) F z.z).
struct CrossWignerForm {
    CMatrix f;
    cplx c;
    double hbar = kDefaultHbar;

    int dimension() const { return static_cast<int>(f.rows() / 2); }
    cplx operator()(const RVector& z) const {
        return std::pow(1.0 / (kPi * hbar), dimension()) * c * std::exp(-detail::quadratic_form(f, z) / hbar);
    }
};

inline CrossWignerForm cross_wigner_of_gaussians(const CMatrix& m, const CMatrix& m2, HBarConfig hbar = {}) {
    if (m.rows() != m2.rows() || m.rows() != m.cols() || m2.rows() != m2.cols())
        throw InvalidArgument("M and M' must be square of equal size");
    const GaussianState s1(m), s2(m2);  // validates symmetry and Re M > 0
    const auto n = m.rows();
    const CMatrix sum = s1.m() + s2.m().conjugate();
    const CMatrix diff = s1.m() - s2.m().conjugate();
    if (!detail::real_part_positive_definite(sum)) throw DomainError("Re(M + conj M') is not positive definite");
    const CMatrix sum_inv = detail::guarded_inverse(sum, "M + conj M'");
    const cplx i{0.0, 1.0};

    CrossWignerForm form;
    form.f.resize(2 * n, 2 * n);
    form.f.topLeftCorner(n, n) = 2.0 * s2.m().conjugate() * sum_inv * s1.m();
    form.f.topRightCorner(n, n) = -i * diff * sum_inv;
    form.f.bottomLeftCorner(n, n) = -i * sum_inv * diff;
    form.f.bottomRightCorner(n, n) = 2.0 * sum_inv;
    form.c = std::pow((s1.x_part() * s2.x_part()).determinant(), 0.25) * detail::inverse_sqrt_det(0.5 * sum);
    form.hbar = hbar.value();
    return form;
}

/// W(T(z0) f, T(z1) g)(z) = exp(-(i/hbar)[sigma(z, z0 - z1) + sigma(z0, z1)/2]) W(f, g)(z - (z0 + z1)/2).
inline PhaseEvaluator translated_cross_wigner(CrossWignerForm form, RVector z0, RVector z1) {
    if (z0.size() != 2 * form.dimension() || z1.size() != 2 * form.dimension())
        throw InvalidArgument("shift vectors must have 2n components");
    return [form = std::move(form), z0 = std::move(z0), z1 = std::move(z1)](const RVector& z) {
        const RVector mid = 0.5 * (z0 + z1);
        const double phase = symplectic_form(z, RVector(z0 - z1)) + 0.5 * symplectic_form(z0, z1);
        return std::polar(1.0, -phase / form.hbar) * form(z - mid);
    };
}

/// Wigner transform of sum_k weight_k T(z_k) psi_{M_k}: diagonal Gaussians plus
/// 2 Re of every cross pair k > l. Weights are used as given, with no renormalisation.
inline PhaseEvaluator superposition_wigner(const std::vector<GaussianState>& states, HBarConfig hbar = {}) {
    if (states.empty()) throw InvalidArgument("superposition needs at least one state");
    struct Cross {
        PhaseEvaluator eval;
        cplx weight;
    };
    std::vector<GaussianWignerForm> diagonal;
    std::vector<Cross> cross;
    for (std::size_t k = 0; k < states.size(); ++k) {
        diagonal.push_back(wigner_of_gaussian(states[k], hbar));
        for (std::size_t l = 0; l < k; ++l) {
            const auto form = cross_wigner_of_gaussians(states[k].m(), states[l].m(), hbar);
            cross.push_back({translated_cross_wigner(form, states[k].center(), states[l].center()),
                             states[k].weight() * std::conj(states[l].weight())});
        }
    }
    return [diagonal = std::move(diagonal), cross = std::move(cross)](const RVector& z) {
        double acc = 0.0;
        for (const auto& d : diagonal) acc += d(z);
        for (const auto& c : cross) acc += 2.0 * (c.weight * c.eval(z)).real();
        return cplx{acc, 0.0};
    };
}

/// Samples weight * T(z0) psi_M (n = 1) on the grid, using the exact off-grid centre.
inline Signal sample_state(const GaussianState& state, const SpatialGrid& grid) {
    if (state.dimension() != 1) throw InvalidArgument("sampling is defined for n = 1");
    const double h = grid.hbar();
    const cplx m = state.m()(0, 0);
    const double x0 = state.center()(0), p0 = state.center()(1);
    const double norm = std::pow(kPi * h, -0.25) * std::pow(m.real(), 0.25);
    CVector v(grid.size());
    for (int j = 0; j < grid.size(); ++j) {
        const double x = grid.x(j), d = x - x0;
        v(j) = state.weight() * norm * std::polar(1.0, (p0 * x - 0.5 * p0 * x0) / h) * std::exp(-m * d * d / (2.0 * h));
    }
    return Signal(grid, std::move(v));
}

/// Sum of sampled states.
inline Signal sample_superposition(const std::vector<GaussianState>& states, const SpatialGrid& grid) {
    Signal acc(grid);
    for (const auto& s : states) acc.values += sample_state(s, grid).values;
    return acc;
}

/// Evaluates a phase-space closure on every grid point (row = p, column = x).
inline PhaseField evaluate_on_grid(const PhaseEvaluator& eval, const PhaseGrid& grid,
                                   ValueKind kind = ValueKind::complex) {
    const int n = grid.size();
    FieldMatrix values(n, n);
    RVector z(2);
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            z << grid.x(j), grid.p(k);
            values(k, j) = eval(z);
        }
    return PhaseField(grid, std::move(values), kind);
}

}  // namespace tfq
