#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <algorithm>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "tfq/errors.hpp"

namespace tfq {

using cplx = std::complex<double>;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
/// Phase-space samples: row index = momentum sample k, column index = position sample j.
using FieldMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kDefaultHbar = 1.0 / (2.0 * kPi);

/// Reduced Planck constant used by every transform. The default 1/(2 pi) makes the
/// hbar-scaled Fourier transform the ordinary unitary one with kernel exp(-2 pi i p y).
class HBarConfig {
public:
    HBarConfig() = default;
    explicit HBarConfig(double hbar) : hbar_(hbar) {
        if (!(hbar > 0.0) || !std::isfinite(hbar))
            throw InvalidArgument("hbar must be a positive finite number");
    }
    double value() const noexcept { return hbar_; }
    /// 2 pi hbar, the phase-space cell area.
    double cell() const noexcept { return 2.0 * kPi * hbar_; }

private:
    double hbar_ = kDefaultHbar;
};

/// Origin-centred uniform grid x_j = (j - N/2) dx, j = 0..N-1, with N even.
/// The conjugate momentum grid has dp = 2 pi hbar / (N dx).
class SpatialGrid {
public:
    SpatialGrid(int n_points, double step, HBarConfig hbar = {})
        : n_(n_points), dx_(step), hbar_(hbar) {
        if (n_points < 2 || n_points % 2 != 0) throw InvalidArgument("n_points must be even");
        if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("grid step must be positive");
    }

    int size() const noexcept { return n_; }
    int center() const noexcept { return n_ / 2; }
    double dx() const noexcept { return dx_; }
    double dp() const noexcept { return hbar_.cell() / (n_ * dx_); }
    double hbar() const noexcept { return hbar_.value(); }
    HBarConfig hbar_config() const noexcept { return hbar_; }

    double x(int j) const noexcept { return (j - center()) * dx_; }
    double p(int k) const noexcept { return (k - center()) * dp(); }
    double x_min() const noexcept { return x(0); }
    double x_max() const noexcept { return x_min() + n_ * dx_; }
    double p_min() const noexcept { return p(0); }
    double p_max() const noexcept { return p_min() + n_ * dp(); }

    friend bool operator==(const SpatialGrid& a, const SpatialGrid& b) {
        return a.n_ == b.n_ && a.dx_ == b.dx_ && a.hbar_.value() == b.hbar_.value();
    }

private:
    int n_;
    double dx_;
    HBarConfig hbar_;
};

/// Symmetric grid on [-x_max, x_max) with dx = 2 x_max / N.
inline SpatialGrid make_spatial_grid(int n_points, double x_max, HBarConfig hbar = {}) {
    if (n_points % 2 != 0) throw InvalidArgument("n_points must be even");
    if (n_points < 8) throw InvalidArgument("n_points must be at least 8");
    if (!(x_max > 0.0) || !std::isfinite(x_max)) throw InvalidArgument("x_max must be positive");
    return SpatialGrid(n_points, 2.0 * x_max / n_points, hbar);
}

/// Complex samples of a function of one variable on a SpatialGrid.
struct Signal {
    SpatialGrid grid;
    CVector values;

    Signal(SpatialGrid g, CVector v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.size()) throw InvalidArgument("signal length does not match grid");
    }
    explicit Signal(SpatialGrid g) : grid(g), values(CVector::Zero(g.size())) {}

    double norm_squared() const { return grid.dx() * values.squaredNorm(); }
    double norm() const { return std::sqrt(norm_squared()); }
};

/// <f, g> = integral f conj(g).
inline cplx inner_product(const Signal& f, const Signal& g) {
    if (!(f.grid == g.grid)) throw InvalidArgument("signals live on different grids");
    return f.grid.dx() * g.values.dot(f.values);  // Eigen's dot conjugates the left operand
}

/// Phase-space grid built from a spatial grid. Self-dual under the symplectic Fourier
/// transform: dx dp N = 2 pi hbar by construction.
class PhaseGrid {
public:
    explicit PhaseGrid(SpatialGrid axis) : axis_(axis) {}
    const SpatialGrid& axis() const noexcept { return axis_; }
    int size() const noexcept { return axis_.size(); }
    double dx() const noexcept { return axis_.dx(); }
    double dp() const noexcept { return axis_.dp(); }
    double hbar() const noexcept { return axis_.hbar(); }
    double x(int j) const noexcept { return axis_.x(j); }
    double p(int k) const noexcept { return axis_.p(k); }
    double cell_area() const noexcept { return dx() * dp(); }

    friend bool operator==(const PhaseGrid& a, const PhaseGrid& b) { return a.axis_ == b.axis_; }

private:
    SpatialGrid axis_;
};

enum class ValueKind { real, complex };

/// Values on a PhaseGrid, row = momentum index, column = position index.
class PhaseField {
public:
    PhaseField(PhaseGrid grid, FieldMatrix values, ValueKind kind = ValueKind::complex)
        : grid_(grid), values_(std::move(values)), kind_(kind) {
        if (values_.rows() != grid_.size() || values_.cols() != grid_.size())
            throw InvalidArgument("field shape does not match phase grid");
        if (kind_ == ValueKind::real) values_ = values_.real().cast<cplx>();
    }

    static PhaseField zeros(PhaseGrid grid, ValueKind kind = ValueKind::real) {
        return PhaseField(grid, FieldMatrix::Zero(grid.size(), grid.size()), kind);
    }

    /// Tags a field real after checking max|Im| <= tolerance * max(1, max|value|).
    static PhaseField make_real(PhaseGrid grid, FieldMatrix values, double tolerance = 1e-10) {
        const double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
        const double imag = values.imag().cwiseAbs().maxCoeff();
        if (!(imag <= tolerance * scale))
            throw NumericError("field expected real but has imaginary part " + std::to_string(imag));
        return PhaseField(grid, std::move(values), ValueKind::real);
    }

    const PhaseGrid& grid() const noexcept { return grid_; }
    const FieldMatrix& values() const noexcept { return values_; }
    ValueKind kind() const noexcept { return kind_; }
    bool is_real() const noexcept { return kind_ == ValueKind::real; }
    int size() const noexcept { return grid_.size(); }

    cplx operator()(int k, int j) const { return values_(k, j); }
    Eigen::MatrixXd real() const { return values_.real(); }

    /// Integral of the field over phase space (cell-area weighted sum).
    cplx integral() const { return grid_.cell_area() * values_.sum(); }

private:
    PhaseGrid grid_;
    FieldMatrix values_;
    ValueKind kind_;
};

/// Standard symplectic matrix J = [[0, I], [-I, 0]] of size 2n.
inline RMatrix symplectic_j(int n) {
    RMatrix j = RMatrix::Zero(2 * n, 2 * n);
    j.topRightCorner(n, n) = RMatrix::Identity(n, n);
    j.bottomLeftCorner(n, n) = -RMatrix::Identity(n, n);
    return j;
}

/// sigma(z, w) = J z . w = p.x' - x.p' for z = (x, p), w = (x', p').
inline double symplectic_form(std::span<const double> z, std::span<const double> w) {
    const std::size_t n = z.size() / 2;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += z[n + i] * w[i] - z[i] * w[n + i];
    return s;
}

inline double symplectic_form(const RVector& z, const RVector& w) {
    return symplectic_form(std::span<const double>(z.data(), z.size()),
                           std::span<const double>(w.data(), w.size()));
}

// Generators of Sp(n). Matrix forms: FourierJ -> J, Scale(L) -> diag(L^-1, L^T),
// Chirp(P) -> [[I, 0], [P, I]].
struct FourierJ {
    int n = 1;
};
struct ScaleGen {
    RMatrix L;
};
struct ChirpGen {
    RMatrix P;
};
using Generator = std::variant<FourierJ, ScaleGen, ChirpGen>;

inline RMatrix generator_matrix(const Generator& g) {
    return std::visit(
        [](const auto& gen) -> RMatrix {
            using T = std::decay_t<decltype(gen)>;
            if constexpr (std::is_same_v<T, FourierJ>) {
                return symplectic_j(gen.n);
            } else if constexpr (std::is_same_v<T, ScaleGen>) {
                const auto n = gen.L.rows();
                RMatrix m = RMatrix::Zero(2 * n, 2 * n);
                m.topLeftCorner(n, n) = gen.L.inverse();
                m.bottomRightCorner(n, n) = gen.L.transpose();
                return m;
            } else {
                const auto n = gen.P.rows();
                RMatrix m = RMatrix::Identity(2 * n, 2 * n);
                m.bottomLeftCorner(n, n) = gen.P;
                return m;
            }
        },
        g);
}

inline RMatrix generator_product(const std::vector<Generator>& gens, int n) {
    RMatrix acc = RMatrix::Identity(2 * n, 2 * n);
    for (const auto& g : gens) acc = acc * generator_matrix(g);
    return acc;
}

inline double symplectic_residual(const RMatrix& s) {
    const int n = static_cast<int>(s.rows() / 2);
    const RMatrix j = symplectic_j(n);
    return (s.transpose() * j * s - j).norm();
}

namespace detail {
inline std::vector<Generator> factor_sl2_matrix(const RMatrix& s);
}

/// A validated linear symplectic map with a generator factorization whose product is S.
/// For n = 1 the factorization is always available; for n > 1 it is present only when
/// the map was built from generators.
class SymplecticMap {
public:
    static constexpr double kTolerance = 1e-12;

    SymplecticMap(RMatrix s, std::vector<Generator> factorization)
        : s_(std::move(s)), factorization_(std::move(factorization)) {
        check_shape(s_);
        const double r = symplectic_residual(s_);
        if (!(r <= kTolerance))
            throw ConstraintViolation("matrix is not symplectic (residual " + std::to_string(r) + ")", r);
        const double det_err = std::abs(s_.determinant() - 1.0);
        if (!(det_err <= kTolerance))
            throw ConstraintViolation("symplectic matrix must have unit determinant", det_err);
        if (!factorization_.empty()) {
            const double fr = (generator_product(factorization_, dimension()) - s_).norm();
            if (!(fr <= 1e-10))
                throw ConstraintViolation("generator factorization does not reproduce the matrix", fr);
        }
    }

    const RMatrix& matrix() const noexcept { return s_; }
    const std::vector<Generator>& factorization() const noexcept { return factorization_; }
    int dimension() const noexcept { return static_cast<int>(s_.rows() / 2); }
    RMatrix inverse() const {
        // S^-1 = -J S^T J for symplectic S.
        const RMatrix j = symplectic_j(dimension());
        return -j * s_.transpose() * j;
    }

    static void check_shape(const RMatrix& s) {
        if (s.rows() != s.cols() || s.rows() == 0 || s.rows() % 2 != 0)
            throw InvalidArgument("symplectic matrix must be square with even dimension");
    }

private:
    RMatrix s_;
    std::vector<Generator> factorization_;
};

/// Accepts S iff ||S^T J S - J||_F <= 1e-12; otherwise throws ConstraintViolation with the residual.
inline SymplecticMap validate_symplectic(const RMatrix& s) {
    SymplecticMap::check_shape(s);
    const double r = symplectic_residual(s);
    if (!(r <= SymplecticMap::kTolerance))
        throw ConstraintViolation("matrix is not symplectic (residual " + std::to_string(r) + ")", r);
    std::vector<Generator> gens;
    if (s.rows() == 2) gens = detail::factor_sl2_matrix(s);
    return SymplecticMap(s, std::move(gens));
}

namespace detail {

/// S = [[a, b], [c, d]], det S = 1.
/// b != 0: S = Chirp(d/b) Scale(1/b) J Chirp(a/b), omitting identity factors.
/// b == 0: S = Chirp(c d) Scale(d), the chirp omitted when c == 0.
inline std::vector<Generator> factor_sl2_matrix(const RMatrix& s) {
    const double a = s(0, 0), b = s(0, 1), c = s(1, 0), d = s(1, 1);
    auto scalar = [](double v) { return RMatrix::Constant(1, 1, v); };
    std::vector<Generator> gens;
    if (std::abs(b) > 1e-14) {
        if (d != 0.0) gens.emplace_back(ChirpGen{scalar(d / b)});
        if (b != 1.0) gens.emplace_back(ScaleGen{scalar(1.0 / b)});
        gens.emplace_back(FourierJ{1});
        if (a != 0.0) gens.emplace_back(ChirpGen{scalar(a / b)});
    } else {
        if (c != 0.0) gens.emplace_back(ChirpGen{scalar(c * d)});
        gens.emplace_back(ScaleGen{scalar(d)});
    }
    return gens;
}

}  // namespace detail

/// Complex symmetric n x n matrix M = X + iY with X positive definite, a phase-space
/// centre z0 and a complex weight: the state weight * T(z0) psi_M.
class GaussianState {
public:
    static constexpr double kSymmetryTolerance = 1e-13;

    explicit GaussianState(CMatrix m, RVector center = {}, cplx weight = 1.0)
        : m_(std::move(m)), center_(std::move(center)), weight_(weight) {
        if (m_.rows() != m_.cols() || m_.rows() == 0) throw InvalidArgument("M must be square");
        const auto n = m_.rows();
        if (center_.size() == 0) center_ = RVector::Zero(2 * n);
        if (center_.size() != 2 * n) throw InvalidArgument("centre must have 2n components");
        const double asym = (m_ - m_.transpose()).norm();
        if (asym > kSymmetryTolerance * std::max(1.0, m_.norm()))
            throw InvalidArgument("M is not symmetric");
        m_ = 0.5 * (m_ + m_.transpose()).eval();
        Eigen::LLT<RMatrix> llt(m_.real());
        if (llt.info() != Eigen::Success) throw DomainError("Re M is not positive definite");
        Eigen::SelfAdjointEigenSolver<RMatrix> eig(m_.real());
        if (eig.eigenvalues().minCoeff() <= 0.0) throw DomainError("Re M is not positive definite");
    }

    /// Scalar convenience for n = 1.
    static GaussianState scalar(cplx m, double x0 = 0.0, double p0 = 0.0, cplx weight = 1.0) {
        RVector z(2);
        z << x0, p0;
        return GaussianState(CMatrix::Constant(1, 1, m), z, weight);
    }
    /// Standard coherent state T(z0) psi_0.
    static GaussianState coherent(double x0 = 0.0, double p0 = 0.0, cplx weight = 1.0) {
        return scalar(1.0, x0, p0, weight);
    }

    int dimension() const noexcept { return static_cast<int>(m_.rows()); }
    const CMatrix& m() const noexcept { return m_; }
    RMatrix x_part() const { return m_.real(); }
    RMatrix y_part() const { return m_.imag(); }
    const RVector& center() const noexcept { return center_; }
    cplx weight() const noexcept { return weight_; }

    GaussianState translated(const RVector& z) const { return GaussianState(m_, center_ + z, weight_); }

private:
    CMatrix m_;
    RVector center_;
    cplx weight_;
};

/// Ambiguity-domain multiplier of a Cohen-class distribution: the symplectic Fourier
/// transform of Qf equals that of Wf times multiplier(x_lag, p_lag).
struct CohenKernel {
    std::string name;
    std::function<cplx(double x_lag, double p_lag)> multiplier;
    /// Set when the multiplier was built for a specific hbar.
    std::optional<double> hbar;
};

}  // namespace tfq
