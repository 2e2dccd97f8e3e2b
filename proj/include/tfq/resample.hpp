#pragma once

#include <cmath>

#include "tfq/core.hpp"
#include "tfq/fft.hpp"
#include "tfq/parallel.hpp"

namespace tfq {

enum class Interpolation {
    /// Band-limited: separable trigonometric evaluation for diagonal maps, otherwise a
    /// three-shear decomposition with each shear done as an FFT phase ramp.
    spectral,
    bilinear,
};

namespace detail {

inline int signed_frequency(int q, int n) { return q < n / 2 ? q : q - n; }

/// h(x_j, p_k) = Q(x_j + shift_k, p_k), shift_k = alpha p_k (periodic in x).
inline void shear_along_x(FieldMatrix& q, const PhaseGrid& grid, double alpha) {
    const int n = grid.size();
    const double period = n * grid.dx();
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
        fft::Buffer row(n), spec;
        for (std::size_t k = b; k < e; ++k) {
            for (int j = 0; j < n; ++j) row[j] = q(k, j);
            fft::dft(row, spec, -1);
            const double shift = alpha * grid.p(static_cast<int>(k));
            for (int f = 0; f < n; ++f) spec[f] *= std::polar(1.0 / n, 2.0 * kPi * signed_frequency(f, n) * shift / period);
            fft::dft(spec, row, +1);
            for (int j = 0; j < n; ++j) q(k, j) = row[j];
        }
    });
}

/// h(x_j, p_k) = Q(x_j, p_k + beta x_j) (periodic in p).
inline void shear_along_p(FieldMatrix& q, const PhaseGrid& grid, double beta) {
    const int n = grid.size();
    const double period = n * grid.dp();
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
        fft::Buffer col(n), spec;
        for (std::size_t j = b; j < e; ++j) {
            for (int k = 0; k < n; ++k) col[k] = q(k, j);
            fft::dft(col, spec, -1);
            const double shift = beta * grid.x(static_cast<int>(j));
            for (int f = 0; f < n; ++f) spec[f] *= std::polar(1.0 / n, 2.0 * kPi * signed_frequency(f, n) * shift / period);
            fft::dft(spec, col, +1);
            for (int k = 0; k < n; ++k) q(k, j) = col[k];
        }
    });
}

inline FieldMatrix apply_diagonal(const FieldMatrix& q, const PhaseGrid& grid, double ax, double dp_scale) {
    const int n = grid.size();
    RVector xs(n), ps(n);
    for (int i = 0; i < n; ++i) {
        xs(i) = ax * grid.x(i);
        ps(i) = dp_scale * grid.p(i);
    }
    const CMatrix ex = fft::interpolation_matrix(xs, grid.x(0), grid.dx(), n);
    const CMatrix ep = fft::interpolation_matrix(ps, grid.p(0), grid.dp(), n);
    FieldMatrix out = ep * q * ex.transpose();
    return out;
}

inline FieldMatrix apply_bilinear(const FieldMatrix& q, const PhaseGrid& grid, const RMatrix& a) {
    const int n = grid.size();
    FieldMatrix out = FieldMatrix::Zero(n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
        for (std::size_t kk = b; kk < e; ++kk) {
            const int k = static_cast<int>(kk);
            for (int j = 0; j < n; ++j) {
                const double x = a(0, 0) * grid.x(j) + a(0, 1) * grid.p(k);
                const double p = a(1, 0) * grid.x(j) + a(1, 1) * grid.p(k);
                const double u = (x - grid.x(0)) / grid.dx();
                const double v = (p - grid.p(0)) / grid.dp();
                const int j0 = static_cast<int>(std::floor(u)), k0 = static_cast<int>(std::floor(v));
                if (j0 < 0 || k0 < 0 || j0 + 1 >= n || k0 + 1 >= n) continue;
                const double tu = u - j0, tv = v - k0;
                out(k, j) = (1 - tv) * ((1 - tu) * q(k0, j0) + tu * q(k0, j0 + 1)) +
                            tv * ((1 - tu) * q(k0 + 1, j0) + tu * q(k0 + 1, j0 + 1));
            }
        }
    });
    return out;
}

}  // namespace detail

/// Samples z -> Q(A z) on the field's own grid, for a 2x2 matrix A with det A = 1.
inline PhaseField apply_linear_map(const PhaseField& field, const RMatrix& a,
                                   Interpolation method = Interpolation::spectral) {
    if (a.rows() != 2 || a.cols() != 2) throw InvalidArgument("resampling needs a 2x2 matrix");
    const auto& grid = field.grid();
    if (method == Interpolation::bilinear)
        return PhaseField(grid, detail::apply_bilinear(field.values(), grid, a), field.kind());

    const double ea = a(0, 0), eb = a(0, 1), ec = a(1, 0), ed = a(1, 1);
    constexpr double eps = 1e-14;
    FieldMatrix q = field.values();
    if (std::abs(eb) <= eps && std::abs(ec) <= eps) {
        q = detail::apply_diagonal(q, grid, ea, ed);
    } else if (std::abs(ec) > eps) {
        // A = U((a-1)/c) L(c) U((d-1)/c)
        detail::shear_along_x(q, grid, (ea - 1.0) / ec);
        detail::shear_along_p(q, grid, ec);
        detail::shear_along_x(q, grid, (ed - 1.0) / ec);
    } else {
        // A = L((d-1)/b) U(b) L((a-1)/b)
        detail::shear_along_p(q, grid, (ed - 1.0) / eb);
        detail::shear_along_x(q, grid, eb);
        detail::shear_along_p(q, grid, (ea - 1.0) / eb);
    }
    if (field.is_real()) q = q.real().cast<cplx>();
    return PhaseField(grid, std::move(q), field.kind());
}

}  // namespace tfq
