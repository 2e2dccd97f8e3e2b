#pragma once

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <vector>

#include "tfq/core.hpp"
#include "tfq/parallel.hpp"

namespace tfq::fft {

using Buffer = std::vector<cplx>;

/// One engine per thread: the kissfft backend caches twiddle tables and is not thread-safe.
inline Eigen::FFT<double>& engine() {
    thread_local Eigen::FFT<double> e = [] {
        Eigen::FFT<double> f;
        f.SetFlag(Eigen::FFT<double>::Unscaled);
        return f;
    }();
    return e;
}

/// sign = -1: out[k] = sum_j e^{-2 pi i kj/N} in[j]; sign = +1: the unscaled inverse.
inline void dft(const Buffer& in, Buffer& out, int sign) {
    out.resize(in.size());
    if (sign < 0)
        engine().fwd(out, in);
    else
        engine().inv(out, in);
}

/// out[k] = sum_j exp(sign 2 pi i (k - c)(j - c) / N) in[j] with c = N/2.
inline void centered_dft(Buffer& data, Buffer& scratch, int sign) {
    const std::size_t n = data.size();
    for (std::size_t j = 1; j < n; j += 2) data[j] = -data[j];
    dft(data, scratch, sign);
    const double global = (n / 2) % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) data[k] = (k % 2 == 0 ? global : -global) * scratch[k];
}

inline CVector centered_dft(const CVector& v, int sign) {
    Buffer data(v.data(), v.data() + v.size()), scratch;
    centered_dft(data, scratch, sign);
    return Eigen::Map<CVector>(data.data(), v.size());
}

/// Centered DFT of every row (along x) of a field matrix, in place.
inline void centered_dft_rows(FieldMatrix& m, int sign) {
    const auto rows = static_cast<std::size_t>(m.rows());
    const auto cols = m.cols();
    parallel_for(rows, [&](std::size_t b, std::size_t e) {
        Buffer data(cols), scratch;
        for (std::size_t r = b; r < e; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) data[c] = m(r, c);
            centered_dft(data, scratch, sign);
            for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[c];
        }
    });
}

/// Centered DFT of every column (along p) of a field matrix, in place.
inline void centered_dft_cols(FieldMatrix& m, int sign) {
    const auto cols = static_cast<std::size_t>(m.cols());
    const auto rows = m.rows();
    parallel_for(cols, [&](std::size_t b, std::size_t e) {
        Buffer data(rows), scratch;
        for (std::size_t c = b; c < e; ++c) {
            for (Eigen::Index r = 0; r < rows; ++r) data[r] = m(r, c);
            centered_dft(data, scratch, sign);
            for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = data[r];
        }
    });
}

/// Trigonometric interpolation onto a grid `factor` times finer (same window, same origin).
/// The Nyquist bin is split evenly between +-N/2, so real input stays real and
/// out[factor * j] == in[j] exactly.
inline void upsample(const Buffer& in, Buffer& out, int factor, Buffer& scratch) {
    const std::size_t n = in.size(), m = n * factor, h = n / 2;
    dft(in, scratch, -1);
    Buffer padded(m, cplx{});
    for (std::size_t q = 0; q < h; ++q) {
        padded[q] = scratch[q];
        padded[m - h + q] = scratch[n - h + q];
    }
    if (factor > 1) {
        padded[m - h] *= 0.5;
        padded[h] = padded[m - h];
    }
    dft(padded, out, +1);
    const double norm = 1.0 / static_cast<double>(n);
    for (auto& v : out) v *= norm;
}

inline CVector upsample(const CVector& v, int factor) {
    Buffer in(v.data(), v.data() + v.size()), out, scratch;
    upsample(in, out, factor, scratch);
    return Eigen::Map<CVector>(out.data(), static_cast<Eigen::Index>(out.size()));
}

/// Two-dimensional trigonometric upsampling of a field matrix by `factor` on both axes.
inline FieldMatrix upsample(const FieldMatrix& m, int factor) {
    const Eigen::Index rows = m.rows(), cols = m.cols();
    FieldMatrix wide(rows, cols * factor);
    parallel_for(static_cast<std::size_t>(rows), [&](std::size_t b, std::size_t e) {
        Buffer in(cols), out, scratch;
        for (std::size_t r = b; r < e; ++r) {
            for (Eigen::Index c = 0; c < cols; ++c) in[c] = m(r, c);
            upsample(in, out, factor, scratch);
            for (Eigen::Index c = 0; c < cols * factor; ++c) wide(r, c) = out[c];
        }
    });
    FieldMatrix fine(rows * factor, cols * factor);
    parallel_for(static_cast<std::size_t>(cols * factor), [&](std::size_t b, std::size_t e) {
        Buffer in(rows), out, scratch;
        for (std::size_t c = b; c < e; ++c) {
            for (Eigen::Index r = 0; r < rows; ++r) in[r] = wide(r, c);
            upsample(in, out, factor, scratch);
            for (Eigen::Index r = 0; r < rows * factor; ++r) fine(r, c) = out[r];
        }
    });
    return fine;
}

/// Rows of the matrix E with (E s)[i] = band-limited interpolant of samples s at points[i].
/// Samples live at origin + j step, j = 0..N-1; points outside [origin, origin + (N - 1/2) step]
/// get a zero row.
inline CMatrix interpolation_matrix(const RVector& points, double origin, double step, int n) {
    const double period = n * step;
    CMatrix e(points.size(), n);
    parallel_for(static_cast<std::size_t>(points.size()), [&](std::size_t b, std::size_t end) {
        CVector phases(n);
        for (std::size_t i = b; i < end; ++i) {
            const double t = points[static_cast<Eigen::Index>(i)] - origin;
            if (t < -1e-12 * step || t > (n - 0.5) * step) {
                e.row(static_cast<Eigen::Index>(i)).setZero();
                continue;
            }
            // Coefficients over frequencies q in [-N/2, N/2), then folded back into sample space.
            for (int q = 0; q < n; ++q) {
                const int freq = q < n / 2 ? q : q - n;
                phases[q] = std::polar(1.0 / n, 2.0 * kPi * freq * t / period);
            }
            // E[i, j] = sum_q phases[q] e^{-2 pi i q j / N}: the forward DFT of phases.
            Buffer in(phases.data(), phases.data() + n), out;
            dft(in, out, -1);
            for (int j = 0; j < n; ++j) e(static_cast<Eigen::Index>(i), j) = out[j];
        }
    });
    return e;
}

/// Band-limited interpolant of `values` (samples at origin + j step) evaluated at points.
inline CVector trig_evaluate(const CVector& values, double origin, double step, const RVector& points) {
    return interpolation_matrix(points, origin, step, static_cast<int>(values.size())) * values;
}

}  // namespace tfq::fft
