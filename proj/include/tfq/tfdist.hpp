#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <string>
#include <utility>

#include "tfq/core.hpp"
#include "tfq/fft.hpp"
#include "tfq/parallel.hpp"

namespace tfq {

// ---------------------------------------------------------------------------------------------
// Warnings

using WarningSink = std::function<void(const std::string&)>;

namespace detail {
struct WarningChannel {
    std::mutex mutex;
    WarningSink sink = [](const std::string& msg) { std::fprintf(stderr, "tfq warning: %s\n", msg.c_str()); };
};
inline WarningChannel& warning_channel() {
    static WarningChannel channel;
    return channel;
}
}  // namespace detail

/// Replaces the warning handler (default: stderr). Returns the previous handler.
inline WarningSink set_warning_sink(WarningSink sink) {
    auto& ch = detail::warning_channel();
    std::lock_guard lock(ch.mutex);
    std::swap(ch.sink, sink);
    return sink;
}

inline void emit_warning(const std::string& msg) {
    auto& ch = detail::warning_channel();
    std::lock_guard lock(ch.mutex);
    if (ch.sink) ch.sink(msg);
}

inline constexpr double kBandLimitTailTolerance = 1e-10;

/// Fraction of the signal's spectral energy in bins with |k - N/2| > N/4.
inline double band_limit_tail(const Signal& f) {
    const CVector spectrum = fft::centered_dft(f.values, -1);
    const int n = f.grid.size(), c = n / 2;
    double total = 0.0, tail = 0.0;
    for (int k = 0; k < n; ++k) {
        const double e = std::norm(spectrum(k));
        total += e;
        if (std::abs(k - c) > n / 4) tail += e;
    }
    return total > 0.0 ? tail / total : 0.0;
}

inline void check_band_limit(const Signal& f) {
    const double tail = band_limit_tail(f);
    if (tail > kBandLimitTailTolerance)
        emit_warning("signal is not band-limited to half the grid bandwidth (tail energy fraction " +
                     std::to_string(tail) + ")");
}

// ---------------------------------------------------------------------------------------------
// Wigner and cross-Wigner

/// W(f, g)[k, j] = (dx / 2 pi hbar) sum_m e^{-2 pi i m (k - c)/N} f(x_j + m dx/2) conj g(x_j - m dx/2),
/// |m| < N/2. Half-sample values come from exact trigonometric upsampling; lags that leave the
/// window contribute zero. The unpaired lag m = -N/2 is dropped so W(f, g) = conj W(g, f) exactly.
inline FieldMatrix cross_wigner_matrix(const Signal& f, const Signal& g) {
    if (!(f.grid == g.grid)) throw InvalidArgument("signals live on different grids");
    const int n = f.grid.size(), c = n / 2;
    const CVector hf = fft::upsample(f.values, 2);
    const CVector hg = (&f == &g) ? hf : fft::upsample(g.values, 2);
    const double prefactor = f.grid.dx() / f.grid.hbar_config().cell();
    FieldMatrix out(n, n);
    parallel_for(static_cast<std::size_t>(n), [&](std::size_t b, std::size_t e) {
        fft::Buffer lag(n), scratch;
        for (std::size_t col = b; col < e; ++col) {
            const int j = static_cast<int>(col);
            lag[0] = cplx{};
            for (int m = -c + 1; m < c; ++m) {
                const int fwd = 2 * j + m, back = 2 * j - m;
                const bool inside = fwd >= 0 && fwd < 2 * n && back >= 0 && back < 2 * n;
                lag[m + c] = inside ? hf(fwd) * std::conj(hg(back)) : cplx{};
            }
            fft::centered_dft(lag, scratch, -1);
            for (int k = 0; k < n; ++k) out(k, j) = prefactor * lag[k];
        }
    });
    return out;
}

inline PhaseField cross_wigner_discrete(const Signal& f, const Signal& g) {
    return PhaseField(PhaseGrid(f.grid), cross_wigner_matrix(f, g), ValueKind::complex);
}

/// Real-tagged discrete Wigner distribution; throws NumericError if |Im| exceeds 1e-10.
inline PhaseField wigner_discrete(const Signal& f) {
    check_band_limit(f);
    return PhaseField::make_real(PhaseGrid(f.grid), cross_wigner_matrix(f, f), 1e-10);
}

// ---------------------------------------------------------------------------------------------
// Symplectic Fourier transform and ambiguity domain

/// A[k, j] = (1/N) sum_{k', j'} e^{-2 pi i (k - c)(j' - c)/N} e^{2 pi i (j - c)(k' - c)/N} a[k', j'].
/// Discrete form of (1/2 pi hbar) int e^{-(i/hbar) sigma(z, z')} a(z') dz'; exactly involutive.
inline FieldMatrix symplectic_ft(const FieldMatrix& a) {
    if (a.rows() != a.cols()) throw InvalidArgument("symplectic Fourier transform needs a square field");
    FieldMatrix b = a;
    fft::centered_dft_rows(b, -1);
    fft::centered_dft_cols(b, +1);
    FieldMatrix out = b.transpose();
    out /= static_cast<double>(a.rows());
    return out;
}

/// Values on the lag grid: entry (k, j) sits at x_lag = x_j, p_lag = p_k of the same PhaseGrid.
struct AmbiguityField {
    PhaseGrid lag_grid;
    FieldMatrix values;
};

inline AmbiguityField symplectic_ft(const PhaseField& field) {
    return {field.grid(), symplectic_ft(field.values())};
}

/// Inverse of symplectic_ft (the same kernel).
inline PhaseField inverse_symplectic_ft(const AmbiguityField& amb, ValueKind kind = ValueKind::complex) {
    return PhaseField(amb.lag_grid, symplectic_ft(amb.values), kind);
}

inline AmbiguityField ambiguity_function(const Signal& f) { return symplectic_ft(cross_wigner_discrete(f, f)); }

// ---------------------------------------------------------------------------------------------
// Kernels

inline CohenKernel wigner_kernel() { return {"wigner", [](double, double) { return cplx{1.0, 0.0}; }, std::nullopt}; }

/// sinc(x_lag p_lag / 2 hbar), equal to 1 on both lag axes.
inline CohenKernel born_jordan_kernel(HBarConfig hbar = {}) {
    const double h = hbar.value();
    return {"bj",
            [h](double x, double p) {
                const double u = x * p / (2.0 * h);
                return cplx{u == 0.0 ? 1.0 : std::sin(u) / u, 0.0};
            },
            h};
}

/// exp(-(x_lag p_lag / hbar)^2 / sigma); another marginal-preserving member of the class.
inline CohenKernel choi_williams_kernel(double sigma, HBarConfig hbar = {}) {
    if (!(sigma > 0.0)) throw InvalidArgument("Choi-Williams sigma must be positive");
    const double h = hbar.value();
    return {"choi-williams",
            [h, sigma](double x, double p) {
                const double u = x * p / h;
                return cplx{std::exp(-u * u / sigma), 0.0};
            },
            h};
}

/// Named kernel lookup used by the command line.
inline CohenKernel kernel_by_name(const std::string& name, HBarConfig hbar = {}, double sigma = 1.0) {
    if (name == "wigner") return wigner_kernel();
    if (name == "bj" || name == "born-jordan") return born_jordan_kernel(hbar);
    if (name == "choi-williams" || name == "cw") return choi_williams_kernel(sigma, hbar);
    throw InvalidArgument("unknown kernel '" + name + "'");
}

/// Kernel multiplier sampled on the lag grid.
inline FieldMatrix kernel_multiplier(const CohenKernel& kernel, const PhaseGrid& grid) {
    if (kernel.hbar && std::abs(*kernel.hbar - grid.hbar()) > 1e-15 * grid.hbar())
        throw InvalidArgument("kernel '" + kernel.name + "' was built for a different hbar");
    const int n = grid.size();
    FieldMatrix mult(n, n);
    bool finite = true;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            const cplx v = kernel.multiplier(grid.x(j), grid.p(k));
            finite = finite && std::isfinite(v.real()) && std::isfinite(v.imag());
            mult(k, j) = v;
        }
    if (!finite) throw NumericError("kernel '" + kernel.name + "' produced a non-finite multiplier");
    return mult;
}

/// Q = F_sigma(F_sigma(W) * multiplier). Real input stays real when the result allows it.
inline PhaseField cohen_apply(const PhaseField& wigner, const CohenKernel& kernel) {
    const FieldMatrix mult = kernel_multiplier(kernel, wigner.grid());
    FieldMatrix amb = symplectic_ft(wigner.values());
    amb.array() *= mult.array();
    FieldMatrix q = symplectic_ft(amb);
    if (!q.allFinite()) throw NumericError("Cohen distribution contains non-finite values");
    if (wigner.is_real()) {
        const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
        if (q.imag().cwiseAbs().maxCoeff() <= 1e-10 * scale)
            return PhaseField(wigner.grid(), std::move(q), ValueKind::real);
    }
    return PhaseField(wigner.grid(), std::move(q), ValueKind::complex);
}

inline PhaseField cohen_distribution(const Signal& f, const CohenKernel& kernel) {
    return cohen_apply(wigner_discrete(f), kernel);
}

// ---------------------------------------------------------------------------------------------
// Marginals and shifts

struct Marginals {
    RVector position;  ///< dp-weighted sum over p, indexed by x_j
    RVector momentum;  ///< dx-weighted sum over x, indexed by p_k
};

inline Marginals marginals(const PhaseField& field) {
    const RMatrix re = field.real();
    return {field.grid().dp() * re.colwise().sum().transpose(), field.grid().dx() * re.rowwise().sum()};
}

/// |F f|^2 on the momentum grid, with the unitary hbar-scaled Fourier transform.
inline RVector momentum_density(const Signal& f) {
    const CVector spec = fft::centered_dft(f.values, -1) * (f.grid.dx() / std::sqrt(f.grid.hbar_config().cell()));
    return spec.cwiseAbs2();
}

inline RVector position_density(const Signal& f) { return f.values.cwiseAbs2(); }

/// Nearest grid index offset for a physical shift.
inline int grid_steps(double shift, double step) { return static_cast<int>(std::lround(shift / step)); }

/// T(z0) f = e^{(i/hbar)(p0 x - p0 x0/2)} f(x - x0), with x0 rounded to the nearest grid point.
/// Samples shifted in from outside the window are zero.
inline Signal heisenberg_shift(const Signal& f, double x0, double p0) {
    const auto& g = f.grid;
    const int s = grid_steps(x0, g.dx());
    const double xr = s * g.dx();
    CVector out = CVector::Zero(g.size());
    for (int j = 0; j < g.size(); ++j) {
        const int src = j - s;
        if (src < 0 || src >= g.size()) continue;
        out(j) = std::polar(1.0, (p0 * g.x(j) - 0.5 * p0 * xr) / g.hbar()) * f.values(src);
    }
    return Signal(g, std::move(out));
}

/// Q(z - z0) for an integer shift (steps along x, steps along p); zero fill.
inline PhaseField shift_field(const PhaseField& field, int steps_x, int steps_p) {
    const int n = field.size();
    FieldMatrix out = FieldMatrix::Zero(n, n);
    for (int k = 0; k < n; ++k) {
        const int sk = k - steps_p;
        if (sk < 0 || sk >= n) continue;
        for (int j = 0; j < n; ++j) {
            const int sj = j - steps_x;
            if (sj >= 0 && sj < n) out(k, j) = field(sk, sj);
        }
    }
    return PhaseField(field.grid(), std::move(out), field.kind());
}

}  // namespace tfq
