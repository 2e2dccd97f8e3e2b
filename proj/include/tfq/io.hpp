#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tfq/core.hpp"
#include "tfq/harness.hpp"

namespace tfq::io {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shortest round-trip-safe decimal: 17 significant digits.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

namespace detail {
inline std::ofstream open_out(const std::string& path, bool binary = false) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}
inline void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}
}  // namespace detail

/// Header "# x_min x_max p_min p_max N hbar" (as numbers), then N rows (p ascending) of N
/// comma-separated values (x ascending). Complex fields write their real part.
inline void write_field_csv(std::ostream& out, const PhaseField& field) {
    const auto& g = field.grid();
    const auto& axis = g.axis();
    out << "# " << format_number(axis.x_min()) << ' ' << format_number(axis.x_max()) << ' '
        << format_number(axis.p_min()) << ' ' << format_number(axis.p_max()) << ' ' << g.size() << ' '
        << format_number(g.hbar()) << '\n';
    for (int k = 0; k < g.size(); ++k) {
        for (int j = 0; j < g.size(); ++j) {
            if (j) out << ',';
            out << format_number(field(k, j).real());
        }
        out << '\n';
    }
}

inline void write_field_csv(const std::string& path, const PhaseField& field) {
    auto out = detail::open_out(path);
    write_field_csv(out, field);
    detail::finish(out, path);
}

/// log10(|Q| + eps), eps = 1e-12 max|Q|, mapped linearly onto [0, 65535]. Row 0 is the largest p.
inline std::vector<std::uint16_t> log_amplitude_image(const PhaseField& field) {
    const int n = field.size();
    const Eigen::MatrixXd mag = field.values().cwiseAbs();
    const double peak = mag.maxCoeff();
    std::vector<std::uint16_t> pixels(static_cast<std::size_t>(n) * n, 0);
    if (!(peak > 0.0)) return pixels;
    const double eps = 1e-12 * peak;
    const Eigen::MatrixXd level = (mag.array() + eps).log10().matrix();
    const double lo = level.minCoeff(), hi = level.maxCoeff();
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            const double t = hi > lo ? (level(k, j) - lo) / (hi - lo) : 1.0;
            pixels[static_cast<std::size_t>(n - 1 - k) * n + j] = static_cast<std::uint16_t>(std::lround(65535.0 * t));
        }
    return pixels;
}

/// Binary PGM (P5), 16-bit big-endian samples.
inline void write_field_pgm(const std::string& path, const PhaseField& field) {
    auto out = detail::open_out(path, true);
    const int n = field.size();
    out << "P5\n" << n << ' ' << n << "\n65535\n";
    for (const auto v : log_amplitude_image(field)) {
        const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
        out.write(bytes, 2);
    }
    detail::finish(out, path);
}

namespace detail {
inline void put_f64(std::ostream& out, double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    out.write(bytes, 8);
}
inline double get_f64(std::istream& in) {
    unsigned char bytes[8];
    in.read(reinterpret_cast<char*>(bytes), 8);
    if (!in) throw IoError("truncated binary field");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    return std::bit_cast<double>(bits);
}
}  // namespace detail

inline constexpr char kBinaryMagic[4] = {'T', 'F', 'Q', '1'};

/// "TFQ1", then little-endian float64 [N, x_min, dx, p_min, dp, hbar, kind (0 real, 1 complex)],
/// then the values row by row (complex as interleaved re, im).
inline void write_field_binary(std::ostream& out, const PhaseField& field) {
    const auto& g = field.grid();
    out.write(kBinaryMagic, 4);
    for (double v : {static_cast<double>(g.size()), g.x(0), g.dx(), g.p(0), g.dp(), g.hbar(),
                     field.is_real() ? 0.0 : 1.0})
        detail::put_f64(out, v);
    for (int k = 0; k < g.size(); ++k)
        for (int j = 0; j < g.size(); ++j) {
            detail::put_f64(out, field(k, j).real());
            if (!field.is_real()) detail::put_f64(out, field(k, j).imag());
        }
}

inline void write_field_binary(const std::string& path, const PhaseField& field) {
    auto out = detail::open_out(path, true);
    write_field_binary(out, field);
    detail::finish(out, path);
}

inline PhaseField read_field_binary(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || !std::equal(magic, magic + 4, kBinaryMagic)) throw IoError("not a TFQ1 field");
    const double n = detail::get_f64(in), x0 = detail::get_f64(in), dx = detail::get_f64(in);
    const double p0 = detail::get_f64(in), dp = detail::get_f64(in), hbar = detail::get_f64(in);
    const double kind = detail::get_f64(in);
    const int size = static_cast<int>(n);
    if (size != n || size < 2 || size % 2) throw IoError("bad grid size in binary field");
    const SpatialGrid axis(size, dx, HBarConfig(hbar));
    if (axis.x(0) != x0 || std::abs(axis.p(0) - p0) > 1e-12 * std::abs(p0) || std::abs(axis.dp() - dp) > 1e-12 * dp)
        throw IoError("binary field descriptor is inconsistent");
    FieldMatrix values(size, size);
    for (int k = 0; k < size; ++k)
        for (int j = 0; j < size; ++j) {
            const double re = detail::get_f64(in);
            const double im = kind == 0.0 ? 0.0 : detail::get_f64(in);
            values(k, j) = {re, im};
        }
    return PhaseField(PhaseGrid(axis), std::move(values), kind == 0.0 ? ValueKind::real : ValueKind::complex);
}

inline PhaseField read_field_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return read_field_binary(in);
}

// ---------------------------------------------------------------------------------------------
// Reports

namespace detail {
inline std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out + "\"";
}
inline std::string json_number(double v) { return std::isfinite(v) ? format_number(v) : "null"; }
}  // namespace detail

/// JSON array with keys in the fixed order angle, distribution, signal_mass, cross_mass, ratio, residuals.
inline std::string reports_to_json(const std::vector<InterferenceReport>& reports) {
    if (reports.empty()) return "[]\n";
    std::ostringstream out;
    out << "[\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& r = reports[i];
        out << "  {\"angle\": " << detail::json_number(r.angle)
            << ", \"distribution\": " << detail::json_string(r.distribution)
            << ", \"signal_mass\": " << detail::json_number(r.signal_mass)
            << ", \"cross_mass\": " << detail::json_number(r.cross_mass)
            << ", \"ratio\": " << detail::json_number(r.ratio) << ", \"residuals\": {";
        for (std::size_t k = 0; k < r.residuals.size(); ++k) {
            if (k) out << ", ";
            out << detail::json_string(r.residuals[k].first) << ": " << detail::json_number(r.residuals[k].second);
        }
        out << "}}" << (i + 1 < reports.size() ? "," : "") << "\n";
    }
    out << "]\n";
    return out.str();
}

inline void write_report(const std::string& path, const std::vector<InterferenceReport>& reports) {
    auto out = detail::open_out(path);
    out << reports_to_json(reports);
    detail::finish(out, path);
}

/// Reads a signal from whitespace-separated "re im" lines; '#' starts a comment.
inline CVector read_signal_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<cplx> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double re = 0.0, im = 0.0;
        if (!(ls >> re)) continue;
        if (!(ls >> im)) im = 0.0;
        std::string rest;
        if (ls >> rest) throw IoError(path + ":" + std::to_string(lineno) + ": expected 're im'");
        values.emplace_back(re, im);
    }
    return Eigen::Map<CVector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace tfq::io
