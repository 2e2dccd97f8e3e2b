#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tfq/config.hpp"
#include "tfq/tfq.hpp"

using namespace tfq;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("tfq_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

PhaseField small_field() {
    const PhaseGrid g(make_spatial_grid(8, 4.0));
    FieldMatrix v(8, 8);
    for (int k = 0; k < 8; ++k)
        for (int j = 0; j < 8; ++j) v(k, j) = 0.1 * k - 0.01 * j;
    return PhaseField(g, v, ValueKind::real);
}

}  // namespace

TEST(FieldCsv, HeaderAndRowLayout) {
    std::ostringstream out;
    io::write_field_csv(out, small_field());
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header.substr(2));
    double xmin, xmax, pmin, pmax, h;
    int n;
    hs >> xmin >> xmax >> pmin >> pmax >> n >> h;
    EXPECT_EQ(header.substr(0, 2), "# ");
    EXPECT_DOUBLE_EQ(xmin, -4.0);
    EXPECT_DOUBLE_EQ(xmax, 4.0);
    EXPECT_DOUBLE_EQ(pmin, -pmax);
    EXPECT_EQ(n, 8);
    EXPECT_DOUBLE_EQ(h, kDefaultHbar);
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string cell;
        int cols = 0;
        while (std::getline(ls, cell, ',')) {
            EXPECT_DOUBLE_EQ(std::stod(cell), 0.1 * rows - 0.01 * cols);
            ++cols;
        }
        EXPECT_EQ(cols, 8);
        ++rows;
    }
    EXPECT_EQ(rows, 8);
}

TEST(FieldImage, ZeroFieldIsBlack) {
    const auto px = io::log_amplitude_image(PhaseField::zeros(PhaseGrid(make_spatial_grid(8, 4.0))));
    for (auto v : px) EXPECT_EQ(v, 0);
}

TEST(FieldImage, BrightestPixelAtOriginRow) {
    const auto g = make_spatial_grid(64, 4.0);
    const auto img = io::log_amplitude_image(wigner_discrete(sample_state(GaussianState::coherent(), g)));
    const int n = 64, c = 32;
    const auto it = std::max_element(img.begin(), img.end());
    const auto idx = static_cast<int>(it - img.begin());
    EXPECT_EQ(*it, 65535);
    EXPECT_EQ(idx / n, n - 1 - c);
    EXPECT_EQ(idx % n, c);
}

TEST(FieldImage, PgmHeaderAndSize) {
    const auto dir = scratch_dir("pgm");
    const auto path = (dir / "f.pgm").string();
    io::write_field_pgm(path, small_field());
    std::ifstream in(path, std::ios::binary);
    std::string magic;
    int w, h, maxv;
    in >> magic >> w >> h >> maxv;
    EXPECT_EQ(magic, "P5");
    EXPECT_EQ(w, 8);
    EXPECT_EQ(h, 8);
    EXPECT_EQ(maxv, 65535);
    EXPECT_EQ(fs::file_size(path), std::string("P5\n8 8\n65535\n").size() + 2 * 64);
}

TEST(FieldBinary, RoundTripIsBitExact) {
    const auto g = make_spatial_grid(32, 4.0);
    const PhaseField w = wigner_discrete(sample_state(GaussianState::scalar({1.0, 0.3}, 0.2, -0.1), g));
    std::stringstream buf;
    io::write_field_binary(buf, w);
    const PhaseField back = io::read_field_binary(buf);
    EXPECT_TRUE(back.is_real());
    EXPECT_EQ(back.size(), 32);
    EXPECT_EQ(back.grid().dx(), w.grid().dx());
    for (int k = 0; k < 32; ++k)
        for (int j = 0; j < 32; ++j) EXPECT_EQ(back(k, j), w(k, j));

    const PhaseField z(w.grid(), FieldMatrix::Constant(32, 32, cplx(0.25, -1.5)), ValueKind::complex);
    std::stringstream cbuf;
    io::write_field_binary(cbuf, z);
    const PhaseField zb = io::read_field_binary(cbuf);
    EXPECT_FALSE(zb.is_real());
    EXPECT_EQ(zb(3, 4), cplx(0.25, -1.5));
}

TEST(FieldBinary, RejectsForeignData) {
    std::stringstream buf("not a field at all");
    EXPECT_THROW(io::read_field_binary(buf), io::IoError);
}

TEST(ReportJson, EmptyListIsEmptyArray) { EXPECT_EQ(io::reports_to_json({}), "[]\n"); }

TEST(ReportJson, OneEntryPerAngleAndDistribution) {
    std::vector<InterferenceReport> reports;
    DiamondConfig cfg;
    for (double a : cfg.angles())
        for (const auto& d : cfg.distributions) {
            InterferenceReport r;
            r.angle = a;
            r.distribution = d;
            r.signal_mass = 1.0;
            r.cross_mass = 0.5;
            r.ratio = 1.0 / 3.0;
            r.residuals = {{"position_marginal", 1e-15}, {"momentum_marginal", std::nan("")}};
            reports.push_back(r);
        }
    const auto j = nlohmann::ordered_json::parse(io::reports_to_json(reports));
    ASSERT_EQ(j.size(), 18u);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j[0].items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"angle", "distribution", "signal_mass", "cross_mass", "ratio", "residuals"}));
    EXPECT_EQ(j[1]["distribution"], "bj");
    EXPECT_TRUE(j[0]["residuals"]["momentum_marginal"].is_null());
    EXPECT_DOUBLE_EQ(j[17]["angle"].get<double>(), kPi / 4);
}

TEST(SignalSamples, ParsesCommentsAndRealOnlyLines) {
    const auto dir = scratch_dir("samples");
    const auto path = (dir / "s.txt").string();
    std::ofstream(path) << "# header\n1 2\n3\n\n-1.5 0.5 # trailing\n";
    const CVector v = io::read_signal_samples(path);
    ASSERT_EQ(v.size(), 3);
    EXPECT_EQ(v(0), cplx(1, 2));
    EXPECT_EQ(v(1), cplx(3, 0));
    EXPECT_EQ(v(2), cplx(-1.5, 0.5));
    std::ofstream(path) << "1 2 3\n";
    EXPECT_THROW(io::read_signal_samples(path), io::IoError);
}

TEST(Config, DiamondFlags) {
    const auto r = parse_config({"diamond", "--steps", "9", "--grid", "512"});
    EXPECT_EQ(r.config.command, "diamond");
    EXPECT_EQ(r.config.steps, 9);
    EXPECT_EQ(r.config.n_points, 512);
}

TEST(Config, OddGridIsRejected) {
    try {
        parse_config({"wigner", "--grid", "511"});
        FAIL() << "expected a configuration error";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("n_points must be even"), std::string::npos);
    }
}

TEST(Config, CohenWithExplicitHbar) {
    const auto r = parse_config({"cohen", "--kernel", "bj", "--hbar", "0.159154943"});
    EXPECT_EQ(r.config.kernel, "bj");
    EXPECT_DOUBLE_EQ(r.config.hbar, 0.159154943);
}

TEST(Config, UnknownCommandAndKernel) {
    EXPECT_THROW(parse_config({"nonsense"}), ConfigError);
    EXPECT_THROW(parse_config({"cohen", "--kernel", "spectrogram"}), ConfigError);
    EXPECT_THROW(parse_config({"wigner", "--no-such-flag"}), ConfigError);
}

TEST(Config, JsonRoundTrip) {
    RunConfig c;
    c.command = "covariance";
    c.n_points = 256;
    c.map = "shear";
    c.map_param = 1.0;
    c.formats = {"bin"};
    c.check = true;
    EXPECT_EQ(from_json(nlohmann::json::parse(to_json(c).dump())), c);
}

TEST(Config, UnknownKeyAndTypeMismatchNameTheKey) {
    try {
        from_json(nlohmann::json::parse(R"({"grid_size": 10})"));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("grid_size"), std::string::npos);
    }
    try {
        from_json(nlohmann::json::parse(R"({"n_points": "big"})"));
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("n_points"), std::string::npos);
    }
    EXPECT_THROW(from_json(nlohmann::json::parse(R"({"steps": 2.5})")), ConfigError);
}

TEST(Config, FlagsOverrideFileOverrideDefaults) {
    const auto dir = scratch_dir("config");
    const auto path = (dir / "c.json").string();
    std::ofstream(path) << R"({"n_points": 128, "x_max": 6.0, "kernel": "wigner"})";
    const auto r = parse_config({"cohen", "--config", path, "--grid", "64"});
    EXPECT_EQ(r.config.n_points, 64);
    EXPECT_DOUBLE_EQ(r.config.x_max, 6.0);
    EXPECT_EQ(r.config.kernel, "wigner");
    EXPECT_DOUBLE_EQ(r.config.rho, 0.6);
}

TEST(Config, InputImpliesFileState) {
    const auto r = parse_config({"wigner", "--input", "samples.txt"});
    EXPECT_EQ(r.config.state, "file");
    EXPECT_EQ(r.config.input, "samples.txt");
}

TEST(Config, ParsingIsDeterministic) {
    const std::vector<std::string> args{"diamond", "--format", "csv,bin", "--rho", "0.5", "--assert"};
    const auto a = parse_config(args), b = parse_config(args);
    EXPECT_EQ(a.config, b.config);
    EXPECT_EQ(to_json(a.config).dump(), to_json(b.config).dump());
    EXPECT_EQ(a.config.formats, (std::vector<std::string>{"csv", "bin"}));
    EXPECT_TRUE(a.config.check);
}

TEST(Config, HelpRequestsExit) {
    const auto r = parse_config({"--help"});
    EXPECT_TRUE(r.exit_requested);
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_FALSE(r.message.empty());
}
