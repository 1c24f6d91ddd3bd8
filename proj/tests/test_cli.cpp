#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "vortexlab/cli.hpp"
#include "vortexlab/csv.hpp"

using namespace vortexlab;
namespace fs = std::filesystem;
#include "approx.hpp"

namespace {

const std::string kData = VORTEXLAB_TEST_DATA;
const std::string kConfig = kData + "/reference.ini";

struct Run {
    int code;
    std::string out, err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream o, e;
    const int code = cli::run(args, o, e);
    return {code, o.str(), e.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("vortexlab_cli_" + std::to_string(getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

nlohmann::json json_file(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

std::string hyperbola_csv(double f_q0_GHz, double gamma_GHz_per_mT, double B0_uT) {
    std::string s = "B_uT,f_GHz,sigma_MHz\n";
    for (int i = 0; i < 21; ++i) {
        const double B = B0_uT - 150 + 15 * i;
        const double f = std::hypot(f_q0_GHz, gamma_GHz_per_mT * (B - B0_uT) * 1e-3);
        s += format_number(B) + "," + format_number(f) + ",1\n";
    }
    return s;
}

}  // namespace

TEST_CASE("usage errors") {
    CHECK(run({}).code == 1);
    CHECK(run({"nosuch"}).code == 1);
    CHECK(run({"scales"}).code == 1);  // --config is required
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"fit-decay", "-c", kConfig}).code == 1);  // --input is required
    const auto out = scratch("usage");
    CHECK(run({"scales", "-c", "/nonexistent.ini", "-o", out.string()}).code == 1);
    CHECK(run({"fit-decay", "-i", "/nonexistent.csv", "-o", out.string()}).code == 1);
    CHECK(run({"fit-decay", "-i", kConfig, "--format", "xml"}).code == 1);
}

TEST_CASE("scales and manifest") {
    const auto out = scratch("scales");
    const auto r = run({"scales", "-c", kConfig, "-o", out.string()});
    REQUIRE(r.code == 0);
    const auto t = parse_csv(slurp(out / "scales.csv"));
    CHECK(t.number(0, t.column("phi_S")) == Approx(3.57).epsilon(0.01 / 3.57));
    const auto m = json_file(out / "manifest.json");
    CHECK(m["command"] == "scales");
    CHECK(m["config_sha256"] == cli::sha256_hex(slurp(kConfig)));
    REQUIRE(m["files"].size() == 1);
    CHECK(m["files"][0]["name"] == "scales.csv");
    CHECK(m["files"][0]["sha256"] == cli::sha256_hex(slurp(out / "scales.csv")));
    CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("chi sweep and empty field list") {
    const auto out = scratch("chi");
    const auto cfg = out / "chi.ini";
    std::string text = slurp(kConfig);
    text = text.substr(0, text.find("[sweep]")) + "[sweep]\nB_start_uT = -172\nB_stop_uT = 428\npoints = 31\n";
    spit(cfg, text);
    REQUIRE(run({"chi", "-c", cfg.string(), "-o", out.string(), "-w", "2"}).code == 0);
    const auto t = parse_csv(slurp(out / "chi.csv"));
    REQUIRE(t.rows.size() == 31);
    // |chi| against |B - B0| on one side of the sweet spot turns over
    std::vector<double> side;
    for (std::size_t i = 15; i < 31; ++i) side.push_back(std::abs(t.number(i, t.column("chi_MHz"))));
    bool up = false, down = false;
    for (std::size_t i = 1; i < side.size(); ++i) {
        up = up || side[i] > side[i - 1];
        down = down || side[i] < side[i - 1];
    }
    CHECK(up);
    CHECK(down);
    CHECK(t.number(15, t.column("chi_MHz")) < 0);

    spit(cfg, slurp(kConfig).substr(0, slurp(kConfig).find("[sweep]")) + "[sweep]\nB_list_uT =\n");
    const auto r = run({"chi", "-c", cfg.string(), "-o", out.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("sweep") != std::string::npos);
}

TEST_CASE("spectrum fit in both formats") {
    const auto out = scratch("fitspec");
    spit(out / "spec.csv", hyperbola_csv(2.0, 20.0, 128.0));
    REQUIRE(run({"fit-spectrum", "-i", (out / "spec.csv").string(), "-o", out.string()}).code == 0);
    const auto j = json_file(out / "fit_spectrum.json");
    CHECK(j["f_q0_GHz"].get<double>() == Approx(2.0).epsilon(1e-6));
    CHECK(j["gamma_GHz_per_mT"].get<double>() == Approx(20.0).epsilon(1e-6));
    CHECK(j["B0_uT"].get<double>() == Approx(128.0).epsilon(1e-6));
    CHECK(j["converged"] == true);
    const auto csv_dir = out / "csv";
    REQUIRE(run({"fit-spectrum", "-i", (out / "spec.csv").string(), "-o", csv_dir.string(), "--format", "csv"}).code == 0);
    const auto t = parse_csv(slurp(csv_dir / "fit_spectrum.csv"));
    CHECK(t.number(0, t.column("B0_uT")) == Approx(128.0).epsilon(1e-6));
}

TEST_CASE("numerical failures exit with 2 and write error.json") {
    const auto out = scratch("numerical");
    spit(out / "flat.csv", "B_uT,f_GHz\n100,2\n100,2.1\n100,2.2\n");
    const auto r = run({"fit-spectrum", "-i", (out / "flat.csv").string(), "-o", out.string()});
    CHECK(r.code == 2);
    const auto j = json_file(out / "error.json");
    CHECK(j["exit_code"] == 2);
    CHECK(j["command"] == "fit-spectrum");
    CHECK_FALSE(fs::exists(out / "manifest.json"));
}

TEST_CASE("time-domain fits") {
    const auto out = scratch("traces");
    std::string decay = "t_us,value\n", ramsey = "t_us,value\n", rabi = "amplitude_V,t_us,value\n";
    for (int i = 0; i < 200; ++i) {
        const double t = i * 5.0;
        decay += format_number(t) + "," + format_number(0.8 * std::exp(-t / 186.0) + 0.1) + "\n";
        const double tr = i * 0.01;
        const double v = std::exp(-tr / 0.44) *
                             (0.3 * std::cos(2 * std::numbers::pi * 10 * tr) + 0.2 * std::cos(2 * std::numbers::pi * 12 * tr)) + 0.5;
        ramsey += format_number(tr) + "," + format_number(v) + "\n";
    }
    for (double a : {0.0, 2e-6, 4e-6, 6e-6}) {
        for (int i = 0; i < 150; ++i) {
            const double t = i * 0.01;
            rabi += format_number(a) + "," + format_number(t) + "," +
                    format_number(0.5 - 0.5 * std::cos(2 * std::numbers::pi * a * 1e6 * t)) + "\n";
        }
    }
    spit(out / "decay.csv", decay);
    spit(out / "ramsey.csv", ramsey);
    spit(out / "rabi.csv", rabi);
    REQUIRE(run({"fit-decay", "-i", (out / "decay.csv").string(), "-o", out.string()}).code == 0);
    CHECK(json_file(out / "fit_decay.json")["T_us"].get<double>() == Approx(186.0).epsilon(1e-6));
    REQUIRE(run({"fit-echo", "-i", (out / "decay.csv").string(), "-o", out.string()}).code == 0);
    REQUIRE(run({"fit-ramsey", "-i", (out / "ramsey.csv").string(), "-o", out.string()}).code == 0);
    const auto rj = json_file(out / "fit_ramsey.json");
    CHECK(rj["T2s_us"].get<double>() == Approx(0.44).epsilon(0.02));
    CHECK(rj["beat_MHz"].get<double>() == Approx(2.0).epsilon(0.02));
    REQUIRE(run({"fit-rabi", "-i", (out / "rabi.csv").string(), "-o", out.string()}).code == 0);
    CHECK(json_file(out / "fit_rabi.json")["slope_MHz_per_V"].get<double>() == Approx(1e6).epsilon(0.01));
    CHECK(parse_csv(slurp(out / "fit_rabi_traces.csv")).rows.size() == 4);
}

TEST_CASE("batch fit") {
    const auto dir = scratch("batch_in");
    const auto out = scratch("batch_out");
    const double f0[] = {1.5, 2.0, 2.5, 3.0, 3.5};
    for (int i = 0; i < 5; ++i) {
        spit(dir / ("d" + std::to_string(i) + ".csv"), hyperbola_csv(f0[i], 10.0 + 3 * i, 50.0 + 20 * i));
    }
    REQUIRE(run({"batch-fit", "-d", dir.string(), "-o", out.string(), "--format", "csv"}).code == 0);
    auto t = parse_csv(slurp(out / "batch.csv"));
    REQUIRE(t.rows.size() == 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(t.rows[i][t.column("converged")] == "true");
        CHECK(t.number(i, t.column("f_q0_GHz")) == Approx(f0[i]).epsilon(0.01));
        CHECK(t.number(i, t.column("gamma_GHz_per_mT")) == Approx(10.0 + 3 * i).epsilon(0.01));
        CHECK(t.number(i, t.column("B0_uT")) == Approx(50.0 + 20 * i).epsilon(0.01));
    }

    spit(dir / "d2.csv", "B_uT,f_GHz\n1,not-a-number\n");
    REQUIRE(run({"batch-fit", "-d", dir.string(), "-o", out.string(), "--format", "csv"}).code == 0);
    t = parse_csv(slurp(out / "batch.csv"));
    REQUIRE(t.rows.size() == 5);
    int ok = 0;
    for (std::size_t i = 0; i < 5; ++i) ok += t.rows[i][t.column("converged")] == "true";
    CHECK(ok == 4);
    CHECK(t.rows[2][t.column("converged")] == "false");
    CHECK_FALSE(t.rows[2][t.column("error")].empty());

    CHECK(run({"batch-fit", "-d", scratch("empty").string(), "-o", out.string()}).code == 1);
}

TEST_CASE("energetics commands") {
    const auto out = scratch("energetics");
    const auto cfg = out / "e.ini";
    spit(cfg, slurp(kConfig) +
                  "\n[pinning]\nx_nm = 1500\nV_GHz = 50\nsigma_nm = 3\n"
                  "\n[pair]\ndelta_LR_nm = 10\nsep_min_um = 3\nsep_max_um = 6\npoints = 4\n");
    // the reference config already has a [sweep] block; add the landscape keys there
    std::string text = slurp(cfg);
    text.replace(text.find("points = 25"), 11, "points = 25\nx_points = 50\ny_points = 3\ny_min_nm = 0\ny_max_nm = 4\nmap_points = 20");
    spit(cfg, text);
    REQUIRE(run({"landscape", "-c", cfg.string(), "-o", out.string()}).code == 0);
    CHECK(parse_csv(slurp(out / "landscape.csv")).rows.size() == 150);
    REQUIRE(run({"gamma-map", "-c", cfg.string(), "-o", out.string()}).code == 0);
    const auto g = parse_csv(slurp(out / "gamma_map.csv"));
    CHECK(g.rows.size() == 400);
    CHECK(g.number(0, g.column("gamma_GHz_per_mT")) == 0.0);
    REQUIRE(run({"pair", "-c", cfg.string(), "-o", out.string()}).code == 0);
    const auto p = parse_csv(slurp(out / "pair.csv"));
    REQUIRE(p.rows.size() == 4);
    CHECK(std::abs(p.number(0, p.column("coupling_GHz"))) < 1.25);
}

TEST_CASE("tunnel command") {
    const auto out = scratch("tunnel");
    const auto cfg = out / "t.ini";
    std::string text = slurp(kConfig);
    text = text.substr(0, text.find("[sweep]"));
    text += "[pinning]\nx_nm = 1506.2\nV_GHz = 50\nsigma_nm = 3\n"
            "[pinning]\nx_nm = 1521.2\nV_GHz = 50\nsigma_nm = 3\n"
            "[tunneling]\ngrid_points = 512\ny_zpf_nm = 2\nk_levels = 3\n"
            "[sweep]\nB_start_uT = 0\nB_stop_uT = 400\npoints = 9\n";
    spit(cfg, text);
    const auto r = run({"tunnel", "-c", cfg.string(), "-o", out.string()});
    REQUIRE_MESSAGE(r.code == 0, r.err);
    const auto t = parse_csv(slurp(out / "tunnel.csv"));
    REQUIRE(t.rows.size() == 9);
    for (std::size_t i = 0; i < 9; ++i) CHECK(t.number(i, t.column("f_q_GHz")) > 0);
    CHECK(parse_csv(slurp(out / "tunnel_levels.csv")).rows.size() == 27);
    CHECK(json_file(out / "tunnel_summary.json").contains("sweet_spot_uT"));
}

TEST_CASE("jump synthesis and analysis") {
    const auto a = scratch("jumps_a");
    const auto b = scratch("jumps_b");
    unsetenv("VORTEXLAB_SEED");
    REQUIRE(run({"synth-jumps", "-c", kConfig, "-o", a.string()}).code == 0);
    REQUIRE(run({"synth-jumps", "-c", kConfig, "-o", b.string()}).code == 0);
    CHECK(slurp(a / "trajectory.csv") == slurp(b / "trajectory.csv"));
    CHECK(json_file(a / "manifest.json")["seed"] == 42);

    setenv("VORTEXLAB_SEED", "7", 1);
    REQUIRE(run({"synth-jumps", "-c", kConfig, "-o", b.string()}).code == 0);
    unsetenv("VORTEXLAB_SEED");
    CHECK(slurp(a / "trajectory.csv") != slurp(b / "trajectory.csv"));
    CHECK(json_file(b / "manifest.json")["seed"] == 7);

    REQUIRE(run({"analyze-jumps", "-i", (a / "trajectory.csv").string(), "-o", a.string(), "-c", kConfig}).code == 0);
    const auto j = json_file(a / "analysis.json");
    CHECK(j["T1_us"].get<double>() == Approx(110.0).epsilon(0.15));
    CHECK(j["P_e"].get<double>() == Approx(135.0 / 705.0).epsilon(0.05));
    CHECK(j["T_eff_mK"].get<double>() > 0);

    // a single Gaussian cloud
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 0.1);
    std::string one = "t_us,I,Q\n";
    for (int i = 0; i < 2000; ++i) one += std::to_string(5 * i) + "," + format_number(n(rng)) + "," + format_number(n(rng)) + "\n";
    spit(a / "one.csv", one);
    CHECK(run({"analyze-jumps", "-i", (a / "one.csv").string(), "-o", a.string()}).code == 2);
}
