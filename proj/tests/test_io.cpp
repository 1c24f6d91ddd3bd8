#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <string>

#include "vortexlab/config.hpp"
#include "vortexlab/csv.hpp"
#include "vortexlab/errors.hpp"

using namespace vortexlab;
#include "approx.hpp"

TEST_CASE("number formatting") {
    CHECK(format_number(1.5) == "1.5");
    CHECK(format_number(-1.2829e6) == "-1282900");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(format_number(std::nan("")) == "nan");
    CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(format_number(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("csv writer") {
    CsvWriter w({"a", "b", "c"});
    w.row({1.25, 7LL, std::string("x")});
    CHECK(w.str() == "a,b,c\n1.25,7,x\n");
    CHECK(w.rows() == 1);
    CHECK_THROWS_AS(w.row({1.0}), InvalidArgument);
    CHECK_THROWS_AS(w.row({1.0, 2.0, std::string("p,q")}), InvalidArgument);
}

TEST_CASE("csv reader") {
    const auto t = parse_csv("# comment\r\nB_uT, f_GHz\r\n\r\n100,2.5\r\n-3e2,+4\n");
    CHECK(t.header == std::vector<std::string>{"B_uT", "f_GHz"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.number(1, t.column("B_uT")) == -300.0);
    CHECK(t.number(1, 1) == 4.0);
    CHECK(t.lines[0] == 4);
    CHECK_FALSE(t.find("kind"));
    CHECK_THROWS_AS(t.column("kind"), InvalidArgument);
    CHECK_THROWS_AS(parse_csv("a,b\n1\n"), InvalidArgument);
    CHECK_THROWS_AS(parse_csv("a\nnan\n").number(0, 0), InvalidArgument);
    CHECK_THROWS_AS(parse_csv("a\n1.5x\n").number(0, 0), InvalidArgument);
    CHECK_THROWS_AS(parse_csv("# only a comment\n"), InvalidArgument);
}

TEST_CASE("config parsing") {
    const std::string text = R"(
# device block
[device]
w_um = 3      # strip width
t_nm = 24

[pinning]
x_nm = 1500
V_GHz = 50
sigma_nm = 3

[pinning]
x_nm = 1515
y_nm = 1
V_GHz = 55
sigma_nm = 3

[sweep]
B_list_uT = 100, 128 ,150
)";
    const RunConfig c = parse_config(text, "t.ini");
    CHECK(c.find("device")->number("w_um") == 3.0);
    CHECK(c.all("pinning").size() == 2);
    CHECK(c.source == text);
    const auto sites = read_sites(c);
    REQUIRE(sites.size() == 2);
    CHECK(sites[1].x == Approx(1515e-9));
    CHECK(sites[1].y == Approx(1e-9));
    CHECK(sites[1].V == Approx(55e9 * kConstants.h));
    const auto B = read_field_sweep(c);
    REQUIRE(B.size() == 3);
    CHECK(B[1] == Approx(128e-6));
    const DeviceModel d = read_device(c);
    CHECK(d.w == Approx(3e-6));
    CHECK(d.lambda_L == reference_device().lambda_L);
    CHECK_THROWS_AS(c.require("qrm"), ConfigError);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_config("[nosuch]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[device]\nw = 3\n"), ConfigError);  // no unit suffix
    CHECK_THROWS_AS(parse_config("[device]\nw_um = three\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[device]\nw_um = 3\nw_um = 4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[device]\n[device]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("w_um = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[qrm]\nn_fock = 2.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[sweep]\nB_list_uT = 1,,2\n"), ConfigError);
    CHECK_THROWS_AS(read_field_sweep(parse_config("[sweep]\nB_list_uT =\n")), ConfigError);
    CHECK_THROWS_AS(read_field_sweep(parse_config("")), ConfigError);
    CHECK_THROWS_AS(read_device(parse_config("[device]\nxi_nm = 5000\n")), InvalidDevice);
    CHECK_THROWS_AS(load_config("/nonexistent/file.ini"), ConfigError);
}

TEST_CASE("qrm section in SI units") {
    const auto c = parse_config(
        "[qrm]\nf_r_GHz = 7.572\ng_MHz = 92.5\ngamma_GHz_per_mT = 20\nB0_uT = 128\nf_q0_GHz = 2\nn_fock = 30\n");
    const QrmParams p = read_qrm(c);
    CHECK(p.f_r == Approx(7.572e9));
    CHECK(p.g == Approx(92.5e6));
    CHECK(p.gamma == Approx(2e13));
    CHECK(p.B0 == Approx(128e-6));
    CHECK(p.theta == std::numbers::pi / 2);
    CHECK(p.phi == std::numbers::pi / 2);
    CHECK(read_truncation(c).n_fock == 30);
    const auto sym = read_qrm(parse_config(
        "[qrm]\nf_r_GHz = 7.572\ng_MHz = 92.5\ngamma_GHz_per_mT = 20\nB0_uT = 128\nf_q0_GHz = 2\nphi_deg = 0\n"));
    CHECK(sym.phi == 0.0);
    CHECK_THROWS_AS(read_qrm(parse_config("[qrm]\nf_r_GHz = 7.572\ng_MHz = 92.5\ngamma_GHz_per_mT = 20\n"
                                          "B0_uT = 128\nf_q0_GHz = 2\ntheta_deg = 30\nphi_deg = 40\n")),
                    InvalidOrientation);
}

TEST_CASE("field sweep from a range") {
    const auto B = read_field_sweep(parse_config("[sweep]\nB_start_uT = -22\nB_stop_uT = 278\npoints = 4\n"));
    REQUIRE(B.size() == 4);
    CHECK(B.front() == Approx(-22e-6));
    CHECK(B[1] == Approx(78e-6));
    CHECK(B.back() == Approx(278e-6));
}

TEST_CASE("jumps section and seed precedence") {
    const auto c = parse_config("[jumps]\nT_up_us = 570\nT_down_us = 135\nseed = 99\n");
    const auto tg = read_telegraph(c);
    CHECK(tg.T_up == Approx(570e-6));
    CHECK(tg.T_down == Approx(135e-6));
    const auto ro = read_readout(c);
    CHECK(ro.spacing == Approx(5e-6));
    CHECK(std::abs(ro.center_e - ro.center_g) == Approx(6 * ro.sigma_cloud));

    unsetenv("VORTEXLAB_SEED");
    CHECK(resolve_seed(c) == 99);
    CHECK(resolve_seed(parse_config("")) == 1);
    setenv("VORTEXLAB_SEED", "1234", 1);
    CHECK(resolve_seed(c) == 1234);
    setenv("VORTEXLAB_SEED", "-5", 1);
    CHECK_THROWS_AS(resolve_seed(c), ConfigError);
    unsetenv("VORTEXLAB_SEED");
}

TEST_CASE("eps0 override in frequency units") {
    CHECK_FALSE(read_eps0_override(parse_config("[device]\nw_um = 3\n")));
    const auto e = read_eps0_override(parse_config("[device]\neps0_GHz = 2000\n"));
    REQUIRE(e);
    CHECK(*e == Approx(2e12 * kConstants.h));
}
