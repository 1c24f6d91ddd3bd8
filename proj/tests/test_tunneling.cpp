#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "vortexlab/energetics.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/tunneling.hpp"

using namespace vortexlab;
#include "approx.hpp"

namespace {

constexpr double kPi = std::numbers::pi;
const double kH = kConstants.h;
const double kHbar = kConstants.hbar;

const TunnelModel kModel{2e-9, 2 * kPi * 50e9, std::nullopt};

Eigen::VectorXd sample(const Grid& g, auto&& f) {
    Eigen::VectorXd v(g.size());
    for (int i = 0; i < g.points[0]; ++i) v(i) = f(g.coordinate(0, i));
    return v;
}

// Two Lorentzian wells of equal depth at +-a, plus a linear tilt.
Eigen::VectorXd double_well(const Grid& g, double depth, double a, double sigma, double tilt = 0.0) {
    return sample(g, [&](double x) {
        return -depth / (1 + std::pow((x - a) / sigma, 2)) - depth / (1 + std::pow((x + a) / sigma, 2)) + tilt * x;
    });
}

double parity(const Eigen::VectorXd& psi, double cell) {
    const Eigen::VectorXd r = psi.reverse();
    return psi.dot(r) * cell;
}

}  // namespace

TEST_CASE("grid and model validation") {
    CHECK_THROWS_AS(validate(Grid::line(0.0, 1e-8, 16)), InvalidArgument);
    CHECK_THROWS_AS(validate(Grid::line(1e-8, 0.0, 128)), InvalidArgument);
    const Grid g = Grid::line(-1.0, 1.0, 99);
    CHECK(g.spacing(0) == Approx(0.02));
    CHECK(g.coordinate(0, 0) == Approx(-0.98));
    CHECK(g.coordinate(0, 98) == Approx(0.98));

    TunnelModel m = kModel;
    m.m_v = kHbar / (2 * m.Omega * m.y_zpf * m.y_zpf);
    CHECK_NOTHROW(validate(m));
    CHECK(m.kinetic() == Approx(kHbar * kHbar / (2 * *m.m_v)).epsilon(1e-12));
    m.m_v = *m.m_v * 1.01;
    CHECK_THROWS_AS(validate(m), InvalidArgument);

    const PinningSite site{1e-6, 0.0, 50e9 * kH, 3e-9};
    const auto fs = TunnelModel::from_site(site, 2e-9);
    CHECK(kHbar * fs.Omega == Approx(4 * site.V * 4e-18 / 9e-18).epsilon(1e-12));
}

TEST_CASE("harmonic oscillator levels") {
    const double hw = kH * 10e9;  // oscillator quantum
    const double m = kHbar * kHbar / (2 * kModel.kinetic());
    const double omega = hw / kHbar;
    const double x0 = std::sqrt(kHbar / (m * omega));
    const Grid g = Grid::line(-8 * x0, 8 * x0, 1024);
    const auto V = sample(g, [&](double x) { return 0.5 * m * omega * omega * x * x; });
    const auto r = solve_schrodinger(g, V, kModel, 4);
    for (int n = 0; n < 4; ++n) CHECK(r.energies[n] == Approx((n + 0.5) * hw).epsilon(1e-4));
    for (double res : r.residuals) CHECK(res < 1e-8);
}

TEST_CASE("particle in a box") {
    const Grid g = Grid::line(0.0, 40e-9, 1024);
    const auto r = solve_schrodinger(g, Eigen::VectorXd::Zero(g.size()), kModel, 3);
    CHECK(r.energies[1] / r.energies[0] == Approx(4.0).epsilon(1e-3));
    CHECK(r.energies[2] / r.energies[0] == Approx(9.0).epsilon(1e-3));
    const double E1 = kModel.kinetic() * std::pow(kPi / 40e-9, 2);
    CHECK(r.energies[0] == Approx(E1).epsilon(1e-4));
}

TEST_CASE("iterative solver agrees with dense diagonalization") {
    const Grid g = Grid::line(-30e-9, 30e-9, 256);
    const auto V = double_well(g, 50e9 * kH, 7.5e-9, 3e-9, 1e-3 * kH * 1e9 / 1e-9);
    const auto a = solve_schrodinger(g, V, kModel, 6);
    const auto b = solve_schrodinger_dense(g, V, kModel, 6);
    for (int n = 0; n < 6; ++n) {
        CHECK(a.energies[n] == Approx(b.energies[n]).epsilon(1e-9));
        CHECK(std::abs(a.wavefunctions.col(n).dot(b.wavefunctions.col(n)) * g.cell()) == Approx(1.0).epsilon(1e-8));
    }
    const Eigen::MatrixXd gram = a.wavefunctions.transpose() * a.wavefunctions * g.cell();
    CHECK((gram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(std::is_sorted(a.energies.begin(), a.energies.end()));
    CHECK_THROWS_AS(solve_schrodinger(g, V, kModel, 11), InvalidArgument);
}

TEST_CASE("tunnel splitting falls as the barrier rises") {
    const Grid g = Grid::line(-30e-9, 30e-9, 256);
    double last = 1e300;
    for (double depth : {30.0, 40.0, 50.0, 60.0, 70.0}) {
        const auto r = solve_schrodinger_dense(g, double_well(g, depth * 1e9 * kH, 7.5e-9, 3e-9), kModel, 2);
        const double split = r.energies[1] - r.energies[0];
        CHECK(split < last);
        last = split;
    }
}

TEST_CASE("symmetric wells give even and odd states") {
    const Grid g = Grid::line(-30e-9, 30e-9, 1024);
    const auto r = solve_schrodinger(g, double_well(g, 50e9 * kH, 7.5e-9, 3e-9), kModel, 2);
    CHECK(std::abs(std::abs(parity(r.wavefunctions.col(0), g.cell())) - 1.0) < 1e-6);
    CHECK(std::abs(parity(r.wavefunctions.col(0), g.cell()) - 1.0) < 1e-6);
    CHECK(std::abs(parity(r.wavefunctions.col(1), g.cell()) + 1.0) < 1e-6);
}

TEST_CASE("splitting is even in the tilt") {
    const Grid g = Grid::line(-30e-9, 30e-9, 1024);
    for (double tilt : {0.05, 0.2, 0.6}) {
        const double t = tilt * kH * 1e9 / 1e-9;
        const auto p = solve_schrodinger(g, double_well(g, 50e9 * kH, 7.5e-9, 3e-9, t), kModel, 2);
        const auto m = solve_schrodinger(g, double_well(g, 50e9 * kH, 7.5e-9, 3e-9, -t), kModel, 2);
        CHECK(p.energies[1] - p.energies[0] == Approx(m.energies[1] - m.energies[0]).epsilon(1e-6));
    }
}

TEST_CASE("grid refinement") {
    for (int n : {1024}) {
        const Grid a = Grid::line(-30e-9, 30e-9, n), b = Grid::line(-30e-9, 30e-9, 2 * n);
        const auto ra = solve_schrodinger(a, double_well(a, 50e9 * kH, 7.5e-9, 3e-9, 2e-26 / 1e-9), kModel, 2);
        const auto rb = solve_schrodinger(b, double_well(b, 50e9 * kH, 7.5e-9, 3e-9, 2e-26 / 1e-9), kModel, 2);
        for (int k = 0; k < 2; ++k) CHECK(std::abs(ra.energies[k] / rb.energies[k] - 1) < 1e-4);
    }
}

TEST_CASE("two-level formula") {
    TwoLevelModel m{1.0, [](double B) { return B; }};
    CHECK(m.splitting(0.0) == Approx(2.0));
    CHECK(m.splitting(2.0) == Approx(2 * std::sqrt(2.0)));

    EigenResult close;
    close.energies = {0.0, 1.0, 2.0};
    EigenResult other;
    other.energies = {0.0, 3.0};
    CHECK_THROWS_AS(two_level_reduction(close, other, [](double) { return 0.0; }), ReductionInvalid);
    EigenResult deg;
    deg.energies = {0.0, 1.0, 10.0};
    const auto t = two_level_reduction(deg, other, [](double) { return 0.0; });
    CHECK(t.Delta == Approx(0.5));
    EigenResult below;
    below.energies = {0.0, 0.5};
    CHECK_THROWS_AS(two_level_reduction(deg, below, [](double) { return 0.0; }), ReductionInvalid);
}

TEST_CASE("pinned double well in the strip follows the two-level hyperbola") {
    const DeviceModel d = reference_device();
    const DerivedScales s = derive_scales(d);
    const double delta = 15e-9, sigma = 3e-9, V = 50e9 * kH;
    // centre offset that gives gamma = 20 GHz/mT
    const double off = 2e13 * kH * kConstants.Phi0 / (2 * kPi * s.eps0 * delta);
    const DoubleWell well{d.w / 2 + off / 2, delta, V, V, 0.0};
    CHECK(gamma_from_geometry(delta, well.x_bar, s, d) == Approx(2e13).epsilon(1e-9));
    const auto sites = double_well_sites(well, sigma);
    const double Bs = degeneracy_field(well.x_bar, delta, s, d);
    const TunnelModel model = TunnelModel::from_site(sites[0], 2e-9);

    std::vector<double> B;
    for (int i = -40; i <= 40; ++i) B.push_back(Bs + 10e-6 * i);
    const auto curve = spectrum_vs_field(sites, site_window(sites), B, model, s, d, 1024, 2);
    REQUIRE(curve.sweet_spot);
    CHECK(std::abs(*curve.sweet_spot - Bs) < 50e-6);

    const Grid grid = Grid::line(site_window(sites)[0], site_window(sites)[1], 1024);
    const auto at_sweet = solve_schrodinger(grid, sample_potential(grid, sites, *curve.sweet_spot, s, d), model, 3);
    const auto at_edge = solve_schrodinger(grid, sample_potential(grid, sites, B.back(), s, d), model, 2);
    const auto eps = well_detuning(well, s, d);
    CHECK(std::abs(eps(Bs)) < 1e-9 * s.eps0);
    CHECK(std::abs(eps(Bs + 1e-4)) == Approx(well_asymmetry(well.x_bar, delta, Bs + 1e-4, s, d)).epsilon(1e-9));
    const TwoLevelModel tl = two_level_reduction(at_sweet, at_edge, eps);
    CHECK(2 * tl.Delta == Approx(at_sweet.energies[1] - at_sweet.energies[0]).epsilon(1e-12));

    int compared = 0;
    for (const auto& p : curve.points) {
        REQUIRE_FALSE(p.error);
        CHECK(p.f_q == Approx(p.omega_q / (2 * kPi)).epsilon(1e-12));
        if (std::abs(eps(p.B)) <= 4 * tl.Delta) {
            ++compared;
            CHECK(kHbar * p.omega_q == Approx(tl.splitting(p.B)).epsilon(0.05));
        } else if (std::abs(eps(p.B)) > 12 * tl.Delta) {
            CHECK(kHbar * p.omega_q == Approx(std::abs(eps(p.B))).epsilon(0.05));
        }
    }
    CHECK(compared >= 5);
}

TEST_CASE("spectrum_vs_field input checks") {
    const DeviceModel d = reference_device();
    const DerivedScales s = derive_scales(d);
    const DoubleWell well{1.6e-6, 15e-9, 50e9 * kH, 50e9 * kH, 0.0};
    const auto sites = double_well_sites(well, 3e-9);
    const std::vector<double> B{1e-4};
    const TunnelModel model = TunnelModel::from_site(sites[0], 2e-9);
    const std::vector<PinningSite> one{sites[0]};
    CHECK_THROWS_AS(spectrum_vs_field(one, site_window(one), B, model, s, d), InvalidArgument);
    const std::array<double, 2> narrow{well.x_bar - 5e-9, well.x_bar + 5e-9};
    CHECK_THROWS_AS(spectrum_vs_field(sites, narrow, B, model, s, d), InvalidArgument);
}
