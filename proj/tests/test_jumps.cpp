#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "vortexlab/errors.hpp"
#include "vortexlab/jumps.hpp"

using namespace vortexlab;
#include "approx.hpp"

namespace {

const double kInf = std::numeric_limits<double>::infinity();
const TelegraphParams kPaperRates{570e-6, 135e-6};

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

std::vector<std::complex<double>> two_clouds(std::size_t n, double p_e, std::complex<double> g,
                                             std::complex<double> e, double sigma, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution pick(p_e);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<std::complex<double>> pts;
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = pick(rng) ? e : g;
        pts.push_back(c + std::complex<double>(noise(rng), noise(rng)));
    }
    return pts;
}

}  // namespace

TEST_CASE("telegraph parameters") {
    CHECK(stationary_excited(kPaperRates) == Approx(135.0 / 705.0));
    CHECK(stationary_excited({kInf, 1e-4}) == 0.0);
    CHECK_THROWS_AS(validate(TelegraphParams{0.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(validate(ReadoutModel{{0, 0}, {1, 0}, 0.1, 2e-6, 1e-6}), InvalidArgument);
}

TEST_CASE("a process that never excites stays in the ground state") {
    const auto rec = simulate_telegraph({kInf, 135e-6}, 0.1, 3);
    CHECK(rec.initial_state == 0);
    CHECK(rec.switch_times.empty());
    const auto traj = simulate_trajectory({kInf, 135e-6}, readout_with_separation(0.1, 6, 1.2e-6, 5e-6), 0.01, 3);
    for (int s : traj.true_states) CHECK(s == 0);
}

TEST_CASE("telegraph dwell means") {
    const auto rec = simulate_telegraph(kPaperRates, 5.0, 17);
    const auto dw = dwell_intervals(rec);
    REQUIRE(dw[0].size() > 1000);
    CHECK(std::abs(mean(dw[0]) - 570e-6) < 3 * 570e-6 / std::sqrt(dw[0].size()));
    CHECK(std::abs(mean(dw[1]) - 135e-6) < 3 * 135e-6 / std::sqrt(dw[1].size()));
    for (std::size_t i = 0; i < 200; ++i) CHECK(rec.state_at(rec.switch_times[i] + 1e-12) == ((rec.initial_state + i + 1) % 2));
}

TEST_CASE("seeding") {
    const auto a = simulate_telegraph(kPaperRates, 0.05, 5);
    const auto b = simulate_telegraph(kPaperRates, 0.05, 5);
    const auto c = simulate_telegraph(kPaperRates, 0.05, 6);
    CHECK(a.switch_times == b.switch_times);
    CHECK(a.switch_times.front() != c.switch_times.front());
    const auto ro = readout_with_separation(0.1, 6, 1.2e-6, 5e-6);
    const auto t1 = simulate_trajectory(kPaperRates, ro, 0.02, 9);
    const auto t2 = simulate_trajectory(kPaperRates, ro, 0.02, 9);
    CHECK(t1.iq == t2.iq);
    CHECK(t1.size() == 4000);
    CHECK(t1.times[10] == Approx(50e-6));
}

TEST_CASE("latching filter") {
    const auto ro = readout_with_separation(0.1, 6, 1.2e-6, 5e-6);
    Trajectory traj;
    const std::vector<int> truth{0, 0, 1, 1, 1, 0, 1, 0, 0};
    for (std::size_t i = 0; i < truth.size(); ++i) {
        traj.times.push_back(i * 5e-6);
        traj.iq.push_back(truth[i] ? ro.center_e : ro.center_g);
    }
    CHECK(latching_filter(traj, ro) == truth);

    SUBCASE("a point between the bands keeps the state") {
        traj.iq[3] = 0.5 * (ro.center_g + ro.center_e);
        traj.iq[4] = 0.45 * (ro.center_g + ro.center_e);
        const auto s = latching_filter(traj, ro);
        CHECK(s[3] == 1);
        CHECK(s[4] == 1);
    }
    SUBCASE("later points do not change earlier assignments") {
        const auto before = latching_filter(traj, ro);
        for (std::size_t i = 5; i < traj.size(); ++i) traj.iq[i] = ro.center_g;
        const auto after = latching_filter(traj, ro);
        for (std::size_t i = 0; i < 5; ++i) CHECK(before[i] == after[i]);
    }
    SUBCASE("overlapping bands") {
        const auto close = readout_with_separation(0.1, 2.5, 1.2e-6, 5e-6);
        CHECK_THROWS_AS(latching_filter(traj, close), AmbiguousBands);
    }
}

TEST_CASE("dwell intervals drop the censored runs") {
    const std::vector<int> s{0, 0, 1, 1, 1, 0, 0, 1, 1};
    const auto d = dwell_intervals(s, 2.0);
    REQUIRE(d[0].size() == 1);
    REQUIRE(d[1].size() == 1);
    CHECK(d[0][0] == 4.0);
    CHECK(d[1][0] == 6.0);
}

TEST_CASE("dwell fit on exponential samples") {
    std::mt19937_64 rng(8);
    std::exponential_distribution<double> ex(1.0 / 135e-6);
    std::vector<double> dw(20000);
    for (auto& x : dw) x = ex(rng);
    const auto f = fit_dwell_times(dw, 1e-6, false);
    CHECK(f.count == dw.size());
    CHECK(std::abs(f.T - 135e-6) < 3 * f.T_se);
    const std::vector<double> few(10, 1e-4);
    CHECK_THROWS_AS(fit_dwell_times(few, 1e-6, false), InsufficientDwells);
}

TEST_CASE("dwell statistics from the true states") {
    const auto ro = readout_with_separation(0.1, 6, 1.2e-6, 5e-6);
    const auto traj = simulate_trajectory(kPaperRates, ro, 2.0, 21);
    const auto ds = dwell_statistics(traj.true_states, 5e-6);
    CHECK(std::abs(ds.T_up_hat - 570e-6) < 3 * ds.T_up_se + 0.05 * 570e-6);
    CHECK(std::abs(ds.T_down_hat - 135e-6) < 3 * ds.T_down_se + 0.05 * 135e-6);
    CHECK(ds.T1_hat == Approx(1 / (1 / ds.T_up_hat + 1 / ds.T_down_hat)));
    CHECK(ds.T1_hat <= std::min(ds.T_up_hat, ds.T_down_hat));
    CHECK(ds.P_e == Approx(stationary_excited(kPaperRates)).epsilon(0.05));

    const std::vector<int> ground(5000, 0);
    CHECK_THROWS_AS(dwell_statistics(ground, 5e-6), InsufficientDwells);
}

TEST_CASE("equal dwell means combine harmonically") {
    const auto ro = readout_with_separation(0.1, 6, 1.2e-6, 5e-6);
    const auto traj = simulate_trajectory({400e-6, 400e-6}, ro, 2.0, 4);
    const auto ds = dwell_statistics(traj.true_states, 5e-6);
    CHECK(ds.T1_hat == Approx(0.5 * 400e-6).epsilon(0.1));
}

TEST_CASE("IQ clustering") {
    const std::complex<double> g{0.0, 0.0}, e{0.6, 0.0};
    const auto pts = two_clouds(20000, 0.215, g, e, 0.1, 12);
    const auto c = iq_cluster(pts);
    CHECK(std::abs(c.P_e - 0.215) < 0.01);
    CHECK(std::abs(c.center_g - g) < 0.01);
    CHECK(std::abs(c.center_e - e) < 0.01);
    CHECK(c.sigma_cloud == Approx(0.1).epsilon(0.02));

    // point reflection through the midpoint swaps the clouds exactly
    std::vector<std::complex<double>> mirrored;
    for (const auto& p : pts) mirrored.push_back(g + e - p);
    const auto m = iq_cluster(mirrored, g);
    CHECK(std::abs(m.P_e - (1 - c.P_e)) < 1e-9);
    CHECK(std::abs(m.center_g - g) < 0.01);

    const auto one = two_clouds(5000, 0.5, g, g, 0.1, 3);
    CHECK_THROWS_AS(iq_cluster(one), ClusteringError);
    const auto few = two_clouds(100, 0.2, g, e, 0.1, 3);
    CHECK_THROWS(iq_cluster(few));
}

TEST_CASE("effective temperature") {
    CHECK(effective_temperature(0.215, 2e9) == Approx(74e-3).epsilon(1e-3 / 74e-3));
    for (double T : {20e-3, 74e-3, 300e-3}) {
        CHECK(effective_temperature(thermal_population(T, 2e9), 2e9) == Approx(T).epsilon(1e-12));
    }
    CHECK(thermal_population(0.0, 2e9) == 0.0);
    CHECK(thermal_population(1e-4, 2e9) < 1e-40);
    CHECK_THROWS_AS(effective_temperature(0.5, 2e9), NegativeTemperature);
    CHECK_THROWS_AS(effective_temperature(0.7, 2e9), NegativeTemperature);
    CHECK_THROWS_AS(effective_temperature(0.0, 2e9), DomainError);
}
