#include "vortexlab/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "vortexlab/errors.hpp"

namespace vortexlab {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu),
                      static_cast<std::uint32_t>(seed >> 32), index};
    return std::mt19937_64(seq);
}

// Integer bin edges 1, ..., ceil(10^(j/20)), ... up to and past `top`.
std::vector<long long> log_edges(double top) {
    std::vector<long long> edges{1};
    for (int j = 1;; ++j) {
        const auto k = static_cast<long long>(std::ceil(std::pow(10.0, j / double(kBinsPerDecade)) - 1e-9));
        if (k > edges.back()) edges.push_back(k);
        if (static_cast<double>(edges.back()) > top) break;
    }
    return edges;
}

}  // namespace

void validate(const TelegraphParams& tg) {
    if (!(tg.T_up > 0.0) || !(tg.T_down > 0.0) || std::isnan(tg.T_up) || std::isnan(tg.T_down)) {
        throw InvalidArgument("telegraph times must be positive");
    }
}

double stationary_excited(const TelegraphParams& tg) {
    validate(tg);
    const double up = 1.0 / tg.T_up, down = 1.0 / tg.T_down;
    if (up + down == 0.0) return 0.0;
    return up / (up + down);
}

void validate(const ReadoutModel& ro) {
    if (!(ro.sigma_cloud > 0.0) || !std::isfinite(ro.sigma_cloud)) {
        throw InvalidArgument("sigma_cloud must be positive");
    }
    if (!(ro.tau_m > 0.0) || !(ro.spacing >= ro.tau_m) || !std::isfinite(ro.spacing)) {
        throw InvalidArgument("readout needs tau_m > 0 and spacing >= tau_m");
    }
}

ReadoutModel readout_with_separation(double sigma_cloud, double separation_sigma, double tau_m,
                                     double spacing) {
    ReadoutModel ro;
    ro.center_g = {0.0, 0.0};
    ro.center_e = {separation_sigma * sigma_cloud, 0.0};
    ro.sigma_cloud = sigma_cloud;
    ro.tau_m = tau_m;
    ro.spacing = spacing;
    validate(ro);
    return ro;
}

int TelegraphRecord::state_at(double t) const {
    const auto flips = std::upper_bound(switch_times.begin(), switch_times.end(), t) -
                       switch_times.begin();
    return (initial_state + static_cast<int>(flips % 2)) % 2;
}

TelegraphRecord simulate_telegraph(const TelegraphParams& tg, double duration, std::uint64_t seed) {
    validate(tg);
    if (!(duration > 0.0) || !std::isfinite(duration)) {
        throw InvalidArgument("duration must be positive");
    }
    auto rng = stream(seed, 0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    TelegraphRecord rec;
    rec.duration = duration;
    rec.initial_state = uniform(rng) < stationary_excited(tg) ? 1 : 0;
    int state = rec.initial_state;
    double t = 0.0;
    for (;;) {
        const double mean = state == 0 ? tg.T_up : tg.T_down;
        if (std::isinf(mean)) break;
        std::exponential_distribution<double> dwell(1.0 / mean);
        t += dwell(rng);
        if (t >= duration) break;
        rec.switch_times.push_back(t);
        state ^= 1;
    }
    return rec;
}

void validate(const Trajectory& traj) {
    const std::size_t n = traj.times.size();
    if (traj.iq.size() != n || (!traj.true_states.empty() && traj.true_states.size() != n) ||
        (!traj.assigned_states.empty() && traj.assigned_states.size() != n)) {
        throw InvalidArgument("trajectory columns differ in length");
    }
}

Trajectory simulate_trajectory(const TelegraphParams& tg, const ReadoutModel& ro, double duration,
                               std::uint64_t seed) {
    validate(ro);
    const TelegraphRecord rec = simulate_telegraph(tg, duration, seed);
    auto rng = stream(seed, 1);
    std::normal_distribution<double> noise(0.0, ro.sigma_cloud);
    // the tolerance keeps an exact multiple such as 0.02 s / 5 us from losing a sample
    const auto n = static_cast<std::size_t>(std::floor(duration / ro.spacing * (1.0 + 1e-12)));
    Trajectory traj;
    traj.times.reserve(n);
    traj.iq.reserve(n);
    traj.true_states.reserve(n);
    std::size_t next = 0;
    int state = rec.initial_state;
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * ro.spacing;
        while (next < rec.switch_times.size() && rec.switch_times[next] <= t) {
            state ^= 1;
            ++next;
        }
        const std::complex<double> c = state == 0 ? ro.center_g : ro.center_e;
        const double i = noise(rng);
        const double q = noise(rng);
        traj.times.push_back(t);
        traj.iq.push_back(c + std::complex<double>(i, q));
        traj.true_states.push_back(state);
    }
    return traj;
}

std::vector<int> latching_filter(const Trajectory& traj, const ReadoutModel& ro, double n_sigma) {
    validate(traj);
    validate(ro);
    if (!(n_sigma > 0.0)) throw InvalidArgument("n_sigma must be positive");
    const std::complex<double> d = ro.center_e - ro.center_g;
    const double D = std::abs(d);
    const double band = n_sigma * ro.sigma_cloud;
    if (D < 2.0 * band) throw AmbiguousBands("latching bands overlap");
    const std::complex<double> axis = std::conj(d) / D;
    std::vector<int> out;
    out.reserve(traj.size());
    int state = 0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double u = ((traj.iq[k] - ro.center_g) * axis).real();
        if (k == 0) {
            state = std::abs(traj.iq[k] - ro.center_e) < std::abs(traj.iq[k] - ro.center_g) ? 1 : 0;
        } else if (state == 0 && std::abs(u - D) < band) {
            state = 1;
        } else if (state == 1 && std::abs(u) < band) {
            state = 0;
        }
        out.push_back(state);
    }
    return out;
}

DwellFit fit_dwell_times(std::span<const double> durations, double resolution, bool discrete) {
    if (!(resolution > 0.0)) throw InvalidArgument("dwell resolution must be positive");
    if (durations.size() < kMinDwells) {
        throw InsufficientDwells("need at least " + std::to_string(kMinDwells) + " dwell intervals, got " +
                                 std::to_string(durations.size()));
    }
    double top = 0.0;
    for (double d : durations) {
        if (!(d >= 0.0) || !std::isfinite(d)) throw InvalidArgument("dwell times must be finite");
        top = std::max(top, d / resolution);
    }
    std::vector<long long> edges = log_edges(top + 1.0);
    if (!discrete) edges.insert(edges.begin(), 0);
    std::vector<std::size_t> counts(edges.size() - 1, 0);
    for (double d : durations) {
        const double u = discrete ? std::round(d / resolution) : d / resolution;
        const auto it = std::upper_bound(edges.begin(), edges.end(), u,
                                         [](double v, long long e) { return v < static_cast<double>(e); });
        const auto bin = static_cast<std::size_t>(it - edges.begin()) - 1;
        if (bin < counts.size()) ++counts[bin];
    }
    std::size_t last = 0;
    for (std::size_t b = 0; b < counts.size(); ++b) {
        if (counts[b] > 0) last = b;
    }
    const double total = static_cast<double>(durations.size());
    TimeTrace hist;
    for (std::size_t b = 0; b <= last; ++b) {
        const double a = static_cast<double>(edges[b]), e = static_cast<double>(edges[b + 1]);
        const double width = (e - a) * resolution;
        const double mid = discrete ? 0.5 * (a + e - 1.0) * resolution : 0.5 * (a + e) * resolution;
        const double c = static_cast<double>(counts[b]);
        hist.times.push_back(mid);
        hist.values.push_back(c / (total * width));
        hist.sigma.push_back(std::sqrt(std::max(c, 1.0)) / (total * width));
    }
    if (hist.size() < 4) throw InsufficientDwells("dwell histogram has fewer than 4 bins");
    DwellFit out;
    out.count = durations.size();
    out.fit = fit_exponential(hist);
    out.T = out.fit.T;
    out.T_se = out.fit.fit.error("T") * (hist.times.back() - hist.times.front());
    return out;
}

std::array<std::vector<double>, 2> dwell_intervals(std::span<const int> states, double spacing) {
    std::array<std::vector<double>, 2> out;
    if (states.empty()) return out;
    std::size_t start = 0;
    bool first = true;
    for (std::size_t k = 1; k <= states.size(); ++k) {
        if (k == states.size()) break;  // the final run is censored
        if (states[k] != states[start]) {
            if (!first) {
                out[static_cast<std::size_t>(states[start] != 0)].push_back(
                    static_cast<double>(k - start) * spacing);
            }
            first = false;
            start = k;
        }
    }
    return out;
}

std::array<std::vector<double>, 2> dwell_intervals(const TelegraphRecord& rec) {
    std::array<std::vector<double>, 2> out;
    const auto& s = rec.switch_times;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        // state after switch i
        const int state = (rec.initial_state + static_cast<int>((i + 1) % 2)) % 2;
        out[static_cast<std::size_t>(state)].push_back(s[i + 1] - s[i]);
    }
    return out;
}

DwellStats dwell_statistics(std::span<const int> states, double spacing) {
    if (!(spacing > 0.0)) throw InvalidArgument("spacing must be positive");
    const auto dwells = dwell_intervals(states, spacing);
    if (dwells[0].size() < kMinDwells || dwells[1].size() < kMinDwells) {
        throw InsufficientDwells("need at least 50 dwells per state (have " +
                                 std::to_string(dwells[0].size()) + " ground, " +
                                 std::to_string(dwells[1].size()) + " excited)");
    }
    const DwellFit g = fit_dwell_times(dwells[0], spacing, true);
    const DwellFit e = fit_dwell_times(dwells[1], spacing, true);
    DwellStats out;
    out.T_up_hat = g.T;
    out.T_down_hat = e.T;
    out.T_up_se = g.T_se;
    out.T_down_se = e.T_se;
    out.ground_dwells = g.count;
    out.excited_dwells = e.count;
    out.T1_hat = 1.0 / (1.0 / out.T_up_hat + 1.0 / out.T_down_hat);
    std::size_t excited = 0;
    for (int s : states) excited += (s != 0);
    out.P_e = static_cast<double>(excited) / static_cast<double>(states.size());
    return out;
}

ClusterResult iq_cluster(std::span<const std::complex<double>> z,
                         std::optional<std::complex<double>> ground_hint) {
    const std::size_t n = z.size();
    if (n < kMinClusterPoints) throw InvalidArgument("iq_cluster needs at least 1000 points");
    for (const auto& p : z) {
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
            throw InvalidArgument("iq_cluster: non-finite point");
        }
    }
    // farthest-point seeds on the first 1000 points
    const std::size_t m = kMinClusterPoints;
    std::complex<double> mean{0.0, 0.0};
    for (std::size_t i = 0; i < m; ++i) mean += z[i];
    mean /= static_cast<double>(m);
    std::size_t a = 0;
    for (std::size_t i = 1; i < m; ++i) {
        if (std::abs(z[i] - mean) > std::abs(z[a] - mean)) a = i;
    }
    std::size_t b = 0;
    for (std::size_t i = 1; i < m; ++i) {
        if (std::abs(z[i] - z[a]) > std::abs(z[b] - z[a])) b = i;
    }
    std::array<std::complex<double>, 2> mu{z[a], z[b]};
    std::array<double, 2> weight{0.5, 0.5};
    double s2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        s2 += std::min(std::norm(z[i] - mu[0]), std::norm(z[i] - mu[1]));
    }
    s2 = std::max(s2 / (2.0 * static_cast<double>(n)), 1e-300);

    ClusterResult out;
    double previous = -std::numeric_limits<double>::infinity();
    std::vector<double> r(n);
    for (int it = 1; it <= 100; ++it) {
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double l0 = std::log(weight[0]) - std::norm(z[i] - mu[0]) / (2.0 * s2);
            const double l1 = std::log(weight[1]) - std::norm(z[i] - mu[1]) / (2.0 * s2);
            const double top = std::max(l0, l1);
            const double lse = top + std::log(std::exp(l0 - top) + std::exp(l1 - top));
            r[i] = std::exp(l1 - lse);
            ll += lse - std::log(2.0 * std::numbers::pi * s2);
        }
        ll /= static_cast<double>(n);
        double n1 = 0.0;
        std::array<std::complex<double>, 2> acc{};
        for (std::size_t i = 0; i < n; ++i) {
            n1 += r[i];
            acc[0] += (1.0 - r[i]) * z[i];
            acc[1] += r[i] * z[i];
        }
        const double n0 = static_cast<double>(n) - n1;
        if (!(n0 > 1e-9) || !(n1 > 1e-9)) throw ClusteringError("EM collapsed to one component");
        mu = {acc[0] / n0, acc[1] / n1};
        weight = {n0 / static_cast<double>(n), n1 / static_cast<double>(n)};
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ss += (1.0 - r[i]) * std::norm(z[i] - mu[0]) + r[i] * std::norm(z[i] - mu[1]);
        }
        s2 = ss / (2.0 * static_cast<double>(n));
        if (!(s2 > 0.0)) throw ClusteringError("EM variance collapsed");
        out.iterations = it;
        out.log_likelihood = ll;
        if (std::abs(ll - previous) < 1e-8) break;
        previous = ll;
    }
    const double sigma = std::sqrt(s2);
    if (std::abs(mu[1] - mu[0]) < 2.0 * sigma) {
        throw ClusteringError("IQ data do not separate into two clouds");
    }
    int g = weight[1] > weight[0] ? 1 : 0;
    if (ground_hint) g = std::abs(mu[1] - *ground_hint) < std::abs(mu[0] - *ground_hint) ? 1 : 0;
    out.center_g = mu[static_cast<std::size_t>(g)];
    out.center_e = mu[static_cast<std::size_t>(1 - g)];
    out.sigma_cloud = sigma;
    out.P_e = weight[static_cast<std::size_t>(1 - g)];
    return out;
}

double effective_temperature(double P_e, double f_q, const PhysicalConstants& c) {
    if (!(f_q > 0.0)) throw InvalidArgument("qubit frequency must be positive");
    if (!(P_e > 0.0)) throw DomainError("excited population must be positive");
    if (P_e >= 0.5) {
        throw NegativeTemperature("excited population >= 0.5: population inversion");
    }
    return c.h * f_q / (c.k_B * std::log((1.0 - P_e) / P_e));
}

double thermal_population(double T, double f_q, const PhysicalConstants& c) {
    if (!(f_q > 0.0)) throw InvalidArgument("qubit frequency must be positive");
    if (!(T >= 0.0)) throw DomainError("temperature must be non-negative");
    if (T == 0.0) return 0.0;
    return 1.0 / (1.0 + std::exp(c.h * f_q / (c.k_B * T)));
}

}  // namespace vortexlab
