#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vortexlab/constants.hpp"
#include "vortexlab/fitting.hpp"

namespace vortexlab {

/// Mean waiting times of the two-state process: T_up in the ground state
/// before an excitation, T_down in the excited state before a relaxation.
/// Either may be +inf (rate zero).
struct TelegraphParams {
    double T_up = 0.0;
    double T_down = 0.0;
};

void validate(const TelegraphParams& tg);

/// Stationary excited-state probability (1/T_up) / (1/T_up + 1/T_down).
double stationary_excited(const TelegraphParams& tg);

struct ReadoutModel {
    std::complex<double> center_g{0.0, 0.0};
    std::complex<double> center_e{1.0, 0.0};
    double sigma_cloud = 0.1;  // per quadrature
    double tau_m = 1.2e-6;     // s
    double spacing = 5e-6;     // s
};

void validate(const ReadoutModel& ro);

/// Ground cloud at the origin, excited cloud on the I axis at
/// `separation_sigma` widths.
ReadoutModel readout_with_separation(double sigma_cloud, double separation_sigma, double tau_m,
                                     double spacing);

/// Continuous-time record: the state on [switch_times[i], switch_times[i+1])
/// alternates starting from `initial_state` (0 = g, 1 = e).
struct TelegraphRecord {
    int initial_state = 0;
    std::vector<double> switch_times;
    double duration = 0.0;

    int state_at(double t) const;
};

/// Initial state drawn from the stationary distribution, then alternating
/// exponential dwells. Deterministic given `seed`.
TelegraphRecord simulate_telegraph(const TelegraphParams& tg, double duration, std::uint64_t seed);

struct Trajectory {
    std::vector<double> times;                // s, k * spacing
    std::vector<std::complex<double>> iq;
    std::vector<int> true_states;             // synthetic data only
    std::vector<int> assigned_states;         // after filtering

    std::size_t size() const { return times.size(); }
};

void validate(const Trajectory& traj);

/// Samples the telegraph process at every `spacing` and adds independent
/// Gaussian noise of width sigma_cloud to each quadrature. The process and
/// the noise use separate streams derived from `seed`.
Trajectory simulate_trajectory(const TelegraphParams& tg, const ReadoutModel& ro, double duration,
                               std::uint64_t seed);

/// Hysteretic assignment. Points are projected on the line through the two
/// centres; a point within n_sigma * sigma_cloud of the opposite centre
/// switches the state, anything else keeps it. The first point takes the
/// nearer centre. AmbiguousBands when |center_e - center_g| < 2 n_sigma sigma.
std::vector<int> latching_filter(const Trajectory& traj, const ReadoutModel& ro,
                                 double n_sigma = 1.5);

struct DwellFit {
    double T = 0.0;   // s
    double T_se = 0.0;
    std::size_t count = 0;
    ExponentialFit fit;
};

struct DwellStats {
    double T_up_hat = 0.0;    // mean ground dwell, s
    double T_down_hat = 0.0;  // mean excited dwell, s
    double T_up_se = 0.0, T_down_se = 0.0;
    std::size_t ground_dwells = 0, excited_dwells = 0;
    double T1_hat = 0.0;      // (1/T_up + 1/T_down)^-1
    double P_e = 0.0;         // fraction of samples assigned e
};

inline constexpr std::size_t kMinDwells = 50;
inline constexpr int kBinsPerDecade = 20;

/// Exponential fit to a log-binned dwell histogram (density per unit time).
/// Bin edges are integer multiples of `resolution`; `discrete` marks dwells
/// that are themselves multiples of `resolution`.
DwellFit fit_dwell_times(std::span<const double> durations, double resolution, bool discrete);

/// Dwell intervals of an assigned record; the first and last (censored)
/// runs are dropped. Returns {ground dwells, excited dwells} in s.
std::array<std::vector<double>, 2> dwell_intervals(std::span<const int> states, double spacing);

/// Same for a continuous record.
std::array<std::vector<double>, 2> dwell_intervals(const TelegraphRecord& record);

/// Throws InsufficientDwells with fewer than 50 dwells in either state.
DwellStats dwell_statistics(std::span<const int> states, double spacing);

struct ClusterResult {
    std::complex<double> center_g, center_e;
    double sigma_cloud = 0.0;
    double P_e = 0.0;
    int iterations = 0;
    double log_likelihood = 0.0;  // mean per point
};

inline constexpr std::size_t kMinClusterPoints = 1000;

/// Two-component isotropic Gaussian mixture by EM. The ground component is
/// the heavier one, or the one nearer to `ground_hint` when given.
/// ClusteringError when the fitted centres are closer than 2 sigma.
ClusterResult iq_cluster(std::span<const std::complex<double>> points,
                         std::optional<std::complex<double>> ground_hint = std::nullopt);

/// T with P_e / (1 - P_e) = exp(-h f_q / k_B T). NegativeTemperature for
/// P_e >= 0.5.
double effective_temperature(double P_e, double f_q, const PhysicalConstants& consts = kConstants);

double thermal_population(double T, double f_q, const PhysicalConstants& consts = kConstants);

}  // namespace vortexlab
