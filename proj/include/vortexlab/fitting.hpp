#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vortexlab/least_squares.hpp"
#include "vortexlab/rabi.hpp"

namespace vortexlab {

/// One spectroscopic point: field (T), frequency (Hz), uncertainty (Hz).
struct SpectrumPoint {
    double B = 0.0;
    double f = 0.0;
    double sigma = 1.0;
};

struct SpectrumDataset {
    std::vector<SpectrumPoint> qubit_points;
    std::vector<SpectrumPoint> resonator_points;
};

/// Time-domain record. Empty `sigma` means unit weights.
struct TimeTrace {
    std::vector<double> times;   // s, strictly ascending
    std::vector<double> values;
    std::vector<double> sigma;

    std::size_t size() const { return times.size(); }
    double sigma_at(std::size_t i) const { return sigma.empty() ? 1.0 : sigma[i]; }
};

void validate(const TimeTrace& trace);

// ---------------------------------------------------------------- hyperbola

struct HyperbolaFit {
    double f_q0 = 0.0;   // Hz
    double gamma = 0.0;  // Hz/T
    double B0 = 0.0;     // T
    FitResult fit;       // parameters in GHz, GHz/mT, uT
};

/// f_q(B) = sqrt(f_q0^2 + gamma^2 (B - B0)^2). Needs >= 3 points at >= 2
/// distinct fields; identical fields throw DegenerateFit.
HyperbolaFit fit_hyperbola(std::span<const SpectrumPoint> points);

// ---------------------------------------------------------- joint spectrum

struct JointFit {
    QrmParams params;  // orientation copied from the initial guess
    FitResult fit;     // f_r [GHz], g [MHz], gamma [GHz/mT], B0 [uT], f_q0 [GHz]
};

/// Initial guess from the data alone: f_r from the median resonator point,
/// B0 and f_q0 from the lowest qubit point, gamma from the outermost secant,
/// g = 1% of f_r.
QrmParams joint_initial_guess(const SpectrumDataset& data, Orientation orientation = kAsymmetric);

inline constexpr HilbertTruncation kFitTruncation{30};

/// Fits qubit points to the dressed |g,0> -> |e,0> transition and
/// resonator points to |g,0> -> |g,1>. Trial parameters whose spectrum
/// cannot be labeled get a fixed penalty instead of failing.
JointFit fit_joint_aqrm(const SpectrumDataset& data, std::optional<QrmParams> init = std::nullopt,
                        const HilbertTruncation& trunc = kFitTruncation);

// ------------------------------------------------------------ decay/echo

struct ExponentialFit {
    double T = 0.0;  // s
    double A = 0.0;
    double c = 0.0;
    FitResult fit;   // T in units of the trace span
};

/// A exp(-t/T) + c; needs >= 4 points.
ExponentialFit fit_exponential(const TimeTrace& trace);

// ------------------------------------------------------------------ Ramsey

struct RamseyFit {
    double T2s = 0.0;       // s
    double f1 = 0.0, f2 = 0.0;  // Hz, f1 <= f2
    double a1 = 0.0, a2 = 0.0;
    double phi1 = 0.0, phi2 = 0.0;
    double c = 0.0;
    double beat = 0.0;      // |f1 - f2|
    bool beat_identifiable = false;
    bool single_tone = false;
    FitResult fit;
};

/// exp(-t/T2s) [a1 cos(2 pi f1 t + phi1) + a2 cos(2 pi f2 t + phi2)] + c.
/// With no second spectral line the single-tone model is fitted and the
/// split is reported as unidentifiable. Needs >= 10 points.
RamseyFit fit_ramsey_beat(const TimeTrace& trace);

// -------------------------------------------------------------------- Rabi

struct DampedCosineFit {
    double frequency = 0.0;  // Hz
    double amplitude = 0.0;
    double decay = 0.0;      // s
    double phase = 0.0;
    double offset = 0.0;
    FitResult fit;
};

/// A exp(-t/tau) cos(2 pi f t + phase) + c; initial frequency from the
/// periodogram peak.
DampedCosineFit fit_damped_cosine(const TimeTrace& trace);

/// Rabi frequency (Hz) of a rectangular pulse of length t_pi that inverts
/// the population.
inline double rabi_frequency_from_pi_pulse(double t_pi) { return 0.5 / t_pi; }

struct RabiScan {
    double amplitude = 0.0;  // drive amplitude, V
    TimeTrace trace;
};

struct RabiTraceResult {
    double amplitude = 0.0;
    double frequency = 0.0;  // Hz
    double frequency_se = 0.0;
    bool included = false;
    std::string warning;
};

struct RabiLinearFit {
    std::vector<RabiTraceResult> traces;
    double slope = 0.0;      // Hz/V
    double slope_se = 0.0;
    FitResult fit;
};

/// Per-trace damped-cosine fits, then Omega = slope * amplitude through the
/// origin. Zero amplitude contributes Omega = 0 without fitting; traces
/// without a full oscillation are excluded with a warning.
RabiLinearFit fit_rabi_linear(std::span<const RabiScan> scans);

// -------------------------------------------------------------- reflection

/// arg S11 for a single-port resonator,
///   S11 = (i (f - f_r) + (kappa_int - kappa_ext)/2) / (i (f - f_r) + (kappa_int + kappa_ext)/2),
/// in (-pi, pi]. All rates in Hz.
double reflection_phase(double f, double f_r, double kappa_int, double kappa_ext);

struct PhaseCurve {
    std::vector<double> f;      // Hz
    std::vector<double> phase;  // rad
};

struct DispersivePhaseFit {
    double f_r_g = 0.0, f_r_e = 0.0;  // Hz
    double kappa_int = 0.0, kappa_ext = 0.0;
    double chi = 0.0;  // f_r_e - f_r_g
    FitResult fit;     // f_r_g [MHz from the first sample], chi, kappa_int, kappa_ext [MHz]
};

/// Joint fit of the ground- and excited-state phase responses with shared
/// linewidths; residuals are wrapped phase differences.
DispersivePhaseFit fit_dispersive_phase(const PhaseCurve& ground, const PhaseCurve& excited);

}  // namespace vortexlab
