#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "vortexlab/constants.hpp"

namespace vortexlab {

/// Geometry and film parameters of one strip resonator (SI units).
struct DeviceModel {
    double w;          // strip width
    double t;          // film thickness
    double length;     // resonator length
    double xi;         // coherence length
    double lambda_L;   // London penetration depth
    double f_r;        // bare resonator frequency (Hz)
    double Z_r;        // resonator impedance (ohm)
};

/// Width 3 um, 24 nm film, xi = 7 nm, lambda_L = 4 um, 7.572 GHz, 3 kOhm.
DeviceModel reference_device();

struct DerivedScales {
    double Lambda;  // Pearl length 2 lambda_L^2 / t
    double eps0;    // single-vortex energy Phi0^2 / (2 pi mu0 Lambda), J
    double phi_S;   // stable-vortex threshold, dimensionless
    double B_S;     // threshold field phi_S Phi0 / w^2, T
};

/// Throws InvalidDevice when any length is non-positive or non-finite, or
/// when the Pearl (t < lambda_L) or threshold (xi < w) assumptions fail.
void validate(const DeviceModel& device);

/// eps0_override replaces the Pearl-length value of eps0 when given; the
/// other scales do not depend on it.
DerivedScales derive_scales(const DeviceModel& device,
                            const PhysicalConstants& consts = kConstants,
                            std::optional<double> eps0_override = std::nullopt);

/// phi = B w^2 / Phi0.
double flux_bias(double B, double w, const PhysicalConstants& consts = kConstants);

enum class VortexRegime { NoStableVortices, SingleRow, TwoRow };

inline constexpr double kBucklingRatio = 2.48;

/// Regime boundaries: [0, phi_S) none, [phi_S, 2.48 phi_S] one row, above
/// that two rows. Uses |phi|.
VortexRegime vortex_regime(double phi, double phi_S);

std::string_view to_string(VortexRegime regime);

/// Resonance field h f / (g mu_B) of a free spin.
double esr_field(double f, double g_factor, const PhysicalConstants& consts = kConstants);

struct CoilPoint {
    double current;  // A
    double field;    // T
};

struct CoilCalibration {
    double slope;         // T/A
    double intercept;     // T
    double slope_se;      // standard error; NaN with fewer than 3 points
    double intercept_se;
    double residual_std;  // sqrt(RSS / (n - 2)); NaN with fewer than 3 points
};

/// Ordinary least-squares line through (current, field) points.
CoilCalibration calibrate_coil(std::span<const CoilPoint> points);

}  // namespace vortexlab
