#include "vortexlab/core.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "vortexlab/errors.hpp"

namespace vortexlab {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

DeviceModel reference_device() {
    return DeviceModel{
        .w = 3e-6,
        .t = 24e-9,
        .length = 400e-6,
        .xi = 7e-9,
        .lambda_L = 4e-6,
        .f_r = 7.572e9,
        .Z_r = 3e3,
    };
}

void validate(const DeviceModel& d) {
    if (!positive_finite(d.w) || !positive_finite(d.t) || !positive_finite(d.length) ||
        !positive_finite(d.xi) || !positive_finite(d.lambda_L) || !positive_finite(d.f_r) ||
        !positive_finite(d.Z_r)) {
        throw InvalidDevice("device parameters must be positive and finite");
    }
    if (d.t >= d.lambda_L) {
        throw InvalidDevice("film thickness must be below lambda_L (Pearl limit)");
    }
    if (d.xi >= d.w) {
        throw InvalidDevice("coherence length must be below the strip width");
    }
}

DerivedScales derive_scales(const DeviceModel& device, const PhysicalConstants& c,
                            std::optional<double> eps0_override) {
    validate(device);
    const double Lambda = 2.0 * device.lambda_L * device.lambda_L / device.t;
    double eps0 = c.Phi0 * c.Phi0 / (2.0 * std::numbers::pi * c.mu0 * Lambda);
    if (eps0_override) {
        if (!positive_finite(*eps0_override)) {
            throw InvalidDevice("eps0 override must be positive and finite");
        }
        eps0 = *eps0_override;
    }
    const double phi_S =
        (2.0 / std::numbers::pi) * std::log(2.0 * device.w / (std::numbers::pi * device.xi));
    const double B_S = phi_S * c.Phi0 / (device.w * device.w);
    return DerivedScales{.Lambda = Lambda, .eps0 = eps0, .phi_S = phi_S, .B_S = B_S};
}

double flux_bias(double B, double w, const PhysicalConstants& c) {
    if (!std::isfinite(B) || !positive_finite(w)) {
        throw InvalidArgument("flux_bias: field must be finite and width positive");
    }
    return B * w * w / c.Phi0;
}

VortexRegime vortex_regime(double phi, double phi_S) {
    if (!positive_finite(phi_S) || !std::isfinite(phi)) {
        throw InvalidArgument("vortex_regime: phi_S must be positive");
    }
    const double a = std::abs(phi);
    if (a < phi_S) return VortexRegime::NoStableVortices;
    if (a <= kBucklingRatio * phi_S) return VortexRegime::SingleRow;
    return VortexRegime::TwoRow;
}

std::string_view to_string(VortexRegime regime) {
    switch (regime) {
        case VortexRegime::NoStableVortices: return "NoStableVortices";
        case VortexRegime::SingleRow: return "SingleRow";
        case VortexRegime::TwoRow: return "TwoRow";
    }
    return "unknown";
}

double esr_field(double f, double g_factor, const PhysicalConstants& c) {
    if (!(g_factor > 0.0) || !std::isfinite(g_factor)) {
        throw InvalidArgument("esr_field: g-factor must be positive");
    }
    if (!(f >= 0.0) || !std::isfinite(f)) {
        throw InvalidArgument("esr_field: frequency must be non-negative");
    }
    return c.h * f / (g_factor * c.mu_B);
}

CoilCalibration calibrate_coil(std::span<const CoilPoint> points) {
    const auto n = static_cast<double>(points.size());
    if (points.size() < 2) {
        throw DegenerateFit("calibrate_coil: need at least two points");
    }
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p.current;
        my += p.field;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& p : points) {
        sxx += (p.current - mx) * (p.current - mx);
        sxy += (p.current - mx) * (p.field - my);
    }
    if (!(sxx > 0.0)) {
        throw DegenerateFit("calibrate_coil: all currents are identical");
    }
    CoilCalibration out{};
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    if (points.size() < 3) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        out.slope_se = out.intercept_se = out.residual_std = nan;
        return out;
    }
    double rss = 0.0;
    for (const auto& p : points) {
        const double r = p.field - (out.intercept + out.slope * p.current);
        rss += r * r;
    }
    const double s2 = rss / (n - 2.0);
    out.residual_std = std::sqrt(s2);
    out.slope_se = std::sqrt(s2 / sxx);
    out.intercept_se = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    return out;
}

}  // namespace vortexlab
