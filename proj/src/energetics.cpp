#include "vortexlab/energetics.hpp"

#include <cmath>
#include <numbers>

#include "vortexlab/errors.hpp"

namespace vortexlab {

namespace {

constexpr double kPi = std::numbers::pi;

double self_energy(double x, const DerivedScales& s, const DeviceModel& d) {
    // distance to the nearer edge: exact zero at both edges, exact mirror symmetry
    const double edge = std::min(x, d.w - x);
    const double arg = (2.0 * d.w / (kPi * d.xi)) * std::sin(kPi * edge / d.w);
    return s.eps0 * std::log1p(std::max(arg, 0.0));
}

void check_well_domain(double x_bar, double delta_LR, const DeviceModel& d) {
    if (!std::isfinite(x_bar) || !std::isfinite(delta_LR) || delta_LR < 0.0) {
        throw DomainError("double well: need finite x_bar and delta_LR >= 0");
    }
    if (x_bar - 0.5 * delta_LR < 0.0 || x_bar + 0.5 * delta_LR > d.w) {
        throw DomainError("double well does not fit inside the strip");
    }
}

}  // namespace

void validate(const PinningSite& s, const DeviceModel& d) {
    if (!(s.V > 0.0) || !(s.sigma > 0.0) || !std::isfinite(s.V) || !std::isfinite(s.sigma) ||
        !std::isfinite(s.y)) {
        throw InvalidArgument("pinning site needs V > 0 and sigma > 0");
    }
    if (!(s.x > 0.0 && s.x < d.w)) {
        throw DomainError("pinning site must lie strictly inside the strip");
    }
}

double gibbs_single(double x, double B, double n, const DerivedScales& s, const DeviceModel& d,
                    const PhysicalConstants& c) {
    if (!(x >= 0.0 && x <= d.w)) throw DomainError("gibbs_single: x outside [0, w]");
    // 2 pi eps0 / Phi0 equals Phi0 / (mu0 Lambda) for the formula eps0 and
    // keeps the Meissner term consistent with an eps0 override
    const double meissner = 2.0 * kPi * s.eps0 / c.Phi0 * (B - n * c.Phi0) * x * (d.w - x);
    return self_energy(x, s, d) - meissner;
}

double total_potential(double x, double y, double B, double n, std::span<const PinningSite> sites,
                       const DerivedScales& s, const DeviceModel& d, const PhysicalConstants& c) {
    double v = gibbs_single(x, B, n, s, d, c);
    for (const auto& site : sites) {
        const double dx = x - site.x, dy = y - site.y;
        v -= site.V / (1.0 + (dx * dx + dy * dy) / (site.sigma * site.sigma));
    }
    return v;
}

double gamma_from_geometry(double delta_LR, double x_bar, const DerivedScales& s,
                           const DeviceModel& d, const PhysicalConstants& c) {
    check_well_domain(x_bar, delta_LR, d);
    return (2.0 * kPi / c.h) * (s.eps0 / c.Phi0) * std::abs(delta_LR * (2.0 * x_bar - d.w));
}

void validate(const DoubleWell& well, const DeviceModel& d) {
    if (!(well.delta_LR > 0.0)) throw InvalidArgument("double well needs delta_LR > 0");
    check_well_domain(well.x_bar, well.delta_LR, d);
    if (well.x_bar - 0.5 * well.delta_LR <= 0.0 || well.x_bar + 0.5 * well.delta_LR >= d.w) {
        throw DomainError("double well sites must lie strictly inside the strip");
    }
}

double well_offset(double x_bar, double delta_LR, const DerivedScales& s, const DeviceModel& d,
                   const PhysicalConstants&) {
    check_well_domain(x_bar, delta_LR, d);
    const double a = x_bar - 0.5 * delta_LR, b = x_bar + 0.5 * delta_LR;
    const double side = d.w - 2.0 * x_bar;
    const double sign = side > 0.0 ? 1.0 : (side < 0.0 ? -1.0 : 0.0);
    return -sign * (self_energy(a, s, d) - self_energy(b, s, d));
}

double well_asymmetry(double x_bar, double delta_LR, double B, const DerivedScales& s,
                      const DeviceModel& d, const PhysicalConstants& c) {
    const double C = well_offset(x_bar, delta_LR, s, d, c);
    const double gamma = gamma_from_geometry(delta_LR, x_bar, s, d, c);
    return std::abs(C - c.h * gamma * B);
}

double degeneracy_field(double x_bar, double delta_LR, const DerivedScales& s,
                        const DeviceModel& d, const PhysicalConstants& c) {
    const double gamma = gamma_from_geometry(delta_LR, x_bar, s, d, c);
    if (gamma == 0.0) throw DomainError("degeneracy_field: centred well has no field dependence");
    return well_offset(x_bar, delta_LR, s, d, c) / (c.h * gamma);
}

double aligned_depth(double V1, double x_bar, double delta_LR, double B0, const DerivedScales& s,
                     const DeviceModel& d, const PhysicalConstants& c) {
    return V1 + well_asymmetry(x_bar, delta_LR, B0, s, d, c);
}

std::array<PinningSite, 2> double_well_sites(const DoubleWell& well, double sigma, double y) {
    return {PinningSite{well.x_bar - 0.5 * well.delta_LR, y, well.V1, sigma},
            PinningSite{well.x_bar + 0.5 * well.delta_LR, y, well.V2, sigma}};
}

double gibbs_pair(const Eigen::Vector2d& r1, const Eigen::Vector2d& r2, const DerivedScales& s,
                  const DeviceModel& d) {
    if (!r1.allFinite() || !r2.allFinite()) throw InvalidArgument("gibbs_pair: non-finite position");
    if (!(r1.x() > 0.0 && r1.x() < d.w && r2.x() > 0.0 && r2.x() < d.w)) {
        throw DomainError("gibbs_pair: positions must lie strictly inside the strip");
    }
    if (r1 == r2) throw Divergence("gibbs_pair: coincident vortices");
    const double ch = std::cosh(kPi * (r1.y() - r2.y()) / d.w);
    const double num = ch - std::cos(kPi * (r1.x() + r2.x()) / d.w);
    const double den = ch - std::cos(kPi * (r1.x() - r2.x()) / d.w);
    if (std::isinf(ch)) return 0.0;
    return s.eps0 * std::log(num / den);
}

PairCoupling pair_coupling(const VortexPair& pair, const DerivedScales& s, const DeviceModel& d) {
    if (!(pair.delta_LR > 0.0)) throw InvalidArgument("pair_coupling: delta_LR must be positive");
    if (!((pair.R1 - pair.R2).norm() > 10.0 * pair.delta_LR)) {
        throw LinearizationInvalid("pair_coupling: separation must exceed 10 delta_LR");
    }
    const double h = kHessianStep * d.w;
    PairCoupling out;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const Eigen::Vector2d ea = Eigen::Vector2d::Unit(a) * h;
            const Eigen::Vector2d eb = Eigen::Vector2d::Unit(b) * h;
            const double pp = gibbs_pair(pair.R1 + ea, pair.R2 + eb, s, d);
            const double pm = gibbs_pair(pair.R1 + ea, pair.R2 - eb, s, d);
            const double mp = gibbs_pair(pair.R1 - ea, pair.R2 + eb, s, d);
            const double mm = gibbs_pair(pair.R1 - ea, pair.R2 - eb, s, d);
            out.hessian(a, b) = (pp - pm - mp + mm) / (4.0 * h * h);
        }
    }
    out.energy = pair.delta_LR * pair.delta_LR * pair.alpha.dot(out.hessian * pair.beta);
    out.energy_over_eps0 = out.energy / s.eps0;
    return out;
}

CouplingEstimateInput coupling_input(const DeviceModel& d, double y_zpf) {
    return CouplingEstimateInput{d.f_r, d.Z_r, d.w, d.t, d.lambda_L, y_zpf};
}

double coupling_estimate(const CouplingEstimateInput& in, const PhysicalConstants& c) {
    for (double v : {in.f_r, in.Z_r, in.w, in.t, in.lambda_L, in.y_zpf}) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw InvalidArgument("coupling_estimate: inputs must be positive");
        }
    }
    if (in.y_zpf < 0.1e-9 || in.y_zpf > 1e-6) {
        throw DomainError("coupling_estimate: y_zpf outside [0.1 nm, 1 um]");
    }
    return (1.0 / (in.w * in.t)) * (in.lambda_L * in.lambda_L / in.y_zpf) *
           (c.mu0 * c.e * c.e / c.m_e) * std::sqrt(c.R_K / (4.0 * kPi * in.Z_r));
}

}  // namespace vortexlab
