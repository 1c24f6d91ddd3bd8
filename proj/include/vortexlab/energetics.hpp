#pragma once

#include <array>
#include <span>

#include <Eigen/Dense>

#include "vortexlab/constants.hpp"
#include "vortexlab/core.hpp"

namespace vortexlab {

/// Lorentzian pinning centre: depth V (J), width sigma (m), position in the
/// strip (x across the width, y along the length).
struct PinningSite {
    double x = 0.0;
    double y = 0.0;
    double V = 0.0;
    double sigma = 0.0;
};

void validate(const PinningSite& site, const DeviceModel& device);

/// Single-vortex Gibbs energy across the strip,
///   eps0 ln((2w / pi xi) sin(pi x / w) + 1) - 2 pi eps0 (B - n Phi0)/Phi0 x (w - x).
/// n is the areal density of the other vortices. Throws DomainError outside
/// [0, w].
double gibbs_single(double x, double B, double n, const DerivedScales& scales,
                    const DeviceModel& device, const PhysicalConstants& consts = kConstants);

/// gibbs_single minus the Lorentzian wells of every site.
double total_potential(double x, double y, double B, double n, std::span<const PinningSite> sites,
                       const DerivedScales& scales, const DeviceModel& device,
                       const PhysicalConstants& consts = kConstants);

/// gamma (Hz/T) = (2 pi / h) (eps0 / Phi0) |delta_LR (2 x_bar - w)|.
double gamma_from_geometry(double delta_LR, double x_bar, const DerivedScales& scales,
                           const DeviceModel& device, const PhysicalConstants& consts = kConstants);

/// Two wells at x_bar -/+ delta_LR / 2 (left has depth V1).
struct DoubleWell {
    double x_bar = 0.0;
    double delta_LR = 0.0;
    double V1 = 0.0;
    double V2 = 0.0;
    double Delta = 0.0;  // tunneling amplitude, J; filled in by the tunneling module
};

void validate(const DoubleWell& well, const DeviceModel& device);

/// Field-independent part C of the Gibbs difference between the two well
/// positions, signed so that Delta G(B) = |C - h gamma B|.
double well_offset(double x_bar, double delta_LR, const DerivedScales& scales,
                   const DeviceModel& device, const PhysicalConstants& consts = kConstants);

/// Delta G = |G1(x_bar - delta/2, B) - G1(x_bar + delta/2, B)| = |C - h gamma B|.
double well_asymmetry(double x_bar, double delta_LR, double B, const DerivedScales& scales,
                      const DeviceModel& device, const PhysicalConstants& consts = kConstants);

/// Field C / (h gamma) where the bare Gibbs energies of the two well
/// positions coincide. DomainError when gamma = 0.
double degeneracy_field(double x_bar, double delta_LR, const DerivedScales& scales,
                        const DeviceModel& device, const PhysicalConstants& consts = kConstants);

/// Depth V2 = V1 + Delta G(B0) that moves the degeneracy of the pinned
/// double well to B0.
double aligned_depth(double V1, double x_bar, double delta_LR, double B0,
                     const DerivedScales& scales, const DeviceModel& device,
                     const PhysicalConstants& consts = kConstants);

/// The two sites of a double well, both of width sigma, at height y.
std::array<PinningSite, 2> double_well_sites(const DoubleWell& well, double sigma, double y = 0.0);

/// Interaction energy of two vortices in the strip. Divergence when r1 == r2.
double gibbs_pair(const Eigen::Vector2d& r1, const Eigen::Vector2d& r2,
                  const DerivedScales& scales, const DeviceModel& device);

struct VortexPair {
    Eigen::Vector2d R1 = Eigen::Vector2d::Zero();
    Eigen::Vector2d R2 = Eigen::Vector2d::Zero();
    double delta_LR = 0.0;
    Eigen::Vector2d alpha = Eigen::Vector2d::Ones();
    Eigen::Vector2d beta = Eigen::Vector2d::Ones();
};

struct PairCoupling {
    Eigen::Matrix2d hessian;  // d^2 G2 / dR1_a dR2_b, J/m^2
    double energy = 0.0;      // delta_LR^2 alpha^T H beta, J
    double energy_over_eps0 = 0.0;
};

inline constexpr double kHessianStep = 1e-4;  // in units of w

/// Central-difference mixed Hessian of gibbs_pair at (R1, R2). Throws
/// LinearizationInvalid when |R1 - R2| <= 10 delta_LR.
PairCoupling pair_coupling(const VortexPair& pair, const DerivedScales& scales,
                           const DeviceModel& device);

struct CouplingEstimateInput {
    double f_r = 0.0;
    double Z_r = 0.0;
    double w = 0.0;
    double t = 0.0;
    double lambda_L = 0.0;
    double y_zpf = 0.0;
};

CouplingEstimateInput coupling_input(const DeviceModel& device, double y_zpf);

/// Vortex-resonator coupling relative to the resonator frequency,
///   (1 / w t) (lambda_L^2 / y_zpf) (mu0 e^2 / m_e) sqrt(R_K / (4 pi Z_r)).
/// y_zpf must lie in [0.1 nm, 1 um].
double coupling_estimate(const CouplingEstimateInput& input,
                         const PhysicalConstants& consts = kConstants);

}  // namespace vortexlab
