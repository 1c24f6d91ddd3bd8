#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "vortexlab/constants.hpp"
#include "vortexlab/core.hpp"
#include "vortexlab/energetics.hpp"

namespace vortexlab {

/// Uniform grid of interior points for Dirichlet boundaries: the wave
/// function vanishes at lo and hi, and axis a holds points[a] samples at
/// lo + (i + 1) h.
struct Grid {
    int dimension = 1;
    std::array<double, 2> lo{0.0, 0.0};
    std::array<double, 2> hi{0.0, 0.0};
    std::array<int, 2> points{0, 1};

    static Grid line(double lo, double hi, int n);
    static Grid plane(std::array<double, 2> lo, std::array<double, 2> hi, std::array<int, 2> n);

    double spacing(int axis) const { return (hi[axis] - lo[axis]) / (points[axis] + 1); }
    double coordinate(int axis, int i) const { return lo[axis] + (i + 1) * spacing(axis); }
    Eigen::Index size() const {
        return static_cast<Eigen::Index>(points[0]) * (dimension == 2 ? points[1] : 1);
    }
    /// Volume element of the grid inner product.
    double cell() const { return spacing(0) * (dimension == 2 ? spacing(1) : 1.0); }
    /// Flat index of (i, j); x varies fastest.
    Eigen::Index index(int i, int j = 0) const {
        return static_cast<Eigen::Index>(j) * points[0] + i;
    }
};

inline constexpr int kMinGridPoints = 64;

void validate(const Grid& grid);

/// Kinetic scale of the vortex. The Hamiltonian is
///   hbar Omega (-y_zpf^2 laplacian) + V.
struct TunnelModel {
    double y_zpf = 0.0;  // m
    double Omega = 0.0;  // rad/s
    std::optional<double> m_v;  // kg; must satisfy y_zpf = sqrt(hbar / (2 m_v Omega))

    /// Omega from the curvature of a Lorentzian well of depth V and width
    /// sigma, hbar Omega = 4 V y_zpf^2 / sigma^2.
    static TunnelModel from_site(const PinningSite& site, double y_zpf,
                                 const PhysicalConstants& consts = kConstants);

    /// hbar Omega y_zpf^2 = hbar^2 / (2 m_v), in J m^2.
    double kinetic(const PhysicalConstants& consts = kConstants) const;
};

void validate(const TunnelModel& model, const PhysicalConstants& consts = kConstants);

struct EigenResult {
    std::vector<double> energies;        // J, ascending
    Eigen::MatrixXd wavefunctions;       // column n, normalized with grid.cell()
    double B = 0.0;
    std::vector<double> residuals;       // ||H psi - E psi|| / |E| per level
};

inline constexpr int kMaxLevels = 10;

/// Lowest k eigenpairs of the finite-difference Hamiltonian on `grid`
/// (second-order Laplacian, Dirichlet boundaries) by shift-invert Lanczos.
/// `potential` is sampled at the grid points (J).
EigenResult solve_schrodinger(const Grid& grid, const Eigen::VectorXd& potential,
                              const TunnelModel& model, int k,
                              const PhysicalConstants& consts = kConstants);

/// Same problem by dense diagonalization; for grids up to a few thousand
/// points.
EigenResult solve_schrodinger_dense(const Grid& grid, const Eigen::VectorXd& potential,
                                    const TunnelModel& model, int k,
                                    const PhysicalConstants& consts = kConstants);

/// Sparse finite-difference Hamiltonian in J.
Eigen::SparseMatrix<double> finite_difference_hamiltonian(const Grid& grid,
                                                          const Eigen::VectorXd& potential,
                                                          const TunnelModel& model,
                                                          const PhysicalConstants& consts = kConstants);

/// total_potential sampled along x at the height of the first site.
Eigen::VectorXd sample_potential(const Grid& grid, std::span<const PinningSite> sites, double B,
                                 const DerivedScales& scales, const DeviceModel& device,
                                 const PhysicalConstants& consts = kConstants);

/// Smallest window [lo, hi] that covers every site by `margin` sigma.
std::array<double, 2> site_window(std::span<const PinningSite> sites, double margin = 5.0);

struct TunnelPoint {
    double B = 0.0;
    double omega_q = 0.0;  // rad/s
    double f_q = 0.0;      // Hz
    double E0 = 0.0, E1 = 0.0;  // J
    std::optional<std::string> error;
};

struct TunnelCurve {
    std::vector<TunnelPoint> points;
    std::optional<double> sweet_spot;  // field of the smallest omega_q
};

/// 1D spectrum of a pinned vortex versus field, solved on `grid_points`
/// points across x_window. The window must cover every site by 5 sigma and
/// stay inside the strip.
TunnelCurve spectrum_vs_field(std::span<const PinningSite> sites, std::array<double, 2> x_window,
                              std::span<const double> B_list, const TunnelModel& model,
                              const DerivedScales& scales, const DeviceModel& device,
                              int grid_points = 1024, unsigned workers = 1,
                              const PhysicalConstants& consts = kConstants);

/// Signed energy difference eps(B) between the left and right well bottoms.
using AsymmetryModel = std::function<double(double B)>;

/// eps(B) = (G1(x_L, B) - V1) - (G1(x_R, B) - V2); its magnitude equals
/// well_asymmetry when V1 == V2.
AsymmetryModel well_detuning(const DoubleWell& well, const DerivedScales& scales,
                             const DeviceModel& device, const PhysicalConstants& consts = kConstants);

struct TwoLevelModel {
    double Delta = 0.0;  // J
    AsymmetryModel epsilon;

    /// sqrt(4 Delta^2 + eps(B)^2), J.
    double splitting(double B) const;
};

/// Delta is half the splitting of `degenerate` (the solve at the degeneracy
/// field). Throws ReductionInvalid when E2 - E1 < 3 (E1 - E0) there, or when
/// `other` (a solve at a second field) has fewer than two levels or a
/// splitting below 2 Delta.
TwoLevelModel two_level_reduction(const EigenResult& degenerate, const EigenResult& other,
                                  AsymmetryModel epsilon);

}  // namespace vortexlab
