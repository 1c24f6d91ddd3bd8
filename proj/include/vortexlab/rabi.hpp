#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vortexlab/constants.hpp"
#include "vortexlab/parallel.hpp"

namespace vortexlab {

/// Resonator + pseudo-spin model parameters. Frequencies in Hz, gamma in
/// Hz/T, fields in T, angles in rad.
///
/// The spin sees the effective field
///   b(B) = f_q0 (cos theta, 0, sin theta)
///        + gamma (B - B0) (-sin phi sin theta, cos phi, sin phi cos theta)
/// (in frequency units), and couples to the resonator through
/// h g (a + a^dag) sigma_x.
struct QrmParams {
    double f_r = 0.0;
    double g = 0.0;
    double gamma = 0.0;
    double B0 = 0.0;
    double f_q0 = 0.0;
    double theta = std::numbers::pi / 2;
    double phi = std::numbers::pi / 2;
};

struct Orientation {
    double theta;
    double phi;
};

/// Applied field along the coupling axis: h f_q0/2 sigma_z - h gamma B'/2 sigma_x.
inline constexpr Orientation kAsymmetric{std::numbers::pi / 2, std::numbers::pi / 2};
/// Both fields transverse to the coupling axis; unitarily equivalent to a
/// single sigma_z term of magnitude sqrt(f_q0^2 + (gamma B')^2).
inline constexpr Orientation kSymmetric{std::numbers::pi / 2, 0.0};

/// f_r = 7.572 GHz, g = 92.5 MHz, gamma = 20 GHz/mT, B0 = 128 uT,
/// f_q0 = 2 GHz, in the requested orientation.
QrmParams reference_qrm(Orientation orientation = kAsymmetric);

inline QrmParams with_orientation(QrmParams p, Orientation o) {
    p.theta = o.theta;
    p.phi = o.phi;
    return p;
}

struct HilbertTruncation {
    int n_fock = 60;
    int dimension() const { return 2 * (n_fock + 1); }
};

/// Throws InvalidArgument for out-of-range values and InvalidOrientation
/// when (theta, phi) is not one of phi = 0, or theta in {0, pi/2} with
/// phi in [0, pi).
void validate(const QrmParams& params);
void validate(const HilbertTruncation& trunc);

/// Effective spin field in frequency units (Hz) at applied field B, with
/// components that vanish analytically snapped to exact zeros.
std::array<double, 3> effective_field(const QrmParams& params, double B);

/// Bare pseudo-spin splitting |b(B)| = sqrt(f_q0^2 + (gamma (B - B0))^2).
double qubit_frequency(const QrmParams& params, double B);

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

/// H / h in Hz on the basis |n> (x) |s>, index 2 n + s, s = 0 for the
/// sigma_z = +1 state.
template <typename Scalar>
ComplexMatrix<Scalar> hamiltonian_hz(const QrmParams& params, double B,
                                     const HilbertTruncation& trunc) {
    validate(params);
    validate(trunc);
    using C = std::complex<Scalar>;
    const auto b = effective_field(params, B);
    const int dim = trunc.dimension();
    ComplexMatrix<Scalar> H = ComplexMatrix<Scalar>::Zero(dim, dim);
    const Scalar half(0.5);
    const Scalar fr(params.f_r), g(params.g);
    const Scalar bx(b[0]), by(b[1]), bz(b[2]);
    for (int n = 0; n <= trunc.n_fock; ++n) {
        const int up = 2 * n, dn = 2 * n + 1;
        const Scalar osc = fr * (Scalar(n) + half);
        H(up, up) = C(osc + half * bz);
        H(dn, dn) = C(osc - half * bz);
        // sigma_x and sigma_y within the spin block
        H(up, dn) = C(half * bx, -half * by);
        H(dn, up) = C(half * bx, half * by);
        if (n < trunc.n_fock) {
            const Scalar amp = g * std::sqrt(Scalar(n + 1));
            // (a + a^dag) sigma_x couples |n, s> with |n+1, 1-s>
            H(up, 2 * (n + 1) + 1) = C(amp);
            H(dn, 2 * (n + 1)) = C(amp);
            H(2 * (n + 1) + 1, up) = C(amp);
            H(2 * (n + 1), dn) = C(amp);
        }
    }
    return H;
}

/// Full Hamiltonian in joules.
Eigen::MatrixXcd build_hamiltonian(const QrmParams& params, double B,
                                   const HilbertTruncation& trunc,
                                   const PhysicalConstants& consts = kConstants);

struct BareLabel {
    enum class Branch { g, e };
    Branch branch;
    int photons;
    bool operator==(const BareLabel&) const = default;
};

struct LabeledSpectrum {
    double B = 0.0;
    std::vector<double> energies;   // ascending, J
    std::vector<BareLabel> labels;  // labels[i] belongs to energies[i]
    double f_q_dressed = 0.0;       // |e,0> - |g,0>, Hz
    double f_r_g = 0.0;             // |g,1> - |g,0>, Hz
    double f_r_e = 0.0;             // |e,1> - |e,0>, Hz
    double max_overlap_min = 0.0;   // smallest winning |overlap|^2
    double chi() const { return f_r_e - f_r_g; }
};

/// Diagonalizes the Hamiltonian in Scalar precision and labels each
/// eigenstate by its largest overlap with the bare states |n> (x) |g/e>,
/// where g/e diagonalize the uncoupled spin term. Ties go to the lower
/// photon number. Throws AmbiguousLabeling if the assignment is not a
/// bijection.
template <typename Scalar>
LabeledSpectrum solve_qrm_as(const QrmParams& params, double B, const HilbertTruncation& trunc,
                             const PhysicalConstants& consts = kConstants);

extern template LabeledSpectrum solve_qrm_as<double>(const QrmParams&, double,
                                                     const HilbertTruncation&,
                                                     const PhysicalConstants&);
extern template LabeledSpectrum solve_qrm_as<long double>(const QrmParams&, double,
                                                          const HilbertTruncation&,
                                                          const PhysicalConstants&);

inline LabeledSpectrum solve_qrm(const QrmParams& params, double B,
                                 const HilbertTruncation& trunc = {},
                                 const PhysicalConstants& consts = kConstants) {
    return solve_qrm_as<double>(params, B, trunc, consts);
}

struct ShiftResult {
    double chi;      // Hz
    int n_fock;      // truncation the value was taken at
};

inline constexpr double kChiConvergence = 1e3;  // Hz
inline constexpr int kMaxFock = 480;

/// chi = f_r_e - f_r_g, doubling n_fock from trunc.n_fock until two
/// successive values agree within `tolerance`. Throws NumericalError if
/// kMaxFock is reached first.
ShiftResult dispersive_shift_converged(const QrmParams& params, double B,
                                       const HilbertTruncation& trunc = {},
                                       double tolerance = kChiConvergence);

inline double dispersive_shift(const QrmParams& params, double B,
                               const HilbertTruncation& trunc = {}) {
    return dispersive_shift_converged(params, B, trunc).chi;
}

/// Transverse part of the coupling, g sqrt(1 - n_x^2) with n the unit
/// effective-field direction. Equals g whenever b is perpendicular to x.
double transverse_coupling(const QrmParams& params, double B);

/// Second-order shift of the resonator transition between the two spin
/// states, 2 g_perp^2 (1/(f_q - f_r) + 1/(f_q + f_r)). The longitudinal
/// part of the coupling does not contribute at this order. Throws
/// Divergence at f_q = f_r.
double chi_perturbative(const QrmParams& params, double B);

struct SweepPoint {
    double B = 0.0;
    std::optional<LabeledSpectrum> spectrum;
    std::string error;  // set when spectrum is empty
};

/// Independent solve_qrm at every field; failures are recorded per point.
std::vector<SweepPoint> sweep_field(const QrmParams& params, std::span<const double> B_list,
                                    const HilbertTruncation& trunc = {},
                                    unsigned workers = 1);

struct ChiPoint {
    double B = 0.0;
    double f_q = 0.0;                 // bare spin splitting
    std::optional<double> f_r_g;      // converged truncation
    std::optional<double> f_r_e;
    std::optional<double> chi;
    std::string error;
};

/// Converged dispersive shift over a field list; labeling failures near
/// resonance are left as gaps.
std::vector<ChiPoint> chi_sweep(const QrmParams& params, std::span<const double> B_list,
                                const HilbertTruncation& trunc = {}, unsigned workers = 1);

}  // namespace vortexlab
