#include "vortexlab/rabi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vortexlab/errors.hpp"

namespace vortexlab {

namespace {

constexpr double kAngleTol = 1e-12;

bool near(double a, double b) { return std::abs(a - b) <= kAngleTol; }

// sin/cos with exact zeros at the admissible special angles, so that the
// pi/2 orientations produce real Hamiltonians.
double snapped(double v) { return std::abs(v) < kAngleTol ? 0.0 : v; }

}  // namespace

QrmParams reference_qrm(Orientation o) {
    return QrmParams{
        .f_r = 7.572e9,
        .g = 92.5e6,
        .gamma = 20e9 / 1e-3,
        .B0 = 128e-6,
        .f_q0 = 2e9,
        .theta = o.theta,
        .phi = o.phi,
    };
}

void validate(const QrmParams& p) {
    const bool finite = std::isfinite(p.f_r) && std::isfinite(p.g) && std::isfinite(p.gamma) &&
                        std::isfinite(p.B0) && std::isfinite(p.f_q0) &&
                        std::isfinite(p.theta) && std::isfinite(p.phi);
    if (!finite || !(p.f_r > 0.0) || !(p.g >= 0.0) || !(p.gamma > 0.0) || !(p.f_q0 >= 0.0)) {
        throw InvalidArgument("QRM parameters out of range (need f_r > 0, g >= 0, gamma > 0, f_q0 >= 0)");
    }
    const bool phi_zero = near(p.phi, 0.0);
    const bool special_theta = near(p.theta, 0.0) || near(p.theta, std::numbers::pi / 2);
    const bool phi_in_range = p.phi >= -kAngleTol && p.phi < std::numbers::pi - kAngleTol;
    if (!(phi_zero || (special_theta && phi_in_range))) {
        throw InvalidOrientation("inadmissible field orientation: need phi = 0, or theta in "
                                 "{0, pi/2} with phi in [0, pi)");
    }
}

void validate(const HilbertTruncation& trunc) {
    if (trunc.n_fock < 2) throw InvalidArgument("n_fock must be at least 2");
}

std::array<double, 3> effective_field(const QrmParams& p, double B) {
    if (!std::isfinite(B)) throw InvalidArgument("field must be finite");
    const double st = snapped(std::sin(p.theta)), ct = snapped(std::cos(p.theta));
    const double sp = snapped(std::sin(p.phi)), cp = snapped(std::cos(p.phi));
    const double bp = p.gamma * (B - p.B0);
    return {p.f_q0 * ct - bp * sp * st, bp * cp, p.f_q0 * st + bp * sp * ct};
}

double qubit_frequency(const QrmParams& p, double B) {
    return std::hypot(p.f_q0, p.gamma * (B - p.B0));
}

Eigen::MatrixXcd build_hamiltonian(const QrmParams& params, double B,
                                   const HilbertTruncation& trunc, const PhysicalConstants& c) {
    return (c.h * hamiltonian_hz<double>(params, B, trunc)).eval();
}

namespace {

template <typename Scalar>
struct Eigenpairs {
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
    ComplexMatrix<Scalar> vectors;
};

template <typename Scalar>
Eigenpairs<Scalar> diagonalize(const ComplexMatrix<Scalar>& H, bool real) {
    if (real) {
        using RealMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(H.real());
        if (es.info() != Eigen::Success) throw NumericalError("QRM eigensolver failed");
        return {es.eigenvalues(), es.eigenvectors().template cast<std::complex<Scalar>>()};
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(H);
    if (es.info() != Eigen::Success) throw NumericalError("QRM eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace

template <typename Scalar>
LabeledSpectrum solve_qrm_as(const QrmParams& params, double B, const HilbertTruncation& trunc,
                             const PhysicalConstants& consts) {
    using C = std::complex<Scalar>;
    const ComplexMatrix<Scalar> H = hamiltonian_hz<Scalar>(params, B, trunc);
    const auto b = effective_field(params, B);
    const bool real = b[1] == 0.0;
    const auto eig = diagonalize<Scalar>(H, real);

    // Bare spin eigenbasis: column 0 = g (lower), column 1 = e.
    Eigen::Matrix<C, 2, 2> spin;
    const Scalar half(0.5);
    spin << C(half * Scalar(b[2])), C(half * Scalar(b[0]), -half * Scalar(b[1])),
        C(half * Scalar(b[0]), half * Scalar(b[1])), C(-half * Scalar(b[2]));
    Eigen::Matrix<C, 2, 2> U = Eigen::Matrix<C, 2, 2>::Identity();
    if (b[0] != 0.0 || b[1] != 0.0 || b[2] != 0.0) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix<C, 2, 2>> es2(spin);
        U = es2.eigenvectors();
    } else {
        // degenerate spin: g = sigma_z down, e = sigma_z up
        U << C(0), C(1), C(1), C(0);
    }

    const int dim = trunc.dimension();
    const int nmax = trunc.n_fock;
    Eigen::MatrixXd overlaps(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int n = 0; n <= nmax; ++n) {
            for (int s = 0; s < 2; ++s) {
                const C amp = std::conj(U(0, s)) * eig.vectors(2 * n, i) +
                              std::conj(U(1, s)) * eig.vectors(2 * n + 1, i);
                overlaps(i, 2 * n + s) = static_cast<double>(std::norm(amp));
            }
        }
    }

    LabeledSpectrum out;
    out.B = B;
    out.energies.resize(dim);
    out.labels.resize(dim);
    std::vector<int> claimed(dim, -1);
    double min_win = 1.0;
    for (int i = 0; i < dim; ++i) {
        int best = 0;
        for (int j = 1; j < dim; ++j) {
            // strict comparison keeps the lower photon number on ties
            if (overlaps(i, j) > overlaps(i, best) + 1e-12) best = j;
        }
        if (claimed[best] >= 0) {
            throw AmbiguousLabeling("eigenstates " + std::to_string(claimed[best]) + " and " +
                                        std::to_string(i) + " both map to bare state (" +
                                        (best % 2 == 0 ? "g" : "e") + ", " +
                                        std::to_string(best / 2) + ")",
                                    overlaps);
        }
        claimed[best] = i;
        min_win = std::min(min_win, overlaps(i, best));
        out.energies[i] = consts.h * static_cast<double>(eig.values(i));
        out.labels[i] = BareLabel{best % 2 == 0 ? BareLabel::Branch::g : BareLabel::Branch::e,
                                  best / 2};
    }
    out.max_overlap_min = min_win;

    auto level = [&](int n, int s) { return eig.values(claimed[2 * n + s]); };
    out.f_q_dressed = static_cast<double>(level(0, 1) - level(0, 0));
    out.f_r_g = static_cast<double>(level(1, 0) - level(0, 0));
    out.f_r_e = static_cast<double>(level(1, 1) - level(0, 1));
    return out;
}

template LabeledSpectrum solve_qrm_as<double>(const QrmParams&, double, const HilbertTruncation&,
                                              const PhysicalConstants&);
template LabeledSpectrum solve_qrm_as<long double>(const QrmParams&, double,
                                                   const HilbertTruncation&,
                                                   const PhysicalConstants&);

ShiftResult dispersive_shift_converged(const QrmParams& params, double B,
                                       const HilbertTruncation& trunc, double tolerance) {
    HilbertTruncation t = trunc;
    double previous = solve_qrm(params, B, t).chi();
    while (2 * t.n_fock <= kMaxFock) {
        t.n_fock *= 2;
        const double next = solve_qrm(params, B, t).chi();
        if (std::abs(next - previous) < tolerance) return {next, t.n_fock};
        previous = next;
    }
    throw NumericalError("dispersive shift did not converge in the Fock truncation");
}

double transverse_coupling(const QrmParams& p, double B) {
    const auto b = effective_field(p, B);
    const double norm = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
    if (norm == 0.0) return p.g;
    const double nx = b[0] / norm;
    return p.g * std::sqrt(std::max(0.0, 1.0 - nx * nx));
}

double chi_perturbative(const QrmParams& p, double B) {
    validate(p);
    const double fq = qubit_frequency(p, B);
    const double detuning = fq - p.f_r;
    if (std::abs(detuning) <= 1e-12 * p.f_r) {
        throw Divergence("chi_perturbative: spin resonant with the resonator");
    }
    const double gp = transverse_coupling(p, B);
    return 2.0 * gp * gp * (1.0 / detuning + 1.0 / (fq + p.f_r));
}

std::vector<SweepPoint> sweep_field(const QrmParams& params, std::span<const double> B_list,
                                    const HilbertTruncation& trunc, unsigned workers) {
    if (B_list.empty()) throw InvalidArgument("sweep_field: empty field list");
    validate(params);
    validate(trunc);
    std::vector<SweepPoint> out(B_list.size());
    parallel_for(B_list.size(), workers, [&](std::size_t i) {
        out[i].B = B_list[i];
        try {
            out[i].spectrum = solve_qrm(params, B_list[i], trunc);
        } catch (const Error& err) {
            out[i].error = err.what();
        }
    });
    return out;
}

std::vector<ChiPoint> chi_sweep(const QrmParams& params, std::span<const double> B_list,
                                const HilbertTruncation& trunc, unsigned workers) {
    if (B_list.empty()) throw InvalidArgument("chi_sweep: empty field list");
    validate(params);
    validate(trunc);
    std::vector<ChiPoint> out(B_list.size());
    parallel_for(B_list.size(), workers, [&](std::size_t i) {
        ChiPoint& pt = out[i];
        pt.B = B_list[i];
        pt.f_q = qubit_frequency(params, pt.B);
        try {
            const auto shift = dispersive_shift_converged(params, pt.B, trunc);
            const auto spec = solve_qrm(params, pt.B, HilbertTruncation{shift.n_fock});
            pt.f_r_g = spec.f_r_g;
            pt.f_r_e = spec.f_r_e;
            pt.chi = spec.chi();
        } catch (const Error& err) {
            pt.error = err.what();
        }
    });
    return out;
}

}  // namespace vortexlab
