#include "vortexlab/tunneling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vortexlab/errors.hpp"
#include "vortexlab/lanczos.hpp"
#include "vortexlab/parallel.hpp"

namespace vortexlab {

namespace {

constexpr double kLanczosTolerance = 1e-12;
constexpr int kLanczosMaxSteps = 600;

// Smallest eigenvalue of the Dirichlet finite-difference -laplacian.
double laplacian_floor(const Grid& g) {
    double s = 0.0;
    for (int a = 0; a < g.dimension; ++a) {
        const double h = g.spacing(a);
        const double L = g.hi[a] - g.lo[a];
        const double sn = std::sin(std::numbers::pi * h / (2.0 * L));
        s += 4.0 / (h * h) * sn * sn;
    }
    return s;
}

void check_inputs(const Grid& grid, const Eigen::VectorXd& potential, const TunnelModel& model,
                  int k, const PhysicalConstants& c) {
    validate(grid);
    validate(model, c);
    if (potential.size() != grid.size()) {
        throw InvalidArgument("potential does not match the grid size");
    }
    if (!potential.allFinite()) throw InvalidArgument("potential must be finite");
    if (k < 1 || k > kMaxLevels || k > grid.size()) {
        throw InvalidArgument("number of levels must be in [1, 10]");
    }
}

// (H - offset) / scale; returns offset and scale through the arguments.
Eigen::SparseMatrix<double> scaled_hamiltonian(const Grid& g, const Eigen::VectorXd& potential,
                                               double kinetic, double& offset, double& scale) {
    offset = potential.minCoeff();
    scale = kinetic / (g.spacing(0) * g.spacing(0));
    const Eigen::Index n = g.size();
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(n) * (1 + 2 * g.dimension));
    const int ny = g.dimension == 2 ? g.points[1] : 1;
    std::array<double, 2> off{0.0, 0.0};
    double diag = 0.0;
    for (int a = 0; a < g.dimension; ++a) {
        off[a] = -kinetic / (g.spacing(a) * g.spacing(a)) / scale;
        diag -= 2.0 * off[a];
    }
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < g.points[0]; ++i) {
            const Eigen::Index r = g.index(i, j);
            entries.emplace_back(r, r, diag + (potential(r) - offset) / scale);
            if (i > 0) entries.emplace_back(r, g.index(i - 1, j), off[0]);
            if (i + 1 < g.points[0]) entries.emplace_back(r, g.index(i + 1, j), off[0]);
            if (g.dimension == 2) {
                if (j > 0) entries.emplace_back(r, g.index(i, j - 1), off[1]);
                if (j + 1 < ny) entries.emplace_back(r, g.index(i, j + 1), off[1]);
            }
        }
    }
    Eigen::SparseMatrix<double> H(n, n);
    H.setFromTriplets(entries.begin(), entries.end());
    return H;
}

EigenResult package(const Grid& g, const Eigen::SparseMatrix<double>& Hs, const Eigen::VectorXd& e,
                    const Eigen::MatrixXd& v, double offset, double scale, int k) {
    EigenResult out;
    std::vector<int> order(static_cast<std::size_t>(e.size()));
    for (int i = 0; i < e.size(); ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return e(a) < e(b); });
    out.wavefunctions.resize(g.size(), k);
    const double norm = 1.0 / std::sqrt(g.cell());
    for (int n = 0; n < k; ++n) {
        const int src = order[static_cast<std::size_t>(n)];
        Eigen::VectorXd psi = v.col(src).normalized();
        const double res = (Hs * psi - e(src) * psi).norm();
        out.residuals.push_back(res / std::max(std::abs(e(src)), 1e-300));
        out.energies.push_back(offset + scale * e(src));
        out.wavefunctions.col(n) = psi * norm;
    }
    return out;
}

}  // namespace

Grid Grid::line(double lo, double hi, int n) {
    Grid g;
    g.dimension = 1;
    g.lo = {lo, 0.0};
    g.hi = {hi, 1.0};
    g.points = {n, 1};
    validate(g);
    return g;
}

Grid Grid::plane(std::array<double, 2> lo, std::array<double, 2> hi, std::array<int, 2> n) {
    Grid g;
    g.dimension = 2;
    g.lo = lo;
    g.hi = hi;
    g.points = n;
    validate(g);
    return g;
}

void validate(const Grid& g) {
    if (g.dimension != 1 && g.dimension != 2) throw InvalidArgument("grid dimension must be 1 or 2");
    for (int a = 0; a < g.dimension; ++a) {
        if (g.points[a] < kMinGridPoints) {
            throw InvalidArgument("grid needs at least 64 points per axis");
        }
        if (!std::isfinite(g.lo[a]) || !std::isfinite(g.hi[a]) || !(g.hi[a] > g.lo[a])) {
            throw InvalidArgument("grid extent must be finite with hi > lo");
        }
    }
}

TunnelModel TunnelModel::from_site(const PinningSite& site, double y_zpf,
                                   const PhysicalConstants& c) {
    if (!(site.V > 0.0) || !(site.sigma > 0.0) || !(y_zpf > 0.0)) {
        throw InvalidArgument("from_site: need V, sigma, y_zpf > 0");
    }
    TunnelModel m;
    m.y_zpf = y_zpf;
    m.Omega = 4.0 * site.V * y_zpf * y_zpf / (site.sigma * site.sigma) / c.hbar;
    return m;
}

double TunnelModel::kinetic(const PhysicalConstants& c) const {
    return c.hbar * Omega * y_zpf * y_zpf;
}

void validate(const TunnelModel& m, const PhysicalConstants& c) {
    if (!(m.y_zpf > 0.0) || !std::isfinite(m.y_zpf)) throw InvalidArgument("y_zpf must be positive");
    if (!(m.Omega > 0.0) || !std::isfinite(m.Omega)) throw InvalidArgument("Omega must be positive");
    if (m.m_v) {
        if (!(*m.m_v > 0.0)) throw InvalidArgument("m_v must be positive");
        const double y = std::sqrt(c.hbar / (2.0 * *m.m_v * m.Omega));
        if (std::abs(y / m.y_zpf - 1.0) > 1e-6) {
            throw InvalidArgument("m_v, Omega and y_zpf are inconsistent");
        }
    }
}

Eigen::SparseMatrix<double> finite_difference_hamiltonian(const Grid& grid,
                                                          const Eigen::VectorXd& potential,
                                                          const TunnelModel& model,
                                                          const PhysicalConstants& c) {
    check_inputs(grid, potential, model, 1, c);
    double offset = 0.0, scale = 1.0;
    Eigen::SparseMatrix<double> H = scaled_hamiltonian(grid, potential, model.kinetic(c), offset, scale);
    H *= scale;
    for (Eigen::Index i = 0; i < H.rows(); ++i) H.coeffRef(i, i) += offset;
    return H;
}

EigenResult solve_schrodinger(const Grid& grid, const Eigen::VectorXd& potential,
                              const TunnelModel& model, int k, const PhysicalConstants& c) {
    check_inputs(grid, potential, model, k, c);
    double offset = 0.0, scale = 1.0;
    const double kinetic = model.kinetic(c);
    const Eigen::SparseMatrix<double> Hs = scaled_hamiltonian(grid, potential, kinetic, offset, scale);

    // Hs >= kinetic * floor / scale, so this shift leaves Hs - shift positive definite.
    const double shift = -0.5 * kinetic * laplacian_floor(grid) / scale;
    Eigen::SparseMatrix<double> A = Hs;
    for (Eigen::Index i = 0; i < A.rows(); ++i) A.coeffRef(i, i) -= shift;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw NumericalError("shifted Hamiltonian factorization failed");

    const Eigen::Index n = grid.size();
    Eigen::VectorXd start(n);
    for (Eigen::Index i = 0; i < n; ++i) start(i) = 1.0 + 0.5 * std::sin(0.37 * static_cast<double>(i) + 0.1);
    const auto apply = [&ldlt](const Eigen::VectorXd& x) -> Eigen::VectorXd { return ldlt.solve(x); };
    const auto lz = lanczos_largest<double>(apply, n, k, start, kLanczosTolerance, kLanczosMaxSteps);

    Eigen::VectorXd e(k);
    for (int j = 0; j < k; ++j) e(j) = shift + 1.0 / lz.values(j);
    return package(grid, Hs, e, lz.vectors, offset, scale, k);
}

EigenResult solve_schrodinger_dense(const Grid& grid, const Eigen::VectorXd& potential,
                                    const TunnelModel& model, int k, const PhysicalConstants& c) {
    check_inputs(grid, potential, model, k, c);
    double offset = 0.0, scale = 1.0;
    const Eigen::SparseMatrix<double> Hs =
        scaled_hamiltonian(grid, potential, model.kinetic(c), offset, scale);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(Hs)};
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolver failed");
    return package(grid, Hs, es.eigenvalues().head(k), es.eigenvectors().leftCols(k), offset, scale, k);
}

Eigen::VectorXd sample_potential(const Grid& grid, std::span<const PinningSite> sites, double B,
                                 const DerivedScales& scales, const DeviceModel& device,
                                 const PhysicalConstants& c) {
    validate(grid);
    Eigen::VectorXd v(grid.size());
    const double y0 = sites.empty() ? 0.0 : sites.front().y;
    const int ny = grid.dimension == 2 ? grid.points[1] : 1;
    for (int j = 0; j < ny; ++j) {
        const double y = grid.dimension == 2 ? grid.coordinate(1, j) : y0;
        for (int i = 0; i < grid.points[0]; ++i) {
            v(grid.index(i, j)) =
                total_potential(grid.coordinate(0, i), y, B, 0.0, sites, scales, device, c);
        }
    }
    return v;
}

std::array<double, 2> site_window(std::span<const PinningSite> sites, double margin) {
    if (sites.empty()) throw InvalidArgument("site_window: no sites");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& s : sites) {
        lo = std::min(lo, s.x - margin * s.sigma);
        hi = std::max(hi, s.x + margin * s.sigma);
    }
    return {lo, hi};
}

TunnelCurve spectrum_vs_field(std::span<const PinningSite> sites, std::array<double, 2> x_window,
                              std::span<const double> B_list, const TunnelModel& model,
                              const DerivedScales& scales, const DeviceModel& device,
                              int grid_points, unsigned workers, const PhysicalConstants& c) {
    if (sites.size() < 2) throw InvalidArgument("spectrum_vs_field: need a double well (>= 2 sites)");
    if (B_list.empty()) throw InvalidArgument("spectrum_vs_field: empty field list");
    for (const auto& s : sites) validate(s, device);
    const auto need = site_window(sites);
    if (x_window[0] > need[0] || x_window[1] < need[1]) {
        throw InvalidArgument("x window must cover every pinning site by 5 sigma");
    }
    if (x_window[0] < 0.0 || x_window[1] > device.w) {
        throw DomainError("x window must lie inside the strip");
    }
    const Grid grid = Grid::line(x_window[0], x_window[1], grid_points);
    validate(model, c);

    TunnelCurve out;
    out.points.resize(B_list.size());
    parallel_for(B_list.size(), workers, [&](std::size_t i) {
        TunnelPoint& p = out.points[i];
        p.B = B_list[i];
        try {
            const Eigen::VectorXd V = sample_potential(grid, sites, p.B, scales, device, c);
            const EigenResult r = solve_schrodinger(grid, V, model, 2, c);
            p.E0 = r.energies[0];
            p.E1 = r.energies[1];
            p.omega_q = (p.E1 - p.E0) / c.hbar;
            p.f_q = (p.E1 - p.E0) / c.h;
        } catch (const Error& err) {
            p.error = err.what();
        }
    });
    for (const auto& p : out.points) {
        if (p.error) continue;
        if (!out.sweet_spot) {
            out.sweet_spot = p.B;
            continue;
        }
        const auto best = std::find_if(out.points.begin(), out.points.end(),
                                       [&](const TunnelPoint& q) { return q.B == *out.sweet_spot; });
        if (p.omega_q < best->omega_q) out.sweet_spot = p.B;
    }
    return out;
}

AsymmetryModel well_detuning(const DoubleWell& well, const DerivedScales& scales,
                             const DeviceModel& device, const PhysicalConstants& c) {
    validate(well, device);
    return [well, scales, device, c](double B) {
        const double xl = well.x_bar - 0.5 * well.delta_LR, xr = well.x_bar + 0.5 * well.delta_LR;
        return (gibbs_single(xl, B, 0.0, scales, device, c) - well.V1) -
               (gibbs_single(xr, B, 0.0, scales, device, c) - well.V2);
    };
}

double TwoLevelModel::splitting(double B) const {
    const double e = epsilon ? epsilon(B) : 0.0;
    return std::sqrt(4.0 * Delta * Delta + e * e);
}

TwoLevelModel two_level_reduction(const EigenResult& degenerate, const EigenResult& other,
                                  AsymmetryModel epsilon) {
    if (degenerate.energies.size() < 3) {
        throw ReductionInvalid("two-level reduction needs three levels at the degeneracy field");
    }
    const auto& e = degenerate.energies;
    const double split = e[1] - e[0];
    if (!(split > 0.0)) throw ReductionInvalid("degenerate ground doublet has no splitting");
    if (e[2] - e[1] < 3.0 * split) {
        throw ReductionInvalid("third level closer than three splittings to the qubit doublet");
    }
    if (other.energies.size() < 2) throw ReductionInvalid("second solve has fewer than two levels");
    if (other.energies[1] - other.energies[0] < (1.0 - 1e-6) * split) {
        throw ReductionInvalid("splitting away from the degeneracy field is below 2 Delta");
    }
    return TwoLevelModel{0.5 * split, std::move(epsilon)};
}

}  // namespace vortexlab
