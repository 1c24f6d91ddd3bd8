#include "vortexlab/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vortexlab/errors.hpp"

namespace vortexlab {

std::size_t FitResult::index(std::string_view name) const {
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InvalidArgument("unknown fit parameter: " + std::string(name));
    return static_cast<std::size_t>(it - names.begin());
}

Eigen::MatrixXd numeric_jacobian(const ResidualFunction& residuals, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& r0, const LeastSquaresOptions& options) {
    Eigen::MatrixXd J(r0.size(), x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double h =
            std::max(options.jacobian_relative_step * std::abs(x(j)), options.jacobian_absolute_step);
        xp(j) = x(j) + h;
        const double step = xp(j) - x(j);  // exactly representable step
        const Eigen::VectorXd rp = residuals(xp);
        J.col(j) = rp.allFinite() ? Eigen::VectorXd((rp - r0) / step)
                                  : Eigen::VectorXd::Zero(r0.size());
        xp(j) = x(j);
    }
    return J;
}

namespace {

void fill_covariance(FitResult& out, const Eigen::MatrixXd& J, double rss,
                     const LeastSquaresOptions& options) {
    const Eigen::Index m = J.rows(), p = J.cols();
    const double inf = std::numeric_limits<double>::infinity();
    out.std_errors = Eigen::VectorXd::Constant(p, inf);
    out.unidentifiable.assign(static_cast<std::size_t>(p), true);
    out.covariance = Eigen::MatrixXd::Constant(p, p, inf);
    if (m == 0 || p == 0 || !J.allFinite()) return;

    Eigen::VectorXd scale(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        const double n = J.col(j).norm();
        scale(j) = n > 0.0 ? n : 1.0;
    }
    const Eigen::MatrixXd Js = J * scale.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Js, Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    const Eigen::MatrixXd& V = svd.matrixV();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    const double cutoff = 1e-10 * smax;

    Eigen::VectorXd null_weight = Eigen::VectorXd::Zero(p);
    Eigen::MatrixXd cov_s = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index k = 0; k < p; ++k) {
        const double sk = k < s.size() ? s(k) : 0.0;
        if (sk <= cutoff || sk == 0.0) {
            null_weight += V.col(k).cwiseAbs2();
        } else {
            cov_s += V.col(k) * V.col(k).transpose() / (sk * sk);
        }
    }
    double s2 = 1.0;
    if (options.scale_covariance) {
        s2 = rss / static_cast<double>(std::max<Eigen::Index>(1, m - p));
    }
    const Eigen::MatrixXd cov = s2 * scale.cwiseInverse().asDiagonal() * cov_s *
                                scale.cwiseInverse().asDiagonal();
    out.covariance = cov;
    for (Eigen::Index j = 0; j < p; ++j) {
        const bool zero_column = J.col(j).norm() == 0.0;
        const bool degenerate = zero_column || null_weight(j) > 1e-6;
        out.unidentifiable[static_cast<std::size_t>(j)] = degenerate;
        out.std_errors(j) = degenerate ? inf : std::sqrt(std::max(0.0, cov(j, j)));
        if (degenerate) {
            out.covariance.row(j).setConstant(inf);
            out.covariance.col(j).setConstant(inf);
        }
    }
}

}  // namespace

FitResult least_squares(const ResidualFunction& residuals, std::vector<std::string> names,
                        const Eigen::VectorXd& init, const LeastSquaresOptions& options) {
    if (static_cast<Eigen::Index>(names.size()) != init.size()) {
        throw InvalidArgument("least_squares: names and init differ in length");
    }
    if (!init.allFinite()) throw InvalidArgument("least_squares: non-finite initial parameters");

    FitResult out;
    out.names = std::move(names);
    Eigen::VectorXd x = init;
    Eigen::VectorXd r = residuals(x);
    if (!r.allFinite()) throw InvalidArgument("least_squares: residual not finite at init");
    const Eigen::Index p = x.size();
    double cost = r.squaredNorm();
    double lambda = options.initial_damping;
    double nu = 2.0;
    Eigen::MatrixXd J;
    bool have_jacobian = false;

    int it = 0;
    while (it < options.max_iterations) {
        if (!have_jacobian) {
            J = numeric_jacobian(residuals, x, r, options);
            have_jacobian = true;
        }
        ++it;
        const double rnorm = std::sqrt(cost);
        if (rnorm == 0.0) {
            out.converged = true;
            out.message = "zero residual";
            break;
        }
        Eigen::VectorXd colnorm(p);
        double max_cos = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            colnorm(j) = J.col(j).norm();
            if (colnorm(j) > 0.0) {
                max_cos = std::max(max_cos, std::abs(J.col(j).dot(r)) / (colnorm(j) * rnorm));
            }
        }
        if (max_cos <= options.gradient_tolerance) {
            out.converged = true;
            out.message = "gradient tolerance reached";
            break;
        }
        Eigen::VectorXd D = colnorm;
        for (Eigen::Index j = 0; j < p; ++j) {
            if (!(D(j) > 0.0)) D(j) = 1.0;
        }

        // Damped step from the augmented system [J; sqrt(lambda) D] dx = [-r; 0].
        Eigen::MatrixXd A(J.rows() + p, p);
        A.topRows(J.rows()) = J;
        A.bottomRows(p) = (std::sqrt(lambda) * D).asDiagonal();
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(J.rows() + p);
        rhs.head(J.rows()) = -r;
        const Eigen::VectorXd dx = A.colPivHouseholderQr().solve(rhs);

        if (!dx.allFinite()) {
            out.message = "singular damped system";
            break;
        }
        if (dx.norm() <= options.step_tolerance * (x.norm() + options.step_tolerance)) {
            out.converged = true;
            out.message = "step tolerance reached";
            break;
        }
        const Eigen::VectorXd x_new = x + dx;
        const Eigen::VectorXd r_new = residuals(x_new);
        const double cost_new = r_new.allFinite() ? r_new.squaredNorm()
                                                  : std::numeric_limits<double>::infinity();
        const double predicted = cost - (r + J * dx).squaredNorm();
        if (cost_new < cost) {
            const double rho = predicted > 0.0 ? (cost - cost_new) / predicted : 0.0;
            lambda *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
            lambda = std::max(lambda, 1e-15);
            nu = 2.0;
            x = x_new;
            r = r_new;
            cost = cost_new;
            have_jacobian = false;
            out.accepted_norms.push_back(std::sqrt(cost));
        } else {
            lambda *= nu;
            nu *= 2.0;
            if (lambda > 1e30) {
                out.message = "damping diverged without reducing the residual";
                break;
            }
        }
    }
    if (!out.converged && out.message.empty()) out.message = "iteration limit reached";

    out.iterations = it;
    out.params = x;
    out.residual_norm = std::sqrt(cost);
    if (!have_jacobian) J = numeric_jacobian(residuals, x, r, options);
    fill_covariance(out, J, cost, options);
    return out;
}

}  // namespace vortexlab
