#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace vortexlab {

/// Outcome of a nonlinear least-squares fit. Parameter values are in the
/// units the residual function was written in.
struct FitResult {
    std::vector<std::string> names;
    Eigen::VectorXd params;
    Eigen::VectorXd std_errors;       // +inf for unidentifiable parameters
    std::vector<bool> unidentifiable;
    Eigen::MatrixXd covariance;
    double residual_norm = 0.0;       // ||r|| at the solution
    int iterations = 0;
    bool converged = false;
    std::string message;
    std::vector<double> accepted_norms;  // ||r|| after every accepted step

    std::size_t index(std::string_view name) const;
    double value(std::string_view name) const { return params(index(name)); }
    double error(std::string_view name) const { return std_errors(index(name)); }
    bool identifiable(std::string_view name) const { return !unidentifiable[index(name)]; }
};

using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LeastSquaresOptions {
    double gradient_tolerance = 1e-10;  // max cosine between r and a Jacobian column
    double step_tolerance = 1e-12;      // ||dx|| relative to ||x||
    int max_iterations = 200;
    double jacobian_relative_step = 1e-6;
    double jacobian_absolute_step = 1e-12;
    double initial_damping = 1e-3;
    /// Scale the covariance by the reduced chi-square (off when the
    /// residuals are already normalized by known uncertainties).
    bool scale_covariance = true;
};

/// Forward-difference Jacobian of `residuals` at x.
Eigen::MatrixXd numeric_jacobian(const ResidualFunction& residuals, const Eigen::VectorXd& x,
                                 const Eigen::VectorXd& r0, const LeastSquaresOptions& options);

/// Levenberg-Marquardt damped Gauss-Newton. Never throws on numerical
/// trouble: a singular or stalled problem returns converged = false.
/// Throws InvalidArgument when `init` is not finite or the residual at
/// `init` is not finite.
FitResult least_squares(const ResidualFunction& residuals, std::vector<std::string> names,
                        const Eigen::VectorXd& init, const LeastSquaresOptions& options = {});

}  // namespace vortexlab
