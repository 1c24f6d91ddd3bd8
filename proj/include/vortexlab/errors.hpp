#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace vortexlab {

/// Base class for every failure raised by the library. The CLI maps
/// subclasses of NumericalError to exit code 2 and everything else to 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class InvalidDevice : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class InvalidOrientation : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class DomainError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class DegenerateFit : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class Divergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class LinearizationInvalid : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ReductionInvalid : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InsufficientDwells : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ClusteringError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class AmbiguousBands : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NegativeTemperature : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Iterative eigensolver failed; carries the residual norms of the
/// requested Ritz pairs at the last iteration.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, std::vector<double> residuals)
        : NumericalError(what), residuals_(std::move(residuals)) {}
    const std::vector<double>& residuals() const { return residuals_; }

private:
    std::vector<double> residuals_;
};

/// Two dressed eigenstates claimed the same bare product state.
/// overlaps(i, j) = |<eigenstate i | bare state j>|^2.
class AmbiguousLabeling : public NumericalError {
public:
    AmbiguousLabeling(const std::string& what, Eigen::MatrixXd overlaps)
        : NumericalError(what), overlaps_(std::move(overlaps)) {}
    const Eigen::MatrixXd& overlaps() const { return overlaps_; }

private:
    Eigen::MatrixXd overlaps_;
};

}  // namespace vortexlab
