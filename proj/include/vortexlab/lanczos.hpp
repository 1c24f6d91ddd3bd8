#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "vortexlab/errors.hpp"

namespace vortexlab {

template <typename Scalar>
struct LanczosResult {
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Vector values;   // largest first
    Matrix vectors;  // unit 2-norm columns
    int steps = 0;
};

/// Largest `k` eigenpairs of a symmetric operator given only through
/// `apply(x) -> A x`. The Krylov basis is fully reorthogonalized (two
/// Gram-Schmidt passes) and grown until every wanted Ritz pair has
/// |beta_m s_m| <= tol |theta|, or `max_steps` is reached, in which case
/// ConvergenceError carries the final Ritz residuals.
template <typename Scalar, typename Apply>
LanczosResult<Scalar> lanczos_largest(Apply&& apply, Eigen::Index n, int k,
                                      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& start,
                                      Scalar tol, int max_steps) {
    using Vector = typename LanczosResult<Scalar>::Vector;
    using Matrix = typename LanczosResult<Scalar>::Matrix;
    max_steps = static_cast<int>(std::min<Eigen::Index>(max_steps, n));
    if (k < 1 || k > max_steps) throw InvalidArgument("lanczos: bad number of eigenpairs");

    Matrix Q(n, max_steps);
    std::vector<Scalar> alpha, beta;
    Q.col(0) = start.normalized();
    std::vector<double> residuals(static_cast<std::size_t>(k), 0.0);
    const int check_every = 10;

    for (int m = 0; m < max_steps; ++m) {
        Vector v = apply(Vector(Q.col(m)));
        const Scalar a = Q.col(m).dot(v);
        alpha.push_back(a);
        for (int pass = 0; pass < 2; ++pass) {
            v -= Q.leftCols(m + 1) * (Q.leftCols(m + 1).transpose() * v);
        }
        const Scalar b = v.norm();
        const int dim = m + 1;
        const bool exhausted = (dim == max_steps) || b <= Scalar(1e-14) * std::abs(a);

        if (dim >= k && (exhausted || dim % check_every == 0)) {
            Matrix T = Matrix::Zero(dim, dim);
            for (int i = 0; i < dim; ++i) {
                T(i, i) = alpha[static_cast<std::size_t>(i)];
                if (i + 1 < dim) {
                    T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
                }
            }
            Eigen::SelfAdjointEigenSolver<Matrix> es(T);
            bool done = true;
            for (int j = 0; j < k; ++j) {
                const int col = dim - 1 - j;
                const Scalar theta = es.eigenvalues()(col);
                const Scalar res = std::abs(b * es.eigenvectors()(dim - 1, col));
                residuals[static_cast<std::size_t>(j)] = static_cast<double>(res);
                if (res > tol * std::abs(theta)) done = false;
            }
            if (done || b <= Scalar(1e-14) * std::abs(a)) {
                LanczosResult<Scalar> out;
                out.steps = dim;
                out.values.resize(k);
                out.vectors.resize(n, k);
                for (int j = 0; j < k; ++j) {
                    const int col = dim - 1 - j;
                    out.values(j) = es.eigenvalues()(col);
                    out.vectors.col(j) = (Q.leftCols(dim) * es.eigenvectors().col(col)).normalized();
                }
                return out;
            }
            if (dim == max_steps) break;
        }
        if (m + 1 < max_steps) {
            beta.push_back(b);
            Q.col(m + 1) = v / b;
        }
    }
    throw ConvergenceError("lanczos: Ritz pairs did not converge", residuals);
}

}  // namespace vortexlab
