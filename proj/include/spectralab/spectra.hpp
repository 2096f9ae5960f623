#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <cmath>
#include <complex>
#include <vector>

#include "spectralab/errors.hpp"
#include "spectralab/rng.hpp"

namespace spectralab::spectra {

/// Full decompositions are only attempted below this dimension.
inline constexpr int kDenseEigLimit = 6000;

/// Full real spectrum of a symmetric matrix, ascending.
inline Eigen::VectorXd eig_symmetric(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw NotSymmetric("eig_symmetric: matrix not square");
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw NotSymmetric("eig_symmetric: matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

/// Full complex spectrum of a general real matrix.
inline Eigen::VectorXcd eig_general(const Eigen::MatrixXd& B) {
    if (B.rows() != B.cols()) throw TooLarge("eig_general: matrix not square");
    if (B.rows() > kDenseEigLimit)
        throw TooLarge("eig_general: dimension exceeds dense threshold " + std::to_string(kDenseEigLimit));
    Eigen::EigenSolver<Eigen::MatrixXd> es(B, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw NoConvergence("eig_general: QR iteration failed");
    return es.eigenvalues();
}

struct RadiusResult {
    double value = 0.0;
    bool norm_upper_estimate = false; // true when obtained from ||M x|| growth, an upper proxy
    int iterations = 0;
};

/// Spectral radius.  Symmetric input: exact via extreme eigenvalues.
/// General input under the dense threshold: max |eigenvalue| from the full
/// decomposition.  Larger general input: power iteration on M M^T, i.e. the
/// operator norm, reported as a norm-based upper estimate.
inline RadiusResult spectral_radius(const Eigen::MatrixXd& M, double tol = 1e-8, int cap = 10000) {
    const int n = static_cast<int>(M.rows());
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
        const auto& ev = es.eigenvalues();
        return {std::max(std::abs(ev(0)), std::abs(ev(n - 1))), false, 0};
    }
    if (n <= kDenseEigLimit) {
        const Eigen::VectorXcd ev = eig_general(M);
        double rho = 0.0;
        for (int i = 0; i < n; ++i) rho = std::max(rho, std::abs(ev(i)));
        return {rho, false, 0};
    }
    // power iteration on M M^T for sigma_max(M)
    rng::Stream stream(0x5eedULL);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = (stream.next() >> 11) * 0x1.0p-53 - 0.5;
    x.normalize();
    double prev = 0.0;
    for (int it = 1; it <= cap; ++it) {
        Eigen::VectorXd y = M.transpose() * (M * x);
        const double norm = y.norm();
        if (norm == 0.0) return {0.0, true, it};
        x = y / norm;
        const double sigma = std::sqrt(norm);
        if (std::abs(sigma - prev) <= tol * std::max(1.0, sigma)) return {sigma, true, it};
        prev = sigma;
    }
    throw NoConvergence("spectral_radius: power iteration did not converge");
}

/// Extreme eigenvalues (min, max) of a large sparse symmetric matrix by a
/// plain Lanczos run with a deterministic start vector.  Lanczos without
/// reorthogonalization is reliable precisely for the extremes, which is all
/// the callers need.
inline std::pair<double, double> extreme_eigs_sparse(const Eigen::SparseMatrix<double>& A,
                                                     int iterations = 400) {
    const int n = static_cast<int>(A.rows());
    if (n == 1) return {0.0, 0.0};
    const int m = std::min(iterations, n);
    rng::Stream stream(0xabcdULL);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = (stream.next() >> 11) * 0x1.0p-53 - 0.5;
    v.normalize();
    Eigen::VectorXd v_prev = Eigen::VectorXd::Zero(n);
    std::vector<double> alpha, beta;
    double b = 0.0;
    for (int it = 0; it < m; ++it) {
        Eigen::VectorXd w = A * v;
        const double a = v.dot(w);
        alpha.push_back(a);
        w -= a * v + b * v_prev;
        b = w.norm();
        if (b < 1e-12) break;
        beta.push_back(b);
        v_prev = v;
        v = w / b;
    }
    const int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
    return {es.eigenvalues()(0), es.eigenvalues()(k - 1)};
}

} // namespace spectralab::spectra
