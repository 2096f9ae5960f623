#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spectralab/errors.hpp"

namespace spectralab::atoms {

/// Largest supported atom arity; atoms are stored dense, lifts carry the
/// scale.
inline constexpr int kMaxArity = 512;

/// A constraint atom: a small graph on r vertices with edge weights in
/// {-1, 0, +1}, zero diagonal, and exactly two distinct adjacency
/// eigenvalues lambda1 > 0 > lambda2.
struct Atom {
    int r = 0;
    Eigen::MatrixXi weights; // r x r symmetric, zero diagonal
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    std::string name;

    Eigen::MatrixXd weights_real() const { return weights.cast<double>(); }

    /// -lambda1*lambda2 as an exact integer: every column's sum of squared
    /// weights equals it, so read it off column 0.
    std::int64_t minus_eig_product() const {
        std::int64_t s = 0;
        for (int u = 0; u < r; ++u) s += static_cast<std::int64_t>(weights(u, 0)) * weights(u, 0);
        return s;
    }

    /// lambda1 + lambda2 rounded to the nearest integer (exact for every
    /// library atom; callers needing exact integer recurrences check
    /// eig_sum_is_integral first).
    std::int64_t eig_sum_int() const { return std::llround(lambda1 + lambda2); }

    bool eig_sum_is_integral(double tol = 1e-9) const {
        return std::abs(lambda1 + lambda2 - std::llround(lambda1 + lambda2)) <= tol;
    }
};

/// Derived spectral quantities of a c-fold composition of an atom family.
struct TwoEigenvalueProfile {
    int c = 0;
    double gr = 0.0;   // (c-1) * (-lambda1*lambda2): nomadic growth rate
    double r_x = 0.0;  // 2*sqrt(gr): half-width of the adjacency band
    double d_x = 0.0;  // c * (-lambda1*lambda2): vertex degree of the product
    double band_lo = 0.0;
    double band_hi = 0.0;
};

inline TwoEigenvalueProfile profile(const Atom& a, int c) {
    if (c < 2) throw OutOfModel("profile: need c >= 2");
    TwoEigenvalueProfile p;
    p.c = c;
    const double mp = -a.lambda1 * a.lambda2;
    p.gr = (c - 1) * mp;
    p.r_x = 2.0 * std::sqrt(p.gr);
    p.d_x = c * mp;
    p.band_lo = a.lambda1 + a.lambda2 - p.r_x;
    p.band_hi = a.lambda1 + a.lambda2 + p.r_x;
    return p;
}

/// True when the nonzero pattern of W is bipartite.  Constraint-level
/// negation flips every edge of a copy at once; that is a balanced signing
/// exactly when the atom has no odd cycle.
inline bool is_bipartite(const Eigen::MatrixXi& W) {
    const int n = static_cast<int>(W.rows());
    std::vector<int> side(n, -1);
    std::vector<int> stack;
    for (int s = 0; s < n; ++s) {
        if (side[s] >= 0) continue;
        side[s] = 0;
        stack.push_back(s);
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                if (W(u, v) == 0) continue;
                if (side[v] < 0) {
                    side[v] = side[u] ^ 1;
                    stack.push_back(v);
                } else if (side[v] == side[u]) {
                    return false;
                }
            }
        }
    }
    return true;
}

/// Checks that the full spectrum of W clusters into exactly two values and
/// returns them as (lambda1, lambda2) with lambda1 > lambda2.  The
/// clustering tolerance is relative to max |eigenvalue|.  Also cross-checks
/// the square identities the rest of the library leans on:
///   sum_u W[u,v]^2 = -lambda1*lambda2          for every v,
///   sum_w W[u,w]W[w,v] = (lambda1+lambda2) W[u,v]  for u != v.
inline std::pair<double, double> validate_two_eigenvalue(const Eigen::MatrixXd& W, double tol = 1e-9) {
    const int n = static_cast<int>(W.rows());
    if (n < 2 || W.cols() != n) throw InvalidArity("validate_two_eigenvalue: need square matrix, r >= 2");
    if ((W - W.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw NotSymmetric("validate_two_eigenvalue: matrix not symmetric");
    for (int i = 0; i < n; ++i)
        if (W(i, i) != 0.0) throw NotTwoEigenvalue("validate_two_eigenvalue: nonzero diagonal");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues(); // ascending
    const double scale = std::max(std::abs(ev(0)), std::abs(ev(n - 1)));
    if (scale <= tol) throw Degenerate("validate_two_eigenvalue: zero matrix");
    const double gap = tol * scale;

    std::vector<std::pair<double, int>> clusters; // (running mean, count)
    for (int i = 0; i < n; ++i) {
        if (!clusters.empty() && std::abs(ev(i) - clusters.back().first) <= gap) {
            auto& [mean, count] = clusters.back();
            mean += (ev(i) - mean) / (count + 1);
            ++count;
        } else {
            clusters.emplace_back(ev(i), 1);
        }
    }
    if (clusters.size() == 1)
        throw Degenerate("validate_two_eigenvalue: single eigenvalue cluster (impossible for zero-diagonal nonzero matrix)");
    if (clusters.size() != 2)
        throw NotTwoEigenvalue("validate_two_eigenvalue: spectrum has " + std::to_string(clusters.size()) + " clusters");

    const double l2 = clusters[0].first;
    const double l1 = clusters[1].first;

    const Eigen::MatrixXd W2 = W * W;
    const double mp = -l1 * l2;
    for (int v = 0; v < n; ++v)
        if (std::abs(W2(v, v) - mp) > tol * std::max(1.0, mp))
            throw NotTwoEigenvalue("validate_two_eigenvalue: diagonal square identity fails");
    const double sum = l1 + l2;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (std::abs(W2(u, v) - sum * W(u, v)) > tol * std::max(1.0, scale * scale))
                throw NotTwoEigenvalue("validate_two_eigenvalue: off-diagonal square identity fails");
    return {l1, l2};
}

/// Full invariant check of a constructed Atom.  Throws on any violation.
inline void validate(const Atom& a, double tol = 1e-9) {
    if (a.r < 2) throw InvalidArity("atom: r must be >= 2");
    if (a.weights.rows() != a.r || a.weights.cols() != a.r) throw InvalidArity("atom: bad weights shape");
    for (int i = 0; i < a.r; ++i)
        for (int j = 0; j < a.r; ++j) {
            if (a.weights(i, j) != a.weights(j, i)) throw NotSymmetric("atom: weights not symmetric");
            if (std::abs(a.weights(i, j)) > 1) throw Error("atom: weights must be in {-1,0,+1}");
        }
    const auto [l1, l2] = validate_two_eigenvalue(a.weights_real(), tol);
    const double scale = std::max(std::abs(l1), std::abs(l2));
    if (std::abs(l1 - a.lambda1) > tol * scale || std::abs(l2 - a.lambda2) > tol * scale)
        throw NotTwoEigenvalue("atom: stored eigenvalues disagree with spectrum");
    if (!(a.lambda1 > 0.0 && a.lambda2 < 0.0))
        throw NotTwoEigenvalue("atom: expected lambda1 > 0 > lambda2");
    // (A - l1 I)(A - l2 I) = 0 entrywise
    const Eigen::MatrixXd W = a.weights_real();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(a.r, a.r);
    const double res = ((W - l1 * I) * (W - l2 * I)).cwiseAbs().maxCoeff();
    if (res > tol * std::max(1.0, scale * scale)) throw NotTwoEigenvalue("atom: minimal polynomial residual too large");
}

/// Single positive edge on two vertices; eigenvalues +1/-1.
inline Atom make_single_edge() {
    Atom a;
    a.r = 2;
    a.weights = Eigen::MatrixXi::Zero(2, 2);
    a.weights(0, 1) = a.weights(1, 0) = 1;
    a.lambda1 = 1.0;
    a.lambda2 = -1.0;
    a.name = "edge";
    return a;
}

/// Complete graph on r vertices; eigenvalues r-1 and -1.
inline Atom make_complete(int r) {
    if (r < 2) throw InvalidArity("make_complete: r must be >= 2");
    if (r > kMaxArity) throw ArityTooLarge("make_complete: r exceeds dense storage cap");
    Atom a;
    a.r = r;
    a.weights = Eigen::MatrixXi::Ones(r, r) - Eigen::MatrixXi::Identity(r, r);
    a.lambda1 = r - 1.0;
    a.lambda2 = -1.0;
    a.name = "complete:" + std::to_string(r);
    return a;
}

/// The 4-vertex sorting atom with adjacency
///   (0 0 +1 +1; 0 0 +1 -1; +1 +1 0 0; +1 -1 0 0)
/// and eigenvalues +-sqrt(2), each with multiplicity 2.
inline Atom make_sort4() {
    Atom a;
    a.r = 4;
    a.weights = Eigen::MatrixXi::Zero(4, 4);
    const int rows[4][4] = {{0, 0, 1, 1}, {0, 0, 1, -1}, {1, 1, 0, 0}, {1, -1, 0, 0}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a.weights(i, j) = rows[i][j];
    a.lambda1 = std::sqrt(2.0);
    a.lambda2 = -std::sqrt(2.0);
    a.name = "sort4";
    return a;
}

/// Bipartite atom on 2*2^k vertices whose cross block is the k-th
/// Walsh-Hadamard matrix; eigenvalues +-2^(k/2).
inline Atom make_forrelation(int k) {
    if (k < 0) throw InvalidArity("make_forrelation: k must be >= 0");
    if (k > 8) throw ArityTooLarge("make_forrelation: k > 8 exceeds dense storage cap");
    const int m = 1 << k;
    Eigen::MatrixXi H = Eigen::MatrixXi::Ones(1, 1);
    for (int t = 0; t < k; ++t) {
        Eigen::MatrixXi H2(2 * H.rows(), 2 * H.cols());
        H2 << H, H, H, -H;
        H = std::move(H2);
    }
    Atom a;
    a.r = 2 * m;
    a.weights = Eigen::MatrixXi::Zero(a.r, a.r);
    a.weights.block(0, m, m, m) = H;
    a.weights.block(m, 0, m, m) = H.transpose();
    a.lambda1 = std::pow(2.0, k / 2.0);
    a.lambda2 = -a.lambda1;
    a.name = "forrelation:" + std::to_string(k);
    return a;
}

} // namespace spectralab::atoms
