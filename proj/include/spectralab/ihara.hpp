#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "spectralab/errors.hpp"
#include "spectralab/instance.hpp"
#include "spectralab/nomadic.hpp"
#include "spectralab/spectra.hpp"

namespace spectralab::ihara {

using Complex = std::complex<double>;

/// L(t) = I - A t + (l1+l2) t I + (c-1)(-l1 l2) t^2 I.
inline Eigen::MatrixXd deformed_laplacian(const Eigen::MatrixXd& A, double lambda1, double lambda2,
                                          int c, double t) {
    const int n = static_cast<int>(A.rows());
    const double gr = (c - 1) * (-lambda1 * lambda2);
    return Eigen::MatrixXd::Identity(n, n) * (1.0 + (lambda1 + lambda2) * t + gr * t * t) - A * t;
}

struct LogDet {
    double log_abs = 0.0;
    int sign = 1; // 0 for a singular matrix
};

inline LogDet logdet_dense(const Eigen::MatrixXd& M) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    const auto& U = lu.matrixLU();
    LogDet r;
    r.sign = lu.permutationP().determinant() > 0 ? 1 : -1;
    for (int i = 0; i < M.rows(); ++i) {
        const double d = U(i, i);
        if (d == 0.0) return {0.0, 0};
        if (d < 0.0) r.sign = -r.sign;
        r.log_abs += std::log(std::abs(d));
    }
    return r;
}

inline LogDet logdet_sparse(const Eigen::SparseMatrix<double>& M) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(M);
    if (lu.info() != Eigen::Success) return {0.0, 0};
    return {lu.logAbsDeterminant(), static_cast<int>(lu.signDeterminant())};
}

/// Exponents of the deterministic factors (1 + l1 t), (1 + l2 t); these are
/// also the signed multiplicities of -l1 and -l2 in spec(B).  For atom
/// families with c < r they can be negative, in which case the matching
/// quadratic-image eigenvalues cancel against them.
inline std::pair<double, double> deterministic_exponents(int num_vertices, double lambda1,
                                                         double lambda2, int c) {
    const double e1 = num_vertices * (c * lambda2 / (lambda2 - lambda1) - 1.0);
    const double e2 = num_vertices * (c * lambda1 / (lambda1 - lambda2) - 1.0);
    return {e1, e2};
}

/// Relative residual |LHS - RHS| / |RHS| of the determinant identity
///   (1+l1 t)^e1 (1+l2 t)^e2 det L(t) = det(I - B t)
/// at a single admissible t, both sides evaluated in log space.
inline double ihara_bass_residual(const lifts::InstanceGraph& inst, double t) {
    const double l1 = inst.lambda1, l2 = inst.lambda2;
    const int c = inst.c;
    const double gr = (c - 1) * (-l1 * l2);
    const double scale = std::max({std::abs(l1), std::abs(l2), std::sqrt(gr)});
    if (std::abs(t) >= 0.9 / scale) throw NearPole("ihara_bass_residual: |t| too large");
    if (std::abs(1.0 + l1 * t) <= 1e-6 || std::abs(1.0 + l2 * t) <= 1e-6)
        throw NearPole("ihara_bass_residual: t too close to a deterministic pole");

    const auto [e1, e2] = deterministic_exponents(inst.num_vertices, l1, l2, c);
    const Eigen::MatrixXd L = deformed_laplacian(inst.adjacency_dense(), l1, l2, c, t);
    LogDet lhs = logdet_dense(L);
    lhs.log_abs += e1 * std::log(std::abs(1.0 + l1 * t)) + e2 * std::log(std::abs(1.0 + l2 * t));
    if (1.0 + l1 * t < 0.0 && std::llround(e1) % 2 != 0) lhs.sign = -lhs.sign;
    if (1.0 + l2 * t < 0.0 && std::llround(e2) % 2 != 0) lhs.sign = -lhs.sign;

    const auto op = nomadic::build_nomadic(inst);
    Eigen::SparseMatrix<double> M(op.dim(), op.dim());
    M.setIdentity();
    M -= Eigen::SparseMatrix<double>(op.B * t);
    const LogDet rhs = logdet_sparse(M);

    if (rhs.sign == 0) return lhs.sign == 0 ? 0.0 : 1.0;
    // |s1 e^{a1} - s2 e^{a2}| / e^{a2} = |s1 e^{a1-a2} - s2|
    return std::abs(lhs.sign * std::exp(lhs.log_abs - rhs.log_abs) - rhs.sign);
}

/// The 20 identity-check abscissae: uniform draws from
/// [-0.8, 0.8] / max(|l1|, |l2|, sqrt(gr)), rejecting pole-adjacent points.
inline std::vector<double> residual_t_samples(const lifts::InstanceGraph& inst, int count,
                                              std::uint64_t seed) {
    const double l1 = inst.lambda1, l2 = inst.lambda2;
    const double gr = (inst.c - 1) * (-l1 * l2);
    const double scale = std::max({std::abs(l1), std::abs(l2), std::sqrt(gr)});
    auto stream = rng::substream(seed, rng::Domain::Experiment, 0);
    std::vector<double> ts;
    while (static_cast<int>(ts.size()) < count) {
        const double u = (stream.next() >> 11) * 0x1.0p-53; // [0, 1)
        const double t = (1.6 * u - 0.8) / scale;
        if (std::abs(1.0 + l1 * t) <= 1e-3 || std::abs(1.0 + l2 * t) <= 1e-3) continue;
        if (std::abs(t) < 1e-4 / scale) continue;
        ts.push_back(t);
    }
    return ts;
}

/// The two roots of mu^2 - (nu - l1 - l2) mu + gr = 0, i.e. the eigenvalues
/// of B contributed by an eigenvalue nu of A.
inline std::pair<Complex, Complex> map_A_to_B_eigs(double nu, double lambda1, double lambda2, int c) {
    const double gr = (c - 1) * (-lambda1 * lambda2);
    const double bcoef = nu - lambda1 - lambda2;
    const Complex disc(bcoef * bcoef - 4.0 * gr, 0.0);
    const Complex s = std::sqrt(disc);
    return {(bcoef + s) / 2.0, (bcoef - s) / 2.0};
}

enum class Source { Lambda1, Lambda2, Zero, Quadratic };

inline const char* to_string(Source s) {
    switch (s) {
        case Source::Lambda1: return "lambda1";
        case Source::Lambda2: return "lambda2";
        case Source::Zero: return "zero";
        case Source::Quadratic: return "quadratic";
    }
    return "?";
}

struct PredictedSpectrum {
    std::vector<Complex> values; // size 2|E|
    std::vector<Source> sources;
    long mult_minus_lambda1 = 0; // net count at -lambda1 from the deterministic factor
    long mult_minus_lambda2 = 0;
    long mult_zero = 0;
};

/// Assemble the predicted multiset of eigenvalues of B from eig(A):
///   -l1 and -l2 with the closed-form multiplicities, two quadratic roots
///   per nu in eig(A), and 0 padding up to 2|E|.  Negative closed-form
///   multiplicities cancel against quadratic images that land exactly on
///   -l1 / -l2 (this happens for complete-graph atoms when c < r).
inline PredictedSpectrum predicted_B_spectrum(const lifts::InstanceGraph& inst,
                                              const Eigen::VectorXd& eig_A) {
    const double l1 = inst.lambda1, l2 = inst.lambda2;
    const int c = inst.c;
    const long two_E = 2L * inst.num_edges();
    const auto [e1, e2] = deterministic_exponents(inst.num_vertices, l1, l2, c);
    const long m1 = std::llround(e1), m2 = std::llround(e2);
    if (std::abs(e1 - m1) > 1e-6 || std::abs(e2 - m2) > 1e-6)
        throw NonIntegerMultiplicity("predicted_B_spectrum: closed-form multiplicity not an integer");
    const long m0 = two_E - static_cast<long>(inst.num_vertices) * c;
    if (m0 < 0) throw NonIntegerMultiplicity("predicted_B_spectrum: negative zero multiplicity");

    std::vector<Complex> quad;
    quad.reserve(2 * eig_A.size());
    for (Eigen::Index i = 0; i < eig_A.size(); ++i) {
        const auto [p, q] = map_A_to_B_eigs(eig_A(i), l1, l2, c);
        quad.push_back(p);
        quad.push_back(q);
    }

    auto cancel = [&quad](Complex target, long count) {
        for (long k = 0; k < count; ++k) {
            std::size_t best = 0;
            double bd = std::abs(quad[0] - target);
            for (std::size_t i = 1; i < quad.size(); ++i) {
                const double d = std::abs(quad[i] - target);
                if (d < bd) { bd = d; best = i; }
            }
            if (bd > 1e-6)
                throw NonIntegerMultiplicity(
                    "predicted_B_spectrum: negative deterministic multiplicity has no quadratic image to cancel");
            quad.erase(quad.begin() + static_cast<long>(best));
        }
    };
    if (m1 < 0) cancel(Complex(-l1, 0.0), -m1);
    if (m2 < 0) cancel(Complex(-l2, 0.0), -m2);

    PredictedSpectrum out;
    out.mult_minus_lambda1 = m1;
    out.mult_minus_lambda2 = m2;
    out.mult_zero = m0;
    for (long k = 0; k < std::max(m1, 0L); ++k) { out.values.emplace_back(-l1, 0.0); out.sources.push_back(Source::Lambda1); }
    for (long k = 0; k < std::max(m2, 0L); ++k) { out.values.emplace_back(-l2, 0.0); out.sources.push_back(Source::Lambda2); }
    for (const Complex& z : quad) { out.values.push_back(z); out.sources.push_back(Source::Quadratic); }
    for (long k = 0; k < m0; ++k) { out.values.emplace_back(0.0, 0.0); out.sources.push_back(Source::Zero); }
    if (static_cast<long>(out.values.size()) != two_E)
        throw CardinalityMismatch("predicted_B_spectrum: assembled multiset has wrong size");
    return out;
}

struct MatchedEigenvalue {
    Complex computed;
    Complex predicted;
    Source source = Source::Quadratic;
    double residual = 0.0;
};

struct SpectrumReport {
    std::vector<double> eig_A;
    std::vector<MatchedEigenvalue> matches;
    double max_residual = 0.0;
    double rho_A = 0.0;
    double rho_B = 0.0;
    long mult_minus_lambda1 = 0;
    long mult_minus_lambda2 = 0;
    long mult_zero = 0;
    bool pass = false;
    double tol = 0.0;
};

/// Greedy minimum-distance matching of the computed spectrum against the
/// prediction: computed values in decreasing magnitude each take their
/// nearest unused predicted value.
inline SpectrumReport match_spectra(const Eigen::VectorXcd& computed, const PredictedSpectrum& predicted,
                                    double tol) {
    const long n = computed.size();
    if (n != static_cast<long>(predicted.values.size()))
        throw CardinalityMismatch("match_spectra: multiset sizes differ");
    std::vector<long> order(n);
    for (long i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](long a, long b) {
        return std::abs(computed(a)) > std::abs(computed(b));
    });
    std::vector<char> used(n, 0);
    SpectrumReport rep;
    rep.tol = tol;
    rep.matches.resize(n);
    for (long oi = 0; oi < n; ++oi) {
        const long i = order[oi];
        const Complex z = computed(i);
        long best = -1;
        double bd = 0.0;
        for (long j = 0; j < n; ++j) {
            if (used[j]) continue;
            const double d = std::abs(predicted.values[j] - z);
            if (best < 0 || d < bd) { bd = d; best = j; }
        }
        used[best] = 1;
        rep.matches[i] = {z, predicted.values[best], predicted.sources[best], bd};
        rep.max_residual = std::max(rep.max_residual, bd);
        rep.rho_B = std::max(rep.rho_B, std::abs(z));
    }
    rep.mult_minus_lambda1 = predicted.mult_minus_lambda1;
    rep.mult_minus_lambda2 = predicted.mult_minus_lambda2;
    rep.mult_zero = predicted.mult_zero;
    rep.pass = rep.max_residual <= tol;
    return rep;
}

/// Full spectrum correspondence check for one instance: eig(A) dense
/// symmetric, eig(B) dense general, prediction, greedy match.
inline SpectrumReport spectrum_correspondence(const lifts::InstanceGraph& inst, double tol = 1e-6) {
    const Eigen::VectorXd nu = spectra::eig_symmetric(inst.adjacency_dense());
    const auto op = nomadic::build_nomadic(inst);
    const Eigen::VectorXcd mu = spectra::eig_general(op.dense());
    auto rep = match_spectra(mu, predicted_B_spectrum(inst, nu), tol);
    rep.eig_A.assign(nu.data(), nu.data() + nu.size());
    rep.rho_A = std::max(std::abs(nu(0)), std::abs(nu(nu.size() - 1)));
    return rep;
}

/// Count of computed eigenvalues within `tol` of a target point.
inline long count_near(const Eigen::VectorXcd& values, Complex target, double tol) {
    long k = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (std::abs(values(i) - target) <= tol) ++k;
    return k;
}

} // namespace spectralab::ihara
