#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "spectralab/errors.hpp"
#include "spectralab/instance.hpp"

namespace spectralab::nomadic {

using MatrixXll = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// One orientation of an instance edge; opposite orientations share the
/// undirected weight and atom tag.
struct DirectedEdge {
    int tail = 0;
    int head = 0;
    int w = 0;
    int atom_id = 0;
};

/// The signed transfer operator on directed edges: entry (e, e') equals
/// weight(e') iff head(e) = tail(e') and the two edges come from different
/// atom copies.  Directed edge 2k is instance edge k forward, 2k+1 its
/// reverse, so reverse(e) = e XOR 1.
struct NomadicOperator {
    std::vector<DirectedEdge> edges;                 // size 2|E|
    Eigen::SparseMatrix<double, Eigen::RowMajor> B;  // 2|E| x 2|E|

    int dim() const { return static_cast<int>(edges.size()); }
    static int reverse(int e) { return e ^ 1; }

    Eigen::MatrixXd dense() const { return Eigen::MatrixXd(B); }
};

inline NomadicOperator build_nomadic(const lifts::InstanceGraph& inst) {
    NomadicOperator op;
    op.edges.reserve(inst.edges.size() * 2);
    for (const lifts::Edge& e : inst.edges) {
        op.edges.push_back(DirectedEdge{e.u, e.v, e.w, e.atom_id});
        op.edges.push_back(DirectedEdge{e.v, e.u, e.w, e.atom_id});
    }
    const int m = op.dim();
    std::vector<std::vector<int>> out(inst.num_vertices);
    for (int e = 0; e < m; ++e) out[op.edges[e].tail].push_back(e);

    std::vector<Eigen::Triplet<double>> trip;
    for (int e = 0; e < m; ++e) {
        const DirectedEdge& de = op.edges[e];
        for (int e2 : out[de.head])
            if (op.edges[e2].atom_id != de.atom_id)
                trip.emplace_back(e, e2, static_cast<double>(op.edges[e2].w));
    }
    op.B.resize(m, m);
    op.B.setFromTriplets(trip.begin(), trip.end());
    return op;
}

/// Exact total weight of nomadic walks of length k from u to v, by
/// depth-first enumeration over directed edges.  Exponential in k; accepted
/// only for k <= 8 and 2|E| <= 200.
inline std::int64_t nomadic_walk_weight_oracle(const lifts::InstanceGraph& inst, int u, int v, int k) {
    if (k > 8 || 2 * static_cast<int>(inst.edges.size()) > 200)
        throw BudgetExceeded("nomadic_walk_weight_oracle: k <= 8 and 2|E| <= 200 required");
    if (k < 0) throw Error("nomadic_walk_weight_oracle: k must be >= 0");
    if (k == 0) return u == v ? 1 : 0;

    const auto op = build_nomadic(inst);
    std::vector<std::vector<int>> out(inst.num_vertices);
    for (int e = 0; e < op.dim(); ++e) out[op.edges[e].tail].push_back(e);

    std::int64_t total = 0;
    // stack of (edge, steps made, accumulated weight)
    struct Frame { int e; int depth; std::int64_t w; };
    std::vector<Frame> stack;
    for (int e0 : out[u]) stack.push_back({e0, 1, op.edges[e0].w});
    while (!stack.empty()) {
        const Frame fr = stack.back();
        stack.pop_back();
        const DirectedEdge& de = op.edges[fr.e];
        if (fr.depth == k) {
            if (de.head == v) total += fr.w;
            continue;
        }
        for (int e2 : out[de.head])
            if (op.edges[e2].atom_id != de.atom_id)
                stack.push_back({e2, fr.depth + 1, fr.w * op.edges[e2].w});
    }
    return total;
}

/// Exact total weight of nomadic walks of length k whose first directed
/// edge is `first` (used to cross-check powers of B).
inline std::int64_t nomadic_walks_from_edge_oracle(const lifts::InstanceGraph& inst, int first, int k) {
    if (k > 8 || 2 * static_cast<int>(inst.edges.size()) > 200)
        throw BudgetExceeded("nomadic_walks_from_edge_oracle: k <= 8 and 2|E| <= 200 required");
    const auto op = build_nomadic(inst);
    std::vector<std::vector<int>> out(inst.num_vertices);
    for (int e = 0; e < op.dim(); ++e) out[op.edges[e].tail].push_back(e);
    struct Frame { int e; int depth; std::int64_t w; };
    std::vector<Frame> stack{{first, 1, op.edges[first].w}};
    std::int64_t total = 0;
    while (!stack.empty()) {
        const Frame fr = stack.back();
        stack.pop_back();
        if (fr.depth == k) {
            total += fr.w;
            continue;
        }
        const DirectedEdge& de = op.edges[fr.e];
        for (int e2 : out[de.head])
            if (op.edges[e2].atom_id != de.atom_id)
                stack.push_back({e2, fr.depth + 1, fr.w * op.edges[e2].w});
    }
    return total;
}

/// Matrix polynomials p_k(A) whose (u, v) entry is the total weight of
/// nomadic walks of length k from u to v:
///   p_0 = I,  p_1 = A,
///   p_2 = A^2 - (l1+l2) A - c(-l1 l2) I,
///   p_k = A p_{k-1} - (l1+l2) p_{k-1} - (c-1)(-l1 l2) p_{k-2}   (k >= 3).
/// Exact integer arithmetic; requires l1+l2 and l1*l2 integral, which holds
/// for every library atom family.
inline MatrixXll nomadic_polynomial_int(const Eigen::MatrixXi& A, std::int64_t eig_sum,
                                        std::int64_t minus_eig_product, int c, int k) {
    if (k < 0) throw Error("nomadic_polynomial: k must be >= 0");
    const int n = static_cast<int>(A.rows());
    const MatrixXll Al = A.cast<std::int64_t>();
    MatrixXll pk_2 = MatrixXll::Identity(n, n);
    if (k == 0) return pk_2;
    MatrixXll pk_1 = Al;
    if (k == 1) return pk_1;
    MatrixXll pk = Al * Al - eig_sum * Al -
                   (static_cast<std::int64_t>(c) * minus_eig_product) * MatrixXll::Identity(n, n);
    for (int s = 3; s <= k; ++s) {
        MatrixXll next = Al * pk - eig_sum * pk - ((c - 1) * minus_eig_product) * pk_1;
        pk_1 = std::move(pk);
        pk = std::move(next);
    }
    return pk;
}

/// Floating-point variant of the same recurrence for non-integral spectra.
inline Eigen::MatrixXd nomadic_polynomial(const Eigen::MatrixXd& A, double lambda1, double lambda2,
                                          int c, int k) {
    if (k < 0) throw Error("nomadic_polynomial: k must be >= 0");
    const int n = static_cast<int>(A.rows());
    const double sum = lambda1 + lambda2, mp = -lambda1 * lambda2;
    Eigen::MatrixXd pk_2 = Eigen::MatrixXd::Identity(n, n);
    if (k == 0) return pk_2;
    Eigen::MatrixXd pk_1 = A;
    if (k == 1) return pk_1;
    Eigen::MatrixXd pk = A * A - sum * A - (c * mp) * Eigen::MatrixXd::Identity(n, n);
    for (int s = 3; s <= k; ++s) {
        Eigen::MatrixXd next = A * pk - sum * pk - ((c - 1) * mp) * pk_1;
        pk_1 = std::move(pk);
        pk = std::move(next);
    }
    return pk;
}

inline MatrixXll nomadic_polynomial_int(const lifts::InstanceGraph& inst, int c, int k) {
    if (!(std::abs(inst.lambda1 + inst.lambda2 - std::llround(inst.lambda1 + inst.lambda2)) <= 1e-9))
        throw Error("nomadic_polynomial_int: eigenvalue sum not integral");
    const std::int64_t mp = std::llround(-inst.lambda1 * inst.lambda2);
    return nomadic_polynomial_int(inst.adjacency_int(), std::llround(inst.lambda1 + inst.lambda2), mp, c, k);
}

} // namespace spectralab::nomadic
