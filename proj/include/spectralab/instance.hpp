#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <string>
#include <vector>

#include "spectralab/atom.hpp"
#include "spectralab/constraint_graph.hpp"
#include "spectralab/errors.hpp"
#include "spectralab/rng.hpp"

namespace spectralab::lifts {

enum class Negation { None, Constraint, Variable };

inline const char* to_string(Negation m) {
    switch (m) {
        case Negation::None: return "none";
        case Negation::Constraint: return "constraint";
        case Negation::Variable: return "variable";
    }
    return "none";
}

inline Negation negation_from_string(const std::string& s) {
    if (s == "none") return Negation::None;
    if (s == "constraint") return Negation::Constraint;
    if (s == "variable") return Negation::Variable;
    throw ParseError("unknown negation model: " + s);
}

struct NegationModel {
    Negation kind = Negation::None;
    std::uint64_t seed = 0;
};

/// One undirected signed edge of an instance graph.  atom_id names the
/// constraint vertex (j, b) that engendered the edge, as j*n + b.
struct Edge {
    int u = 0;
    int v = 0;
    int w = 0; // -1 or +1
    int atom_id = 0;
};

/// The signed multigraph on variable vertices obtained by stamping one atom
/// copy per constraint vertex of a lift.  Parallel edges are kept in the
/// edge list; the adjacency matrix sums them.
struct InstanceGraph {
    int r = 0;
    int c = 0;
    int n = 0;
    std::uint64_t seed = 0; // lift permutations
    Negation negation = Negation::None;
    std::uint64_t negation_seed = 0;
    int num_vertices = 0;
    double lambda1 = 0.0; // common atom eigenvalue pair
    double lambda2 = 0.0;
    std::vector<Edge> edges;

    int num_edges() const { return static_cast<int>(edges.size()); }
    int num_atom_copies() const { return c * n; }

    Eigen::SparseMatrix<double> adjacency() const {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(edges.size() * 2);
        for (const Edge& e : edges) {
            trip.emplace_back(e.u, e.v, static_cast<double>(e.w));
            trip.emplace_back(e.v, e.u, static_cast<double>(e.w));
        }
        Eigen::SparseMatrix<double> A(num_vertices, num_vertices);
        A.setFromTriplets(trip.begin(), trip.end());
        return A;
    }

    Eigen::MatrixXd adjacency_dense() const {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(num_vertices, num_vertices);
        for (const Edge& e : edges) {
            A(e.u, e.v) += e.w;
            A(e.v, e.u) += e.w;
        }
        return A;
    }

    Eigen::MatrixXi adjacency_int() const {
        Eigen::MatrixXi A = Eigen::MatrixXi::Zero(num_vertices, num_vertices);
        for (const Edge& e : edges) {
            A(e.u, e.v) += e.w;
            A(e.v, e.u) += e.w;
        }
        return A;
    }

    CopyIncidence copy_incidence() const {
        CopyIncidence inc;
        inc.num_vertices = num_vertices;
        inc.num_copies = num_atom_copies();
        inc.copies_of_vertex.resize(inc.num_vertices);
        inc.members_of_copy.resize(inc.num_copies);
        std::vector<std::vector<char>> seen(inc.num_copies);
        for (auto& s : seen) s.assign(num_vertices, 0);
        for (const Edge& e : edges) {
            for (int x : {e.u, e.v}) {
                if (!seen[e.atom_id][x]) {
                    seen[e.atom_id][x] = 1;
                    inc.members_of_copy[e.atom_id].push_back(x);
                    inc.copies_of_vertex[x].push_back(e.atom_id);
                }
            }
        }
        return inc;
    }

    /// Assemble a small instance directly from an edge list (tests and
    /// standalone examples such as single atoms or cycles).
    static InstanceGraph from_edges(int num_vertices, std::vector<Edge> edges,
                                    double lambda1 = 0.0, double lambda2 = 0.0) {
        InstanceGraph g;
        g.num_vertices = num_vertices;
        g.edges = std::move(edges);
        g.lambda1 = lambda1;
        g.lambda2 = lambda2;
        int copies = 0;
        for (const Edge& e : g.edges) copies = std::max(copies, e.atom_id + 1);
        g.c = 1;
        g.n = copies;
        g.r = num_vertices;
        return g;
    }
};

namespace detail {

inline InstanceGraph make_instance_impl(const ConstraintGraph& congraph,
                                        const std::vector<atoms::Atom>& atom_list,
                                        NegationModel negation, bool validate_atoms) {
    const int r = congraph.r, c = congraph.c, n = congraph.n;
    if (static_cast<int>(atom_list.size()) != c)
        throw ArityMismatch("make_instance: need exactly c atoms");
    for (const auto& a : atom_list)
        if (a.r != r) throw ArityMismatch("make_instance: atom arity does not match constraint graph");
    if (validate_atoms) {
        for (const auto& a : atom_list) atoms::validate(a);
        const double scale = std::max(std::abs(atom_list[0].lambda1), std::abs(atom_list[0].lambda2));
        for (const auto& a : atom_list)
            if (std::abs(a.lambda1 - atom_list[0].lambda1) > 1e-9 * scale ||
                std::abs(a.lambda2 - atom_list[0].lambda2) > 1e-9 * scale)
                throw MixedEigenvalues("make_instance: atoms must share the eigenvalue pair");
        if (negation.kind == Negation::Constraint)
            for (const auto& a : atom_list)
                if (!atoms::is_bipartite(a.weights))
                    throw NotBalanced("make_instance: constraint negation flips whole copies, which is a "
                                      "balanced signing only for bipartite atoms; use variable negation");
    }

    InstanceGraph inst;
    inst.r = r;
    inst.c = c;
    inst.n = n;
    inst.seed = congraph.seed;
    inst.negation = negation.kind;
    inst.negation_seed = negation.seed;
    inst.num_vertices = r * n;
    inst.lambda1 = atom_list[0].lambda1;
    inst.lambda2 = atom_list[0].lambda2;

    // Inverse permutations: member of copy (j, b) in group i.
    std::vector<std::vector<int>> inv(static_cast<std::size_t>(r) * c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) {
            auto& pi = inv[static_cast<std::size_t>(i) * c + j];
            pi.assign(n, 0);
            const auto& p = congraph.perm(i, j);
            for (int a = 0; a < n; ++a) pi[p[a]] = a;
        }

    std::vector<int> member(r), sign(r, 1);
    for (int j = 0; j < c; ++j) {
        const auto& A = atom_list[j].weights;
        for (int b = 0; b < n; ++b) {
            const int f = j * n + b;
            for (int i = 0; i < r; ++i) member[i] = i * n + inv[static_cast<std::size_t>(i) * c + j][b];
            int copy_flip = 1;
            if (negation.kind != Negation::None) {
                auto stream = rng::substream(negation.seed, rng::Domain::Negation,
                                             static_cast<std::uint64_t>(f));
                if (negation.kind == Negation::Constraint) {
                    copy_flip = stream.next_sign();
                } else {
                    for (int i = 0; i < r; ++i) sign[i] = stream.next_sign();
                }
            }
            for (int i = 0; i < r; ++i)
                for (int i2 = i + 1; i2 < r; ++i2) {
                    int w = A(i, i2);
                    if (w == 0) continue;
                    if (negation.kind == Negation::Constraint) w *= copy_flip;
                    else if (negation.kind == Negation::Variable) w *= sign[i] * sign[i2];
                    inst.edges.push_back(Edge{member[i], member[i2], w, f});
                }
        }
    }
    return inst;
}

} // namespace detail

/// Stamp one copy of atom_list[j] onto every constraint vertex of group j.
/// All atoms must be valid two-eigenvalue atoms sharing the eigenvalue
/// pair.  Constraint negation is rejected for non-bipartite atoms because
/// flipping a whole copy with an odd cycle is not a balanced signing (the
/// copy spectrum would change).
inline InstanceGraph make_instance(const ConstraintGraph& congraph,
                                   const std::vector<atoms::Atom>& atom_list,
                                   NegationModel negation = {}) {
    return detail::make_instance_impl(congraph, atom_list, negation, true);
}

namespace testing {
/// Test-only: skips two-eigenvalue validation so structural behavior can be
/// exercised with illustrative atoms (e.g. plain cycles).  Never use in
/// library or CLI paths.
inline InstanceGraph make_instance_unvalidated(const ConstraintGraph& congraph,
                                               const std::vector<atoms::Atom>& atom_list,
                                               NegationModel negation = {}) {
    return detail::make_instance_impl(congraph, atom_list, negation, false);
}
} // namespace testing

/// A single atom viewed as a standalone instance (one copy, c = 1).  Used
/// for game-style examples where the four-vertex sorting atom by itself is
/// the object of interest.
inline InstanceGraph instance_of_atom(const atoms::Atom& a) {
    std::vector<Edge> edges;
    for (int i = 0; i < a.r; ++i)
        for (int j = i + 1; j < a.r; ++j)
            if (a.weights(i, j) != 0) edges.push_back(Edge{i, j, a.weights(i, j), 0});
    auto g = InstanceGraph::from_edges(a.r, std::move(edges), a.lambda1, a.lambda2);
    g.c = 1;
    g.n = 1;
    g.r = a.r;
    return g;
}

/// Diagonal sign vector D with D * A_reference * D = A_instance, where the
/// two instances share the same underlying unsigned multigraph (identical
/// edge lists up to signs).  Built by fixing signs along a spanning tree
/// and checking every non-tree edge; throws NotBalanced when the entrywise
/// sign ratio is not a balanced signing.
inline Eigen::VectorXd balanced_signing_diagonal(const InstanceGraph& instance,
                                                 const InstanceGraph& reference) {
    if (instance.num_vertices != reference.num_vertices ||
        instance.edges.size() != reference.edges.size())
        throw ArityMismatch("balanced_signing_diagonal: instances differ in shape");
    const int nv = instance.num_vertices;
    const std::size_t ne = instance.edges.size();
    std::vector<int> ratio(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        const Edge& a = instance.edges[e];
        const Edge& b = reference.edges[e];
        if (a.u != b.u || a.v != b.v || a.atom_id != b.atom_id)
            throw ArityMismatch("balanced_signing_diagonal: edge lists do not line up");
        ratio[e] = a.w * b.w; // signs are +-1, so w_inst / w_ref = w_inst * w_ref
    }

    std::vector<std::vector<std::pair<int, int>>> adj(nv); // (neighbor, edge index)
    for (std::size_t e = 0; e < ne; ++e) {
        adj[instance.edges[e].u].emplace_back(instance.edges[e].v, static_cast<int>(e));
        adj[instance.edges[e].v].emplace_back(instance.edges[e].u, static_cast<int>(e));
    }

    Eigen::VectorXd D = Eigen::VectorXd::Zero(nv);
    std::vector<char> edge_in_tree(ne, 0);
    for (int root = 0; root < nv; ++root) {
        if (D(root) != 0.0) continue;
        D(root) = 1.0;
        std::vector<int> stack{root};
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            for (auto [v, e] : adj[u]) {
                if (D(v) != 0.0) continue;
                D(v) = D(u) * ratio[e];
                edge_in_tree[e] = 1;
                stack.push_back(v);
            }
        }
    }
    for (std::size_t e = 0; e < ne; ++e) {
        if (edge_in_tree[e]) continue;
        const Edge& ed = instance.edges[e];
        if (D(ed.u) * D(ed.v) != ratio[e])
            throw NotBalanced("balanced_signing_diagonal: sign ratio is not balanced on a non-tree edge");
    }
    return D;
}

/// Recover the common atom eigenvalue pair from an instance whose copies
/// were stamped from (possibly sign-conjugated) two-eigenvalue atoms, by
/// eigendecomposing one full copy.  Used when loading serialized instances.
inline std::pair<double, double> infer_eigenvalue_pair(const InstanceGraph& inst) {
    if (inst.edges.empty()) throw Degenerate("infer_eigenvalue_pair: no edges");
    const auto inc = inst.copy_incidence();
    // pick the copy of edge 0
    const int f = inst.edges[0].atom_id;
    const auto& mem = inc.members_of_copy[f];
    const int m = static_cast<int>(mem.size());
    std::vector<int> pos(inst.num_vertices, -1);
    for (int i = 0; i < m; ++i) pos[mem[i]] = i;
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, m);
    for (const Edge& e : inst.edges) {
        if (e.atom_id != f) continue;
        W(pos[e.u], pos[e.v]) += e.w;
        W(pos[e.v], pos[e.u]) += e.w;
    }
    return atoms::validate_two_eigenvalue(W, 1e-9);
}

} // namespace spectralab::lifts
