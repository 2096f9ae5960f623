#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "spectralab/atom.hpp"
#include "spectralab/constraint_graph.hpp"
#include "spectralab/errors.hpp"
#include "spectralab/instance.hpp"
#include "spectralab/spectra.hpp"
#include "spectralab/waves.hpp"

namespace spectralab::sdp {

/// PSD Gram matrix with unit diagonal built from transported witness
/// vectors; certifies an SDP objective value from below.
struct WitnessMatrix {
    Eigen::MatrixXd M;
    int s = +1;
    double delta = 0.0;
    int L = 0;
    long bad_vertex_count = 0;
    double tail_mass = 0.0; // witness l2^2 mass beyond L, as a fraction
};

namespace detail {

struct IncidentEdge {
    int other;
    int w;
    int atom_id;
    int edge_index;
};

inline std::vector<std::vector<IncidentEdge>> incident_edges(const lifts::InstanceGraph& inst) {
    std::vector<std::vector<IncidentEdge>> adj(inst.num_vertices);
    for (int e = 0; e < inst.num_edges(); ++e) {
        const lifts::Edge& ed = inst.edges[e];
        adj[ed.u].push_back({ed.v, ed.w, ed.atom_id, e});
        adj[ed.v].push_back({ed.u, ed.w, ed.atom_id, e});
    }
    return adj;
}

/// Sparse witness values around one good vertex: the unique-path transport
///   g_v(u) = rho^{d(u,v)} * prod of signed edge weights along the path,
/// truncated at copy-distance L.  Entries crossing a non-edge of a copy are
/// zero and their subtrees are skipped.
struct SparseWitness {
    std::vector<int> index;
    std::vector<double> value;
};

inline SparseWitness transported_witness(const std::vector<std::vector<IncidentEdge>>& adj, int root,
                                         double rho, int L, std::size_t budget = 1u << 22) {
    SparseWitness out;
    out.index.push_back(root);
    out.value.push_back(1.0);
    struct Frame { int v; double val; int via_atom; };
    std::vector<Frame> frontier{{root, 1.0, -1}}, next;
    for (int d = 0; d < L; ++d) {
        next.clear();
        for (const Frame& fr : frontier)
            for (const IncidentEdge& ie : adj[fr.v]) {
                if (ie.atom_id == fr.via_atom) continue;
                if (out.index.size() >= budget)
                    throw BudgetExceeded("transported_witness: ball exceeds the vertex budget; lower L");
                const double val = fr.val * rho * ie.w;
                out.index.push_back(ie.other);
                out.value.push_back(val);
                next.push_back({ie.other, val, ie.atom_id});
            }
        frontier.swap(next);
    }
    return out;
}

} // namespace detail

/// Assemble the witness Gram matrix: good vertices get the truncated,
/// normalized transported witness, L-bad vertices get the coordinate
/// vector.  The Gram of the per-vertex columns is then renormalized to an
/// exactly unit diagonal (equivalently, the SDP vector of each vertex is
/// scaled to unit length), which keeps it PSD.
inline WitnessMatrix build_witness(const lifts::InstanceGraph& inst, const lifts::CopyIncidence& inc,
                                   int s, double delta, int L) {
    if (inst.num_vertices > 4000)
        throw TooLarge("build_witness: dense witness capped at 4000 vertices; use witness_energy");
    if (s != 1 && s != -1) throw Error("build_witness: s must be +1 or -1");
    const double gr = (inst.c - 1) * (-inst.lambda1 * inst.lambda2);
    const double rho = s * (1.0 - delta) / std::sqrt(gr);
    const auto bad = lifts::bad_vertex_mask(inc, L);
    const auto adj = detail::incident_edges(inst);

    const int nv = inst.num_vertices;
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(nv, nv); // column v = g_v
    long bad_count = 0;
    for (int v = 0; v < nv; ++v) {
        if (bad[v]) {
            ++bad_count;
            G(v, v) = 1.0;
            continue;
        }
        const auto w = detail::transported_witness(adj, v, rho, L);
        double norm2 = 0.0;
        for (double x : w.value) norm2 += x * x;
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < w.index.size(); ++i) G(w.index[i], v) += w.value[i] * inv;
    }
    WitnessMatrix out;
    out.M = G * G.transpose();
    Eigen::VectorXd d = out.M.diagonal().cwiseSqrt();
    for (int u = 0; u < nv; ++u)
        for (int v = 0; v < nv; ++v) out.M(u, v) /= d(u) * d(v);
    out.s = s;
    out.delta = delta;
    out.L = L;
    out.bad_vertex_count = bad_count;
    out.tail_mass = waves::witness_tail_mass(inst.c, delta, L);
    return out;
}

inline WitnessMatrix build_witness(const lifts::InstanceGraph& inst, int s, double delta, int L) {
    return build_witness(inst, inst.copy_incidence(), s, delta, L);
}

inline WitnessMatrix build_witness(const lifts::InstanceGraph& inst,
                                   const lifts::ConstraintGraph& congraph, int s, double delta,
                                   int L) {
    return build_witness(inst, lifts::CopyIncidence::from(congraph), s, delta, L);
}

/// <A, M> / (2|E|): the edge-average objective certified by the witness.
inline double sdp_lower_bound(const lifts::InstanceGraph& inst, const WitnessMatrix& witness) {
    double ip = 0.0;
    for (const lifts::Edge& e : inst.edges) ip += 2.0 * e.w * witness.M(e.u, e.v);
    return ip / (2.0 * inst.num_edges());
}

/// Streaming equivalent of build_witness + sdp_lower_bound for instances
/// too large to hold the Gram matrix: accumulates column norms and the
/// per-edge Gram entries in one pass over vertices.
struct WitnessEnergy {
    double lower_bound = 0.0;      // <A, M> / (2|E|), unit-diagonal M
    double per_vertex = 0.0;       // <A, M> / |V|
    long bad_vertex_count = 0;
    double tail_mass = 0.0;
};

inline WitnessEnergy witness_energy(const lifts::InstanceGraph& inst, const lifts::CopyIncidence& inc,
                                    int s, double delta, int L) {
    const double gr = (inst.c - 1) * (-inst.lambda1 * inst.lambda2);
    const double rho = s * (1.0 - delta) / std::sqrt(gr);
    const auto bad = lifts::bad_vertex_mask(inc, L);
    const auto adj = detail::incident_edges(inst);

    const int nv = inst.num_vertices;
    std::vector<double> diag(nv, 0.0);
    std::vector<double> edge_gram(inst.edges.size(), 0.0);
    std::vector<double> val(nv, 0.0);
    WitnessEnergy out;
    for (int v = 0; v < nv; ++v) {
        if (bad[v]) {
            ++out.bad_vertex_count;
            diag[v] += 1.0;
            continue;
        }
        const auto w = detail::transported_witness(adj, v, rho, L);
        double norm2 = 0.0;
        for (double x : w.value) norm2 += x * x;
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < w.index.size(); ++i) {
            val[w.index[i]] = w.value[i] * inv;
            diag[w.index[i]] += w.value[i] * w.value[i] * inv * inv;
        }
        for (std::size_t i = 0; i < w.index.size(); ++i) {
            const int u = w.index[i];
            for (const detail::IncidentEdge& ie : adj[u])
                if (u < ie.other && val[ie.other] != 0.0)
                    edge_gram[ie.edge_index] += val[u] * val[ie.other];
        }
        for (int u : w.index) val[u] = 0.0;
    }
    double ip = 0.0;
    for (std::size_t e = 0; e < inst.edges.size(); ++e) {
        const lifts::Edge& ed = inst.edges[e];
        ip += 2.0 * ed.w * edge_gram[e] / std::sqrt(diag[ed.u] * diag[ed.v]);
    }
    out.lower_bound = ip / (2.0 * inst.num_edges());
    out.per_vertex = ip / inst.num_vertices;
    out.tail_mass = waves::witness_tail_mass(inst.c, delta, L);
    return out;
}

/// Exact optimum of the edge-average objective by Gray-code enumeration
/// over sign assignments (global flip symmetry halves the work).
inline double opt_bruteforce(const lifts::InstanceGraph& inst) {
    const int nv = inst.num_vertices;
    if (nv > 24) throw TooLarge("opt_bruteforce: capped at 24 vertices");
    if (inst.edges.empty()) throw Degenerate("opt_bruteforce: no edges");
    const auto adj = detail::incident_edges(inst);
    std::vector<int> x(nv, 1);
    long obj = 0;
    for (const lifts::Edge& e : inst.edges) obj += e.w;
    long best = obj;
    const std::uint64_t count = nv == 1 ? 1 : (1ULL << (nv - 1));
    for (std::uint64_t i = 1; i < count; ++i) {
        const int u = std::countr_zero(i); // Gray code: flip the lowest set bit position
        long incident = 0;
        for (const auto& ie : adj[u]) incident += static_cast<long>(ie.w) * x[u] * x[ie.other];
        obj -= 2 * incident;
        x[u] = -x[u];
        if (obj > best) best = obj;
    }
    return static_cast<double>(best) / static_cast<double>(inst.num_edges());
}

/// (|V| / 2|E|) * lambda_max(A): the spectral relaxation of the edge-average
/// objective.
inline double eig_upper_bound(const lifts::InstanceGraph& inst) {
    double lmax;
    if (inst.num_vertices <= spectra::kDenseEigLimit) {
        const Eigen::VectorXd ev = spectra::eig_symmetric(inst.adjacency_dense());
        lmax = ev(ev.size() - 1);
    } else {
        lmax = spectra::extreme_eigs_sparse(inst.adjacency()).second;
    }
    return static_cast<double>(inst.num_vertices) / (2.0 * inst.num_edges()) * lmax;
}

/// Closed-form SDP value of the random model:
///   (l1 + l2 + 2 sqrt((c-1)(-l1 l2))) / (c (-l1 l2)).
inline double sdp_value_formula(double lambda1, double lambda2, int c) {
    if (c < 2) throw OutOfModel("sdp_value_formula: need c >= 2");
    const double mp = -lambda1 * lambda2;
    return (lambda1 + lambda2 + 2.0 * std::sqrt((c - 1) * mp)) / (c * mp);
}

/// Exact standalone witness for a single two-eigenvalue atom: I + A/l1 is
/// PSD (eigenvalues 1 + nu/l1 >= 1 + l2/l1 > 0... >= 0) with unit diagonal,
/// and pins the SDP value at 1/l1 when l2 = -l1.
inline Eigen::MatrixXd atom_witness(const atoms::Atom& a) {
    const Eigen::MatrixXd W = a.weights_real();
    return Eigen::MatrixXd::Identity(a.r, a.r) + W / a.lambda1;
}

struct SandwichReport {
    std::optional<double> opt;   // brute force, only for tiny instances
    double sdp_lower = 0.0;      // witness certificate
    double sdp_upper = 0.0;      // eigenvalue bound
    double formula = 0.0;        // closed-form model value
    double realized_slack = 0.0; // (l1+l2+r_X) - <A, M+>/|V|, the achieved epsilon
    long bad_vertex_count = 0;
    double tail_mass = 0.0;
    int L = 0;
    double delta = 0.0;
};

inline SandwichReport sandwich(const lifts::InstanceGraph& inst, double delta, int L,
                               bool want_opt = true) {
    const auto inc = inst.copy_incidence();
    SandwichReport rep;
    rep.L = L;
    rep.delta = delta;
    double per_vertex;
    if (inst.num_vertices <= 4000) {
        const auto wit = build_witness(inst, inc, +1, delta, L);
        rep.sdp_lower = sdp_lower_bound(inst, wit);
        per_vertex = rep.sdp_lower * 2.0 * inst.num_edges() / inst.num_vertices;
        rep.bad_vertex_count = wit.bad_vertex_count;
        rep.tail_mass = wit.tail_mass;
    } else {
        const auto we = witness_energy(inst, inc, +1, delta, L);
        rep.sdp_lower = we.lower_bound;
        per_vertex = we.per_vertex;
        rep.bad_vertex_count = we.bad_vertex_count;
        rep.tail_mass = we.tail_mass;
    }
    const double gr = (inst.c - 1) * (-inst.lambda1 * inst.lambda2);
    rep.realized_slack = inst.lambda1 + inst.lambda2 + 2.0 * std::sqrt(gr) - per_vertex;
    rep.sdp_upper = eig_upper_bound(inst);
    rep.formula = inst.c >= 2 ? sdp_value_formula(inst.lambda1, inst.lambda2, inst.c) : 0.0;
    if (want_opt && inst.num_vertices <= 24) rep.opt = opt_bruteforce(inst);
    return rep;
}

} // namespace spectralab::sdp
