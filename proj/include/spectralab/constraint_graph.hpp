#pragma once

#include <cstdint>
#include <vector>

#include "spectralab/errors.hpp"
#include "spectralab/rng.hpp"

namespace spectralab::lifts {

/// An n-lift of the complete bipartite graph K_{r,c}.  Variable vertex
/// (i, a) is indexed i*n + a; constraint vertex (j, b) is indexed j*n + b.
/// perm(i, j) maps the variable copy a to the constraint copy b it is
/// matched with along base edge (i, j).
struct ConstraintGraph {
    int r = 0;
    int c = 0;
    int n = 0;
    std::uint64_t seed = 0;
    // perms[i*c + j] is a permutation of {0, ..., n-1}
    std::vector<std::vector<int>> perms;

    int num_variable_vertices() const { return r * n; }
    int num_constraint_vertices() const { return c * n; }

    const std::vector<int>& perm(int i, int j) const { return perms[static_cast<std::size_t>(i) * c + j]; }

    /// Constraint copy adjacent to variable vertex (i, a) in group j.
    int constraint_neighbor(int i, int a, int j) const { return perm(i, j)[a]; }
};

inline ConstraintGraph base_constraint_graph(int r, int c) {
    if (r < 2 || c < 2) throw InvalidArity("base_constraint_graph: need r, c >= 2");
    ConstraintGraph g;
    g.r = r;
    g.c = c;
    g.n = 1;
    g.perms.assign(static_cast<std::size_t>(r) * c, std::vector<int>{0});
    return g;
}

/// Random n-lift: each of the r*c base edges gets an independent uniform
/// permutation drawn from its own substream, so the graph is a pure
/// function of (r, c, n, seed).
inline ConstraintGraph random_lift(int r, int c, int n, std::uint64_t seed) {
    if (r < 2 || c < 2) throw InvalidArity("random_lift: need r, c >= 2");
    if (n < 1) throw InvalidArity("random_lift: need n >= 1");
    ConstraintGraph g;
    g.r = r;
    g.c = c;
    g.n = n;
    g.seed = seed;
    g.perms.reserve(static_cast<std::size_t>(r) * c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) {
            auto stream = rng::substream(seed, rng::Domain::Permutation,
                                         static_cast<std::uint64_t>(i) * c + j);
            g.perms.push_back(rng::random_permutation(n, stream));
        }
    return g;
}

/// Bipartite incidence between variable vertices and atom copies.  This is
/// exactly the constraint graph, but it can also be reconstructed from a
/// serialized instance (whose edges carry atom_id tags), so neighborhood
/// queries are defined on this view.
struct CopyIncidence {
    int num_vertices = 0;
    int num_copies = 0;
    std::vector<std::vector<int>> copies_of_vertex;
    std::vector<std::vector<int>> members_of_copy;

    static CopyIncidence from(const ConstraintGraph& g) {
        CopyIncidence inc;
        inc.num_vertices = g.num_variable_vertices();
        inc.num_copies = g.num_constraint_vertices();
        inc.copies_of_vertex.resize(inc.num_vertices);
        inc.members_of_copy.resize(inc.num_copies);
        for (int i = 0; i < g.r; ++i)
            for (int a = 0; a < g.n; ++a)
                for (int j = 0; j < g.c; ++j) {
                    const int f = j * g.n + g.constraint_neighbor(i, a, j);
                    const int v = i * g.n + a;
                    inc.copies_of_vertex[v].push_back(f);
                    inc.members_of_copy[f].push_back(v);
                }
        return inc;
    }
};

namespace detail {

/// Independent cycle count (edges - vertices + 1; the ball is connected)
/// of the radius-`depth` ball around `v0`, depth in single bipartite steps.
inline long ball_cycle_count(const CopyIncidence& inc, int v0, int depth) {
    std::vector<int> vseen{v0}, fseen;
    std::vector<char> vin(inc.num_vertices, 0), fin(inc.num_copies, 0);
    vin[v0] = 1;
    std::vector<int> frontier_v{v0}, frontier_f;
    for (int step = 0; step < depth; ++step) {
        if (step % 2 == 0) {
            frontier_f.clear();
            for (int v : frontier_v)
                for (int f : inc.copies_of_vertex[v])
                    if (!fin[f]) {
                        fin[f] = 1;
                        fseen.push_back(f);
                        frontier_f.push_back(f);
                    }
        } else {
            frontier_v.clear();
            for (int f : frontier_f)
                for (int u : inc.members_of_copy[f])
                    if (!vin[u]) {
                        vin[u] = 1;
                        vseen.push_back(u);
                        frontier_v.push_back(u);
                    }
        }
    }
    long edges = 0;
    for (int f : fseen)
        for (int u : inc.members_of_copy[f])
            if (vin[u]) ++edges;
    const long vertices = static_cast<long>(vseen.size()) + static_cast<long>(fseen.size());
    return edges - vertices + 1;
}

} // namespace detail

/// Variable vertices whose radius-2L ball in the constraint graph is not a
/// tree.  These are the vertices where witness vectors cannot be
/// transported from the infinite product by a local tree isomorphism.
inline std::vector<char> bad_vertex_mask(const CopyIncidence& inc, int L) {
    std::vector<char> bad(inc.num_vertices, 0);
    if (L <= 0) return bad;
    for (int v = 0; v < inc.num_vertices; ++v)
        bad[v] = detail::ball_cycle_count(inc, v, 2 * L) > 0 ? 1 : 0;
    return bad;
}

inline std::vector<int> detect_bad_vertices(const ConstraintGraph& g, int L) {
    if (L < 0) throw Error("detect_bad_vertices: L must be >= 0");
    const auto inc = CopyIncidence::from(g);
    const auto mask = bad_vertex_mask(inc, L);
    std::vector<int> out;
    for (int v = 0; v < inc.num_vertices; ++v)
        if (mask[v]) out.push_back(v);
    return out;
}

/// True when the radius-4*ell neighborhood of v contains at most one cycle.
inline bool tangle_free(const ConstraintGraph& g, int v, int ell) {
    if (ell < 0) throw Error("tangle_free: ell must be >= 0");
    const auto inc = CopyIncidence::from(g);
    return detail::ball_cycle_count(inc, v, 4 * ell) <= 1;
}

/// Length of a shortest cycle through any vertex (in constraint-graph
/// steps), or 0 when acyclic.  Small graphs only; used to find lifts whose
/// balls are trees.
inline int girth(const ConstraintGraph& g) {
    const auto inc = CopyIncidence::from(g);
    const int nv = inc.num_vertices, nf = inc.num_copies;
    int best = 0;
    // BFS from every variable vertex over the bipartite graph; first edge
    // closing a level gives the shortest cycle through the root.
    std::vector<int> dist(nv + nf), parent(nv + nf);
    for (int s = 0; s < nv; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(parent.begin(), parent.end(), -1);
        std::vector<int> queue{s};
        dist[s] = 0;
        for (std::size_t qi = 0; qi < queue.size(); ++qi) {
            const int x = queue[qi];
            const bool is_var = x < nv;
            const auto& nbrs = is_var ? inc.copies_of_vertex[x] : inc.members_of_copy[x - nv];
            for (int yraw : nbrs) {
                const int y = is_var ? nv + yraw : yraw;
                if (y == parent[x]) continue;
                if (dist[y] < 0) {
                    dist[y] = dist[x] + 1;
                    parent[y] = x;
                    queue.push_back(y);
                } else {
                    const int cyc = dist[x] + dist[y] + 1;
                    if (best == 0 || cyc < best) best = cyc;
                }
            }
        }
    }
    return best;
}

} // namespace spectralab::lifts
