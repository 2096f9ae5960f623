#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cmath>
#include <cstdint>
#include <vector>

#include "spectralab/atom.hpp"
#include "spectralab/errors.hpp"

namespace spectralab::waves {

/// Default cap on materialized ball vertices.
inline constexpr std::size_t kDefaultBallBudget = 1u << 21;

/// A rooted radius-R section of the additive product of c atoms.  The
/// underlying structure is a tree of atom copies: the root belongs to c
/// copies, every other vertex to its parent copy plus c-1 fresh ones.
/// Vertices appear in BFS order (nondecreasing depth); depth counts atom
/// copies along the unique path to the root, i.e. half the
/// constraint-graph distance.  path_product is the product of signed atom
/// entries along that path (0 when the path crosses a non-edge).
struct ProductBall {
    struct Vertex {
        std::int32_t depth;
        std::int16_t group;
        std::int8_t path_product;
    };
    struct BallEdge {
        std::int32_t u;
        std::int32_t v;
        std::int8_t w;
    };

    std::vector<atoms::Atom> atom_list;
    int c = 0;
    int radius = 0;        // achieved radius
    bool pruned = false;   // zero-product subtrees dropped
    std::vector<Vertex> vertices;
    std::vector<BallEdge> edges;
    std::vector<std::size_t> depth_begin; // depth_begin[d] .. depth_begin[d+1] are the depth-d vertices

    double lambda1() const { return atom_list[0].lambda1; }
    double lambda2() const { return atom_list[0].lambda2; }
    std::int64_t minus_eig_product() const { return atom_list[0].minus_eig_product(); }
    double growth_rate() const { return (c - 1) * static_cast<double>(minus_eig_product()); }

    std::size_t count_at_depth(int d) const {
        if (d < 0 || d > radius) return 0;
        return depth_begin[d + 1] - depth_begin[d];
    }

    std::vector<long> vertex_degrees() const {
        std::vector<long> deg(vertices.size(), 0);
        for (const BallEdge& e : edges) {
            ++deg[e.u];
            ++deg[e.v];
        }
        return deg;
    }

    /// Adjacency of the section restricted to depth <= max_depth.
    Eigen::SparseMatrix<double> section_adjacency(int max_depth) const {
        const std::size_t cut = depth_begin[std::min(max_depth, radius) + 1];
        std::vector<Eigen::Triplet<double>> trip;
        for (const BallEdge& e : edges)
            if (static_cast<std::size_t>(e.u) < cut && static_cast<std::size_t>(e.v) < cut) {
                trip.emplace_back(e.u, e.v, static_cast<double>(e.w));
                trip.emplace_back(e.v, e.u, static_cast<double>(e.w));
            }
        Eigen::SparseMatrix<double> A(static_cast<long>(cut), static_cast<long>(cut));
        A.setFromTriplets(trip.begin(), trip.end());
        return A;
    }
};

namespace detail {

struct Frontier {
    std::int32_t id;
    std::int16_t group;
    std::int8_t prod;
    std::int16_t parent_copy; // copy group used to reach this vertex, -1 at root
};

inline ProductBall build_ball(const std::vector<atoms::Atom>& atom_list, int c, int R,
                              std::size_t budget, bool prune_zero, bool stop_at_budget,
                              int* achieved_out) {
    if (static_cast<int>(atom_list.size()) != c) throw ArityMismatch("build_product_ball: need c atoms");
    const int r = atom_list[0].r;
    for (const auto& a : atom_list) {
        atoms::validate(a);
        if (a.r != r) throw ArityMismatch("build_product_ball: atoms must share the vertex count");
    }
    const double scale = std::max(std::abs(atom_list[0].lambda1), std::abs(atom_list[0].lambda2));
    for (const auto& a : atom_list)
        if (std::abs(a.lambda1 - atom_list[0].lambda1) > 1e-9 * scale ||
            std::abs(a.lambda2 - atom_list[0].lambda2) > 1e-9 * scale)
            throw MixedEigenvalues("build_product_ball: atoms must share the eigenvalue pair");

    ProductBall ball;
    ball.atom_list = atom_list;
    ball.c = c;
    ball.pruned = prune_zero;
    ball.vertices.push_back({0, 0, 1});
    ball.depth_begin = {0, 1};

    std::vector<Frontier> frontier{{0, 0, 1, -1}}, next;
    int depth = 0;
    std::vector<std::int32_t> copy_ids(r);
    while (depth < R && !frontier.empty()) {
        next.clear();
        bool budget_hit = false;
        for (const Frontier& fr : frontier) {
            for (int j = 0; j < c && !budget_hit; ++j) {
                if (j == fr.parent_copy) continue;
                const auto& W = atom_list[j].weights;
                // materialize the members of this copy
                for (int g = 0; g < r; ++g) copy_ids[g] = -1;
                copy_ids[fr.group] = fr.id;
                for (int g = 0; g < r; ++g) {
                    if (g == fr.group) continue;
                    const int w = W(fr.group, g);
                    if (prune_zero && w == 0) continue;
                    if (ball.vertices.size() >= budget) {
                        if (stop_at_budget) { budget_hit = true; break; }
                        throw BallTooLarge("build_product_ball: vertex budget exceeded at depth " +
                                           std::to_string(depth + 1));
                    }
                    const auto id = static_cast<std::int32_t>(ball.vertices.size());
                    const auto prod = static_cast<std::int8_t>(fr.prod * w);
                    ball.vertices.push_back({depth + 1, static_cast<std::int16_t>(g), prod});
                    copy_ids[g] = id;
                    next.push_back({id, static_cast<std::int16_t>(g), prod, static_cast<std::int16_t>(j)});
                }
                if (budget_hit) break;
                for (int g = 0; g < r; ++g) {
                    if (copy_ids[g] < 0) continue;
                    for (int g2 = g + 1; g2 < r; ++g2) {
                        if (copy_ids[g2] < 0) continue;
                        const int w = W(g, g2);
                        if (w != 0)
                            ball.edges.push_back({copy_ids[g], copy_ids[g2], static_cast<std::int8_t>(w)});
                    }
                }
            }
            if (budget_hit) break;
        }
        if (budget_hit) {
            // drop the partially built level entirely so the ball is a clean section
            ball.vertices.resize(ball.depth_begin.back());
            std::erase_if(ball.edges, [&](const ProductBall::BallEdge& e) {
                return static_cast<std::size_t>(e.u) >= ball.vertices.size() ||
                       static_cast<std::size_t>(e.v) >= ball.vertices.size();
            });
            break;
        }
        ++depth;
        ball.depth_begin.push_back(ball.vertices.size());
        frontier.swap(next);
    }
    ball.radius = static_cast<int>(ball.depth_begin.size()) - 2;
    if (achieved_out) *achieved_out = ball.radius;
    return ball;
}

} // namespace detail

/// Breadth-first materialization of the radius-R ball.  Throws BallTooLarge
/// when more than `budget` vertices would be needed.  With prune_zero set,
/// subtrees hanging off a zero path product are skipped; this preserves all
/// witness-vector data (their entries are zero there) and every path-product
/// sum, at a fraction of the size.
inline ProductBall build_product_ball(const std::vector<atoms::Atom>& atom_list, int c, int R,
                                      std::size_t budget = kDefaultBallBudget, bool prune_zero = false) {
    if (R < 0) throw Error("build_product_ball: R must be >= 0");
    return detail::build_ball(atom_list, c, R, budget, prune_zero, false, nullptr);
}

/// Same, but stops growing when the budget binds and reports the achieved
/// radius in ball.radius.  Used by the "largest affordable L" flows.
inline ProductBall build_product_ball_to_budget(const std::vector<atoms::Atom>& atom_list, int c,
                                                int max_radius, std::size_t budget,
                                                bool prune_zero = true) {
    return detail::build_ball(atom_list, c, max_radius, budget, prune_zero, true, nullptr);
}

/// Exact (lhs, rhs) of the depth-t path-product square sum law:
///   sum over d(u, root)=t of prod_{path} w^2  =  c (c-1)^(t-1) (-l1 l2)^t.
/// Both sides in integer arithmetic; lhs is invariant under zero-pruning.
inline std::pair<std::int64_t, std::int64_t> growth_rate_check(const ProductBall& ball, int t) {
    if (t < 0 || t > ball.radius) throw Error("growth_rate_check: t out of range");
    if (t == 0) return {1, 1};
    std::int64_t lhs = 0;
    for (std::size_t i = ball.depth_begin[t]; i < ball.depth_begin[t + 1]; ++i) {
        const auto p = static_cast<std::int64_t>(ball.vertices[i].path_product);
        lhs += p * p;
    }
    const std::int64_t mp = ball.minus_eig_product();
    std::int64_t rhs = ball.c;
    for (int i = 0; i < t - 1; ++i) rhs *= (ball.c - 1);
    for (int i = 0; i < t; ++i) rhs *= mp;
    return {lhs, rhs};
}

/// Parameters of the band-edge witness family.
struct WitnessConfig {
    int s = +1;          // +1 targets the top band edge, -1 the bottom
    double delta = 0.05; // contraction, in (0, 1)
    int L = 0;           // truncation radius

    double rho(double gr) const { return s * (1.0 - delta) / std::sqrt(gr); }
};

/// f(u) = rho^depth(u) * path_product(u) over the whole ball.
inline Eigen::VectorXd witness_vector(const ProductBall& ball, const WitnessConfig& cfg) {
    if (cfg.L > ball.radius) throw Error("witness_vector: config.L exceeds ball radius");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw Error("witness_vector: delta must be in (0,1)");
    const double rho = cfg.rho(ball.growth_rate());
    Eigen::VectorXd f(static_cast<long>(ball.vertices.size()));
    double rho_pow = 1.0;
    int d = 0;
    for (std::size_t i = 0; i < ball.vertices.size(); ++i) {
        while (i >= ball.depth_begin[d + 1]) {
            ++d;
            rho_pow *= rho;
        }
        f(static_cast<long>(i)) = rho_pow * ball.vertices[i].path_product;
    }
    return f;
}

/// Zero the vector outside depth L and rescale to unit norm.
inline Eigen::VectorXd truncate_normalize(const ProductBall& ball, const Eigen::VectorXd& f, int L) {
    if (L > ball.radius || L < 0) throw Error("truncate_normalize: L out of range");
    Eigen::VectorXd g = f;
    for (std::size_t i = ball.depth_begin[L + 1]; i < ball.vertices.size(); ++i) g(static_cast<long>(i)) = 0.0;
    const double norm = g.norm();
    if (norm == 0.0) throw ZeroVector("truncate_normalize: zero vector");
    return g / norm;
}

/// <f, A f> / <f, f> using the ball's edges.  Requires f to vanish on the
/// boundary shell so the adjacency action is exact on the support.
inline double rayleigh_quotient(const ProductBall& ball, const Eigen::VectorXd& f) {
    for (std::size_t i = ball.depth_begin[ball.radius]; i < ball.vertices.size(); ++i)
        if (f(static_cast<long>(i)) != 0.0)
            throw SupportTouchesBoundary("rayleigh_quotient: support reaches the boundary shell");
    double num = 0.0;
    for (const ProductBall::BallEdge& e : ball.edges) num += 2.0 * e.w * f(e.u) * f(e.v);
    const double den = f.squaredNorm();
    if (den == 0.0) throw ZeroVector("rayleigh_quotient: zero vector");
    return num / den;
}

/// Closed-form l2^2 mass of the untruncated witness: the depth-t shell
/// carries (c/(c-1)) q^t for t >= 1 (with q = (1-delta)^2) and 1 at the
/// root, summing to 1 + c q / ((c-1)(1-q)).
inline double witness_norm_sq_infinite(int c, double delta) {
    const double q = (1.0 - delta) * (1.0 - delta);
    return 1.0 + (static_cast<double>(c) / (c - 1)) * q / (1.0 - q);
}

inline double witness_norm_sq_truncated(int c, double delta, int L) {
    const double q = (1.0 - delta) * (1.0 - delta);
    double sum = 0.0, qp = 1.0;
    for (int t = 1; t <= L; ++t) {
        qp *= q;
        sum += qp;
    }
    return 1.0 + (static_cast<double>(c) / (c - 1)) * sum;
}

/// Mass beyond depth L as a fraction of the untruncated mass.
inline double witness_tail_mass(int c, double delta, int L) {
    return 1.0 - witness_norm_sq_truncated(c, delta, L) / witness_norm_sq_infinite(c, delta);
}

/// Exact Rayleigh quotient of the depth-L truncated witness from the
/// layer-sum geometry: with q = (1-delta)^2, the depth-t shell carries
/// squared mass m_t (1 at the root, (c/(c-1)) q^t beyond), each expanding
/// vertex contributes 2 rho (-l1 l2) per copy through its children and
/// rho^2 (l1+l2)(-l1 l2) through sibling pairs, so
///   <f, A f> = d_X (2 rho + rho^2 (l1+l2)) * sum_{t<L} q^t.
/// Pass L < 0 for the untruncated quotient.
inline double witness_quotient_closed_form(int c, double lambda1, double lambda2, double delta, int s,
                                           int L) {
    const double mp = -lambda1 * lambda2;
    const double gr = (c - 1) * mp;
    const double d_x = c * mp;
    const double rho = s * (1.0 - delta) / std::sqrt(gr);
    const double q = (1.0 - delta) * (1.0 - delta);
    double geo, norm_sq;
    if (L < 0) {
        geo = 1.0 / (1.0 - q);
        norm_sq = witness_norm_sq_infinite(c, delta);
    } else {
        geo = 0.0;
        double qp = 1.0;
        for (int t = 0; t < L; ++t) {
            geo += qp;
            qp *= q;
        }
        norm_sq = witness_norm_sq_truncated(c, delta, L);
    }
    const double num = d_x * (2.0 * rho + rho * rho * (lambda1 + lambda2)) * geo;
    return num / norm_sq;
}

} // namespace spectralab::waves
