#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spectralab/spectra.hpp"
#include "spectralab/waves.hpp"

using namespace spectralab;
using Catch::Approx;

namespace {
std::vector<atoms::Atom> copies(const atoms::Atom& a, int c) {
    return std::vector<atoms::Atom>(c, a);
}
const double kSqrt2 = std::sqrt(2.0);
} // namespace

TEST_CASE("radius zero ball is a single root") {
    const auto ball = waves::build_product_ball(copies(atoms::make_complete(3), 3), 3, 0);
    CHECK(ball.vertices.size() == 1);
    CHECK(ball.edges.empty());
    CHECK(ball.radius == 0);
}

TEST_CASE("sorting-atom ball at c=2") {
    const auto ball = waves::build_product_ball(copies(atoms::make_sort4(), 2), 2, 2);
    // root joins 2 copies, each contributing 3 fresh vertices
    CHECK(ball.count_at_depth(0) == 1);
    CHECK(ball.count_at_depth(1) == 6);
    CHECK(ball.count_at_depth(2) == 18);
    // root degree = c * (-l1 l2) = 4
    CHECK(ball.vertex_degrees()[0] == 4);
}

TEST_CASE("single-edge atoms give the c-regular tree") {
    const int c = 3;
    const auto ball = waves::build_product_ball(copies(atoms::make_single_edge(), c), c, 5);
    CHECK(ball.count_at_depth(1) == 3);
    for (int t = 2; t <= 5; ++t) CHECK(ball.count_at_depth(t) == 3 * (1L << (t - 1)));
    const auto deg = ball.vertex_degrees();
    for (std::size_t v = 0; v < ball.depth_begin[5]; ++v) CHECK(deg[v] == c);
}

TEST_CASE("growth law holds with exact integers") {
    struct Case {
        atoms::Atom atom;
        int c;
    };
    for (const auto& [atom, c] : std::vector<Case>{{atoms::make_sort4(), 2},
                                                   {atoms::make_sort4(), 3},
                                                   {atoms::make_complete(3), 3}}) {
        INFO(atom.name << " c=" << c);
        const auto ball = waves::build_product_ball(copies(atom, c), c, 5);
        for (int t = 0; t <= 5; ++t) {
            const auto [lhs, rhs] = waves::growth_rate_check(ball, t);
            REQUIRE(lhs == rhs);
        }
        // pruning preserves the sums
        const auto pruned = waves::build_product_ball(copies(atom, c), c, 5,
                                                      waves::kDefaultBallBudget, true);
        for (int t = 0; t <= 5; ++t) {
            const auto [lhs, rhs] = waves::growth_rate_check(pruned, t);
            REQUIRE(lhs == rhs);
        }
    }
    // spot values: sort4 c=2 gives 4, 8, 16 at t = 1, 2, 3; complete:3 c=3 gives 6 at t=1
    const auto b1 = waves::build_product_ball(copies(atoms::make_sort4(), 2), 2, 3);
    CHECK(waves::growth_rate_check(b1, 1).first == 4);
    CHECK(waves::growth_rate_check(b1, 3).first == 16);
    const auto b2 = waves::build_product_ball(copies(atoms::make_complete(3), 3), 3, 1);
    CHECK(waves::growth_rate_check(b2, 1).first == 6);
}

TEST_CASE("interior degree law") {
    struct Case {
        atoms::Atom atom;
        int c;
    };
    for (const auto& [atom, c] : std::vector<Case>{{atoms::make_sort4(), 2},
                                                   {atoms::make_complete(3), 3},
                                                   {atoms::make_forrelation(2), 2}}) {
        INFO(atom.name << " c=" << c);
        const auto ball = waves::build_product_ball(copies(atom, c), c, 3);
        const long d_x = c * atom.minus_eig_product();
        const auto deg = ball.vertex_degrees();
        for (std::size_t v = 0; v < ball.depth_begin[3]; ++v) REQUIRE(deg[v] == d_x);
    }
}

TEST_CASE("ball budget guard") {
    CHECK_THROWS_AS(waves::build_product_ball(copies(atoms::make_sort4(), 2), 2, 12, 1000),
                    BallTooLarge);
    const auto ball =
        waves::build_product_ball_to_budget(copies(atoms::make_sort4(), 2), 2, 30, 5000, true);
    CHECK(ball.radius < 30);
    CHECK(ball.vertices.size() <= 5000);
    // fully materialized levels only
    CHECK(ball.depth_begin.back() == ball.vertices.size());
}

TEST_CASE("witness vector structure") {
    const auto ball = waves::build_product_ball(copies(atoms::make_sort4(), 2), 2, 8,
                                                waves::kDefaultBallBudget, true);
    const waves::WitnessConfig plus{+1, 0.1, 8};
    const auto f = waves::witness_vector(ball, plus);
    CHECK(f(0) == 1.0); // root entry: rho^0 * empty product

    // s = -1 flips exactly the odd-depth entries
    const auto g = waves::witness_vector(ball, {-1, 0.1, 8});
    for (std::size_t v = 0; v < ball.vertices.size(); ++v) {
        const int d = ball.vertices[v].depth;
        CHECK(g(static_cast<long>(v)) ==
              Approx((d % 2 ? -1.0 : 1.0) * f(static_cast<long>(v))).margin(1e-15));
    }

    // truncated norm matches the closed form
    for (int L : {0, 3, 6}) {
        Eigen::VectorXd h = f;
        for (std::size_t v = ball.depth_begin[L + 1]; v < ball.vertices.size(); ++v)
            h(static_cast<long>(v)) = 0.0;
        CHECK(h.squaredNorm() == Approx(waves::witness_norm_sq_truncated(2, 0.1, L)).epsilon(1e-12));
    }
}

TEST_CASE("truncate and normalize") {
    const auto ball = waves::build_product_ball(copies(atoms::make_sort4(), 2), 2, 6,
                                                waves::kDefaultBallBudget, true);
    const auto f = waves::witness_vector(ball, {+1, 0.1, 6});

    const auto g0 = waves::truncate_normalize(ball, f, 0);
    CHECK(g0(0) == 1.0);
    CHECK(g0.squaredNorm() == Approx(1.0));

    const auto gR = waves::truncate_normalize(ball, f, ball.radius);
    CHECK((gR - f / f.norm()).cwiseAbs().maxCoeff() < 1e-15);

    // the tail-targeted truncation radius L(eps) achieves tail <= eps
    const double eps = 0.01, delta = 0.2;
    const int L = static_cast<int>(std::ceil(std::log(eps) / (2.0 * std::log(1.0 - delta))));
    CHECK(L == 11);
    CHECK(waves::witness_tail_mass(2, delta, L) <= eps);
}

TEST_CASE("rayleigh quotient of witnesses approaches the band edges") {
    const auto ball = waves::build_product_ball(copies(atoms::make_sort4(), 2), 2, 12,
                                                waves::kDefaultBallBudget, true);
    const double r_x = 2.0 * kSqrt2;

    // indicator of the root has quotient 0 (zero diagonal)
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(static_cast<long>(ball.vertices.size()));
    e0(0) = 1.0;
    CHECK(waves::rayleigh_quotient(ball, e0) == 0.0);

    const auto fp = waves::witness_vector(ball, {+1, 0.05, 12});
    const auto gp = waves::truncate_normalize(ball, fp, 11);
    const double qp = waves::rayleigh_quotient(ball, gp);
    CHECK(qp >= r_x - 0.25);
    CHECK(qp <= r_x + 1e-9);

    const auto fm = waves::witness_vector(ball, {-1, 0.05, 12});
    const auto gm = waves::truncate_normalize(ball, fm, 11);
    const double qm = waves::rayleigh_quotient(ball, gm);
    CHECK(qm <= -r_x + 0.25);

    // support touching the boundary shell is rejected
    CHECK_THROWS_AS(waves::rayleigh_quotient(ball, fp), SupportTouchesBoundary);
}

TEST_CASE("ball quotient equals the layer-sum closed form exactly") {
    struct Case {
        atoms::Atom atom;
        int c;
        double delta;
    };
    for (const auto& [atom, c, delta] : std::vector<Case>{{atoms::make_sort4(), 2, 0.05},
                                                          {atoms::make_sort4(), 3, 0.1},
                                                          {atoms::make_complete(3), 3, 0.1}}) {
        INFO(atom.name << " c=" << c << " delta=" << delta);
        const auto ball =
            waves::build_product_ball(copies(atom, c), c, 7, waves::kDefaultBallBudget, true);
        for (int s : {+1, -1}) {
            const auto f = waves::witness_vector(ball, {s, delta, 7});
            const auto g = waves::truncate_normalize(ball, f, 6);
            const double q = waves::rayleigh_quotient(ball, g);
            const double closed =
                waves::witness_quotient_closed_form(c, atom.lambda1, atom.lambda2, delta, s, 6);
            REQUIRE(q == Approx(closed).margin(1e-9));
        }
    }
}

TEST_CASE("untruncated closed-form quotient is monotone as delta decreases") {
    // as delta drops 0.2 -> 0.1 -> 0.05 the witness pushes toward the band
    // edge; truncation at any affordable L masks this, so the monotonicity
    // statement lives at L = infinity where the geometric sums are exact
    for (const auto& [l1, l2, c] : std::vector<std::tuple<double, double, int>>{
             {kSqrt2, -kSqrt2, 2}, {2.0, -1.0, 3}}) {
        double prev_plus = -1e9, prev_minus = 1e9;
        for (double delta : {0.2, 0.1, 0.05}) {
            const double qp = waves::witness_quotient_closed_form(c, l1, l2, delta, +1, -1);
            const double qm = waves::witness_quotient_closed_form(c, l1, l2, delta, -1, -1);
            CHECK(qp >= prev_plus - 1e-9);
            CHECK(qm <= prev_minus + 1e-9);
            prev_plus = qp;
            prev_minus = qm;
        }
        const double gr = (c - 1) * (-l1 * l2);
        CHECK(prev_plus <= l1 + l2 + 2.0 * std::sqrt(gr) + 1e-12);
        CHECK(prev_minus >= l1 + l2 - 2.0 * std::sqrt(gr) - 1e-12);
    }
}

TEST_CASE("finite sections stay inside the band and expand with radius") {
    const auto atom = atoms::make_sort4();
    const int c = 2;
    const double band_hi = 2.0 * kSqrt2, band_lo = -2.0 * kSqrt2;

    const auto small = waves::build_product_ball(copies(atom, c), c, 6,
                                                 waves::kDefaultBallBudget, true);
    const auto large = waves::build_product_ball(copies(atom, c), c, 12,
                                                 waves::kDefaultBallBudget, true);
    const auto [lo6, hi6] = spectra::extreme_eigs_sparse(small.section_adjacency(5));
    const auto [lo12, hi12] = spectra::extreme_eigs_sparse(large.section_adjacency(11));

    // containment (principal sections of the product operator)
    CHECK(hi6 <= band_hi + 1e-8);
    CHECK(hi12 <= band_hi + 1e-8);
    CHECK(lo6 >= band_lo - 1e-8);
    CHECK(lo12 >= band_lo - 1e-8);
    // the band-coverage deficit shrinks as the radius grows
    CHECK(hi12 >= hi6 - 1e-8);
    CHECK(lo12 <= lo6 + 1e-8);
}
