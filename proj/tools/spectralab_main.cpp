// spectralab command-line driver: generate lifted instances, dump nomadic
// operators, check the determinant identity and spectrum correspondence,
// materialize product balls, certify SDP values, and run batch experiments.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "spectralab/spectralab.hpp"

namespace sl = spectralab;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNoConvergence = 3;

struct GlobalOpts {
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out;
    std::string format = "csv";
};

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw sl::Error("cannot open for writing: " + path);
    f << text;
}

sl::lifts::InstanceGraph load_instance(const std::string& path) {
    return sl::io::instance_from_json(sl::io::load_json(path));
}

void emit_table(const sl::experiments::Table& table, const GlobalOpts& g) {
    if (g.format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : table.rows) {
            nlohmann::json row;
            for (std::size_t i = 0; i < table.columns.size(); ++i) row[table.columns[i]] = r[i];
            rows.push_back(row);
        }
        nlohmann::json j{{"version", sl::experiments::kVersion}, {"rows", rows}};
        write_text(g.out, j.dump(2) + "\n");
    } else {
        write_text(g.out, table.to_csv());
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-eigenvalue CSP lift laboratory"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    GlobalOpts g;
    app.add_option("--seed", g.seed, "base random seed");
    app.add_option("--threads", g.threads, "worker threads (0 = SPECTRA_LAB_THREADS or hardware)");
    app.add_option("--out", g.out, "output path (default stdout)");
    app.add_option("--format", g.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

    // ---- atom ----
    auto* atom_cmd = app.add_subcommand("atom", "construct and validate atoms");
    auto* atom_show = atom_cmd->add_subcommand("show", "emit an atom as JSON");
    std::string atom_spec = "sort4";
    atom_show->add_option("--spec", atom_spec, "edge | complete:R | sort4 | forrelation:K");
    atom_show->callback([&] {
        const auto a = sl::experiments::parse_atom_token(atom_spec);
        sl::atoms::validate(a);
        write_text(g.out, sl::io::to_json(a).dump(2) + "\n");
    });
    auto* atom_validate = atom_cmd->add_subcommand("validate", "validate an atom JSON file");
    std::string atom_in;
    atom_validate->add_option("--in", atom_in, "atom JSON path")->required();
    atom_validate->callback([&] {
        const auto a = sl::io::atom_from_json(sl::io::load_json(atom_in));
        sl::atoms::validate(a);
        std::cout << "ok: " << a.name << " r=" << a.r << " lambda1=" << a.lambda1
                  << " lambda2=" << a.lambda2 << "\n";
    });

    // ---- lift gen ----
    auto* lift_cmd = app.add_subcommand("lift", "constraint-graph lifts and instances");
    auto* lift_gen = lift_cmd->add_subcommand("gen", "generate a random lifted instance");
    int gen_r = 4, gen_c = 2, gen_n = 4;
    std::string gen_atoms = "sort4", gen_negation = "variable";
    lift_gen->add_option("--r", gen_r, "atom arity (checked against the atom spec)");
    lift_gen->add_option("--c", gen_c, "constraints per variable")->required();
    lift_gen->add_option("--n", gen_n, "lift size")->required();
    lift_gen->add_option("--atoms", gen_atoms, "comma list: edge|complete:R|sort4|forrelation:K");
    lift_gen->add_option("--negation", gen_negation, "constraint|variable|none")
        ->check(CLI::IsMember({"constraint", "variable", "none"}));
    lift_gen->callback([&] {
        const auto atom_list = sl::experiments::parse_atoms(gen_atoms, gen_c);
        if (lift_gen->count("--r") && atom_list[0].r != gen_r)
            throw sl::ArityMismatch("--r does not match the atom spec arity");
        const auto lift = sl::lifts::random_lift(atom_list[0].r, gen_c, gen_n, g.seed);
        const auto inst = sl::lifts::make_instance(
            lift, atom_list, {sl::lifts::negation_from_string(gen_negation), g.seed});
        write_text(g.out, sl::io::to_json(inst).dump(2) + "\n");
    });

    // ---- nomadic dump ----
    auto* nomadic_cmd = app.add_subcommand("nomadic", "nomadic walk operator");
    auto* nomadic_dump = nomadic_cmd->add_subcommand("dump", "write B in Matrix Market format");
    std::string nd_in;
    nomadic_dump->add_option("--in", nd_in, "instance JSON path")->required();
    nomadic_dump->callback([&] {
        const auto inst = load_instance(nd_in);
        const auto op = sl::nomadic::build_nomadic(inst);
        if (g.out.empty() || g.out == "-") sl::io::write_matrix_market(op, std::cout);
        else sl::io::write_matrix_market(op, g.out);
    });

    // ---- ihara check ----
    auto* ihara_cmd = app.add_subcommand("ihara", "determinant identity and spectrum correspondence");
    auto* ihara_check = ihara_cmd->add_subcommand("check", "verify the identity on an instance");
    std::string ic_in, ic_report;
    int ic_samples = 20;
    double ic_tol = 1e-8;
    ihara_check->add_option("--in", ic_in, "instance JSON path")->required();
    ihara_check->add_option("--samples", ic_samples, "number of t samples");
    ihara_check->add_option("--tol", ic_tol, "residual tolerance");
    ihara_check->add_option("--report", ic_report, "report JSON path");
    ihara_check->callback([&] {
        const auto inst = load_instance(ic_in);
        const auto ts = sl::ihara::residual_t_samples(inst, ic_samples, g.seed);
        std::vector<double> residuals;
        double worst = 0.0;
        for (double t : ts) {
            residuals.push_back(sl::ihara::ihara_bass_residual(inst, t));
            worst = std::max(worst, residuals.back());
        }
        auto rep = sl::ihara::spectrum_correspondence(inst, 1e-6);
        const bool ok = worst <= ic_tol && rep.pass;
        std::printf("identity: max residual %.3e over %d samples (tol %.1e) -> %s\n", worst,
                    ic_samples, ic_tol, worst <= ic_tol ? "pass" : "FAIL");
        std::printf("spectrum: max matched distance %.3e (tol 1e-06) -> %s\n", rep.max_residual,
                    rep.pass ? "pass" : "FAIL");
        if (!ic_report.empty()) sl::io::save_json(sl::io::to_json(rep, &residuals), ic_report);
        if (!ok) throw sl::Error("ihara check failed");
    });

    // ---- waves ----
    auto* waves_cmd = app.add_subcommand("waves", "additive-product balls and witness vectors");
    auto* waves_ball = waves_cmd->add_subcommand("ball", "materialize a radius-R ball as JSON");
    std::string wb_atoms = "sort4";
    int wb_c = 2, wb_radius = 4;
    bool wb_prune = false;
    std::size_t wb_budget = sl::waves::kDefaultBallBudget;
    waves_ball->add_option("--atoms", wb_atoms, "atom spec");
    waves_ball->add_option("--c", wb_c, "copies per vertex")->required();
    waves_ball->add_option("--radius", wb_radius, "ball radius")->required();
    waves_ball->add_option("--budget", wb_budget, "vertex budget");
    waves_ball->add_flag("--prune-zero", wb_prune, "drop zero-path-product subtrees");
    waves_ball->callback([&] {
        const auto atom_list = sl::experiments::parse_atoms(wb_atoms, wb_c);
        const auto ball = sl::waves::build_product_ball(atom_list, wb_c, wb_radius, wb_budget, wb_prune);
        nlohmann::json vertices = nlohmann::json::array();
        for (const auto& v : ball.vertices)
            vertices.push_back({{"depth", v.depth}, {"group", v.group}, {"path_product", v.path_product}});
        nlohmann::json edges = nlohmann::json::array();
        for (const auto& e : ball.edges) edges.push_back({{"u", e.u}, {"v", e.v}, {"w", e.w}});
        nlohmann::json j{{"c", wb_c},
                         {"radius", ball.radius},
                         {"pruned", ball.pruned},
                         {"atoms", wb_atoms},
                         {"vertices", vertices},
                         {"edges", edges}};
        write_text(g.out, j.dump() + "\n");
    });
    auto* waves_rayleigh = waves_cmd->add_subcommand("rayleigh", "band-edge witness Rayleigh quotient");
    std::string wr_atoms = "sort4";
    int wr_c = 2, wr_s = +1, wr_L = 0;
    double wr_delta = 0.05;
    std::size_t wr_budget = sl::waves::kDefaultBallBudget;
    waves_rayleigh->add_option("--atoms", wr_atoms, "atom spec");
    waves_rayleigh->add_option("--c", wr_c, "copies per vertex");
    waves_rayleigh->add_option("--s", wr_s, "+1 or -1 band edge");
    waves_rayleigh->add_option("--delta", wr_delta, "contraction in (0,1)");
    waves_rayleigh->add_option("--L", wr_L, "truncation radius (0 = largest affordable)");
    waves_rayleigh->add_option("--budget", wr_budget, "ball vertex budget");
    waves_rayleigh->callback([&] {
        const auto atom_list = sl::experiments::parse_atoms(wr_atoms, wr_c);
        int L = wr_L;
        sl::waves::ProductBall ball =
            L > 0 ? sl::waves::build_product_ball(atom_list, wr_c, L + 1, wr_budget, true)
                  : sl::waves::build_product_ball_to_budget(atom_list, wr_c, 64, wr_budget, true);
        if (L == 0) L = std::max(ball.radius - 1, 0);
        const sl::waves::WitnessConfig cfg{wr_s, wr_delta, L};
        const auto f = sl::waves::witness_vector(ball, cfg);
        const auto fL = sl::waves::truncate_normalize(ball, f, L);
        const double q = sl::waves::rayleigh_quotient(ball, fL);
        const double tail = sl::waves::witness_tail_mass(wr_c, wr_delta, L);
        const auto prof = sl::atoms::profile(atom_list[0], wr_c);
        std::printf("s=%+d delta=%g L=%d ball_vertices=%zu\n", wr_s, wr_delta, L, ball.vertices.size());
        std::printf("rayleigh_quotient=%.9f band_edge=%.9f tail_mass=%.3e\n", q,
                    wr_s > 0 ? prof.band_hi : prof.band_lo, tail);
    });

    // ---- sdp sandwich ----
    auto* sdp_cmd = app.add_subcommand("sdp", "SDP value certification");
    auto* sdp_sandwich = sdp_cmd->add_subcommand("sandwich", "witness / eigenvalue sandwich for an instance");
    std::string ss_in;
    double ss_delta = 0.05;
    int ss_L = 2;
    sdp_sandwich->add_option("--in", ss_in, "instance JSON path")->required();
    sdp_sandwich->add_option("--delta", ss_delta, "witness contraction");
    sdp_sandwich->add_option("--L", ss_L, "witness truncation radius");
    sdp_sandwich->callback([&] {
        const auto inst = load_instance(ss_in);
        const auto rep = sl::sdp::sandwich(inst, ss_delta, ss_L);
        write_text(g.out, sl::io::to_json(rep).dump(2) + "\n");
    });

    // ---- experiment ----
    auto* xp = app.add_subcommand("experiment", "batch experiment driver");
    std::string xp_kind = "threshold_table", xp_atoms = "sort4", xp_negation = "variable";
    bool xp_gnuplot = false;
    sl::experiments::ExperimentSpec spec;
    std::vector<int> xp_nlist;
    xp->add_option("--kind", xp_kind, "spectrum_b|boxplot|sandwich_sweep|threshold_table")
        ->check(CLI::IsMember({"spectrum_b", "boxplot", "sandwich_sweep", "threshold_table"}));
    xp->add_option("--atoms", xp_atoms, "atom spec");
    xp->add_option("--c", spec.c, "constraints per variable");
    xp->add_option("--c-min", spec.c_min, "range start (boxplot)");
    xp->add_option("--c-max", spec.c_max, "range end (boxplot)");
    xp->add_option("--n", spec.n, "lift size");
    xp->add_option("--n-list", xp_nlist, "lift sizes (sandwich sweep)");
    xp->add_option("--seeds", spec.seeds, "number of seeds");
    xp->add_option("--negation", xp_negation, "constraint|variable|none");
    xp->add_option("--delta", spec.delta, "witness contraction");
    xp->add_option("--L", spec.L, "witness truncation radius");
    xp->add_flag("--gnuplot", xp_gnuplot, "emit a plain-text gnuplot script next to the CSV");
    xp->callback([&] {
        spec.atoms_spec = xp_atoms;
        spec.negation = sl::lifts::negation_from_string(xp_negation);
        spec.base_seed = g.seed;
        spec.threads = g.threads;
        spec.n_list = xp_nlist;
        if (xp_kind == "spectrum_b") spec.kind = sl::experiments::Kind::SpectrumB;
        else if (xp_kind == "boxplot") spec.kind = sl::experiments::Kind::Boxplot;
        else if (xp_kind == "sandwich_sweep") spec.kind = sl::experiments::Kind::SandwichSweep;
        else spec.kind = sl::experiments::Kind::ThresholdTable;
        emit_table(sl::experiments::run(spec), g);
        if (xp_gnuplot && !g.out.empty() && g.out != "-" && g.format == "csv")
            write_text(g.out + ".gp", sl::experiments::gnuplot_script(spec, g.out));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const sl::NoConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoConvergence;
    } catch (const sl::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return 0;
}
