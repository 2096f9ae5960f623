#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "spectralab/atom.hpp"
#include "spectralab/constraint_graph.hpp"
#include "spectralab/errors.hpp"
#include "spectralab/ihara.hpp"
#include "spectralab/instance.hpp"
#include "spectralab/nomadic.hpp"
#include "spectralab/sdp.hpp"
#include "spectralab/spectra.hpp"

namespace spectralab::experiments {

inline constexpr const char* kVersion = "spectralab 0.1.0";

/// Parse an atom family spec: comma-separated tokens from
/// {edge, complete:R, sort4, forrelation:K}.  A single token is replicated
/// c times; otherwise exactly c tokens are required.
inline atoms::Atom parse_atom_token(const std::string& tok) {
    if (tok == "edge") return atoms::make_single_edge();
    if (tok == "sort4") return atoms::make_sort4();
    if (tok.rfind("complete:", 0) == 0) return atoms::make_complete(std::stoi(tok.substr(9)));
    if (tok.rfind("forrelation:", 0) == 0) return atoms::make_forrelation(std::stoi(tok.substr(12)));
    throw ParseError("unknown atom token: " + tok);
}

inline std::vector<atoms::Atom> parse_atoms(const std::string& spec, int c) {
    std::vector<std::string> tokens;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) tokens.push_back(tok);
    if (tokens.empty()) throw ParseError("empty atom spec");
    if (static_cast<int>(tokens.size()) == 1) tokens.assign(c, tokens[0]);
    if (static_cast<int>(tokens.size()) != c)
        throw ParseError("atom spec must have 1 or c tokens");
    std::vector<atoms::Atom> out;
    for (const auto& t : tokens) out.push_back(parse_atom_token(t));
    return out;
}

/// Thread count resolution: explicit value > SPECTRA_LAB_THREADS > hardware.
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SPECTRA_LAB_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Run job(i) for i in [0, count) on a bounded pool; results land in index
/// order so downstream output is independent of scheduling.
template <typename T>
std::vector<T> parallel_map(int count, int threads, const std::function<T(int)>& job) {
    std::vector<T> results(count);
    if (count == 0) return results;
    threads = std::min(std::max(threads, 1), count);
    if (threads == 1) {
        for (int i = 0; i < count; ++i) results[i] = job(i);
        return results;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    results[i] = job(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return results;
}

/// Fixed-format float so CSV output is byte-stable run to run.
inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::string to_csv(bool version_header = true) const {
        std::string out;
        if (version_header) {
            out += "# ";
            out += kVersion;
            out += "\n";
        }
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out += ",";
            out += columns[i];
        }
        out += "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) out += ",";
                out += row[i];
            }
            out += "\n";
        }
        return out;
    }

    /// Everything below the version header; the determinism contract
    /// applies to this part.
    std::string data_section() const { return to_csv(false); }
};

enum class Kind { SpectrumB, Boxplot, SandwichSweep, ThresholdTable };

struct ExperimentSpec {
    Kind kind = Kind::ThresholdTable;
    std::string atoms_spec = "sort4";
    int c = 2;
    int c_min = 2;
    int c_max = 2;
    int n = 15;
    std::vector<int> n_list;
    int seeds = 1;
    std::uint64_t base_seed = 1;
    lifts::Negation negation = lifts::Negation::Variable;
    int threads = 0;
    double delta = 0.05;
    int L = 2;
};

inline lifts::InstanceGraph instance_for(const ExperimentSpec& spec, int c, int n, std::uint64_t seed) {
    if (n < 1) throw InvalidArity("experiment: n must be >= 1");
    const auto atom_list = parse_atoms(spec.atoms_spec, c);
    const auto lift = lifts::random_lift(atom_list[0].r, c, n, seed);
    return lifts::make_instance(lift, atom_list, {spec.negation, seed});
}

/// Eigenvalues of B classified against the closed-form prediction.  One row
/// per eigenvalue: seed, re, im, class, residual, sqrt_gr.
inline Table run_spectrum_B(const ExperimentSpec& spec) {
    Table t;
    t.columns = {"seed", "re", "im", "class", "residual", "sqrt_gr"};
    const auto reports = parallel_map<std::pair<std::uint64_t, ihara::SpectrumReport>>(
        spec.seeds, resolve_threads(spec.threads), [&](int i) {
            const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(i);
            const auto inst = instance_for(spec, spec.c, spec.n, seed);
            return std::make_pair(seed, ihara::spectrum_correspondence(inst, 1e-6));
        });
    const auto a0 = parse_atoms(spec.atoms_spec, spec.c)[0];
    const double sqrt_gr = std::sqrt((spec.c - 1) * static_cast<double>(a0.minus_eig_product()));
    for (const auto& [seed, rep] : reports)
        for (const auto& m : rep.matches)
            t.rows.push_back({std::to_string(seed), fmt(m.computed.real()), fmt(m.computed.imag()),
                              ihara::to_string(m.source), fmt(m.residual), fmt(sqrt_gr)});
    return t;
}

namespace detail {

inline double quantile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double idx = p * (static_cast<double>(v.size()) - 1);
    const auto lo = static_cast<std::size_t>(idx);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = idx - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

} // namespace detail

/// Per-c quartile summary of rho(A) and rho(B) over random instances,
/// together with the band-edge predictions l1+l2+2*sqrt(gr) and sqrt(gr).
inline Table run_boxplot(const ExperimentSpec& spec) {
    Table t;
    t.columns = {"c",        "samples",    "base_seed",  "rhoA_q1", "rhoA_median",
                 "rhoA_q3",  "rhoA_bound", "rhoB_q1",    "rhoB_median", "rhoB_q3",
                 "rhoB_bound"};
    for (int c = spec.c_min; c <= spec.c_max; ++c) {
        const auto samples = parallel_map<std::pair<double, double>>(
            spec.seeds, resolve_threads(spec.threads), [&](int i) {
                const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(i);
                const auto inst = instance_for(spec, c, spec.n, seed);
                const Eigen::VectorXd nu = spectra::eig_symmetric(inst.adjacency_dense());
                const double rhoA = std::max(std::abs(nu(0)), std::abs(nu(nu.size() - 1)));
                const auto op = nomadic::build_nomadic(inst);
                const Eigen::VectorXcd mu = spectra::eig_general(op.dense());
                double rhoB = 0.0;
                for (Eigen::Index k = 0; k < mu.size(); ++k) rhoB = std::max(rhoB, std::abs(mu(k)));
                return std::make_pair(rhoA, rhoB);
            });
        std::vector<double> rhoA, rhoB;
        for (const auto& [a, b] : samples) {
            rhoA.push_back(a);
            rhoB.push_back(b);
        }
        const auto a0 = parse_atoms(spec.atoms_spec, c)[0];
        const double gr = (c - 1) * static_cast<double>(a0.minus_eig_product());
        const double boundA = a0.lambda1 + a0.lambda2 + 2.0 * std::sqrt(gr);
        t.rows.push_back({std::to_string(c), std::to_string(spec.seeds), std::to_string(spec.base_seed),
                          fmt(detail::quantile(rhoA, 0.25)), fmt(detail::quantile(rhoA, 0.5)),
                          fmt(detail::quantile(rhoA, 0.75)), fmt(boundA),
                          fmt(detail::quantile(rhoB, 0.25)), fmt(detail::quantile(rhoB, 0.5)),
                          fmt(detail::quantile(rhoB, 0.75)), fmt(std::sqrt(gr))});
    }
    return t;
}

/// Witness/eigenvalue sandwich across lift sizes: one row per (n, seed).
inline Table run_sandwich_sweep(const ExperimentSpec& spec) {
    Table t;
    t.columns = {"n", "seed", "sdp_lower", "eig_upper", "gap", "formula", "bad_vertices", "tail_mass"};
    std::vector<int> ns = spec.n_list.empty() ? std::vector<int>{spec.n} : spec.n_list;
    const auto a0 = parse_atoms(spec.atoms_spec, spec.c)[0];
    const double formula = sdp::sdp_value_formula(a0.lambda1, a0.lambda2, spec.c);
    for (int n : ns) {
        const auto rows = parallel_map<std::vector<std::string>>(
            spec.seeds, resolve_threads(spec.threads), [&](int i) {
                const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(i);
                const auto inst = instance_for(spec, spec.c, n, seed);
                const auto rep = sdp::sandwich(inst, spec.delta, spec.L, /*want_opt=*/false);
                return std::vector<std::string>{
                    std::to_string(n),          std::to_string(seed), fmt(rep.sdp_lower),
                    fmt(rep.sdp_upper),         fmt(rep.sdp_upper - rep.sdp_lower),
                    fmt(formula),               std::to_string(rep.bad_vertex_count),
                    fmt(rep.tail_mass)};
            });
        for (const auto& r : rows) t.rows.push_back(r);
    }
    return t;
}

/// Root of 1/2 + formula(sqrt2, -sqrt2, c) = 1 in continuous c, by
/// bisection; lands at 4 + 2*sqrt(2).
inline double sort4_threshold_root() {
    auto g = [](double c) {
        return 0.5 + (2.0 * std::sqrt(2.0 * (c - 1.0))) / (2.0 * c) - 1.0;
    };
    double lo = 5.0, hi = 8.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

/// Closed-form SDP values for the Hadamard-block family across (k, c),
/// with the satisfiability proxy 1/2 + value and its unsat flag (the
/// k = 1 row is the sorting predicate).  The threshold root column repeats
/// the continuous crossing point.
inline Table run_threshold_table() {
    Table t;
    t.columns = {"family", "k", "c", "formula", "half_plus_formula", "certifies_unsat", "threshold_root_k1"};
    const double root = sort4_threshold_root();
    for (int k = 0; k <= 4; ++k) {
        const double lam = std::pow(2.0, k / 2.0);
        for (int c = 2; c <= 10; ++c) {
            const double val = sdp::sdp_value_formula(lam, -lam, c);
            const double half_plus = 0.5 + val;
            t.rows.push_back({"forrelation", std::to_string(k), std::to_string(c), fmt(val),
                              fmt(half_plus), half_plus < 1.0 ? "true" : "false", fmt(root)});
        }
    }
    return t;
}

/// Plain-text gnuplot script for a table written to csv_path.  Keeps the
/// core free of plotting dependencies.
inline std::string gnuplot_script(const ExperimentSpec& spec, const std::string& csv_path) {
    std::string s = "set datafile separator ','\n";
    switch (spec.kind) {
        case Kind::SpectrumB:
            s += "set size ratio -1\nset xlabel 're'\nset ylabel 'im'\n";
            s += "plot '" + csv_path + "' skip 2 using 2:3 with points pt 7 ps 0.4 title 'eig(B)'\n";
            break;
        case Kind::Boxplot:
            s += "set xlabel 'c'\nset ylabel 'spectral radius'\n";
            s += "plot '" + csv_path + "' skip 2 using 1:5:4:6 with yerrorbars title 'rho(A) quartiles', \\\n";
            s += "     '" + csv_path + "' skip 2 using 1:7 with lines title 'l1+l2+2 sqrt(gr)', \\\n";
            s += "     '" + csv_path + "' skip 2 using 1:9:8:10 with yerrorbars title 'rho(B) quartiles', \\\n";
            s += "     '" + csv_path + "' skip 2 using 1:11 with lines title 'sqrt(gr)'\n";
            break;
        case Kind::SandwichSweep:
            s += "set xlabel 'n'\nset ylabel 'edge-average value'\n";
            s += "plot '" + csv_path + "' skip 2 using 1:3 with points title 'witness lower', \\\n";
            s += "     '" + csv_path + "' skip 2 using 1:4 with points title 'eigenvalue upper', \\\n";
            s += "     '" + csv_path + "' skip 2 using 1:6 with lines title 'model formula'\n";
            break;
        case Kind::ThresholdTable:
            s += "set xlabel 'c'\nset ylabel '1/2 + value (k=1)'\n";
            s += "plot '" + csv_path + "' skip 2 using 3:($2==1 ? $5 : 1/0) with linespoints title 'k=1', 1 title ''\n";
            break;
    }
    return s;
}

inline Table run(const ExperimentSpec& spec) {
    switch (spec.kind) {
        case Kind::SpectrumB: return run_spectrum_B(spec);
        case Kind::Boxplot: return run_boxplot(spec);
        case Kind::SandwichSweep: return run_sandwich_sweep(spec);
        case Kind::ThresholdTable: return run_threshold_table();
    }
    throw Error("unknown experiment kind");
}

/// One-sided paired sign test that a[i] > b[i] holds more often than
/// chance: true when #{a_i > b_i} reaches the smallest k with
/// P(Bin(n, 1/2) >= k) <= alpha.  Ties count against the hypothesis.
inline bool paired_sign_test_decreasing(const std::vector<double>& a, const std::vector<double>& b,
                                        double alpha = 0.05) {
    if (a.size() != b.size() || a.empty()) throw Error("sign test: size mismatch");
    const int n = static_cast<int>(a.size());
    int wins = 0;
    for (int i = 0; i < n; ++i)
        if (a[i] > b[i]) ++wins;
    // binomial tail P(X >= k) under p = 1/2
    std::vector<double> pmf(n + 1);
    double logc = 0.0;
    for (int k = 0; k <= n; ++k) {
        pmf[k] = std::exp(logc - n * std::log(2.0));
        logc += std::log(static_cast<double>(n - k)) - std::log(static_cast<double>(k + 1));
    }
    int critical = n + 1;
    double tail = 0.0;
    for (int k = n; k >= 0; --k) {
        tail += pmf[k];
        if (tail <= alpha) critical = k;
        else break;
    }
    return wins >= critical;
}

} // namespace spectralab::experiments
