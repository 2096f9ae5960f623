#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "spectralab/atom.hpp"
#include "spectralab/errors.hpp"
#include "spectralab/ihara.hpp"
#include "spectralab/instance.hpp"
#include "spectralab/nomadic.hpp"
#include "spectralab/sdp.hpp"

namespace spectralab::io {

using nlohmann::json;

inline json to_json(const atoms::Atom& a) {
    json weights = json::array();
    for (int i = 0; i < a.r; ++i)
        for (int j = 0; j < a.r; ++j) weights.push_back(a.weights(i, j));
    return json{{"name", a.name},
                {"r", a.r},
                {"weights", weights},
                {"lambda1", a.lambda1},
                {"lambda2", a.lambda2}};
}

inline atoms::Atom atom_from_json(const json& j) {
    atoms::Atom a;
    a.name = j.at("name").get<std::string>();
    a.r = j.at("r").get<int>();
    const auto& w = j.at("weights");
    if (static_cast<int>(w.size()) != a.r * a.r) throw ParseError("atom json: weights length != r*r");
    a.weights.resize(a.r, a.r);
    for (int i = 0; i < a.r; ++i)
        for (int k = 0; k < a.r; ++k) a.weights(i, k) = w[static_cast<std::size_t>(i) * a.r + k].get<int>();
    a.lambda1 = j.at("lambda1").get<double>();
    a.lambda2 = j.at("lambda2").get<double>();
    return a;
}

inline json to_json(const lifts::InstanceGraph& g) {
    json vertices = json::array();
    for (int v = 0; v < g.num_vertices; ++v) vertices.push_back(json::array({v / g.n, v % g.n}));
    json edges = json::array();
    for (const lifts::Edge& e : g.edges)
        edges.push_back(json{{"u", e.u}, {"v", e.v}, {"w", e.w}, {"atom_id", e.atom_id}});
    return json{{"r", g.r},          {"c", g.c},
                {"n", g.n},          {"seed", g.seed},
                {"negation", lifts::to_string(g.negation)},
                {"vertices", vertices},
                {"edges", edges}};
}

inline lifts::InstanceGraph instance_from_json(const json& j) {
    lifts::InstanceGraph g;
    g.r = j.at("r").get<int>();
    g.c = j.at("c").get<int>();
    g.n = j.at("n").get<int>();
    g.seed = j.at("seed").get<std::uint64_t>();
    g.negation = lifts::negation_from_string(j.at("negation").get<std::string>());
    g.num_vertices = static_cast<int>(j.at("vertices").size());
    for (const auto& e : j.at("edges"))
        g.edges.push_back(lifts::Edge{e.at("u").get<int>(), e.at("v").get<int>(), e.at("w").get<int>(),
                                      e.at("atom_id").get<int>()});
    for (const auto& e : g.edges)
        if (e.u < 0 || e.u >= g.num_vertices || e.v < 0 || e.v >= g.num_vertices ||
            (e.w != 1 && e.w != -1) || e.atom_id < 0 || e.atom_id >= g.c * g.n)
            throw ParseError("instance json: edge out of range");
    // every vertex must meet exactly one copy per constraint group
    const auto inc = g.copy_incidence();
    for (int v = 0; v < g.num_vertices; ++v)
        if (static_cast<int>(inc.copies_of_vertex[v].size()) != g.c)
            throw ParseError("instance json: vertex does not meet exactly c atom copies");
    const auto [l1, l2] = lifts::infer_eigenvalue_pair(g);
    g.lambda1 = l1;
    g.lambda2 = l2;
    return g;
}

inline json to_json(const sdp::SandwichReport& r) {
    json j{{"sdp_lower", r.sdp_lower},
           {"sdp_upper", r.sdp_upper},
           {"formula", r.formula},
           {"realized_slack", r.realized_slack},
           {"bad_vertex_count", r.bad_vertex_count},
           {"tail_mass", r.tail_mass},
           {"L", r.L},
           {"delta", r.delta}};
    if (r.opt) j["opt"] = *r.opt;
    return j;
}

inline json to_json(const ihara::SpectrumReport& r, const std::vector<double>* per_t_residuals = nullptr) {
    json table = json::array();
    for (const auto& m : r.matches)
        table.push_back(json{{"re", m.computed.real()},
                             {"im", m.computed.imag()},
                             {"predicted_re", m.predicted.real()},
                             {"predicted_im", m.predicted.imag()},
                             {"predicted_source", ihara::to_string(m.source)},
                             {"residual", m.residual}});
    json j{{"max_residual", r.max_residual},
           {"rho_A", r.rho_A},
           {"rho_B", r.rho_B},
           {"mult_minus_lambda1", r.mult_minus_lambda1},
           {"mult_minus_lambda2", r.mult_minus_lambda2},
           {"mult_zero", r.mult_zero},
           {"pass", r.pass},
           {"tol", r.tol},
           {"matched_spectrum", table}};
    if (per_t_residuals) j["t_residuals"] = *per_t_residuals;
    return j;
}

inline void save_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    out << j.dump(2) << "\n";
}

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open for reading: " + path);
    json j;
    in >> j;
    return j;
}

/// Matrix Market coordinate output of the nomadic operator (1-based
/// indices, integer-valued entries).
inline void write_matrix_market(const nomadic::NomadicOperator& op, std::ostream& out) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << op.dim() << " " << op.dim() << " " << op.B.nonZeros() << "\n";
    for (int k = 0; k < op.B.outerSize(); ++k)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(op.B, k); it; ++it)
            out << it.row() + 1 << " " << it.col() + 1 << " " << it.value() << "\n";
}

inline void write_matrix_market(const nomadic::NomadicOperator& op, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    write_matrix_market(op, out);
}

} // namespace spectralab::io
