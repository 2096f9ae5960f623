#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "spectralab/experiments.hpp"

using namespace spectralab;
using Catch::Approx;

TEST_CASE("atom spec parsing") {
    const auto one = experiments::parse_atoms("sort4", 3);
    CHECK(one.size() == 3);
    CHECK(one[0].name == "sort4");

    const auto two = experiments::parse_atoms("complete:3,complete:3", 2);
    CHECK(two[0].lambda1 == Approx(2.0));

    CHECK(experiments::parse_atoms("forrelation:2", 2)[0].r == 8);
    CHECK_THROWS_AS(experiments::parse_atoms("sort4,sort4", 3), ParseError);
    CHECK_THROWS_AS(experiments::parse_atoms("pentagon", 2), ParseError);
}

TEST_CASE("threshold table") {
    const auto t = experiments::run_threshold_table();
    REQUIRE(t.columns.size() == 7);
    bool saw_c6 = false, saw_c7 = false;
    for (const auto& row : t.rows) {
        if (row[1] != "1") continue;
        if (row[2] == "6") {
            saw_c6 = true;
            CHECK(row[5] == "false");
        }
        if (row[2] == "7") {
            saw_c7 = true;
            CHECK(row[5] == "true");
        }
    }
    CHECK(saw_c6);
    CHECK(saw_c7);

    // k = 0 rows carry the classical 2XOR value 2 sqrt(c-1)/c
    for (const auto& row : t.rows)
        if (row[1] == "0") {
            const int c = std::stoi(row[2]);
            CHECK(std::stod(row[3]) == Approx(2.0 * std::sqrt(c - 1.0) / c).margin(1e-12));
        }

    CHECK(experiments::sort4_threshold_root() == Approx(4.0 + 2.0 * std::sqrt(2.0)).margin(1e-12));
}

TEST_CASE("experiment drivers reject empty lifts") {
    experiments::ExperimentSpec spec;
    spec.kind = experiments::Kind::SpectrumB;
    spec.n = 0;
    spec.seeds = 1;
    CHECK_THROWS_AS(experiments::run(spec), InvalidArity);
}

TEST_CASE("spectrum_b on the tiny base instance") {
    experiments::ExperimentSpec spec;
    spec.kind = experiments::Kind::SpectrumB;
    spec.atoms_spec = "sort4";
    spec.c = 2;
    spec.n = 1;
    spec.seeds = 1;
    spec.base_seed = 3;
    spec.threads = 1;
    const auto t = experiments::run(spec);
    CHECK(t.rows.size() == 16); // 2|E| of the base instance
    for (const auto& row : t.rows) CHECK(std::stod(row[4]) <= 1e-6);
}

TEST_CASE("boxplot with one seed and one c gives one row") {
    experiments::ExperimentSpec spec;
    spec.kind = experiments::Kind::Boxplot;
    spec.atoms_spec = "sort4";
    spec.c_min = spec.c_max = 2;
    spec.n = 6;
    spec.seeds = 1;
    spec.base_seed = 11;
    const auto t = experiments::run(spec);
    REQUIRE(t.rows.size() == 1);
    // with a single sample the quartiles collapse onto it
    CHECK(t.rows[0][3] == t.rows[0][4]);
    CHECK(t.rows[0][4] == t.rows[0][5]);
}

TEST_CASE("experiment output is byte-identical across runs and thread counts") {
    experiments::ExperimentSpec spec;
    spec.kind = experiments::Kind::SpectrumB;
    spec.atoms_spec = "complete:3";
    spec.c = 3;
    spec.n = 3;
    spec.seeds = 4;
    spec.base_seed = 17;

    spec.threads = 1;
    const auto a = experiments::run(spec).data_section();
    const auto b = experiments::run(spec).data_section();
    spec.threads = 2;
    const auto c = experiments::run(spec).data_section();
    CHECK(a == b);
    CHECK(a == c);

    // each row carries its seed
    CHECK(a.find("\n17,") != std::string::npos);
    CHECK(a.find("\n20,") != std::string::npos);
}

TEST_CASE("sandwich sweep emits one row per (n, seed)") {
    experiments::ExperimentSpec spec;
    spec.kind = experiments::Kind::SandwichSweep;
    spec.atoms_spec = "sort4";
    spec.c = 2;
    spec.n_list = {4, 8};
    spec.seeds = 2;
    spec.base_seed = 5;
    spec.L = 1;
    const auto t = experiments::run(spec);
    CHECK(t.rows.size() == 4);
    for (const auto& row : t.rows) {
        const double lower = std::stod(row[2]), upper = std::stod(row[3]);
        CHECK(lower <= upper + 1e-9);
        CHECK(std::stod(row[4]) == Approx(upper - lower).margin(1e-12));
    }
}

TEST_CASE("paired sign test") {
    std::vector<double> a(20, 1.0), b(20, 0.0);
    CHECK(experiments::paired_sign_test_decreasing(a, b));
    CHECK_FALSE(experiments::paired_sign_test_decreasing(b, a));
    // 13 wins out of 20 is not significant at 5%
    std::vector<double> c(20, 0.0);
    for (int i = 0; i < 13; ++i) c[i] = 2.0;
    std::vector<double> d(20, 1.0);
    CHECK_FALSE(experiments::paired_sign_test_decreasing(c, d));
    // 15 wins is
    for (int i = 13; i < 15; ++i) c[i] = 2.0;
    CHECK(experiments::paired_sign_test_decreasing(c, d));
}

TEST_CASE("threads resolve from the environment variable") {
    ::setenv("SPECTRA_LAB_THREADS", "3", 1);
    CHECK(experiments::resolve_threads(0) == 3);
    CHECK(experiments::resolve_threads(5) == 5);
    ::unsetenv("SPECTRA_LAB_THREADS");
    CHECK(experiments::resolve_threads(0) >= 1);
}
