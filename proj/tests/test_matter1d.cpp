#include <catch_amalgamated.hpp>

#include <cqed/matter1d.hpp>

#include <cmath>

using namespace cqed;
using namespace cqed::matter;
using Catch::Approx;

namespace {

PotentialSpec well_potential() {
    return {50.0, quadratic_for_anharmonicity(50.0, 1.0, 45.0), 1.0};
}

struct Harmonic {
    double operator()(double x) const { return 0.5 * x * x; }
};

} // namespace

TEST_CASE("anharmonicity parameter", "[matter1d]") {
    CHECK(anharmonicity({50.0, 48.2028, 1.0}) == Approx(44.8).margin(0.05));
    CHECK(anharmonicity({50.0, 0.0, 1.0}) == 0.0);
    const double a = anharmonicity({50.0, 20.0, 1.0});
    CHECK(anharmonicity({50.0, 40.0, 1.0}) == Approx(8.0 * a).epsilon(1e-14));
    CHECK(anharmonicity(well_potential()) == Approx(45.0).epsilon(1e-12));
    CHECK_THROWS_AS(anharmonicity({0.0, 1.0, 1.0}), InvalidArgument);
}

TEST_CASE("harmonic oscillator spectrum", "[matter1d]") {
    const Grid grid{-7.0, 7.0, 4096};
    const MatterEigensystem es = solve_1d(grid, 1.0, Harmonic{}, 4);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(es.energies(k) - (k + 0.5)) < 1e-5);
    CHECK(es.orthonormality_defect() < 1e-8);

    const Grid fine{-8.0, 8.0, 8192};
    const MatterEigensystem f = solve_1d(fine, 1.0, Harmonic{}, 2);
    const double err = std::abs(f.p_elems(0, 1) - I_unit * (f.energies(0) - f.energies(1)) * f.x_elems(0, 1)) /
                       std::abs(f.p_elems(0, 1));
    CHECK(err < 1e-6);
}

TEST_CASE("double-well gap ratio", "[matter1d]") {
    const PotentialSpec pot = well_potential();
    const MatterEigensystem es = solve_double_well(default_grid(pot, 2048), pot, 4);
    const double ratio = (es.energies(2) - es.energies(1)) / (es.energies(1) - es.energies(0));
    CHECK(ratio == Approx(12.0).epsilon(0.10));
    CHECK(es.orthonormality_defect() < 1e-8);
}

TEST_CASE("double-well eigenfunctions alternate parity", "[matter1d]") {
    const PotentialSpec pot = well_potential();
    const Grid grid = default_grid(pot, 2048);
    const MatterEigensystem es = solve_double_well(grid, pot, 4);
    const int n = grid.n_points;
    for (int k = 0; k < 4; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs(es.wavefunctions(i, k) - sign * es.wavefunctions(n - 1 - i, k)));
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("p-x identity and selection rule", "[matter1d]") {
    const PotentialSpec pot = well_potential();
    const MatterEigensystem es = solve_double_well(default_grid(pot, 2048), pot, 4);
    CHECK(px_identity_error(es, pot, 0, 1) < 1e-4);
    CHECK(px_identity_error(es, pot, 1, 2) < 1e-4);
    CHECK_THROWS_AS(px_identity_error(es, pot, 0, 2), InvalidArgument);
    CHECK_THROWS_AS(px_identity_error(es, pot, 1, 1), InvalidArgument);
}

TEST_CASE("matrix elements are Hermitian", "[matter1d]") {
    const PotentialSpec pot = well_potential();
    const MatterEigensystem es = solve_double_well(default_grid(pot, 1024), pot, 8);
    CHECK(max_abs(es.x_elems - es.x_elems.adjoint()) < 1e-10);
    CHECK(max_abs(es.p_elems - es.p_elems.adjoint()) < 1e-10);
}

TEST_CASE("grid convergence of the double-well energies", "[matter1d]") {
    const PotentialSpec pot = well_potential();
    const Grid grid = default_grid(pot, 2048);
    const RealVector e1 = richardson_energies(grid, pot, 4);
    const RealVector e2 = richardson_energies(grid.refined(), pot, 4);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(e1(k) - e2(k)) < 1e-6 * std::abs(e2(k)));
}

TEST_CASE("input validation", "[matter1d]") {
    const PotentialSpec pot = well_potential();
    CHECK_THROWS_AS(solve_double_well({-1.0, 1.0, 32}, pot, 2), InvalidArgument);
    CHECK_THROWS_AS(solve_double_well({1.0, -1.0, 128}, pot, 2), InvalidArgument);
    CHECK_THROWS_AS(solve_double_well({-3.0, 3.0, 128}, pot, 40), InvalidArgument);
    CHECK_THROWS_AS(solve_double_well(default_grid(pot, 64), pot, 4), ConvergenceError);
}
