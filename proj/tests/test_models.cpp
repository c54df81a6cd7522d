#include <catch_amalgamated.hpp>

#include <cqed/models.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

using namespace cqed;
using namespace cqed::models;
using Catch::Approx;

namespace {

std::vector<double> sorted_eigs(const Operator& h) {
    const EigenSystem es = eig_hermitian(h);
    return {es.values.data(), es.values.data() + es.values.size()};
}

matter::PotentialSpec well_potential() {
    return {50.0, matter::quadratic_for_anharmonicity(50.0, 1.0, 45.0), 1.0};
}

GaugeSystem well_gauge(double omega_r, int n_fock = 30, int levels = 8) {
    GaugeParams g;
    g.pot = well_potential();
    g.grid = matter::default_grid(g.pot, 1024);
    g.n_fock = n_fock;
    g.n_matter_levels = levels;
    GaugeSystem gs = make_gauge_system(g);
    gs.params.omega_c = gs.transition();
    return gs.with_coupling(omega_r * gs.params.omega_c);
}

double hermiticity_relative(const Operator& h) { return h.hermiticity_defect() / h.max_norm(); }

} // namespace

TEST_CASE("JCM decoupled spectrum", "[models][jcm]") {
    const JcmParams p{1.0, 0.7, 0.0, 8};
    const auto eig = sorted_eigs(build_jcm(p));
    std::vector<double> expect;
    for (int n = 0; n < 8; ++n)
        for (double s : {-0.35, 0.35}) expect.push_back(n + s);
    std::sort(expect.begin(), expect.end());
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK(eig[i] == Approx(expect[i]).margin(1e-13));
}

TEST_CASE("JCM splitting and ground energy", "[models][jcm]") {
    for (double g : {0.0, 0.1, 0.5, 0.99}) {
        const auto eig = sorted_eigs(build_jcm({1.0, 1.0, g, 20}));
        CHECK(eig[0] == Approx(-0.5).margin(1e-12));
    }
    // past omega_r = omega_c the n = 1 lower polariton drops below the vacuum
    const auto turned = sorted_eigs(build_jcm({1.0, 1.0, 1.3, 20}));
    CHECK(turned[0] < -0.5);
    const auto eig = sorted_eigs(build_jcm({1.0, 1.0, 0.1, 20}));
    CHECK(eig[2] - eig[1] == Approx(0.2).margin(1e-12));
}

TEST_CASE("analytic JCM spectrum", "[models][jcm]") {
    const auto r = analytic_jcm_spectrum({1.0, 1.0, 0.1, 10}, 3);
    REQUIRE(r.size() == 4);
    CHECK(r[0].plus == -0.5);
    CHECK(r[0].minus == -0.5);
    CHECK(r[1].plus == Approx(0.6).margin(1e-14));
    CHECK(r[1].minus == Approx(0.4).margin(1e-14));
    const auto d = analytic_jcm_spectrum({1.0, 0.8, 0.1, 10}, 1);
    CHECK(d[1].plus == Approx(0.641421356).margin(1e-9));
    CHECK(d[1].minus == Approx(0.358578644).margin(1e-9));
    CHECK_THROWS_AS(analytic_jcm_spectrum({1.0, 1.0, 0.1, 10}, 0), InvalidArgument);
}

TEST_CASE("analytic JCM matches diagonalization over ten blocks", "[models][jcm]") {
    for (double weg : {1.0, 0.8}) {
        for (double g : {0.01, 0.1, 0.5}) {
            const JcmParams p{1.0, weg, g, 12};
            const auto num = sorted_eigs(build_jcm(p));
            // blocks 0..11 plus the unpaired |11, e> left by the truncation
            const auto blocks = analytic_jcm_spectrum(p, 11);
            std::vector<double> ana{blocks[0].plus};
            for (std::size_t n = 1; n < blocks.size(); ++n) {
                ana.push_back(blocks[n].plus);
                ana.push_back(blocks[n].minus);
            }
            ana.push_back(11.0 + 0.5 * weg);
            std::sort(ana.begin(), ana.end());
            REQUIRE(ana.size() == num.size());
            // the top block is polluted by truncation; compare blocks 0..10
            for (std::size_t i = 0; i < 21; ++i) CHECK(std::abs(ana[i] - num[i]) < 1e-10);
        }
    }
}

TEST_CASE("Rabi matches JCM at weak coupling", "[models][rabi]") {
    const auto r = sorted_eigs(build_rabi(RabiParams(1.0, 1.0, 0.01, 30)));
    const auto j = sorted_eigs(build_jcm({1.0, 1.0, 0.01, 30}));
    for (int i = 0; i < 6; ++i) CHECK(std::abs(r[i] - j[i]) < 1e-3 * std::abs(j[i]));
}

TEST_CASE("Rabi counter-rotating terms present", "[models][rabi]") {
    const RabiParams p(1.0, 1.0, 0.3, 12);
    const Operator h = build_rabi(p);
    const HilbertSpace s = p.space();
    const cplx elem = h.data()(s.index_of({1, 1}), s.index_of({0, 0}));
    CHECK(std::abs(elem) == Approx(0.3).epsilon(1e-14));
    CHECK(hermiticity_relative(h) < 1e-12);
}

TEST_CASE("Rabi displaced-oscillator limit", "[models][rabi]") {
    const auto e = sorted_eigs(build_rabi(RabiParams(1.0, 0.0, 0.5, 40)));
    CHECK(e[0] == Approx(-0.25).margin(1e-12));
    CHECK(e[1] == Approx(-0.25).margin(1e-12));
    CHECK(e[2] == Approx(0.75).margin(1e-12));
}

TEST_CASE("asymmetric Rabi opens avoided crossings", "[models][rabi]") {
    // Levels 4 and 5 of the symmetric model (opposite parity) cross near
    // omega_eg = 2.55; the bias couples the parity sectors and lifts it.
    auto min_gap = [](double eps) {
        double best = 1e300;
        for (int i = 0; i <= 500; ++i) {
            const double weg = 2.3 + 0.5 * i / 500.0;
            const auto e = sorted_eigs(build_rabi(RabiParams(1.0, weg, 0.7, 30, eps)));
            best = std::min(best, e[5] - e[4]);
        }
        return best;
    };
    const double symmetric = min_gap(0.0);
    const double biased = min_gap(0.3);
    CHECK(symmetric < 2e-3);
    CHECK(biased > 10.0 * symmetric);
    CHECK(biased > 1e-2);

    RabiParams p(1.0, 1.0, 0.7, 20, 0.3);
    CHECK(commutator_norm(parity(p.space()), build_rabi(p)) > 0.1);
}

TEST_CASE("polaron frame", "[models][polaron]") {
    SECTION("uncoupled limit is exact") {
        const RabiParams p(1.0, 0.8, 0.0, 20);
        const Operator bare = p.omega_c * elementary(p.space(), kCavity, OpKind::number) +
                              0.4 * elementary(p.space(), kEmitter, OpKind::sigma_z);
        CHECK((build_polaron_rabi(p) - bare).max_norm() < 1e-14);
    }
    SECTION("vacuum element carries the Gaussian overlap") {
        const RabiParams p(1.0, 1.0, 0.6, 40);
        const Operator h = build_polaron_rabi(p);
        const auto idx = p.space().index_of({0, 0});
        const double expect = -0.5 * std::exp(-2.0 * 0.36) - 0.36;
        CHECK(h.data()(idx, idx).real() == Approx(expect).margin(1e-12));
    }
    SECTION("isospectral with the dipole-gauge Rabi model") {
        const RabiParams p(1.0, 1.0, 1.0, 50);
        const auto a = sorted_eigs(build_rabi(p));
        const auto b = sorted_eigs(build_polaron_rabi(p));
        for (int i = 0; i < 12; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-7);
        CHECK(hermiticity_relative(build_polaron_rabi(p)) < 1e-12);
    }
    SECTION("only the symmetric model is supported") {
        CHECK_THROWS_AS(build_polaron_rabi(RabiParams(1.0, 1.0, 0.5, 30, 0.1)), InvalidArgument);
    }
    SECTION("large displacement needs a larger Fock space") {
        CHECK_THROWS_AS(build_polaron_rabi(RabiParams(1.0, 1.0, 3.0, 22)), ConvergenceError);
    }
}

TEST_CASE("truncated Coulomb TLS coincides with the polaron frame", "[models][polaron]") {
    for (double g : {0.0, 0.3, 1.0}) {
        const RabiParams p(1.0, 1.0, g, 40);
        const Operator a = build_truncated_coulomb_tls(p);
        const Operator b = build_polaron_rabi(p);
        CHECK((a - b).max_norm() < 1e-12 * b.max_norm());
    }
    const RabiParams p(1.0, 1.0, 0.8, 45);
    const auto a = sorted_eigs(build_truncated_coulomb_tls(p));
    const auto b = sorted_eigs(build_rabi(p));
    for (int i = 0; i < 12; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-7);
}

TEST_CASE("gRWA projection", "[models][grwa]") {
    SECTION("uncoupled input is unchanged") {
        const Operator h = build_polaron_rabi(RabiParams(1.0, 1.0, 0.0, 15));
        CHECK((grwa_project(h) - h).max_norm() == 0.0);
    }
    SECTION("ground element") {
        const RabiParams p(1.0, 1.0, 1.0, 40);
        const Operator h = grwa_project(build_polaron_rabi(p));
        const auto idx = p.space().index_of({0, 0});
        CHECK(h.data()(idx, idx).real() + 1.0 == Approx(-0.0676676416).margin(1e-9));
        CHECK(commutator_norm(excitation_number(p.space()), h) < 1e-12);
        CHECK(hermiticity_relative(h) < 1e-12);
    }
    SECTION("ground energy deep in the ultrastrong regime") {
        for (double g : {2.0, 2.5}) {
            const RabiParams p(1.0, 1.0, g, fock_cutoff(2.0 * g));
            const Operator hp = build_polaron_rabi(p);
            const double exact = eig_hermitian(hp).values(0);
            const BlockGround gr = block_ground(grwa_project(hp));
            CHECK(std::abs(gr.energy - exact) < 0.01 * std::abs(exact));
            CHECK(gr.excitation == 0);
            const Operator n = elementary(p.space(), kCavity, OpKind::number);
            CHECK(gr.state.expectation(n).real() == 0.0);
        }
    }
}

TEST_CASE("gauge chain for the double well", "[models][gauge]") {
    SECTION("uncoupled spectrum") {
        const GaugeSystem gs = well_gauge(0.0, 10, 4);
        const auto e = sorted_eigs(build_full_coulomb(gs));
        std::vector<double> expect;
        for (int j = 0; j < 4; ++j)
            for (int n = 0; n < 10; ++n) expect.push_back(gs.matter.energies(j) + gs.params.omega_c * n);
        std::sort(expect.begin(), expect.end());
        for (std::size_t i = 0; i < expect.size(); ++i) CHECK(e[i] == Approx(expect[i]).margin(1e-10));
        CHECK((gauge_unitary(gs) - Operator::identity(gs.space())).max_norm() < 1e-14);
    }
    SECTION("transformation is unitary and isospectral") {
        for (double g : {0.1, 0.3, 0.5}) {
            const GaugeSystem gs = well_gauge(g, 40);
            const Operator u = gauge_unitary(gs);
            CHECK((u * u.adjoint() - Operator::identity(gs.space())).max_norm() < 1e-8);
            const Operator hc = build_full_coulomb(gs);
            const Operator hd = gauge_transform(hc, gs);
            CHECK(hermiticity_relative(hc) < 1e-12);
            CHECK(hermiticity_relative(hd) < 1e-12);
            const auto a = sorted_eigs(hc);
            const auto b = sorted_eigs(hd);
            for (int i = 0; i < 10; ++i) CHECK(std::abs(a[i] - b[i]) < 1e-7);
        }
    }
    SECTION("two-level projection of the free part") {
        const GaugeSystem gs = well_gauge(0.0, 12, 4);
        const Operator p = project_two_level(build_full_coulomb(gs), gs.matter);
        const HilbertSpace s({2, 12});
        const double e0 = gs.matter.energies(0), e1 = gs.matter.energies(1);
        const Operator expect = gs.params.omega_c * elementary(s, 1, OpKind::number) +
                                (0.5 * (e1 - e0)) * elementary(s, 0, OpKind::sigma_z) +
                                (0.5 * (e0 + e1)) * Operator::identity(s);
        CHECK((p - expect).max_norm() < 1e-12);
    }
    SECTION("truncated gauges agree at small coupling") {
        const GaugeSystem gs = well_gauge(0.005, 30);
        const Operator hc = build_full_coulomb(gs);
        const auto full = sorted_eigs(hc);
        const auto coul = sorted_eigs(project_two_level(hc, gs.matter));
        const auto dip = sorted_eigs(project_two_level(gauge_transform(hc, gs), gs.matter));
        for (int i = 1; i <= 3; ++i) {
            const double ref = full[i] - full[0];
            CHECK(std::abs((coul[i] - coul[0]) - ref) < 1e-3 * ref);
            CHECK(std::abs((dip[i] - dip[0]) - ref) < 1e-3 * ref);
        }
    }
    SECTION("coupling extraction from the vacuum splitting") {
        // slope of the lowest polariton splitting against A0 should be 2 q wc x_eg
        const GaugeSystem base = well_gauge(0.0, 20);
        const double a1 = 0.002 / (base.params.omega_c * base.x_eg());
        const double a2 = 2.0 * a1;
        auto splitting = [&](double A0) {
            GaugeSystem gs = base;
            gs.params.A0 = A0;
            const auto e = sorted_eigs(gauge_transform(build_full_coulomb(gs), gs));
            return e[2] - e[1];
        };
        const double slope = (splitting(a2) - splitting(a1)) / (a2 - a1);
        const double expect = 2.0 * base.params.q * base.params.omega_c * base.x_eg();
        CHECK(std::abs(slope - expect) < 0.02 * expect);
    }
    SECTION("dipole projection is the better two-level model") {
        for (double g : {0.05, 0.1, 0.2, 0.3, 0.5}) {
            const GaugeSystem gs = well_gauge(g, 40);
            const Operator hc = build_full_coulomb(gs);
            const auto full = sorted_eigs(hc);
            const auto coul = sorted_eigs(project_two_level(hc, gs.matter));
            const auto dip = sorted_eigs(project_two_level(gauge_transform(hc, gs), gs.matter));
            const double ref = full[1] - full[0];
            const double err_c = std::abs(coul[1] - coul[0] - ref) / ref;
            const double err_d = std::abs(dip[1] - dip[0] - ref) / ref;
            INFO("coupling " << g << ": coulomb " << err_c << ", dipole " << err_d);
            CHECK(err_d < err_c);
        }
    }
}

TEST_CASE("Dicke model", "[models][dicke]") {
    SECTION("single spin reproduces the Rabi builder bit for bit") {
        DickeParams d;
        d.n_spins = 1;
        d.omega_eg = 0.9;
        d.omega_r = 0.37;
        d.n_fock = 25;
        const Operator hd = build_dicke(d);
        const Operator hr = build_rabi(RabiParams(1.0, 0.9, 0.37, 25));
        REQUIRE(hd.space() == hr.space());
        CHECK(std::memcmp(hd.data().data(), hr.data().data(),
                          sizeof(cplx) * static_cast<std::size_t>(hd.data().size())) == 0);
    }
    SECTION("bosonized normal-mode splitting") {
        DickeParams d;
        d.bosonized = true;
        d.n_spins = 1;
        d.omega_r = 0.01;
        d.n_fock = 6;
        d.n_boson = 6;
        const auto e = sorted_eigs(build_dicke(d));
        CHECK(std::abs((e[2] - e[1]) - 0.02) < 0.01 * 0.01);
    }
    SECTION("collective enhancement") {
        // one-excitation manifold: lower polariton, N - 1 dark states, upper polariton
        auto splitting = [](int n, bool bosonized) {
            DickeParams d;
            d.n_spins = n;
            d.omega_r = 0.01;
            d.bosonized = bosonized;
            d.n_fock = bosonized ? 6 : 4;
            d.n_boson = 6;
            const auto e = sorted_eigs(build_dicke(d));
            const std::size_t upper = bosonized ? 2 : static_cast<std::size_t>(n) + 1;
            return e[upper] - e[1];
        };
        CHECK(splitting(4, true) / splitting(1, true) == Approx(2.0).epsilon(0.02));
        CHECK(splitting(4, false) / splitting(1, false) == Approx(2.0).epsilon(0.02));
        CHECK(splitting(40, true) / splitting(10, true) == Approx(2.0).epsilon(0.02));
    }
    SECTION("full-spin size limit") {
        DickeParams d;
        d.n_spins = 10;
        d.n_fock = 8;
        CHECK_THROWS_AS(build_dicke(d), InvalidArgument);
        d.n_spins = 0;
        CHECK_THROWS_AS(build_dicke(d), InvalidArgument);
    }
}

TEST_CASE("Holstein-Primakoff commutator", "[models][dicke]") {
    DickeParams d;
    d.n_spins = 10;
    CHECK(hp_commutator_expectation(d, dicke_state(10, 0)) == Approx(1.0).margin(1e-14));
    CHECK(hp_commutator_expectation(d, dicke_state(10, 1)) == Approx(0.8).margin(1e-14));
    for (int n : {4, 8}) {
        d.n_spins = n;
        for (int nx : {0, 1, 2}) {
            const double v = hp_commutator_expectation(d, dicke_state(n, nx));
            CHECK(std::abs(v - 1.0) <= 2.0 * nx / n + 1e-14);
        }
    }
}

TEST_CASE("truncation convergence check", "[models]") {
    auto ground = [](int nf) { return eig_hermitian(build_rabi(RabiParams(1.0, 1.0, 0.5, nf))).values(0); };
    const ConvergenceReport r = convergence_check(ground, fock_cutoff(0.5));
    CHECK(r.relative_change() < 1e-6);
    auto photons = [](int nf) {
        const RabiParams p(1.0, 1.0, 2.0, nf);
        const Ket g = eig_hermitian(build_rabi(p)).ket(0);
        return g.expectation(elementary(p.space(), kCavity, OpKind::number)).real();
    };
    CHECK_THROWS_AS(convergence_check(photons, 12), ConvergenceError);
    CHECK_THROWS_AS(build_rabi(RabiParams(1.0, 1.0, 3.0, 10)), ConvergenceError);
}
