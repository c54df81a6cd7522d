// models.hpp: light-matter Hamiltonians and the unitaries connecting them.
//
// Two-level models live on HilbertSpace{2, n_fock} (site 0 the emitter,
// site 1 the cavity). All frequencies are in units with hbar = 1.

#pragma once

#include "errors.hpp"
#include "matter1d.hpp"
#include "opcore.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace cqed::models {

inline constexpr std::size_t kEmitter = 0;
inline constexpr std::size_t kCavity = 1;

// Hard floor on the Fock cutoff for a displaced ground state with amplitude
// `alpha`: mean photon number plus three Poisson widths.
inline int min_fock(double alpha) {
    const double a = std::abs(alpha);
    return static_cast<int>(std::ceil(a * a + 3.0 * a + 2.0));
}

struct JcmParams {
    double omega_c = 1.0;
    double omega_eg = 1.0;
    double omega_r = 0.0;
    int n_fock = 40;

    void validate() const {
        if (!(omega_c > 0.0)) throw InvalidArgument("omega_c must be > 0");
        if (!(omega_r >= 0.0)) throw InvalidArgument("omega_r must be >= 0");
        if (n_fock < 2) throw InvalidArgument("n_fock must be >= 2");
    }
    [[nodiscard]] double ratio() const { return omega_r / omega_c; }
    [[nodiscard]] HilbertSpace space() const { return HilbertSpace({2, n_fock}); }
};

struct RabiParams : JcmParams {
    double epsilon = 0.0;

    RabiParams() = default;
    RabiParams(double wc, double weg, double wr, int nf, double eps = 0.0)
        : JcmParams{wc, weg, wr, nf}, epsilon(eps) {}

    void validate() const {
        JcmParams::validate();
        if (n_fock < min_fock(ratio())) {
            throw ConvergenceError("Rabi builder: n_fock = " + std::to_string(n_fock) +
                                   " is below the floor " + std::to_string(min_fock(ratio())) +
                                   " for omega_r/omega_c = " + std::to_string(ratio()));
        }
    }
};

// a^dag a + (sigma_z + 1)/2
inline Operator excitation_number(const HilbertSpace& space) {
    const Operator n = elementary(space, kCavity, OpKind::number);
    const Operator sz = elementary(space, kEmitter, OpKind::sigma_z);
    return n + 0.5 * (sz + Operator::identity(space));
}

// sigma_z exp(i pi a^dag a)
inline Operator parity(const HilbertSpace& space) {
    Matrix ph = Matrix::Zero(space.dim(kCavity), space.dim(kCavity));
    for (int k = 0; k < space.dim(kCavity); ++k) ph(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
    return elementary(space, kEmitter, OpKind::sigma_z) * embed(space, kCavity, ph);
}

// --------------------------------------------------------------------------
// Jaynes-Cummings
// --------------------------------------------------------------------------

inline Operator build_jcm(const JcmParams& p) {
    p.validate();
    const HilbertSpace s = p.space();
    const Operator a = elementary(s, kCavity, OpKind::annihilate);
    const Operator sm = elementary(s, kEmitter, OpKind::sigma_minus);
    return p.omega_c * elementary(s, kCavity, OpKind::number) +
           (0.5 * p.omega_eg) * elementary(s, kEmitter, OpKind::sigma_z) +
           p.omega_r * (a * sm.adjoint() + a.adjoint() * sm);
}

struct JcmLevel {
    int n;
    double plus;
    double minus;
};

// Closed-form dressed energies for blocks n = 0..n_blocks; block 0 is the
// scalar -omega_eg/2.
inline std::vector<JcmLevel> analytic_jcm_spectrum(const JcmParams& p, int n_blocks) {
    if (n_blocks < 1) throw InvalidArgument("analytic_jcm_spectrum: n_blocks must be >= 1");
    const double detuning = p.omega_c - p.omega_eg;
    std::vector<JcmLevel> out;
    out.push_back({0, -0.5 * p.omega_eg, -0.5 * p.omega_eg});
    for (int n = 1; n <= n_blocks; ++n) {
        const double centre = -0.5 * p.omega_eg + p.omega_c * n - 0.5 * detuning;
        const double root =
            std::sqrt(0.25 * detuning * detuning + p.omega_r * p.omega_r * static_cast<double>(n));
        out.push_back({n, centre + root, centre - root});
    }
    return out;
}

// --------------------------------------------------------------------------
// Rabi and Dicke families
// --------------------------------------------------------------------------

namespace detail {

// omega_c a^dag a + sum_i (omega_eg/2) sz_i + omega_r (a + a^dag) sum_i sx_i
//   + (epsilon/2) sum_i sx_i, with the spins on sites [0, n_spins) and the
// cavity on the last site. Shared by the Rabi and full-spin Dicke builders.
inline Operator spin_boson(const HilbertSpace& s, int n_spins, double omega_c, double omega_eg,
                           double omega_r, double epsilon) {
    const std::size_t cav = static_cast<std::size_t>(n_spins);
    const Operator a = elementary(s, cav, OpKind::annihilate);
    const Operator field = a + a.adjoint();
    Operator h = omega_c * elementary(s, cav, OpKind::number);
    for (int i = 0; i < n_spins; ++i) {
        const auto site = static_cast<std::size_t>(i);
        const Operator sx = elementary(s, site, OpKind::sigma_x);
        h += (0.5 * omega_eg) * elementary(s, site, OpKind::sigma_z);
        h += omega_r * (field * sx);
        if (epsilon != 0.0) h += (0.5 * epsilon) * sx;
    }
    return h;
}

} // namespace detail

inline Operator build_rabi(const RabiParams& p) {
    p.validate();
    return detail::spin_boson(p.space(), 1, p.omega_c, p.omega_eg, p.omega_r, p.epsilon);
}

namespace detail {

// cos(theta) and sin(theta) of theta = -2i (omega_r/omega_c)(a - a^dag),
// assembled from the displacements D(-+2 alpha).
inline std::pair<Matrix, Matrix> polaron_trig(int n_fock, double alpha, bool check) {
    const Matrix dm = local_displacement(n_fock, cplx(-2.0 * alpha), check); // e^{+2X}
    const Matrix dp = local_displacement(n_fock, cplx(2.0 * alpha), check);  // e^{-2X}
    Matrix c = 0.5 * (dm + dp);
    Matrix s = -0.5 * I_unit * (dm - dp);
    return {std::move(c), std::move(s)};
}

inline void require_symmetric(const RabiParams& p, const char* who) {
    if (p.epsilon != 0.0) {
        throw InvalidArgument(std::string(who) +
                              ": only the symmetric model (epsilon = 0) is supported");
    }
}

} // namespace detail

// U^dag H_R U with U = exp[(omega_r/omega_c) sigma_x (a - a^dag)]:
//   omega_c a^dag a + (omega_eg/2)(cos(theta) sz - sin(theta) sy) - omega_r^2/omega_c.
// The constant keeps the spectrum identical to build_rabi.
inline Operator build_polaron_rabi(const RabiParams& p, bool check_truncation = true) {
    detail::require_symmetric(p, "build_polaron_rabi");
    p.JcmParams::validate();
    const HilbertSpace s = p.space();
    const double alpha = p.ratio();
    const auto [c, sn] = detail::polaron_trig(p.n_fock, alpha, check_truncation);
    const Matrix sz = local::sigma_z();
    const Matrix sy = local::sigma_y();
    Matrix spin_part = Matrix(Eigen::kroneckerProduct(sz, c)) - Matrix(Eigen::kroneckerProduct(sy, sn));
    Operator h = p.omega_c * elementary(s, kCavity, OpKind::number);
    h += Operator(s, (0.5 * p.omega_eg) * spin_part);
    h += (-p.omega_r * alpha) * Operator::identity(s);
    return h;
}

// exp[(omega_r/omega_c) sigma_x (a - a^dag)] by scaling-and-squaring.
inline Operator polaron_unitary(const RabiParams& p) {
    const HilbertSpace s = p.space();
    const Operator a = elementary(s, kCavity, OpKind::annihilate);
    const Operator gen =
        p.ratio() * (elementary(s, kEmitter, OpKind::sigma_x) * (a - a.adjoint()));
    return {s, gen.data().exp()};
}

// Minimal coupling applied inside the two-level subspace: the emitter term is
// rotated by U, the photon term is left bare.
inline Operator build_truncated_coulomb_tls(const RabiParams& p) {
    detail::require_symmetric(p, "build_truncated_coulomb_tls");
    p.JcmParams::validate();
    const HilbertSpace s = p.space();
    const Operator u = polaron_unitary(p);
    const Operator sz = elementary(s, kEmitter, OpKind::sigma_z);
    Operator h = p.omega_c * elementary(s, kCavity, OpKind::number);
    h += (0.5 * p.omega_eg) * (u.adjoint() * sz * u);
    h += (-p.omega_r * p.ratio()) * Operator::identity(s);
    return h;
}

// --------------------------------------------------------------------------
// Generalized rotating-wave approximation
// --------------------------------------------------------------------------

inline std::vector<int> excitation_labels(const HilbertSpace& s) {
    std::vector<int> labels(static_cast<std::size_t>(s.total()));
    for (Eigen::Index i = 0; i < s.total(); ++i) {
        labels[static_cast<std::size_t>(i)] = s.local_index(i, kCavity) + s.local_index(i, kEmitter);
    }
    return labels;
}

// Keep only matrix elements between states of equal excitation number.
inline Operator grwa_project(const Operator& h_pol) {
    const HilbertSpace& s = h_pol.space();
    if (s.sites() != 2 || s.dim(kEmitter) != 2) {
        throw InvalidArgument("grwa_project: expected a two-level x Fock operator");
    }
    const auto labels = excitation_labels(s);
    Matrix out = h_pol.data();
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
            if (labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(j)]) {
                out(i, j) = 0.0;
            }
        }
    }
    return {s, std::move(out)};
}

struct BlockGround {
    double energy = 0.0;
    int excitation = 0;
    Ket state;
};

// Lowest eigenpair of an excitation-conserving operator, diagonalizing each
// excitation block separately so that block structure is exact.
inline BlockGround block_ground(const Operator& h) {
    const HilbertSpace& s = h.space();
    const auto labels = excitation_labels(s);
    std::map<int, std::vector<Eigen::Index>> blocks;
    for (Eigen::Index i = 0; i < s.total(); ++i) blocks[labels[static_cast<std::size_t>(i)]].push_back(i);

    BlockGround best;
    bool first = true;
    for (const auto& [n, idx] : blocks) {
        const auto m = static_cast<Eigen::Index>(idx.size());
        Matrix sub(m, m);
        for (Eigen::Index r = 0; r < m; ++r)
            for (Eigen::Index c = 0; c < m; ++c) sub(r, c) = h.data()(idx[r], idx[c]);
        const EigenSystem es = eig_hermitian(Operator(HilbertSpace({static_cast<int>(m)}), sub));
        if (first || es.values(0) < best.energy) {
            Vector v = Vector::Zero(s.total());
            for (Eigen::Index r = 0; r < m; ++r) v(idx[r]) = es.vectors(r, 0);
            best = {es.values(0), n, Ket(s, std::move(v))};
            first = false;
        }
    }
    return best;
}

// --------------------------------------------------------------------------
// Gauge-resolved single-particle models
// --------------------------------------------------------------------------

struct GaugeParams {
    double q = 1.0;
    double A0 = 0.0;
    double omega_c = 1.0;
    matter::PotentialSpec pot;
    matter::Grid grid;
    int n_fock = 40;
    int n_matter_levels = 8;

    void validate() const {
        if (!(omega_c > 0.0)) throw InvalidArgument("GaugeParams: omega_c must be > 0");
        if (n_matter_levels < 2) throw InvalidArgument("GaugeParams: n_matter_levels must be >= 2");
        if (n_fock < 2) throw InvalidArgument("GaugeParams: n_fock must be >= 2");
        pot.validate();
        grid.validate();
    }
};

// Matter eigensystem plus the derived coupling bookkeeping.
struct GaugeSystem {
    GaugeParams params;
    matter::MatterEigensystem matter;

    [[nodiscard]] HilbertSpace space() const {
        return HilbertSpace({params.n_matter_levels, params.n_fock});
    }
    [[nodiscard]] double x_eg() const { return std::abs(matter.x_elems(1, 0)); }
    [[nodiscard]] double transition() const { return matter.energies(1) - matter.energies(0); }
    // omega_r = q omega_c A0 <e|x|g>
    [[nodiscard]] double omega_r() const { return params.q * params.omega_c * params.A0 * x_eg(); }

    [[nodiscard]] GaugeSystem with_coupling(double omega_r) const {
        GaugeSystem g = *this;
        g.params.A0 = omega_r / (params.q * params.omega_c * x_eg());
        return g;
    }
};

inline GaugeSystem make_gauge_system(const GaugeParams& g,
                                     const matter::ConvergenceOptions& opt = {}) {
    g.validate();
    return {g, matter::solve_double_well(g.grid, g.pot, g.n_matter_levels, opt)};
}

// (p - qA)^2/2m + V(x) + omega_c a^dag a with A = i A0 (a - a^dag), in the
// matter eigenbasis truncated to n_matter_levels.
inline Operator build_full_coulomb(const GaugeSystem& gs) {
    const GaugeParams& g = gs.params;
    const HilbertSpace s = gs.space();
    const int L = g.n_matter_levels;
    const Matrix p = gs.matter.p_elems.topLeftCorner(L, L);
    const Operator a = elementary(s, 1, OpKind::annihilate);
    const Operator vec_pot = (I_unit * g.A0) * (a - a.adjoint());
    const Operator mom = embed(s, 0, p);
    Operator h = embed(s, 0, gs.matter.hamiltonian(L));
    h += g.omega_c * elementary(s, 1, OpKind::number);
    h += (-g.q / g.pot.m) * (mom * vec_pot);
    h += (0.5 * g.q * g.q / g.pot.m) * (vec_pot * vec_pot);
    return h;
}

// exp[q A0 x (a - a^dag)] = sum_i |xi_i><xi_i| ⊗ D(-q A0 xi_i).
inline Operator gauge_unitary(const GaugeSystem& gs, bool check_truncation = true) {
    const GaugeParams& g = gs.params;
    const HilbertSpace s = gs.space();
    const int L = g.n_matter_levels;
    const Matrix x = gs.matter.x_elems.topLeftCorner(L, L);
    Eigen::SelfAdjointEigenSolver<Matrix> sx(0.5 * (x + x.adjoint()));
    if (sx.info() != Eigen::Success) throw SolverError("gauge_unitary: position eigensolve failed");
    Matrix u = Matrix::Zero(s.total(), s.total());
    for (int i = 0; i < L; ++i) {
        const Vector w = sx.eigenvectors().col(i);
        const Matrix proj = w * w.adjoint();
        const Matrix d =
            local_displacement(g.n_fock, cplx(-g.q * g.A0 * sx.eigenvalues()(i)), check_truncation);
        u += Matrix(Eigen::kroneckerProduct(proj, d));
    }
    return {s, std::move(u)};
}

inline Operator gauge_transform(const Operator& h, const GaugeSystem& gs,
                                bool check_truncation = true) {
    if (!(h.space() == gs.space())) throw InvalidArgument("gauge_transform: space mismatch");
    const Operator u = gauge_unitary(gs, check_truncation);
    return u * h * u.adjoint();
}

// P H P with P = |g><g| + |e><e| of the bare matter system; the result acts
// on {g, e} x Fock with g at index 0.
inline Operator project_two_level(const Operator& h_full) {
    const HilbertSpace& s = h_full.space();
    if (s.sites() != 2 || s.dim(0) < 2) {
        throw InvalidArgument("project_two_level: expected matter x Fock operator");
    }
    const int nf = s.dim(1);
    const HilbertSpace out_space({2, nf});
    Matrix out(2 * nf, 2 * nf);
    const Eigen::Index stride = nf;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            out.block(a * nf, b * nf, nf, nf) = h_full.data().block(a * stride, b * stride, nf, nf);
    return {out_space, std::move(out)};
}

inline Operator project_two_level(const Operator& h_full, const matter::MatterEigensystem& matter) {
    if (matter.levels() < 2) throw InvalidArgument("project_two_level: matter basis needs 2 levels");
    return project_two_level(h_full);
}

// --------------------------------------------------------------------------
// Dicke model
// --------------------------------------------------------------------------

struct DickeParams {
    int n_spins = 1;
    double omega_c = 1.0;
    double omega_eg = 1.0;
    double omega_r = 0.0; // single emitter
    int n_fock = 20;
    bool bosonized = false;
    int n_boson = 20;

    static constexpr Eigen::Index kMaxFullDimension = 4096;

    void validate() const {
        if (n_spins < 1) throw InvalidArgument("DickeParams: n_spins must be >= 1");
        if (!(omega_c > 0.0)) throw InvalidArgument("DickeParams: omega_c must be > 0");
        if (!(omega_r >= 0.0)) throw InvalidArgument("DickeParams: omega_r must be >= 0");
        if (n_fock < 2 || (bosonized && n_boson < 2)) {
            throw InvalidArgument("DickeParams: Fock dimensions must be >= 2");
        }
    }
    [[nodiscard]] HilbertSpace space() const {
        if (bosonized) return HilbertSpace({n_fock, n_boson});
        std::vector<int> dims(static_cast<std::size_t>(n_spins), 2);
        dims.push_back(n_fock);
        return HilbertSpace(std::move(dims));
    }
};

inline Operator build_dicke(const DickeParams& d) {
    d.validate();
    if (d.bosonized) {
        const HilbertSpace s = d.space();
        const Operator a = elementary(s, 0, OpKind::annihilate);
        const Operator b = elementary(s, 1, OpKind::annihilate);
        const double g = std::sqrt(static_cast<double>(d.n_spins)) * d.omega_r;
        return d.omega_c * elementary(s, 0, OpKind::number) +
               d.omega_eg * elementary(s, 1, OpKind::number) +
               g * ((a + a.adjoint()) * (b + b.adjoint()));
    }
    const double total = std::pow(2.0, d.n_spins) * d.n_fock;
    if (total > static_cast<double>(DickeParams::kMaxFullDimension)) {
        throw InvalidArgument("build_dicke: full-spin dimension 2^N * n_fock = " +
                              std::to_string(static_cast<long long>(total)) + " exceeds " +
                              std::to_string(DickeParams::kMaxFullDimension));
    }
    return detail::spin_boson(d.space(), d.n_spins, d.omega_c, d.omega_eg, d.omega_r, 0.0);
}

// b = sum_i sigma_-^i / sqrt(N) on the first n_spins sites of `space`.
inline Operator collective_lowering(const HilbertSpace& space, int n_spins) {
    if (n_spins < 1 || static_cast<std::size_t>(n_spins) > space.sites()) {
        throw InvalidArgument("collective_lowering: n_spins out of range for " + space.str());
    }
    Operator b = Operator::zero(space);
    for (int i = 0; i < n_spins; ++i) b += elementary(space, static_cast<std::size_t>(i), OpKind::sigma_minus);
    return (1.0 / std::sqrt(static_cast<double>(n_spins))) * b;
}

// <state| [b, b^dag] |state>
inline double hp_commutator_expectation(const DickeParams& d, const Ket& state) {
    if (d.n_spins < 1) throw InvalidArgument("hp_commutator_expectation: n_spins must be >= 1");
    if (std::pow(2.0, d.n_spins) > static_cast<double>(DickeParams::kMaxFullDimension)) {
        throw InvalidArgument("hp_commutator_expectation: 2^N exceeds the full-spin limit");
    }
    const Operator b = collective_lowering(state.space(), d.n_spins);
    return state.expectation(commutator(b, b.adjoint())).real();
}

// Symmetric Dicke state of N spins with n_x excitations, on HilbertSpace([2]*N).
inline Ket dicke_state(int n_spins, int n_excited) {
    if (n_excited < 0 || n_excited > n_spins) throw InvalidArgument("dicke_state: bad excitation count");
    const HilbertSpace s(std::vector<int>(static_cast<std::size_t>(n_spins), 2));
    Vector v = Vector::Zero(s.total());
    for (Eigen::Index i = 0; i < s.total(); ++i) {
        int ones = 0;
        for (int k = 0; k < n_spins; ++k) ones += static_cast<int>((i >> k) & 1);
        if (ones == n_excited) v(i) = 1.0;
    }
    return Ket(s, std::move(v)).normalized();
}

// --------------------------------------------------------------------------
// Truncation convergence
// --------------------------------------------------------------------------

struct ConvergenceReport {
    int n_fock = 0;
    double value = 0.0;
    double doubled_value = 0.0;
    [[nodiscard]] double relative_change() const {
        return std::abs(value - doubled_value) / std::max(std::abs(doubled_value), 1e-300);
    }
};

// Evaluates `observable(n_fock)` and `observable(2 n_fock)`; throws if the
// relative change exceeds `tolerance`.
inline ConvergenceReport convergence_check(const std::function<double(int)>& observable, int n_fock,
                                           double tolerance = 1e-6) {
    ConvergenceReport r{n_fock, observable(n_fock), observable(2 * n_fock)};
    if (r.relative_change() > tolerance) {
        std::ostringstream os;
        os << "convergence_check: observable changes by " << r.relative_change()
           << " (relative) when n_fock doubles from " << n_fock;
        throw ConvergenceError(os.str());
    }
    return r;
}

} // namespace cqed::models
