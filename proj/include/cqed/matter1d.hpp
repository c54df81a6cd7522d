// matter1d.hpp: single particle in a 1D potential on a uniform grid.
//
// Second-order central differences with Dirichlet walls. With this stencil
// the discrete commutator obeys [x, H] = (i/m) p exactly when p is the
// centered first difference, so position and momentum matrix elements are
// consistent with the discrete spectrum.

#pragma once

#include "errors.hpp"
#include "opcore.hpp"

#include <lapacke.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace cqed::matter {

struct Grid {
    double x_min = -1.0;
    double x_max = 1.0;
    int n_points = 1024;

    void validate() const {
        if (!(x_min < x_max)) throw InvalidArgument("Grid: x_min must be < x_max");
        if (n_points < 64) {
            throw InvalidArgument("Grid: n_points must be >= 64, got " + std::to_string(n_points));
        }
    }
    [[nodiscard]] double spacing() const { return (x_max - x_min) / (n_points - 1); }
    [[nodiscard]] double x(int i) const { return x_min + i * spacing(); }

    // Same box, spacing halved (nested points).
    [[nodiscard]] Grid refined() const { return {x_min, x_max, 2 * n_points - 1}; }
};

// V(x) = A x^4 - B x^2 for a particle of mass m.
struct PotentialSpec {
    double A = 50.0;
    double B = 0.0;
    double m = 1.0;

    void validate() const {
        if (!(A > 0.0)) throw InvalidArgument("PotentialSpec: quartic coefficient A must be > 0");
        if (!(m > 0.0)) throw InvalidArgument("PotentialSpec: mass m must be > 0");
    }
    [[nodiscard]] double operator()(double x) const {
        const double x2 = x * x;
        return A * x2 * x2 - B * x2;
    }
};

// m B^3 / A^2 (hbar = 1).
inline double anharmonicity(const PotentialSpec& pot) {
    pot.validate();
    return pot.m * pot.B * pot.B * pot.B / (pot.A * pot.A);
}

// Quadratic coefficient B giving the requested anharmonicity for fixed A, m.
inline double quadratic_for_anharmonicity(double A, double m, double value) {
    return std::cbrt(value * A * A / m);
}

// Box wide enough for the lowest levels to vanish at the walls.
inline Grid default_grid(const PotentialSpec& pot, int n_points = 1024) {
    const double half = 3.0 * std::sqrt(std::max(pot.B, 0.0) / pot.A) + 2.0;
    return {-half, half, n_points};
}

struct MatterEigensystem {
    Grid grid;
    double mass = 1.0;
    RealVector energies;            // ascending
    Eigen::MatrixXd wavefunctions;  // n_points x k, zero at both walls, ∫|psi|^2 dx = 1
    Matrix x_elems;                 // <j|x|k>
    Matrix p_elems;                 // <j|p|k>

    [[nodiscard]] int levels() const { return static_cast<int>(energies.size()); }

    // Trapezoid overlap matrix minus identity.
    [[nodiscard]] double orthonormality_defect() const {
        const Eigen::MatrixXd g =
            grid.spacing() * wavefunctions.transpose() * wavefunctions;
        return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
    }

    // Matter Hamiltonian restricted to the first `n` levels (diagonal).
    [[nodiscard]] Matrix hamiltonian(int n) const {
        return energies.head(n).cast<cplx>().asDiagonal();
    }
};

namespace detail {

// Lowest k eigenpairs of the symmetric tridiagonal matrix (diag, off).
inline void lowest_tridiagonal(std::vector<double> diag, std::vector<double> off, int k,
                               RealVector& values, Eigen::MatrixXd& vectors) {
    const lapack_int n = static_cast<lapack_int>(diag.size());
    lapack_int found = 0;
    std::vector<double> w(static_cast<std::size_t>(n));
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor> z(n, k);
    std::vector<lapack_int> ifail(static_cast<std::size_t>(n));
    const lapack_int info =
        LAPACKE_dstevx(LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(), 0.0, 0.0, 1, k,
                       0.0, &found, w.data(), z.data(), n, ifail.data());
    if (info != 0 || found != k) {
        throw SolverError("solve_1d: tridiagonal eigensolver failed (info " +
                          std::to_string(info) + ", found " + std::to_string(found) + ")");
    }
    values = Eigen::Map<RealVector>(w.data(), k);
    vectors = z;
}

} // namespace detail

// Lowest `k_levels` eigenpairs of -(1/2m) d^2/dx^2 + V(x) on `grid`.
template <class Potential>
MatterEigensystem solve_1d(const Grid& grid, double mass, Potential&& potential, int k_levels) {
    grid.validate();
    if (!(mass > 0.0)) throw InvalidArgument("solve_1d: mass must be > 0");
    if (k_levels < 1 || k_levels > grid.n_points / 4) {
        throw InvalidArgument("solve_1d: k_levels must be in [1, n_points/4], got " +
                              std::to_string(k_levels));
    }
    const int n = grid.n_points;
    const int inner = n - 2;
    const double h = grid.spacing();
    const double kinetic = 1.0 / (2.0 * mass * h * h);

    std::vector<double> diag(static_cast<std::size_t>(inner));
    std::vector<double> off(static_cast<std::size_t>(inner - 1), -kinetic);
    for (int i = 0; i < inner; ++i) {
        const double v = potential(grid.x(i + 1));
        if (!std::isfinite(v)) {
            throw InvalidArgument("solve_1d: potential is not finite at x = " +
                                  std::to_string(grid.x(i + 1)));
        }
        diag[static_cast<std::size_t>(i)] = 2.0 * kinetic + v;
    }

    RealVector values;
    Eigen::MatrixXd z;
    detail::lowest_tridiagonal(std::move(diag), std::move(off), k_levels, values, z);

    MatterEigensystem out;
    out.grid = grid;
    out.mass = mass;
    out.energies = values;
    out.wavefunctions = Eigen::MatrixXd::Zero(n, k_levels);
    out.wavefunctions.middleRows(1, inner) = z / std::sqrt(h);

    // Sign convention: the largest component on the right half is positive.
    for (int k = 0; k < k_levels; ++k) {
        Eigen::Index arg = 0;
        out.wavefunctions.col(k).tail(n / 2).cwiseAbs().maxCoeff(&arg);
        if (out.wavefunctions(n - n / 2 + arg, k) < 0.0) out.wavefunctions.col(k) *= -1.0;
    }

    Eigen::VectorXd xs(n);
    for (int i = 0; i < n; ++i) xs(i) = grid.x(i);
    Eigen::MatrixXd dpsi = Eigen::MatrixXd::Zero(n, k_levels);
    for (int i = 1; i < n - 1; ++i) {
        dpsi.row(i) = (out.wavefunctions.row(i + 1) - out.wavefunctions.row(i - 1)) / (2.0 * h);
    }
    const Eigen::MatrixXd xe =
        h * out.wavefunctions.transpose() * xs.asDiagonal() * out.wavefunctions;
    const Eigen::MatrixXd de = h * out.wavefunctions.transpose() * dpsi;
    out.x_elems = xe.cast<cplx>();
    out.p_elems = -I_unit * de.cast<cplx>();
    return out;
}

struct ConvergenceOptions {
    bool check = true;
    // Largest accepted relative change of the first gaps when h is halved.
    double gap_tolerance = 1e-3;
    int gaps_checked = 3;
};

// Double-well eigensystem; optionally verifies the lowest gaps against a
// solve on the refined grid.
inline MatterEigensystem solve_double_well(const Grid& grid, const PotentialSpec& pot,
                                           int k_levels, const ConvergenceOptions& opt = {}) {
    pot.validate();
    MatterEigensystem coarse = solve_1d(grid, pot.m, pot, k_levels);
    if (!opt.check) return coarse;

    const int gaps = std::min(opt.gaps_checked, k_levels - 1);
    if (gaps < 1) return coarse;
    const MatterEigensystem fine = solve_1d(grid.refined(), pot.m, pot, gaps + 1);
    for (int g = 0; g < gaps; ++g) {
        const double a = coarse.energies(g + 1) - coarse.energies(g);
        const double b = fine.energies(g + 1) - fine.energies(g);
        if (std::abs(a - b) > opt.gap_tolerance * std::abs(b)) {
            std::ostringstream os;
            os.precision(12);
            os << "solve_double_well: gap " << g << " not converged under grid doubling ("
               << a << " at n_points=" << grid.n_points << ", " << b
               << " at n_points=" << grid.refined().n_points << ")";
            throw ConvergenceError(os.str());
        }
    }
    return coarse;
}

// Lowest energies extrapolated to h -> 0 from `grid` and its refinement; the
// stencil error is O(h^2), so (4 E(h/2) - E(h)) / 3 removes the leading term.
inline RealVector richardson_energies(const Grid& grid, const PotentialSpec& pot, int k_levels) {
    pot.validate();
    const RealVector coarse = solve_1d(grid, pot.m, pot, k_levels).energies;
    const RealVector fine = solve_1d(grid.refined(), pot.m, pot, k_levels).energies;
    return (4.0 * fine - coarse) / 3.0;
}

// |<j|p|k> - i m w_jk <j|x|k>| / |<j|p|k>|, with w_jk = E_j - E_k.
inline double px_identity_error(const MatterEigensystem& eigs, const PotentialSpec& pot, int j,
                                int k) {
    if (j == k) throw InvalidArgument("px_identity_error: j and k must differ");
    if (j < 0 || k < 0 || j >= eigs.levels() || k >= eigs.levels()) {
        throw InvalidArgument("px_identity_error: level index out of range");
    }
    const cplx p = eigs.p_elems(j, k);
    const cplx x = eigs.x_elems(j, k);
    const double scale = std::sqrt(std::abs(eigs.energies(j) - eigs.energies(k)));
    if (std::abs(x) < 1e-9 * std::max(1.0, scale) || std::abs(p) < 1e-12) {
        throw InvalidArgument("px_identity_error: transition " + std::to_string(j) + "<->" +
                              std::to_string(k) + " is dipole-forbidden (vanishing <j|x|k>)");
    }
    const double w = eigs.energies(j) - eigs.energies(k);
    return std::abs(p - I_unit * pot.m * w * x) / std::abs(p);
}

} // namespace cqed::matter
