// analysis.hpp: regime metrics, spectral sweeps and ground-state observables.

#pragma once

#include "errors.hpp"
#include "models.hpp"
#include "opcore.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cqed::analysis {

// --------------------------------------------------------------------------
// Regime metrics
// --------------------------------------------------------------------------

enum class Regime { weak = 0, strong = 1, ultrastrong = 2, deep_strong = 3 };

inline const char* regime_name(Regime r) noexcept {
    switch (r) {
    case Regime::weak: return "weak";
    case Regime::strong: return "strong";
    case Regime::ultrastrong: return "USC";
    case Regime::deep_strong: return "deep-strong";
    }
    return "?";
}

inline constexpr double kUltrastrongZeta = 0.04;

struct RegimeMetrics {
    double zeta = 0.0;
    double cooperativity = 0.0; // +inf when no loss rates are supplied
    double coupling_ratio = 0.0; // omega_r / max(omega_c, omega_eg)
    Regime classification = Regime::weak;
};

inline Regime classify(double zeta, double cooperativity, double coupling_ratio) {
    if (coupling_ratio > 1.0) return Regime::deep_strong;
    if (zeta >= kUltrastrongZeta) return Regime::ultrastrong;
    if (cooperativity > 1.0) return Regime::strong;
    return Regime::weak;
}

// zeta = 4 omega_r^2 / (omega_c omega_eg), C = 4 omega_r^2 / (gamma kappa).
// Any consistent frequency unit works; only ratios enter.
inline RegimeMetrics regime_metrics(double omega_c, double omega_eg, double omega_r,
                                    std::optional<double> gamma = std::nullopt,
                                    std::optional<double> kappa = std::nullopt) {
    if (!(omega_c > 0.0)) throw InvalidArgument("regime_metrics: omega_c must be > 0");
    if (!(omega_eg > 0.0)) throw InvalidArgument("regime_metrics: omega_eg must be > 0");
    if (!(omega_r >= 0.0)) throw InvalidArgument("regime_metrics: omega_r must be >= 0");
    if (gamma.has_value() != kappa.has_value()) {
        throw InvalidArgument("regime_metrics: gamma and kappa must be given together");
    }
    RegimeMetrics m;
    const double g2 = 4.0 * omega_r * omega_r;
    m.zeta = g2 / (omega_c * omega_eg);
    if (gamma) {
        if (!(*gamma > 0.0)) throw InvalidArgument("regime_metrics: gamma must be > 0");
        if (!(*kappa > 0.0)) throw InvalidArgument("regime_metrics: kappa must be > 0");
        m.cooperativity = g2 / (*gamma * *kappa);
    } else {
        m.cooperativity = std::numeric_limits<double>::infinity();
    }
    m.coupling_ratio = omega_r / std::max(omega_c, omega_eg);
    m.classification = classify(m.zeta, m.cooperativity, m.coupling_ratio);
    return m;
}

inline constexpr double kFineStructure = 7.2973525693e-3;

struct Impedance {
    double z = 0.0;
    double z0 = 376.730313668;
    int exponent = 1; // +1 or -1 depending on how the circuit couples
};

// omega_r/omega_c ~ alpha^{3/2} / (ell pi sqrt(V)), with V in half-wavelength
// cubes. A circuit impedance rescales alpha -> (Z/Z0)^exponent alpha.
inline double single_atom_coupling_bound(int ell, double volume,
                                         std::optional<Impedance> impedance = std::nullopt,
                                         double alpha = kFineStructure) {
    if (ell < 1) throw InvalidArgument("single_atom_coupling_bound: ell must be >= 1");
    if (!(volume > 0.0)) throw InvalidArgument("single_atom_coupling_bound: volume must be > 0");
    if (!(alpha > 0.0)) throw InvalidArgument("single_atom_coupling_bound: alpha must be > 0");
    double a = alpha;
    if (impedance) {
        if (!(impedance->z > 0.0) || !(impedance->z0 > 0.0)) {
            throw InvalidArgument("single_atom_coupling_bound: impedances must be > 0");
        }
        if (impedance->exponent != 1 && impedance->exponent != -1) {
            throw InvalidArgument("single_atom_coupling_bound: impedance exponent must be +1 or -1");
        }
        a *= std::pow(impedance->z / impedance->z0, impedance->exponent);
    }
    return std::pow(a, 1.5) / (ell * std::numbers::pi * std::sqrt(volume));
}

// Largest excitation number n for which the rotating-wave picture holds:
// n_max = (omega_c + omega_eg)^2 / omega_r^2.
inline double rwa_boundary(double omega_c, double omega_eg, double omega_r) {
    if (!(omega_r > 0.0)) {
        throw InvalidArgument("rwa_boundary: omega_r = 0, the rotating-wave picture is valid for every n");
    }
    const double s = omega_c + omega_eg;
    return s * s / (omega_r * omega_r);
}

// Energy of the boundary in a spectrum plot, E ~ omega_c n_max.
inline double rwa_boundary_energy(double omega_c, double omega_eg, double omega_r) {
    return omega_c * rwa_boundary(omega_c, omega_eg, omega_r);
}

inline double effective_mass(double m, double omega_r, double omega_c) {
    if (!(m > 0.0) || !(omega_c > 0.0) || !(omega_r >= 0.0)) {
        throw InvalidArgument("effective_mass: m, omega_c must be > 0 and omega_r >= 0");
    }
    const double r = omega_r / omega_c;
    return m * (1.0 + 2.0 * r * r);
}

// --------------------------------------------------------------------------
// Sweeps
// --------------------------------------------------------------------------

inline std::vector<double> linspace(double start, double stop, int count) {
    if (count < 2) throw InvalidArgument("linspace: count must be >= 2");
    std::vector<double> v(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        v[static_cast<std::size_t>(i)] = (i == count - 1) ? stop : start + (stop - start) * i / (count - 1);
    }
    return v;
}

struct SweepFailure {
    std::size_t index;
    double axis_value;
    ErrorCategory category;
    std::string message;
};

// Column 0 holds the axis value; failed points carry NaN in the data columns.
struct SweepResult {
    std::string axis;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    std::map<std::string, std::string> metadata;
    std::vector<SweepFailure> failures;

    SweepResult() = default;
    SweepResult(std::string axis_name, std::vector<std::string> data_columns)
        : axis(std::move(axis_name)) {
        columns.push_back(axis);
        for (auto& c : data_columns) columns.push_back(std::move(c));
    }

    void add_row(double axis_value, const std::vector<double>& values) {
        if (values.size() + 1 != columns.size()) {
            throw InvalidArgument("SweepResult: row has " + std::to_string(values.size() + 1) +
                                  " columns, expected " + std::to_string(columns.size()));
        }
        if (!rows.empty() && !(axis_value >= rows.back().front())) {
            throw InvalidArgument("SweepResult: rows must be ordered by axis value");
        }
        std::vector<double> r{axis_value};
        r.insert(r.end(), values.begin(), values.end());
        rows.push_back(std::move(r));
    }

    void add_failure(std::size_t index, double axis_value, const Error& e) {
        failures.push_back({index, axis_value, e.category(), e.what()});
        add_row(axis_value, std::vector<double>(columns.size() - 1,
                                                std::numeric_limits<double>::quiet_NaN()));
    }

    [[nodiscard]] std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw InvalidArgument("SweepResult: no column named " + name);
    }

    [[nodiscard]] std::vector<double> values(const std::string& name) const {
        const std::size_t c = column(name);
        std::vector<double> out;
        out.reserve(rows.size());
        for (const auto& r : rows) out.push_back(r[c]);
        return out;
    }

    // Throws the category of the first failure with a summary of all of them.
    void require_complete() const {
        if (failures.empty()) return;
        std::ostringstream os;
        os << failures.size() << " of " << rows.size() << " sweep points failed; first at "
           << axis << " = " << failures.front().axis_value << ": " << failures.front().message;
        throw Error(failures.front().category, os.str());
    }
};

using HamiltonianFamily = std::function<Operator(double)>;

// Lowest k eigenvalues of family(g) for every g in `grid`, optionally
// referenced to the ground value. Failing points are recorded and the
// sweep continues; call require_complete() for the summary error.
inline SweepResult spectrum_sweep(const HamiltonianFamily& family, const std::vector<double>& grid,
                                  int k_levels, bool relative_to_ground = false,
                                  const std::string& axis = "coupling",
                                  const std::string& prefix = "E") {
    if (k_levels < 1) throw InvalidArgument("spectrum_sweep: k_levels must be >= 1");
    if (grid.empty()) throw InvalidArgument("spectrum_sweep: empty coupling grid");
    std::vector<std::string> cols;
    for (int k = 0; k < k_levels; ++k) cols.push_back(prefix + std::to_string(k));
    SweepResult out(axis, cols);
    out.metadata["k_levels"] = std::to_string(k_levels);
    out.metadata["relative_to_ground"] = relative_to_ground ? "1" : "0";
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            const EigenSystem es = eig_hermitian(family(grid[i]));
            if (es.size() < k_levels) throw InvalidArgument("spectrum_sweep: k_levels exceeds dimension");
            std::vector<double> row(static_cast<std::size_t>(k_levels));
            for (int k = 0; k < k_levels; ++k) {
                row[static_cast<std::size_t>(k)] = es.values(k) - (relative_to_ground ? es.values(0) : 0.0);
            }
            out.add_row(grid[i], row);
        } catch (const Error& e) {
            out.add_failure(i, grid[i], e);
        }
    }
    return out;
}

// --------------------------------------------------------------------------
// Ground-state observables
// --------------------------------------------------------------------------

inline constexpr double kDegeneracyTolerance = 1e-8;

// Eigenvectors with E - E0 < tolerance, as columns.
inline Matrix ground_subspace(const EigenSystem& es, double tolerance = kDegeneracyTolerance) {
    Eigen::Index m = 1;
    while (m < es.size() && es.values(m) - es.values(0) < tolerance) ++m;
    return es.vectors.leftCols(m);
}

struct GroundObservable {
    double value = 0.0;
    int multiplicity = 1;
    [[nodiscard]] bool degenerate() const { return multiplicity > 1; }
};

// <a^dag a> in the ground state; for a degenerate ground level the average
// over the ground subspace, Tr(P n) / dim P.
inline GroundObservable ground_state_photons_detail(const EigenSystem& es, std::size_t photon_site) {
    require_bosonic(es.space, photon_site, "ground_state_photons");
    const Matrix p = ground_subspace(es);
    const Operator n = elementary(es.space, photon_site, OpKind::number);
    const cplx tr = (p.adjoint() * n.data() * p).trace();
    return {tr.real() / static_cast<double>(p.cols()), static_cast<int>(p.cols())};
}

inline GroundObservable ground_state_photons_detail(const Operator& h, std::size_t photon_site) {
    return ground_state_photons_detail(eig_hermitian(h), photon_site);
}

inline double ground_state_photons(const Operator& h, std::size_t photon_site = models::kCavity) {
    return ground_state_photons_detail(h, photon_site).value;
}

struct PhotonCoefficient {
    double c = 0.0;       // extrapolated to omega_r -> 0
    double c_low = 0.0;   // <n>/g^2 at the lower probe coupling
    double c_high = 0.0;  // at the upper probe coupling
    [[nodiscard]] double plateau_variation() const { return std::abs(c_low - c_high) / std::abs(c); }
};

struct PhotonCoefficientOptions {
    double omega_c = 1.0;
    double omega_eg = 1.0;
    int n_fock = 30;
    double g_low = 0.01;
    double g_high = 0.02;
    double plateau_tolerance = 0.05;
};

// Leading coefficient c of <a^dag a>_G = c (omega_r/omega_c)^2 for the Rabi
// model, extrapolated from two probe couplings (c(g) = c + O(g^2)).
inline PhotonCoefficient perturbative_photon_coefficient(const PhotonCoefficientOptions& o = {}) {
    if (!(o.g_low > 0.0) || !(o.g_high > o.g_low)) {
        throw InvalidArgument("perturbative_photon_coefficient: need 0 < g_low < g_high");
    }
    auto ratio = [&](double g) {
        const models::RabiParams p(o.omega_c, o.omega_eg, g * o.omega_c, o.n_fock);
        return ground_state_photons(models::build_rabi(p)) / (g * g);
    };
    PhotonCoefficient r;
    r.c_low = ratio(o.g_low);
    r.c_high = ratio(o.g_high);
    const double s = (o.g_high * o.g_high) / (o.g_low * o.g_low);
    r.c = (s * r.c_low - r.c_high) / (s - 1.0);
    if (!(r.plateau_variation() < o.plateau_tolerance)) {
        std::ostringstream os;
        os << "perturbative_photon_coefficient: no plateau, c = " << r.c_low << " at " << o.g_low
           << " vs " << r.c_high << " at " << o.g_high;
        throw ConvergenceError(os.str());
    }
    return r;
}

// Parity-even cat (|-alpha, <-> - |alpha, ->>)/sqrt(2) on {2, n_fock}, where
// |<-> = (|e> + |g>)/sqrt(2) and |->> = (|e> - |g>)/sqrt(2) are the sigma_x
// eigenstates. It is the image of |0, g> under the polaron unitary and
// reduces to |0, g> at alpha = 0.
inline Ket cat_state(const HilbertSpace& space, double alpha) {
    if (space.sites() != 2 || space.dim(models::kEmitter) != 2) {
        throw InvalidArgument("cat_state: expected a two-level x Fock space");
    }
    const int nf = space.dim(models::kCavity);
    const Matrix dm = local_displacement(nf, cplx(-alpha), false);
    const Matrix dp = local_displacement(nf, cplx(alpha), false);
    const double r = 1.0 / std::sqrt(2.0);
    Vector left(2), right(2);
    left << r, r;   // (g, e) components of |<->
    right << -r, r; // |->>
    const Vector v = r * (Vector(Eigen::kroneckerProduct(left, Vector(dm.col(0)))) -
                          Vector(Eigen::kroneckerProduct(right, Vector(dp.col(0)))));
    return Ket(space, v).normalized();
}

// |<cat|G>|^2, or <cat|P|cat> over the ground subspace when the lowest level
// is degenerate within kDegeneracyTolerance.
inline double cat_fidelity(const EigenSystem& es, double alpha) {
    const Ket cat = cat_state(es.space, alpha);
    const Matrix p = ground_subspace(es);
    return (p.adjoint() * cat.amplitudes()).squaredNorm();
}

inline double cat_fidelity(const Ket& ground, double alpha) {
    const Ket cat = cat_state(ground.space(), alpha);
    return std::norm(cat.inner(ground));
}

} // namespace cqed::analysis
