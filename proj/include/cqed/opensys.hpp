// opensys.hpp: Markovian open-system engines.
//
// Density operators are vectorized by stacking columns, so the superoperator
// of rho -> A rho B is kron(B^T, A) and element (m, n) of rho sits at index
// m + n d. The standard master equation is assembled in the bare basis; the
// dressed and generalized ones act on the eigenbasis of the system
// Hamiltonian, which the Liouvillian keeps alongside its matrix.

#pragma once

#include "analysis.hpp"
#include "errors.hpp"
#include "models.hpp"
#include "opcore.hpp"

#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace cqed::opensys {

using SparseMatrix = Eigen::SparseMatrix<cplx>;
using Triplet = Eigen::Triplet<cplx>;

// --------------------------------------------------------------------------
// Baths
// --------------------------------------------------------------------------

// gamma(omega) for omega > 0, zero otherwise.
struct SpectralDensity {
    enum class Shape { flat, ohmic };
    Shape shape = Shape::flat;
    double gamma0 = 1e-3;
    double omega_ref = 1.0; // ohmic: gamma0 at omega = omega_ref

    [[nodiscard]] double operator()(double omega) const {
        if (!(omega > 0.0)) return 0.0;
        return shape == Shape::flat ? gamma0 : gamma0 * omega / omega_ref;
    }
    void validate() const {
        if (!(gamma0 >= 0.0)) throw InvalidArgument("SpectralDensity: gamma0 must be >= 0");
        if (!(omega_ref > 0.0)) throw InvalidArgument("SpectralDensity: omega_ref must be > 0");
    }
    static SpectralDensity flat(double g) { return {Shape::flat, g, 1.0}; }
    static SpectralDensity ohmic(double g, double ref) { return {Shape::ohmic, g, ref}; }
};

inline const char* shape_name(SpectralDensity::Shape s) {
    return s == SpectralDensity::Shape::flat ? "flat" : "ohmic";
}

// Bose-Einstein occupation 1/(e^{omega/T} - 1); zero at T = 0.
inline double thermal_occupation(double omega, double temperature) {
    if (!(temperature >= 0.0)) throw InvalidArgument("thermal_occupation: temperature must be >= 0");
    if (temperature == 0.0) return 0.0;
    if (!(omega > 0.0)) throw InvalidArgument("thermal_occupation: omega must be > 0");
    return 1.0 / std::expm1(omega / temperature);
}

struct BathSpec {
    std::string name;
    Operator coupling;     // S, whose eigenbasis matrix elements set the dressed jumps
    Operator lowering;     // bare lowering operator used by the standard kind
    double bare_frequency; // frequency of the bare transition driven by `lowering`
    SpectralDensity density;
    double temperature = 0.0;

    void validate(const HilbertSpace& space) const {
        density.validate();
        if (!(temperature >= 0.0)) throw InvalidArgument("BathSpec " + name + ": temperature must be >= 0");
        if (!(coupling.space() == space) || !(lowering.space() == space)) {
            throw InvalidArgument("BathSpec " + name + ": operators do not act on " + space.str());
        }
        if (coupling.hermiticity_defect() > kHermiticityTolerance * std::max(1.0, coupling.max_norm())) {
            throw InvalidArgument("BathSpec " + name + ": coupling operator must be Hermitian");
        }
    }
};

// Cavity loss through S = a + a^dag; bare jump a.
inline BathSpec cavity_bath(const HilbertSpace& space, std::size_t site, double omega_c,
                            SpectralDensity density = {}, double temperature = 0.0) {
    const Operator a = elementary(space, site, OpKind::annihilate);
    return {"cavity", a + a.adjoint(), a, omega_c, density, temperature};
}

// Emitter loss through S = sigma_x; bare jump sigma_-.
inline BathSpec atom_bath(const HilbertSpace& space, std::size_t site, double omega_eg,
                          SpectralDensity density = {}, double temperature = 0.0) {
    return {"atom", elementary(space, site, OpKind::sigma_x),
            elementary(space, site, OpKind::sigma_minus), omega_eg, density, temperature};
}

// --------------------------------------------------------------------------
// Density matrices
// --------------------------------------------------------------------------

inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kPositivityTolerance = 1e-8;

struct DensityMatrix {
    HilbertSpace space;
    Matrix data;

    static DensityMatrix pure(const Ket& k) {
        const Ket n = k.normalized();
        return {n.space(), n.projector()};
    }
    // Fock/product basis state |occupation><occupation|.
    static DensityMatrix basis(const HilbertSpace& s, const std::vector<int>& occupation) {
        return pure(Ket::basis(s, occupation));
    }

    [[nodiscard]] double trace_defect() const { return std::abs(data.trace() - cplx(1.0)); }
    [[nodiscard]] double hermiticity_defect() const { return max_abs(data - data.adjoint()); }
    [[nodiscard]] double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Matrix> s(0.5 * (data + data.adjoint()), Eigen::EigenvaluesOnly);
        return s.eigenvalues()(0);
    }
    [[nodiscard]] double expectation(const Operator& op) const {
        if (!(op.space() == space)) throw InvalidArgument("DensityMatrix::expectation: space mismatch");
        return (op.data() * data).trace().real();
    }

    // Throws SolverError naming the violated invariant.
    void validate(double trace_tol = kTraceTolerance, double positivity_tol = kPositivityTolerance) const {
        std::ostringstream os;
        if (trace_defect() > trace_tol) {
            os << "density matrix trace defect " << trace_defect();
            throw SolverError(os.str());
        }
        if (hermiticity_defect() > 1e-10) {
            os << "density matrix hermiticity defect " << hermiticity_defect();
            throw SolverError(os.str());
        }
        const double lo = min_eigenvalue();
        if (lo < -positivity_tol) {
            os << "density matrix has negative eigenvalue " << lo;
            throw SolverError(os.str());
        }
    }
};

inline Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

inline Matrix unvec(const Vector& v, Eigen::Index d) {
    if (v.size() != d * d) throw InvalidArgument("unvec: length is not d^2");
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

// --------------------------------------------------------------------------
// Superoperators
// --------------------------------------------------------------------------

inline SparseMatrix to_sparse(const Matrix& m, double drop = 0.0) {
    std::vector<Triplet> t;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (std::abs(m(i, j)) > drop) t.emplace_back(i, j, m(i, j));
    SparseMatrix s(m.rows(), m.cols());
    s.setFromTriplets(t.begin(), t.end());
    return s;
}

inline SparseMatrix sparse_identity(Eigen::Index n) {
    SparseMatrix i(n, n);
    i.setIdentity();
    return i;
}

inline SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
    SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    out = Eigen::kroneckerProduct(a, b);
    return out;
}

// D[S] rho = S rho S^dag - (S^dag S rho + rho S^dag S)/2
inline SparseMatrix dissipator(const Operator& s) {
    const Eigen::Index d = s.dim();
    const SparseMatrix sp = to_sparse(s.data());
    const SparseMatrix sds = to_sparse(s.data().adjoint() * s.data());
    const SparseMatrix id = sparse_identity(d);
    const SparseMatrix sds_t = SparseMatrix(sds.transpose());
    SparseMatrix out = kron(SparseMatrix(sp.conjugate()), sp);
    out -= 0.5 * kron(id, sds);
    out -= 0.5 * kron(sds_t, id);
    out.prune([](Eigen::Index, Eigen::Index, const cplx& v) { return v != cplx(0.0); });
    return out;
}

// -i [H, .]
inline SparseMatrix hamiltonian_superoperator(const Operator& h) {
    const Eigen::Index d = h.dim();
    const SparseMatrix hs = to_sparse(h.data());
    const SparseMatrix id = sparse_identity(d);
    SparseMatrix out = kron(id, hs);
    out -= kron(SparseMatrix(hs.transpose()), id);
    out *= -I_unit;
    out.prune([](Eigen::Index, Eigen::Index, const cplx& v) { return v != cplx(0.0); });
    return out;
}

enum class MasterEquation { standard, dressed, generalized };

inline const char* kind_name(MasterEquation k) {
    switch (k) {
    case MasterEquation::standard: return "standard";
    case MasterEquation::dressed: return "dressed";
    case MasterEquation::generalized: return "generalized";
    }
    return "?";
}

inline MasterEquation parse_kind(const std::string& s) {
    if (s == "standard") return MasterEquation::standard;
    if (s == "dressed") return MasterEquation::dressed;
    if (s == "generalized") return MasterEquation::generalized;
    throw InvalidArgument("unknown master-equation kind '" + s + "' (standard, dressed, generalized)");
}

enum class Basis { bare, eigen };

// Transitions closer than this in frequency are treated as degenerate and
// carry no dissipation.
inline constexpr double kDegenerateTransition = 1e-10;

struct Liouvillian {
    MasterEquation kind = MasterEquation::standard;
    Basis basis = Basis::bare;
    HilbertSpace space;
    EigenSystem eigs;    // eigenbasis of the system Hamiltonian
    SparseMatrix matrix; // acts on vec(rho) in `basis`
    int dropped_degenerate = 0; // S-coupled level pairs closer than kDegenerateTransition
    double secular_threshold = 0.0;
    std::size_t cross_terms = 0;

    [[nodiscard]] Eigen::Index dim() const { return space.total(); }

    [[nodiscard]] Matrix to_internal(const Matrix& rho) const {
        return basis == Basis::eigen ? eigs.to_eigenbasis(rho) : rho;
    }
    [[nodiscard]] Matrix from_internal(const Matrix& rho) const {
        return basis == Basis::eigen ? eigs.from_eigenbasis(rho) : rho;
    }

    // L(rho) with rho and the result in the bare basis.
    [[nodiscard]] Matrix apply(const Matrix& rho) const {
        if (rho.rows() != dim() || rho.cols() != dim()) throw InvalidArgument("Liouvillian::apply: dimension mismatch");
        const Vector out = matrix * vec(to_internal(rho));
        return from_internal(unvec(out, dim()));
    }

    // max_k |sum_i L[(i,i), k]|: the trace functional must annihilate L.
    [[nodiscard]] double trace_defect() const {
        const Eigen::Index d = dim();
        Vector t = Vector::Zero(d * d);
        for (Eigen::Index i = 0; i < d; ++i) t(i + i * d) = 1.0;
        const Vector row = matrix.adjoint() * t;
        return row.cwiseAbs().maxCoeff();
    }
};

namespace detail {

struct Transition {
    Eigen::Index upper;
    Eigen::Index lower;
    double omega;
    cplx s;       // <lower|S|upper>
    double down;  // gamma(omega) (n + 1)
    double up;    // gamma(omega) n
};

inline std::vector<Transition> transitions(const EigenSystem& es, const BathSpec& bath, int& dropped) {
    const Matrix s = es.to_eigenbasis(bath.coupling.data());
    const double scale = std::max(1.0, max_abs(s));
    std::vector<Transition> out;
    for (Eigen::Index j = 0; j < es.size(); ++j) {
        for (Eigen::Index k = 0; k < j; ++k) {
            const cplx skj = s(k, j);
            if (std::abs(skj) < 1e-14 * scale) continue;
            const double w = es.values(j) - es.values(k);
            if (w < kDegenerateTransition) {
                ++dropped;
                continue;
            }
            const double g = bath.density(w);
            if (g == 0.0) continue;
            const double n = thermal_occupation(w, bath.temperature);
            out.push_back({j, k, w, skj, g * (n + 1.0), g * n});
        }
    }
    return out;
}

// Adds c [A_a rho A_b^dag - (A_b^dag A_a rho + rho A_b^dag A_a)/2] for
// A_x = |to_x><from_x| (amplitudes folded into c).
inline void add_pair(std::vector<Triplet>& t, Eigen::Index d, Eigen::Index to_a, Eigen::Index from_a,
                     Eigen::Index to_b, Eigen::Index from_b, cplx c) {
    t.emplace_back(to_a + to_b * d, from_a + from_b * d, c);
    if (to_a != to_b) return;
    // A_b^dag A_a = |from_b><from_a|
    for (Eigen::Index n = 0; n < d; ++n) {
        t.emplace_back(from_b + n * d, from_a + n * d, -0.5 * c);
        t.emplace_back(n + from_a * d, n + from_b * d, -0.5 * c);
    }
}

inline void add_dressed_terms(std::vector<Triplet>& t, Eigen::Index d, const std::vector<Transition>& tr) {
    for (const Transition& x : tr) {
        const double w2 = std::norm(x.s);
        if (x.down > 0.0) add_pair(t, d, x.lower, x.upper, x.lower, x.upper, x.down * w2);
        if (x.up > 0.0) add_pair(t, d, x.upper, x.lower, x.upper, x.lower, x.up * w2);
    }
}

// Cross terms between distinct transitions whose Bohr frequencies differ by
// less than `threshold`, with the arithmetic mean of the two rates.
inline std::size_t add_cross_terms(std::vector<Triplet>& t, Eigen::Index d, std::vector<Transition> tr,
                                   double threshold) {
    std::sort(tr.begin(), tr.end(), [](const Transition& a, const Transition& b) {
        if (a.omega != b.omega) return a.omega < b.omega;
        if (a.upper != b.upper) return a.upper < b.upper;
        return a.lower < b.lower;
    });
    std::size_t count = 0;
    for (std::size_t a = 0; a < tr.size(); ++a) {
        for (std::size_t b = a + 1; b < tr.size() && tr[b].omega - tr[a].omega < threshold; ++b) {
            const Transition& x = tr[a];
            const Transition& y = tr[b];
            const double down = 0.5 * (x.down + y.down);
            const double up = 0.5 * (x.up + y.up);
            const cplx cd = down * x.s * std::conj(y.s);
            // both orderings (a, b) and (b, a)
            if (down > 0.0) {
                add_pair(t, d, x.lower, x.upper, y.lower, y.upper, cd);
                add_pair(t, d, y.lower, y.upper, x.lower, x.upper, std::conj(cd));
            }
            if (up > 0.0) {
                const cplx cu = up * std::conj(x.s) * y.s;
                add_pair(t, d, x.upper, x.lower, y.upper, y.lower, cu);
                add_pair(t, d, y.upper, y.lower, x.upper, x.lower, std::conj(cu));
            }
            ++count;
        }
    }
    return count;
}

} // namespace detail

// Secular threshold of the generalized kind: 10 x the largest bath rate in play.
inline double secular_threshold(const EigenSystem& es, const std::vector<BathSpec>& baths) {
    double g = 0.0;
    for (const BathSpec& b : baths) {
        g = std::max(g, b.density(b.bare_frequency));
        for (Eigen::Index j = 1; j < es.size(); ++j) g = std::max(g, b.density(es.values(j) - es.values(0)));
    }
    return 10.0 * g;
}

inline Liouvillian build_liouvillian(const Operator& h, const std::vector<BathSpec>& baths, MasterEquation kind) {
    const HilbertSpace& space = h.space();
    for (const BathSpec& b : baths) b.validate(space);
    Liouvillian l;
    l.kind = kind;
    l.space = space;
    l.eigs = eig_hermitian(h); // also rejects non-Hermitian input
    const Eigen::Index d = space.total();

    if (kind == MasterEquation::standard) {
        l.basis = Basis::bare;
        l.matrix = hamiltonian_superoperator(h);
        for (const BathSpec& b : baths) {
            const double g = b.density(b.bare_frequency);
            if (g == 0.0) continue;
            const double n = thermal_occupation(b.bare_frequency, b.temperature);
            l.matrix += (g * (n + 1.0)) * dissipator(b.lowering);
            if (n > 0.0) l.matrix += (g * n) * dissipator(b.lowering.adjoint());
        }
        l.matrix.prune([](Eigen::Index, Eigen::Index, const cplx& v) { return v != cplx(0.0); });
        return l;
    }

    l.basis = Basis::eigen;
    std::vector<Triplet> t;
    for (Eigen::Index m = 0; m < d; ++m)
        for (Eigen::Index n = 0; n < d; ++n)
            if (m != n) t.emplace_back(m + n * d, m + n * d, -I_unit * (l.eigs.values(m) - l.eigs.values(n)));
    if (kind == MasterEquation::generalized) l.secular_threshold = secular_threshold(l.eigs, baths);
    for (const BathSpec& b : baths) {
        const auto tr = detail::transitions(l.eigs, b, l.dropped_degenerate);
        detail::add_dressed_terms(t, d, tr);
        if (kind == MasterEquation::generalized) {
            l.cross_terms += detail::add_cross_terms(t, d, tr, l.secular_threshold);
        }
    }
    l.matrix.resize(d * d, d * d);
    l.matrix.setFromTriplets(t.begin(), t.end());
    l.matrix.prune([](Eigen::Index, Eigen::Index, const cplx& v) { return v != cplx(0.0); });
    return l;
}

// --------------------------------------------------------------------------
// Positive-frequency operators and photodetection
// --------------------------------------------------------------------------

// sum_{k > j} <j|S|k> |j><k| in the eigenbasis of `es`, returned in the bare
// basis. Pairs closer than kDegenerateTransition are dropped.
inline Operator positive_frequency_part(const Operator& s, const EigenSystem& es) {
    if (!(s.space() == es.space)) throw InvalidArgument("positive_frequency_part: space mismatch");
    Matrix e = es.to_eigenbasis(s.data());
    for (Eigen::Index j = 0; j < e.rows(); ++j) {
        for (Eigen::Index k = 0; k < e.cols(); ++k) {
            if (!(k > j && es.values(k) - es.values(j) >= kDegenerateTransition)) e(j, k) = 0.0;
        }
    }
    return {s.space(), es.from_eigenbasis(e)};
}

// Tr(E^- E^+ rho)
inline double photodetection_rate(const DensityMatrix& rho, const Operator& e_plus) {
    if (!(rho.space == e_plus.space())) throw InvalidArgument("photodetection_rate: space mismatch");
    const cplx w = (e_plus.data() * rho.data * e_plus.data().adjoint()).trace();
    return std::max(0.0, w.real());
}

// Electric-field quadrature i (a^dag - a) of a cavity site.
inline Operator field_operator(const HilbertSpace& space, std::size_t site) {
    const Operator a = elementary(space, site, OpKind::annihilate);
    return I_unit * (a.adjoint() - a);
}

// --------------------------------------------------------------------------
// Block structure, steady states, gaps and propagation
// --------------------------------------------------------------------------

// Connected components of the sparsity graph of L; each component is an
// invariant subspace, listed in ascending index order.
inline std::vector<std::vector<Eigen::Index>> blocks(const Liouvillian& l) {
    const Eigen::Index n = l.matrix.rows();
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    for (Eigen::Index c = 0; c < l.matrix.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(l.matrix, c); it; ++it) {
            const Eigen::Index a = find(it.row()), b = find(c);
            if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
        }
    }
    std::vector<std::vector<Eigen::Index>> out;
    std::vector<Eigen::Index> slot(static_cast<std::size_t>(n), -1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index r = find(i);
        auto& s = slot[static_cast<std::size_t>(r)];
        if (s < 0) {
            s = static_cast<Eigen::Index>(out.size());
            out.emplace_back();
        }
        out[static_cast<std::size_t>(s)].push_back(i);
    }
    return out;
}

inline Matrix dense_block(const SparseMatrix& m, const std::vector<Eigen::Index>& idx) {
    const auto k = static_cast<Eigen::Index>(idx.size());
    std::vector<Eigen::Index> local(static_cast<std::size_t>(m.rows()), -1);
    for (Eigen::Index i = 0; i < k; ++i) local[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = i;
    Matrix b = Matrix::Zero(k, k);
    for (Eigen::Index c = 0; c < k; ++c) {
        for (SparseMatrix::InnerIterator it(m, idx[static_cast<std::size_t>(c)]); it; ++it) {
            b(local[static_cast<std::size_t>(it.row())], c) += it.value();
        }
    }
    return b;
}

inline constexpr double kSingularRcond = 1e-13;
inline constexpr double kResidualTolerance = 1e-8;

namespace detail {

inline Eigen::Index nullity(const Matrix& b) {
    Eigen::ColPivHouseholderQR<Matrix> qr(b);
    qr.setThreshold(1e-10);
    return b.cols() - qr.rank();
}

} // namespace detail

// Unique rho with L rho = 0 and unit trace, in the bare basis. Hermitized and
// normalized; positivity is verified, never imposed.
inline DensityMatrix steady_state(const Liouvillian& l) {
    const double tdef = l.trace_defect();
    if (tdef > 1e-10 * std::max(1.0, std::abs(l.matrix.coeffs().size() ? l.matrix.coeffs().cwiseAbs().maxCoeff() : 0.0))) {
        std::ostringstream os;
        os << "steady_state: Liouvillian is not trace preserving (defect " << tdef << ")";
        throw InvalidArgument(os.str());
    }
    const Eigen::Index d = l.dim();
    Vector x = Vector::Zero(d * d);
    Eigen::Index null_dim = 0;
    bool singular = false;
    bool solved = false;

    for (const auto& idx : blocks(l)) {
        const Matrix b = dense_block(l.matrix, idx);
        std::vector<Eigen::Index> diag;
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(idx.size()); ++i) {
            const Eigen::Index g = idx[static_cast<std::size_t>(i)];
            if (g % d == g / d) diag.push_back(i);
        }
        if (diag.empty()) {
            // Traceless sector: must be nonsingular, contributes nothing.
            Eigen::PartialPivLU<Matrix> lu(b);
            if (lu.rcond() < kSingularRcond) {
                singular = true;
                null_dim += detail::nullity(b);
            }
            continue;
        }
        Matrix a = b;
        const Eigen::Index r = diag.front();
        a.row(r).setZero();
        for (Eigen::Index i : diag) a(r, i) = 1.0;
        Eigen::PartialPivLU<Matrix> lu(a);
        if (lu.rcond() < kSingularRcond || solved) {
            singular = true;
            null_dim += std::max<Eigen::Index>(1, detail::nullity(b));
            continue;
        }
        Vector rhs = Vector::Zero(a.rows());
        rhs(r) = 1.0;
        const Vector y = lu.solve(rhs);
        for (Eigen::Index i = 0; i < y.size(); ++i) x(idx[static_cast<std::size_t>(i)]) = y(i);
        solved = true;
        null_dim += 1;
    }
    if (singular || !solved) {
        throw SolverError("steady_state: stationary space has dimension " + std::to_string(null_dim) +
                          ", expected 1");
    }

    Matrix rho = unvec(x, d);
    rho = 0.5 * (rho + rho.adjoint());
    rho /= rho.trace();
    const double residual = (l.matrix * vec(rho)).cwiseAbs().maxCoeff();
    if (residual > kResidualTolerance) {
        std::ostringstream os;
        os << "steady_state: residual " << residual << " exceeds " << kResidualTolerance;
        throw SolverError(os.str());
    }
    DensityMatrix out{l.space, l.from_internal(rho)};
    out.data = 0.5 * (out.data + out.data.adjoint());
    out.validate();
    return out;
}

// -max Re(lambda) over the nonzero eigenvalues of L.
inline double liouvillian_gap(const Liouvillian& l, double zero_tolerance = 1e-10) {
    double best = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& idx : blocks(l)) {
        const Matrix b = dense_block(l.matrix, idx);
        Vector ev;
        if (b.rows() == 1) {
            ev = b.diagonal();
        } else {
            Eigen::ComplexEigenSolver<Matrix> es(b, false);
            if (es.info() != Eigen::Success) {
                throw SolverError("liouvillian_gap: eigenvalue computation failed for a block of size " +
                                  std::to_string(b.rows()));
            }
            ev = es.eigenvalues();
        }
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            if (std::abs(ev(i)) <= zero_tolerance) continue;
            best = std::max(best, ev(i).real());
            any = true;
        }
    }
    if (!any) throw SolverError("liouvillian_gap: no nonzero eigenvalues");
    return std::max(0.0, -best);
}

// exp(L t) rho0, block by block.
inline DensityMatrix lindblad_evolve(const DensityMatrix& rho0, const Liouvillian& l, double t) {
    if (!(t >= 0.0)) throw InvalidArgument("lindblad_evolve: t must be >= 0");
    if (!(rho0.space == l.space)) throw InvalidArgument("lindblad_evolve: space mismatch");
    const Eigen::Index d = l.dim();
    const Vector x0 = vec(l.to_internal(rho0.data));
    Vector x = Vector::Zero(d * d);
    for (const auto& idx : blocks(l)) {
        Vector y(static_cast<Eigen::Index>(idx.size()));
        bool nonzero = false;
        for (std::size_t i = 0; i < idx.size(); ++i) {
            y(static_cast<Eigen::Index>(i)) = x0(idx[i]);
            nonzero = nonzero || y(static_cast<Eigen::Index>(i)) != cplx(0.0);
        }
        if (!nonzero) continue;
        const Matrix b = dense_block(l.matrix, idx) * t;
        const Matrix e = b.rows() == 1 ? Matrix(b.array().exp()) : Matrix(b.exp());
        if (!e.allFinite()) throw ConvergenceError("lindblad_evolve: propagator overflow");
        const Vector z = e * y;
        for (std::size_t i = 0; i < idx.size(); ++i) x(idx[i]) = z(static_cast<Eigen::Index>(i));
    }
    DensityMatrix out{l.space, l.from_internal(unvec(x, d))};
    out.data = 0.5 * (out.data + out.data.adjoint());
    if (out.trace_defect() > 1e-9) {
        std::ostringstream os;
        os << "lindblad_evolve: trace drifted by " << out.trace_defect();
        throw ConvergenceError(os.str());
    }
    out.validate(1e-9, kPositivityTolerance);
    return out;
}

// --------------------------------------------------------------------------
// Emission sweep
// --------------------------------------------------------------------------

struct EmissionOptions {
    double omega_c = 1.0;
    double omega_eg = 1.0;
    int n_fock = 40;
    double gamma_cavity = 1e-3;
    double gamma_atom = 1e-3;
    SpectralDensity::Shape shape = SpectralDensity::Shape::flat;
    double temperature_cavity = 0.0;
    double temperature_atom = 0.05;
    std::vector<MasterEquation> kinds{MasterEquation::standard, MasterEquation::dressed,
                                      MasterEquation::generalized};
};

inline std::vector<BathSpec> rabi_baths(const HilbertSpace& s, const EmissionOptions& o) {
    const SpectralDensity dc{o.shape, o.gamma_cavity, o.omega_c};
    const SpectralDensity da{o.shape, o.gamma_atom, o.omega_eg};
    return {cavity_bath(s, models::kCavity, o.omega_c, dc, o.temperature_cavity),
            atom_bath(s, models::kEmitter, o.omega_eg, da, o.temperature_atom)};
}

// Steady-state output rate for one kind: gamma_c <a^dag a> for the standard
// equation, gamma_c Tr(E^- E^+ rho) with E = i(a^dag - a) otherwise.
inline double emission_rate(const Operator& h, const EmissionOptions& o, MasterEquation kind) {
    const HilbertSpace& s = h.space();
    const Liouvillian l = build_liouvillian(h, rabi_baths(s, o), kind);
    const DensityMatrix rho = steady_state(l);
    if (kind == MasterEquation::standard) {
        return o.gamma_cavity * rho.expectation(elementary(s, models::kCavity, OpKind::number));
    }
    const Operator ep = positive_frequency_part(field_operator(s, models::kCavity), l.eigs);
    return o.gamma_cavity * photodetection_rate(rho, ep);
}

inline analysis::SweepResult emission_sweep(const std::vector<double>& couplings, const EmissionOptions& o) {
    if (o.kinds.empty()) throw InvalidArgument("emission_sweep: no master-equation kinds selected");
    std::vector<std::string> cols;
    for (MasterEquation k : o.kinds) cols.push_back(std::string("W_") + kind_name(k));
    analysis::SweepResult out("coupling", cols);
    for (std::size_t i = 0; i < couplings.size(); ++i) {
        const double g = couplings[i];
        try {
            const Operator h = models::build_rabi(models::RabiParams(o.omega_c, o.omega_eg, g, o.n_fock));
            std::vector<double> row;
            for (MasterEquation k : o.kinds) row.push_back(emission_rate(h, o, k));
            out.add_row(g, row);
        } catch (const Error& e) {
            out.add_failure(i, g, e);
        }
    }
    return out;
}

} // namespace cqed::opensys
