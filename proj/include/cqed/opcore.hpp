// opcore.hpp: dense operator algebra on composite Hilbert spaces:
// tensor embedding of bosonic/spin operators, displacements, coherent
// states, Hermitian eigensolving and commutator diagnostics.
//
// Conventions
//   * site 0 is the most significant factor of the Kronecker product;
//   * a two-level site stores |g> at index 0 and |e> at index 1, so that
//     sigma_z = diag(-1, +1), sigma_minus = |g><e| and sigma_z sigma_x = i sigma_y.

#pragma once

#include "errors.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace cqed {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr cplx I_unit{0.0, 1.0};

inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// --------------------------------------------------------------------------
// HilbertSpace
// --------------------------------------------------------------------------

class HilbertSpace {
public:
    HilbertSpace() = default;

    explicit HilbertSpace(std::vector<int> dims) : dims_(std::move(dims)) {
        if (dims_.empty()) throw InvalidArgument("HilbertSpace: at least one subsystem required");
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            if (dims_[i] < 1) {
                throw InvalidArgument("HilbertSpace: dimension of site " + std::to_string(i) +
                                      " must be >= 1, got " + std::to_string(dims_[i]));
            }
        }
    }

    [[nodiscard]] const std::vector<int>& dims() const noexcept { return dims_; }
    [[nodiscard]] std::size_t sites() const noexcept { return dims_.size(); }
    [[nodiscard]] int dim(std::size_t site) const { return dims_.at(site); }

    [[nodiscard]] Eigen::Index total() const noexcept {
        Eigen::Index n = 1;
        for (int d : dims_) n *= d;
        return n;
    }

    // Stride of a site in the flattened index.
    [[nodiscard]] Eigen::Index stride(std::size_t site) const {
        Eigen::Index s = 1;
        for (std::size_t i = site + 1; i < dims_.size(); ++i) s *= dims_[i];
        return s;
    }

    [[nodiscard]] Eigen::Index index_of(const std::vector<int>& occupation) const {
        if (occupation.size() != dims_.size()) {
            throw InvalidArgument("HilbertSpace: occupation list has wrong length");
        }
        Eigen::Index idx = 0;
        for (std::size_t i = 0; i < dims_.size(); ++i) {
            if (occupation[i] < 0 || occupation[i] >= dims_[i]) {
                throw InvalidArgument("HilbertSpace: occupation out of range at site " +
                                      std::to_string(i));
            }
            idx = idx * dims_[i] + occupation[i];
        }
        return idx;
    }

    // Local quantum number of `site` for a flattened index.
    [[nodiscard]] int local_index(Eigen::Index flat, std::size_t site) const {
        return static_cast<int>((flat / stride(site)) % dims_.at(site));
    }

    [[nodiscard]] std::string str() const {
        std::ostringstream os;
        os << '[';
        for (std::size_t i = 0; i < dims_.size(); ++i) os << (i ? "," : "") << dims_[i];
        os << ']';
        return os.str();
    }

    friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;

private:
    std::vector<int> dims_;
};

// --------------------------------------------------------------------------
// Operator / Ket
// --------------------------------------------------------------------------

class Operator {
public:
    Operator() = default;

    Operator(HilbertSpace space, Matrix data) : space_(std::move(space)), data_(std::move(data)) {
        const auto n = space_.total();
        if (data_.rows() != n || data_.cols() != n) {
            throw InvalidArgument("Operator: matrix is " + std::to_string(data_.rows()) + "x" +
                                  std::to_string(data_.cols()) + " but space " + space_.str() +
                                  " has dimension " + std::to_string(n));
        }
    }

    static Operator zero(const HilbertSpace& s) {
        return {s, Matrix::Zero(s.total(), s.total())};
    }
    static Operator identity(const HilbertSpace& s) {
        return {s, Matrix::Identity(s.total(), s.total())};
    }

    [[nodiscard]] const HilbertSpace& space() const noexcept { return space_; }
    [[nodiscard]] const Matrix& data() const noexcept { return data_; }
    [[nodiscard]] Eigen::Index dim() const noexcept { return data_.rows(); }

    [[nodiscard]] Operator adjoint() const { return {space_, data_.adjoint()}; }
    [[nodiscard]] double max_norm() const { return max_abs(data_); }
    [[nodiscard]] double hermiticity_defect() const { return max_abs(data_ - data_.adjoint()); }

    Operator& operator+=(const Operator& o) {
        require_same(o, "+=");
        data_ += o.data_;
        return *this;
    }
    Operator& operator-=(const Operator& o) {
        require_same(o, "-=");
        data_ -= o.data_;
        return *this;
    }
    Operator& operator*=(cplx s) {
        data_ *= s;
        return *this;
    }

    friend Operator operator+(Operator a, const Operator& b) { return a += b; }
    friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
    friend Operator operator*(Operator a, cplx s) { return a *= s; }
    friend Operator operator*(cplx s, Operator a) { return a *= s; }
    friend Operator operator*(double s, Operator a) { return a *= cplx(s); }
    friend Operator operator*(const Operator& a, const Operator& b) {
        a.require_same(b, "*");
        return {a.space_, a.data_ * b.data_};
    }

    void require_same(const Operator& o, const char* op) const {
        if (!(space_ == o.space_)) {
            throw InvalidArgument(std::string("Operator ") + op + ": space mismatch " +
                                  space_.str() + " vs " + o.space_.str());
        }
    }

private:
    HilbertSpace space_;
    Matrix data_;
};

class Ket {
public:
    Ket() = default;

    Ket(HilbertSpace space, Vector amplitudes)
        : space_(std::move(space)), amps_(std::move(amplitudes)) {
        if (amps_.size() != space_.total()) {
            throw InvalidArgument("Ket: amplitude vector length " + std::to_string(amps_.size()) +
                                  " does not match space " + space_.str());
        }
    }

    static Ket basis(const HilbertSpace& s, const std::vector<int>& occupation) {
        Vector v = Vector::Zero(s.total());
        v(s.index_of(occupation)) = 1.0;
        return {s, std::move(v)};
    }

    [[nodiscard]] const HilbertSpace& space() const noexcept { return space_; }
    [[nodiscard]] const Vector& amplitudes() const noexcept { return amps_; }
    [[nodiscard]] double norm() const { return amps_.norm(); }

    [[nodiscard]] Ket normalized() const {
        const double n = norm();
        if (n == 0.0) throw InvalidArgument("Ket: cannot normalize the zero vector");
        return {space_, amps_ / n};
    }

    [[nodiscard]] cplx inner(const Ket& o) const {
        if (!(space_ == o.space_)) throw InvalidArgument("Ket::inner: space mismatch");
        return amps_.dot(o.amps_); // conjugates *this
    }

    [[nodiscard]] cplx expectation(const Operator& op) const {
        if (!(space_ == op.space())) throw InvalidArgument("Ket::expectation: space mismatch");
        return amps_.dot(op.data() * amps_);
    }

    [[nodiscard]] Matrix projector() const { return amps_ * amps_.adjoint(); }

    friend Ket operator*(const Operator& op, const Ket& k) {
        if (!(op.space() == k.space_)) throw InvalidArgument("Operator*Ket: space mismatch");
        return {k.space_, op.data() * k.amps_};
    }

private:
    HilbertSpace space_;
    Vector amps_;
};

// --------------------------------------------------------------------------
// Local operators and embedding
// --------------------------------------------------------------------------

enum class OpKind { annihilate, number, sigma_x, sigma_y, sigma_z, sigma_minus };

inline const char* kind_name(OpKind k) noexcept {
    switch (k) {
    case OpKind::annihilate: return "annihilate";
    case OpKind::number: return "number";
    case OpKind::sigma_x: return "sigma_x";
    case OpKind::sigma_y: return "sigma_y";
    case OpKind::sigma_z: return "sigma_z";
    case OpKind::sigma_minus: return "sigma_minus";
    }
    return "?";
}

namespace local {

// a|n> = sqrt(n)|n-1>
inline Matrix annihilate(int n) {
    Matrix a = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

inline Matrix number(int n) {
    Matrix m = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) m(k, k) = static_cast<double>(k);
    return m;
}

inline Matrix sigma_minus() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    return m;
}

inline Matrix sigma_x() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return m;
}

// -i(sigma_+ - sigma_-)
inline Matrix sigma_y() {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 0) = -I_unit;
    m(0, 1) = I_unit;
    return m;
}

inline Matrix sigma_z() {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = -1.0;
    m(1, 1) = 1.0;
    return m;
}

} // namespace local

// Kronecker product I ⊗ ... ⊗ local ⊗ ... ⊗ I.
inline Operator embed(const HilbertSpace& space, std::size_t site, const Matrix& op) {
    if (site >= space.sites()) {
        throw InvalidArgument("embed: site " + std::to_string(site) + " out of range for space " +
                              space.str());
    }
    const int d = space.dim(site);
    if (op.rows() != d || op.cols() != d) {
        throw InvalidArgument("embed: local operator dimension does not match site " +
                              std::to_string(site));
    }
    const Eigen::Index left = space.total() / (space.stride(site) * d);
    const Eigen::Index right = space.stride(site);
    Matrix full = Eigen::kroneckerProduct(
        Matrix(Matrix::Identity(left, left)),
        Matrix(Eigen::kroneckerProduct(op, Matrix(Matrix::Identity(right, right)))));
    return {space, std::move(full)};
}

inline Operator elementary(const HilbertSpace& space, std::size_t site, OpKind kind) {
    if (site >= space.sites()) {
        throw InvalidArgument("elementary: site " + std::to_string(site) + " out of range for " +
                              std::string(kind_name(kind)) + " on space " + space.str());
    }
    const int d = space.dim(site);
    const bool spin = kind == OpKind::sigma_x || kind == OpKind::sigma_y ||
                      kind == OpKind::sigma_z || kind == OpKind::sigma_minus;
    if (spin && d != 2) {
        throw InvalidArgument("elementary: " + std::string(kind_name(kind)) + " at site " +
                              std::to_string(site) + " requires dimension 2, got " +
                              std::to_string(d));
    }
    if (!spin && d < 2) {
        throw InvalidArgument("elementary: " + std::string(kind_name(kind)) + " at site " +
                              std::to_string(site) + " requires dimension >= 2");
    }
    switch (kind) {
    case OpKind::annihilate: return embed(space, site, local::annihilate(d));
    case OpKind::number: return embed(space, site, local::number(d));
    case OpKind::sigma_x: return embed(space, site, local::sigma_x());
    case OpKind::sigma_y: return embed(space, site, local::sigma_y());
    case OpKind::sigma_z: return embed(space, site, local::sigma_z());
    case OpKind::sigma_minus: return embed(space, site, local::sigma_minus());
    }
    throw InvalidArgument("elementary: unknown kind");
}

// --------------------------------------------------------------------------
// Hermitian eigensolver
// --------------------------------------------------------------------------

struct EigenSystem {
    RealVector values; // ascending
    Matrix vectors;    // column k is the eigenvector of values(k)
    HilbertSpace space;

    [[nodiscard]] Eigen::Index size() const noexcept { return values.size(); }
    [[nodiscard]] Ket ket(Eigen::Index k) const { return {space, vectors.col(k)}; }

    // Operator expressed in the eigenbasis, <j|A|k>.
    [[nodiscard]] Matrix to_eigenbasis(const Matrix& a) const {
        return vectors.adjoint() * a * vectors;
    }
    [[nodiscard]] Matrix from_eigenbasis(const Matrix& a) const {
        return vectors * a * vectors.adjoint();
    }
};

inline constexpr double kHermiticityTolerance = 1e-10;

// Ascending eigenvalues; exact ties are ordered by the index of each vector's
// largest component, and every eigenvector is phased so that its largest
// component is real and positive. Both rules make the output reproducible.
inline EigenSystem eig_hermitian(const Operator& h) {
    const double scale = std::max(1.0, h.max_norm());
    const double defect = h.hermiticity_defect();
    if (!(defect < kHermiticityTolerance * scale)) {
        std::ostringstream os;
        os << "eig_hermitian: operator is not Hermitian (defect " << defect << ")";
        throw InvalidArgument(os.str());
    }
    const Matrix sym = 0.5 * (h.data() + h.data().adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw SolverError("eig_hermitian: eigen decomposition failed for dimension " +
                          std::to_string(h.dim()));
    }
    RealVector vals = solver.eigenvalues();
    Matrix vecs = solver.eigenvectors();
    const Eigen::Index n = vals.size();

    std::vector<Eigen::Index> peak(static_cast<std::size_t>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index arg = 0;
        vecs.col(k).cwiseAbs().maxCoeff(&arg);
        peak[static_cast<std::size_t>(k)] = arg;
        const cplx c = vecs(arg, k);
        vecs.col(k) *= std::abs(c) / c;
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (vals(a) != vals(b)) return vals(a) < vals(b);
        return peak[static_cast<std::size_t>(a)] < peak[static_cast<std::size_t>(b)];
    });

    EigenSystem es{RealVector(n), Matrix(n, n), h.space()};
    for (Eigen::Index k = 0; k < n; ++k) {
        es.values(k) = vals(order[static_cast<std::size_t>(k)]);
        es.vectors.col(k) = vecs.col(order[static_cast<std::size_t>(k)]);
    }
    return es;
}

// --------------------------------------------------------------------------
// Displacements and coherent states
// --------------------------------------------------------------------------

// Largest |<n|D(alpha)|0> - e^{-|alpha|^2/2} alpha^n / sqrt(n!)| over the
// truncated Fock space: how far the truncated displacement is from the
// exact one on the vacuum.
inline double coherent_defect(const Matrix& d, cplx alpha) {
    double worst = 0.0;
    cplx c = std::exp(-0.5 * std::norm(alpha));
    for (Eigen::Index n = 0; n < d.rows(); ++n) {
        if (n > 0) c *= alpha / std::sqrt(static_cast<double>(n));
        worst = std::max(worst, std::abs(d(n, 0) - c));
    }
    return worst;
}

// The displacement is unitary to rounding for any cutoff, so truncation is
// judged on the vacuum column. At n = fock_cutoff(alpha) the defect stays
// below ~5e-6 up to alpha = 8 and falls by orders of magnitude per extra level.
inline constexpr double kDisplacementTolerance = 1e-5;

// Recommended Fock cutoff for a displacement or coupling ratio `alpha`.
inline int fock_cutoff(double alpha) {
    const double a = std::abs(alpha);
    return static_cast<int>(std::ceil(a * a + 6.0 * a + 10.0));
}

// exp(alpha a^dag - alpha^* a) on an n-level truncated mode, evaluated through
// the Hermitian generator so the result is unitary to rounding.
inline Matrix local_displacement(int n, cplx alpha, bool check = true) {
    const Matrix a = local::annihilate(n);
    const Matrix k = I_unit * (alpha * a.adjoint() - std::conj(alpha) * a); // Hermitian
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (k + k.adjoint()));
    if (solver.info() != Eigen::Success) throw SolverError("displacement: generator eigensolve failed");
    const Vector phases = (-I_unit * solver.eigenvalues().cast<cplx>()).array().exp();
    Matrix d = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
    if (check) {
        const double defect = coherent_defect(d, alpha);
        if (defect > kDisplacementTolerance) {
            std::ostringstream os;
            os << "displacement: Fock dimension " << n << " too small for |alpha| = "
               << std::abs(alpha) << " (vacuum-column defect " << defect << ", recommended >= "
               << fock_cutoff(std::abs(alpha)) << ")";
            throw ConvergenceError(os.str());
        }
    }
    return d;
}

inline void require_bosonic(const HilbertSpace& space, std::size_t site, const char* who) {
    if (site >= space.sites() || space.dim(site) < 2) {
        throw InvalidArgument(std::string(who) + ": site " + std::to_string(site) +
                              " is not a bosonic mode of space " + space.str());
    }
}

inline Operator displacement(const HilbertSpace& space, std::size_t site, cplx alpha,
                             bool check = true) {
    require_bosonic(space, site, "displacement");
    return embed(space, site, local_displacement(space.dim(site), alpha, check));
}

// D(alpha) applied to the all-zero product state (all other sites in index 0).
inline Ket coherent_state(const HilbertSpace& space, std::size_t site, cplx alpha) {
    require_bosonic(space, site, "coherent_state");
    const Matrix d = local_displacement(space.dim(site), alpha);
    std::vector<int> vac(space.sites(), 0);
    const Ket vacuum = Ket::basis(space, vac);
    return (embed(space, site, d) * vacuum).normalized();
}

// --------------------------------------------------------------------------
// Diagnostics
// --------------------------------------------------------------------------

inline Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

inline double commutator_norm(const Operator& a, const Operator& b) {
    return commutator(a, b).max_norm();
}

// exp(-i t H) for Hermitian H (spectral route).
inline Operator unitary_exp(const Operator& h, double t) {
    const EigenSystem es = eig_hermitian(h);
    const Vector phases = (-I_unit * t * es.values.cast<cplx>()).array().exp();
    return {h.space(), es.vectors * phases.asDiagonal() * es.vectors.adjoint()};
}

// || e^{i theta N} H e^{-i theta N} - H ||_max
inline double phase_rotation_check(double theta, const Operator& h, const Operator& generator) {
    const Operator u = unitary_exp(generator, -theta); // e^{+i theta N}
    const Operator rotated = u * h * u.adjoint();
    return (rotated - h).max_norm();
}

} // namespace cqed
