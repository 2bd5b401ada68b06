#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace emitsim {

using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

/// Raised when an input lies outside the domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Raised when an iterative numerical procedure fails.
class SolverError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Field modes
// ---------------------------------------------------------------------------

/// Wavevector of a standing-wave box mode.
struct ModeGeometry {
  std::array<int, 3> n{};     // lattice indices (n_x, n_y, n_z)
  Eigen::Vector3d k{0, 0, 0}; // m^-1
  double theta = 0.0;         // polar angle from the z axis, rad
};

/// The oscillator ensemble coupled to the atom(s).
///
/// Offsets are measured from the atomic resonance (rotating frame) and use
/// the same unit as the couplings: natural units for the pseudo-1D model,
/// rad/s for the 3D box.
struct ModeSet {
  Eigen::VectorXd offsets;
  Eigen::VectorXd couplings;
  std::optional<std::vector<ModeGeometry>> geometry;
  /// Width of the frequency band the modes were drawn from, when known.
  std::optional<double> band_width;

  Index size() const { return offsets.size(); }

  /// Throws DomainError when the invariants do not hold.
  void validate() const;
};

/// Per-oscillator excitation probabilities keyed by frequency offset.
struct SpectrumResult {
  Eigen::VectorXd frequencies;
  Eigen::VectorXd probabilities;
  std::optional<Eigen::VectorXd> angles;

  Index size() const { return frequencies.size(); }
  double total() const { return probabilities.sum(); }
  void validate() const;
};

// ---------------------------------------------------------------------------
// Single-photon-subspace Hamiltonian
// ---------------------------------------------------------------------------

/// Real symmetric matrix with an m x m atomic head bordered by m coupling
/// rows to a diagonal of N oscillator energies. Site ordering is
/// (atom_0, ..., atom_{m-1}, oscillator_0, ..., oscillator_{N-1}).
template <typename Scalar>
class ArrowheadHamiltonian {
public:
  ArrowheadHamiltonian() = default;

  ArrowheadHamiltonian(Matrix<Scalar> head, Vector<Scalar> diag,
                       Matrix<Scalar> border)
      : head_(std::move(head)), diag_(std::move(diag)),
        border_(std::move(border)) {
    const Index m = head_.rows();
    if (m < 1 || m > 2 || head_.cols() != m)
      throw DomainError("arrowhead head must be 1x1 or 2x2");
    if (diag_.size() < 1)
      throw DomainError("arrowhead needs at least one oscillator");
    if (border_.rows() != m || border_.cols() != diag_.size())
      throw DomainError("arrowhead border must be m x N");
    if (m == 2 && head_(0, 1) != head_(1, 0))
      throw DomainError("arrowhead head must be symmetric");
    if (!head_.allFinite() || !diag_.allFinite() || !border_.allFinite())
      throw DomainError("arrowhead entries must be finite");
  }

  Index atom_count() const { return head_.rows(); }
  Index oscillator_count() const { return diag_.size(); }
  Index dimension() const { return head_.rows() + diag_.size(); }

  const Matrix<Scalar>& head() const { return head_; }
  const Vector<Scalar>& diag() const { return diag_; }
  const Matrix<Scalar>& border() const { return border_; }

  Scalar norm_max() const {
    Scalar r = head_.cwiseAbs().maxCoeff();
    r = std::max(r, diag_.cwiseAbs().maxCoeff());
    r = std::max(r, border_.cwiseAbs().maxCoeff());
    return r;
  }

  /// Full (m+N) x (m+N) matrix.
  Matrix<Scalar> dense() const {
    const Index m = atom_count(), n = dimension();
    Matrix<Scalar> h = Matrix<Scalar>::Zero(n, n);
    h.topLeftCorner(m, m) = head_;
    h.topRightCorner(m, n - m) = border_;
    h.bottomLeftCorner(n - m, m) = border_.transpose();
    h.bottomRightCorner(n - m, n - m).diagonal() = diag_;
    return h;
  }

  /// y = H x without forming the dense matrix.
  template <typename Derived>
  auto multiply(const Eigen::MatrixBase<Derived>& x) const {
    using T = typename Derived::Scalar;
    const Index m = atom_count();
    Eigen::Matrix<T, Eigen::Dynamic, 1> y(dimension());
    auto xa = x.head(m);
    auto xo = x.tail(oscillator_count());
    y.head(m) = head_.template cast<T>() * xa + border_.template cast<T>() * xo;
    y.tail(oscillator_count()) =
        diag_.template cast<T>().cwiseProduct(xo) +
        border_.transpose().template cast<T>() * xa;
    return y;
  }

private:
  Matrix<Scalar> head_;
  Vector<Scalar> diag_;
  Matrix<Scalar> border_;
};

// ---------------------------------------------------------------------------
// Eigendecomposition
// ---------------------------------------------------------------------------

/// Orthogonal eigenvector matrix U, possibly held in factored form. Columns
/// are eigenvectors in the order of the owning decomposition's eigenvalues.
template <typename Scalar>
class EigenBasis {
public:
  virtual ~EigenBasis() = default;

  virtual Index dimension() const = 0;

  /// out = U * in
  virtual void apply(const Vector<Scalar>& in, Vector<Scalar>& out) const = 0;
  virtual void apply(const ComplexVector<Scalar>& in,
                     ComplexVector<Scalar>& out) const = 0;
  /// out = U^T * in
  virtual void apply_transpose(const Vector<Scalar>& in,
                               Vector<Scalar>& out) const = 0;
  virtual void apply_transpose(const ComplexVector<Scalar>& in,
                               ComplexVector<Scalar>& out) const = 0;

  /// Components of every eigenvector at one site (a row of U).
  virtual Vector<Scalar> row(Index site) const {
    Vector<Scalar> e = Vector<Scalar>::Zero(dimension()), r;
    e(site) = Scalar(1);
    apply_transpose(e, r);
    return r;
  }

  virtual Vector<Scalar> column(Index j) const {
    Vector<Scalar> e = Vector<Scalar>::Zero(dimension()), c;
    e(j) = Scalar(1);
    apply(e, c);
    return c;
  }

  /// U as a dense matrix.
  virtual Matrix<Scalar> dense() const {
    Matrix<Scalar> u(dimension(), dimension());
    for (Index j = 0; j < dimension(); ++j) u.col(j) = column(j);
    return u;
  }
};

template <typename Scalar>
class DenseBasis final : public EigenBasis<Scalar> {
public:
  explicit DenseBasis(Matrix<Scalar> u) : u_(std::move(u)) {}

  Index dimension() const override { return u_.rows(); }
  const Matrix<Scalar>& matrix() const { return u_; }

  void apply(const Vector<Scalar>& in, Vector<Scalar>& out) const override {
    out.noalias() = u_ * in;
  }
  void apply(const ComplexVector<Scalar>& in,
             ComplexVector<Scalar>& out) const override {
    out = u_.template cast<std::complex<Scalar>>() * in;
  }
  void apply_transpose(const Vector<Scalar>& in,
                       Vector<Scalar>& out) const override {
    out.noalias() = u_.transpose() * in;
  }
  void apply_transpose(const ComplexVector<Scalar>& in,
                       ComplexVector<Scalar>& out) const override {
    out = u_.transpose().template cast<std::complex<Scalar>>() * in;
  }
  Vector<Scalar> row(Index site) const override { return u_.row(site).transpose(); }
  Vector<Scalar> column(Index j) const override { return u_.col(j); }
  Matrix<Scalar> dense() const override { return u_; }

private:
  Matrix<Scalar> u_;
};

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hamiltonian.
template <typename Scalar>
class EigenDecomposition {
public:
  /// Refuses to materialize dense eigenvectors beyond this dimension.
  static constexpr Index dense_limit = 20001;

  EigenDecomposition() = default;
  EigenDecomposition(Vector<Scalar> eigenvalues,
                     std::shared_ptr<const EigenBasis<Scalar>> basis)
      : eigenvalues_(std::move(eigenvalues)), basis_(std::move(basis)) {
    if (!basis_ || basis_->dimension() != eigenvalues_.size())
      throw DomainError("eigenvalue count does not match basis dimension");
  }
  EigenDecomposition(Vector<Scalar> eigenvalues, Matrix<Scalar> eigenvectors)
      : EigenDecomposition(std::move(eigenvalues),
                           std::make_shared<DenseBasis<Scalar>>(
                               std::move(eigenvectors))) {}

  Index dimension() const { return eigenvalues_.size(); }
  const Vector<Scalar>& eigenvalues() const { return eigenvalues_; }
  const EigenBasis<Scalar>& basis() const { return *basis_; }
  std::shared_ptr<const EigenBasis<Scalar>> basis_ptr() const { return basis_; }

  Vector<Scalar> eigenvector(Index j) const { return basis_->column(j); }

  /// Dense (m+N) x (m+N) eigenvector matrix, columns = eigenvectors.
  Matrix<Scalar> eigenvectors() const {
    const Index n = dimension();
    if (n > dense_limit)
      throw DomainError("refusing to materialize dense eigenvectors of dimension " +
                        std::to_string(n));
    return basis_->dense();
  }

  template <typename Vec>
  Vec to_eigen(const Vec& site) const {
    Vec out;
    basis_->apply_transpose(site, out);
    return out;
  }
  template <typename Vec>
  Vec to_site(const Vec& eigen) const {
    Vec out;
    basis_->apply(eigen, out);
    return out;
  }

private:
  Vector<Scalar> eigenvalues_;
  std::shared_ptr<const EigenBasis<Scalar>> basis_;
};

// ---------------------------------------------------------------------------
// States
// ---------------------------------------------------------------------------

enum class Basis { site, eigen };

/// Complex amplitudes over the single-excitation basis.
template <typename Scalar>
class StateVector {
public:
  StateVector() = default;
  StateVector(ComplexVector<Scalar> amplitudes, Basis basis)
      : amplitudes_(std::move(amplitudes)), basis_(basis) {}

  /// |site> in the site basis.
  static StateVector localized(Index dimension, Index site) {
    ComplexVector<Scalar> a = ComplexVector<Scalar>::Zero(dimension);
    a(site) = Scalar(1);
    return StateVector(std::move(a), Basis::site);
  }

  Index dimension() const { return amplitudes_.size(); }
  Basis basis() const { return basis_; }
  const ComplexVector<Scalar>& amplitudes() const { return amplitudes_; }
  ComplexVector<Scalar>& amplitudes() { return amplitudes_; }
  std::complex<Scalar> operator()(Index i) const { return amplitudes_(i); }

  Scalar squared_norm() const { return amplitudes_.squaredNorm(); }

  StateVector in_eigenbasis(const EigenDecomposition<Scalar>& eig) const {
    if (basis_ == Basis::eigen) return *this;
    return StateVector(eig.to_eigen(amplitudes_), Basis::eigen);
  }
  StateVector in_site_basis(const EigenDecomposition<Scalar>& eig) const {
    if (basis_ == Basis::site) return *this;
    return StateVector(eig.to_site(amplitudes_), Basis::site);
  }

private:
  ComplexVector<Scalar> amplitudes_;
  Basis basis_ = Basis::site;
};

using ArrowheadHamiltoniand = ArrowheadHamiltonian<double>;
using EigenDecompositiond = EigenDecomposition<double>;
using StateVectord = StateVector<double>;

// ---------------------------------------------------------------------------
// Units
// ---------------------------------------------------------------------------

/// Golden-rule decay time tau_F = eps / (2 pi eta^2) of the equidistant model.
double natural_units_timescale(double epsilon, double eta);

/// Bridge between natural units (hbar = 1, energies in multiples of a chosen
/// unit) and SI angular frequencies. `rad_per_second` is the SI angular
/// frequency that corresponds to one natural energy unit.
struct NaturalScale {
  double rad_per_second = 1.0;

  double to_si_frequency(double natural_energy) const {
    return natural_energy * rad_per_second;
  }
  double to_natural_energy(double si_frequency) const {
    return si_frequency / rad_per_second;
  }
  double to_si_time(double natural_time) const {
    return natural_time / rad_per_second;
  }
  double to_natural_time(double si_time) const {
    return si_time * rad_per_second;
  }
};

} // namespace emitsim
