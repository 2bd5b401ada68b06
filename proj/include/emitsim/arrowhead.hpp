#pragma once

#include "emitsim/model.hpp"
#include "emitsim/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

namespace emitsim {

template <typename Scalar>
struct SecularOptions {
  Scalar relative_tolerance = Scalar(1e-13);
  int max_iterations = 200;
  /// Bound on the relative backward error of each secular root.
  Scalar residual_tolerance = Scalar(1e-10);
  /// Couplings and pole spacings below factor * eps * ||H||_max are deflated.
  Scalar deflation_factor = Scalar(8);
  /// Solve only half of a chiral (d0 = 0, D -> -D) spectrum and mirror it.
  bool exploit_symmetry = true;
};

template <typename Scalar>
struct SecularSolveReport {
  std::vector<int> iterations;
  Scalar max_residual = Scalar(0);
  Index deflation_count = 0;
  bool mirrored = false;

  void merge(const SecularSolveReport& other) {
    iterations.insert(iterations.end(), other.iterations.begin(),
                      other.iterations.end());
    max_residual = std::max(max_residual, other.max_residual);
    deflation_count += other.deflation_count;
    mirrored = mirrored || other.mirrored;
  }
};

// ---------------------------------------------------------------------------
// Builders
// ---------------------------------------------------------------------------

/// Single atom at offset 0 coupled with strength eta to N equidistant
/// oscillators at (i - (N-1)/2) * epsilon, i = 0..N-1.
template <typename Scalar = double>
ArrowheadHamiltonian<Scalar> build_1d_hamiltonian(Index n, Scalar epsilon,
                                                  Scalar eta) {
  if (n < 1) throw DomainError("build_1d_hamiltonian: N must be >= 1");
  if (!(epsilon > 0)) throw DomainError("build_1d_hamiltonian: epsilon must be > 0");
  Vector<Scalar> d(n);
  const Scalar c = Scalar(n - 1) / 2;
  for (Index i = 0; i < n; ++i) d(i) = (Scalar(i) - c) * epsilon;
  Matrix<Scalar> head = Matrix<Scalar>::Zero(1, 1);
  Matrix<Scalar> border = Matrix<Scalar>::Constant(1, n, eta);
  return {head, d, border};
}

/// Equidistant model with oscillators at k * epsilon, 1 <= |k| <= L, so the
/// matrix has 2L + 1 states and the k = 0 slot is the atom.
template <typename Scalar = double>
ArrowheadHamiltonian<Scalar> build_uniform_model(Index l, Scalar epsilon,
                                                 Scalar eta) {
  if (l < 1) throw DomainError("build_uniform_model: L must be >= 1");
  if (!(epsilon > 0)) throw DomainError("build_uniform_model: epsilon must be > 0");
  Vector<Scalar> d(2 * l);
  for (Index k = 1; k <= l; ++k) {
    d(l - k) = -Scalar(k) * epsilon;
    d(l + k - 1) = Scalar(k) * epsilon;
  }
  Matrix<Scalar> head = Matrix<Scalar>::Zero(1, 1);
  Matrix<Scalar> border = Matrix<Scalar>::Constant(1, 2 * l, eta);
  return {head, d, border};
}

/// Single atom with resonance offset `atom_offset` coupled to a mode set.
inline ArrowheadHamiltonian<double> build_hamiltonian(const ModeSet& modes,
                                                      double atom_offset = 0.0) {
  modes.validate();
  Eigen::MatrixXd head = Eigen::MatrixXd::Constant(1, 1, atom_offset);
  Eigen::MatrixXd border = modes.couplings.transpose();
  return {head, modes.offsets, border};
}

// ---------------------------------------------------------------------------
// Structured eigenbasis of a single-border arrowhead
// ---------------------------------------------------------------------------

/// Eigenvectors of [[d0, z^T], [z, diag(D)]] held implicitly.
///
/// Local index 0 is the head, 1 + i is diagonal entry i. Non-deflated
/// eigenvectors are v_j = s_j [1; zhat_r q_r / (lambda_j - P_r)] where P_r
/// are the reduced poles, q_r the unit coupling direction within pole r's
/// cluster and zhat the recomputed couplings. lambda_j - P_r is always formed
/// as (P_o - P_r) + delta_j with o the pole nearest to the root.
template <typename Scalar>
class ArrowheadBasis final : public EigenBasis<Scalar> {
public:
  struct Deflated {
    Index position;
    Index first; // into sites/coefs
    Index count;
  };

  Index n = 0;
  Vector<Scalar> poles;
  Vector<Scalar> zhat;
  std::vector<Index> origin;
  Vector<Scalar> delta;
  Vector<Scalar> scale;
  std::vector<Index> position;
  std::vector<Index> member_offset{0};
  std::vector<Index> member_site;
  std::vector<Scalar> member_q;
  std::vector<Deflated> deflated;
  std::vector<Index> deflated_site;
  std::vector<Scalar> deflated_coef;

  Index dimension() const override { return n + 1; }
  Index reduced_size() const { return poles.size(); }

  Scalar gap(Index j, Index r) const {
    const Index o = origin[j];
    return (poles(o) - poles(r)) + delta(j);
  }

  void apply(const Vector<Scalar>& in, Vector<Scalar>& out) const override {
    apply_impl(in, out);
  }
  void apply(const ComplexVector<Scalar>& in,
             ComplexVector<Scalar>& out) const override {
    apply_impl(in, out);
  }
  void apply_transpose(const Vector<Scalar>& in,
                       Vector<Scalar>& out) const override {
    transpose_impl(in, out);
  }
  void apply_transpose(const ComplexVector<Scalar>& in,
                       ComplexVector<Scalar>& out) const override {
    transpose_impl(in, out);
  }

  Vector<Scalar> row(Index site) const override {
    if (site != 0) return EigenBasis<Scalar>::row(site);
    Vector<Scalar> r = Vector<Scalar>::Zero(dimension());
    for (Index j = 0; j < scale.size(); ++j) r(position[j]) = scale(j);
    return r;
  }

  Matrix<Scalar> dense() const override {
    Matrix<Scalar> u = Matrix<Scalar>::Zero(dimension(), dimension());
    parallel_for(0, static_cast<Index>(scale.size()), [&](Index j) {
      const Index c = position[j];
      u(0, c) = scale(j);
      for (Index r = 0; r < reduced_size(); ++r) {
        const Scalar y = scale(j) * zhat(r) / gap(j, r);
        for (Index m = member_offset[r]; m < member_offset[r + 1]; ++m)
          u(1 + member_site[m], c) = y * member_q[m];
      }
    });
    for (const auto& d : deflated)
      for (Index m = d.first; m < d.first + d.count; ++m)
        u(1 + deflated_site[m], d.position) = deflated_coef[m];
    return u;
  }

private:
  template <typename Vec>
  void apply_impl(const Vec& in, Vec& out) const {
    using T = typename Vec::Scalar;
    if (in.size() != dimension()) throw DomainError("basis apply: dimension mismatch");
    out = Vec::Zero(dimension());
    const Index nroots = scale.size();
    Vec sc(nroots);
    for (Index j = 0; j < nroots; ++j) sc(j) = scale(j) * in(position[j]);
    T head{};
    for (Index j = 0; j < nroots; ++j) head += sc(j);
    out(0) = head;
    parallel_for(0, reduced_size(), [&](Index r) {
      T y{};
      for (Index j = 0; j < nroots; ++j) y += sc(j) / gap(j, r);
      y *= zhat(r);
      for (Index m = member_offset[r]; m < member_offset[r + 1]; ++m)
        out(1 + member_site[m]) = y * member_q[m];
    });
    for (const auto& d : deflated)
      for (Index m = d.first; m < d.first + d.count; ++m)
        out(1 + deflated_site[m]) += deflated_coef[m] * in(d.position);
  }

  template <typename Vec>
  void transpose_impl(const Vec& in, Vec& out) const {
    using T = typename Vec::Scalar;
    if (in.size() != dimension())
      throw DomainError("basis apply_transpose: dimension mismatch");
    out = Vec::Zero(dimension());
    const Index nr = reduced_size();
    Vec xq(nr);
    for (Index r = 0; r < nr; ++r) {
      T acc{};
      for (Index m = member_offset[r]; m < member_offset[r + 1]; ++m)
        acc += member_q[m] * in(1 + member_site[m]);
      xq(r) = zhat(r) * acc;
    }
    parallel_for(0, static_cast<Index>(scale.size()), [&](Index j) {
      T acc = in(0);
      for (Index r = 0; r < nr; ++r) acc += xq(r) / gap(j, r);
      out(position[j]) = scale(j) * acc;
    });
    for (const auto& d : deflated) {
      T acc{};
      for (Index m = d.first; m < d.first + d.count; ++m)
        acc += deflated_coef[m] * in(1 + deflated_site[m]);
      out(d.position) = acc;
    }
  }
};

namespace detail {

/// Secular function of the reduced problem evaluated relative to pole o:
/// g(delta) = P_o + delta - d0 - sum z_i^2 / ((P_o - P_i) + delta).
/// Returns G = delta * g and dG/ddelta, both free of the pole at delta = 0.
template <typename Scalar>
struct SecularEval {
  Scalar G, dG, abs_terms;
};

template <typename Scalar>
SecularEval<Scalar> secular_eval(Scalar d0, const Vector<Scalar>& p,
                                 const Vector<Scalar>& z2, Index o,
                                 Scalar delta) {
  Scalar rest = 0, drest = 0, abs_terms = 0;
  const Index n = p.size();
  for (Index i = 0; i < n; ++i) {
    if (i == o) continue;
    const Scalar di = p(o) - p(i);
    const Scalar den = di + delta;
    const Scalar t = z2(i) / den;
    rest += t;
    drest += t * di / den;
    abs_terms += std::abs(t);
  }
  const Scalar lin = (p(o) - d0) + delta;
  SecularEval<Scalar> e;
  e.G = delta * (lin - rest) - z2(o);
  e.dG = lin + delta - drest;
  e.abs_terms =
      std::abs(delta) * (std::abs(p(o) - d0) + std::abs(delta) + abs_terms) + z2(o);
  return e;
}

template <typename Scalar>
struct RootResult {
  Index origin;
  Scalar delta;
  int iterations;
  Scalar residual;
};

/// Root of g in the open bracket (lo, hi) of delta relative to pole o. The
/// sign of delta is fixed by the bracket; g is increasing in delta.
template <typename Scalar>
RootResult<Scalar> solve_root(Scalar d0, const Vector<Scalar>& p,
                              const Vector<Scalar>& z2, Index o, Scalar lo,
                              Scalar hi, const SecularOptions<Scalar>& opt,
                              Index root_index) {
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar delta = (lo + hi) / 2;
  const Scalar sgn = delta > 0 ? Scalar(1) : Scalar(-1);
  int it = 0;
  bool done = false;
  SecularEval<Scalar> e{};
  for (; it < opt.max_iterations; ++it) {
    e = secular_eval(d0, p, z2, o, delta);
    // g = G / delta, so sign(g) = sign(G) * sign(delta)
    const Scalar gsign = e.G * sgn;
    if (gsign == 0) { done = true; break; }
    if (gsign < 0) lo = delta; else hi = delta;
    Scalar next = delta - e.G / e.dG;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = (lo + hi) / 2;
    const Scalar step = next - delta;
    delta = next;
    if (std::abs(step) <= opt.relative_tolerance * std::abs(delta) ||
        hi - lo <= 4 * eps * std::max(std::abs(lo), std::abs(hi))) {
      done = true;
      ++it;
      break;
    }
  }
  if (!done) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "secular root " << root_index << " did not converge in "
        << opt.max_iterations << " iterations; bracket (" << p(o) + lo << ", "
        << p(o) + hi << ")";
    throw SolverError(msg.str());
  }
  e = secular_eval(d0, p, z2, o, delta);
  const Scalar res = std::abs(e.G) / e.abs_terms;
  return {o, delta, it, res};
}

} // namespace detail

template <typename Scalar>
struct ArrowheadSolution {
  Vector<Scalar> eigenvalues;
  std::shared_ptr<ArrowheadBasis<Scalar>> basis;
};

/// Eigendecomposition of [[d0, z^T], [z, diag(D)]] by deflation, secular
/// root finding and recomputation of the couplings from the roots.
template <typename Scalar>
ArrowheadSolution<Scalar> solve_arrowhead(Scalar d0, const Vector<Scalar>& d,
                                          const Vector<Scalar>& z,
                                          const SecularOptions<Scalar>& opt = {},
                                          SecularSolveReport<Scalar>* report = nullptr) {
  const Index n = d.size();
  if (z.size() != n) throw DomainError("solve_arrowhead: size mismatch");
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  Scalar norm = std::abs(d0);
  if (n > 0) norm = std::max({norm, d.cwiseAbs().maxCoeff(), z.cwiseAbs().maxCoeff()});
  if (norm == 0) norm = 1;
  const Scalar tol = opt.deflation_factor * eps * norm;

  auto basis = std::make_shared<ArrowheadBasis<Scalar>>();
  basis->n = n;

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return d(a) < d(b); });

  struct Pending {
    Scalar value;
    int kind; // 0 reduced root, 1 deflated
    Index index;
  };
  std::vector<Pending> pending;
  std::vector<Scalar> poles, couplings;
  Index deflations = 0;

  auto add_deflated = [&](Scalar value, const std::vector<Index>& sites,
                          const std::vector<Scalar>& coefs) {
    typename ArrowheadBasis<Scalar>::Deflated df{
        0, static_cast<Index>(basis->deflated_site.size()),
        static_cast<Index>(sites.size())};
    basis->deflated_site.insert(basis->deflated_site.end(), sites.begin(), sites.end());
    basis->deflated_coef.insert(basis->deflated_coef.end(), coefs.begin(), coefs.end());
    pending.push_back({value, 1, static_cast<Index>(basis->deflated.size())});
    basis->deflated.push_back(df);
    ++deflations;
  };

  // Zero couplings leave their oscillator untouched.
  std::vector<Index> coupled;
  for (Index i : order) {
    if (std::abs(z(i)) <= tol)
      add_deflated(d(i), {i}, {Scalar(1)});
    else
      coupled.push_back(i);
  }

  // (Near-)degenerate poles: rotate each cluster so a single member carries
  // the aggregate coupling.
  for (std::size_t a = 0; a < coupled.size();) {
    std::size_t b = a + 1;
    while (b < coupled.size() && d(coupled[b]) - d(coupled[a]) <= tol) ++b;
    const Index k = static_cast<Index>(b - a);
    Vector<Scalar> zc(k), dc(k);
    for (Index m = 0; m < k; ++m) {
      zc(m) = z(coupled[a + m]);
      dc(m) = d(coupled[a + m]);
    }
    const Scalar zn = zc.stableNorm();
    Vector<Scalar> q = zc / zn;
    for (Index m = 0; m < k; ++m) {
      basis->member_site.push_back(coupled[a + m]);
      basis->member_q.push_back(q(m));
    }
    basis->member_offset.push_back(static_cast<Index>(basis->member_site.size()));
    if (k == 1) {
      poles.push_back(dc(0));
    } else {
      poles.push_back(q.cwiseAbs2().dot(dc));
      // Householder reflector whose first column is +-q; the rest span the
      // orthogonal complement inside the cluster.
      Vector<Scalar> v = q;
      v(0) += q(0) >= 0 ? Scalar(1) : Scalar(-1);
      const Scalar vv = v.squaredNorm();
      for (Index c = 1; c < k; ++c) {
        Vector<Scalar> col = -Scalar(2) * v(c) / vv * v;
        col(c) += 1;
        std::vector<Index> sites(k);
        std::vector<Scalar> coefs(k);
        for (Index m = 0; m < k; ++m) {
          sites[m] = coupled[a + m];
          coefs[m] = col(m);
        }
        add_deflated(col.cwiseAbs2().dot(dc), sites, coefs);
      }
    }
    couplings.push_back(zn);
    a = b;
  }

  const Index nr = static_cast<Index>(poles.size());
  Vector<Scalar> p(nr), z2(nr), zr(nr);
  for (Index i = 0; i < nr; ++i) {
    p(i) = poles[i];
    zr(i) = couplings[i];
    z2(i) = zr(i) * zr(i);
  }
  basis->poles = p;

  const Index nroots = nr + 1;
  basis->origin.assign(nroots, 0);
  basis->delta = Vector<Scalar>::Zero(nroots);
  std::vector<int> iterations(nroots, 0);
  std::vector<Scalar> residuals(nroots, 0);
  bool mirrored = false;

  if (nr == 0) {
    basis->zhat = Vector<Scalar>(0);
    basis->scale = Vector<Scalar>::Ones(1);
    basis->origin[0] = -1;
    pending.push_back({d0, 0, 0});
  } else {
    const Scalar znorm = zr.stableNorm();
    bool symmetric = opt.exploit_symmetry && d0 == 0;
    for (Index i = 0; symmetric && i < nr; ++i)
      symmetric = p(i) == -p(nr - 1 - i) && zr(i) == zr(nr - 1 - i);
    mirrored = symmetric;

    auto solve = [&](Index r) {
      Index o;
      Scalar lo, hi;
      if (r == 0) {
        o = 0;
        lo = (std::min(d0, p(0)) - znorm - p(0)) * (1 + 4 * eps);
        hi = 0;
      } else if (r == nr) {
        o = nr - 1;
        lo = 0;
        hi = (std::max(d0, p(nr - 1)) + znorm - p(nr - 1)) * (1 + 4 * eps);
      } else {
        const Scalar h = p(r) - p(r - 1);
        const auto mid = detail::secular_eval(d0, p, z2, r - 1, h / 2);
        if (mid.G >= 0) {
          o = r - 1; lo = 0; hi = h / 2;
        } else {
          o = r; lo = -h / 2; hi = 0;
        }
      }
      auto res = detail::solve_root(d0, p, z2, o, lo, hi, opt, r);
      basis->origin[r] = res.origin;
      basis->delta(r) = res.delta;
      iterations[r] = res.iterations;
      residuals[r] = res.residual;
    };

    if (symmetric) {
      Index first;
      if (nr % 2 == 0) {
        const Index c = nr / 2;
        basis->origin[c] = c;
        basis->delta(c) = -p(c);
        first = c + 1;
      } else {
        first = (nr - 1) / 2 + 1;
      }
      parallel_for(first, nroots, solve);
      for (Index r = first; r < nroots; ++r) {
        const Index m = nr - r;
        basis->origin[m] = nr - 1 - basis->origin[r];
        basis->delta(m) = -basis->delta(r);
        iterations[m] = 0;
        residuals[m] = residuals[r];
      }
    } else {
      parallel_for(0, nroots, solve);
    }

    // Couplings consistent with the computed roots, so the eigenvectors
    // come out orthogonal to working precision.
    basis->zhat.resize(nr);
    parallel_for(0, nr, [&](Index i) {
      Scalar prod = -basis->gap(i, i) * basis->gap(i + 1, i);
      for (Index k = 0; k < i; ++k) prod *= basis->gap(k, i) / (p(k) - p(i));
      for (Index k = i + 1; k < nr; ++k) prod *= basis->gap(k + 1, i) / (p(k) - p(i));
      basis->zhat(i) = std::sqrt(std::max(prod, Scalar(0)));
    });
    basis->scale.resize(nroots);
    parallel_for(0, nroots, [&](Index j) {
      Scalar acc = 1;
      for (Index r = 0; r < nr; ++r) {
        const Scalar t = basis->zhat(r) / basis->gap(j, r);
        acc += t * t;
      }
      basis->scale(j) = 1 / std::sqrt(acc);
    });
    for (Index r = 0; r < nroots; ++r)
      pending.push_back({p(basis->origin[r]) + basis->delta(r), 0, r});
  }

  std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.index < b.index;
  });
  Vector<Scalar> values(n + 1);
  basis->position.assign(nroots, 0);
  for (Index pos = 0; pos < n + 1; ++pos) {
    const auto& e = pending[pos];
    values(pos) = e.value;
    if (e.kind == 0)
      basis->position[e.index] = pos;
    else
      basis->deflated[e.index].position = pos;
  }

  Scalar max_res = 0;
  for (Scalar r : residuals) max_res = std::max(max_res, r);
  if (max_res > opt.residual_tolerance) {
    std::ostringstream msg;
    msg << "secular residual " << max_res << " exceeds tolerance "
        << opt.residual_tolerance;
    throw SolverError(msg.str());
  }
  if (report) {
    report->iterations = std::move(iterations);
    report->max_residual = max_res;
    report->deflation_count = deflations;
    report->mirrored = mirrored;
  }
  return {values, basis};
}

/// Eigendecomposition of a single-atom (m = 1) arrowhead Hamiltonian.
template <typename Scalar>
EigenDecomposition<Scalar> eigendecompose_arrowhead(
    const ArrowheadHamiltonian<Scalar>& h, const SecularOptions<Scalar>& opt = {},
    SecularSolveReport<Scalar>* report = nullptr) {
  if (h.atom_count() != 1)
    throw DomainError("eigendecompose_arrowhead requires a 1x1 head");
  Vector<Scalar> z = h.border().row(0).transpose();
  auto sol = solve_arrowhead<Scalar>(h.head()(0, 0), h.diag(), z, opt, report);
  return EigenDecomposition<Scalar>(std::move(sol.eigenvalues), sol.basis);
}

// ---------------------------------------------------------------------------
// Two atoms
// ---------------------------------------------------------------------------

/// U = R * blockdiag(1, U1) * U2 for the two-stage reduction. R rotates the
/// atom pair (a1, a2) into (q, p) with p = c a1 + s a2 carrying the dominant
/// coupling; U1 diagonalizes (p + oscillators); U2 diagonalizes q bordered to
/// the stage-one eigenstates.
template <typename Scalar>
class BorderedBasis final : public EigenBasis<Scalar> {
public:
  BorderedBasis(Scalar c, Scalar s, std::shared_ptr<const ArrowheadBasis<Scalar>> u1,
                std::shared_ptr<const ArrowheadBasis<Scalar>> u2)
      : c_(c), s_(s), u1_(std::move(u1)), u2_(std::move(u2)) {}

  Index dimension() const override { return u1_->dimension() + 1; }

  void apply(const Vector<Scalar>& in, Vector<Scalar>& out) const override {
    apply_impl(in, out);
  }
  void apply(const ComplexVector<Scalar>& in,
             ComplexVector<Scalar>& out) const override {
    apply_impl(in, out);
  }
  void apply_transpose(const Vector<Scalar>& in,
                       Vector<Scalar>& out) const override {
    transpose_impl(in, out);
  }
  void apply_transpose(const ComplexVector<Scalar>& in,
                       ComplexVector<Scalar>& out) const override {
    transpose_impl(in, out);
  }

  Scalar cos() const { return c_; }
  Scalar sin() const { return s_; }

  Matrix<Scalar> dense() const override {
    const Matrix<Scalar> u2 = u2_->dense();
    const Index n1 = u1_->dimension();
    Matrix<Scalar> y(n1, dimension());
    y.noalias() = u1_->dense() * u2.bottomRows(n1);
    Matrix<Scalar> u(dimension(), dimension());
    u.row(0) = c_ * y.row(0) - s_ * u2.row(0);
    u.row(1) = s_ * y.row(0) + c_ * u2.row(0);
    u.bottomRows(n1 - 1) = y.bottomRows(n1 - 1);
    return u;
  }

private:
  template <typename Vec>
  void apply_impl(const Vec& in, Vec& out) const {
    if (in.size() != dimension()) throw DomainError("basis apply: dimension mismatch");
    Vec t, y;
    u2_->apply(in, t);
    const Index n1 = u1_->dimension();
    Vec u = t.tail(n1);
    u1_->apply(u, y);
    out.resize(dimension());
    const auto yq = t(0);
    const auto yp = y(0);
    out(0) = c_ * yp - s_ * yq;
    out(1) = s_ * yp + c_ * yq;
    out.tail(n1 - 1) = y.tail(n1 - 1);
  }

  template <typename Vec>
  void transpose_impl(const Vec& in, Vec& out) const {
    if (in.size() != dimension())
      throw DomainError("basis apply_transpose: dimension mismatch");
    const Index n1 = u1_->dimension();
    Vec y(n1), u;
    y(0) = c_ * in(0) + s_ * in(1);
    y.tail(n1 - 1) = in.tail(n1 - 1);
    u1_->apply_transpose(y, u);
    Vec t(dimension());
    t(0) = -s_ * in(0) + c_ * in(1);
    t.tail(n1) = u;
    u2_->apply_transpose(t, out);
  }

  Scalar c_, s_;
  std::shared_ptr<const ArrowheadBasis<Scalar>> u1_, u2_;
};

/// Eigendecomposition of a two-atom (m = 2) bordered arrowhead Hamiltonian.
template <typename Scalar>
EigenDecomposition<Scalar> eigendecompose_bordered(
    const ArrowheadHamiltonian<Scalar>& h, const SecularOptions<Scalar>& opt = {},
    SecularSolveReport<Scalar>* report = nullptr) {
  if (h.atom_count() != 2)
    throw DomainError("eigendecompose_bordered requires a 2x2 head");
  const auto& b = h.border();
  const Scalar g11 = b.row(0).squaredNorm();
  const Scalar g22 = b.row(1).squaredNorm();
  const Scalar g12 = b.row(0).dot(b.row(1));
  Scalar c, s;
  if (g11 == g22 && g12 != 0) {
    c = std::sqrt(Scalar(0.5));
    s = g12 > 0 ? c : -c;
  } else {
    const Scalar theta = std::atan2(2 * g12, g11 - g22) / 2;
    c = std::cos(theta);
    s = std::sin(theta);
  }
  const Scalar h11 = h.head()(0, 0), h22 = h.head()(1, 1), h12 = h.head()(0, 1);
  const Scalar hpp = c * c * h11 + 2 * c * s * h12 + s * s * h22;
  const Scalar hqq = s * s * h11 - 2 * c * s * h12 + c * c * h22;
  const Scalar hpq = c * s * (h22 - h11) + (c * c - s * s) * h12;
  Vector<Scalar> bp = (c * b.row(0) + s * b.row(1)).transpose();
  Vector<Scalar> bq = (-s * b.row(0) + c * b.row(1)).transpose();

  // Deflation in both stages is measured against the full matrix norm.
  SecularOptions<Scalar> o1 = opt;
  SecularSolveReport<Scalar> r1, r2;
  auto stage1 = solve_arrowhead<Scalar>(hpp, h.diag(), bp, o1, &r1);
  Vector<Scalar> border(h.oscillator_count() + 1);
  border(0) = hpq;
  border.tail(h.oscillator_count()) = bq;
  Vector<Scalar> w;
  stage1.basis->apply_transpose(border, w);
  const Scalar scale_ratio =
      h.norm_max() / std::max({std::abs(hqq), stage1.eigenvalues.cwiseAbs().maxCoeff(),
                               w.cwiseAbs().maxCoeff(), std::numeric_limits<Scalar>::min()});
  SecularOptions<Scalar> o2 = opt;
  o2.deflation_factor = opt.deflation_factor * std::max(Scalar(1), scale_ratio);
  auto stage2 = solve_arrowhead<Scalar>(hqq, stage1.eigenvalues, w, o2, &r2);
  if (report) {
    *report = r1;
    report->merge(r2);
  }
  auto basis = std::make_shared<BorderedBasis<Scalar>>(c, s, stage1.basis, stage2.basis);
  return EigenDecomposition<Scalar>(std::move(stage2.eigenvalues), basis);
}

template <typename Scalar>
EigenDecomposition<Scalar> eigendecompose(const ArrowheadHamiltonian<Scalar>& h,
                                          const SecularOptions<Scalar>& opt = {},
                                          SecularSolveReport<Scalar>* report = nullptr) {
  return h.atom_count() == 1 ? eigendecompose_arrowhead(h, opt, report)
                             : eigendecompose_bordered(h, opt, report);
}

/// Dense symmetric eigensolver (Householder tridiagonalization + implicit QL)
/// for cross-checking the structured solvers on small problems.
template <typename Scalar>
EigenDecomposition<Scalar> dense_eig_oracle(const ArrowheadHamiltonian<Scalar>& h) {
  if (h.dimension() > 2000)
    throw DomainError("dense_eig_oracle: dimension " + std::to_string(h.dimension()) +
                      " exceeds the 2000 guard");
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(h.dense());
  if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed");
  return EigenDecomposition<Scalar>(es.eigenvalues(), es.eigenvectors());
}

} // namespace emitsim
