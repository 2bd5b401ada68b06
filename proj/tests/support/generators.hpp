#pragma once

// Random instances for property tests. Seeds are fixed per test so a failure
// can be replayed by rerunning the binary.

#include "emitsim/model.hpp"

#include <algorithm>
#include <cstdint>
#include <random>

namespace gen {

using emitsim::Index;

class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng_); }
  double normal() { return std::normal_distribution<double>()(eng_); }
  Index integer(Index a, Index b) { return std::uniform_int_distribution<Index>(a, b)(eng_); }
  bool chance(double p) { return uniform(0, 1) < p; }
  std::mt19937_64& engine() { return eng_; }

private:
  std::mt19937_64 eng_;
};

struct ArrowFeatures {
  double cluster_probability = 0.0; // chance an entry repeats an earlier one
  double near_probability = 0.0;    // chance an entry sits 1e-15 relative from another
  double zero_probability = 0.0;    // chance a coupling is exactly 0
};

inline Eigen::VectorXd poles(Rng& r, Index n, const ArrowFeatures& f) {
  Eigen::VectorXd d(n);
  for (Index i = 0; i < n; ++i) {
    if (i > 0 && r.chance(f.cluster_probability)) {
      d(i) = d(r.integer(0, i - 1));
    } else if (i > 0 && r.chance(f.near_probability)) {
      const double base = d(r.integer(0, i - 1));
      d(i) = base * (1 + 1e-15 * r.uniform(-4, 4));
    } else {
      d(i) = r.uniform(-10, 10);
    }
  }
  return d;
}

inline Eigen::VectorXd couplings(Rng& r, Index n, const ArrowFeatures& f) {
  Eigen::VectorXd z(n);
  for (Index i = 0; i < n; ++i) z(i) = r.chance(f.zero_probability) ? 0.0 : r.normal();
  return z;
}

/// Single-atom arrowhead with random poles and couplings.
inline emitsim::ArrowheadHamiltoniand arrowhead(Rng& r, Index n, const ArrowFeatures& f = {}) {
  Eigen::MatrixXd head(1, 1);
  head(0, 0) = r.uniform(-5, 5);
  return {head, poles(r, n, f), couplings(r, n, f).transpose()};
}

/// Two-atom bordered arrowhead. With `equal_rows` both atoms share one
/// coupling row, the symmetric situation of identical emitters.
inline emitsim::ArrowheadHamiltoniand bordered(Rng& r, Index n, bool equal_rows,
                                               const ArrowFeatures& f = {}) {
  Eigen::Matrix2d head;
  const double off = r.uniform(-3, 3);
  head << r.uniform(-5, 5), off, off, r.uniform(-5, 5);
  Eigen::MatrixXd b(2, n);
  b.row(0) = couplings(r, n, f).transpose();
  b.row(1) = equal_rows ? Eigen::RowVectorXd(b.row(0)) : couplings(r, n, f).transpose();
  return {head, poles(r, n, f), b};
}

/// Head 0, poles antisymmetric (-p, p, and 0 when odd), |z| symmetric.
inline emitsim::ArrowheadHamiltoniand chiral(Rng& r, Index half, bool with_zero) {
  const Index n = 2 * half + (with_zero ? 1 : 0);
  Eigen::VectorXd p(half);
  for (Index i = 0; i < half; ++i) p(i) = r.uniform(0.1, 10);
  std::sort(p.data(), p.data() + half);
  Eigen::VectorXd d(n), z(n);
  Index k = 0;
  for (Index i = half - 1; i >= 0; --i) d(k++) = -p(i);
  if (with_zero) d(k++) = 0;
  for (Index i = 0; i < half; ++i) d(k++) = p(i);
  for (Index i = 0; i < half; ++i) {
    const double c = r.uniform(0.2, 2);
    z(half - 1 - i) = c;
    z(n - half + i) = r.chance(0.5) ? c : -c;
  }
  if (with_zero) z(half) = r.uniform(0.2, 2);
  return {Eigen::MatrixXd::Zero(1, 1), d, z.transpose()};
}

/// Random normalized complex vector.
inline Eigen::VectorXcd unit_state(Rng& r, Index n) {
  Eigen::VectorXcd v(n);
  for (Index i = 0; i < n; ++i) v(i) = {r.normal(), r.normal()};
  return v / v.norm();
}

} // namespace gen
