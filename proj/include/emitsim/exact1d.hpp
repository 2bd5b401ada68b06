#pragma once

#include "emitsim/model.hpp"

#include <complex>
#include <vector>

namespace emitsim {

/// Equidistant oscillators k * epsilon, 1 <= |k| <= L, all coupled with eta
/// to an atom at zero offset.
struct Exact1DConfig {
  double epsilon = 1.0;
  double eta = 1.0;
  Index L = 1;

  double g() const { return eta / epsilon; }
  double tau_f() const { return natural_units_timescale(epsilon, eta); }
  void validate() const;
};

/// Positive eigenvalues and atomic weights of the equidistant model.
///
/// Eigenvalues are lambda_0 = 0 and lambda_{+-l} = +-x_l * epsilon, l = 1..L.
/// weight(l) = |alpha_l^0|^2, the same for +-l. With `finite` unset these are
/// the closed forms of the infinite model summed over the window; otherwise
/// they are the exact eigenpairs of the (2L+1)-state matrix.
struct Exact1DSolution {
  Exact1DConfig cfg;
  Eigen::VectorXd x; // x_l, l = 1..L (index l - 1)
  Eigen::VectorXd w; // weights for l = 1..L
  double w0 = 0;
  bool finite = false;

  Index L() const { return cfg.L; }
  /// Eigenvalue for -L <= l <= L.
  double lambda(Index l) const;
  /// Sum of |alpha_l^0|^2 over the window; 1 for the finite model.
  double truncated_norm() const;
};

/// Solves x = k + delta, tan(pi delta) = pi g^2 x / (x^2 + g^2) for each
/// k = 1..L with delta in (0, 1/2).
Exact1DSolution solve_exact1d(const Exact1DConfig& cfg);

/// Eigenpairs of the finite (2L+1)-state matrix via its own secular sum;
/// O(L^2), limited to L <= 4000.
Exact1DSolution solve_finite_model(const Exact1DConfig& cfg);

/// lambda_l for l = -L..L in ascending order, energy units.
Eigen::VectorXd secular_roots(const Exact1DConfig& cfg);
Eigen::VectorXd secular_roots(const Exact1DSolution& sol);

/// <Psi_0| exp(-iHt) |Psi_0> = w0 + sum_{l != 0} w_l exp(-i lambda_l t).
std::complex<double> survival_amplitude(const Exact1DSolution& sol, double t);
std::complex<double> survival_amplitude(const Exact1DConfig& cfg, double t);
Eigen::VectorXcd survival_amplitudes(const Exact1DSolution& sol,
                                     const Eigen::VectorXd& times);

/// <Psi_k| exp(-iHt) |Psi_0> for oscillator k != 0.
std::complex<double> emission_amplitude(const Exact1DSolution& sol, Index k, double t);
std::complex<double> emission_amplitude(const Exact1DConfig& cfg, Index k, double t);
/// Amplitudes for several oscillators at one time, sharing the phase table.
Eigen::VectorXcd emission_amplitudes(const Exact1DSolution& sol,
                                     const std::vector<Index>& ks, double t);

/// |survival|^2 - exp(-t / tau_F).
Eigen::VectorXd golden_rule_deviation(const Exact1DSolution& sol,
                                      const Eigen::VectorXd& times);
Eigen::VectorXd golden_rule_deviation(const Exact1DConfig& cfg,
                                      const Eigen::VectorXd& times);

/// Components alpha_k^l of eigenvector k: alpha_k^0 = sqrt(w_k) and
/// alpha_k^l = g / (x_k - l) alpha_k^0 for l != 0 (x_0 = 0).
struct EigvecCoefficients {
  Index k = 0;
  double x = 0;    // lambda_k / epsilon
  double atom = 0; // alpha_k^0
  double g = 0;
  double operator()(Index l) const;
};
EigvecCoefficients eigvec_coefficients(const Exact1DSolution& sol, Index k);
EigvecCoefficients eigvec_coefficients(const Exact1DConfig& cfg, Index k);

/// 1 - sum_{|l| <= L} |alpha_0^l|^2 for the closed-form coefficients.
double normalization_deficit(const Exact1DConfig& cfg);

} // namespace emitsim
