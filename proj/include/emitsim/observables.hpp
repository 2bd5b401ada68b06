#pragma once

#include "emitsim/exact1d.hpp"
#include "emitsim/model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace emitsim {

class FitError : public SolverError {
public:
  using SolverError::SolverError;
};

/// |amplitude of atom `atom`|^2 of a site-basis state.
double excited_population(const StateVectord& state, Index atom = 0);

/// Oscillator probabilities |a_k|^2 paired with the mode offsets. The first
/// `atoms` sites of the state are the atoms.
SpectrumResult spectrum(const StateVectord& state, const ModeSet& modes, Index atoms = 1);

struct AngularDistribution {
  Eigen::VectorXd theta;       // rad
  Eigen::VectorXd probability; // |a_k|^2
  Eigen::VectorXd offset;      // mode offsets, for frequency weighting
};

AngularDistribution angular_distribution(const StateVectord& state, const ModeSet& modes,
                                         Index atoms = 1);

struct AngularBins {
  Eigen::VectorXd center;     // rad
  Eigen::VectorXd sum;        // summed probability per bin
  Eigen::VectorXd weight;     // summed weight per bin
  Eigen::VectorXi count;      // modes per bin
  /// sum / weight; NaN for empty bins.
  Eigen::VectorXd statistic() const;
};

/// Uniform bins on [lo, hi]. `weights` (one per mode) defaults to 1, so the
/// statistic is the mean probability per mode in the bin.
AngularBins bin_angular(const AngularDistribution& dist, int bins = 60, double lo = 0,
                        double hi = 3.14159265358979323846,
                        const Eigen::VectorXd* weights = nullptr);

struct Sin2Fit {
  double amplitude = 0;
  double relative_residual = 0; // ||y - A sin^2||_2 / ||y||_2 over non-empty bins
  int bins_used = 0;
};

/// Least-squares A sin^2(theta) through the non-empty bins.
Sin2Fit fit_sin2(const AngularBins& bins);

struct LorentzFit {
  double center = 0;
  double fwhm = 0;
  double height = 0;
  double residual = 0; // RMS of y - model
  int iterations = 0;

  double operator()(double w) const {
    const double h = fwhm / 2;
    return height * h * h / ((w - center) * (w - center) + h * h);
  }
};

struct LorentzFitOptions {
  int max_iterations = 500;
  double tolerance = 1e-10; // relative parameter change
};

/// Levenberg-Marquardt fit of A (G/2)^2 / ((w - c)^2 + (G/2)^2), started
/// from the argmax and the half-maximum crossing width.
LorentzFit lorentzian_fwhm_fit(const SpectrumResult& spec, const LorentzFitOptions& opt = {});
LorentzFit lorentzian_fwhm_fit(const Eigen::VectorXd& w, const Eigen::VectorXd& y,
                               const LorentzFitOptions& opt = {});

struct TwoLorentzFit {
  LorentzFit single;
  LorentzFit broad, narrow; // valid when two_components
  double residual = 0;      // RMS of the two-component model
  bool two_components = false;
};

/// Single fit first. The two-Lorentzian mixture is adopted when it cuts the
/// single-line residual by 1.5 or more, its weaker component is taller than
/// `ratio` times the mixture residual, and the components are distinct
/// (separated centers or widths differing by 1.5 or more).
TwoLorentzFit two_lorentzian_fit(const SpectrumResult& spec, double ratio = 5.0,
                                 const LorentzFitOptions& opt = {});

struct ExponentialFit {
  double lifetime = 0; // -1 / slope of ln P
  double amplitude = 0; // P at t = 0 from the fit
  int points_used = 0;
};

/// Least-squares line through ln P(t) over samples with P >= floor.
ExponentialFit fit_exponential_lifetime(const Eigen::VectorXd& times, const Eigen::VectorXd& population,
                                        double floor = 1e-2);

/// Probabilities divided by sin^2(theta), keeping modes with
/// sin^2(theta) >= min_sin2. Removes the dipole pattern before a line-shape
/// fit. Requires angles.
SpectrumResult spectral_envelope(const SpectrumResult& spec, double min_sin2 = 0.25);

/// 2 Re(a_j conj(a_k)) for site indices j, k.
double correlations(const StateVectord& state, Index j, Index k);

struct CorrelationSeries {
  std::vector<std::pair<Index, Index>> pairs;
  Eigen::VectorXd times;
  Eigen::MatrixXd value;      // c_jk, one row per pair
  Eigen::MatrixXd normalized; // c_jk / (|a_j| |a_k|), 0 where a product is 0
  Eigen::MatrixXd abs_j, abs_k;
};

/// Pairs use site indices of the equidistant model: 0 is the atom, k != 0 the
/// oscillator at k epsilon.
CorrelationSeries correlation_series(const Exact1DSolution& sol,
                                     const std::vector<std::pair<Index, Index>>& pairs,
                                     const Eigen::VectorXd& times);

/// Pairs index the stored site-basis states directly.
CorrelationSeries correlation_series(const std::vector<StateVectord>& trajectory,
                                     const Eigen::VectorXd& times,
                                     const std::vector<std::pair<Index, Index>>& pairs);

} // namespace emitsim
