#include "emitsim/observables.hpp"
#include "emitsim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <limits>

namespace emitsim {

namespace {

void require_site(const StateVectord& s, const char* what) {
  if (s.basis() != Basis::site) throw DomainError(std::string(what) + ": site basis required");
}

void require_modes(const StateVectord& s, const ModeSet& modes, Index atoms) {
  if (s.dimension() != modes.size() + atoms)
    throw DomainError("state dimension does not match the mode set");
}

} // namespace

double excited_population(const StateVectord& state, Index atom) {
  require_site(state, "excited_population");
  if (atom < 0 || atom >= state.dimension()) throw DomainError("excited_population: bad atom index");
  return std::norm(state(atom));
}

SpectrumResult spectrum(const StateVectord& state, const ModeSet& modes, Index atoms) {
  require_site(state, "spectrum");
  require_modes(state, modes, atoms);
  SpectrumResult r;
  r.frequencies = modes.offsets;
  r.probabilities = state.amplitudes().tail(modes.size()).cwiseAbs2();
  if (modes.geometry) {
    r.angles = Eigen::VectorXd(modes.size());
    for (Index k = 0; k < modes.size(); ++k) (*r.angles)(k) = (*modes.geometry)[k].theta;
  }
  return r;
}

AngularDistribution angular_distribution(const StateVectord& state, const ModeSet& modes,
                                         Index atoms) {
  require_site(state, "angular_distribution");
  if (!modes.geometry) throw DomainError("angular_distribution: mode set has no geometry");
  require_modes(state, modes, atoms);
  AngularDistribution d;
  d.theta.resize(modes.size());
  for (Index k = 0; k < modes.size(); ++k) d.theta(k) = (*modes.geometry)[k].theta;
  d.probability = state.amplitudes().tail(modes.size()).cwiseAbs2();
  d.offset = modes.offsets;
  return d;
}

Eigen::VectorXd AngularBins::statistic() const {
  Eigen::VectorXd s(sum.size());
  for (Index b = 0; b < sum.size(); ++b)
    s(b) = count(b) > 0 && weight(b) > 0 ? sum(b) / weight(b)
                                         : std::numeric_limits<double>::quiet_NaN();
  return s;
}

AngularBins bin_angular(const AngularDistribution& dist, int bins, double lo, double hi,
                        const Eigen::VectorXd* weights) {
  if (bins < 1 || !(hi > lo)) throw DomainError("bin_angular: bad binning");
  if (weights && weights->size() != dist.theta.size())
    throw DomainError("bin_angular: weight length mismatch");
  AngularBins b;
  const double width = (hi - lo) / bins;
  b.center = Eigen::VectorXd::LinSpaced(bins, lo + width / 2, hi - width / 2);
  b.sum = Eigen::VectorXd::Zero(bins);
  b.weight = Eigen::VectorXd::Zero(bins);
  b.count = Eigen::VectorXi::Zero(bins);
  for (Index k = 0; k < dist.theta.size(); ++k) {
    const double t = dist.theta(k);
    if (t < lo || t > hi) continue;
    const int i = std::min(bins - 1, static_cast<int>((t - lo) / width));
    b.sum(i) += dist.probability(k);
    b.weight(i) += weights ? (*weights)(k) : 1.0;
    b.count(i) += 1;
  }
  return b;
}

Sin2Fit fit_sin2(const AngularBins& bins) {
  const Eigen::VectorXd y = bins.statistic();
  double sy = 0, ss = 0, yy = 0;
  Sin2Fit f;
  for (Index b = 0; b < y.size(); ++b) {
    if (!std::isfinite(y(b))) continue;
    const double s2 = std::pow(std::sin(bins.center(b)), 2);
    sy += s2 * y(b);
    ss += s2 * s2;
    yy += y(b) * y(b);
    ++f.bins_used;
  }
  if (f.bins_used == 0 || ss == 0) throw DomainError("fit_sin2: no populated bins");
  f.amplitude = sy / ss;
  double rr = 0;
  for (Index b = 0; b < y.size(); ++b) {
    if (!std::isfinite(y(b))) continue;
    const double d = y(b) - f.amplitude * std::pow(std::sin(bins.center(b)), 2);
    rr += d * d;
  }
  f.relative_residual = yy > 0 ? std::sqrt(rr / yy) : 0;
  return f;
}

ExponentialFit fit_exponential_lifetime(const Eigen::VectorXd& times,
                                        const Eigen::VectorXd& population, double floor) {
  if (times.size() != population.size()) throw DomainError("fit_exponential_lifetime: length mismatch");
  double st = 0, sy = 0, stt = 0, sty = 0;
  int n = 0;
  for (Index i = 0; i < times.size(); ++i) {
    if (!(population(i) >= floor)) continue;
    const double y = std::log(population(i));
    st += times(i);
    sy += y;
    stt += times(i) * times(i);
    sty += times(i) * y;
    ++n;
  }
  const double det = n * stt - st * st;
  if (n < 2 || !(det > 0)) throw FitError("fit_exponential_lifetime: fewer than two usable samples");
  const double slope = (n * sty - st * sy) / det;
  const double icpt = (sy - slope * st) / n;
  if (!(slope < 0)) throw FitError("fit_exponential_lifetime: population does not decay");
  return {-1 / slope, std::exp(icpt), n};
}

SpectrumResult spectral_envelope(const SpectrumResult& spec, double min_sin2) {
  if (!spec.angles) throw DomainError("spectral_envelope: spectrum has no angles");
  std::vector<Index> keep;
  for (Index k = 0; k < spec.frequencies.size(); ++k)
    if (std::pow(std::sin((*spec.angles)(k)), 2) >= min_sin2) keep.push_back(k);
  SpectrumResult out;
  const Index n = static_cast<Index>(keep.size());
  out.frequencies.resize(n);
  out.probabilities.resize(n);
  out.angles = Eigen::VectorXd(n);
  for (Index i = 0; i < n; ++i) {
    const Index k = keep[i];
    const double th = (*spec.angles)(k);
    out.frequencies(i) = spec.frequencies(k);
    out.probabilities(i) = spec.probabilities(k) / std::pow(std::sin(th), 2);
    (*out.angles)(i) = th;
  }
  return out;
}

double correlations(const StateVectord& state, Index j, Index k) {
  require_site(state, "correlations");
  if (j < 0 || k < 0 || j >= state.dimension() || k >= state.dimension())
    throw DomainError("correlations: index out of range");
  return 2 * std::real(state(j) * std::conj(state(k)));
}

namespace {

void fill(CorrelationSeries& s, Index p, Index t, std::complex<double> aj,
          std::complex<double> ak) {
  const double c = 2 * std::real(aj * std::conj(ak));
  const double mj = std::abs(aj), mk = std::abs(ak);
  s.value(p, t) = c;
  s.abs_j(p, t) = mj;
  s.abs_k(p, t) = mk;
  s.normalized(p, t) = mj * mk > 0 ? c / (mj * mk) : 0.0;
}

void allocate(CorrelationSeries& s, Index pairs, Index times) {
  s.value.resize(pairs, times);
  s.normalized.resize(pairs, times);
  s.abs_j.resize(pairs, times);
  s.abs_k.resize(pairs, times);
}

} // namespace

CorrelationSeries correlation_series(const Exact1DSolution& sol,
                                     const std::vector<std::pair<Index, Index>>& pairs,
                                     const Eigen::VectorXd& times) {
  std::vector<Index> sites;
  for (auto [j, k] : pairs) {
    for (Index i : {j, k}) {
      if (std::abs(i) > sol.L()) throw DomainError("correlation_series: index outside the band");
      if (i != 0 && std::find(sites.begin(), sites.end(), i) == sites.end()) sites.push_back(i);
    }
  }
  CorrelationSeries s;
  s.pairs = pairs;
  s.times = times;
  allocate(s, static_cast<Index>(pairs.size()), times.size());
  for (Index t = 0; t < times.size(); ++t) {
    const Eigen::VectorXcd em =
        sites.empty() ? Eigen::VectorXcd() : emission_amplitudes(sol, sites, times(t));
    const std::complex<double> a0 = survival_amplitude(sol, times(t));
    auto amp = [&](Index i) {
      if (i == 0) return a0;
      const auto it = std::find(sites.begin(), sites.end(), i);
      return em(it - sites.begin());
    };
    for (Index p = 0; p < static_cast<Index>(pairs.size()); ++p)
      fill(s, p, t, amp(pairs[p].first), amp(pairs[p].second));
  }
  return s;
}

CorrelationSeries correlation_series(const std::vector<StateVectord>& trajectory,
                                     const Eigen::VectorXd& times,
                                     const std::vector<std::pair<Index, Index>>& pairs) {
  if (static_cast<Index>(trajectory.size()) != times.size())
    throw DomainError("correlation_series: one state per time required");
  CorrelationSeries s;
  s.pairs = pairs;
  s.times = times;
  allocate(s, static_cast<Index>(pairs.size()), times.size());
  for (Index t = 0; t < times.size(); ++t) {
    const auto& st = trajectory[t];
    require_site(st, "correlation_series");
    for (Index p = 0; p < static_cast<Index>(pairs.size()); ++p) {
      const auto [j, k] = pairs[p];
      if (j < 0 || k < 0 || j >= st.dimension() || k >= st.dimension())
        throw DomainError("correlation_series: index out of range");
      fill(s, p, t, st(j), st(k));
    }
  }
  return s;
}

} // namespace emitsim
