#include "emitsim/dynamics.hpp"

#include <cmath>
#include <numbers>

namespace emitsim {

using cplx = std::complex<double>;

namespace {

Eigen::VectorXcd phases(const Eigen::VectorXd& lambda, double t) {
  Eigen::VectorXcd p(lambda.size());
  for (Index j = 0; j < lambda.size(); ++j) p(j) = std::polar(1.0, -lambda(j) * t);
  return p;
}

} // namespace

StateVectord propagate(const StateVectord& state, const EigenDecompositiond& eig,
                       double t) {
  if (state.dimension() != eig.dimension())
    throw DomainError("propagate: state and decomposition dimensions differ");
  if (state.basis() == Basis::eigen)
    return StateVectord(state.amplitudes().cwiseProduct(phases(eig.eigenvalues(), t)),
                        Basis::eigen);
  Eigen::VectorXcd c = eig.to_eigen(state.amplitudes());
  c = c.cwiseProduct(phases(eig.eigenvalues(), t));
  return StateVectord(eig.to_site(c), Basis::site);
}

StateVectord apply_phase_kick(const StateVectord& state, double phi, Index atoms) {
  if (state.basis() != Basis::site) throw DomainError("apply_phase_kick: site basis required");
  if (atoms < 1 || atoms > state.dimension()) throw DomainError("apply_phase_kick: bad atom count");
  StateVectord out = state;
  const cplx k = std::polar(1.0, -phi);
  for (Index a = 0; a < atoms; ++a) out.amplitudes()(a) *= k;
  return out;
}

void KickSchedule::validate() const {
  if (!(tau_r > 0)) throw DomainError("KickSchedule: tau_r must be > 0");
  if (count < 0) throw DomainError("KickSchedule: negative count");
  if (count * tau_r > total_time * (1 + 1e-12))
    throw DomainError("KickSchedule: count * tau_r exceeds T");
  if (!std::isfinite(phi)) throw DomainError("KickSchedule: non-finite phi");
}

KickSchedule KickSchedule::periodic(double phi, double tau_r, double total_time) {
  KickSchedule s{phi, tau_r, 0, total_time};
  if (!(tau_r > 0)) throw DomainError("KickSchedule: tau_r must be > 0");
  s.count = static_cast<Index>(std::floor(total_time / tau_r * (1 + 1e-12)));
  s.validate();
  return s;
}

KickTrajectory run_kick_sequence(const EigenDecompositiond& eig,
                                 const KickSchedule& schedule,
                                 const KickOptions& options) {
  return run_kick_sequence(eig, schedule,
                           StateVectord::localized(eig.dimension(), 0), options);
}

KickTrajectory run_kick_sequence(const EigenDecompositiond& eig,
                                 const KickSchedule& schedule,
                                 const StateVectord& initial,
                                 const KickOptions& options) {
  schedule.validate();
  const Index m = options.atoms;
  if (m < 1 || m > 2) throw DomainError("run_kick_sequence: 1 or 2 atoms");
  if (initial.dimension() != eig.dimension())
    throw DomainError("run_kick_sequence: dimension mismatch");
  std::vector<Eigen::VectorXd> rows;
  for (Index a = 0; a < m; ++a) rows.push_back(eig.basis().row(a));

  Eigen::VectorXcd c = initial.in_eigenbasis(eig).amplitudes();
  const Eigen::VectorXcd step = phases(eig.eigenvalues(), schedule.tau_r);
  const cplx kick = std::polar(1.0, -schedule.phi) - 1.0;

  KickTrajectory tr;
  tr.tau_warning = options.tau_f > 0 && schedule.tau_r > 0.1 * options.tau_f;
  auto record = [&](double t, const std::vector<cplx>& amps) {
    tr.times.push_back(t);
    Eigen::VectorXd p(m);
    for (Index a = 0; a < m; ++a) p(a) = std::norm(amps[a]);
    tr.populations.push_back(p);
    if (options.keep_samples) tr.samples.emplace_back(c, Basis::eigen);
  };
  std::vector<cplx> amps(m);
  for (Index n = 1; n <= schedule.count; ++n) {
    c = c.cwiseProduct(step);
    for (Index a = 0; a < m; ++a) amps[a] = rows[a].cast<cplx>().dot(c);
    // the atomic rows are orthonormal, so both projections use the old c
    for (Index a = 0; a < m; ++a) c += (kick * amps[a]) * rows[a].cast<cplx>();
    record(n * schedule.tau_r, amps);
  }
  const double rest = schedule.total_time - schedule.count * schedule.tau_r;
  c = c.cwiseProduct(phases(eig.eigenvalues(), rest));
  for (Index a = 0; a < m; ++a) amps[a] = rows[a].cast<cplx>().dot(c);
  record(schedule.total_time, amps);
  tr.final_state = StateVectord(eig.to_site(c), Basis::site);
  return tr;
}

std::vector<KickLine> predicted_kick_spectrum(double phi, double tau_r, int harmonics) {
  if (harmonics < 1) throw DomainError("predicted_kick_spectrum: harmonics must be >= 1");
  if (!(tau_r > 0)) throw DomainError("predicted_kick_spectrum: tau_r must be > 0");
  std::vector<KickLine> out;
  for (int n = -harmonics; n <= harmonics; ++n) {
    const double a = phi + 2 * std::numbers::pi * n;
    const double h = a / 2;
    const double sinc = h == 0 ? 1.0 : std::sin(h) / h;
    out.push_back({n, a / tau_r, sinc * sinc});
  }
  return out;
}

InitialState parse_initial_state(const std::string& tag) {
  if (tag == "10") return InitialState::first;
  if (tag == "01") return InitialState::second;
  if (tag == "s") return InitialState::singlet;
  if (tag == "t") return InitialState::triplet;
  throw DomainError("unknown initial state '" + tag + "' (expected 10, 01, s or t)");
}

std::string to_string(InitialState s) {
  switch (s) {
  case InitialState::first: return "10";
  case InitialState::second: return "01";
  case InitialState::singlet: return "s";
  case InitialState::triplet: return "t";
  }
  return "?";
}

void TwoAtomSpec::validate() const {
  if (!(epsilon > 0)) throw DomainError("TwoAtomSpec: epsilon must be > 0");
  if (eta == 0) throw DomainError("TwoAtomSpec: eta must be nonzero");
  if (L < 1) throw DomainError("TwoAtomSpec: L must be >= 1");
  if (!std::isfinite(delta1) || !std::isfinite(delta2) || !std::isfinite(omega_d))
    throw DomainError("TwoAtomSpec: non-finite parameter");
}

ArrowheadHamiltoniand build_two_atom_hamiltonian(const TwoAtomSpec& spec) {
  spec.validate();
  auto single = build_uniform_model<double>(spec.L, spec.epsilon, spec.eta);
  Eigen::Matrix2d head;
  head << spec.delta1, spec.omega_d, spec.omega_d, spec.delta2;
  Eigen::MatrixXd border = Eigen::MatrixXd::Constant(2, single.oscillator_count(), spec.eta);
  return {head, single.diag(), border};
}

StateVectord two_atom_initial_state(InitialState s, Index dimension) {
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(dimension);
  const double r = std::sqrt(0.5);
  switch (s) {
  case InitialState::first: a(0) = 1; break;
  case InitialState::second: a(1) = 1; break;
  case InitialState::singlet: a(0) = r; a(1) = -r; break;
  case InitialState::triplet: a(0) = r; a(1) = r; break;
  }
  return StateVectord(a, Basis::site);
}

TwoAtomResult run_two_atom(const TwoAtomSpec& spec, const Eigen::VectorXd& times,
                           std::optional<double> spectrum_time) {
  return run_two_atom(spec, eigendecompose_bordered(build_two_atom_hamiltonian(spec)),
                      times, spectrum_time);
}

TwoAtomResult run_two_atom(const TwoAtomSpec& spec, const EigenDecompositiond& eig,
                           const Eigen::VectorXd& times,
                           std::optional<double> spectrum_time) {
  spec.validate();
  const Index n = eig.dimension();
  if (n != 2 * spec.L + 2) throw DomainError("run_two_atom: decomposition does not match spec");
  const Eigen::VectorXcd c0 = two_atom_initial_state(spec.initial, n).in_eigenbasis(eig).amplitudes();
  const Eigen::VectorXcd r1 = eig.basis().row(0).cast<cplx>();
  const Eigen::VectorXcd r2 = eig.basis().row(1).cast<cplx>();
  TwoAtomResult res;
  res.times = times;
  res.population1.resize(times.size());
  res.population2.resize(times.size());
  for (Index i = 0; i < times.size(); ++i) {
    const Eigen::VectorXcd c = c0.cwiseProduct(phases(eig.eigenvalues(), times(i)));
    res.population1(i) = std::norm(r1.dot(c));
    res.population2(i) = std::norm(r2.dot(c));
  }
  res.spectrum_time = spectrum_time.value_or(8 * spec.tau_f());
  const Eigen::VectorXcd cT = c0.cwiseProduct(phases(eig.eigenvalues(), res.spectrum_time));
  res.final_state = StateVectord(eig.to_site(cT), Basis::site);
  res.spectrum.frequencies = build_uniform_model<double>(spec.L, spec.epsilon, spec.eta).diag();
  res.spectrum.probabilities = res.final_state.amplitudes().tail(n - 2).cwiseAbs2();
  return res;
}

} // namespace emitsim
