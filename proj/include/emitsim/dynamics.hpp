#pragma once

#include "emitsim/arrowhead.hpp"
#include "emitsim/model.hpp"

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace emitsim {

/// U exp(-i Lambda t) U^T state. Eigen-basis states stay in the eigenbasis.
StateVectord propagate(const StateVectord& state, const EigenDecompositiond& eig,
                       double t);

/// Multiplies the amplitudes of the first `atoms` sites by exp(-i phi).
StateVectord apply_phase_kick(const StateVectord& state, double phi, Index atoms = 1);

struct KickSchedule {
  double phi = 0;        // rad
  double tau_r = 1;      // interval between kicks
  Index count = 0;       // kicks at tau_r, 2 tau_r, ..., count tau_r
  double total_time = 0; // T >= count tau_r

  void validate() const;
  /// `count` = floor(T / tau_r) kicks.
  static KickSchedule periodic(double phi, double tau_r, double total_time);
};

struct KickTrajectory {
  std::vector<double> times;              // after each kick, then T
  std::vector<Eigen::VectorXd> populations; // atomic populations at `times`
  std::vector<StateVectord> samples;      // eigen-basis states at `times`, if kept
  StateVectord final_state;               // site basis, at T
  bool tau_warning = false;               // tau_r not much shorter than the decay
};

struct KickOptions {
  Index atoms = 1;
  bool keep_samples = false;
  /// Reference decay time for the tau_r << tau_F advisory; 0 disables it.
  double tau_f = 0;
};

/// Alternates free evolution for tau_r and a phase kick, starting from the
/// atom (site 0) excited. Works in the eigenbasis: a kick there is the rank-m
/// update c += (exp(-i phi) - 1) sum_a r_a (r_a . c) with r_a the atomic rows
/// of U, so each step is O(N).
KickTrajectory run_kick_sequence(const EigenDecompositiond& eig,
                                 const KickSchedule& schedule,
                                 const KickOptions& options = {});
KickTrajectory run_kick_sequence(const EigenDecompositiond& eig,
                                 const KickSchedule& schedule,
                                 const StateVectord& initial,
                                 const KickOptions& options);

struct KickLine {
  int harmonic;     // n
  double offset;    // (phi + 2 pi n) / tau_r
  double intensity; // |c_n|^2
};

/// |c_n|^2 = sinc^2((phi + 2 pi n) / 2) of the sawtooth phase exp(-i phi u),
/// u = frac(t / tau_r), for n = -harmonics..harmonics.
std::vector<KickLine> predicted_kick_spectrum(double phi, double tau_r, int harmonics);

// ---------------------------------------------------------------------------
// Two atoms
// ---------------------------------------------------------------------------

enum class InitialState { first, second, singlet, triplet };

/// "10", "01", "s", "t"
InitialState parse_initial_state(const std::string& tag);
std::string to_string(InitialState s);

struct TwoAtomSpec {
  double delta1 = 0;  // resonance offset of atom 1
  double delta2 = 0;  // resonance offset of atom 2
  double omega_d = 0; // dipolar coupling, signed
  double eta = 1;
  double epsilon = 1;
  Index L = 1; // oscillators at k epsilon, 1 <= |k| <= L
  InitialState initial = InitialState::first;

  double tau_f() const { return natural_units_timescale(epsilon, eta); }
  void validate() const;
};

/// Head [[delta1, omega_d], [omega_d, delta2]], both rows coupled with eta.
ArrowheadHamiltoniand build_two_atom_hamiltonian(const TwoAtomSpec& spec);

/// |10>, |01>, |s> = (|10> - |01>)/sqrt2 or |t> = (|10> + |01>)/sqrt2.
StateVectord two_atom_initial_state(InitialState s, Index dimension);

struct TwoAtomResult {
  Eigen::VectorXd times;
  Eigen::VectorXd population1; // |<10|psi(t)>|^2
  Eigen::VectorXd population2; // |<01|psi(t)>|^2
  double spectrum_time = 0;
  SpectrumResult spectrum;     // oscillators at spectrum_time
  StateVectord final_state;    // site basis at spectrum_time
};

/// Propagates spec.initial; the spectrum is taken at `spectrum_time`
/// (default 8 tau_F).
TwoAtomResult run_two_atom(const TwoAtomSpec& spec, const Eigen::VectorXd& times,
                           std::optional<double> spectrum_time = std::nullopt);
TwoAtomResult run_two_atom(const TwoAtomSpec& spec, const EigenDecompositiond& eig,
                           const Eigen::VectorXd& times,
                           std::optional<double> spectrum_time = std::nullopt);

} // namespace emitsim
