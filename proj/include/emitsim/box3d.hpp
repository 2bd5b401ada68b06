#pragma once

#include "emitsim/model.hpp"

namespace emitsim {

namespace si {
inline constexpr double c = 299792458.0;                  // m/s
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double epsilon0 = 8.8541878128e-12;      // F/m
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double bohr_radius = 5.29177210903e-11;  // m
} // namespace si

/// Field amplitude convention for the dipolar coupling.
enum class FieldNormalization {
  /// eta = -mu sin(theta) (hbar w / 2 eps0 V)^{1/2} / hbar, the
  /// single-photon field of a standing wave; gives the Einstein A rate.
  single_photon,
  /// eta = -mu sin(theta) (hbar w / eps0 V)^{1/2} / hbar.
  literal,
};

struct BoxSpec {
  Eigen::Vector3d lengths{0, 0, 0}; // m
  double k0 = 0;                    // m^-1
  double delta = 0;                 // shell half-width, m^-1
  double mu = 0;                    // C m
  FieldNormalization normalization = FieldNormalization::single_photon;

  double volume() const { return lengths.prod(); }
  void validate() const;
};

struct HydrogenParams {
  double lambda0; // m
  double nu0;     // Hz
  double A;       // s^-1
  double tau;     // s
  double mu;      // C m

  void validate() const;
};

/// e a0 4 (2/3)^5 sqrt(2) with e the (negative) electron charge.
double hydrogen_dipole_moment();

/// Lyman-alpha 2p_z -> 1s line.
HydrogenParams hydrogen_2p_1s();

/// The distorted box and shell used for the 20k-mode hydrogen run.
BoxSpec hydrogen_reference_box();

/// hydrogen_reference_box() shrunk uniformly so the shell holds about `target_modes`.
BoxSpec desk_box(double target_modes = 2000);

/// Lattice points expected in the shell from the k-space volume.
double expected_mode_count(const BoxSpec& box);

/// Number of lattice wavevectors with k0 - delta < |k| < k0 + delta.
Index count_modes(const BoxSpec& box);

/// Cosine standing-wave modes k = (n_x pi/L_x, n_y pi/L_y, n_z pi/L_z),
/// n positive, inside the shell. Sorted by offset, ties by (n_x, n_y, n_z).
ModeSet enumerate_modes(const BoxSpec& box);

/// Coupling of the z-polarized dipole to one mode, rad/s.
double coupling_constant(const ModeGeometry& mode, double mu, double volume,
                         FieldNormalization norm = FieldNormalization::single_photon);

/// 2 pi <|eta|^2> rho. rho is N / band_width when the mode set carries its
/// band width (the shell spans 2 delta c), otherwise (N - 1) / (max - min)
/// of the offsets.
double golden_rule_rate(const ModeSet& modes);

} // namespace emitsim
