#include "emitsim/box3d.hpp"
#include "emitsim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <tuple>
#include <vector>

namespace emitsim {

void BoxSpec::validate() const {
  if (!(lengths.minCoeff() > 0)) throw DomainError("BoxSpec: lengths must be > 0");
  if (!(delta > 0 && delta < k0)) throw DomainError("BoxSpec: need 0 < delta < k0");
  if (!std::isfinite(mu) || !lengths.allFinite())
    throw DomainError("BoxSpec: non-finite parameter");
}

void HydrogenParams::validate() const {
  if (std::abs(tau * A - 1) > 1e-6) throw DomainError("HydrogenParams: tau * A != 1");
}

double hydrogen_dipole_moment() {
  return -si::elementary_charge * si::bohr_radius * 4 * std::pow(2.0 / 3.0, 5) *
         std::numbers::sqrt2;
}

HydrogenParams hydrogen_2p_1s() {
  HydrogenParams h;
  h.lambda0 = 121.566824e-9;
  h.nu0 = si::c / h.lambda0;
  h.A = 6.2648e8;
  h.tau = 1 / h.A;
  h.mu = hydrogen_dipole_moment();
  return h;
}

BoxSpec hydrogen_reference_box() {
  BoxSpec b;
  b.lengths = {0.2102591954656340e-3, 0.2100491463193147e-3, 0.2104696651307647e-3};
  b.k0 = 2 * std::numbers::pi / hydrogen_2p_1s().lambda0;
  b.delta = 8.1865615;
  b.mu = hydrogen_dipole_moment();
  return b;
}

double expected_mode_count(const BoxSpec& box) {
  // one octant of the shell volume over the lattice cell pi^3 / V
  const double lo = box.k0 - box.delta, hi = box.k0 + box.delta;
  const double shell = 4.0 / 3.0 * std::numbers::pi * (hi * hi * hi - lo * lo * lo);
  return shell / 8 * box.volume() / std::pow(std::numbers::pi, 3);
}

BoxSpec desk_box(double target_modes) {
  if (!(target_modes >= 1)) throw DomainError("desk_box: target must be >= 1");
  BoxSpec b = hydrogen_reference_box();
  b.lengths *= std::cbrt(target_modes / expected_mode_count(b));
  return b;
}

namespace {

struct Lattice {
  Eigen::Vector3d u; // pi / L
  double lo, hi;     // shell bounds on |k|
  int nx_max, ny_max;
};

Lattice lattice(const BoxSpec& box) {
  box.validate();
  Lattice l;
  for (int a = 0; a < 3; ++a) l.u(a) = std::numbers::pi / box.lengths(a);
  l.lo = box.k0 - box.delta;
  l.hi = box.k0 + box.delta;
  l.nx_max = static_cast<int>(std::ceil(l.hi / l.u(0)));
  l.ny_max = static_cast<int>(std::ceil(l.hi / l.u(1)));
  return l;
}

// Calls f(nx, ny, nz, k) for every lattice point of row nx inside the shell.
template <typename F>
void scan_row(const Lattice& l, int nx, F&& f) {
  const double kx = nx * l.u(0);
  for (int ny = 1; ny <= l.ny_max; ++ny) {
    const double ky = ny * l.u(1);
    const double b = kx * kx + ky * ky;
    const double rhi = l.hi * l.hi - b;
    if (rhi <= 0) break;
    const double rlo = l.lo * l.lo - b;
    int z0 = rlo > 0 ? static_cast<int>(std::floor(std::sqrt(rlo) / l.u(2))) : 1;
    int z1 = static_cast<int>(std::ceil(std::sqrt(rhi) / l.u(2)));
    z0 = std::max(z0, 1);
    for (int nz = z0; nz <= z1; ++nz) {
      const Eigen::Vector3d k(kx, ky, nz * l.u(2));
      const double kn = k.norm();
      if (kn > l.lo && kn < l.hi) f(nx, ny, nz, k, kn);
    }
  }
}

} // namespace

Index count_modes(const BoxSpec& box) {
  const Lattice l = lattice(box);
  std::vector<Index> rows(l.nx_max + 1, 0);
  parallel_for(1, l.nx_max + 1, [&](Index nx) {
    scan_row(l, static_cast<int>(nx),
             [&](int, int, int, const Eigen::Vector3d&, double) { ++rows[nx]; });
  });
  return std::accumulate(rows.begin(), rows.end(), Index(0));
}

double coupling_constant(const ModeGeometry& mode, double mu, double volume,
                         FieldNormalization norm) {
  const double k = mode.k.norm();
  if (!(volume > 0)) throw DomainError("coupling_constant: volume must be > 0");
  if (!(k > 0)) throw DomainError("coupling_constant: frequency must be > 0");
  const double omega = k * si::c;
  const double factor = norm == FieldNormalization::single_photon ? 2.0 : 1.0;
  const double field = std::sqrt(si::hbar * omega / (factor * si::epsilon0 * volume));
  return -mu * std::sin(mode.theta) * field / si::hbar;
}

ModeSet enumerate_modes(const BoxSpec& box) {
  const Lattice l = lattice(box);
  struct Entry {
    double offset;
    ModeGeometry g;
  };
  std::vector<std::vector<Entry>> rows(l.nx_max + 1);
  parallel_for(1, l.nx_max + 1, [&](Index nx) {
    scan_row(l, static_cast<int>(nx),
             [&](int x, int y, int z, const Eigen::Vector3d& k, double kn) {
               ModeGeometry g;
               g.n = {x, y, z};
               g.k = k;
               g.theta = std::atan2(std::hypot(k(0), k(1)), k(2));
               rows[nx].push_back({(kn - box.k0) * si::c, g});
             });
  });
  std::vector<Entry> all;
  for (auto& r : rows) all.insert(all.end(), r.begin(), r.end());
  if (all.empty()) throw DomainError("enumerate_modes: the shell contains no lattice points");
  std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
    if (a.offset != b.offset) return a.offset < b.offset;
    return a.g.n < b.g.n;
  });
  ModeSet m;
  const Index n = static_cast<Index>(all.size());
  m.offsets.resize(n);
  m.couplings.resize(n);
  m.geometry.emplace();
  m.geometry->reserve(n);
  const double v = box.volume();
  for (Index i = 0; i < n; ++i) {
    m.offsets(i) = all[i].offset;
    m.couplings(i) = coupling_constant(all[i].g, box.mu, v, box.normalization);
    m.geometry->push_back(all[i].g);
  }
  m.band_width = 2 * box.delta * si::c;
  return m;
}

double golden_rule_rate(const ModeSet& modes) {
  modes.validate();
  const Index n = modes.size();
  if (n < 2) throw DomainError("golden_rule_rate: need at least two modes");
  double rho;
  if (modes.band_width) {
    rho = n / *modes.band_width;
  } else {
    const double span = modes.offsets.maxCoeff() - modes.offsets.minCoeff();
    if (!(span > 0)) throw DomainError("golden_rule_rate: zero frequency span");
    rho = (n - 1) / span;
  }
  return 2 * std::numbers::pi * modes.couplings.squaredNorm() / n * rho;
}

} // namespace emitsim
