#include "emitsim/box3d.hpp"
#include "support/generators.hpp"

#include <doctest.h>

using namespace emitsim;

namespace {

// Exhaustive lattice scan over n_a <= ceil((k0 + delta) L_a / pi).
Index brute_force_count(const BoxSpec& b) {
  const double pi = std::numbers::pi;
  int nmax[3];
  for (int a = 0; a < 3; ++a) nmax[a] = static_cast<int>(std::ceil((b.k0 + b.delta) * b.lengths(a) / pi));
  Index n = 0;
  for (int x = 1; x <= nmax[0]; ++x)
    for (int y = 1; y <= nmax[1]; ++y)
      for (int z = 1; z <= nmax[2]; ++z) {
        const double kx = x * pi / b.lengths(0), ky = y * pi / b.lengths(1), kz = z * pi / b.lengths(2);
        const double k = std::sqrt(kx * kx + ky * ky + kz * kz);
        if (k > b.k0 - b.delta && k < b.k0 + b.delta) ++n;
      }
  return n;
}

BoxSpec small_box(gen::Rng& r) {
  BoxSpec b;
  b.lengths = Eigen::Vector3d(1e-3 * r.uniform(0.8, 1.2), 1e-3 * r.uniform(0.8, 1.2), 1e-3 * r.uniform(0.8, 1.2));
  b.k0 = r.uniform(40, 90) * std::numbers::pi / 1e-3;
  b.delta = r.uniform(0.3, 3) * std::numbers::pi / 1e-3;
  b.mu = -1e-30;
  return b;
}

} // namespace

TEST_CASE("hydrogen line parameters") {
  const HydrogenParams h = hydrogen_2p_1s();
  CHECK(h.lambda0 == 121.566824e-9);
  CHECK(h.nu0 == doctest::Approx(2.46607132e15).epsilon(1e-8));
  CHECK(h.A == 6.2648e8);
  CHECK(h.tau == doctest::Approx(1.5962e-9).epsilon(1e-4));
  CHECK(h.tau * h.A == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_NOTHROW(h.validate());
}

TEST_CASE("transition dipole moment") {
  const double mu = hydrogen_dipole_moment();
  CHECK(mu < 0);
  CHECK(mu == doctest::Approx(-6.31582621e-30).epsilon(1e-6));
  // 4 (2/3)^5 sqrt 2 = 2^7 sqrt 2 / 3^5
  const double coeff = 128 * std::sqrt(2.0) / 243;
  CHECK(coeff == doctest::Approx(0.744936).epsilon(1e-6));
  CHECK(std::abs(mu) / (si::elementary_charge * si::bohr_radius) == doctest::Approx(coeff).epsilon(1e-14));
}

TEST_CASE("coupling constant against direct arithmetic") {
  const BoxSpec b = hydrogen_reference_box();
  ModeGeometry g;
  g.theta = std::numbers::pi / 2;
  g.k = Eigen::Vector3d(b.k0, 0, 0);
  const double omega = 2 * std::numbers::pi * hydrogen_2p_1s().nu0;
  CHECK(b.k0 * si::c == doctest::Approx(omega).epsilon(1e-14));
  const double v = b.lengths(0) * b.lengths(1) * b.lengths(2);
  const double literal = std::sqrt(1.054571817e-34 * omega / (8.8541878128e-12 * v)) *
                         6.31582621e-30 / 1.054571817e-34;
  CHECK(std::abs(coupling_constant(g, b.mu, v, FieldNormalization::literal)) ==
        doctest::Approx(literal).epsilon(1e-6));
  CHECK(std::abs(coupling_constant(g, b.mu, v)) ==
        doctest::Approx(literal / std::sqrt(2.0)).epsilon(1e-6));
  // sign follows -mu sin(theta)
  CHECK(coupling_constant(g, b.mu, v) > 0);
  g.theta = 0;
  CHECK(coupling_constant(g, b.mu, v) == 0);
  CHECK_THROWS_AS(coupling_constant(g, b.mu, 0.0), DomainError);
}

TEST_CASE("property: mode count equals an exhaustive lattice scan") {
  gen::Rng r(17);
  for (int trial = 0; trial < 12; ++trial) {
    const BoxSpec b = small_box(r);
    const Index n = brute_force_count(b);
    CHECK(count_modes(b) == n);
    if (n > 0) CHECK(enumerate_modes(b).size() == n);
  }
  BoxSpec cube;
  cube.lengths = Eigen::Vector3d::Constant(1e-3);
  cube.k0 = 60.3 * std::numbers::pi / 1e-3;
  cube.delta = 0.4 * std::numbers::pi / 1e-3;
  cube.mu = -1e-30;
  CHECK(count_modes(cube) == brute_force_count(cube));
}

TEST_CASE("enumerated modes: ordering, angles and band") {
  gen::Rng r(4);
  const BoxSpec b = small_box(r);
  const ModeSet m = enumerate_modes(b);
  CHECK_NOTHROW(m.validate());
  REQUIRE(m.geometry);
  REQUIRE(m.band_width);
  CHECK(*m.band_width == doctest::Approx(2 * b.delta * si::c));
  for (Index i = 0; i < m.size(); ++i) {
    const auto& g = (*m.geometry)[i];
    CHECK(g.theta > 0);
    CHECK(g.theta < std::numbers::pi / 2);
    CHECK(std::cos(g.theta) == doctest::Approx(g.k(2) / g.k.norm()));
    CHECK(std::abs(m.offsets(i)) < b.delta * si::c);
    CHECK(m.couplings(i) == coupling_constant(g, b.mu, b.volume()));
    if (i > 0) {
      const auto& p = (*m.geometry)[i - 1];
      CHECK((m.offsets(i - 1) < m.offsets(i) || (m.offsets(i - 1) == m.offsets(i) && p.n < g.n)));
    }
  }
}

TEST_CASE("reference box reproduces the published mode count and rate") {
  const BoxSpec b = hydrogen_reference_box();
  const Index n = count_modes(b);
  CHECK(std::abs(n - 20820.0) / 20820.0 <= 0.015);
  CHECK(std::abs(expected_mode_count(b) - n) / n <= 0.02);
  const double rate = golden_rule_rate(enumerate_modes(b));
  CHECK(std::abs(rate - 6.2648e8) / 6.2648e8 <= 0.2);
}

TEST_CASE("desk box scales to the requested size") {
  const BoxSpec d = desk_box(2000);
  CHECK(expected_mode_count(d) == doctest::Approx(2000).epsilon(1e-9));
  const Index n = count_modes(d);
  CHECK(std::abs(n - 2000.0) / 2000.0 <= 0.05);
  // shrinking by s scales the couplings by s^{-3/2}
  const BoxSpec ref = hydrogen_reference_box();
  const double s = d.lengths(0) / ref.lengths(0);
  CHECK(d.lengths(1) / ref.lengths(1) == doctest::Approx(s));
  ModeGeometry g;
  g.theta = 1.0;
  g.k = Eigen::Vector3d(0, 0, ref.k0);
  CHECK(coupling_constant(g, d.mu, d.volume()) / coupling_constant(g, ref.mu, ref.volume()) ==
        doctest::Approx(std::pow(s, -1.5)).epsilon(1e-12));
  CHECK_THROWS_AS(desk_box(0), DomainError);
}

TEST_CASE("golden-rule rate by hand for five modes") {
  ModeSet m;
  m.offsets = Eigen::VectorXd(5);
  m.offsets << -2, -1, 0, 1, 2;
  m.couplings = Eigen::VectorXd(5);
  m.couplings << 1, 2, 3, 2, 1;
  // <eta^2> = 19 / 5, rho = 4 modes spacings over a span of 4
  CHECK(golden_rule_rate(m) == doctest::Approx(2 * std::numbers::pi * 3.8 * 1.0));
  m.band_width = 10.0; // rho = 5 / 10
  CHECK(golden_rule_rate(m) == doctest::Approx(2 * std::numbers::pi * 3.8 * 0.5));
}

TEST_CASE("box validation") {
  BoxSpec b = hydrogen_reference_box();
  b.delta = b.k0 * 2;
  CHECK_THROWS_AS(count_modes(b), DomainError);
  b = hydrogen_reference_box();
  b.lengths(2) = 0;
  CHECK_THROWS_AS(b.validate(), DomainError);
  BoxSpec tiny;
  tiny.lengths = Eigen::Vector3d::Constant(1e-6);
  tiny.k0 = 10;
  tiny.delta = 1;
  CHECK_THROWS_AS(enumerate_modes(tiny), DomainError);
  CHECK(count_modes(tiny) == 0);
}
