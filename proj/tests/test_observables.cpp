#include "emitsim/box3d.hpp"
#include "emitsim/dynamics.hpp"
#include "emitsim/observables.hpp"
#include "support/generators.hpp"

#include <doctest.h>

using namespace emitsim;
using cplx = std::complex<double>;

namespace {

SpectrumResult lorentz_samples(double center, double fwhm, double height, Index n, double span,
                               gen::Rng* noise = nullptr, double level = 0) {
  SpectrumResult s;
  s.frequencies = Eigen::VectorXd::LinSpaced(n, center - span, center + span);
  s.probabilities.resize(n);
  const double h = fwhm / 2;
  for (Index i = 0; i < n; ++i) {
    const double u = s.frequencies(i) - center;
    s.probabilities(i) = height * h * h / (u * u + h * h);
    if (noise) s.probabilities(i) *= 1 + level * noise->normal();
  }
  return s;
}

} // namespace

TEST_CASE("populations and spectra read the site amplitudes") {
  ModeSet m;
  m.offsets = Eigen::Vector3d(-1, 0, 1);
  m.couplings = Eigen::Vector3d::Ones();
  Eigen::VectorXcd a(4);
  a << cplx(0.5, 0), cplx(0, 0.5), cplx(0.5, 0), cplx(0, -0.5);
  const StateVectord s(a, Basis::site);
  CHECK(excited_population(s) == doctest::Approx(0.25));
  const auto sp = spectrum(s, m);
  CHECK(sp.probabilities == Eigen::Vector3d::Constant(0.25));
  CHECK(sp.frequencies == m.offsets);
  CHECK_FALSE(sp.angles);
  CHECK_NOTHROW(sp.validate());
  CHECK_THROWS_AS(spectrum(StateVectord(a, Basis::eigen), m), DomainError);
  CHECK_THROWS_AS(spectrum(s, m, 2), DomainError);
  CHECK_THROWS_AS(angular_distribution(s, m), DomainError);
  CHECK_THROWS_AS(excited_population(s, 9), DomainError);
}

TEST_CASE("single-atom population is gone long after the decay") {
  const auto sol = solve_exact1d({1.0, 2.4, 7500});
  const double t = 8 * sol.cfg.tau_f();
  CHECK(std::norm(survival_amplitude(sol, t)) < 0.01);
}

TEST_CASE("Lorentzian fit recovers exact and noisy lines") {
  const auto exact = lorentz_samples(0.3, 2.0, 5.0, 201, 10);
  const auto f = lorentzian_fwhm_fit(exact);
  CHECK(f.center == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(f.fwhm == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(f.height == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(f.residual <= 1e-8);
  CHECK(f(0.3) == doctest::Approx(5.0).epsilon(1e-8));
  gen::Rng r(12);
  const auto noisy = lorentz_samples(-1.0, 0.5, 1e-3, 301, 3, &r, 0.02);
  const auto g = lorentzian_fwhm_fit(noisy);
  CHECK(g.fwhm == doctest::Approx(0.5).epsilon(0.02));
  CHECK(g.center == doctest::Approx(-1.0).epsilon(0.01));
  CHECK_THROWS_AS(lorentzian_fwhm_fit(lorentz_samples(0, 1, 1, 10, 3)), DomainError);
}

TEST_CASE("property: Lorentzian fit is invariant under intensity scaling") {
  gen::Rng r(71);
  for (int trial = 0; trial < 20; ++trial) {
    const double c = r.uniform(-5, 5), w = r.uniform(0.1, 3);
    const auto s = lorentz_samples(c, w, 1.0, r.integer(40, 300), r.uniform(2, 8) * w, &r, 0.05);
    const auto a = lorentzian_fwhm_fit(s);
    const double k = std::pow(10.0, r.uniform(-8, 3));
    SpectrumResult t = s;
    t.probabilities *= k;
    const auto b = lorentzian_fwhm_fit(t);
    CHECK(b.center == doctest::Approx(a.center).epsilon(1e-6).scale(w));
    CHECK(b.fwhm == doctest::Approx(a.fwhm).epsilon(1e-6));
    CHECK(b.height == doctest::Approx(k * a.height).epsilon(1e-6));
  }
}

TEST_CASE("two-component fit separates a narrow line") {
  SpectrumResult s = lorentz_samples(0, 4.0, 1.0, 801, 20);
  for (Index i = 0; i < s.size(); ++i) {
    const double u = s.frequencies(i) - 1.5;
    s.probabilities(i) += 0.8 * 0.0225 / (u * u + 0.0225);
  }
  const auto f = two_lorentzian_fit(s);
  REQUIRE(f.two_components);
  CHECK(f.narrow.fwhm == doctest::Approx(0.3).epsilon(1e-4));
  CHECK(f.narrow.center == doctest::Approx(1.5).epsilon(1e-4));
  CHECK(f.broad.fwhm == doctest::Approx(4.0).epsilon(1e-4));
  const auto single = two_lorentzian_fit(lorentz_samples(0, 1.0, 1.0, 401, 10));
  CHECK_FALSE(single.two_components);
  gen::Rng r(5);
  CHECK_FALSE(two_lorentzian_fit(lorentz_samples(0, 1.0, 1.0, 401, 10, &r, 0.01)).two_components);
}

TEST_CASE("two-component fit finds a weak broad line beside a sharp one") {
  // the misfit at the sharp peak exceeds the weak line's height
  SpectrumResult s = lorentz_samples(-7, 0.3, 1.0, 2001, 20);
  for (Index i = 0; i < s.size(); ++i) {
    const double u = s.frequencies(i) - 7;
    s.probabilities(i) += 0.03 * 0.81 / (u * u + 0.81);
  }
  const auto f = two_lorentzian_fit(s);
  REQUIRE(f.two_components);
  CHECK(f.broad.center == doctest::Approx(7).epsilon(1e-4));
  CHECK(f.broad.fwhm == doctest::Approx(1.8).epsilon(1e-4));
  CHECK(f.broad.height == doctest::Approx(0.03).epsilon(1e-4));
  CHECK(f.narrow.fwhm == doctest::Approx(0.3).epsilon(1e-4));
}

TEST_CASE("equidistant-model spectrum has the natural linewidth") {
  const Exact1DConfig c{1.0, 2.4, 7500};
  const auto sol = solve_exact1d(c);
  const double gamma = 2 * std::numbers::pi * c.eta * c.eta / c.epsilon;
  std::vector<Index> ks;
  for (Index k = -360; k <= 360; ++k)
    if (k != 0) ks.push_back(k);
  const auto em = emission_amplitudes(sol, ks, 8 * c.tau_f());
  SpectrumResult s;
  s.frequencies.resize(ks.size());
  for (size_t i = 0; i < ks.size(); ++i) s.frequencies(i) = ks[i] * c.epsilon;
  s.probabilities = em.cwiseAbs2();
  const auto f = lorentzian_fwhm_fit(s);
  CHECK(std::abs(f.fwhm - gamma) / gamma <= 0.05);
  CHECK(std::abs(f.center) <= 0.05 * gamma);
}

TEST_CASE("exponential lifetime and envelope helpers") {
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(50, 0, 10);
  const Eigen::VectorXd p = (-t.array() / 2.5).exp().matrix() * 0.9;
  const auto f = fit_exponential_lifetime(t, p);
  CHECK(f.lifetime == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(f.amplitude == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(f.points_used == 50);
  CHECK_THROWS_AS(fit_exponential_lifetime(t, Eigen::VectorXd::Constant(50, 1e-3)), FitError);
  CHECK_THROWS_AS(fit_exponential_lifetime(t, Eigen::VectorXd::Ones(50)), FitError);

  SpectrumResult s;
  s.frequencies = Eigen::Vector3d(0, 1, 2);
  s.probabilities = Eigen::Vector3d(0.1, 0.2, 0.3);
  CHECK_THROWS_AS(spectral_envelope(s), DomainError);
  s.angles = Eigen::Vector3d(std::numbers::pi / 2, 0.1, std::numbers::pi / 4);
  const auto e = spectral_envelope(s);
  REQUIRE(e.size() == 2);
  CHECK(e.probabilities(0) == doctest::Approx(0.1));
  CHECK(e.probabilities(1) == doctest::Approx(0.3 / 0.5));
}

TEST_CASE("angular binning and the sin^2 fit") {
  AngularDistribution d;
  const Index n = 2000;
  d.theta = Eigen::VectorXd::LinSpaced(n, 0.001, std::numbers::pi / 2 - 0.001);
  d.probability = (d.theta.array().sin().square() * 3.0).matrix();
  d.offset = Eigen::VectorXd::Zero(n);
  const auto b = bin_angular(d, 60);
  CHECK(b.count.sum() == n);
  const Eigen::VectorXd st = b.statistic();
  CHECK(std::isnan(st(59)));
  const auto f = fit_sin2(b);
  CHECK(f.bins_used == 30);
  CHECK(f.amplitude == doctest::Approx(3.0).epsilon(0.01));
  CHECK(f.relative_residual < 0.01);
  // weights divide the per-bin sums
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 2.0);
  CHECK(fit_sin2(bin_angular(d, 60, 0, std::numbers::pi, &w)).amplitude == doctest::Approx(1.5).epsilon(0.01));
  CHECK_THROWS_AS(bin_angular(d, 0), DomainError);
}

TEST_CASE("box emission follows the dipole pattern") {
  const BoxSpec box = desk_box(300);
  const ModeSet modes = enumerate_modes(box);
  const auto eig = eigendecompose(build_hamiltonian(modes));
  const auto psi = propagate(StateVectord::localized(eig.dimension(), 0), eig, 8e-9);
  const auto dist = angular_distribution(psi, modes);
  CHECK(dist.probability.sum() <= 1.0);
  const auto bins = bin_angular(dist, 12, 0, std::numbers::pi / 2);
  Index peak;
  bins.sum.maxCoeff(&peak);
  CHECK(peak >= 9); // the last bins border theta = pi/2
}

TEST_CASE("property: correlations obey Cauchy-Schwarz") {
  gen::Rng r(404);
  std::vector<StateVectord> traj;
  for (int i = 0; i < 20; ++i) traj.emplace_back(gen::unit_state(r, 12), Basis::site);
  std::vector<std::pair<Index, Index>> pairs;
  for (Index j = 0; j < 12; ++j)
    for (Index k = j + 1; k < 12; ++k) pairs.push_back({j, k});
  const Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(20, 0, 1);
  const auto s = correlation_series(traj, times, pairs);
  for (Index p = 0; p < s.value.rows(); ++p)
    for (Index t = 0; t < s.value.cols(); ++t) {
      CHECK(std::abs(s.value(p, t)) <= 2 * s.abs_j(p, t) * s.abs_k(p, t) * (1 + 1e-14));
      CHECK(std::abs(s.normalized(p, t)) <= 2 + 1e-14);
      CHECK(s.value(p, t) == correlations(traj[t], pairs[p].first, pairs[p].second));
    }
  CHECK_THROWS_AS(correlations(traj[0], 0, 12), DomainError);
}

TEST_CASE("closed-form correlations match the finite matrix") {
  const Index L = 60;
  const auto fin = solve_finite_model({1.0, 1.5, L});
  const auto eig = eigendecompose(build_uniform_model<double>(L, 1.0, 1.5));
  const Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(7, 0.1, 3);
  const std::vector<std::pair<Index, Index>> pairs = {{0, 3}, {-2, -5}, {4, -4}};
  const auto s = correlation_series(fin, pairs, times);
  auto site = [&](Index k) { return k == 0 ? Index(0) : k < 0 ? 1 + (k + L) : L + k; };
  for (Index t = 0; t < times.size(); ++t) {
    const auto psi = propagate(StateVectord::localized(eig.dimension(), 0), eig, times(t));
    for (size_t p = 0; p < pairs.size(); ++p)
      CHECK(std::abs(s.value(p, t) - correlations(psi, site(pairs[p].first), site(pairs[p].second))) <= 1e-10);
  }
  CHECK_THROWS_AS(correlation_series(fin, {{0, L + 1}}, times), DomainError);
}

TEST_CASE("near-resonant oscillators lock their phases") {
  const Exact1DConfig c{1.0, 2.4, 7500};
  const auto sol = solve_exact1d(c);
  const double tau = c.tau_f();
  // offsets -4 eps and -7 eps lie near -0.1 and -0.2 in units of 1/tau_F
  const double beat = 2 * std::numbers::pi / 3.0;
  const Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(400, 10 * tau, 10 * tau + beat);
  const auto s = correlation_series(sol, {{-4, -7}, {0, -181}}, times);
  CHECK(s.normalized.row(0).maxCoeff() >= 1.98);
  CHECK(s.normalized.row(0).maxCoeff() <= 2.0 + 1e-12);
  // far off resonance (about -5 / tau_F): tiny population, sizeable correlation
  const double pop = s.abs_k.row(1).maxCoeff();
  CHECK(pop * pop < 1e-3);
  CHECK(s.normalized.row(1).cwiseAbs().maxCoeff() > 1.0);
}
