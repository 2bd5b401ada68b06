#include "emitsim/exact1d.hpp"
#include "emitsim/parallel.hpp"
#include "emitsim/summation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace emitsim {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

void Exact1DConfig::validate() const {
  if (!(epsilon > 0)) throw DomainError("exact1d: epsilon must be > 0");
  if (!(eta > 0)) throw DomainError("exact1d: eta must be > 0");
  if (L < 1) throw DomainError("exact1d: L must be >= 1");
}

double Exact1DSolution::lambda(Index l) const {
  if (l == 0) return 0.0;
  const double v = x(std::abs(l) - 1) * cfg.epsilon;
  return l > 0 ? v : -v;
}

double Exact1DSolution::truncated_norm() const {
  return w0 + 2 * pairwise_sum<double>(0, w.size(), [&](Index i) { return w(i); });
}

namespace {

// h(delta) = pi delta - atan(pi g^2 x / (x^2 + g^2)), x = k + delta, is
// negative at 0 and positive at 1/2.
double tangent_root(Index k, double g) {
  const double g2 = g * g;
  auto h = [&](double d, double& dh) {
    const double x = k + d;
    const double den = x * x + g2;
    const double r = pi * g2 * x / den;
    const double dr = pi * g2 * (g2 - x * x) / (den * den);
    dh = pi - dr / (1 + r * r);
    return pi * d - std::atan(r);
  };
  double lo = 0, hi = 0.5, d = 0.25;
  for (int it = 0; it < 200; ++it) {
    double dh;
    const double v = h(d, dh);
    if (v == 0) return d;
    if (v < 0) lo = d; else hi = d;
    double next = d - v / dh;
    if (!(next > lo && next < hi)) next = (lo + hi) / 2;
    const double step = next - d;
    d = next;
    if (std::abs(step) <= 1e-15 * d || hi - lo <= 4e-16 * hi) return d;
  }
  std::ostringstream msg;
  msg << "exact1d: root " << k << " did not converge in (" << k << ", " << k + 0.5 << ")";
  throw SolverError(msg.str());
}

} // namespace

Exact1DSolution solve_exact1d(const Exact1DConfig& cfg) {
  cfg.validate();
  Exact1DSolution s;
  s.cfg = cfg;
  const double g = cfg.g(), g2 = g * g;
  const double base = 3 + pi * pi * g2;
  s.w0 = 3 / base;
  s.x.resize(cfg.L);
  s.w.resize(cfg.L);
  parallel_for(0, cfg.L, [&](Index i) {
    const Index k = i + 1;
    const double x = k + tangent_root(k, g);
    s.x(i) = x;
    s.w(i) = 1 / (base + x * x / g2);
  });
  return s;
}

Exact1DSolution solve_finite_model(const Exact1DConfig& cfg) {
  cfg.validate();
  if (cfg.L > 4000) throw DomainError("solve_finite_model: L > 4000");
  const Index L = cfg.L;
  const double g2 = cfg.g() * cfg.g();
  // f(x) = x - g^2 sum_{0 < |l| <= L} 1 / (x - l), written relative to the
  // pole k as x = k + d.
  auto f = [&](Index k, double d) {
    double s = 0;
    for (Index l = L; l >= 1; --l) {
      s += 1 / (double(k - l) + d);
      s += 1 / (double(k + l) + d);
    }
    return double(k) + d - g2 * s;
  };
  Exact1DSolution s;
  s.cfg = cfg;
  s.finite = true;
  s.x.resize(L);
  s.w.resize(L);
  parallel_for(0, L, [&](Index i) {
    const Index k = i + 1;
    double lo = 0, hi = k < L ? 1.0 : std::sqrt(2 * double(L) * g2) + 1;
    // f is increasing between poles: -inf at d -> 0+, +inf at the next pole
    for (int it = 0; it < 200 && hi - lo > 4e-16 * (k + hi); ++it) {
      const double mid = (lo + hi) / 2;
      if (mid == lo || mid == hi) break;
      (f(k, mid) < 0 ? lo : hi) = mid;
    }
    const double d = (lo + hi) / 2;
    const double x = k + d;
    double norm = 0;
    for (Index l = L; l >= 1; --l) {
      const double a = double(k - l) + d, b = double(k + l) + d;
      norm += 1 / (a * a) + 1 / (b * b);
    }
    s.x(i) = x;
    s.w(i) = 1 / (1 + g2 * norm);
  });
  double n0 = 0;
  for (Index l = L; l >= 1; --l) n0 += 2 / (double(l) * double(l));
  s.w0 = 1 / (1 + g2 * n0);
  return s;
}

Eigen::VectorXd secular_roots(const Exact1DSolution& sol) {
  const Index L = sol.L();
  Eigen::VectorXd r(2 * L + 1);
  r(L) = 0;
  for (Index l = 1; l <= L; ++l) {
    r(L + l) = sol.lambda(l);
    r(L - l) = -r(L + l);
  }
  return r;
}

Eigen::VectorXd secular_roots(const Exact1DConfig& cfg) {
  return secular_roots(solve_exact1d(cfg));
}

cplx survival_amplitude(const Exact1DSolution& sol, double t) {
  const double et = sol.cfg.epsilon * t;
  const double s = pairwise_sum<double>(0, sol.w.size(), [&](Index i) {
    return sol.w(i) * std::cos(sol.x(i) * et);
  });
  return {sol.w0 + 2 * s, 0.0};
}

cplx survival_amplitude(const Exact1DConfig& cfg, double t) {
  return survival_amplitude(solve_exact1d(cfg), t);
}

Eigen::VectorXcd survival_amplitudes(const Exact1DSolution& sol,
                                     const Eigen::VectorXd& times) {
  Eigen::VectorXcd out(times.size());
  parallel_for(0, times.size(), [&](Index i) { out(i) = survival_amplitude(sol, times(i)); });
  return out;
}

Eigen::VectorXcd emission_amplitudes(const Exact1DSolution& sol,
                                     const std::vector<Index>& ks, double t) {
  const Index L = sol.L();
  const double g = sol.cfg.g(), et = sol.cfg.epsilon * t;
  Eigen::VectorXcd phase(L);
  for (Index i = 0; i < L; ++i) phase(i) = std::polar(1.0, -sol.x(i) * et);
  Eigen::VectorXcd out(ks.size());
  parallel_for(0, static_cast<Index>(ks.size()), [&](Index j) {
    const Index k = ks[j];
    if (k == 0 || std::abs(k) > L)
      throw DomainError("emission_amplitude: need 1 <= |k| <= L");
    const double kd = double(k);
    // l and -l paired, tree over ascending |l|
    const cplx s = pairwise_sum<cplx>(0, L, [&](Index i) {
      const double x = sol.x(i);
      return sol.w(i) * (phase(i) / (x - kd) + std::conj(phase(i)) / (-x - kd));
    });
    out(j) = g * (s - sol.w0 / kd);
  });
  return out;
}

cplx emission_amplitude(const Exact1DSolution& sol, Index k, double t) {
  return emission_amplitudes(sol, {k}, t)(0);
}

cplx emission_amplitude(const Exact1DConfig& cfg, Index k, double t) {
  if (k == 0) throw DomainError("emission_amplitude: k = 0 is the atom");
  return emission_amplitude(solve_exact1d(cfg), k, t);
}

Eigen::VectorXd golden_rule_deviation(const Exact1DSolution& sol,
                                      const Eigen::VectorXd& times) {
  const double tf = sol.cfg.tau_f();
  Eigen::VectorXcd a = survival_amplitudes(sol, times);
  Eigen::VectorXd d(times.size());
  for (Index i = 0; i < times.size(); ++i) {
    if (times(i) < 0) throw DomainError("golden_rule_deviation: negative time");
    d(i) = std::norm(a(i)) - std::exp(-times(i) / tf);
  }
  return d;
}

Eigen::VectorXd golden_rule_deviation(const Exact1DConfig& cfg,
                                      const Eigen::VectorXd& times) {
  return golden_rule_deviation(solve_exact1d(cfg), times);
}

double EigvecCoefficients::operator()(Index l) const {
  if (l == 0) return atom;
  return g / (x - double(l)) * atom;
}

EigvecCoefficients eigvec_coefficients(const Exact1DSolution& sol, Index k) {
  if (std::abs(k) > sol.L()) throw DomainError("eigvec_coefficients: |k| > L");
  EigvecCoefficients c;
  c.k = k;
  c.g = sol.cfg.g();
  if (k == 0) {
    c.x = 0;
    c.atom = std::sqrt(sol.w0);
  } else {
    c.x = k > 0 ? sol.x(k - 1) : -sol.x(-k - 1);
    c.atom = std::sqrt(sol.w(std::abs(k) - 1));
  }
  return c;
}

EigvecCoefficients eigvec_coefficients(const Exact1DConfig& cfg, Index k) {
  return eigvec_coefficients(solve_exact1d(cfg), k);
}

double normalization_deficit(const Exact1DConfig& cfg) {
  cfg.validate();
  const double g2 = cfg.g() * cfg.g();
  const double w0 = 3 / (3 + pi * pi * g2);
  // sum_{l=1}^{L} 1/l^2, smallest terms first
  double s = 0;
  for (Index l = cfg.L; l >= 1; --l) s += 1 / (double(l) * double(l));
  return 1 - w0 * (1 + 2 * g2 * s);
}

} // namespace emitsim
