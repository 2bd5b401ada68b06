#include "emitsim/observables.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace emitsim {

namespace {

// Sum of Lorentzians, parameters (A, c, h) per component with h = FWHM / 2.
struct Mixture {
  int components;

  double value(const Eigen::VectorXd& p, double x) const {
    double s = 0;
    for (int i = 0; i < components; ++i) {
      const double a = p(3 * i), c = p(3 * i + 1), h = p(3 * i + 2);
      const double u = x - c;
      s += a * h * h / (u * u + h * h);
    }
    return s;
  }

  void jacobian_row(const Eigen::VectorXd& p, double x, Eigen::MatrixXd& J, Index row) const {
    for (int i = 0; i < components; ++i) {
      const double a = p(3 * i), c = p(3 * i + 1), h = p(3 * i + 2);
      const double u = x - c;
      const double d = u * u + h * h;
      J(row, 3 * i) = h * h / d;
      J(row, 3 * i + 1) = a * h * h * 2 * u / (d * d);
      J(row, 3 * i + 2) = a * 2 * h * u * u / (d * d);
    }
  }
};

struct LmResult {
  Eigen::VectorXd p;
  double cost;
  int iterations;
};

LmResult levenberg_marquardt(const Mixture& model, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y, Eigen::VectorXd p,
                             const LorentzFitOptions& opt) {
  const Index n = x.size(), np = p.size();
  auto residuals = [&](const Eigen::VectorXd& q) {
    Eigen::VectorXd r(n);
    for (Index i = 0; i < n; ++i) r(i) = y(i) - model.value(q, x(i));
    return r;
  };
  Eigen::VectorXd r = residuals(p);
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  Eigen::MatrixXd J(n, np);
  for (int it = 1; it <= opt.max_iterations; ++it) {
    for (Index i = 0; i < n; ++i) model.jacobian_row(p, x(i), J, i);
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd M = A;
      for (Index k = 0; k < np; ++k) M(k, k) += lambda * std::max(A(k, k), 1e-12);
      const Eigen::VectorXd step = M.ldlt().solve(g);
      Eigen::VectorXd q = p + step;
      for (int c = 0; c < model.components; ++c) q(3 * c + 2) = std::abs(q(3 * c + 2));
      const Eigen::VectorXd rq = residuals(q);
      const double cq = rq.squaredNorm();
      if (std::isfinite(cq) && cq <= cost) {
        accepted = true;
        p = q;
        r = rq;
        const double prev = cost;
        cost = cq;
        lambda = std::max(lambda / 3, 1e-12);
        bool small = true;
        for (Index k = 0; k < np; ++k)
          small = small && std::abs(step(k)) <= opt.tolerance * std::max(std::abs(p(k)), 1.0);
        if (small || prev - cost <= 1e-15 * prev) return {p, cost, it};
      } else {
        lambda *= 4;
        if (lambda > 1e16) return {p, cost, it}; // no descent left: stationary
      }
    }
  }
  std::ostringstream msg;
  msg << "Lorentzian fit did not converge in " << opt.max_iterations
      << " iterations; cost " << cost << ", parameters " << p.transpose();
  throw FitError(msg.str());
}

// Distance between the half-maximum crossings around index `peak`.
double half_max_width(const Eigen::VectorXd& x, const Eigen::VectorXd& y, Index peak) {
  const double half = y(peak) / 2;
  const Index n = x.size();
  double left = std::nan(""), right = std::nan("");
  for (Index i = peak; i > 0; --i) {
    if (y(i - 1) < half) {
      left = x(i - 1) + (half - y(i - 1)) * (x(i) - x(i - 1)) / (y(i) - y(i - 1));
      break;
    }
  }
  for (Index i = peak; i + 1 < n; ++i) {
    if (y(i + 1) < half) {
      right = x(i) + (y(i) - half) * (x(i + 1) - x(i)) / (y(i) - y(i + 1));
      break;
    }
  }
  if (std::isfinite(left) && std::isfinite(right)) return right - left;
  if (std::isfinite(left)) return 2 * (x(peak) - left);
  if (std::isfinite(right)) return 2 * (right - x(peak));
  return (x(n - 1) - x(0)) / 4;
}

void check_input(const Eigen::VectorXd& w, const Eigen::VectorXd& y) {
  if (w.size() != y.size()) throw DomainError("Lorentzian fit: length mismatch");
  if (w.size() < 16) throw DomainError("Lorentzian fit: need at least 16 points");
  if (!(y.maxCoeff() > 0)) throw DomainError("Lorentzian fit: no positive peak");
}

// Sorts by frequency so crossings can be located.
void sorted(const Eigen::VectorXd& w, const Eigen::VectorXd& y, Eigen::VectorXd& ws,
            Eigen::VectorXd& ys) {
  std::vector<Index> idx(w.size());
  for (Index i = 0; i < w.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return w(a) < w(b); });
  ws.resize(w.size());
  ys.resize(w.size());
  for (Index i = 0; i < w.size(); ++i) {
    ws(i) = w(idx[i]);
    ys(i) = y(idx[i]);
  }
}

} // namespace

LorentzFit lorentzian_fwhm_fit(const Eigen::VectorXd& w_in, const Eigen::VectorXd& y_in,
                               const LorentzFitOptions& opt) {
  check_input(w_in, y_in);
  Eigen::VectorXd w, y;
  sorted(w_in, y_in, w, y);
  Index peak;
  const double ymax = y.maxCoeff(&peak);
  const double width0 = half_max_width(w, y, peak);
  const double x0 = w(peak), s = width0 > 0 ? width0 : 1.0;
  const Eigen::VectorXd x = (w.array() - x0) / s;
  const Eigen::VectorXd ys = y / ymax;
  Eigen::VectorXd p(3);
  p << 1.0, 0.0, 0.5 * width0 / s;
  const Mixture m{1};
  const LmResult r = levenberg_marquardt(m, x, ys, p, opt);
  LorentzFit f;
  f.height = r.p(0) * ymax;
  f.center = x0 + r.p(1) * s;
  f.fwhm = 2 * std::abs(r.p(2)) * s;
  f.residual = std::sqrt(r.cost / x.size()) * ymax;
  f.iterations = r.iterations;
  return f;
}

LorentzFit lorentzian_fwhm_fit(const SpectrumResult& spec, const LorentzFitOptions& opt) {
  return lorentzian_fwhm_fit(spec.frequencies, spec.probabilities, opt);
}

TwoLorentzFit two_lorentzian_fit(const SpectrumResult& spec, double ratio,
                                 const LorentzFitOptions& opt) {
  check_input(spec.frequencies, spec.probabilities);
  TwoLorentzFit out;
  out.single = lorentzian_fwhm_fit(spec, opt);
  out.residual = out.single.residual;

  Eigen::VectorXd w, y;
  sorted(spec.frequencies, spec.probabilities, w, y);
  const double ymax = y.maxCoeff();
  const double x0 = out.single.center, s = out.single.fwhm;
  Eigen::VectorXd rest(y.size());
  for (Index i = 0; i < y.size(); ++i) rest(i) = y(i) - out.single(w(i));

  // Second-component starts: the largest residual, and the largest residual
  // clear of the first line (a weak line elsewhere can hide under the misfit
  // of a sharp one). The lower final cost wins.
  std::vector<Index> starts;
  Index peak;
  if (rest.maxCoeff(&peak) > 0) starts.push_back(peak);
  Index away = -1;
  for (Index i = 0; i < y.size(); ++i)
    if (std::abs(w(i) - x0) > 3 * s && rest(i) > 0 && (away < 0 || rest(i) > rest(away))) away = i;
  if (away >= 0 && (starts.empty() || away != starts[0])) starts.push_back(away);
  if (starts.empty()) return out;

  const Eigen::VectorXd x = (w.array() - x0) / s;
  const Eigen::VectorXd ys = y / ymax;
  std::optional<LmResult> best;
  for (Index k : starts) {
    const double wn = half_max_width(w, rest, k);
    Eigen::VectorXd p(6);
    p << out.single.height / ymax, 0.0, 0.5 * out.single.fwhm / s, rest(k) / ymax,
        (w(k) - x0) / s, 0.5 * std::max(wn, 1e-6 * s) / s;
    try {
      LmResult r = levenberg_marquardt(Mixture{2}, x, ys, p, opt);
      if (!best || r.cost < best->cost) best = r;
    } catch (const FitError&) {
    }
  }
  if (!best) return out;
  const LmResult& r = *best;
  auto component = [&](int i) {
    LorentzFit f;
    f.height = r.p(3 * i) * ymax;
    f.center = x0 + r.p(3 * i + 1) * s;
    f.fwhm = 2 * std::abs(r.p(3 * i + 2)) * s;
    f.iterations = r.iterations;
    return f;
  };
  LorentzFit a = component(0), b = component(1);
  if (a.fwhm < b.fwhm) std::swap(a, b);
  const double res2 = std::sqrt(r.cost / x.size()) * ymax;
  a.residual = b.residual = res2;
  // distinct: separated centers or clearly different widths
  const bool distinct = std::abs(a.center - b.center) > (a.fwhm + b.fwhm) / 4 || a.fwhm > 1.5 * b.fwhm;
  const double weaker = std::min(a.height, b.height);
  if (distinct && res2 < out.single.residual / 1.5 && weaker > ratio * res2) {
    out.two_components = true;
    out.broad = a;
    out.narrow = b;
    out.residual = res2;
  }
  return out;
}

} // namespace emitsim
