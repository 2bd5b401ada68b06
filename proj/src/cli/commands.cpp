#include "emitsim/cli/commands.hpp"

#include "emitsim/cli/cache.hpp"
#include "emitsim/cli/config.hpp"
#include "emitsim/cli/csv.hpp"
#include "emitsim/cli/manifest.hpp"
#include "emitsim/observables.hpp"
#include "emitsim/parallel.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>

namespace emitsim::cli {

using nlohmann::json;
using cplx = std::complex<double>;
namespace fs = std::filesystem;

namespace {

// |<0| exp(-iHt) |0>|^2 from the atomic row of U.
Eigen::VectorXd atomic_population(const EigenDecompositiond& eig, const Eigen::VectorXd& times,
                                  Index site = 0) {
  const Eigen::VectorXd r = eig.basis().row(site);
  const Eigen::VectorXd w = r.cwiseAbs2();
  Eigen::VectorXd p(times.size());
  for (Index i = 0; i < times.size(); ++i) {
    cplx a = 0;
    for (Index j = 0; j < w.size(); ++j) a += w(j) * std::polar(1.0, -eig.eigenvalues()(j) * times(i));
    p(i) = std::norm(a);
  }
  return p;
}

StateVectord evolve_localized(const EigenDecompositiond& eig, double t, Index site = 0) {
  return propagate(StateVectord::localized(eig.dimension(), site), eig, t);
}

std::optional<fs::path> cache_dir(const CommandOptions& o) {
  if (o.cache) return o.cache;
  if (const char* env = std::getenv("EMITSIM_CACHE_DIR"); env && *env) return fs::path(env);
  return std::nullopt;
}

json fit_summary(const LorentzFit& f, double unit) {
  return {{"center", f.center / unit}, {"fwhm", f.fwhm / unit}, {"height", f.height},
          {"residual", f.residual}};
}

// ---------------------------------------------------------------------------

json exact1d(const json& cfg, const CommandOptions& o, RunManifest& m, std::ostream& log) {
  const Exact1DRun run = parse_exact1d(cfg);
  const auto& c = run.model;
  const double tau = c.tau_f(), gamma = 1 / tau;
  log << "exact1d: L = " << c.L << ", g = " << c.g() << ", tau_F = " << tau << "\n";
  const Exact1DSolution sol = solve_exact1d(c);

  const Eigen::VectorXcd a = survival_amplitudes(sol, run.times);
  const Eigen::VectorXd pop = a.cwiseAbs2();
  const Eigen::VectorXd golden = (-run.times.array() / tau).exp().matrix();
  const Eigen::VectorXd dev = pop - golden;
  const Eigen::VectorXd t_tau = run.times / tau;
  write_csv(o.out / "population.csv", "excited-state population, equidistant model",
            {{"t", "hbar/energy", &run.times}, {"t_over_tau_F", "1", &t_tau},
             {"population", "1", &pop}, {"golden_rule", "1", &golden}, {"deviation", "1", &dev}});
  m.outputs.push_back({"population.csv", ""});

  std::vector<Index> ks;
  for (Index k = -run.spectrum_half_width; k <= run.spectrum_half_width; ++k)
    if (k != 0) ks.push_back(k);
  const Eigen::VectorXcd em = emission_amplitudes(sol, ks, run.spectrum_time);
  const Index n = static_cast<Index>(ks.size());
  Eigen::VectorXd w(n), p(n), wg(n);
  for (Index i = 0; i < n; ++i) {
    w(i) = ks[i] * c.epsilon;
    wg(i) = w(i) / gamma;
    p(i) = std::norm(em(i));
  }
  const Eigen::VectorXd pn = p / p.maxCoeff();
  write_csv(o.out / "spectrum.csv", "oscillator probabilities at t = " + std::to_string(run.spectrum_time),
            {{"offset", "energy", &w}, {"offset_over_Gamma", "1", &wg}, {"probability", "1", &p},
             {"normalized", "1", &pn}});
  m.outputs.push_back({"spectrum.csv", ""});

  json res = {{"tau_F", tau}, {"Gamma", gamma}, {"g", c.g()},
              {"max_abs_deviation", dev.cwiseAbs().maxCoeff()},
              {"truncated_norm", sol.truncated_norm()}};
  try {
    res["spectrum_fit"] = fit_summary(lorentzian_fwhm_fit(w, p), gamma);
  } catch (const SolverError& e) {
    log << "warning: spectrum fit failed: " << e.what() << "\n";
  } catch (const DomainError& e) {
    log << "warning: spectrum fit skipped: " << e.what() << "\n";
  }
  return res;
}

// ---------------------------------------------------------------------------

json box3d(const json& cfg, const CommandOptions& o, RunManifest& m, std::ostream& log) {
  const Box3DRun run = parse_box3d(cfg);
  const Index count = count_modes(run.box);
  log << "box3d: " << count << " modes in the shell (cap " << run.mode_cap << ")\n";
  if (count > run.mode_cap)
    throw ConfigError("mode count " + std::to_string(count) + " exceeds mode_cap " +
                          std::to_string(run.mode_cap));
  const ModeSet modes = enumerate_modes(run.box);
  const auto h = build_hamiltonian(modes);
  const EigenDecompositiond eig = cached_eigendecomposition(h, cache_dir(o), log);

  const double rate = golden_rule_rate(modes);
  const HydrogenParams hyd = hydrogen_2p_1s();
  const Eigen::VectorXd pop = atomic_population(eig, run.times);
  const Eigen::VectorXd golden = (-run.times.array() * rate).exp().matrix();
  const Eigen::VectorXd t_ns = run.times * 1e9;
  write_csv(o.out / "population.csv", "excited-state population, box modes",
            {{"t", "s", &run.times}, {"t_ns", "ns", &t_ns}, {"population", "1", &pop},
             {"golden_rule", "1", &golden}});
  m.outputs.push_back({"population.csv", ""});

  const StateVectord final_state = evolve_localized(eig, run.spectrum_time);
  const SpectrumResult spec = spectrum(final_state, modes);
  const Eigen::VectorXd scaled = spec.frequencies / rate;
  const Eigen::VectorXd norm_p = spec.probabilities / spec.probabilities.maxCoeff();
  write_csv(o.out / "spectrum.csv", "mode probabilities at t = " + std::to_string(run.spectrum_time) + " s",
            {{"offset", "rad/s", &spec.frequencies}, {"offset_over_rate", "1", &scaled},
             {"probability", "1", &spec.probabilities}, {"theta", "rad", &*spec.angles},
             {"normalized", "1", &norm_p}});
  m.outputs.push_back({"spectrum.csv", ""});

  json res = {{"mode_count", count}, {"golden_rule_rate", rate}, {"einstein_A", hyd.A},
              {"rate_over_A", rate / hyd.A}};
  try {
    const ExponentialFit ef = fit_exponential_lifetime(run.times, pop);
    res["fitted_lifetime"] = ef.lifetime;
    res["lifetime_over_tau"] = ef.lifetime * rate;
  } catch (const FitError& e) {
    log << "warning: lifetime fit failed: " << e.what() << "\n";
  }

  // Angular pattern: per-bin probability over the line-shape weight of the
  // modes it holds, so frequency content does not bias the bins.
  const AngularDistribution dist = angular_distribution(final_state, modes);
  Eigen::VectorXd weights = Eigen::VectorXd::Ones(modes.size());
  try {
    const LorentzFit lf = lorentzian_fwhm_fit(spectral_envelope(spec));
    res["spectrum_fit"] = fit_summary(lf, rate);
    for (Index k = 0; k < modes.size(); ++k) weights(k) = lf(spec.frequencies(k)) / lf.height;
  } catch (const SolverError& e) {
    log << "warning: spectrum fit failed: " << e.what() << "\n";
  } catch (const DomainError& e) {
    log << "warning: spectrum fit skipped: " << e.what() << "\n";
  }
  const AngularBins bins = bin_angular(dist, run.angular_bins, 0, std::numbers::pi, &weights);
  const Eigen::VectorXd stat = bins.statistic();
  const Eigen::VectorXd cnt = bins.count.cast<double>();
  const Sin2Fit sf = fit_sin2(bins);
  Eigen::VectorXd model(bins.center.size());
  for (Index b = 0; b < model.size(); ++b) model(b) = sf.amplitude * std::pow(std::sin(bins.center(b)), 2);
  write_csv(o.out / "angular.csv", "angular distribution at t = " + std::to_string(run.spectrum_time) + " s",
            {{"theta", "rad", &bins.center}, {"probability", "1", &bins.sum}, {"modes", "1", &cnt},
             {"statistic", "1", &stat}, {"sin2_fit", "1", &model}});
  m.outputs.push_back({"angular.csv", ""});
  res["sin2_amplitude"] = sf.amplitude;
  res["sin2_relative_residual"] = sf.relative_residual;
  res["angular_bins_used"] = sf.bins_used;
  return res;
}

// ---------------------------------------------------------------------------

json kicks(const json& cfg, const CommandOptions& o, RunManifest& m, std::ostream& log) {
  const KicksRun run = parse_kicks(cfg);
  const double tau = run.tau_f();
  const auto h = build_uniform_model<double>(run.L, run.epsilon, run.eta);
  const EigenDecompositiond eig = cached_eigendecomposition(h, cache_dir(o), log);
  KickOptions opt;
  opt.tau_f = tau;
  const KickTrajectory kicked = run_kick_sequence(eig, run.schedule, opt);
  KickSchedule free = run.schedule;
  free.phi = 0;
  const KickTrajectory plain = run_kick_sequence(eig, free, opt);
  if (kicked.tau_warning)
    log << "warning: tau_r = " << run.schedule.tau_r / tau
        << " tau_F is not much shorter than the decay time\n";

  const Index n = static_cast<Index>(kicked.times.size());
  Eigen::VectorXd t(n), tt(n), pk(n), pf(n);
  for (Index i = 0; i < n; ++i) {
    t(i) = kicked.times[i];
    tt(i) = t(i) / tau;
    pk(i) = kicked.populations[i](0);
    pf(i) = plain.populations[i](0);
  }
  write_csv(o.out / "population.csv", "excited-state population with and without kicks",
            {{"t", "hbar/energy", &t}, {"t_over_tau_F", "1", &tt}, {"kicked", "1", &pk},
             {"free", "1", &pf}});
  m.outputs.push_back({"population.csv", ""});

  const Eigen::VectorXd w = h.diag();
  const Eigen::VectorXd p = kicked.final_state.amplitudes().tail(w.size()).cwiseAbs2();
  const Eigen::VectorXd wt = w * run.schedule.tau_r;
  const Eigen::VectorXd pn = p / p.maxCoeff();
  write_csv(o.out / "spectrum.csv", "oscillator probabilities after the kick sequence",
            {{"offset", "energy", &w}, {"offset_times_tau_r", "1", &wt}, {"probability", "1", &p},
             {"normalized", "1", &pn}});
  m.outputs.push_back({"spectrum.csv", ""});

  const auto lines = predicted_kick_spectrum(run.schedule.phi, run.schedule.tau_r, run.harmonics);
  const Index nl = static_cast<Index>(lines.size());
  Eigen::VectorXd hn(nl), off(nl), offt(nl), inten(nl);
  for (Index i = 0; i < nl; ++i) {
    hn(i) = lines[i].harmonic;
    off(i) = lines[i].offset;
    offt(i) = lines[i].offset * run.schedule.tau_r;
    inten(i) = lines[i].intensity;
  }
  write_csv(o.out / "predicted.csv", "predicted kick sidebands",
            {{"harmonic", "1", &hn}, {"offset", "energy", &off}, {"offset_times_tau_r", "1", &offt},
             {"intensity", "1", &inten}});
  m.outputs.push_back({"predicted.csv", ""});

  Index peak;
  p.maxCoeff(&peak);
  return {{"tau_F", tau},
          {"kicks", run.schedule.count},
          {"max_abs_population_difference", (pk - pf).cwiseAbs().maxCoeff()},
          {"final_population_kicked", pk(n - 1)},
          {"final_population_free", pf(n - 1)},
          {"peak_offset", w(peak)},
          {"peak_offset_times_tau_r", w(peak) * run.schedule.tau_r},
          {"tau_warning", kicked.tau_warning}};
}

// ---------------------------------------------------------------------------

json two_atom(const json& cfg, const CommandOptions& o, RunManifest& m, std::ostream& log) {
  const TwoAtomRun run = parse_two_atom(cfg);
  const double tau = run.spec.tau_f(), gamma = 1 / tau;
  const auto h = build_two_atom_hamiltonian(run.spec);
  const EigenDecompositiond eig = cached_eigendecomposition(h, cache_dir(o), log);
  const TwoAtomResult r = run_two_atom(run.spec, eig, run.times, run.spectrum_time);

  const auto single = eigendecompose(build_uniform_model<double>(run.spec.L, run.spec.epsilon, run.spec.eta));
  const Eigen::VectorXd ps = atomic_population(single, run.times);
  const Eigen::VectorXd tt = run.times / tau;
  const Eigen::VectorXd total = r.population1 + r.population2;
  write_csv(o.out / "populations.csv", "atomic populations, initial state " + to_string(run.spec.initial),
            {{"t", "hbar/energy", &run.times}, {"t_over_tau_F", "1", &tt},
             {"population1", "1", &r.population1}, {"population2", "1", &r.population2},
             {"total", "1", &total}, {"single_atom", "1", &ps}});
  m.outputs.push_back({"populations.csv", ""});

  const Eigen::VectorXd wg = r.spectrum.frequencies / gamma;
  const Eigen::VectorXd pn = r.spectrum.probabilities / r.spectrum.probabilities.maxCoeff();
  write_csv(o.out / "spectrum.csv", "oscillator probabilities at t = " + std::to_string(r.spectrum_time),
            {{"offset", "energy", &r.spectrum.frequencies}, {"offset_over_Gamma", "1", &wg},
             {"probability", "1", &r.spectrum.probabilities}, {"normalized", "1", &pn}});
  m.outputs.push_back({"spectrum.csv", ""});

  json res = {{"tau_F", tau}, {"Gamma", gamma}, {"initial", to_string(run.spec.initial)},
              {"spectrum_time_over_tau_F", r.spectrum_time / tau},
              {"final_total_population", total(total.size() - 1)}};
  try {
    const TwoLorentzFit f = two_lorentzian_fit(r.spectrum);
    res["single_fit"] = fit_summary(f.single, gamma);
    res["two_components"] = f.two_components;
    if (f.two_components) {
      res["broad_fit"] = fit_summary(f.broad, gamma);
      res["narrow_fit"] = fit_summary(f.narrow, gamma);
    }
  } catch (const SolverError& e) {
    log << "warning: spectrum fit failed: " << e.what() << "\n";
  } catch (const DomainError& e) {
    log << "warning: spectrum fit skipped: " << e.what() << "\n";
  }
  return res;
}

} // namespace

int run_command(const std::string& name, const CommandOptions& o, std::ostream& log,
                std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  try {
    if (o.threads < 0) throw ConfigError("--threads must be >= 0");
    set_thread_count(o.threads);
    const json cfg = load_json(o.config);
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw ConfigError("cannot create output directory " + o.out.string() + ": " + ec.message());

    RunManifest m;
    m.experiment = name;
    m.config = cfg;
    m.code_version = code_version();
    if (name == "exact1d") m.results = exact1d(cfg, o, m, log);
    else if (name == "box3d") m.results = box3d(cfg, o, m, log);
    else if (name == "kicks") m.results = kicks(cfg, o, m, log);
    else if (name == "two-atom") m.results = two_atom(cfg, o, m, log);
    else throw ConfigError("unknown experiment '" + name + "'");
    m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m.write(o.out);
    log << "wrote " << (o.out / "manifest.json").string() << "\n";
    return exit_ok;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const DomainError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::exception& e) {
    err << "numeric error: " << e.what() << "\n";
    return exit_numeric;
  }
}

} // namespace emitsim::cli
