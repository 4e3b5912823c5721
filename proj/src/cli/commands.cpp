#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <ostream>
#include <thread>

#include "hhgqo/cli.hpp"
#include "hhgqo/observables.hpp"

namespace hhgqo::cli {

namespace {

// Runs body(i) for i in [0, count) on up to `threads` workers with a static
// interleaved partition; each body writes only its own slot.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string pair_name(const char* prefix, int i, int j) {
  return std::string(prefix) + "_" + std::to_string(i) + "_" + std::to_string(j);
}

std::vector<double> time_grid(const RunConfig& cfg) {
  std::vector<double> ts;
  if (cfg.t_steps == 1) return {cfg.t_stop};
  for (int i = 0; i < cfg.t_steps; ++i) ts.push_back(cfg.t_start + (cfg.t_stop - cfg.t_start) * i / (cfg.t_steps - 1));
  return ts;
}

std::vector<double> energy_grid(double start, double stop, int points, bool log_spacing) {
  std::vector<double> es;
  if (points == 1) return {start};
  for (int i = 0; i < points; ++i) {
    const double f = double(i) / (points - 1);
    es.push_back(log_spacing ? std::exp(std::log(start) + f * (std::log(stop) - std::log(start)))
                             : start + f * (stop - start));
  }
  return es;
}

void require_harmonic(const RunConfig& cfg, int n, const std::string& field) {
  if (std::find(cfg.harmonics.begin(), cfg.harmonics.end(), n) == cfg.harmonics.end()) {
    throw ConfigError("config field '" + field + "': order " + std::to_string(n) + " is not in model.harmonics");
  }
}

}  // namespace

void write_header(std::ostream& out, const std::string& command, const RunConfig& cfg,
                  const std::vector<std::string>& extra) {
  out << "# hhgqo " << command << "\n";
  for (const auto& line : cfg.describe()) out << "# " << line << "\n";
  for (const auto& line : extra) out << "# " << line << "\n";
}

int cmd_evolve(const RunConfig& cfg, std::ostream& out) {
  const ModelParams params = cfg.model();
  const PerturbativeAmplitudes amps = compute_amplitudes(params);
  const auto hs = amps.harmonics();
  const auto ts = time_grid(cfg);
  const double T = cfg.cycle();

  std::vector<std::string> rows(ts.size());
  parallel_for(ts.size(), cfg.threads, [&](std::size_t i) {
    const double t = ts[i] * T;
    CorrelationReport r;
    // E is not part of this table; skip the pair loop
    r.t = t;
    r.n_driving = mean_photon_driving(amps, params, t);
    for (int n : hs) r.n_harmonic[n] = mean_photon_harmonic(amps, params, n, t);
    r.g[{1, 1}] = coherence(amps, params, 1, 1, t);
    for (int n : hs) r.g[{n, n}] = coherence(amps, params, n, n, t);
    bool valid = perturbative_validity(amps, t).valid && r.n_driving >= 0.0;
    for (const auto& [n, v] : r.n_harmonic) valid = valid && v >= 0.0;

    std::string row = fmt(ts[i]) + "," + fmt(r.n_driving);
    for (int n : hs) row += "," + fmt(r.n_harmonic.at(n));
    row += "," + fmt(gamma(r.g.at({1, 1}), r.n_driving, r.n_driving));
    for (int n : hs) row += "," + fmt(gamma(r.g.at({n, n}), r.n_harmonic.at(n), r.n_harmonic.at(n)));
    row += valid ? ",1" : ",0";
    rows[i] = row;
  });

  write_header(out, "evolve", cfg);
  out << "t_cycles,N1";
  for (int n : hs) out << ",N" << n;
  out << ",gamma_1_1";
  for (int n : hs) out << "," << pair_name("gamma", n, n);
  out << ",valid\n";
  for (const auto& row : rows) out << row << "\n";
  return kOk;
}

int cmd_pairs(const RunConfig& cfg, std::ostream& out) {
  const ModelParams params = cfg.model();
  const PerturbativeAmplitudes amps = compute_amplitudes(params);
  const double t = cfg.t * cfg.cycle();
  const CorrelationReport r = correlation_report(amps, params, t);

  write_header(out, "pairs", cfg, {std::string("valid = ") + (r.valid ? "1" : "0")});
  out << "n,m,gamma_n_m,gamma_1_n,gamma_1_m,R_n_m,E_n_m\n";
  const auto hs = r.harmonics();
  for (std::size_t a = 0; a < hs.size(); ++a)
    for (std::size_t b = a + 1; b < hs.size(); ++b) {
      const int n = hs[a], m = hs[b];
      out << n << "," << m << "," << fmt(r.gamma_cross.at({n, m})) << "," << fmt(r.gamma_cross.at({1, n})) << ","
          << fmt(r.gamma_cross.at({1, m})) << "," << fmt(r.cbs.at({n, m})) << "," << fmt(r.log_negativity.at({n, m}))
          << "\n";
    }
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  const auto [n, m] = cfg.sweep_pair;
  require_harmonic(cfg, n, "sweep.pair");
  require_harmonic(cfg, m, "sweep.pair");
  if (n == m) throw ConfigError("config field 'sweep.pair': needs two distinct harmonics");

  const auto es = energy_grid(cfg.sweep_start, cfg.sweep_stop, cfg.sweep_points, cfg.sweep_log);
  const double tau = cfg.sweep_tau * cfg.cycle();
  std::vector<std::string> rows(es.size());
  parallel_for(es.size(), cfg.threads, [&](std::size_t i) {
    const ModelParams params = cfg.model_at(std::sqrt(es[i]));
    const PerturbativeAmplitudes amps = compute_amplitudes(params);
    const double nn = mean_photon_harmonic(amps, params, n, tau);
    const double nm = mean_photon_harmonic(amps, params, m, tau);
    const double gnn = coherence(amps, params, n, n, tau);
    const double gmm = coherence(amps, params, m, m, tau);
    const double gnm = coherence(amps, params, n, m, tau);
    const auto R = (gnn == 0.0 || gmm == 0.0) ? std::optional<double>() : std::optional<double>(gnm * gnm / (gnn * gmm));
    const double E = log_negativity(amps, params, n, m, tau);
    const bool valid = perturbative_validity(amps, tau).valid && nn >= 0.0 && nm >= 0.0;
    rows[i] = fmt(es[i]) + "," + fmt(nn) + "," + fmt(nm) + "," + fmt(gamma(gnn, nn, nn)) + "," +
              fmt(gamma(gmm, nm, nm)) + "," + fmt(gamma(gnm, nn, nm)) + "," + fmt(R) + "," + fmt(E) + "," +
              (valid ? "1" : "0");
  });

  write_header(out, "sweep", cfg);
  out << "energy,N" << n << ",N" << m << "," << pair_name("gamma", n, n) << "," << pair_name("gamma", m, m) << ","
      << pair_name("gamma", n, m) << "," << pair_name("R", n, m) << "," << pair_name("E", n, m) << ",valid\n";
  for (const auto& row : rows) out << row << "\n";
  return kOk;
}

int cmd_wigner(const RunConfig& cfg, std::ostream& out) {
  const ModelParams params = cfg.model();
  const PerturbativeAmplitudes amps = compute_amplitudes(params);
  const double t = cfg.t * cfg.cycle();
  const int n = cfg.wigner_harmonic;
  const DensityMatrix rho = single_mode_density(amps, params, n, t).normalized();
  CMatrix deviation = rho.data();
  deviation(0, 0) -= 1.0;

  const PhaseSpaceGrid grid = PhaseSpaceGrid::symmetric(cfg.grid_extent, cfg.grid_points);
  const RMatrix w = wigner(deviation, grid);
  write_header(out, "wigner", cfg,
               {"deviation = W[rho/tr(rho)] - W[|0><0|] of harmonic " + std::to_string(n),
                "integral = " + fmt(integrate(w, grid))});
  out << "q,p,W_deviation\n";
  for (int i = 0; i < grid.q_points; ++i)
    for (int j = 0; j < grid.p_points; ++j) out << fmt(grid.q(i)) << "," << fmt(grid.p(j)) << "," << fmt(w(i, j)) << "\n";
  return kOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  const ModelParams params = cfg.model();
  const PerturbativeAmplitudes amps = compute_amplitudes(params);
  const CMatrix h = build_hamiltonian(params, cfg.oracle.dims);
  const InitialState init = coherent_initial_state(params.alpha0, cfg.oracle.dims);
  const SpectralPropagator prop(h);
  const double T = cfg.cycle();

  struct Row {
    double t_cycles;
    std::string name;
    std::optional<double> closed, oracle;
  };
  std::vector<Row> rows;
  bool alarm = false, valid = true;
  double worst_infidelity = 0.0, worst_top = 0.0;

  for (double tc : cfg.oracle_times) {
    const double t = tc * T;
    EvolutionResult ode = evolve_ode(h, init.psi, t, cfg.oracle, params.omega);
    FockState exact = init.psi;
    exact.amplitudes = prop.apply(init.psi.amplitudes, t);
    worst_infidelity = std::max(worst_infidelity, 1.0 - fidelity(ode.psi.amplitudes, exact.amplitudes));
    const double top = top_level_population(exact);
    worst_top = std::max({worst_top, top, ode.top_population});
    alarm = alarm || ode.truncation_alarm || top > cfg.oracle.alarm_threshold;

    const CorrelationReport cf = correlation_report(amps, params, t);
    const CorrelationReport orc = oracle_observables(exact, params);
    valid = valid && cf.valid;

    rows.push_back({tc, "N1", cf.n_driving, orc.n_driving});
    for (const auto& [n, v] : cf.n_harmonic) rows.push_back({tc, "N" + std::to_string(n), v, orc.n_harmonic.at(n)});
    for (const auto& [key, v] : cf.g) rows.push_back({tc, pair_name("G", key.first, key.second), v, orc.g.at(key)});
    for (const auto& [key, v] : cf.gamma_auto)
      rows.push_back({tc, pair_name("gamma", key, key), v, orc.gamma_auto.at(key)});
    for (const auto& [key, v] : cf.gamma_cross)
      rows.push_back({tc, pair_name("gamma", key.first, key.second), v, orc.gamma_cross.at(key)});
    for (const auto& [key, v] : cf.cbs) rows.push_back({tc, pair_name("R", key.first, key.second), v, orc.cbs.at(key)});
    for (const auto& [key, v] : cf.log_negativity)
      rows.push_back({tc, pair_name("E", key.first, key.second), v, orc.log_negativity.at(key)});
  }

  write_header(out, "oracle", cfg,
               {"tail_mass = " + fmt(init.tail_mass), "ode_vs_expm_max_infidelity = " + fmt(worst_infidelity),
                "max_top_level_population = " + fmt(worst_top),
                std::string("truncation_alarm = ") + (alarm ? "1" : "0"),
                std::string("closed_form_valid = ") + (valid ? "1" : "0")});
  out << "t_cycles,quantity,closed_form,oracle,abs_error,rel_error\n";
  for (const auto& r : rows) {
    std::optional<double> abs_err, rel_err;
    if (r.closed && r.oracle) {
      abs_err = std::abs(*r.closed - *r.oracle);
      if (*r.oracle != 0.0) rel_err = *abs_err / std::abs(*r.oracle);
    }
    out << fmt(r.t_cycles) << "," << r.name << "," << fmt(r.closed) << "," << fmt(r.oracle) << "," << fmt(abs_err)
        << "," << fmt(rel_err) << "\n";
  }
  return alarm ? kTruncationAlarm : kOk;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  if (cfg.fit_dataset.empty()) throw ConfigError("config field 'fit.dataset': required (or pass --dataset)");
  std::ifstream in(cfg.fit_dataset);
  if (!in) throw ConfigError("config field 'fit.dataset': cannot open '" + cfg.fit_dataset + "'");
  const PulseEnergyDataset data = PulseEnergyDataset::parse(in);
  if (data.energy.empty()) throw FitError("dataset has no data rows");

  const double tau = cfg.fit_tau * cfg.cycle();
  std::vector<ExponentFit> fits;
  for (const auto& [n, col] : data.counts) fits.push_back(fit_exponents(data, n));

  write_header(out, "fit", cfg, {"rows = " + std::to_string(data.energy.size())});
  out << "n,epsilon,C_n,knot_energy,knot_alpha,single_regime,degenerate,rss\n";
  for (const auto& f : fits) {
    out << f.n << "," << fmt(f.epsilon) << "," << fmt(f.prefactor / (tau * tau)) << "," << fmt(f.knot_energy) << ","
        << fmt(f.knot_alpha) << "," << (f.single_regime ? 1 : 0) << "," << (f.degenerate ? 1 : 0) << "," << fmt(f.rss)
        << "\n";
  }
  out << "# forward prediction\n";
  out << "energy";
  for (const auto& f : fits) out << ",N" << f.n;
  out << "\n";
  for (double e : energy_grid(data.energy.front(), data.energy.back(), cfg.fit_predict_points, true)) {
    out << fmt(e);
    for (const auto& f : fits) out << "," << fmt(predict_photons(f, e));
    out << "\n";
  }
  return kOk;
}

}  // namespace hhgqo::cli
