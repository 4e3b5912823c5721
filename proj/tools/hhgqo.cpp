// hhgqo: photon statistics and entanglement of the second-order HHG state.
//
//   hhgqo <evolve|pairs|sweep|wigner|oracle|fit> [--config FILE] [--set key=value]... [--out FILE]
//
// Exit codes: 0 ok, 1 other failure, 2 config error, 3 fit error, 4 truncation alarm.

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "hhgqo/cli.hpp"

namespace cli = hhgqo::cli;

int main(int argc, char** argv) {
  CLI::App app{"Photon statistics of high-harmonic generation at second order"};
  app.require_subcommand(1);

  std::string config_path, out_path, material, dataset;
  std::vector<std::string> overrides;
  std::optional<double> grid_extent;
  std::optional<int> grid_points;
  std::optional<unsigned> threads;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"evolve", "time series of photon numbers and autocorrelations"},
      {"pairs", "intermodal correlations, CBS ratio and log-negativity at one time"},
      {"sweep", "observables of one harmonic pair against pulse energy |alpha0|^2"},
      {"wigner", "Wigner-function deviation of one harmonic from the vacuum"},
      {"oracle", "closed forms against exact propagation in a truncated Fock space"},
      {"fit", "fit photons-per-pulse exponents and transition amplitudes"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_option("--out", out_path, "output path (default stdout)");
    sub->add_option("--set", overrides, "override key=value (repeatable)");
    sub->add_option("--material", material, "material preset")->check(CLI::IsMember({"gaas", "zno", "si"}));
    sub->add_option("--grid-extent", grid_extent, "Wigner grid half-width in q and p");
    sub->add_option("--grid-points", grid_points, "Wigner grid points per axis");
    sub->add_option("--threads", threads, "worker threads (fallback: HHGQO_THREADS)");
    if (name == "fit") sub->add_option("--dataset", dataset, "CSV with header energy,n3,n5,...");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? cli::kOk : cli::kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    cli::KeyValueConfig kv;
    if (!config_path.empty()) kv = cli::KeyValueConfig::parse_file(config_path);
    if (!material.empty()) kv.set("chi.material", material);
    if (grid_extent) kv.set("wigner.extent", cli::fmt(*grid_extent));
    if (grid_points) kv.set("wigner.points", std::to_string(*grid_points));
    if (!dataset.empty()) kv.set("fit.dataset", dataset);
    for (const auto& o : overrides) kv.set_assignment(o);

    cli::RunConfig cfg = cli::resolve(kv);
    cfg.threads = cli::resolve_threads(threads);

    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path, std::ios::binary);
      if (!file) throw cli::ConfigError("cannot open output '" + out_path + "'");
    }
    std::ostream& out = out_path.empty() ? std::cout : file;

    int code = cli::kOk;
    if (command == "evolve") code = cli::cmd_evolve(cfg, out);
    else if (command == "pairs") code = cli::cmd_pairs(cfg, out);
    else if (command == "sweep") code = cli::cmd_sweep(cfg, out);
    else if (command == "wigner") code = cli::cmd_wigner(cfg, out);
    else if (command == "oracle") code = cli::cmd_oracle(cfg, out);
    else if (command == "fit") code = cli::cmd_fit(cfg, out);
    out.flush();
    if (code == cli::kTruncationAlarm) std::cerr << "hhgqo: truncation alarm raised; see table header\n";
    return code;
  } catch (const cli::ConfigError& e) {
    std::cerr << "hhgqo: " << e.what() << "\n";
    return cli::kConfigError;
  } catch (const hhgqo::FitError& e) {
    std::cerr << "hhgqo: fit error: " << e.what() << "\n";
    return cli::kFitError;
  } catch (const std::exception& e) {
    std::cerr << "hhgqo: " << e.what() << "\n";
    return cli::kFailure;
  }
}
