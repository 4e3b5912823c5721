#pragma once

// Run configuration and subcommand implementations behind the hhgqo tool.
//
// Config files are flat `section.key = value` lines; `#` starts a comment.
// Times are given in optical cycles T = 2 pi / omega.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hhgqo/fitting.hpp"
#include "hhgqo/model.hpp"
#include "hhgqo/oracle.hpp"

namespace hhgqo::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigError = 2,
  kFitError = 3,
  kTruncationAlarm = 4,
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raw key/value pairs in the order of last assignment.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source = "<config>");
  static KeyValueConfig parse_file(const std::string& path);

  /// `key=value` override from the command line.
  void set_assignment(const std::string& assignment);
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Exactly one of these is active in a resolved config.
using SusceptibilitySpec = std::variant<std::map<int, double>, SusceptibilityModel>;

struct RunConfig {
  double alpha0_abs = 1.0;
  /// arg(alpha0) in radians.
  double alpha0_phase = -1.5707963267948966;
  double omega = 1.0;
  int cutoff = 11;
  int lowest_harmonic = 0;
  std::vector<int> harmonics;
  SusceptibilitySpec chi;
  /// Human-readable susceptibility source, echoed in output headers.
  std::string chi_source;

  double t = 1.5;
  double t_start = 0.0;
  double t_stop = 1.5;
  int t_steps = 31;

  double sweep_start = 0.01;
  double sweep_stop = 10.0;
  int sweep_points = 61;
  bool sweep_log = true;
  double sweep_tau = 0.5;
  std::pair<int, int> sweep_pair{3, 5};

  int wigner_harmonic = 0;
  double grid_extent = 4.0;
  int grid_points = 81;

  OracleConfig oracle;
  std::vector<double> oracle_times{0.5, 1.0, 1.5};

  std::string fit_dataset;
  double fit_tau = 0.5;
  int fit_predict_points = 41;

  unsigned threads = 1;

  /// Parameters at a given |alpha0| with the susceptibility spec evaluated there.
  ModelParams model_at(double alpha0_abs) const;
  ModelParams model() const { return model_at(alpha0_abs); }
  double cycle() const;
  /// Fully resolved `key = value` lines, sorted by key.
  std::vector<std::string> describe() const;
};

/// Validates every key; errors name the offending field.
RunConfig resolve(const KeyValueConfig& kv);

/// `# ...` metadata block shared by all tables.
void write_header(std::ostream& out, const std::string& command, const RunConfig& cfg,
                  const std::vector<std::string>& extra = {});

/// Shortest round-trip-safe decimal rendering; "nan" for missing values.
std::string fmt(double v);
std::string fmt(const std::optional<double>& v);

int cmd_evolve(const RunConfig& cfg, std::ostream& out);
int cmd_pairs(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out);
int cmd_wigner(const RunConfig& cfg, std::ostream& out);
int cmd_oracle(const RunConfig& cfg, std::ostream& out);
int cmd_fit(const RunConfig& cfg, std::ostream& out);

/// Thread count from the flag, else HHGQO_THREADS, else 1.
unsigned resolve_threads(std::optional<unsigned> flag);

}  // namespace hhgqo::cli
