#pragma once

// Susceptibility models chi_n(|alpha0|) and photons-per-pulse fits.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hhgqo/model.hpp"

namespace hhgqo {

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// chi_n = sqrt(C/n) p^n, independent of |alpha0|.
struct PerturbativeRegime {
  double C = 1.0;
  double p = 0.3;
};

/// chi_n = sqrt(C/n) / |alpha0|^n.
struct PlateauRegime {
  double C = 1.0;
};

/// chi_pert below the knot, chi_pert (knot/|alpha0|)^{n - epsilon/2} above it.
struct PiecewiseBranch {
  double chi_pert = 0.0;
  double knot = 1.0;
  double epsilon = 0.0;
};

struct PiecewiseMaterial {
  std::map<int, PiecewiseBranch> branches;
};

struct SusceptibilityModel {
  std::variant<PerturbativeRegime, PlateauRegime, PiecewiseMaterial> regime;
  /// Orders evaluated by the closed regimes; piecewise models use their branch keys.
  std::vector<int> harmonics;

  void validate() const;
};

/// Built-in material presets: "gaas", "zno", "si".
SusceptibilityModel material_model(std::string_view name);
std::vector<std::string> material_names();

std::map<int, double> eval_chi(const SusceptibilityModel& model, double alpha0_abs);

/// Emitted intensity at zeroth order: chi^2 |alpha0|^{2n} (n w) tau^2.
double zeroth_order_intensity(double chi, double alpha0_abs, double tau, int n, double omega);
/// Inverse of zeroth_order_intensity.
double chi_from_spectrum(double intensity, double alpha0_abs, double tau, int n, double omega);

/// (alpha0, chi_n) -> (xi alpha0, chi_n / |xi|^n); leaves every |beta_n|^2 unchanged.
ModelParams scale_transform(const ModelParams& params, Complex xi);

/// Rows of pulse energy (|alpha0|^2) against photons per pulse per harmonic.
struct PulseEnergyDataset {
  std::vector<double> energy;
  std::map<int, std::vector<double>> counts;

  /// Header `energy,n3,n5,...`; `#` lines and blank lines skipped. Errors cite line numbers.
  static PulseEnergyDataset parse(std::istream& in);
  static PulseEnergyDataset parse_string(const std::string& text);
  void validate() const;
};

struct ExponentFit {
  int n = 0;
  double epsilon = 0.0;
  /// Amplitude of the upper branch: N ~ prefactor * E^{epsilon/2}.
  double prefactor = 0.0;
  /// Knot as pulse energy |alpha_(n)|^2 and as amplitude |alpha_(n)|.
  double knot_energy = 0.0;
  double knot_alpha = 0.0;
  std::size_t knot_index = 0;
  double rss = 0.0;
  bool single_regime = false;
  bool degenerate = false;
};

/// Smallest dataset fit_exponents accepts: 3 rows each side of an interior knot.
inline constexpr std::size_t kMinFitRows = 7;

/// Continuous two-segment log-log fit with slope n below the knot and a free
/// slope epsilon/2 above; the knot is scanned over data abscissae.
ExponentFit fit_exponents(const PulseEnergyDataset& data, int n);

/// Forward model of a fit: photons per pulse at pulse energy E.
double predict_photons(const ExponentFit& fit, double energy);

}  // namespace hhgqo
