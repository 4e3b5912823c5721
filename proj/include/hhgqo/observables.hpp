#pragma once

// Photon numbers, one-time second-order coherences, normalized correlations,
// the Cauchy-Schwarz ratio and reduced density matrices of the second-order
// state, all as closed forms in Theta and Omega.
//
// Mode labels follow the physics convention: 1 is the driving field, n >= 2
// is the nth harmonic.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "hhgqo/model.hpp"

namespace hhgqo {

double mean_photon_driving(const PerturbativeAmplitudes& amps, const ModelParams& params, double t);
double mean_photon_harmonic(const PerturbativeAmplitudes& amps, const ModelParams& params, int n, double t);

/// G_ij = <b_i^+ b_j^+ b_j b_i> / N(t) for i <= j in {1} u harmonics.
double coherence(const PerturbativeAmplitudes& amps, const ModelParams& params, int i, int j, double t);

/// G / (N_i N_j); empty when a denominator vanishes (e.g. harmonics at t = 0).
std::optional<double> gamma(double g, double n_i, double n_j);

/// G_nm^2 / (G_nn G_mm); empty when G_nn or G_mm vanishes.
std::optional<double> cbs_ratio(const PerturbativeAmplitudes& amps, const ModelParams& params, int n, int m, double t);

/// Un-normalized reduced state of harmonics (n, m), basis |00>,|01>,|10>,|11>
/// with the first label belonging to n.
DensityMatrix two_mode_density(const PerturbativeAmplitudes& amps, const ModelParams& params, int n, int m, double t);

/// Un-normalized reduced state of harmonic n in the {|0>, |1>} basis.
DensityMatrix single_mode_density(const PerturbativeAmplitudes& amps, const ModelParams& params, int n, double t);

/// log2 of the trace norm of the normalized two-mode state partially
/// transposed on `transposed_mode` (0 = n, 1 = m).
double log_negativity(const DensityMatrix& rho_two_mode, std::size_t transposed_mode = 0);
double log_negativity(const PerturbativeAmplitudes& amps, const ModelParams& params, int n, int m, double t);

/// Main-text specializations for alpha0 = -i|alpha0|, written in terms of
/// |Theta| and |Omega| only. Kept as an independent cross-check of the
/// general forms; throws ArgumentError for any other alpha0 phase.
namespace main_text {
double mean_photon_driving(const PerturbativeAmplitudes& amps, const ModelParams& params, double t);
double mean_photon_harmonic(const PerturbativeAmplitudes& amps, const ModelParams& params, int n, double t);
double coherence(const PerturbativeAmplitudes& amps, const ModelParams& params, int i, int j, double t);
}  // namespace main_text

using ModePair = std::pair<int, int>;

struct CorrelationReport {
  double t = 0.0;
  double n_driving = 0.0;
  std::map<int, double> n_harmonic;
  /// Keys are (i, j) with i <= j; mode 1 is the driving field.
  std::map<ModePair, double> g;
  std::map<int, std::optional<double>> gamma_auto;
  std::map<ModePair, std::optional<double>> gamma_cross;
  /// Harmonic pairs n < m.
  std::map<ModePair, std::optional<double>> cbs;
  std::map<ModePair, double> log_negativity;
  /// Perturbative validity heuristic passed and no photon number is negative.
  bool valid = true;

  std::vector<int> harmonics() const;
};

/// Everything at one instant: N, all G, gamma, R and E over every harmonic pair.
CorrelationReport correlation_report(const PerturbativeAmplitudes& amps, const ModelParams& params, double t,
                                     const ValidityThresholds& thr = {});

/// gamma, R recomputed from stored G and N values.
void fill_ratios(CorrelationReport& report);

}  // namespace hhgqo
