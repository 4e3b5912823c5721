#pragma once

// Closed-form second-order perturbative solution of the effective HHG
// Hamiltonian
//
//   H = w A^+A + w sum_n n a_n^+ a_n + sum_n chi_n (A^n a_n^+ + A^+^n a_n),   hbar = 1,
//
// started from a coherent driving field |alpha0> and vacuum harmonics.

#include <complex>
#include <map>
#include <span>
#include <vector>

#include "hhgqo/fock.hpp"

namespace hhgqo {

struct TruncationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ModelParams {
  Complex alpha0{0.0, -1.0};
  double omega = 1.0;
  int cutoff = 3;
  /// Harmonic order -> susceptibility. Absent or zero entries are forbidden harmonics.
  std::map<int, double> chi;
  /// Lowest harmonic order carried by the state; 0 selects the smallest chi key.
  int lowest_harmonic = 0;

  /// Throws ArgumentError when an invariant is violated.
  void validate() const;
  double chi_of(int n) const;
  /// Harmonic orders carried as modes, ascending (chi keys >= lowest harmonic).
  std::vector<int> harmonics() const;
  double alpha0_abs() const { return std::abs(alpha0); }
  double optical_cycle() const;
};

enum class PhaseConvention {
  /// alpha0 = -i |alpha0|: Theta_k = (-i)^k |Theta_k|, Omega_{n,k} = (-i)^{n+k} |Omega_{n,k}|.
  MinusI,
  /// Any other phase; the same magnitudes carry phases exp(i k arg alpha0).
  General,
};

struct PerturbativeAmplitudes {
  int cutoff = 0;
  /// |Theta_k| for k = 0..N; entry 0 is unused and zero.
  std::vector<double> theta_abs;
  /// |Omega_{n,k}| for every harmonic n, k = 0..N.
  std::map<int, std::vector<double>> omega_abs;
  double alpha0_phase = 0.0;
  PhaseConvention convention = PhaseConvention::MinusI;

  /// Complex Theta_k; zero outside 1..N.
  Complex theta(int k) const;
  /// Complex Omega_{n,k}; zero outside 0..N or for unknown n.
  Complex omega(int n, int k) const;
  double theta_mag(int k) const;
  double omega_mag(int n, int k) const;
  std::vector<int> harmonics() const;
};

/// |Theta_k| = sum_{n=max(2,k)}^{N} C(n,k) sqrt(k!)/2 chi_n^2 |alpha0|^{2n-k}, k = 1..N.
std::vector<double> compute_theta(const ModelParams& params);

/// |Omega_{n',k'}| = sum_{k=1}^{N} chi_{n'}/3 C(n',k) sqrt((k+k')!/k'!) |alpha0|^{n'-k} |Theta_{k+k'}|.
std::map<int, std::vector<double>> compute_omega(const ModelParams& params, std::span<const double> theta);

PerturbativeAmplitudes compute_amplitudes(const ModelParams& params);

/// N(t) = 1 + sum |Theta_k|^2 t^4 + sum_{j,k} |Omega_{j,k}|^2 t^6.
double norm_squared(const PerturbativeAmplitudes& amps, double t);

struct ZerothOrderState {
  Complex driving;
  /// beta_n(t) = -i t chi_n alpha0^n exp(-i n w t)
  std::map<int, Complex> harmonics;
};

ZerothOrderState zeroth_order_state(const ModelParams& params, double t);

enum class Frame {
  /// Displacements removed: vacuum plus Theta and Omega corrections.
  Transformed,
  /// Displaced-number-state form; displacements are applied as truncated
  /// matrices, so accuracy is limited by the supplied dims.
  Lab,
};

/// Mode dims matching the state layout: driving N+2, `harmonic_dim` per harmonic.
ModeDims default_state_dims(const ModelParams& params, int harmonic_dim = 2);

/// Literal un-normalized second-order state vector. Throws TruncationError if
/// dims cannot hold k = N in the driving mode or one harmonic excitation.
FockState assemble_state_secondorder(const PerturbativeAmplitudes& amps, const ModelParams& params, double t,
                                     const ModeDims& dims, Frame frame = Frame::Transformed);

/// Truncated displacement matrix with entries <n|D(beta)|m>.
CMatrix displacement_matrix(int dim, Complex beta);

struct ValidityThresholds {
  double theta_t2 = 0.3;
  double omega_fraction = 0.1;
};

/// Advisory flag for the perturbative expansion; never fatal.
struct Validity {
  bool valid = true;
  double max_theta_t2 = 0.0;
  double omega_fraction = 0.0;
};

Validity perturbative_validity(const PerturbativeAmplitudes& amps, double t, const ValidityThresholds& thr = {});

/// Parameters, amplitudes and time bundled for evaluation.
struct StateSecondOrder {
  ModelParams params;
  PerturbativeAmplitudes amps;
  double t = 0.0;
  Validity validity;

  StateSecondOrder(ModelParams p, double time, const ValidityThresholds& thr = {});
};

}  // namespace hhgqo
