#pragma once

// Brute-force reference: exact Schroedinger evolution under the full
// Hamiltonian in a truncated Fock space, with no perturbative input.

#include <cstddef>

#include "hhgqo/model.hpp"
#include "hhgqo/observables.hpp"

namespace hhgqo {

struct CapacityError : std::length_error {
  using std::length_error::length_error;
};

struct OracleConfig {
  /// Driving mode first, then one entry per harmonic.
  ModeDims dims{16, 3, 3};
  double tolerance = 1e-12;
  /// Largest integrator step as a fraction of the optical cycle.
  double max_step = 0.05;
  /// Largest tolerated population of any mode's top Fock level.
  double alarm_threshold = 1e-6;

  void validate() const;
};

/// Largest total Hilbert dimension for which a dense Hamiltonian is built.
inline constexpr Eigen::Index kMaxDenseDim = 4096;

/// Dense H; mode 0 is the driving field, modes 1.. the harmonics in ascending order.
CMatrix build_hamiltonian(const ModelParams& params, const ModeDims& dims);

/// Diagonal of A^+A + sum_n n a_n^+ a_n, the conserved excitation number.
CVector excitation_number_diagonal(const ModelParams& params, const ModeDims& dims);

struct InitialState {
  FockState psi;
  /// Coherent-state probability discarded by the truncation.
  double tail_mass = 0.0;
};

/// Truncated, renormalized |alpha0> in the driving mode, vacuum harmonics.
InitialState coherent_initial_state(Complex alpha0, const ModeDims& dims);

struct EvolutionResult {
  FockState psi;
  /// Max over modes of the top-level population.
  double top_population = 0.0;
  bool truncation_alarm = false;
  std::size_t steps = 0;
  std::size_t rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) integration of i dpsi/dt = H psi.
EvolutionResult evolve_ode(const CMatrix& h, const FockState& psi0, double t, const OracleConfig& cfg, double omega);

/// exp(-iHt) through the eigendecomposition of H; reusable across times.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const CMatrix& h);
  CVector apply(const CVector& psi, double t) const;

 private:
  CMatrix vectors_;
  Eigen::VectorXd values_;
};

EvolutionResult evolve_expm(const CMatrix& h, const FockState& psi0, double t, const OracleConfig& cfg);

/// Largest top-level population over all modes.
double top_level_population(const FockState& psi);

/// Quality report of the pure state returned by an integrator.
struct Conservation {
  double energy = 0.0;
  double excitation = 0.0;
  double norm = 0.0;
};

Conservation conserved_quantities(const CMatrix& h, const CVector& excitation_diag, const FockState& psi);

/// |<a|b>|^2 / (<a|a><b|b>).
double fidelity(const CVector& a, const CVector& b);

/// Observables by direct operator application on the lab-frame state. Reduced
/// two-harmonic states keep the full harmonic dims before the partial transpose.
CorrelationReport oracle_observables(const FockState& psi, const ModelParams& params);

/// Remove the zeroth-order displacements (truncated matrices) from a lab-frame state.
FockState to_transformed_frame(const FockState& psi_lab, const ModelParams& params, double t);

}  // namespace hhgqo
