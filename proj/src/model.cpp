#include "hhgqo/model.hpp"

#include <cmath>
#include <numbers>

namespace hhgqo {

namespace {

Complex unit_phase(double angle) { return std::polar(1.0, angle); }

Complex ipow(Complex z, int e) {
  Complex r = 1.0;
  for (int i = 0; i < e; ++i) r *= z;
  return r;
}

}  // namespace

void ModelParams::validate() const {
  if (!(std::abs(alpha0) > 0.0) || !std::isfinite(std::abs(alpha0))) {
    throw ArgumentError("ModelParams: |alpha0| must be positive and finite");
  }
  if (!(omega > 0.0) || !std::isfinite(omega)) throw ArgumentError("ModelParams: omega must be positive");
  if (cutoff < 2) throw ArgumentError("ModelParams: cutoff N must be >= 2");
  for (const auto& [n, c] : chi) {
    if (n < 2 || n > cutoff) {
      throw ArgumentError("ModelParams: chi key " + std::to_string(n) + " outside 2..N");
    }
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw ArgumentError("ModelParams: chi_" + std::to_string(n) + " must be finite and >= 0");
    }
  }
  if (lowest_harmonic != 0 && (lowest_harmonic < 2 || lowest_harmonic > cutoff)) {
    throw ArgumentError("ModelParams: lowest harmonic outside 2..N");
  }
}

double ModelParams::chi_of(int n) const {
  auto it = chi.find(n);
  return it == chi.end() ? 0.0 : it->second;
}

std::vector<int> ModelParams::harmonics() const {
  std::vector<int> out;
  for (const auto& [n, c] : chi)
    if (lowest_harmonic == 0 || n >= lowest_harmonic) out.push_back(n);
  return out;
}

double ModelParams::optical_cycle() const { return 2.0 * std::numbers::pi / omega; }

Complex PerturbativeAmplitudes::theta(int k) const {
  return theta_mag(k) * unit_phase(k * alpha0_phase);
}

Complex PerturbativeAmplitudes::omega(int n, int k) const {
  return omega_mag(n, k) * unit_phase((n + k) * alpha0_phase);
}

double PerturbativeAmplitudes::theta_mag(int k) const {
  if (k < 1 || k > cutoff) return 0.0;
  return theta_abs[static_cast<std::size_t>(k)];
}

double PerturbativeAmplitudes::omega_mag(int n, int k) const {
  if (k < 0 || k > cutoff) return 0.0;
  auto it = omega_abs.find(n);
  return it == omega_abs.end() ? 0.0 : it->second[static_cast<std::size_t>(k)];
}

std::vector<int> PerturbativeAmplitudes::harmonics() const {
  std::vector<int> out;
  for (const auto& [n, row] : omega_abs) out.push_back(n);
  return out;
}

std::vector<double> compute_theta(const ModelParams& params) {
  params.validate();
  const int N = params.cutoff;
  const double a = params.alpha0_abs();
  std::vector<double> theta(static_cast<std::size_t>(N + 1), 0.0);
  for (int k = 1; k <= N; ++k) {
    double sum = 0.0;
    for (int n = std::max(2, k); n <= N; ++n) {
      const double c = params.chi_of(n);
      if (c == 0.0) continue;
      sum += binomial(n, k) * sqrt_factorial(k) / 2.0 * c * c * std::pow(a, 2 * n - k);
    }
    theta[static_cast<std::size_t>(k)] = sum;
  }
  return theta;
}

std::map<int, std::vector<double>> compute_omega(const ModelParams& params, std::span<const double> theta) {
  params.validate();
  const int N = params.cutoff;
  if (theta.size() != static_cast<std::size_t>(N + 1)) {
    throw ArgumentError("compute_omega: theta length " + std::to_string(theta.size()) + " != N+1");
  }
  const double a = params.alpha0_abs();
  auto theta_at = [&](int k) { return (k >= 1 && k <= N) ? theta[static_cast<std::size_t>(k)] : 0.0; };

  std::map<int, std::vector<double>> omega;
  for (int n : params.harmonics()) {
    const double c = params.chi_of(n);
    std::vector<double> row(static_cast<std::size_t>(N + 1), 0.0);
    for (int kp = 0; kp <= N; ++kp) {
      double sum = 0.0;
      // binomial(n, k) vanishes for k > n, theta for k + kp > N
      for (int k = 1; k <= N; ++k) {
        const double th = theta_at(k + kp);
        const double bin = binomial(n, k);
        if (th == 0.0 || bin == 0.0) continue;
        sum += c / 3.0 * bin * (sqrt_factorial(k + kp) / sqrt_factorial(kp)) * std::pow(a, n - k) * th;
      }
      row[static_cast<std::size_t>(kp)] = sum;
    }
    omega.emplace(n, std::move(row));
  }
  return omega;
}

PerturbativeAmplitudes compute_amplitudes(const ModelParams& params) {
  PerturbativeAmplitudes amps;
  amps.cutoff = params.cutoff;
  amps.theta_abs = compute_theta(params);
  amps.omega_abs = compute_omega(params, amps.theta_abs);
  amps.alpha0_phase = std::arg(params.alpha0);
  amps.convention = std::abs(amps.alpha0_phase + std::numbers::pi / 2) < 1e-15 ? PhaseConvention::MinusI
                                                                              : PhaseConvention::General;
  return amps;
}

double norm_squared(const PerturbativeAmplitudes& amps, double t) {
  double theta_sum = 0.0, omega_sum = 0.0;
  for (int k = 1; k <= amps.cutoff; ++k) theta_sum += amps.theta_mag(k) * amps.theta_mag(k);
  for (const auto& [n, row] : amps.omega_abs)
    for (double w : row) omega_sum += w * w;
  const double t2 = t * t;
  return 1.0 + theta_sum * t2 * t2 + omega_sum * t2 * t2 * t2;
}

ZerothOrderState zeroth_order_state(const ModelParams& params, double t) {
  const Complex I(0.0, 1.0);
  ZerothOrderState s;
  s.driving = params.alpha0 * std::exp(-I * params.omega * t);
  for (int n : params.harmonics()) {
    s.harmonics[n] = -I * t * params.chi_of(n) * ipow(params.alpha0, n) * std::exp(-I * double(n) * params.omega * t);
  }
  return s;
}

ModeDims default_state_dims(const ModelParams& params, int harmonic_dim) {
  std::vector<int> dims{params.cutoff + 2};
  for (std::size_t i = 0; i < params.harmonics().size(); ++i) dims.push_back(harmonic_dim);
  return ModeDims(std::move(dims));
}

CMatrix displacement_matrix(int dim, Complex beta) {
  if (dim < 2) throw DimensionError("displacement_matrix: dim must be >= 2");
  CMatrix d(dim, dim);
  for (int n = 0; n < dim; ++n)
    for (int m = 0; m < dim; ++m) d(n, m) = displacement_element(n, m, beta);
  return d;
}

FockState assemble_state_secondorder(const PerturbativeAmplitudes& amps, const ModelParams& params, double t,
                                     const ModeDims& dims, Frame frame) {
  const auto harmonics = params.harmonics();
  const int N = amps.cutoff;
  if (dims.modes() != harmonics.size() + 1) {
    throw TruncationError("assemble_state_secondorder: dims must list the driving mode plus one mode per harmonic");
  }
  if (dims[0] < N + 1) throw TruncationError("assemble_state_secondorder: driving dim cannot hold k = N");

  const Complex I(0.0, 1.0);
  const double w = params.omega;
  const double t2 = t * t, t3 = t2 * t;
  FockState psi(dims, CVector::Zero(dims.total()));
  std::vector<int> levels(dims.modes(), 0);

  psi.at(levels) += 1.0;
  for (int k = 1; k <= N; ++k) {
    levels[0] = k;
    psi.at(levels) += -amps.theta(k) * t2 * std::exp(-I * double(k) * w * t);
  }
  for (std::size_t h = 0; h < harmonics.size(); ++h) {
    const int j = harmonics[h];
    std::fill(levels.begin(), levels.end(), 0);
    levels[h + 1] = 1;
    for (int k = 0; k <= N; ++k) {
      levels[0] = k;
      psi.at(levels) += -I * amps.omega(j, k) * t3 * std::exp(-I * double(k + j) * w * t);
    }
  }

  if (frame == Frame::Lab) {
    const auto zeroth = zeroth_order_state(params, t);
    psi.amplitudes = apply_on_mode(displacement_matrix(dims[0], zeroth.driving), 0, dims, psi.amplitudes);
    for (std::size_t h = 0; h < harmonics.size(); ++h) {
      const int n = harmonics[h];
      psi.amplitudes =
          apply_on_mode(displacement_matrix(dims[h + 1], zeroth.harmonics.at(n)), h + 1, dims, psi.amplitudes);
    }
  }
  return psi;
}

Validity perturbative_validity(const PerturbativeAmplitudes& amps, double t, const ValidityThresholds& thr) {
  Validity v;
  const double t2 = t * t;
  for (int k = 1; k <= amps.cutoff; ++k) v.max_theta_t2 = std::max(v.max_theta_t2, amps.theta_mag(k) * t2);
  double omega_sum = 0.0;
  for (const auto& [n, row] : amps.omega_abs)
    for (double x : row) omega_sum += x * x;
  v.omega_fraction = omega_sum * t2 * t2 * t2 / norm_squared(amps, t);
  v.valid = v.max_theta_t2 <= thr.theta_t2 && v.omega_fraction <= thr.omega_fraction;
  return v;
}

StateSecondOrder::StateSecondOrder(ModelParams p, double time, const ValidityThresholds& thr)
    : params(std::move(p)), amps(compute_amplitudes(params)), t(time), validity(perturbative_validity(amps, t, thr)) {
  if (!(t >= 0.0)) throw ArgumentError("StateSecondOrder: t must be >= 0");
}

}  // namespace hhgqo
