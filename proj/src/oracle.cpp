#include "hhgqo/oracle.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace hhgqo {

namespace {

const Complex I(0.0, 1.0);

void check_layout(const ModelParams& params, const ModeDims& dims) {
  if (dims.modes() != params.harmonics().size() + 1) {
    throw ArgumentError("oracle: dims must list the driving mode plus one mode per harmonic");
  }
}

CMatrix matrix_power(const CMatrix& m, int e) {
  CMatrix r = CMatrix::Identity(m.rows(), m.cols());
  for (int i = 0; i < e; ++i) r = r * m;
  return r;
}

}  // namespace

void OracleConfig::validate() const {
  if (!(tolerance > 0.0 && tolerance <= 1e-4)) throw ArgumentError("OracleConfig: tolerance must be in (0, 1e-4]");
  if (!(alarm_threshold > 0.0 && alarm_threshold <= 1e-3)) {
    throw ArgumentError("OracleConfig: alarm threshold must be in (0, 1e-3]");
  }
  if (!(max_step > 0.0)) throw ArgumentError("OracleConfig: max step must be positive");
}

CMatrix build_hamiltonian(const ModelParams& params, const ModeDims& dims) {
  params.validate();
  check_layout(params, dims);
  if (dims.total() > kMaxDenseDim) {
    throw CapacityError("build_hamiltonian: total dim " + std::to_string(dims.total()) + " exceeds " +
                        std::to_string(kMaxDenseDim));
  }
  const auto hs = params.harmonics();
  const Eigen::Index D = dims.total();
  CMatrix h = CMatrix::Zero(D, D);
  h.diagonal() = params.omega * excitation_number_diagonal(params, dims);

  const CMatrix a = annihilation(dims[0]);
  for (std::size_t i = 0; i < hs.size(); ++i) {
    const int n = hs[i];
    const double chi = params.chi_of(n);
    if (chi == 0.0) continue;
    // X = A^n a_n^+ ; H gets chi (X + X^+)
    const CMatrix x = embed(matrix_power(a, n), 0, dims) * embed(creation(dims[i + 1]), i + 1, dims);
    h += chi * (x + x.adjoint());
  }
  return h;
}

CVector excitation_number_diagonal(const ModelParams& params, const ModeDims& dims) {
  check_layout(params, dims);
  const auto hs = params.harmonics();
  CVector diag(dims.total());
  for (Eigen::Index f = 0; f < dims.total(); ++f) {
    const auto lv = dims.unflatten(f);
    double e = lv[0];
    for (std::size_t i = 0; i < hs.size(); ++i) e += double(hs[i]) * lv[i + 1];
    diag(f) = e;
  }
  return diag;
}

InitialState coherent_initial_state(Complex alpha0, const ModeDims& dims) {
  const int d = dims[0];
  CVector drive(d);
  // e^{-|a|^2/2} a^k / sqrt(k!) by recurrence
  Complex c = std::exp(-0.5 * std::norm(alpha0));
  for (int k = 0; k < d; ++k) {
    drive(k) = c;
    c *= alpha0 / std::sqrt(double(k + 1));
  }
  const double kept = drive.squaredNorm();
  drive /= std::sqrt(kept);

  std::vector<CVector> factors{drive};
  for (std::size_t m = 1; m < dims.modes(); ++m) {
    CVector vac = CVector::Zero(dims[m]);
    vac(0) = 1.0;
    factors.push_back(vac);
  }
  return {FockState(dims, tensor_product(std::span<const CVector>(factors))), std::max(0.0, 1.0 - kept)};
}

double top_level_population(const FockState& psi) {
  const ModeDims& dims = psi.dims;
  std::vector<double> top(dims.modes(), 0.0);
  for (Eigen::Index f = 0; f < dims.total(); ++f) {
    const double p = std::norm(psi.amplitudes(f));
    if (p == 0.0) continue;
    const auto lv = dims.unflatten(f);
    for (std::size_t m = 0; m < dims.modes(); ++m)
      if (lv[m] == dims[m] - 1) top[m] += p;
  }
  const double total = psi.norm_squared();
  return *std::max_element(top.begin(), top.end()) / (total > 0.0 ? total : 1.0);
}

EvolutionResult evolve_ode(const CMatrix& h, const FockState& psi0, double t, const OracleConfig& cfg, double omega) {
  cfg.validate();
  if (h.rows() != psi0.dims.total()) throw ShapeError("evolve_ode: H does not match the state");
  if (!(t >= 0.0)) throw ArgumentError("evolve_ode: t must be >= 0");

  // Dormand-Prince 5(4) tableau; the system is autonomous so the nodes c_i are not needed
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto f = [&](const CVector& y) -> CVector { return -I * (h * y); };

  EvolutionResult res{psi0, 0.0, false, 0, 0};
  CVector y = psi0.amplitudes;
  const double h_max = cfg.max_step * 2.0 * std::numbers::pi / omega;
  double s = 0.0;
  double dt = std::min(h_max, t > 0.0 ? t : h_max) * 0.1;
  CVector k1 = f(y);

  while (s < t) {
    if (s + dt > t) dt = t - s;
    const CVector k2 = f(y + dt * a21 * k1);
    const CVector k3 = f(y + dt * (a31 * k1 + a32 * k2));
    const CVector k4 = f(y + dt * (a41 * k1 + a42 * k2 + a43 * k3));
    const CVector k5 = f(y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const CVector k6 = f(y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const CVector y_new = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const CVector k7 = f(y_new);
    const CVector err = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double acc = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc = cfg.tolerance * (1.0 + std::max(std::abs(y(i)), std::abs(y_new(i))));
      acc += std::norm(err(i)) / (sc * sc);
    }
    const double en = std::sqrt(acc / double(y.size()));
    if (!std::isfinite(en)) throw ValidationError("evolve_ode: integrator produced a non-finite state");

    if (en <= 1.0) {
      s += dt;
      y = y_new;
      k1 = k7;
      ++res.steps;
    } else {
      ++res.rejected;
    }
    const double factor = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
    dt = std::min(h_max, dt * factor);
    if (dt < 1e-14 * std::max(1.0, t)) throw ValidationError("evolve_ode: step size underflow");
  }

  res.psi.amplitudes = y;
  res.top_population = top_level_population(res.psi);
  res.truncation_alarm = res.top_population > cfg.alarm_threshold;
  return res;
}

SpectralPropagator::SpectralPropagator(const CMatrix& h) {
  if (hermiticity_defect(h) > 1e-12) throw ValidationError("SpectralPropagator: H not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw ValidationError("SpectralPropagator: eigensolver failed");
  vectors_ = es.eigenvectors();
  values_ = es.eigenvalues();
}

CVector SpectralPropagator::apply(const CVector& psi, double t) const {
  CVector c = vectors_.adjoint() * psi;
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) *= std::exp(-I * values_(i) * t);
  return vectors_ * c;
}

EvolutionResult evolve_expm(const CMatrix& h, const FockState& psi0, double t, const OracleConfig& cfg) {
  cfg.validate();
  if (h.rows() != psi0.dims.total()) throw ShapeError("evolve_expm: H does not match the state");
  EvolutionResult res{psi0, 0.0, false, 1, 0};
  res.psi.amplitudes = SpectralPropagator(h).apply(psi0.amplitudes, t);
  res.top_population = top_level_population(res.psi);
  res.truncation_alarm = res.top_population > cfg.alarm_threshold;
  return res;
}

Conservation conserved_quantities(const CMatrix& h, const CVector& excitation_diag, const FockState& psi) {
  const CVector& v = psi.amplitudes;
  Conservation c;
  c.norm = v.squaredNorm();
  c.energy = v.dot(h * v).real() / c.norm;
  c.excitation = v.dot(excitation_diag.cwiseProduct(v)).real() / c.norm;
  return c;
}

double fidelity(const CVector& a, const CVector& b) {
  return std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
}

CorrelationReport oracle_observables(const FockState& psi, const ModelParams& params) {
  const ModeDims& dims = psi.dims;
  check_layout(params, dims);
  const auto hs = params.harmonics();
  const double nrm = psi.norm_squared();

  std::vector<int> labels{1};
  labels.insert(labels.end(), hs.begin(), hs.end());
  auto lower = [&](const CVector& v, std::size_t mode) {
    return apply_on_mode(annihilation(dims[mode]), mode, dims, v);
  };

  CorrelationReport r;
  std::vector<CVector> once(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    once[i] = lower(psi.amplitudes, i);
    const double n = once[i].squaredNorm() / nrm;
    if (i == 0)
      r.n_driving = n;
    else
      r.n_harmonic[labels[i]] = n;
  }
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i; j < labels.size(); ++j) r.g[{labels[i], labels[j]}] = lower(once[i], j).squaredNorm() / nrm;
  fill_ratios(r);

  if (hs.size() >= 2) {
    const DensityMatrix rho = DensityMatrix::from_pure(psi);
    for (std::size_t i = 0; i < hs.size(); ++i)
      for (std::size_t j = i + 1; j < hs.size(); ++j) {
        const DensityMatrix reduced = partial_trace(rho, {i + 1, j + 1});
        r.log_negativity[{hs[i], hs[j]}] = log_negativity(reduced, 0);
      }
  }
  return r;
}

FockState to_transformed_frame(const FockState& psi_lab, const ModelParams& params, double t) {
  check_layout(params, psi_lab.dims);
  const ModeDims& dims = psi_lab.dims;
  const auto zeroth = zeroth_order_state(params, t);
  const auto hs = params.harmonics();
  FockState out = psi_lab;
  out.amplitudes = apply_on_mode(displacement_matrix(dims[0], -zeroth.driving), 0, dims, out.amplitudes);
  for (std::size_t i = 0; i < hs.size(); ++i) {
    out.amplitudes =
        apply_on_mode(displacement_matrix(dims[i + 1], -zeroth.harmonics.at(hs[i])), i + 1, dims, out.amplitudes);
  }
  return out;
}

}  // namespace hhgqo
