#include "hhgqo/observables.hpp"

#include <algorithm>
#include <cmath>

namespace hhgqo {

namespace {

const Complex I(0.0, 1.0);

Complex ipow(Complex z, int e) {
  Complex r = 1.0;
  for (int i = 0; i < e; ++i) r *= z;
  return r;
}

// The transformed second-order state decomposes into a harmonic-vacuum sector
// and one sector per singly-excited harmonic j, each holding a driving-mode
// vector over k = 0..N:
//
//   vac_k   = delta_k0 - Theta_k t^2
//   one_j,k = -i Omega_{j,k} t^3
//
// The e^{-i k w t} phases of the state cancel against those of the lab-frame
// displacements for every number-conserving observable, so the displacements
// enter as alpha0 and beta_n = -i t chi_n alpha0^n. Each closed form below is
// the squared norm of a product of displaced ladder operators applied to this
// sector state; expanding the norm reproduces the term-by-term expressions.
struct SectorState {
  CVector vac;
  std::map<int, CVector> one;

  double norm_squared() const {
    double s = vac.squaredNorm();
    for (const auto& [j, v] : one) s += v.squaredNorm();
    return s;
  }
};

SectorState transformed_sectors(const PerturbativeAmplitudes& amps, double t) {
  const int N = amps.cutoff;
  const double t2 = t * t, t3 = t2 * t;
  SectorState s;
  s.vac = CVector::Zero(N + 1);
  s.vac(0) = 1.0;
  for (int k = 1; k <= N; ++k) s.vac(k) = -amps.theta(k) * t2;
  for (int j : amps.harmonics()) {
    CVector v(N + 1);
    for (int k = 0; k <= N; ++k) v(k) = -I * amps.omega(j, k) * t3;
    s.one.emplace(j, std::move(v));
  }
  return s;
}

// (A + alpha) on the driving vector; lowering never leaves the k <= N block.
CVector lower_driving(const CVector& x, Complex alpha) {
  CVector out = alpha * x;
  for (Eigen::Index k = 0; k + 1 < x.size(); ++k) out(k) += std::sqrt(double(k + 1)) * x(k + 1);
  return out;
}

SectorState apply_driving(const SectorState& s, Complex alpha) {
  SectorState out;
  out.vac = lower_driving(s.vac, alpha);
  for (const auto& [j, v] : s.one) out.one.emplace(j, lower_driving(v, alpha));
  return out;
}

// (a_n + beta_n): |1_n> drops into the vacuum sector, everything else is scaled.
SectorState apply_harmonic(const SectorState& s, int n, Complex beta) {
  SectorState out;
  out.vac = beta * s.vac;
  auto it = s.one.find(n);
  if (it != s.one.end()) out.vac += it->second;
  for (const auto& [j, v] : s.one) out.one.emplace(j, beta * v);
  return out;
}

struct Evaluator {
  const PerturbativeAmplitudes& amps;
  const ModelParams& params;
  double t;
  SectorState psi;
  double norm;

  Evaluator(const PerturbativeAmplitudes& a, const ModelParams& p, double time)
      : amps(a), params(p), t(time), psi(transformed_sectors(a, time)), norm(psi.norm_squared()) {
    if (!(t >= 0.0)) throw ArgumentError("observables: t must be >= 0");
  }

  void check_mode(int mode) const {
    if (mode == 1) return;
    if (amps.omega_abs.find(mode) == amps.omega_abs.end()) {
      throw ArgumentError("observables: unknown mode " + std::to_string(mode));
    }
  }

  SectorState lower(const SectorState& s, int mode) const {
    if (mode == 1) return apply_driving(s, params.alpha0);
    const Complex beta = -I * t * params.chi_of(mode) * ipow(params.alpha0, mode);
    return apply_harmonic(s, mode, beta);
  }

  double photons(int mode) const {
    check_mode(mode);
    return lower(psi, mode).norm_squared() / norm;
  }

  double g2(int i, int j) const {
    check_mode(i);
    check_mode(j);
    return lower(lower(psi, i), j).norm_squared() / norm;
  }
};

void require_pair(const PerturbativeAmplitudes& amps, int n, int m) {
  if (n == m) throw ArgumentError("two-mode quantity needs n != m");
  for (int x : {n, m})
    if (amps.omega_abs.find(x) == amps.omega_abs.end()) throw ArgumentError("unknown harmonic " + std::to_string(x));
}

}  // namespace

double mean_photon_driving(const PerturbativeAmplitudes& amps, const ModelParams& params, double t) {
  return Evaluator(amps, params, t).photons(1);
}

double mean_photon_harmonic(const PerturbativeAmplitudes& amps, const ModelParams& params, int n, double t) {
  if (n == 1) throw ArgumentError("mean_photon_harmonic: mode 1 is the driving field");
  return Evaluator(amps, params, t).photons(n);
}

double coherence(const PerturbativeAmplitudes& amps, const ModelParams& params, int i, int j, double t) {
  return Evaluator(amps, params, t).g2(std::min(i, j), std::max(i, j));
}

std::optional<double> gamma(double g, double n_i, double n_j) {
  const double den = n_i * n_j;
  if (den == 0.0 || !std::isfinite(den)) return std::nullopt;
  return g / den;
}

std::optional<double> cbs_ratio(const PerturbativeAmplitudes& amps, const ModelParams& params, int n, int m,
                                double t) {
  require_pair(amps, n, m);
  Evaluator ev(amps, params, t);
  const double gnm = ev.g2(n, m), gnn = ev.g2(n, n), gmm = ev.g2(m, m);
  if (gnn == 0.0 || gmm == 0.0) return std::nullopt;
  return gnm * gnm / (gnn * gmm);
}

namespace {

// <0|rho|1> coherence of harmonic n: i t^3 Omega*_{n,0} e^{i n w t} - i t^5 sum_k Theta_k Omega*_{n,k} e^{i n w t}
Complex vacuum_one_coherence(const PerturbativeAmplitudes& amps, int n, double w, double t) {
  const double t3 = t * t * t, t5 = t3 * t * t;
  Complex s = 0.0;
  for (int k = 1; k <= amps.cutoff; ++k) s += amps.theta(k) * std::conj(amps.omega(n, k));
  return (I * t3 * std::conj(amps.omega(n, 0)) - I * t5 * s) * std::exp(I * double(n) * w * t);
}

double omega_row_sq(const PerturbativeAmplitudes& amps, int n) {
  double s = 0.0;
  for (int k = 0; k <= amps.cutoff; ++k) s += amps.omega_mag(n, k) * amps.omega_mag(n, k);
  return s;
}

double theta_sq(const PerturbativeAmplitudes& amps) {
  double s = 0.0;
  for (int k = 1; k <= amps.cutoff; ++k) s += amps.theta_mag(k) * amps.theta_mag(k);
  return s;
}

}  // namespace

DensityMatrix two_mode_density(const PerturbativeAmplitudes& amps, const ModelParams& params, int n, int m, double t) {
  require_pair(amps, n, m);
  const double w = params.omega;
  const double t2 = t * t, t4 = t2 * t2, t6 = t4 * t2;

  double others = 0.0;
  for (int j : amps.harmonics())
    if (j != n && j != m) others += omega_row_sq(amps, j);

  const double a = 1.0 + theta_sq(amps) * t4 + others * t6;
  const Complex b = vacuum_one_coherence(amps, m, w, t);
  const Complex c = vacuum_one_coherence(amps, n, w, t);
  const double d = omega_row_sq(amps, m) * t6;
  const double f = omega_row_sq(amps, n) * t6;
  Complex e = 0.0;
  for (int k = 0; k <= amps.cutoff; ++k) e += amps.omega(m, k) * std::conj(amps.omega(n, k));
  e *= t6 * std::exp(I * double(n - m) * w * t);

  CMatrix rho = CMatrix::Zero(4, 4);
  rho(0, 0) = a;
  rho(0, 1) = b;
  rho(0, 2) = c;
  rho(1, 0) = std::conj(b);
  rho(1, 1) = d;
  rho(1, 2) = e;
  rho(2, 0) = std::conj(c);
  rho(2, 1) = std::conj(e);
  rho(2, 2) = f;
  return {ModeDims{2, 2}, std::move(rho)};
}

DensityMatrix single_mode_density(const PerturbativeAmplitudes& amps, const ModelParams& params, int n, double t) {
  if (amps.omega_abs.find(n) == amps.omega_abs.end()) throw ArgumentError("unknown harmonic " + std::to_string(n));
  const double t2 = t * t, t4 = t2 * t2, t6 = t4 * t2;
  double others = 0.0;
  for (int j : amps.harmonics())
    if (j != n) others += omega_row_sq(amps, j);

  const Complex c = vacuum_one_coherence(amps, n, params.omega, t);
  CMatrix rho(2, 2);
  rho(0, 0) = 1.0 + theta_sq(amps) * t4 + others * t6;
  rho(0, 1) = c;
  rho(1, 0) = std::conj(c);
  rho(1, 1) = omega_row_sq(amps, n) * t6;
  return {ModeDims{2}, std::move(rho)};
}

double log_negativity(const DensityMatrix& rho, std::size_t transposed_mode) {
  const DensityMatrix unit = rho.normalized();
  const double e = std::log2(trace_norm(partial_transpose(unit, transposed_mode)));
  return (e < 0.0 && e > -1e-14) ? 0.0 : e;
}

double log_negativity(const PerturbativeAmplitudes& amps, const ModelParams& params, int n, int m, double t) {
  return log_negativity(two_mode_density(amps, params, n, m, t), 0);
}

std::vector<int> CorrelationReport::harmonics() const {
  std::vector<int> out;
  for (const auto& [n, v] : n_harmonic) out.push_back(n);
  return out;
}

void fill_ratios(CorrelationReport& r) {
  const auto hs = r.harmonics();
  auto photons = [&](int mode) { return mode == 1 ? r.n_driving : r.n_harmonic.at(mode); };
  r.gamma_auto.clear();
  r.gamma_cross.clear();
  r.cbs.clear();
  for (const auto& [key, g] : r.g) {
    const auto [i, j] = key;
    const auto gm = gamma(g, photons(i), photons(j));
    if (i == j)
      r.gamma_auto[i] = gm;
    else
      r.gamma_cross[key] = gm;
  }
  for (std::size_t a = 0; a < hs.size(); ++a)
    for (std::size_t b = a + 1; b < hs.size(); ++b) {
      const int n = hs[a], m = hs[b];
      const double gnn = r.g.at({n, n}), gmm = r.g.at({m, m}), gnm = r.g.at({n, m});
      r.cbs[{n, m}] = (gnn == 0.0 || gmm == 0.0) ? std::nullopt : std::optional<double>(gnm * gnm / (gnn * gmm));
    }
}

CorrelationReport correlation_report(const PerturbativeAmplitudes& amps, const ModelParams& params, double t,
                                     const ValidityThresholds& thr) {
  Evaluator ev(amps, params, t);
  CorrelationReport r;
  r.t = t;
  const auto hs = amps.harmonics();
  r.n_driving = ev.photons(1);
  for (int n : hs) r.n_harmonic[n] = ev.photons(n);

  std::vector<int> modes{1};
  modes.insert(modes.end(), hs.begin(), hs.end());
  for (std::size_t a = 0; a < modes.size(); ++a)
    for (std::size_t b = a; b < modes.size(); ++b) r.g[{modes[a], modes[b]}] = ev.g2(modes[a], modes[b]);
  fill_ratios(r);

  for (std::size_t a = 0; a < hs.size(); ++a)
    for (std::size_t b = a + 1; b < hs.size(); ++b)
      r.log_negativity[{hs[a], hs[b]}] = log_negativity(amps, params, hs[a], hs[b], t);

  r.valid = perturbative_validity(amps, t, thr).valid && r.n_driving >= 0.0;
  for (const auto& [n, v] : r.n_harmonic) r.valid = r.valid && v >= 0.0;
  return r;
}

}  // namespace hhgqo
