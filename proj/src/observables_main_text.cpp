// Magnitude-only forms valid for alpha0 = -i|alpha0|, where
// Theta_k = (-i)^k |Theta_k| and Omega_{n,k} = (-i)^{n+k} |Omega_{n,k}|.

#include <cmath>

#include "hhgqo/observables.hpp"

namespace hhgqo::main_text {

namespace {

struct Mags {
  const PerturbativeAmplitudes& amps;
  const ModelParams& params;
  int N;
  double a;
  std::vector<int> hs;
  double nrm;

  Mags(const PerturbativeAmplitudes& am, const ModelParams& p, double t)
      : amps(am), params(p), N(am.cutoff), a(p.alpha0_abs()), hs(am.harmonics()), nrm(norm_squared(am, t)) {
    if (am.convention != PhaseConvention::MinusI) {
      throw ArgumentError("main_text: forms require alpha0 = -i|alpha0|");
    }
  }

  double T(int k) const { return amps.theta_mag(k); }
  double O(int j, int k) const { return amps.omega_mag(j, k); }
  double chi(int n) const {
    if (amps.omega_abs.find(n) == amps.omega_abs.end()) throw ArgumentError("main_text: unknown harmonic");
    return params.chi_of(n);
  }
};

double sq(double x) { return x * x; }

double driving(const Mags& m, double t) {
  const double a = m.a, t2 = t * t, t4 = t2 * t2, t6 = t4 * t2;
  double s4 = 0.0, s6 = 0.0;
  for (int k = 1; k <= m.N; ++k) s4 += k * sq(m.T(k)) + 2.0 * std::sqrt(k + 1.0) * a * m.T(k) * m.T(k + 1);
  for (int j : m.hs)
    for (int k = 0; k <= m.N; ++k) s6 += k * sq(m.O(j, k)) + 2.0 * std::sqrt(k + 1.0) * a * m.O(j, k) * m.O(j, k + 1);
  return a * a + (-2.0 * m.T(1) * a * t2 + s4 * t4 + s6 * t6) / m.nrm;
}

double harmonic(const Mags& m, int n, double t) {
  const double c = m.chi(n), an = std::pow(m.a, n);
  const double t2 = t * t, t4 = t2 * t2, t6 = t4 * t2;
  double row = 0.0, cross = 0.0;
  for (int k = 0; k <= m.N; ++k) row += sq(m.O(n, k));
  for (int k = 1; k <= m.N; ++k) cross += m.T(k) * m.O(n, k);
  return c * c * an * an * t2 + (2.0 * c * an * m.O(n, 0) * t4 + (row - 2.0 * c * an * cross) * t6) / m.nrm;
}

double g11(const Mags& m, double t) {
  const double a = m.a, a2 = a * a, t2 = t * t, t4 = t2 * t2, t6 = t4 * t2;
  double s = -2.0 * std::sqrt(2.0) * a2 * (m.T(2) + std::sqrt(2.0) * a * m.T(1)) * t2;
  for (int k = 1; k <= m.N; ++k) {
    s += m.T(k) * (m.T(k) * (k * (k - 1 + 4.0 * a2)) + 4.0 * a2 * a * std::sqrt(k + 1.0) * m.T(k + 1)) * t4;
    s += 2.0 * std::sqrt((k + 1.0) * (k + 2.0)) * a2 * m.T(k) * m.T(k + 2) * t4;
  }
  for (int k = 0; k <= m.N; ++k) s += 4.0 * k * std::sqrt(k + 1.0) * a * m.T(k) * m.T(k + 1) * t4;
  for (int j : m.hs)
    for (int k = 0; k <= m.N; ++k) {
      const double o = m.O(j, k), o1 = m.O(j, k + 1), o2 = m.O(j, k + 2);
      s += (o * o * (k * (k - 1.0) + 4.0 * a2 * k) + 4.0 * a2 * a * std::sqrt(k + 1.0) * o * o1 +
            2.0 * std::sqrt((k + 1.0) * (k + 2.0)) * a2 * o * o2 + 4.0 * k * std::sqrt(k + 1.0) * a * o1 * o) *
           t6;
    }
  return a2 * a2 + s / m.nrm;
}

double gnn(const Mags& m, int n, double t) {
  const double c = m.chi(n), an = std::pow(m.a, n);
  const double t2 = t * t, t4 = t2 * t2, t6 = t4 * t2, t8 = t6 * t2;
  double row = 0.0, cross = 0.0;
  for (int k = 0; k <= m.N; ++k) row += sq(m.O(n, k));
  for (int k = 1; k <= m.N; ++k) cross += m.O(n, k) * m.T(k);
  const double c2a2 = c * c * an * an;
  return c2a2 * c2a2 * t4 +
         (4.0 * c2a2 * c * an * m.O(n, 0) * t6 + (4.0 * c2a2 * row - 4.0 * c2a2 * c * an * cross) * t8) / m.nrm;
}

double g1n(const Mags& m, int n, double t) {
  const double c = m.chi(n), a = m.a, an = std::pow(a, n);
  const double t2 = t * t, t4 = t2 * t2, t6 = t4 * t2, t8 = t6 * t2;
  double cross = 0.0, cross_shift = 0.0, row_weighted = 0.0, cross_k = 0.0, ladder = 0.0, up = 0.0;
  for (int k = 1; k <= m.N; ++k) cross += m.T(k) * m.O(n, k);
  for (int k = 2; k <= m.N; ++k) cross_shift += std::sqrt(double(k)) * m.T(k - 1) * m.O(n, k);
  for (int k = 0; k <= m.N; ++k) {
    row_weighted += sq(m.O(n, k)) * (k + a * a);
    ladder += std::sqrt(k + 1.0) * a * m.O(n, k) * m.O(n, k + 1);
    up += std::sqrt(k + 1.0) * m.T(k + 1) * m.O(n, k);
  }
  for (int k = 1; k <= m.N; ++k) cross_k += k * m.T(k) * m.O(n, k);

  double theta_num = 0.0, omega_num = 0.0, theta_lad = 0.0, omega_lad = 0.0;
  for (int k = 1; k <= m.N; ++k) {
    theta_num += k * sq(m.T(k));
    theta_lad += std::sqrt(k + 1.0) * m.T(k) * m.T(k + 1);
  }
  for (int j : m.hs)
    for (int k = 0; k <= m.N; ++k) {
      omega_num += k * sq(m.O(j, k));
      omega_lad += std::sqrt(k + 1.0) * m.O(j, k) * m.O(j, k + 1);
    }

  const double s = -2.0 * c * c * an * an * a * m.T(1) * t4 +
                   2.0 * c * an * a * a * (m.O(n, 0) * t4 - cross * t6) +
                   2.0 * c * an * a * (m.O(n, 1) * t4 - cross_shift * t6) + row_weighted * t6 -
                   2.0 * c * an * cross_k * t6 + 2.0 * ladder * t6 +
                   c * c * an * an * (theta_num * t6 + omega_num * t8) - 2.0 * c * an * a * up * t6 +
                   2.0 * c * c * an * an * a * (theta_lad * t6 + omega_lad * t8);
  return c * c * an * an * a * a * t2 + s / m.nrm;
}

double gnm(const Mags& m, int n, int k_m, double t) {
  const double cn = m.chi(n), cm = m.chi(k_m);
  const double an = std::pow(m.a, n), am = std::pow(m.a, k_m);
  const double t2 = t * t, t4 = t2 * t2, t6 = t4 * t2, t8 = t6 * t2;
  double overlap = 0.0, rows = 0.0, cross_n = 0.0, cross_m = 0.0;
  for (int k = 0; k <= m.N; ++k) {
    overlap += m.O(k_m, k) * m.O(n, k);
    rows += sq(m.O(n, k)) * cm * cm * am * am + sq(m.O(k_m, k)) * cn * cn * an * an;
  }
  for (int k = 1; k <= m.N; ++k) {
    cross_n += m.O(n, k) * m.T(k);
    cross_m += m.O(k_m, k) * m.T(k);
  }
  const double s = 2.0 * (cn * cm * cm * am * am * an * m.O(n, 0) + cn * cn * cm * an * an * am * m.O(k_m, 0)) * t6 +
                   2.0 * cn * cm * an * am * overlap * t8 + rows * t8 -
                   2.0 * cn * cm * cm * am * am * an * cross_n * t8 - 2.0 * cm * cn * cn * an * an * am * cross_m * t8;
  return cn * cn * cm * cm * an * an * am * am * t4 + s / m.nrm;
}

}  // namespace

double mean_photon_driving(const PerturbativeAmplitudes& amps, const ModelParams& params, double t) {
  return driving(Mags(amps, params, t), t);
}

double mean_photon_harmonic(const PerturbativeAmplitudes& amps, const ModelParams& params, int n, double t) {
  return harmonic(Mags(amps, params, t), n, t);
}

double coherence(const PerturbativeAmplitudes& amps, const ModelParams& params, int i, int j, double t) {
  const Mags m(amps, params, t);
  if (i > j) std::swap(i, j);
  if (i == 1 && j == 1) return g11(m, t);
  if (i == 1) return g1n(m, j, t);
  if (i == j) return gnn(m, i, t);
  return gnm(m, i, j, t);
}

}  // namespace hhgqo::main_text
