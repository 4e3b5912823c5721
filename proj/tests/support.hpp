#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "hhgqo/fock.hpp"
#include "hhgqo/model.hpp"

namespace hhgqo::test {

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611);
  return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }
inline int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng()); }

inline CVector random_vector(Eigen::Index n) {
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(uniform(-1, 1), uniform(-1, 1));
  return v;
}

inline CMatrix random_hermitian(Eigen::Index n) {
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(uniform(-1, 1), uniform(-1, 1));
  return 0.5 * (m + m.adjoint());
}

/// Random mixed state of unit trace.
inline CMatrix random_density(Eigen::Index n) {
  CMatrix g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = Complex(uniform(-1, 1), uniform(-1, 1));
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

/// Random parameter draw inside the perturbative domain.
inline ModelParams random_params(int max_cutoff = 6, double max_alpha = 2.0, double max_chi = 0.05) {
  ModelParams p;
  p.cutoff = uniform_int(3, max_cutoff);
  p.alpha0 = std::polar(uniform(0.3, max_alpha), uniform(-3.1, 3.1));
  p.omega = uniform(0.5, 2.0);
  for (int n = 2; n <= p.cutoff; ++n)
    if (uniform(0, 1) < 0.7 || n == p.cutoff) p.chi[n] = uniform(0.0, max_chi) / std::pow(std::abs(p.alpha0), n - 1);
  return p;
}

/// |alpha0| = 1, chi_3 = 0.02, chi_n = sqrt(C/n) p^n with p = 0.3, odd harmonics to N = 11.
inline ModelParams perturbative_figure_params() {
  ModelParams p;
  p.cutoff = 11;
  for (int n = 3; n <= 11; n += 2) p.chi[n] = 0.02 * std::pow(0.3, n - 3) * std::sqrt(3.0 / n);
  return p;
}

/// |alpha0| = sqrt(20), chi_3 = 2e-4, chi_n |alpha0|^n sqrt(n) fixed, odd harmonics to N = 11.
inline ModelParams plateau_figure_params() {
  ModelParams p;
  const double a = std::sqrt(20.0);
  p.alpha0 = Complex(0.0, -a);
  p.cutoff = 11;
  for (int n = 3; n <= 11; n += 2) p.chi[n] = 2e-4 * std::pow(a, 3 - n) * std::sqrt(3.0 / n);
  return p;
}

/// |alpha0| = 100, chi_n = 1/(sqrt(n) |alpha0|^n), every harmonic 3..10.
inline ModelParams wigner_figure_params() {
  ModelParams p;
  p.alpha0 = Complex(0.0, -100.0);
  p.cutoff = 10;
  for (int n = 3; n <= 10; ++n) p.chi[n] = 1.0 / (std::sqrt(double(n)) * std::pow(100.0, n));
  return p;
}

inline double cycles(double c, double omega = 1.0) { return c * 2.0 * std::numbers::pi / omega; }

inline double rel_err(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace hhgqo::test
