#include <cmath>
#include <numbers>

#include "hhgqo/fock.hpp"

namespace hhgqo {

namespace {

constexpr double kRescaleAbove = 1e200;

// w * L_k^{(a)}(x) for k = 0..n_max. The weight is folded into the seed so that
// exp(-x/2) * L stays representable when L alone would overflow; the running
// pair is rescaled whenever it grows past kRescaleAbove.
std::vector<double> weighted_laguerre(int n_max, double a, double x, double weight) {
  std::vector<double> out(static_cast<std::size_t>(n_max + 1));
  std::vector<int> rescales(out.size(), 0);
  double prev = 0.0, cur = weight;
  int scale = 0;
  out[0] = cur;
  if (n_max >= 1) {
    prev = cur;
    cur = weight * (1.0 + a - x);
    out[1] = cur;
  }
  for (int k = 1; k < n_max; ++k) {
    const double next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescaleAbove) {
      cur /= kRescaleAbove;
      prev /= kRescaleAbove;
      ++scale;
    }
    out[static_cast<std::size_t>(k + 1)] = cur;
    rescales[static_cast<std::size_t>(k + 1)] = scale;
  }
  for (std::size_t k = 0; k < out.size(); ++k)
    for (int s = 0; s < rescales[k]; ++s) out[k] *= kRescaleAbove;
  return out;
}

Complex ipow(Complex base, int e) {
  Complex r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

double PhaseSpaceGrid::q(int i) const {
  return q_points > 1 ? q_min + (q_max - q_min) * i / (q_points - 1) : q_min;
}

double PhaseSpaceGrid::p(int j) const {
  return p_points > 1 ? p_min + (p_max - p_min) * j / (p_points - 1) : p_min;
}

std::vector<double> laguerre_table(int n_max, double a, double x) {
  if (n_max < 0) throw ArgumentError("laguerre_table: n_max must be >= 0");
  return weighted_laguerre(n_max, a, x, 1.0);
}

Complex displacement_element(int n, int m, Complex beta) {
  if (n < 0 || m < 0) throw ArgumentError("displacement_element: negative level");
  const double x = std::norm(beta);
  const int lo = std::min(n, m), diff = std::abs(m - n);
  const double lag = weighted_laguerre(lo, diff, x, std::exp(-0.5 * x))[static_cast<std::size_t>(lo)];
  // sqrt(lo!/hi!) via the ratio of sqrt-factorials
  const double ratio = sqrt_factorial(lo) / sqrt_factorial(lo + diff);
  const Complex base = m >= n ? -std::conj(beta) : beta;
  return ratio * ipow(base, diff) * lag;
}

RMatrix wigner(const CMatrix& op, const PhaseSpaceGrid& grid) {
  if (op.rows() != op.cols()) throw DimensionError("wigner: operator must be square");
  if (grid.q_points < 1 || grid.p_points < 1 || !std::isfinite(grid.q_min) || !std::isfinite(grid.q_max) ||
      !std::isfinite(grid.p_min) || !std::isfinite(grid.p_max)) {
    throw ArgumentError("wigner: grid must be finite and nonempty");
  }
  const int dim = static_cast<int>(op.rows());
  RMatrix field(grid.q_points, grid.p_points);
  std::vector<std::vector<double>> lag(static_cast<std::size_t>(dim));
  double max_imag = 0.0, max_abs = 0.0;

  for (int i = 0; i < grid.q_points; ++i) {
    for (int j = 0; j < grid.p_points; ++j) {
      // beta = 2 alpha, alpha = (q + i p)/sqrt(2)
      const Complex beta = std::numbers::sqrt2 * Complex(grid.q(i), grid.p(j));
      const double x = std::norm(beta);
      const double w = std::exp(-0.5 * x);
      for (int d = 0; d < dim; ++d) lag[static_cast<std::size_t>(d)] = weighted_laguerre(dim - 1 - d, d, x, w);

      Complex acc = 0.0;
      for (int m = 0; m < dim; ++m) {
        const double parity = (m % 2 == 0) ? 1.0 : -1.0;
        for (int n = 0; n < dim; ++n) {
          const Complex rho_mn = op(m, n);
          if (rho_mn == Complex{}) continue;
          const int lo = std::min(n, m), diff = std::abs(m - n);
          const double ratio = sqrt_factorial(lo) / sqrt_factorial(lo + diff);
          const Complex base = m >= n ? -std::conj(beta) : beta;
          const Complex d_nm = ratio * ipow(base, diff) * lag[static_cast<std::size_t>(diff)][static_cast<std::size_t>(lo)];
          acc += rho_mn * parity * d_nm;
        }
      }
      acc /= std::numbers::pi;
      field(i, j) = acc.real();
      max_imag = std::max(max_imag, std::abs(acc.imag()));
      max_abs = std::max(max_abs, std::abs(acc));
    }
  }
  if (hermiticity_defect(op) <= 1e-10 && max_imag > 1e-10 * std::max(1.0, max_abs)) {
    throw ValidationError("wigner: non-real result for a Hermitian input");
  }
  return field;
}

RMatrix wigner(const DensityMatrix& rho, const PhaseSpaceGrid& grid) {
  if (rho.dims().modes() != 1) throw DimensionError("wigner: single-mode density matrix required");
  return wigner(rho.data(), grid);
}

double integrate(const RMatrix& field, const PhaseSpaceGrid& grid) {
  if (field.rows() != grid.q_points || field.cols() != grid.p_points) throw ShapeError("integrate: field/grid mismatch");
  auto weight = [](int i, int n) { return (n > 1 && (i == 0 || i == n - 1)) ? 0.5 : 1.0; };
  double sum = 0.0;
  for (int i = 0; i < grid.q_points; ++i)
    for (int j = 0; j < grid.p_points; ++j) sum += weight(i, grid.q_points) * weight(j, grid.p_points) * field(i, j);
  return sum * grid.dq() * grid.dp();
}

}  // namespace hhgqo
