#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>
#include <cmath>
#include <numbers>

#include "hhgqo/model.hpp"
#include "support.hpp"

using namespace hhgqo;
namespace mp = boost::multiprecision;
using Big = mp::cpp_bin_float_50;
using BigC = mp::cpp_complex_50;

namespace {

// Theta and Omega for arbitrary complex alpha0, straight from the defining
// double sums in 50-digit arithmetic.
struct BigAmplitudes {
  std::vector<BigC> theta;
  std::map<int, std::vector<BigC>> omega;
};

Big big_factorial(int k) {
  Big f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

Big big_binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  return big_factorial(n) / (big_factorial(k) * big_factorial(n - k));
}

BigAmplitudes big_oracle(const ModelParams& p) {
  const int N = p.cutoff;
  const BigC a0(Big(p.alpha0.real()), Big(p.alpha0.imag()));
  const Big abs2 = mp::norm(a0);
  BigAmplitudes out;
  out.theta.assign(N + 2, BigC(0));
  for (int k = 1; k <= N; ++k) {
    BigC s = 0;
    for (int n = std::max(2, k); n <= N; ++n) {
      const Big chi = Big(p.chi_of(n));
      s += big_binomial(n, k) * chi * chi * mp::pow(abs2, n) / 2 * mp::sqrt(big_factorial(k)) / mp::pow(mp::conj(a0), k);
    }
    out.theta[k] = s;
  }
  for (int n : p.harmonics()) {
    std::vector<BigC> row(N + 1, BigC(0));
    const Big chi = Big(p.chi_of(n));
    for (int kp = 0; kp <= N; ++kp) {
      BigC s = 0;
      for (int k = 1; k <= N; ++k) {
        if (k + kp > N) continue;
        s += chi * big_binomial(n, k) * mp::pow(a0, n - k) *
             mp::sqrt(big_factorial(k + kp) / big_factorial(kp)) * out.theta[k + kp] / 3;
      }
      row[kp] = s;
    }
    out.omega[n] = row;
  }
  return out;
}

double rel(Complex got, const BigC& ref) {
  const double r = std::abs(Complex(double(ref.real()), double(ref.imag())));
  const double d = std::abs(got - Complex(double(ref.real()), double(ref.imag())));
  return r == 0.0 ? d : d / r;
}

ModelParams fig2_like() {
  ModelParams p;
  p.alpha0 = Complex(0.0, -1.0);
  p.cutoff = 5;
  p.chi = {{3, 0.02}, {5, 0.02 * 0.3 * 0.3}};
  return p;
}

}  // namespace

TEST_CASE("Theta and Omega agree with a 50-digit oracle on random draws") {
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    ModelParams p;
    p.cutoff = test::uniform_int(2, 11);
    p.alpha0 = std::polar(test::uniform(0.1, 10.0), test::uniform(-3.14, 3.14));
    for (int n = 2; n <= p.cutoff; ++n)
      if (test::uniform(0, 1) < 0.6 || n == p.cutoff) p.chi[n] = test::uniform(0.0, 0.1);
    const auto amps = compute_amplitudes(p);
    const auto big = big_oracle(p);
    for (int k = 1; k <= p.cutoff; ++k) worst = std::max(worst, rel(amps.theta(k), big.theta[k]));
    for (int n : p.harmonics())
      for (int k = 0; k <= p.cutoff; ++k) worst = std::max(worst, rel(amps.omega(n, k), big.omega.at(n)[k]));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("Theta magnitudes for the perturbative N = 5 example") {
  const ModelParams p = fig2_like();
  const auto th = compute_theta(p);
  const auto big = big_oracle(p);
  for (int k = 1; k <= 5; ++k) CHECK(rel(Complex(th[k]), BigC(mp::abs(big.theta[k]))) < 1e-14);
  // k = 5 collapses to one term: sqrt(5!)/2 chi_5^2 |alpha0|^5
  CHECK(test::rel_err(th[5], std::sqrt(120.0) / 2 * std::pow(0.02 * 0.09, 2)) < 1e-15);
  // alpha0 = -i|alpha0| phases
  const auto amps = compute_amplitudes(p);
  CHECK(amps.convention == PhaseConvention::MinusI);
  for (int k = 1; k <= 5; ++k) {
    Complex phase = 1.0;
    for (int i = 0; i < k; ++i) phase *= Complex(0, -1);
    CHECK(std::abs(amps.theta(k) - phase * th[k]) < 1e-15 * th[k] + 1e-300);
  }
}

TEST_CASE("vanishing susceptibilities give vanishing amplitudes") {
  ModelParams p;
  p.cutoff = 4;
  p.chi = {{2, 0.0}, {3, 0.0}, {4, 0.0}};
  const auto amps = compute_amplitudes(p);
  for (int k = 1; k <= 4; ++k) CHECK(amps.theta_mag(k) == 0.0);
  for (int n : {2, 3, 4})
    for (int k = 0; k <= 4; ++k) CHECK(amps.omega_mag(n, k) == 0.0);

  // a single zero row
  p.chi = {{2, 0.05}, {3, 0.0}, {4, 0.02}};
  const auto a2 = compute_amplitudes(p);
  for (int k = 0; k <= 4; ++k) CHECK(a2.omega_mag(3, k) == 0.0);
  // |Theta_k| = 0 when every chi_n with n >= max(2,k) vanishes
  p.chi = {{2, 0.05}, {3, 0.01}, {4, 0.0}};
  CHECK(compute_theta(p)[4] == 0.0);
}

TEST_CASE("compute_omega rejects a mismatched theta") {
  const ModelParams p = fig2_like();
  std::vector<double> theta(3, 0.0);
  CHECK_THROWS_AS(compute_omega(p, theta), ArgumentError);
}

TEST_CASE("parameter validation") {
  ModelParams p = fig2_like();
  p.chi[7] = 0.1;
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  p = fig2_like();
  p.chi[3] = -0.1;
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  p = fig2_like();
  p.alpha0 = 0.0;
  CHECK_THROWS_AS(p.validate(), ArgumentError);
  p = fig2_like();
  p.cutoff = 1;
  CHECK_THROWS_AS(p.validate(), ArgumentError);
}

TEST_CASE("Theta scaling under alpha0 -> xi alpha0, chi_n -> chi_n / xi^n") {
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams p = test::random_params(8, 3.0, 0.05);
    const double xi = test::uniform(0.2, 5.0);
    ModelParams q = p;
    q.alpha0 *= xi;
    for (auto& [n, c] : q.chi) c /= std::pow(xi, n);
    const auto a = compute_theta(p), b = compute_theta(q);
    for (int k = 1; k <= p.cutoff; ++k) CHECK(std::abs(b[k] - a[k] / std::pow(xi, k)) <= 1e-13 * a[k] / std::pow(xi, k) + 1e-300);
  }
}

TEST_CASE("Omega is nondecreasing in every chi_n") {
  for (int trial = 0; trial < 20; ++trial) {
    const ModelParams p = test::random_params(7, 2.0, 0.05);
    const auto base = compute_amplitudes(p);
    for (const auto& [n, c] : p.chi) {
      ModelParams q = p;
      q.chi[n] = c + 1e-4;
      const auto bumped = compute_amplitudes(q);
      for (int j : p.harmonics())
        for (int k = 0; k <= p.cutoff; ++k) CHECK(bumped.omega_mag(j, k) - base.omega_mag(j, k) >= -1e-12);
    }
  }
}

TEST_CASE("norm polynomial: value, monotonicity, literal inner product") {
  for (int trial = 0; trial < 30; ++trial) {
    const ModelParams p = test::random_params();
    const auto amps = compute_amplitudes(p);
    CHECK(norm_squared(amps, 0.0) == 1.0);
    double prev = 1.0;
    for (double t = 0.0; t <= 10.0; t += 0.5) {
      const double n = norm_squared(amps, t);
      CHECK(n >= prev);
      prev = n;
    }
    const double t = test::uniform(0.0, 8.0);
    const FockState psi = assemble_state_secondorder(amps, p, t, default_state_dims(p));
    CHECK(test::rel_err(psi.norm_squared(), norm_squared(amps, t)) < 1e-12);
  }
}

TEST_CASE("zeroth-order amplitudes") {
  ModelParams p;
  p.alpha0 = Complex(0.0, -1.0);
  p.cutoff = 3;
  p.chi = {{3, 0.02}};
  const auto z0 = zeroth_order_state(p, 0.0);
  CHECK(z0.harmonics.at(3) == Complex(0.0));
  const double t = 3 * std::numbers::pi;
  const auto z = zeroth_order_state(p, t);
  CHECK(std::abs(std::norm(z.harmonics.at(3)) - 0.0004 * t * t) < 1e-15);
  CHECK(std::abs(std::norm(z.harmonics.at(3)) - 3.5530575843921691e-02) < 1e-15);
  CHECK(std::abs(z.driving - p.alpha0 * std::exp(Complex(0, -t))) < 1e-15);
}

TEST_CASE("assembled state: vacuum at t = 0, truncation errors, term layout") {
  const ModelParams p = fig2_like();
  const auto amps = compute_amplitudes(p);
  const ModeDims dims = default_state_dims(p);
  const FockState v = assemble_state_secondorder(amps, p, 0.0, dims);
  CHECK((v.amplitudes - FockState::vacuum(dims).amplitudes).norm() == 0.0);

  CHECK_THROWS_AS(assemble_state_secondorder(amps, p, 1.0, ModeDims{5, 2, 2}), TruncationError);
  CHECK_THROWS_AS(assemble_state_secondorder(amps, p, 1.0, ModeDims{7, 2}), TruncationError);

  const double t = 1.3, w = p.omega;
  const FockState psi = assemble_state_secondorder(amps, p, t, dims);
  const std::vector<int> lv{2, 0, 0}, lv1{4, 0, 1};
  CHECK(std::abs(psi.at(lv) + amps.theta(2) * t * t * std::exp(Complex(0, -2 * w * t))) < 1e-15);
  CHECK(std::abs(psi.at(lv1) - Complex(0, -1) * amps.omega(5, 4) * t * t * t * std::exp(Complex(0, -9 * w * t))) <
        1e-15);
}

TEST_CASE("lab frame is the displaced transformed state") {
  const ModelParams p = fig2_like();
  const auto amps = compute_amplitudes(p);
  const double t = 0.8;
  const ModeDims dims{30, 6, 6};
  const FockState lab = assemble_state_secondorder(amps, p, t, dims, Frame::Lab);
  const FockState tr = assemble_state_secondorder(amps, p, t, dims, Frame::Transformed);
  // displacement is unitary up to truncation of the small displaced tails
  CHECK(test::rel_err(lab.norm_squared(), tr.norm_squared()) < 1e-10);
  // <A> in the lab frame is alpha(t) at leading order
  const CVector a_psi = apply_on_mode(annihilation(30), 0, dims, lab.amplitudes);
  const Complex mean_a = lab.amplitudes.dot(a_psi) / lab.norm_squared();
  CHECK(std::abs(mean_a - zeroth_order_state(p, t).driving) < 1e-2);
}

TEST_CASE("validity flag trips for large chi t") {
  ModelParams p = fig2_like();
  StateSecondOrder small(p, 0.1);
  CHECK(small.validity.valid);
  p.chi[3] = 0.5;
  StateSecondOrder big(p, 20.0);
  CHECK_FALSE(big.validity.valid);
  CHECK(big.validity.max_theta_t2 > 0.3);
  CHECK_THROWS_AS(StateSecondOrder(p, -1.0), ArgumentError);
}
