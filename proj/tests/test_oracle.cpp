#include <doctest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "hhgqo/cli.hpp"
#include "hhgqo/oracle.hpp"
#include "support.hpp"

using namespace hhgqo;

namespace {

ModelParams small_model(double chi = 1e-3) {
  ModelParams p;
  p.cutoff = 3;
  p.chi = {{2, chi}, {3, chi}};
  return p;
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

}  // namespace

TEST_CASE("Hamiltonian matrix elements") {
  ModelParams p = small_model();
  p.chi = {{2, 0.3}, {3, 0.2}};
  p.omega = 1.7;
  const ModeDims dims{8, 3, 3};
  const CMatrix h = build_hamiltonian(p, dims);
  CHECK(hermiticity_defect(h) == 0.0);
  for (int J = 0; J < 8; ++J) {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const std::vector<int> lv{J, a, b};
        const auto i = dims.flatten(lv);
        CHECK(std::abs(h(i, i) - p.omega * (J + 2 * a + 3 * b)) < 1e-12);
      }
    for (int n : {2, 3}) {
      if (J < n) continue;
      const std::vector<int> from{J, 0, 0};
      std::vector<int> to{J - n, 0, 0};
      to[n - 1] = 1;
      const Complex el = h(dims.flatten(to), dims.flatten(from));
      CHECK(std::abs(el - p.chi.at(n) * std::sqrt(factorial(J) / factorial(J - n))) < 1e-12);
    }
  }
  // only number-conserving couplings
  const CVector exc = excitation_number_diagonal(p, dims);
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j)
      if (h(i, j) != Complex(0.0)) CHECK(exc(i) == exc(j));
}

TEST_CASE("capacity limit and configuration validation") {
  const ModelParams p = small_model();
  CHECK_THROWS_AS(build_hamiltonian(p, ModeDims{1024, 3, 3}), CapacityError);
  CHECK_THROWS_AS(build_hamiltonian(p, ModeDims{16, 3}), ArgumentError);
  OracleConfig cfg;
  cfg.tolerance = 0.1;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  cfg = {};
  cfg.alarm_threshold = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ArgumentError);
}

TEST_CASE("coherent initial state and free evolution") {
  const Complex a0(0.4, -0.9);
  const ModeDims dims{24, 2, 2};
  const auto init = coherent_initial_state(a0, dims);
  CHECK(std::abs(init.psi.norm_squared() - 1.0) < 1e-14);
  double kept = 0.0;
  for (int k = 0; k < 24; ++k) kept += std::exp(-std::norm(a0)) * std::pow(std::norm(a0), k) / factorial(k);
  CHECK(std::abs(init.tail_mass - (1.0 - kept)) < 1e-15);

  ModelParams p = small_model(0.0);
  p.alpha0 = a0;
  const CMatrix h = build_hamiltonian(p, dims);
  CHECK(h.isDiagonal());
  const double t = 2.3;
  const auto ref = coherent_initial_state(a0 * std::exp(Complex(0, -t)), dims);
  const auto ode = evolve_ode(h, init.psi, t, OracleConfig{dims}, p.omega);
  const auto ex = evolve_expm(h, init.psi, t, OracleConfig{dims});
  CHECK(fidelity(ode.psi.amplitudes, ref.psi.amplitudes) > 1 - 1e-12);
  CHECK(fidelity(ex.psi.amplitudes, ref.psi.amplitudes) > 1 - 1e-12);
}

TEST_CASE("ODE and spectral propagators agree") {
  for (int trial = 0; trial < 10; ++trial) {
    ModelParams p;
    p.cutoff = 3;
    p.alpha0 = std::polar(test::uniform(0.3, 1.2), test::uniform(-3.0, 3.0));
    p.omega = test::uniform(0.5, 2.0);
    p.chi = {{2, test::uniform(0.0, 0.1)}, {3, test::uniform(0.0, 0.1)}};
    const ModeDims dims{8, 2, 2};
    OracleConfig cfg{dims};
    cfg.alarm_threshold = 1e-3;
    const CMatrix h = build_hamiltonian(p, dims);
    const auto init = coherent_initial_state(p.alpha0, dims);
    const double t = test::cycles(test::uniform(0.1, 1.5), p.omega);
    const auto a = evolve_ode(h, init.psi, t, cfg, p.omega);
    const auto b = evolve_expm(h, init.psi, t, cfg);
    CHECK(fidelity(a.psi.amplitudes, b.psi.amplitudes) > 1 - 1e-10);
    CHECK(a.steps > 0);
  }
}

TEST_CASE("conservation of energy, excitation number and norm") {
  ModelParams p = small_model(0.05);
  p.alpha0 = Complex(0.2, -1.1);
  const ModeDims dims{16, 3, 3};
  OracleConfig cfg{dims};
  const CMatrix h = build_hamiltonian(p, dims);
  const CVector exc = excitation_number_diagonal(p, dims);
  const auto init = coherent_initial_state(p.alpha0, dims);
  const auto c0 = conserved_quantities(h, exc, init.psi);
  for (double c : {0.5, 1.0, 1.5}) {
    const auto r = evolve_ode(h, init.psi, test::cycles(c), cfg, p.omega);
    const auto c1 = conserved_quantities(h, exc, r.psi);
    CHECK(test::rel_err(c1.energy, c0.energy) < 1e-8);
    CHECK(test::rel_err(c1.excitation, c0.excitation) < 1e-8);
    CHECK(std::abs(c1.norm - 1.0) < 1e-8);
  }
}

TEST_CASE("oracle observables are stable under enlarging the driving mode") {
  const ModelParams p = small_model();
  const double t = test::cycles(1.5);
  auto run = [&](ModeDims dims) {
    const CMatrix h = build_hamiltonian(p, dims);
    const auto init = coherent_initial_state(p.alpha0, dims);
    return oracle_observables(evolve_expm(h, init.psi, t, OracleConfig{dims}).psi, p);
  };
  const auto a = run(ModeDims{16, 3, 3});
  const auto b = run(ModeDims{32, 3, 3});
  CHECK(test::rel_err(a.n_driving, b.n_driving) < 1e-6);
  for (const auto& [n, v] : a.n_harmonic) CHECK(test::rel_err(v, b.n_harmonic.at(n)) < 1e-6);
  for (const auto& [k, v] : a.g) CHECK(test::rel_err(v, b.g.at(k)) < 1e-6);
}

TEST_CASE("truncation alarm") {
  ModelParams p = small_model(0.4);
  p.alpha0 = Complex(0.0, -1.5);
  const ModeDims dims{8, 2, 2};
  OracleConfig cfg{dims};
  cfg.alarm_threshold = 1e-6;
  const CMatrix h = build_hamiltonian(p, dims);
  const auto init = coherent_initial_state(p.alpha0, dims);
  const auto r = evolve_expm(h, init.psi, test::cycles(1.0), cfg);
  CHECK(r.truncation_alarm);
  CHECK(r.top_population > 1e-6);
  CHECK(top_level_population(r.psi) == r.top_population);
}

TEST_CASE("closed forms track the oracle at weak coupling") {
  const ModelParams p = small_model();
  const auto amps = compute_amplitudes(p);
  const ModeDims dims{16, 3, 3};
  const CMatrix h = build_hamiltonian(p, dims);
  const auto init = coherent_initial_state(p.alpha0, dims);
  const SpectralPropagator prop(h);
  for (double c : {0.5, 1.0, 1.5}) {
    const double t = test::cycles(c);
    const FockState psi(dims, prop.apply(init.psi.amplitudes, t));
    const auto o = oracle_observables(psi, p);
    const auto cf = correlation_report(amps, p, t);
    CHECK(test::rel_err(o.n_driving, cf.n_driving) < 1e-2);
    for (const auto& [n, v] : cf.n_harmonic) CHECK(test::rel_err(o.n_harmonic.at(n), v) < 1e-2);
    for (const auto& [k, v] : cf.g) CHECK(test::rel_err(o.g.at(k), v) < 1e-2);
    CHECK(test::rel_err(*o.cbs.at({2, 3}), *cf.cbs.at({2, 3})) < 1e-2);
  }
}

TEST_CASE("frame change undoes the lab-frame assembly") {
  ModelParams p = small_model(0.01);
  p.alpha0 = Complex(0.3, -0.8);
  const auto amps = compute_amplitudes(p);
  const double t = 1.1;
  const ModeDims dims{30, 6, 6};
  const FockState lab = assemble_state_secondorder(amps, p, t, dims, Frame::Lab);
  const FockState tr = assemble_state_secondorder(amps, p, t, dims, Frame::Transformed);
  const FockState back = to_transformed_frame(lab, p, t);
  CHECK((back.amplitudes - tr.amplitudes).norm() < 1e-10);
}

TEST_CASE("oracle output matches the frozen fixture") {
  std::ifstream in(std::string(HHGQO_FIXTURE_DIR) + "/oracle_fixture.csv");
  REQUIRE(in.good());
  cli::KeyValueConfig kv;
  kv.set("chi.table", "2:1e-3,3:1e-3");
  kv.set("model.cutoff", "3");
  kv.set("model.harmonics", "2,3");
  std::ostringstream out;
  CHECK(cli::cmd_oracle(cli::resolve(kv), out) == cli::kOk);

  auto rows = [](std::istream& s) {
    std::vector<std::vector<std::string>> r;
    std::string line;
    while (std::getline(s, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::vector<std::string> cells;
      std::stringstream ls(line);
      std::string cell;
      while (std::getline(ls, cell, ',')) cells.push_back(cell);
      r.push_back(cells);
    }
    return r;
  };
  std::istringstream fresh(out.str());
  const auto want = rows(in), got = rows(fresh);
  REQUIRE(want.size() == got.size());
  CHECK(want.front() == got.front());
  for (std::size_t i = 1; i < want.size(); ++i) {
    REQUIRE(want[i].size() == got[i].size());
    CHECK(want[i][0] == got[i][0]);
    CHECK(want[i][1] == got[i][1]);
    for (std::size_t c : {2u, 3u}) {
      const double a = std::stod(want[i][c]), b = std::stod(got[i][c]);
      CHECK(std::abs(a - b) <= 1e-9 * std::max(std::abs(a), 1e-12));
    }
  }
}
