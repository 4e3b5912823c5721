#include "hhgqo/fitting.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <sstream>

namespace hhgqo {

void SusceptibilityModel::validate() const {
  if (const auto* p = std::get_if<PerturbativeRegime>(&regime)) {
    if (!(p->C > 0.0)) throw ArgumentError("perturbative model: C must be > 0");
    if (!(p->p >= 0.0 && p->p < 1.0)) throw ArgumentError("perturbative model: p must be in [0, 1)");
  } else if (const auto* q = std::get_if<PlateauRegime>(&regime)) {
    if (!(q->C > 0.0)) throw ArgumentError("plateau model: C must be > 0");
  } else {
    const auto& pw = std::get<PiecewiseMaterial>(regime);
    if (pw.branches.empty()) throw ArgumentError("piecewise model: no branches");
    for (const auto& [n, b] : pw.branches) {
      if (n < 2) throw ArgumentError("piecewise model: harmonic order must be >= 2");
      if (!(b.chi_pert > 0.0 && b.knot > 0.0 && b.epsilon > 0.0)) {
        throw ArgumentError("piecewise model: chi, knot and epsilon must be > 0 for n = " + std::to_string(n));
      }
    }
    return;
  }
  if (harmonics.empty()) throw ArgumentError("susceptibility model: empty harmonic set");
  for (int n : harmonics)
    if (n < 2) throw ArgumentError("susceptibility model: harmonic order must be >= 2");
}

SusceptibilityModel material_model(std::string_view name) {
  PiecewiseMaterial m;
  if (name == "gaas") {
    m.branches = {{3, {0.069, 1.05, 4.6}}, {5, {0.01, 0.735, 6.0}}};
  } else if (name == "zno") {
    m.branches = {{3, {0.041, 1.3, 4.0}}, {5, {0.035, 0.377, 6.0}}};
  } else if (name == "si") {
    m.branches = {{3, {0.027, 1.35, 5.6}}, {5, {4.31, 0.06, 5.8}}};
  } else {
    throw ArgumentError("unknown material '" + std::string(name) + "' (expected gaas, zno or si)");
  }
  return {m, {3, 5}};
}

std::vector<std::string> material_names() { return {"gaas", "zno", "si"}; }

std::map<int, double> eval_chi(const SusceptibilityModel& model, double alpha0_abs) {
  if (!(alpha0_abs > 0.0)) throw ArgumentError("eval_chi: |alpha0| must be > 0");
  model.validate();
  std::map<int, double> chi;
  if (const auto* p = std::get_if<PerturbativeRegime>(&model.regime)) {
    for (int n : model.harmonics) chi[n] = std::sqrt(p->C / n) * std::pow(p->p, n);
  } else if (const auto* q = std::get_if<PlateauRegime>(&model.regime)) {
    for (int n : model.harmonics) chi[n] = std::sqrt(q->C / n) / std::pow(alpha0_abs, n);
  } else {
    for (const auto& [n, b] : std::get<PiecewiseMaterial>(model.regime).branches) {
      chi[n] = alpha0_abs <= b.knot ? b.chi_pert : b.chi_pert * std::pow(b.knot / alpha0_abs, n - b.epsilon / 2.0);
    }
  }
  return chi;
}

double zeroth_order_intensity(double chi, double alpha0_abs, double tau, int n, double omega) {
  return chi * chi * std::pow(alpha0_abs, 2 * n) * (n * omega) * tau * tau;
}

double chi_from_spectrum(double intensity, double alpha0_abs, double tau, int n, double omega) {
  if (!(intensity > 0.0 && alpha0_abs > 0.0 && tau > 0.0 && n > 0 && omega > 0.0)) {
    throw ArgumentError("chi_from_spectrum: all inputs must be positive");
  }
  return std::sqrt(intensity / (std::pow(alpha0_abs, 2 * n) * (n * omega) * tau * tau));
}

ModelParams scale_transform(const ModelParams& params, Complex xi) {
  if (xi == Complex{}) throw ArgumentError("scale_transform: xi must be nonzero");
  ModelParams out = params;
  out.alpha0 = xi * params.alpha0;
  const double s = std::abs(xi);
  for (auto& [n, c] : out.chi) c /= std::pow(s, n);
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, std::size_t line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != cell.size() || cell.empty() || !std::isfinite(v)) {
    throw FitError("dataset line " + std::to_string(line_no) + ": '" + cell + "' is not a finite number");
  }
  return v;
}

}  // namespace

PulseEnergyDataset PulseEnergyDataset::parse(std::istream& in) {
  PulseEnergyDataset d;
  std::vector<int> orders;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto cells = split_csv(line);
    if (!have_header) {
      if (cells.size() < 2 || cells[0] != "energy") {
        throw FitError("dataset line " + std::to_string(line_no) + ": header must be energy,n<order>,...");
      }
      for (std::size_t c = 1; c < cells.size(); ++c) {
        const auto& h = cells[c];
        int order = 0;
        if (h.size() < 2 || h[0] != 'n' || (order = std::atoi(h.c_str() + 1)) < 2 ||
            std::to_string(order) != h.substr(1)) {
          throw FitError("dataset line " + std::to_string(line_no) + ": bad column name '" + h + "'");
        }
        if (d.counts.count(order)) throw FitError("dataset: duplicate column " + h);
        orders.push_back(order);
        d.counts[order];
      }
      have_header = true;
      continue;
    }
    if (cells.size() != orders.size() + 1) {
      throw FitError("dataset line " + std::to_string(line_no) + ": expected " + std::to_string(orders.size() + 1) +
                     " columns, got " + std::to_string(cells.size()));
    }
    const double e = parse_number(cells[0], line_no);
    if (!(e > 0.0)) throw FitError("dataset line " + std::to_string(line_no) + ": energy must be > 0");
    if (!d.energy.empty() && !(e > d.energy.back())) {
      throw FitError("dataset line " + std::to_string(line_no) + ": energy column must be strictly increasing");
    }
    d.energy.push_back(e);
    for (std::size_t c = 0; c < orders.size(); ++c) {
      const double v = parse_number(cells[c + 1], line_no);
      if (v < 0.0) throw FitError("dataset line " + std::to_string(line_no) + ": negative photon count");
      d.counts[orders[c]].push_back(v);
    }
  }
  if (!have_header) throw FitError("dataset: missing header row");
  return d;
}

PulseEnergyDataset PulseEnergyDataset::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

void PulseEnergyDataset::validate() const {
  for (std::size_t i = 0; i < energy.size(); ++i) {
    if (!(energy[i] > 0.0)) throw FitError("dataset row " + std::to_string(i + 1) + ": energy must be > 0");
    if (i > 0 && !(energy[i] > energy[i - 1])) throw FitError("dataset: energy column must be strictly increasing");
  }
  for (const auto& [n, col] : counts) {
    if (col.size() != energy.size()) throw FitError("dataset: column n" + std::to_string(n) + " has wrong length");
    for (double v : col)
      if (!(v >= 0.0)) throw FitError("dataset: negative photon count in column n" + std::to_string(n));
  }
}

namespace {

struct Candidate {
  double intercept = 0.0;  // y at x = knot
  double slope = 0.0;      // above the knot
  double rss = 0.0;
};

// y ~ y_k + n (x - x_k) for x <= x_k, y_k + s (x - x_k) above; free (y_k, s).
Candidate fit_hinge(const std::vector<double>& x, const std::vector<double>& y, double xk, int n) {
  double s00 = 0, s01 = 0, s11 = 0, r0 = 0, r1 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double u = std::max(x[i] - xk, 0.0);
    const double z = y[i] - n * std::min(x[i] - xk, 0.0);
    s00 += 1;
    s01 += u;
    s11 += u * u;
    r0 += z;
    r1 += z * u;
  }
  Candidate c;
  const double det = s00 * s11 - s01 * s01;
  if (det <= 1e-300 * std::max(1.0, s11)) {
    c.intercept = r0 / s00;
    c.slope = n;
  } else {
    c.intercept = (s11 * r0 - s01 * r1) / det;
    c.slope = (s00 * r1 - s01 * r0) / det;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = c.intercept + (x[i] <= xk ? n * (x[i] - xk) : c.slope * (x[i] - xk));
    c.rss += (y[i] - pred) * (y[i] - pred);
  }
  return c;
}

// Single straight line with free slope through all points.
Candidate fit_line(const std::vector<double>& x, const std::vector<double>& y, double x0) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] - x0, my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - x0 - mx) * (x[i] - x0 - mx);
    sxy += (x[i] - x0 - mx) * (y[i] - my);
  }
  Candidate c;
  c.slope = sxy / sxx;
  c.intercept = my - c.slope * mx;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (c.intercept + c.slope * (x[i] - x0));
    c.rss += r * r;
  }
  return c;
}

}  // namespace

ExponentFit fit_exponents(const PulseEnergyDataset& data, int n) {
  data.validate();
  auto it = data.counts.find(n);
  if (it == data.counts.end()) throw FitError("fit: dataset has no column n" + std::to_string(n));
  const std::size_t rows = data.energy.size();
  if (rows < kMinFitRows) {
    throw FitError("fit: need at least " + std::to_string(kMinFitRows) + " rows (3 on each side of a knot), got " +
                   std::to_string(rows));
  }
  std::vector<double> x(rows), y(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!(it->second[i] > 0.0)) {
      throw FitError("fit: row " + std::to_string(i + 1) + " has a nonpositive count in column n" + std::to_string(n));
    }
    x[i] = std::log(data.energy[i]);
    y[i] = std::log(it->second[i]);
  }

  ExponentFit best;
  best.n = n;
  best.rss = std::numeric_limits<double>::infinity();
  double scale = 0.0;
  for (double v : y) scale += v * v;
  const double tie = 1e-12 * std::max(1.0, scale);

  // Single-regime candidates first so that they win ties.
  {
    // everything above the knot: free slope, knot at the first row
    const Candidate c = fit_line(x, y, x.front());
    best.rss = c.rss;
    best.epsilon = 2.0 * c.slope;
    best.prefactor = std::exp(c.intercept - c.slope * x.front());
    best.knot_index = 0;
    best.single_regime = true;
  }
  {
    // everything below the knot: slope n, knot at the last row
    const Candidate c = fit_hinge(x, y, x.back(), n);
    if (c.rss + tie < best.rss) {
      best.rss = c.rss;
      best.epsilon = 2.0 * n;
      best.prefactor = std::exp(c.intercept - n * x.back());
      best.knot_index = rows - 1;
      best.single_regime = true;
    }
  }
  for (std::size_t k = 3; k + 3 < rows; ++k) {
    const Candidate c = fit_hinge(x, y, x[k], n);
    if (c.rss + tie < best.rss) {
      best.rss = c.rss;
      best.epsilon = 2.0 * c.slope;
      best.prefactor = std::exp(c.intercept - c.slope * x[k]);
      best.knot_index = k;
      best.single_regime = false;
    }
  }
  best.knot_energy = data.energy[best.knot_index];
  best.knot_alpha = std::sqrt(best.knot_energy);
  best.degenerate = std::abs(best.epsilon) < 1e-6;
  return best;
}

double predict_photons(const ExponentFit& fit, double energy) {
  if (!(energy > 0.0)) throw ArgumentError("predict_photons: energy must be > 0");
  const double upper = fit.prefactor * std::pow(energy, fit.epsilon / 2.0);
  if (energy >= fit.knot_energy || (fit.single_regime && fit.knot_index == 0)) return upper;
  // below the knot the perturbative branch continues with slope n from the knot value
  const double at_knot = fit.prefactor * std::pow(fit.knot_energy, fit.epsilon / 2.0);
  return at_knot * std::pow(energy / fit.knot_energy, fit.n);
}

}  // namespace hhgqo
