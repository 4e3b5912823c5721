#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "hhgqo/cli.hpp"

namespace hhgqo::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw ConfigError("config field '" + key + "': " + what);
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(v)) fail(key, "expected a finite number, got '" + text + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  long v = 0;
  try {
    v = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || v < -1000000 || v > 1000000) fail(key, "expected an integer, got '" + text + "'");
  return static_cast<int>(v);
}

class Reader {
 public:
  explicit Reader(const KeyValueConfig& kv) : kv_(kv) {}

  std::optional<std::string> raw(const std::string& key) {
    used_.insert(key);
    auto it = kv_.values().find(key);
    if (it == kv_.values().end()) return std::nullopt;
    return it->second;
  }
  double number(const std::string& key, double def) {
    auto r = raw(key);
    return r ? to_double(key, *r) : def;
  }
  int integer(const std::string& key, int def) {
    auto r = raw(key);
    return r ? to_int(key, *r) : def;
  }
  std::string text(const std::string& key, const std::string& def) { return raw(key).value_or(def); }

  void reject_unknown() const {
    for (const auto& [k, v] : kv_.values())
      if (!used_.count(k)) fail(k, "unknown key");
  }

 private:
  const KeyValueConfig& kv_;
  std::set<std::string> used_;
};

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) out.push_back(to_int(key, item));
  if (out.empty()) fail(key, "empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(to_double(key, item));
  if (out.empty()) fail(key, "empty list");
  return out;
}

// "3:0.02, 5:0.001"
std::map<int, double> parse_table(const std::string& key, const std::string& text) {
  std::map<int, double> out;
  for (const auto& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) fail(key, "expected order:value entries, got '" + item + "'");
    const int n = to_int(key, parts[0]);
    if (out.count(n)) fail(key, "duplicate order " + parts[0]);
    out[n] = to_double(key, parts[1]);
  }
  if (out.empty()) fail(key, "empty table");
  return out;
}

// "3:0.069:1.05:4.6; 5:0.01:0.735:6"
PiecewiseMaterial parse_piecewise(const std::string& key, const std::string& text) {
  PiecewiseMaterial m;
  for (const auto& item : split(text, ';')) {
    if (item.empty()) continue;
    const auto parts = split(item, ':');
    if (parts.size() != 4) fail(key, "expected order:chi:knot:epsilon entries, got '" + item + "'");
    m.branches[to_int(key, parts[0])] = {to_double(key, parts[1]), to_double(key, parts[2]), to_double(key, parts[3])};
  }
  if (m.branches.empty()) fail(key, "empty piecewise table");
  return m;
}

std::pair<int, double> parse_anchor(const std::string& key, const std::string& text) {
  const auto t = parse_table(key, text);
  if (t.size() != 1) fail(key, "anchor takes a single order:chi entry");
  return *t.begin();
}

std::vector<int> parse_harmonics(const std::string& key, const std::string& text, int cutoff) {
  std::vector<int> out;
  if (text == "odd") {
    for (int n = 3; n <= cutoff; n += 2) out.push_back(n);
  } else if (text == "all") {
    for (int n = 2; n <= cutoff; ++n) out.push_back(n);
  } else {
    out = parse_int_list(key, text);
  }
  std::set<int> seen;
  for (int n : out) {
    if (n < 2 || n > cutoff) fail(key, "harmonic order " + std::to_string(n) + " outside 2..model.cutoff");
    if (!seen.insert(n).second) fail(key, "duplicate harmonic order " + std::to_string(n));
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) fail(key, "no harmonic orders");
  return out;
}

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // prefer the shortest representation that round-trips
  for (int prec = 6; prec < 17; ++prec) {
    char tmp[40];
    std::snprintf(tmp, sizeof tmp, "%.*g", prec, v);
    if (std::strtod(tmp, nullptr) == v) return tmp;
  }
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "nan"; }

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    kv.values_[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse(in, path);
}

void KeyValueConfig::set_assignment(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || trim(assignment.substr(0, eq)).empty()) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

RunConfig resolve(const KeyValueConfig& kv) {
  Reader r(kv);
  RunConfig c;

  c.alpha0_abs = r.number("model.alpha0_abs", c.alpha0_abs);
  if (!(c.alpha0_abs > 0.0)) fail("model.alpha0_abs", "must be > 0");
  c.alpha0_phase = r.number("model.alpha0_phase", c.alpha0_phase);
  c.omega = r.number("model.omega", c.omega);
  if (!(c.omega > 0.0)) fail("model.omega", "must be > 0");
  c.cutoff = r.integer("model.cutoff", c.cutoff);
  if (c.cutoff < 2) fail("model.cutoff", "must be >= 2");
  c.lowest_harmonic = r.integer("model.lowest_harmonic", 0);
  const auto harmonics_text = r.raw("model.harmonics");

  // susceptibility: exactly one spec
  const auto table = r.raw("chi.table");
  const auto pert_C = r.raw("chi.perturbative.C");
  const auto pert_p = r.raw("chi.perturbative.p");
  const auto pert_anchor = r.raw("chi.perturbative.anchor");
  const auto plat_C = r.raw("chi.plateau.C");
  const auto plat_anchor = r.raw("chi.plateau.anchor");
  const auto material = r.raw("chi.material");
  const auto piecewise = r.raw("chi.piecewise");
  const int specs = int(table.has_value()) + int(pert_C || pert_p || pert_anchor) + int(plat_C || plat_anchor) +
                    int(material.has_value()) + int(piecewise.has_value());
  if (specs != 1) {
    fail("chi", "exactly one susceptibility spec is required (table, perturbative, plateau, material or piecewise); got " +
                    std::to_string(specs));
  }

  auto harmonics_or = [&](const std::vector<int>& def) {
    return harmonics_text ? parse_harmonics("model.harmonics", *harmonics_text, c.cutoff) : def;
  };

  if (table) {
    auto t = parse_table("chi.table", *table);
    std::vector<int> keys;
    for (const auto& [n, v] : t) {
      if (v < 0.0) fail("chi.table", "susceptibilities must be >= 0");
      keys.push_back(n);
    }
    c.harmonics = harmonics_or(keys);
    for (const auto& [n, v] : t)
      if (std::find(c.harmonics.begin(), c.harmonics.end(), n) == c.harmonics.end()) {
        fail("chi.table", "order " + std::to_string(n) + " is not in model.harmonics");
      }
    for (int n : c.harmonics) t.emplace(n, 0.0);
    c.chi = t;
    c.chi_source = "table";
  } else if (pert_C || pert_p || pert_anchor) {
    if (!pert_p) fail("chi.perturbative.p", "required");
    if (bool(pert_C) == bool(pert_anchor)) fail("chi.perturbative", "give exactly one of C or anchor");
    PerturbativeRegime reg;
    reg.p = to_double("chi.perturbative.p", *pert_p);
    if (!(reg.p > 0.0 && reg.p < 1.0)) fail("chi.perturbative.p", "must be in (0, 1)");
    if (pert_C) {
      reg.C = to_double("chi.perturbative.C", *pert_C);
    } else {
      const auto [n, chi] = parse_anchor("chi.perturbative.anchor", *pert_anchor);
      if (n < 2) fail("chi.perturbative.anchor", "order must be >= 2");
      reg.C = n * std::pow(chi / std::pow(reg.p, n), 2);
    }
    if (!(reg.C > 0.0)) fail("chi.perturbative", "C must be > 0");
    c.harmonics = harmonics_or(parse_harmonics("model.harmonics", "odd", c.cutoff));
    c.chi = SusceptibilityModel{reg, c.harmonics};
    c.chi_source = "perturbative";
  } else if (plat_C || plat_anchor) {
    if (bool(plat_C) == bool(plat_anchor)) fail("chi.plateau", "give exactly one of C or anchor");
    PlateauRegime reg;
    if (plat_C) {
      reg.C = to_double("chi.plateau.C", *plat_C);
    } else {
      // anchor is chi_n at model.alpha0_abs
      const auto [n, chi] = parse_anchor("chi.plateau.anchor", *plat_anchor);
      if (n < 2) fail("chi.plateau.anchor", "order must be >= 2");
      reg.C = n * std::pow(chi * std::pow(c.alpha0_abs, n), 2);
    }
    if (!(reg.C > 0.0)) fail("chi.plateau", "C must be > 0");
    c.harmonics = harmonics_or(parse_harmonics("model.harmonics", "odd", c.cutoff));
    c.chi = SusceptibilityModel{reg, c.harmonics};
    c.chi_source = "plateau";
  } else {
    SusceptibilityModel m;
    if (material) {
      try {
        m = material_model(*material);
      } catch (const ArgumentError& e) {
        fail("chi.material", e.what());
      }
      c.chi_source = "material:" + *material;
    } else {
      m.regime = parse_piecewise("chi.piecewise", *piecewise);
      c.chi_source = "piecewise";
    }
    try {
      m.validate();
    } catch (const ArgumentError& e) {
      fail("chi", e.what());
    }
    std::vector<int> keys;
    for (const auto& [n, b] : std::get<PiecewiseMaterial>(m.regime).branches) keys.push_back(n);
    for (int n : keys)
      if (n > c.cutoff) fail("model.cutoff", "must be >= " + std::to_string(n) + " for the chosen susceptibilities");
    if (harmonics_text && parse_harmonics("model.harmonics", *harmonics_text, c.cutoff) != keys) {
      fail("model.harmonics", "must match the piecewise/material orders " + join_ints(keys));
    }
    c.harmonics = keys;
    m.harmonics = keys;
    c.chi = m;
  }
  if (c.lowest_harmonic != 0 && (c.lowest_harmonic < 2 || c.lowest_harmonic > c.cutoff)) {
    fail("model.lowest_harmonic", "must be 0 or within 2..model.cutoff");
  }

  c.t = r.number("time.t", c.t);
  c.t_start = r.number("time.start", 0.0);
  c.t_stop = r.number("time.stop", c.t);
  c.t_steps = r.integer("time.steps", c.t_steps);
  if (c.t < 0.0) fail("time.t", "must be >= 0");
  if (c.t_start < 0.0 || c.t_stop < c.t_start) fail("time.stop", "need 0 <= time.start <= time.stop");
  if (c.t_steps < 1) fail("time.steps", "must be >= 1");

  c.sweep_start = r.number("sweep.start", c.sweep_start);
  c.sweep_stop = r.number("sweep.stop", c.sweep_stop);
  c.sweep_points = r.integer("sweep.points", c.sweep_points);
  const std::string spacing = r.text("sweep.spacing", "log");
  if (spacing != "log" && spacing != "linear") fail("sweep.spacing", "expected log or linear");
  c.sweep_log = spacing == "log";
  c.sweep_tau = r.number("sweep.tau", c.sweep_tau);
  if (!(c.sweep_start > 0.0) || !(c.sweep_stop >= c.sweep_start)) fail("sweep.stop", "need 0 < sweep.start <= sweep.stop");
  if (c.sweep_points < 1) fail("sweep.points", "must be >= 1");
  if (!(c.sweep_tau > 0.0)) fail("sweep.tau", "must be > 0");
  {
    const auto pair_text = r.raw("sweep.pair");
    if (pair_text) {
      const auto p = parse_int_list("sweep.pair", *pair_text);
      if (p.size() != 2 || p[0] == p[1]) fail("sweep.pair", "expected two distinct orders n,m");
      c.sweep_pair = {p[0], p[1]};
    } else if (c.harmonics.size() >= 2) {
      c.sweep_pair = {c.harmonics[0], c.harmonics[1]};
    } else {
      c.sweep_pair = {c.harmonics[0], c.harmonics[0]};
    }
  }

  c.wigner_harmonic = r.integer("wigner.harmonic", c.harmonics.back());
  if (std::find(c.harmonics.begin(), c.harmonics.end(), c.wigner_harmonic) == c.harmonics.end()) {
    fail("wigner.harmonic", "not one of model.harmonics");
  }
  c.grid_extent = r.number("wigner.extent", c.grid_extent);
  c.grid_points = r.integer("wigner.points", c.grid_points);
  if (!(c.grid_extent > 0.0) || c.grid_extent > PhaseSpaceGrid::kMaxExtent) {
    fail("wigner.extent", "must be in (0, " + fmt(PhaseSpaceGrid::kMaxExtent) + "]");
  }
  if (c.grid_points < 2 || c.grid_points > 2001) fail("wigner.points", "must be in 2..2001");

  {
    std::vector<int> dims{16};
    for (std::size_t i = 0; i < c.harmonics.size(); ++i) dims.push_back(3);
    const auto dims_text = r.raw("oracle.dims");
    if (dims_text) dims = parse_int_list("oracle.dims", *dims_text);
    if (dims.size() != c.harmonics.size() + 1) fail("oracle.dims", "need the driving dim plus one dim per harmonic");
    try {
      c.oracle.dims = ModeDims(dims);
    } catch (const DimensionError& e) {
      fail("oracle.dims", e.what());
    }
    c.oracle.tolerance = r.number("oracle.tolerance", c.oracle.tolerance);
    c.oracle.max_step = r.number("oracle.max_step", c.oracle.max_step);
    c.oracle.alarm_threshold = r.number("oracle.alarm", c.oracle.alarm_threshold);
    try {
      c.oracle.validate();
    } catch (const ArgumentError& e) {
      fail("oracle", e.what());
    }
    const auto times = r.raw("oracle.times");
    if (times) c.oracle_times = parse_double_list("oracle.times", *times);
    for (double t : c.oracle_times)
      if (!(t >= 0.0)) fail("oracle.times", "times must be >= 0");
  }

  c.fit_dataset = r.text("fit.dataset", "");
  c.fit_tau = r.number("fit.tau", c.fit_tau);
  c.fit_predict_points = r.integer("fit.predict_points", c.fit_predict_points);
  if (!(c.fit_tau > 0.0)) fail("fit.tau", "must be > 0");
  if (c.fit_predict_points < 2) fail("fit.predict_points", "must be >= 2");

  r.reject_unknown();

  try {
    c.model().validate();
  } catch (const ArgumentError& e) {
    fail("model", e.what());
  }
  return c;
}

ModelParams RunConfig::model_at(double a) const {
  ModelParams p;
  p.alpha0 = std::polar(a, alpha0_phase);
  p.omega = omega;
  p.cutoff = cutoff;
  p.lowest_harmonic = lowest_harmonic;
  if (const auto* t = std::get_if<std::map<int, double>>(&chi))
    p.chi = *t;
  else
    p.chi = eval_chi(std::get<SusceptibilityModel>(chi), a);
  return p;
}

double RunConfig::cycle() const { return 2.0 * std::numbers::pi / omega; }

std::vector<std::string> RunConfig::describe() const {
  std::map<std::string, std::string> kv;
  kv["model.alpha0_abs"] = fmt(alpha0_abs);
  kv["model.alpha0_phase"] = fmt(alpha0_phase);
  kv["model.omega"] = fmt(omega);
  kv["model.cutoff"] = std::to_string(cutoff);
  kv["model.lowest_harmonic"] = std::to_string(lowest_harmonic);
  kv["model.harmonics"] = join_ints(harmonics);
  kv["chi.source"] = chi_source;
  if (const auto* t = std::get_if<std::map<int, double>>(&chi)) {
    std::string s;
    for (const auto& [n, v] : *t) s += (s.empty() ? "" : ",") + std::to_string(n) + ":" + fmt(v);
    kv["chi.table"] = s;
  } else {
    const auto& m = std::get<SusceptibilityModel>(chi);
    if (const auto* p = std::get_if<PerturbativeRegime>(&m.regime)) {
      kv["chi.perturbative.C"] = fmt(p->C);
      kv["chi.perturbative.p"] = fmt(p->p);
    } else if (const auto* q = std::get_if<PlateauRegime>(&m.regime)) {
      kv["chi.plateau.C"] = fmt(q->C);
    } else {
      std::string s;
      for (const auto& [n, b] : std::get<PiecewiseMaterial>(m.regime).branches)
        s += (s.empty() ? "" : ";") + std::to_string(n) + ":" + fmt(b.chi_pert) + ":" + fmt(b.knot) + ":" + fmt(b.epsilon);
      kv["chi.piecewise"] = s;
    }
  }
  kv["time.t"] = fmt(t);
  kv["time.start"] = fmt(t_start);
  kv["time.stop"] = fmt(t_stop);
  kv["time.steps"] = std::to_string(t_steps);
  kv["sweep.start"] = fmt(sweep_start);
  kv["sweep.stop"] = fmt(sweep_stop);
  kv["sweep.points"] = std::to_string(sweep_points);
  kv["sweep.spacing"] = sweep_log ? "log" : "linear";
  kv["sweep.tau"] = fmt(sweep_tau);
  kv["sweep.pair"] = std::to_string(sweep_pair.first) + "," + std::to_string(sweep_pair.second);
  kv["wigner.harmonic"] = std::to_string(wigner_harmonic);
  kv["wigner.extent"] = fmt(grid_extent);
  kv["wigner.points"] = std::to_string(grid_points);
  kv["oracle.dims"] = join_ints(oracle.dims.values());
  kv["oracle.tolerance"] = fmt(oracle.tolerance);
  kv["oracle.max_step"] = fmt(oracle.max_step);
  kv["oracle.alarm"] = fmt(oracle.alarm_threshold);
  {
    std::string s;
    for (double x : oracle_times) s += (s.empty() ? "" : ",") + fmt(x);
    kv["oracle.times"] = s;
  }
  kv["fit.dataset"] = fit_dataset;
  kv["fit.tau"] = fmt(fit_tau);
  kv["fit.predict_points"] = std::to_string(fit_predict_points);

  std::vector<std::string> out;
  for (const auto& [k, v] : kv) out.push_back(k + " = " + v);
  return out;
}

unsigned resolve_threads(std::optional<unsigned> flag) {
  if (flag) return std::max(1u, *flag);
  if (const char* env = std::getenv("HHGQO_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<unsigned>(v);
    throw ConfigError("HHGQO_THREADS must be an integer in 1..1024, got '" + std::string(env) + "'");
  }
  return 1;
}

}  // namespace hhgqo::cli
