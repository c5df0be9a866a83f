/*
 * Copyright 2026 The chernrice Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "chernrice/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace chernrice {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError("bad number for " + key + ": " + v);
  return out;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  std::uint64_t out = 0;
  try {
    if (!v.empty() && v[0] != '-') out = std::stoull(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw ConfigError("bad unsigned integer for " + key + ": " + v);
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  const std::uint64_t u = parse_unsigned(key, v);
  if (u > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
    throw ConfigError("value out of range for " + key);
  }
  return static_cast<int>(u);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("bad boolean for " + key + ": " + v);
}

int manifold_dim(const std::string& name) {
  if (name == "sphere2" || name == "torus2") return 2;
  if (name == "torus3") return 3;
  throw ConfigError("unknown manifold: " + name);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  std::map<std::string, int> seen;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));
    if (seen[key]++) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key " + key);
    if (key == "experiment") c.experiment = v;
    else if (key == "manifold") c.manifold = v;
    else if (key == "ensemble") c.ensemble = v;
    else if (key == "seed") c.seed = parse_unsigned(key, v);
    else if (key == "samples") c.samples = parse_unsigned(key, v);
    else if (key == "resolution") c.resolution = parse_int(key, v);
    else if (key == "seed_resolution") c.seed_resolution = parse_int(key, v);
    else if (key == "test_form") c.test_form = v;
    else if (key == "form_amplitude") c.form_amplitude = parse_double(key, v);
    else if (key == "drift") c.drift = v;
    else if (key == "drift_amplitude") c.drift_amplitude = parse_double(key, v);
    else if (key == "sweep") {
      c.sweep.clear();
      std::istringstream items(v);
      std::string item;
      while (std::getline(items, item, ',')) c.sweep.push_back(parse_double(key, trim(item)));
    }
    else if (key == "abs_tol") c.abs_tol = parse_double(key, v);
    else if (key == "z") c.z = parse_double(key, v);
    else if (key == "expected_rhs") c.expected_rhs = parse_double(key, v);
    else if (key == "rhs_tol") c.rhs_tol = parse_double(key, v);
    else if (key == "coarea_tol") c.coarea_tol = parse_double(key, v);
    else if (key == "max_discard_fraction") c.max_discard_fraction = parse_double(key, v);
    else if (key == "workers") c.workers = parse_int(key, v);
    else if (key == "dump_zeros") c.dump_zeros = parse_int(key, v);
    else if (key == "density_grid") c.density_grid = parse_bool(key, v);
    else throw ConfigError("line " + std::to_string(lineno) + ": unknown key " + key);
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "experiment = " << c.experiment << "\n"
     << "manifold = " << c.manifold << "\n"
     << "ensemble = " << c.ensemble << "\n"
     << "seed = " << c.seed << "\n"
     << "samples = " << c.samples << "\n"
     << "resolution = " << c.resolution << "\n"
     << "seed_resolution = " << c.seed_resolution << "\n"
     << "test_form = " << c.test_form << "\n"
     << "form_amplitude = " << num(c.form_amplitude) << "\n"
     << "drift = " << c.drift << "\n"
     << "drift_amplitude = " << num(c.drift_amplitude) << "\n";
  if (!c.sweep.empty()) {
    os << "sweep = ";
    for (std::size_t i = 0; i < c.sweep.size(); ++i) os << (i ? ", " : "") << num(c.sweep[i]);
    os << "\n";
  }
  os << "abs_tol = " << num(c.abs_tol) << "\n"
     << "z = " << num(c.z) << "\n";
  if (c.expected_rhs) os << "expected_rhs = " << num(*c.expected_rhs) << "\n";
  os << "rhs_tol = " << num(c.rhs_tol) << "\n"
     << "coarea_tol = " << num(c.coarea_tol) << "\n"
     << "max_discard_fraction = " << num(c.max_discard_fraction) << "\n"
     << "workers = " << c.workers << "\n"
     << "dump_zeros = " << c.dump_zeros << "\n"
     << "density_grid = " << (c.density_grid ? "true" : "false") << "\n";
  return os.str();
}

void validate(const ExperimentConfig& c) {
  if (c.samples < 1) throw ConfigError("samples must be at least 1");
  if (c.workers < 1) throw ConfigError("workers must be at least 1");
  if (c.resolution != 0 && (c.resolution < 4 || c.resolution > 2048)) {
    throw ConfigError("resolution must be 0 or within [4, 2048]");
  }
  if (c.seed_resolution != 0 && (c.seed_resolution < 4 || c.seed_resolution > 1024)) {
    throw ConfigError("seed_resolution must be 0 or within [4, 1024]");
  }
  if (!(c.z > 0.0) || !(c.abs_tol >= 0.0) || !(c.rhs_tol >= 0.0) || !(c.coarea_tol >= 0.0)) {
    throw ConfigError("tolerances must be non-negative and z positive");
  }
  if (!(c.max_discard_fraction >= 0.0 && c.max_discard_fraction <= 1.0)) {
    throw ConfigError("max_discard_fraction must lie in [0, 1]");
  }
  for (const std::string* s : {&c.experiment, &c.manifold, &c.ensemble, &c.test_form, &c.drift}) {
    if (s->empty() || s->find_first_of("#=\n") != std::string::npos) {
      throw ConfigError("names must be non-empty and free of '#', '=' and newlines");
    }
  }
  manifold_dim(c.manifold);
}

ExperimentConfig experiment_preset(const std::string& name) {
  ExperimentConfig c;
  c.experiment = name;
  if (name == "euler-number") {
    c.samples = 100;
    c.test_form = "const";
    c.expected_rhs = 2.0;
    c.abs_tol = 1e-3;
    return c;
  }
  if (name == "stochastic-gbc") {
    c.samples = 10000;
    c.test_form = "zsq";
    c.expected_rhs = 2.0 / 3.0;
    return c;
  }
  if (name == "curve-case") {
    c.manifold = "torus3";
    c.ensemble = "torus3_trig";
    c.samples = 2000;
    c.resolution = 48;
    c.test_form = "cosx1_dx2";
    return c;
  }
  if (name == "drift-sweep") {
    c.manifold = "torus2";
    c.ensemble = "torus2_flat";
    c.samples = 4000;
    c.resolution = 128;
    c.test_form = "cos1cos2";
    c.drift = "sinsin";
    c.sweep = {0.0, 0.5, 1.0, 2.0};
    return c;
  }
  throw ConfigError("unknown experiment: " + name);
}

std::vector<std::pair<std::string, std::string>> experiment_catalog() {
  return {
      {"euler-number", "sphere2_tangent, eta = 1: signed zero count against the Euler integral"},
      {"stochastic-gbc", "sphere2_tangent, eta = z^2: Monte Carlo mean against 2/3"},
      {"curve-case", "torus3_trig, eta = cos(x1) dx2: zero-curve integrals against quadrature"},
      {"drift-sweep", "torus2_flat with drift sinsin over amplitudes 0, 0.5, 1, 2"},
  };
}

TestForm builtin_test_form(const std::string& name, double a, const std::string& manifold) {
  auto scalar = [&](std::function<double(const Point&)> f) {
    return TestForm{name, 0, [a, f](const Point& x) { return VectorXd::Constant(1, a * f(x)); }};
  };
  if (manifold == "sphere2") {
    if (name == "const") return scalar([](const Point&) { return 1.0; });
    if (name == "z") return scalar([](const Point& x) { return std::cos(x[0]); });
    if (name == "zsq") return scalar([](const Point& x) { return std::cos(x[0]) * std::cos(x[0]); });
  } else if (manifold == "torus2") {
    if (name == "const") return scalar([](const Point&) { return 1.0; });
    if (name == "cos1cos2") return scalar([](const Point& x) { return std::cos(x[0]) * std::cos(x[1]); });
  } else if (manifold == "torus3") {
    auto one_form = [&](std::function<VectorXd(const Point&)> f) {
      return TestForm{name, 1, [a, f](const Point& x) { return (a * f(x)).eval(); }};
    };
    if (name == "dx3") return one_form([](const Point&) { return VectorXd::Unit(3, 2); });
    if (name == "cosx1_dx2") {
      return one_form([](const Point& x) {
        VectorXd e = VectorXd::Zero(3);
        e[1] = std::cos(x[0]);
        return e;
      });
    }
    if (name == "dx3_dsinx1") {
      return one_form([](const Point& x) {
        VectorXd e = VectorXd::Zero(3);
        e[0] = std::cos(x[0]);
        e[2] = 1.0;
        return e;
      });
    }
  }
  throw ConfigError("unknown test form '" + name + "' on " + manifold);
}

std::vector<ExperimentConfig> expand(const ExperimentConfig& c) {
  if (c.sweep.empty()) return {c};
  std::vector<ExperimentConfig> out;
  for (double a : c.sweep) {
    ExperimentConfig e = c;
    e.sweep.clear();
    e.drift_amplitude = a;
    e.experiment = c.experiment + "@" + num(a);
    out.push_back(e);
  }
  return out;
}

namespace {

template <class Fn>
void parallel_indexed(std::size_t n, int workers, Fn&& fn) {
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < n; k += workers) fn(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

double mean_of(const std::vector<double>& v) { return pairwise_sum(v) / static_cast<double>(v.size()); }

double standard_error(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  std::vector<double> sq(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) sq[k] = (v[k] - m) * (v[k] - m);
  return std::sqrt(pairwise_sum(sq) / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

double batch_means_stderr(const std::vector<double>& v) {
  if (v.size() < 40) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t batches = std::max<std::size_t>(20, v.size() / 10);
  const std::size_t per = v.size() / batches;
  std::vector<double> means;
  for (std::size_t b = 0; b < batches; ++b) {
    means.push_back(mean_of(std::vector<double>(v.begin() + b * per, v.begin() + (b + 1) * per)));
  }
  return standard_error(means) * std::sqrt(static_cast<double>(per * batches) / v.size());
}

}  // namespace

ExperimentReport run(const ExperimentConfig& config) {
  validate(config);
  if (!config.sweep.empty()) throw ConfigError("run: expand() sweep configs first");
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.config = config;

  BasisPtr basis;
  try {
    basis = builtin_ensemble(config.ensemble, config.resolution);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (basis->manifold()->name() != config.manifold) {
    throw ConfigError("ensemble " + config.ensemble + " lives on " + basis->manifold()->name() +
                      ", not " + config.manifold);
  }
  const int r = basis->rank(), m = basis->dim();
  if (m != r && m != r + 1) throw ConfigError("only codimension r with m = r or m = r + 1");
  const OrthoFrameField frame(basis);
  const TestForm eta = builtin_test_form(config.test_form, config.form_amplitude, config.manifold);
  if (eta.degree != m - r) throw ConfigError("test form degree must be m - r");
  DriftField drift;
  try {
    drift = builtin_drift(config.drift, config.drift_amplitude, r, m);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const DriftField* drift_ptr = config.drift == "none" ? nullptr : &drift;

  const ManifoldModel& mfd = *basis->manifold();
  const auto nodes = mfd.quadrature_nodes();
  const std::vector<double> density = evaluate_nodes(
      nodes, [&](const Point& x) { return expected_current_density(frame, x, eta, drift_ptr); },
      config.workers);
  std::vector<double> weighted(nodes.size());
  for (std::size_t k = 0; k < nodes.size(); ++k) weighted[k] = density[k] * nodes[k].weight;
  rep.rhs = pairwise_sum(weighted);
  if (config.density_grid) {
    rep.density_nodes = nodes;
    rep.density_values = density;
  }

  ZeroSearchOptions opt;
  opt.seed_resolution = config.seed_resolution;
  rep.samples.resize(config.samples);
  const int dumps = static_cast<int>(std::min<std::uint64_t>(config.dump_zeros, config.samples));
  std::vector<PointZeroSet> point_dumps(m == r ? dumps : 0);
  std::vector<CurveZeroSet> curve_dumps(m == r ? 0 : dumps);
  parallel_indexed(config.samples, config.workers, [&](std::size_t k) {
    SampleRecord& rec = rep.samples[k];
    rec.index = k;
    const SectionSample s = sample(basis, config.seed, k);
    const SectionField field = section_field(s, drift_ptr);
    if (m == r) {
      PointZeroSet zs = find_zero_points(field, &frame, opt);
      rec.zero_count = zs.points.size();
      if (!zs.ok()) {
        rec.discarded = true;
        rec.reason = zs.failure.empty() ? "non-transversal zero" : zs.failure;
      } else {
        rec.value = evaluate_current(zs, eta);
      }
      if (static_cast<int>(k) < dumps) point_dumps[k] = std::move(zs);
    } else {
      CurveZeroSet cs = trace_zero_curves(field, opt);
      rec.zero_count = cs.curves.size();
      if (!cs.ok()) {
        rec.discarded = true;
        rec.reason = cs.failure.empty() ? "non-transversal zero" : cs.failure;
      } else {
        const CoareaResult cr = coarea_check(cs, field, eta);
        rec.value = cr.direct;
        rec.coarea_gap = std::abs(cr.direct - cr.coarea);
      }
      if (static_cast<int>(k) < dumps) curve_dumps[k] = std::move(cs);
    }
  });
  for (int k = 0; k < dumps; ++k) {
    if (m == r) rep.point_dumps.emplace_back(k, std::move(point_dumps[k]));
    else rep.curve_dumps.emplace_back(k, std::move(curve_dumps[k]));
  }

  std::vector<double> kept;
  for (const auto& rec : rep.samples) {
    if (rec.discarded) {
      rep.discarded_indices.push_back(rec.index);
      continue;
    }
    kept.push_back(rec.value);
    rep.max_coarea_gap = std::max(rep.max_coarea_gap, rec.coarea_gap);
  }
  rep.kept = kept.size();
  if (!kept.empty()) {
    rep.mean = mean_of(kept);
    rep.stderr_ = standard_error(kept);
    rep.batch_stderr = batch_means_stderr(kept);
    rep.value_min = *std::min_element(kept.begin(), kept.end());
    rep.value_max = *std::max_element(kept.begin(), kept.end());
  }

  const double discard_fraction =
      static_cast<double>(rep.discarded_indices.size()) / static_cast<double>(config.samples);
  rep.discards_ok = discard_fraction <= config.max_discard_fraction && !kept.empty();
  rep.statistic_ok = std::abs(rep.mean - rep.rhs) <= std::max(config.abs_tol, config.z * rep.stderr_);
  if (config.expected_rhs) rep.rhs_ok = std::abs(rep.rhs - *config.expected_rhs) <= config.rhs_tol;
  if (m == r + 1) rep.coarea_ok = rep.max_coarea_gap <= config.coarea_tol;
  rep.pass = rep.discards_ok && rep.statistic_ok && rep.rhs_ok && rep.coarea_ok;
  if (!rep.discards_ok) rep.failure = "discarded fraction " + num(discard_fraction) + " exceeds the limit";
  else if (!rep.statistic_ok) rep.failure = "mean differs from rhs beyond tolerance";
  else if (!rep.rhs_ok) rep.failure = "quadrature rhs differs from expected_rhs";
  else if (!rep.coarea_ok) rep.failure = "coarea cross-check gap exceeds coarea_tol";
  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

std::string ExperimentReport::numeric_fields() const {
  std::ostringstream os;
  os << "samples = " << samples.size() << "\n"
     << "kept = " << kept << "\n"
     << "discarded = " << discarded_indices.size() << "\n"
     << "mean = " << num(mean) << "\n"
     << "stderr = " << num(stderr_) << "\n"
     << "batch_stderr = " << num(batch_stderr) << "\n"
     << "min = " << num(value_min) << "\n"
     << "max = " << num(value_max) << "\n"
     << "rhs = " << num(rhs) << "\n";
  if (config.expected_rhs) os << "expected_rhs = " << num(*config.expected_rhs) << "\n";
  os << "max_coarea_gap = " << num(max_coarea_gap) << "\n"
     << "pass = " << (pass ? "true" : "false") << "\n";
  return os.str();
}

std::string ExperimentReport::summary() const {
  std::ostringstream os;
  os << "[config]\n" << to_text(config) << "\n[results]\n" << numeric_fields();
  if (!failure.empty()) os << "failure = " << failure << "\n";
  os << "discarded_indices =";
  for (auto k : discarded_indices) os << " " << k;
  os << "\n";
  for (const auto& rec : samples) {
    if (rec.discarded) os << "discard " << rec.index << ": " << rec.reason << "\n";
  }
  os << "runtime_seconds = " << num(runtime_seconds) << "\n";
  return os.str();
}

void write_outputs(const ExperimentReport& rep, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream os(dir / name);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    return os;
  };
  {
    auto os = open("report.txt");
    os << rep.summary();
  }
  {
    auto os = open("samples.csv");
    os << "index,value,status,zero_count,coarea_gap\n";
    for (const auto& rec : rep.samples) {
      os << rec.index << "," << num(rec.value) << "," << (rec.discarded ? "discarded" : "kept") << ","
         << rec.zero_count << "," << num(rec.coarea_gap) << "\n";
    }
  }
  for (const auto& [k, zs] : rep.point_dumps) {
    write_zero_points_csv((dir / ("zeros_" + std::to_string(k) + ".csv")).string(), zs);
  }
  for (const auto& [k, cs] : rep.curve_dumps) {
    write_zero_curves_csv((dir / ("zeros_" + std::to_string(k) + ".csv")).string(), cs);
  }
  if (!rep.density_nodes.empty()) {
    auto os = open("density_grid.csv");
    const int m = static_cast<int>(rep.density_nodes.front().x.size());
    for (int i = 0; i < m; ++i) os << "x" << i + 1 << ",";
    os << "weight,density\n";
    for (std::size_t k = 0; k < rep.density_nodes.size(); ++k) {
      for (int i = 0; i < m; ++i) os << num(rep.density_nodes[k].x[i]) << ",";
      os << num(rep.density_nodes[k].weight) << "," << num(rep.density_values[k]) << "\n";
    }
  }
}

std::string SuiteReport::json() const {
  nlohmann::ordered_json out;
  out["pass"] = pass;
  out["experiments"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json e;
    e["experiment"] = r.config.experiment;
    e["pass"] = r.pass;
    e["samples"] = r.samples.size();
    e["discarded"] = r.discarded_indices.size();
    e["mean"] = num(r.mean);
    e["stderr"] = num(r.stderr_);
    e["rhs"] = num(r.rhs);
    if (!r.failure.empty()) e["failure"] = r.failure;
    out["experiments"].push_back(e);
  }
  return out.dump(2);
}

SuiteReport run_suite(const std::vector<ExperimentConfig>& configs) {
  SuiteReport suite;
  for (const auto& base : configs) {
    for (const auto& c : expand(base)) {
      try {
        suite.reports.push_back(run(c));
      } catch (const std::exception& e) {
        ExperimentReport failed;
        failed.config = c;
        failed.failure = e.what();
        suite.reports.push_back(std::move(failed));
      }
      if (!suite.reports.back().pass) suite.pass = false;
    }
  }
  return suite;
}

}  // namespace chernrice
