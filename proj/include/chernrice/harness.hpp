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

/**
 * @file harness.hpp
 * @brief Seeded Monte Carlo experiments comparing sampled zero-locus
 * currents with their Kac-Rice expectation.
 *
 * Config files are flat `key = value` text; `#` starts a comment. Keys:
 *
 *   experiment            label, also selects a preset in experiment_preset()
 *   manifold              sphere2 | torus2 | torus3 (must match the ensemble)
 *   ensemble              builtin ensemble name
 *   seed                  master seed (unsigned 64-bit)
 *   samples               number of samples N >= 1
 *   resolution            quadrature nodes per axis, 0 = manifold default
 *   seed_resolution       zero-search grid cells per axis, 0 = default
 *   test_form             builtin test form name (see builtin_test_form)
 *   form_amplitude        scale factor of the test form
 *   drift                 builtin drift name ("none" for centered runs)
 *   drift_amplitude       scale factor of the drift
 *   sweep                 optional comma list of drift amplitudes
 *   abs_tol               absolute tolerance on |mean - rhs|
 *   z                     standard-error multiplier
 *   expected_rhs          optional closed-form value for the right-hand side
 *   rhs_tol               tolerance of the quadrature against expected_rhs
 *   coarea_tol            per-sample bound on |direct - coarea| (curves)
 *   max_discard_fraction  discards above this fraction fail the run
 *   workers               worker threads
 *   dump_zeros            zero sets of the first k samples go to zeros_<k>.csv
 *   density_grid          true to write density_grid.csv
 */
#pragma once

#include "chernrice/kacrice.hpp"
#include "chernrice/zeroloc.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chernrice {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string experiment = "custom";
  std::string manifold = "sphere2";
  std::string ensemble = "sphere2_tangent";
  std::uint64_t seed = 1;
  std::uint64_t samples = 1000;
  int resolution = 0;
  int seed_resolution = 0;
  std::string test_form = "const";
  double form_amplitude = 1.0;
  std::string drift = "none";
  double drift_amplitude = 0.0;
  std::vector<double> sweep;
  double abs_tol = 0.0;
  double z = 4.0;
  std::optional<double> expected_rhs;
  double rhs_tol = 1e-3;
  double coarea_tol = 1e-4;
  double max_discard_fraction = 0.01;
  int workers = 1;
  int dump_zeros = 0;
  bool density_grid = false;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError on unknown keys, malformed values or invalid settings.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string to_text(const ExperimentConfig& config);
void validate(const ExperimentConfig& config);

/// "euler-number", "stochastic-gbc", "curve-case", "drift-sweep".
ExperimentConfig experiment_preset(const std::string& name);
std::vector<std::pair<std::string, std::string>> experiment_catalog();

/// Sphere: const, z, zsq (0-forms, z = cos theta). torus2: const,
/// cos1cos2 (0-forms). torus3: dx3, cosx1_dx2, dx3_dsinx1 (1-forms).
/// Each is multiplied by `amplitude`.
TestForm builtin_test_form(const std::string& name, double amplitude, const std::string& manifold);

/// One config per sweep amplitude, or the config itself without a sweep.
std::vector<ExperimentConfig> expand(const ExperimentConfig& config);

struct SampleRecord {
  std::uint64_t index = 0;
  double value = 0.0;
  bool discarded = false;
  std::string reason;
  std::size_t zero_count = 0;
  double coarea_gap = 0.0;
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<SampleRecord> samples;
  std::vector<std::uint64_t> discarded_indices;
  std::size_t kept = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  double batch_stderr = 0.0;  // batches of 10 (at least 20); NaN below 40 kept samples
  double value_min = 0.0;
  double value_max = 0.0;
  double rhs = 0.0;
  double max_coarea_gap = 0.0;
  bool statistic_ok = false;
  bool rhs_ok = true;
  bool coarea_ok = true;
  bool discards_ok = true;
  bool pass = false;
  std::string failure;
  double runtime_seconds = 0.0;

  std::vector<QuadratureNode> density_nodes;
  std::vector<double> density_values;
  std::vector<std::pair<std::uint64_t, PointZeroSet>> point_dumps;
  std::vector<std::pair<std::uint64_t, CurveZeroSet>> curve_dumps;

  /// All numeric results, formatted with %.17g; independent of worker count
  /// and wall time.
  std::string numeric_fields() const;
  /// numeric_fields() plus config echo, discard list and runtime.
  std::string summary() const;
};

ExperimentReport run(const ExperimentConfig& config);

/// report.txt, samples.csv, zeros_<k>.csv and density_grid.csv in `dir`.
void write_outputs(const ExperimentReport& report, const std::filesystem::path& dir);

struct SuiteReport {
  std::vector<ExperimentReport> reports;
  bool pass = true;
  /// JSON summary: one object per experiment plus the overall status.
  std::string json() const;
};

/// Runs every config (after expand()); exceptions become failed reports.
SuiteReport run_suite(const std::vector<ExperimentConfig>& configs);

}  // namespace chernrice
