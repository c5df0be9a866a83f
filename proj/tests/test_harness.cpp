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
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace chernrice;
namespace fs = std::filesystem;

namespace {

std::size_t count_lines(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) ++n;
  return n;
}

ExperimentConfig small_sphere_run(std::uint64_t samples) {
  ExperimentConfig c = experiment_preset("stochastic-gbc");
  c.samples = samples;
  c.resolution = 64;
  return c;
}

}  // namespace

TEST_CASE("config text round trip") {
  for (const auto& [name, what] : experiment_catalog()) {
    CAPTURE(name);
    const ExperimentConfig c = experiment_preset(name);
    const std::string text = to_text(c);
    const ExperimentConfig back = parse_config(text);
    CHECK(back == c);
    CHECK(to_text(back) == text);
  }
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    ExperimentConfig c;
    c.seed = gen();
    c.samples = 1 + gen() % 100000;
    c.form_amplitude = u(gen) * std::pow(10.0, static_cast<int>(gen() % 40) - 20);
    c.drift_amplitude = u(gen);
    c.abs_tol = std::abs(u(gen)) * 1e-7;
    c.z = 0.1 + std::abs(u(gen));
    if (k % 2) c.expected_rhs = u(gen) / 3.0;
    if (k % 3 == 0) c.sweep = {0.0, u(gen), 1.0 / 3.0};
    c.density_grid = k % 5 == 0;
    CHECK(parse_config(to_text(c)) == c);
  }
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(
      "# comment line\n"
      "experiment = demo   # trailing comment\n"
      "  samples=25\n"
      "\n"
      "sweep = 0, 0.5 ,1\n"
      "expected_rhs = 0.25\n");
  CHECK(c.experiment == "demo");
  CHECK(c.samples == 25);
  CHECK(c.sweep == std::vector<double>{0.0, 0.5, 1.0});
  REQUIRE(c.expected_rhs.has_value());
  CHECK(*c.expected_rhs == 0.25);
  CHECK(c.ensemble == "sphere2_tangent");

  CHECK_THROWS_AS(parse_config("colour = blue\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("samples = 12x\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("samples = -3\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("samples = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("samples = 4\nsamples = 5\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just words\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("manifold = klein\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("density_grid = maybe\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("resolution = 3\n"), ConfigError);
  CHECK_THROWS_AS(experiment_preset("nope"), ConfigError);
}

TEST_CASE("builtin test forms") {
  const Point p = (Point(2) << 0.4, 1.3).finished();
  CHECK(builtin_test_form("zsq", 2.0, "sphere2").coefficients(p)[0] ==
        doctest::Approx(2.0 * std::cos(0.4) * std::cos(0.4)));
  CHECK(builtin_test_form("z", 1.0, "sphere2").degree == 0);
  CHECK(builtin_test_form("cos1cos2", 1.0, "torus2").coefficients(p)[0] ==
        doctest::Approx(std::cos(0.4) * std::cos(1.3)));
  const Point q = (Point(3) << 0.4, 1.3, 2.0).finished();
  const TestForm f = builtin_test_form("cosx1_dx2", 3.0, "torus3");
  CHECK(f.degree == 1);
  CHECK(f.coefficients(q)[0] == 0.0);
  CHECK(f.coefficients(q)[1] == doctest::Approx(3.0 * std::cos(0.4)));
  CHECK(builtin_test_form("dx3", 1.0, "torus3").coefficients(q)[2] == 1.0);
  CHECK_THROWS_AS(builtin_test_form("dx3", 1.0, "sphere2"), ConfigError);
}

TEST_CASE("sweep expansion") {
  const auto configs = expand(experiment_preset("drift-sweep"));
  REQUIRE(configs.size() == 4);
  CHECK(configs[2].drift_amplitude == 1.0);
  CHECK(configs[2].sweep.empty());
  CHECK(configs[0].experiment != configs[1].experiment);
  CHECK(expand(experiment_preset("euler-number")).size() == 1);
  CHECK_THROWS_AS(run(experiment_preset("drift-sweep")), ConfigError);
}

TEST_CASE("euler-number: every sample counts two") {
  const ExperimentReport r = run(experiment_preset("euler-number"));
  CHECK(r.pass);
  CHECK(r.discarded_indices.empty());
  for (const auto& s : r.samples) CHECK(s.value == 2.0);
  CHECK(r.rhs == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(r.stderr_ == 0.0);
}

TEST_CASE("reports do not depend on the worker count") {
  ExperimentConfig c = small_sphere_run(300);
  c.workers = 1;
  const ExperimentReport a = run(c);
  c.workers = 3;
  const ExperimentReport b = run(c);
  CHECK(a.numeric_fields() == b.numeric_fields());
  REQUIRE(a.samples.size() == b.samples.size());
  for (std::size_t k = 0; k < a.samples.size(); ++k) CHECK(a.samples[k].value == b.samples[k].value);

  ExperimentConfig t = experiment_preset("curve-case");
  t.samples = 6;
  t.resolution = 16;
  t.workers = 1;
  const ExperimentReport ta = run(t);
  t.workers = 4;
  CHECK(ta.numeric_fields() == run(t).numeric_fields());
}

TEST_CASE("batch means agree with the per-sample standard error") {
  const ExperimentReport r = run(small_sphere_run(2000));
  CHECK(r.kept == 2000);
  CHECK(std::abs(r.batch_stderr / r.stderr_ - 1.0) <= 0.2);
  CHECK(std::isnan(run(small_sphere_run(30)).batch_stderr));
}

TEST_CASE("pass rule and failure propagation") {
  ExperimentConfig c = small_sphere_run(50);
  c.expected_rhs = 5.0;
  const ExperimentReport bad = run(c);
  CHECK_FALSE(bad.rhs_ok);
  CHECK_FALSE(bad.pass);

  ExperimentConfig tight = small_sphere_run(50);
  tight.z = 1e-9;
  tight.abs_tol = 0.0;
  CHECK_FALSE(run(tight).statistic_ok);

  ExperimentConfig loose = small_sphere_run(50);
  loose.abs_tol = 10.0;
  CHECK(run(loose).pass);

  const SuiteReport empty = run_suite({});
  CHECK(empty.pass);
  CHECK(empty.reports.empty());
  CHECK(empty.json().find("\"pass\": true") != std::string::npos);

  ExperimentConfig missing = small_sphere_run(5);
  missing.ensemble = "no_such_ensemble";
  ExperimentConfig wrong_manifold = small_sphere_run(5);
  wrong_manifold.manifold = "torus2";
  const SuiteReport suite = run_suite({loose, c, missing, wrong_manifold});
  CHECK_FALSE(suite.pass);
  REQUIRE(suite.reports.size() == 4);
  CHECK(suite.reports[0].pass);
  CHECK_FALSE(suite.reports[2].failure.empty());
  CHECK_FALSE(suite.reports[3].failure.empty());
  CHECK_THROWS_AS(run(missing), ConfigError);
}

TEST_CASE("output files") {
  ExperimentConfig c = small_sphere_run(20);
  c.dump_zeros = 2;
  c.density_grid = true;
  c.resolution = 16;
  const ExperimentReport r = run(c);
  const fs::path dir = fs::temp_directory_path() / "chernrice_harness_test";
  fs::remove_all(dir);
  write_outputs(r, dir);
  CHECK(count_lines(dir / "samples.csv") == 21);
  CHECK(fs::exists(dir / "zeros_0.csv"));
  CHECK(fs::exists(dir / "zeros_1.csv"));
  CHECK_FALSE(fs::exists(dir / "zeros_2.csv"));
  CHECK(count_lines(dir / "density_grid.csv") == r.density_nodes.size() + 1);
  std::ifstream is(dir / "report.txt");
  std::stringstream ss;
  ss << is.rdbuf();
  CHECK(ss.str().find(to_text(c)) != std::string::npos);
  CHECK(ss.str().find(r.numeric_fields()) != std::string::npos);
  fs::remove_all(dir);
}
