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
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

namespace fs = std::filesystem;
using namespace chernrice;

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> samples;
  std::optional<int> workers;
  std::optional<int> resolution;
  std::string out = "results";
};

void apply(const Overrides& o, ExperimentConfig& c) {
  if (o.seed) c.seed = *o.seed;
  if (o.samples) c.samples = *o.samples;
  if (o.workers) c.workers = *o.workers;
  if (o.resolution) c.resolution = *o.resolution;
  validate(c);
}

ExperimentConfig resolve(const std::string& arg) {
  if (fs::exists(arg)) return load_config(arg);
  return experiment_preset(arg);
}

void print_report(const ExperimentReport& r) {
  std::cout << r.config.experiment << ": " << (r.pass ? "PASS" : "FAIL") << "  mean " << r.mean
            << " +- " << r.stderr_ << "  rhs " << r.rhs << "  discarded "
            << r.discarded_indices.size() << "/" << r.samples.size();
  if (!r.failure.empty()) std::cout << "  (" << r.failure << ")";
  std::cout << "\n";
}

int finish(const SuiteReport& suite, const fs::path& out) {
  for (const auto& r : suite.reports) {
    print_report(r);
    write_outputs(r, suite.reports.size() == 1 ? out : out / r.config.experiment);
  }
  fs::create_directories(out);
  std::ofstream(out / "summary.json") << suite.json() << "\n";
  return suite.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo checks of zero-locus currents against Kac-Rice densities"};
  app.require_subcommand(1);
  Overrides o;
  auto add_flags = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--samples", o.samples, "sample count");
    sub->add_option("--workers", o.workers, "worker threads");
    sub->add_option("--resolution", o.resolution, "quadrature nodes per axis");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
  };

  std::string config_arg;
  auto* run_cmd = app.add_subcommand("run", "run one config file or named experiment");
  run_cmd->add_option("config", config_arg, "config file or experiment name")->required();
  add_flags(run_cmd);

  std::string suite_dir;
  auto* suite_cmd = app.add_subcommand("suite", "run every *.cfg file of a directory");
  suite_cmd->add_option("dir", suite_dir, "directory of config files")->required();
  add_flags(suite_cmd);

  auto* list_cmd = app.add_subcommand("list-experiments", "list builtin experiments");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      for (const auto& [name, what] : experiment_catalog()) std::cout << name << "\t" << what << "\n";
      return 0;
    }
    std::vector<ExperimentConfig> configs;
    if (run_cmd->parsed()) {
      configs.push_back(resolve(config_arg));
    } else {
      std::vector<fs::path> files;
      for (const auto& entry : fs::directory_iterator(suite_dir)) {
        if (entry.path().extension() == ".cfg") files.push_back(entry.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) configs.push_back(load_config(f));
    }
    for (auto& c : configs) apply(o, c);
    return finish(run_suite(configs), o.out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
