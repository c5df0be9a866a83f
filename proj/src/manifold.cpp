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

#include "chernrice/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace chernrice {

void ChartDomain::validate() const {
  if (axes.empty()) throw std::invalid_argument("ChartDomain: no axes");
  for (const auto& a : axes) {
    if (!(a.upper > a.lower)) throw std::invalid_argument("ChartDomain: empty interval");
    if (a.resolution <= 0) throw std::invalid_argument("ChartDomain: resolution must be positive");
    if (!a.periodic && a.resolution % 2 != 0) {
      throw std::invalid_argument("ChartDomain: Simpson axes need an even resolution");
    }
  }
}

double ChartDomain::diameter() const {
  double s = 0.0;
  for (const auto& a : axes) s += a.length() * a.length();
  return std::sqrt(s);
}

Point ChartDomain::wrap(const Point& x) const {
  Point y = x;
  for (int i = 0; i < dim(); ++i) {
    const auto& a = axes[i];
    if (a.periodic) {
      const double L = a.length();
      y[i] = a.lower + (x[i] - a.lower) - L * std::floor((x[i] - a.lower) / L);
    }
  }
  return y;
}

Point ChartDomain::difference(const Point& x, const Point& y) const {
  Point d = x - y;
  for (int i = 0; i < dim(); ++i) {
    const auto& a = axes[i];
    if (a.periodic) {
      const double L = a.length();
      d[i] -= L * std::round(d[i] / L);
    }
  }
  return d;
}

bool ChartDomain::contains(const Point& x) const {
  for (int i = 0; i < dim(); ++i) {
    const auto& a = axes[i];
    if (!a.periodic && (x[i] < a.lower || x[i] > a.upper)) return false;
  }
  return true;
}

ManifoldModel::ManifoldModel(std::string name, ChartDomain chart, Density volume_density,
                             std::string excluded_set)
    : name_(std::move(name)),
      chart_(std::move(chart)),
      volume_density_(std::move(volume_density)),
      excluded_set_(std::move(excluded_set)) {
  chart_.validate();
}

ManifoldModel ManifoldModel::with_resolution(int per_axis) const {
  ChartDomain chart = chart_;
  for (auto& a : chart.axes) {
    a.resolution = per_axis;
    if (!a.periodic && a.resolution % 2 != 0) ++a.resolution;
  }
  return ManifoldModel(name_, chart, volume_density_, excluded_set_);
}

namespace {

struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

AxisRule axis_rule(const ChartAxis& a) {
  AxisRule rule;
  const int n = a.resolution;
  const double h = a.length() / n;
  if (a.periodic) {
    for (int k = 0; k < n; ++k) {
      rule.nodes.push_back(a.lower + (k + 0.5) * h);
      rule.weights.push_back(h);
    }
    return rule;
  }
  for (int k = 0; k <= n; ++k) {
    if (a.degenerate_ends && (k == 0 || k == n)) continue;
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    rule.nodes.push_back(a.lower + k * h);
    rule.weights.push_back(w * h / 3.0);
  }
  return rule;
}

}  // namespace

std::vector<QuadratureNode> ManifoldModel::quadrature_nodes() const {
  const int m = dim();
  std::vector<AxisRule> rules;
  std::size_t total = 1;
  for (const auto& a : chart_.axes) {
    rules.push_back(axis_rule(a));
    total *= rules.back().nodes.size();
  }
  std::vector<QuadratureNode> out;
  out.reserve(total);
  std::vector<std::size_t> idx(m, 0);
  for (std::size_t count = 0; count < total; ++count) {
    QuadratureNode node{Point(m), 1.0};
    for (int i = 0; i < m; ++i) {
      node.x[i] = rules[i].nodes[idx[i]];
      node.weight *= rules[i].weights[idx[i]];
    }
    out.push_back(node);
    for (int i = m - 1; i >= 0; --i) {
      if (++idx[i] < rules[i].nodes.size()) break;
      idx[i] = 0;
    }
  }
  return out;
}

ManifoldPtr builtin_sphere2(int resolution) {
  ChartDomain chart;
  chart.axes.push_back({0.0, std::numbers::pi, resolution + (resolution % 2), false, true});
  chart.axes.push_back({0.0, 2.0 * std::numbers::pi, resolution, true, false});
  return std::make_shared<ManifoldModel>(
      "sphere2", chart, [](const Point& x) { return std::sin(x[0]); },
      "the two poles theta = 0 and theta = pi");
}

ManifoldPtr builtin_torus(int dim, int resolution) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("builtin_torus: dim must be 2 or 3");
  if (resolution <= 0) resolution = dim == 2 ? 200 : 64;
  ChartDomain chart;
  for (int i = 0; i < dim; ++i) {
    chart.axes.push_back({0.0, 2.0 * std::numbers::pi, resolution, true, false});
  }
  return std::make_shared<ManifoldModel>(
      dim == 2 ? "torus2" : "torus3", chart, [](const Point&) { return 1.0; }, "none");
}

ManifoldPtr builtin_manifold(const std::string& name, int resolution) {
  if (name == "sphere2") return builtin_sphere2(resolution > 0 ? resolution : 200);
  if (name == "torus2") return builtin_torus(2, resolution);
  if (name == "torus3") return builtin_torus(3, resolution);
  throw std::invalid_argument("unknown manifold: " + name);
}

double pairwise_sum(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  std::vector<double> level = values;
  while (level.size() > 1) {
    std::vector<double> next((level.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i) {
      const std::size_t a = 2 * i;
      next[i] = (a + 1 < level.size()) ? level[a] + level[a + 1] : level[a];
    }
    level.swap(next);
  }
  return level.front();
}

std::vector<double> evaluate_nodes(const std::vector<QuadratureNode>& nodes,
                                   const std::function<double(const Point&)>& fn, int workers) {
  std::vector<double> out(nodes.size());
  const std::size_t n = nodes.size();
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (workers == 1) {
    for (std::size_t k = 0; k < n; ++k) out[k] = fn(nodes[k].x);
    return out;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < n; k += workers) out[k] = fn(nodes[k].x);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

namespace {

double integrate_weighted(const ManifoldModel& mfd, const std::function<double(const Point&)>& f,
                          bool with_volume, int workers) {
  const auto nodes = mfd.quadrature_nodes();
  std::vector<double> values = evaluate_nodes(nodes, f, workers);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (!std::isfinite(values[k])) {
      throw std::domain_error("integrate: integrand is not finite at a quadrature node");
    }
    values[k] *= nodes[k].weight;
    if (with_volume) values[k] *= mfd.volume_density(nodes[k].x);
  }
  return pairwise_sum(values);
}

}  // namespace

double integrate_top_form(const ManifoldModel& mfd, const std::function<double(const Point&)>& f,
                          int workers) {
  return integrate_weighted(mfd, f, true, workers);
}

double integrate_chart_density(const ManifoldModel& mfd,
                               const std::function<double(const Point&)>& coefficient,
                               int workers) {
  return integrate_weighted(mfd, coefficient, false, workers);
}

}  // namespace chernrice
