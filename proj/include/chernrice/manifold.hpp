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
 * @file manifold.hpp
 * @brief Compact oriented manifolds given by a single chart box.
 *
 * Each model covers the manifold up to a measure-zero set with one
 * coordinate box. The chart orientation dx^1 ^ ... ^ dx^m is the manifold
 * orientation. Integration uses a tensor-product rule: composite midpoint on
 * periodic axes and composite Simpson on the others.
 */
#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace chernrice {

/// Chart point; at most eight coordinates, no heap allocation.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 8, 1>;

struct ChartAxis {
  double lower = 0.0;
  double upper = 1.0;
  /// Periodic axes: number of midpoint cells. Other axes: number of Simpson
  /// intervals (must be even).
  int resolution = 2;
  bool periodic = false;
  /// Both endpoints belong to the excluded set (polar axis of a sphere
  /// chart). Quadrature nodes there carry no weight and are never
  /// evaluated; smooth top forms have vanishing chart coefficients there.
  bool degenerate_ends = false;

  double length() const { return upper - lower; }
};

struct ChartDomain {
  std::vector<ChartAxis> axes;

  int dim() const { return static_cast<int>(axes.size()); }
  /// Throws std::invalid_argument on non-positive lengths or resolutions.
  void validate() const;
  /// Euclidean diameter of the coordinate box.
  double diameter() const;
  /// Wrap periodic coordinates into [lower, upper).
  Point wrap(const Point& x) const;
  /// x - y with periodic components reduced to (-L/2, L/2].
  Point difference(const Point& x, const Point& y) const;
  /// True when x lies in the closed box (periodic axes always pass).
  bool contains(const Point& x) const;
};

struct QuadratureNode {
  Point x;
  double weight;
};

class ManifoldModel {
 public:
  using Density = std::function<double(const Point&)>;

  ManifoldModel(std::string name, ChartDomain chart, Density volume_density,
                std::string excluded_set);

  const std::string& name() const { return name_; }
  const ChartDomain& chart() const { return chart_; }
  int dim() const { return chart_.dim(); }
  /// Riemannian volume density relative to dx^1 ^ ... ^ dx^m.
  double volume_density(const Point& x) const { return volume_density_(x); }
  const std::string& excluded_set() const { return excluded_set_; }

  /// Copy with every axis resolution replaced (Simpson axes rounded up to
  /// an even count).
  ManifoldModel with_resolution(int per_axis) const;

  /// Tensor-product nodes with zero-weight excluded nodes removed, in
  /// lexicographic order (last axis fastest).
  std::vector<QuadratureNode> quadrature_nodes() const;

 private:
  std::string name_;
  ChartDomain chart_;
  Density volume_density_;
  std::string excluded_set_;
};

using ManifoldPtr = std::shared_ptr<const ManifoldModel>;

/// Differential form of degree 0 or 1 on the chart, by its coefficients:
/// degree 0 returns a 1-vector (the function value), degree 1 returns the m
/// coefficients eta_i of sum_i eta_i dx^i.
struct TestForm {
  std::string name;
  int degree = 0;
  std::function<Eigen::VectorXd(const Point&)> coefficients;
};

/// Unit sphere, chart (theta, phi) in (0, pi) x [0, 2 pi), density sin(theta);
/// the poles are excluded. Default resolution 200 per axis.
ManifoldPtr builtin_sphere2(int resolution = 200);
/// (R / 2 pi Z)^dim for dim in {2, 3}, unit density. Default resolution 200
/// per axis for dim 2 and 64 for dim 3.
ManifoldPtr builtin_torus(int dim, int resolution = 0);
/// "sphere2", "torus2" or "torus3". Throws std::invalid_argument otherwise.
ManifoldPtr builtin_manifold(const std::string& name, int resolution = 0);

/// Sum of values in a fixed pairwise tree; bit-stable for a given input.
double pairwise_sum(const std::vector<double>& values);

/// Evaluate fn at every node, optionally over `workers` threads; results are
/// placed by node index so the output never depends on the worker count.
std::vector<double> evaluate_nodes(const std::vector<QuadratureNode>& nodes,
                                   const std::function<double(const Point&)>& fn,
                                   int workers = 1);

/// integral of f dV: quadrature of f * volume_density. Throws
/// std::domain_error when f is not finite at some node.
double integrate_top_form(const ManifoldModel& mfd, const std::function<double(const Point&)>& f,
                          int workers = 1);
/// integral of c dx^1 ^ ... ^ dx^m for a chart coefficient c.
double integrate_chart_density(const ManifoldModel& mfd,
                               const std::function<double(const Point&)>& coefficient,
                               int workers = 1);

}  // namespace chernrice
