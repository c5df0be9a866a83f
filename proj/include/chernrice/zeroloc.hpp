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
 * @file zeroloc.hpp
 * @brief Oriented zero loci of sections and their integration currents.
 *
 * Two cases are supported: m = r, where the zero set is a finite set of
 * signed points, and m = r + 1 with r = 2, where it is a union of oriented
 * closed curves.
 *
 * Orientation rule. With a_1, ..., a_r the chart gradients of the section
 * components in a positively oriented frame, a point zero carries
 * sign det[a_1; ...; a_r], and a curve is oriented by the tangent t with
 * det[a_1; ...; a_r; t] > 0. Both are unchanged under positively oriented
 * frame changes, so the reference trivialization can be used directly.
 * This rule lives in orientation_sign() and oriented_tangent() only.
 *
 * Curve integrals use, on each segment, the cubic Hermite interpolant of
 * the two vertices and their tangents, integrated by 3-point Gauss-Legendre.
 */
#pragma once

#include "chernrice/ensemble.hpp"
#include "chernrice/geometry.hpp"
#include "chernrice/manifold.hpp"

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace chernrice {

/// A section of a rank-r bundle in the reference trivialization with its
/// chart Jacobian.
struct SectionField {
  int rank = 0;
  ManifoldPtr manifold;
  /// Fills value (size r) and, when jacobian is not null, the r x m matrix
  /// of chart partial derivatives.
  std::function<void(const Point&, Eigen::VectorXd& value, Eigen::MatrixXd* jacobian)> evaluate;

  int dim() const { return manifold->dim(); }
};

/// v = u0 + u for a sample u and an optional drift u0.
SectionField section_field(const SectionSample& sample, const DriftField* drift = nullptr);

struct ZeroSearchOptions {
  /// Cells per axis of the seed grid; 0 picks 64 for m = 2 and 24 for m = 3.
  int seed_resolution = 0;
  double newton_tolerance = 1e-10;
  int newton_iterations = 60;
  /// |det du| floor for points, sigma_min(du) floor for curves.
  double transversality_floor = 1e-6;
  /// Deduplication radius as a fraction of the chart diameter.
  double dedupe_fraction = 1e-6;
  /// Distance kept from the ends of axes flagged degenerate_ends.
  double excluded_margin = 1e-7;
  /// Continuation step as a fraction of the seed cell size.
  double step_fraction = 0.25;
  /// Largest tangent turn (radians) accepted in one continuation step;
  /// larger turns halve the step, down to 1/64 of the nominal step.
  double max_turn_angle = 0.1;
  /// Upper bound on continuation steps per sample.
  int max_curve_steps = 200000;
};

struct ZeroPoint {
  Point location;
  int sign = 0;
  double jacobian_det = 0.0;  // det du in frame components
  double newton_residual = 0.0;
};

struct PointZeroSet {
  std::vector<ZeroPoint> points;
  bool transversal = true;
  std::string failure;  // empty when the set is usable

  bool ok() const { return transversal && failure.empty(); }
  int signed_total() const;
};

struct ZeroCurve {
  std::vector<Point> vertices;              // wrapped chart points
  std::vector<Eigen::VectorXd> tangents;    // unit, oriented
  std::vector<Eigen::MatrixXd> jacobians;   // r x m, reference components
  bool closed = false;
  double step = 0.0;
};

struct CurveZeroSet {
  std::vector<ZeroCurve> curves;
  bool transversal = true;
  std::string failure;

  bool ok() const { return transversal && failure.empty(); }
  std::size_t vertex_count() const;
};

/// +1, -1 or 0 for a square Jacobian.
int orientation_sign(const Eigen::MatrixXd& jacobian);
/// Unit t with det[a_1; a_2; t] > 0 for a 2 x 3 Jacobian; zero vector when
/// the rows are dependent.
Eigen::VectorXd oriented_tangent(const Eigen::MatrixXd& jacobian);

/// Zeros of a field with m = r. `frame`, when given, is used for the
/// reported Jacobian determinants.
PointZeroSet find_zero_points(const SectionField& field, const OrthoFrameField* frame = nullptr,
                              const ZeroSearchOptions& options = {});
PointZeroSet find_zero_points(const SectionSample& sample, const OrthoFrameField& frame,
                              const ZeroSearchOptions& options = {});

/// Zero curves of a field with m = 3, r = 2.
CurveZeroSet trace_zero_curves(const SectionField& field, const ZeroSearchOptions& options = {});
CurveZeroSet trace_zero_curves(const SectionSample& sample, const OrthoFrameField& frame,
                               const ZeroSearchOptions& options = {});

/// sum of sign * eta(point) for a 0-form.
double evaluate_current(const PointZeroSet& zeros, const TestForm& eta);
/// Oriented line integral of a 1-form over all curves.
double evaluate_current(const CurveZeroSet& zeros, const ChartDomain& chart, const TestForm& eta);

struct CoareaResult {
  double direct = 0.0;  // oriented line integral
  double coarea = 0.0;  // arclength integral of sum_k eta_k (-1)^k G_{I_k}(du)
};

/// Both evaluations of the line integral of eta over the zero curves; the
/// coarea route re-evaluates du on the interpolated curve.
CoareaResult coarea_check(const CurveZeroSet& zeros, const SectionField& field,
                          const TestForm& eta);

/// CSV dumps: x1..xm,sign,jacobian_det,residual and curve,vertex,x1..xm,t1..tm.
void write_zero_points_csv(const std::string& path, const PointZeroSet& zeros);
void write_zero_curves_csv(const std::string& path, const CurveZeroSet& zeros);

}  // namespace chernrice
