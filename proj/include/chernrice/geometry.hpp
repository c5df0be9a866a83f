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
 * @file geometry.hpp
 * @brief Metric, connection and curvature induced by an ensemble correlator.
 *
 * Frame convention. The reference trivialization carries the components c
 * of a random section. The orthonormal frame is e = e_ref * A(x) with A the
 * symmetric positive square root of C(x, x) = E[c c^T]; frame components are
 * w = A^{-1} c and have identity covariance. An optional rotation field R(x)
 * (det R = +1) turns w into R w, which is the frame e * R^T.
 *
 * Connection. nabla = d + Gamma acting on frame components with
 *   Gamma_i(a, b) = -E[d_i w_a  w_b],
 * the x-derivative of the tunneling matrix T(x, y) = E[w(x) w(y)^T] at x = y
 * with the sign flipped. Curvature F_ij = d_i Gamma_j - d_j Gamma_i +
 * [Gamma_i, Gamma_j], stored as F(a, b, i, j).
 */
#pragma once

#include "chernrice/algebra.hpp"
#include "chernrice/ensemble.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace chernrice {

/// Matrix-valued field with exact first and second partial derivatives at
/// one point.
struct LinearJet {
  Eigen::MatrixXd value;
  std::vector<Eigen::MatrixXd> d1;  // size m
  std::vector<Eigen::MatrixXd> d2;  // size m*m, index i*m + j

  static LinearJet identity(int r, int m);
  /// Product rule for (this * other).
  LinearJet times(const LinearJet& other) const;
};

/// Rotation field R(x) in SO(r) with jets.
using RotationField = std::function<LinearJet(const Point& x)>;

/// Covariance jet of w = G(x) c given the jet of c and of G.
CovarianceJet transform_jet(const CovarianceJet& jet, const LinearJet& G);

/// Symmetric square root of an SPD matrix together with the derivative
/// data obtained from the Sylvester relations
///   A dA_i + dA_i A = dC_i,
///   A d2A_ij + d2A_ij A = d2C_ij - dA_i dA_j - dA_j dA_i.
struct SquareRootJet {
  LinearJet root;     // A
  LinearJet inverse;  // A^{-1}
};
/// Throws DomainError when C is not symmetric positive definite.
SquareRootJet sqrt_jet(const Eigen::MatrixXd& C, const std::vector<Eigen::MatrixXd>& dC,
                       const std::vector<Eigen::MatrixXd>& d2C);

class OrthoFrameField {
 public:
  explicit OrthoFrameField(BasisPtr basis, RotationField rotation = {});

  const BasisPtr& basis() const { return basis_; }
  int rank() const { return basis_->rank(); }
  int dim() const { return basis_->dim(); }

  /// Frame e * R^T for an extra positively oriented rotation field.
  OrthoFrameField rotated(RotationField rotation) const;

  /// Jet of the map c -> w (reference components to frame components).
  LinearJet component_map(const Point& x) const;
  /// A(x): the frame vectors as columns in the reference trivialization.
  Eigen::MatrixXd frame_matrix(const Point& x) const;
  /// Covariance jet of the frame components w at x.
  CovarianceJet frame_covariance(const Point& x) const;

 private:
  BasisPtr basis_;
  RotationField rotation_;
};

using Connection = std::vector<Eigen::MatrixXd>;  // Gamma_i, i = 0..m-1

/// Gamma_i(a, b) = -E[d_i w_a  w_b] from the exact frame covariance jet.
Connection connection_coeffs(const OrthoFrameField& frame, const Point& x);
/// d_j Gamma_i at index i*m + j, from exact second-order jets.
std::vector<Eigen::MatrixXd> connection_derivative(const OrthoFrameField& frame, const Point& x);

/// T(x, y)(a, b) = E[w_a(x) w_b(y)].
Eigen::MatrixXd tunneling(const OrthoFrameField& frame, const Point& x, const Point& y);

/// F = d Gamma + Gamma ^ Gamma with d Gamma from exact jets.
SkewFormMatrix curvature_gauge(const OrthoFrameField& frame, const Point& x);
/// F_{ab|ij} = E[d_i w'_a d_j w'_b] - E[d_j w'_a d_i w'_b] in the frame
/// e * g synchronous at x, g(y) = exp(-sum_i Gamma_i(x) (y - x)^i).
SkewFormMatrix curvature_stochastic(const OrthoFrameField& frame, const Point& x);

/// g(y) = exp(-sum_i Gamma_i(x) (y - x)^i): the gauge change that makes the
/// frame synchronous at x.
Eigen::MatrixXd synchronous_gauge(const Connection& gamma_at_x, const Point& x, const Point& y);

/// (2 pi)^{-h} pf(-F(x)) as an (r, 0)-double-form over the chart. Throws
/// DomainError on odd rank.
DoubleForm euler_form(const OrthoFrameField& frame, const Point& x);
/// For r = m: the coefficient of dx^1 ^ ... ^ dx^m in euler_form.
double euler_density(const OrthoFrameField& frame, const Point& x);

struct IndependenceReport {
  std::size_t samples = 0;
  double bound = 0.0;               // 4 / sqrt(N)
  double max_empirical = 0.0;       // max |cov(nabla_i w_a, w_b)| from samples
  double max_analytic = 0.0;        // same, exact (zero by construction)
  double max_raw_cross = 0.0;       // max |cov(d_i w_a, w_b)|, exact
  Eigen::MatrixXd empirical;        // (r*m) x r, row a*m + i
  bool pass = false;
};

/// Cross-covariance between w(x) and the regression residual
/// nabla w = dw - cov(dw, w) cov(w)^{-1} w over `samples` draws.
IndependenceReport independence_check(const OrthoFrameField& frame, const Point& x,
                                      std::size_t samples, std::uint64_t seed);

}  // namespace chernrice
