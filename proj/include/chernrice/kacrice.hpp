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
 * @file kacrice.hpp
 * @brief Closed-form Kac-Rice densities for Gaussian sections.
 *
 * All quantities are in the orthonormal frame of an OrthoFrameField, where
 * the centered part w of the section has identity covariance. With an
 * optional drift u0 the section is v = u0 + u, with frame components
 * w0 + w.
 *
 * Given v(x) = 0 the derivative matrix dv(x) (rows: frame components,
 * columns: chart coordinates) is Gaussian with
 *   mean       nabla_i w0 = d_i w0 + Gamma_i w0,
 *   covariance K_{ai|bj} = E[d_i w_a d_j w_b] - (P_i P_j^T)_{ab},
 * where P_i = E[d_i w w^T]. The Gaussian density of v(x) at zero is
 * (2 pi)^{-r/2} exp(-|w0|^2 / 2).
 */
#pragma once

#include "chernrice/algebra.hpp"
#include "chernrice/ensemble.hpp"
#include "chernrice/geometry.hpp"

#include <Eigen/Dense>

#include <vector>

namespace chernrice {

struct ConditionalJetLaw {
  int rank = 0;
  int dim = 0;
  Eigen::MatrixXd mean;        // r x m
  Eigen::MatrixXd covariance;  // (r*m) x (r*m), row a*m + i
  double density_at_zero = 0.0;

  double K(int a, int i, int b, int j) const { return covariance(a * dim + i, b * dim + j); }
  /// Law of the r x r minor on the columns I0 (size r).
  GaussianMatrixLaw minor_law(const std::vector<int>& I0) const;
};

/// Conditional law of dv(x) given v(x) = 0. `drift` may be null.
ConditionalJetLaw conditional_law(const OrthoFrameField& frame, const Point& x,
                                  const DriftField* drift = nullptr);

/// rho(x) = E[Delta_{I0}(dv(x)) | v(x) = 0], where Delta_{I0} is the minor
/// on the columns I0 (zero-based, increasing, |I0| = r). Defaults to
/// {0, ..., r-1}.
double kacrice_density(const OrthoFrameField& frame, const Point& x,
                       const std::vector<int>& I0 = {}, const DriftField* drift = nullptr);

/// Coefficient of dx^1 ^ ... ^ dx^m in the expected current paired with
/// eta. For m = r: p(0) * rho * eta(x). For m = r + 1 and a 1-form eta:
/// p(0) * sum_k (-1)^k eta_k(x) rho_{I_k}(x), I_k the complement of k.
/// Throws DimensionError when deg eta != m - r.
double expected_current_density(const OrthoFrameField& frame, const Point& x,
                                const TestForm& eta, const DriftField* drift = nullptr);

struct JacobianG {
  double jacobian = 0.0;  // sqrt(det(T T^T))
  double G = 0.0;         // Delta_{I0}(T) / jacobian, zero when not surjective
  double sigma_min = 0.0;
  bool surjective = false;
};

/// Smallest singular value below which T counts as non-surjective.
inline constexpr double kSurjectivityTolerance = 1e-8;

/// T is r x m with r <= m; I0 as in kacrice_density.
JacobianG jacobian_and_G(const Eigen::MatrixXd& T, const std::vector<int>& I0 = {});

/// Minor of T on the columns I0.
double minor_det(const Eigen::MatrixXd& T, const std::vector<int>& I0);

}  // namespace chernrice
