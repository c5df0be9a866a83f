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

#include "chernrice/kacrice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace chernrice {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::vector<int> default_columns(int r, const std::vector<int>& I0) {
  if (!I0.empty()) return I0;
  std::vector<int> out(r);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

void check_columns(const std::vector<int>& I0, int r, int m) {
  if (static_cast<int>(I0.size()) != r) throw DimensionError("column set must have r entries");
  for (std::size_t k = 0; k < I0.size(); ++k) {
    if (I0[k] < 0 || I0[k] >= m || (k > 0 && I0[k] <= I0[k - 1])) {
      throw DimensionError("column set must be increasing and inside the chart dimension");
    }
  }
}

}  // namespace

GaussianMatrixLaw ConditionalJetLaw::minor_law(const std::vector<int>& I0) const {
  check_columns(I0, rank, dim);
  const int r = rank;
  MatrixXd mu(r, r), cov(r * r, r * r);
  for (int a = 0; a < r; ++a) {
    for (int k = 0; k < r; ++k) {
      mu(a, k) = mean(a, I0[k]);
      for (int b = 0; b < r; ++b)
        for (int l = 0; l < r; ++l) cov(a * r + k, b * r + l) = K(a, I0[k], b, I0[l]);
    }
  }
  return GaussianMatrixLaw(mu, 0.5 * (cov + cov.transpose()));
}

ConditionalJetLaw conditional_law(const OrthoFrameField& frame, const Point& x,
                                  const DriftField* drift) {
  const int r = frame.rank();
  const int m = frame.dim();
  const CovarianceJet cj = covariance_jet_at(*frame.basis(), x);
  const LinearJet T = frame.component_map(x);
  const CovarianceJet fj = transform_jet(cj, T);

  ConditionalJetLaw law;
  law.rank = r;
  law.dim = m;
  law.covariance.resize(r * m, r * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const MatrixXd block = fj.cross(i, j) - fj.D[i] * fj.D[j].transpose();
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) law.covariance(a * m + i, b * m + j) = block(a, b);
    }
  }
  law.covariance = 0.5 * (law.covariance + law.covariance.transpose());
  law.mean = MatrixXd::Zero(r, m);
  double w0_sq = 0.0;
  if (drift != nullptr && drift->value) {
    const VectorXd u0 = drift->value(x);
    const MatrixXd du0 = drift->jacobian(x);
    const VectorXd w0 = T.value * u0;
    for (int i = 0; i < m; ++i) {
      const VectorXd dw0 = T.d1[i] * u0 + T.value * du0.col(i);
      law.mean.col(i) = dw0 - fj.D[i] * w0;
    }
    w0_sq = w0.squaredNorm();
  }
  law.density_at_zero = std::pow(2.0 * std::numbers::pi, -0.5 * r) * std::exp(-0.5 * w0_sq);
  return law;
}

double kacrice_density(const OrthoFrameField& frame, const Point& x, const std::vector<int>& I0,
                       const DriftField* drift) {
  const ConditionalJetLaw law = conditional_law(frame, x, drift);
  const GaussianMatrixLaw minor = law.minor_law(default_columns(law.rank, I0));
  if (drift == nullptr) return expected_det(minor);
  return expected_det_shifted(minor);
}

double expected_current_density(const OrthoFrameField& frame, const Point& x, const TestForm& eta,
                                const DriftField* drift) {
  const int r = frame.rank();
  const int m = frame.dim();
  if (eta.degree != m - r) throw DimensionError("test form degree must equal dim - rank");
  const VectorXd c = eta.coefficients(x);
  const ConditionalJetLaw law = conditional_law(frame, x, drift);
  auto rho = [&](const std::vector<int>& cols) {
    const GaussianMatrixLaw minor = law.minor_law(cols);
    return drift == nullptr ? expected_det(minor) : expected_det_shifted(minor);
  };
  if (eta.degree == 0) return law.density_at_zero * c[0] * rho(default_columns(r, {}));
  if (eta.degree != 1) throw DimensionError("test forms of degree above one are not supported");
  double sum = 0.0;
  for (int k = 0; k < m; ++k) {
    if (c[k] == 0.0) continue;
    std::vector<int> cols;
    for (int i = 0; i < m; ++i)
      if (i != k) cols.push_back(i);
    sum += ((k % 2) ? -1.0 : 1.0) * c[k] * rho(cols);
  }
  return law.density_at_zero * sum;
}

double minor_det(const MatrixXd& T, const std::vector<int>& I0) {
  const int r = static_cast<int>(T.rows());
  check_columns(I0, r, static_cast<int>(T.cols()));
  MatrixXd S(r, r);
  for (int k = 0; k < r; ++k) S.col(k) = T.col(I0[k]);
  return S.determinant();
}

JacobianG jacobian_and_G(const MatrixXd& T, const std::vector<int>& I0) {
  const int r = static_cast<int>(T.rows());
  if (T.cols() < r) throw DimensionError("jacobian_and_G: need rows <= cols");
  JacobianG out;
  Eigen::JacobiSVD<MatrixXd> svd(T);
  const VectorXd s = svd.singularValues();
  out.sigma_min = r == 0 ? 0.0 : s[r - 1];
  out.jacobian = s.head(r).prod();
  out.surjective = out.sigma_min >= kSurjectivityTolerance;
  if (out.surjective) {
    out.G = std::clamp(minor_det(T, default_columns(r, I0)) / out.jacobian, -1.0, 1.0);
  }
  return out;
}

}  // namespace chernrice
