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

#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace oracle {

std::vector<SignedPerm> all_permutations(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::vector<SignedPerm> out;
  do {
    int inversions = 0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) inversions += p[a] > p[b];
    out.push_back({p, inversions % 2 ? -1 : 1});
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

double leibniz_det(const MatrixXd& M) {
  const int n = static_cast<int>(M.rows());
  double sum = 0.0;
  for (const auto& sp : all_permutations(n)) {
    double prod = sp.sign;
    for (int a = 0; a < n; ++a) prod *= M(a, sp.perm[a]);
    sum += prod;
  }
  return sum;
}

namespace {

double pf_prefactor(int r) {
  const int h = r / 2;
  double f = 1.0;
  for (int k = 2; k <= h; ++k) f *= k;
  return ((h % 2) ? -1.0 : 1.0) / (std::pow(2.0, h) * f);
}

}  // namespace

double leibniz_pfaffian(const MatrixXd& F) {
  const int r = static_cast<int>(F.rows());
  double sum = 0.0;
  for (const auto& sp : all_permutations(r)) {
    double prod = sp.sign;
    for (int k = 0; k < r; k += 2) prod *= F(sp.perm[k], sp.perm[k + 1]);
    sum += prod;
  }
  return pf_prefactor(r) * sum;
}

double leibniz_pfaffian_form(const chernrice::SkewFormMatrix& F, const std::vector<int>& I) {
  const int r = F.rank();
  const int h = r / 2;
  // dx^{i_1} ^ ... ^ dx^{i_r} for an ordered tuple equals the sign of the
  // permutation taking it to I, or zero. Each 2-form is (1/2) sum_{i,j}.
  double sum = 0.0;
  for (const auto& sp : all_permutations(r)) {
    for (const auto& tp : all_permutations(r)) {
      double prod = sp.sign * tp.sign;
      for (int k = 0; k < h; ++k) {
        prod *= 0.5 * F(sp.perm[2 * k], sp.perm[2 * k + 1], I[tp.perm[2 * k]], I[tp.perm[2 * k + 1]]);
      }
      sum += prod;
    }
  }
  return pf_prefactor(r) * sum;
}

MatrixXd random_matrix(int rows, int cols, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  MatrixXd M(rows, cols);
  for (int a = 0; a < rows; ++a)
    for (int b = 0; b < cols; ++b) M(a, b) = nd(gen);
  return M;
}

MatrixXd random_skew(int r, std::mt19937_64& gen) {
  const MatrixXd M = random_matrix(r, r, gen);
  return M - M.transpose();
}

MatrixXd random_spd(int n, std::mt19937_64& gen, double lo, double hi) {
  std::uniform_real_distribution<double> ud(lo, hi);
  const MatrixXd Q = random_matrix(n, n, gen).householderQr().householderQ();
  VectorXd lam(n);
  for (int k = 0; k < n; ++k) lam[k] = ud(gen);
  return Q * lam.asDiagonal() * Q.transpose();
}

namespace {

MatrixXd covariance_factor(const MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
  const VectorXd lam = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * lam.asDiagonal();
}

}  // namespace

MeanEstimate mc_expected_det(const MatrixXd& mean, const MatrixXd& cov, std::size_t samples,
                             std::uint64_t seed) {
  const int r = static_cast<int>(mean.rows());
  const MatrixXd L = covariance_factor(cov);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  VectorXd z(r * r);
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t n = 0; n < samples; ++n) {
    for (int k = 0; k < r * r; ++k) z[k] = nd(gen);
    const VectorXd flat = L * z;
    MatrixXd S = mean;
    for (int a = 0; a < r; ++a)
      for (int i = 0; i < r; ++i) S(a, i) += flat[a * r + i];
    const double d = S.determinant();
    s1 += d;
    s2 += d * d;
  }
  const double N = static_cast<double>(samples);
  MeanEstimate est;
  est.mean = s1 / N;
  est.stderr_ = std::sqrt(std::max(0.0, s2 / N - est.mean * est.mean) / (N - 1.0));
  return est;
}

MatrixXd mc_covariance(const MatrixXd& cov, std::size_t samples, std::uint64_t seed) {
  const int n = static_cast<int>(cov.rows());
  const MatrixXd L = covariance_factor(cov);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  VectorXd z(n);
  MatrixXd acc = MatrixXd::Zero(n, n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (int k = 0; k < n; ++k) z[k] = nd(gen);
    const VectorXd v = L * z;
    acc += v * v.transpose();
  }
  return acc / static_cast<double>(samples);
}

MatrixXd central_difference(const std::function<MatrixXd(const chernrice::Point&)>& f,
                            const chernrice::Point& x, int i, double h) {
  chernrice::Point xp = x, xm = x;
  xp[i] += h;
  xm[i] -= h;
  return (f(xp) - f(xm)) / (2.0 * h);
}

std::vector<MatrixXd> round_sphere_levi_civita(double theta) {
  std::vector<MatrixXd> g(2, MatrixXd::Zero(2, 2));
  g[1](1, 0) = std::cos(theta);
  g[1](0, 1) = -std::cos(theta);
  return g;
}

chernrice::Point random_point(const chernrice::ChartDomain& chart, std::mt19937_64& gen,
                              double margin) {
  chernrice::Point x(chart.dim());
  for (int i = 0; i < chart.dim(); ++i) {
    const auto& a = chart.axes[i];
    std::uniform_real_distribution<double> ud(a.lower + margin, a.upper - margin);
    x[i] = ud(gen);
  }
  return x;
}

}  // namespace oracle
