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
 * @file algebra.hpp
 * @brief Double-forms, Pfaffians and Gaussian determinant expectations.
 *
 * A (p,q)-double-form over an m-dimensional Euclidean space is an element of
 * Lambda^p V* (x) Lambda^q V*. Coefficients are keyed by pairs of strictly
 * increasing multi-indices. The product multiplies the two slots
 * independently:
 *
 *   (w (x) n) ^ (w' (x) n') = (w ^ w') (x) (n ^ n').
 *
 * Pfaffian convention: every Pfaffian in this library carries the (-1)^h
 * prefactor, so the Pfaffian of [[0,a],[-a,0]] is -a. The Euler form is built
 * from pf(-F), which makes end results independent of the convention.
 *
 * Indices are zero-based in code: index 0 stands for v^1.
 */
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace chernrice {

/// Raised when operands have incompatible dimensions or degrees.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an input violates a structural precondition (odd rank,
/// asymmetry, singular data).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Strictly increasing list of indices in [0, 32), stored as a bit mask.
class MultiIndex {
 public:
  MultiIndex() = default;
  /// Throws DomainError unless `indices` is strictly increasing and in range.
  explicit MultiIndex(const std::vector<int>& indices);

  static MultiIndex from_mask(std::uint32_t mask) {
    MultiIndex out;
    out.mask_ = mask;
    return out;
  }
  /// {0, 1, ..., n-1}
  static MultiIndex range(int n);

  std::uint32_t mask() const { return mask_; }
  int degree() const;
  bool contains(int i) const { return (mask_ >> i) & 1u; }
  int max_index() const;  // -1 when empty
  std::vector<int> indices() const;

  /// All multi-indices of the given degree over {0..dim-1}, lexicographic.
  static std::vector<MultiIndex> enumerate(int dim, int degree);

  /// Sign of the permutation that sorts the concatenation (this, other).
  /// Zero when the two sets intersect.
  int shuffle_sign(const MultiIndex& other) const;

  MultiIndex operator|(const MultiIndex& o) const { return from_mask(mask_ | o.mask_); }
  bool operator==(const MultiIndex& o) const { return mask_ == o.mask_; }
  bool operator!=(const MultiIndex& o) const { return mask_ != o.mask_; }
  /// Lexicographic on the sorted index lists; shorter prefixes first.
  bool operator<(const MultiIndex& o) const;

  std::string to_string() const;  // one-based, e.g. "{1,3}"

 private:
  std::uint32_t mask_ = 0;
};

/// Element of Lambda^p V* (x) Lambda^q V* over a base of dimension m.
class DoubleForm {
 public:
  using Key = std::pair<MultiIndex, MultiIndex>;

  DoubleForm() = default;
  DoubleForm(int base_dim, int p, int q);

  int base_dim() const { return base_dim_; }
  int p() const { return p_; }
  int q() const { return q_; }

  /// Coefficient of v^I (x) v^J (zero when absent).
  double coeff(const MultiIndex& I, const MultiIndex& J) const;
  /// Accumulate `value` into the coefficient of v^I (x) v^J.
  void add(const MultiIndex& I, const MultiIndex& J, double value);
  void set(const MultiIndex& I, const MultiIndex& J, double value);

  const std::map<Key, double>& coefficients() const { return coeffs_; }

  /// Drop coefficients with |c| <= tol.
  DoubleForm pruned(double tol = 0.0) const;
  /// Coefficient-wise comparison within an absolute tolerance.
  bool approx_equal(const DoubleForm& other, double tol) const;
  double max_abs() const;

  DoubleForm operator+(const DoubleForm& o) const;
  DoubleForm operator-(const DoubleForm& o) const;
  DoubleForm operator*(double s) const;
  DoubleForm operator-() const { return (*this) * -1.0; }

  /// (1,1)-form sum_{a,i} T(a,i) v^a (x) v^i over base max(rows, cols).
  static DoubleForm from_matrix(const Eigen::MatrixXd& T, int base_dim = -1);
  /// (0,0)-form with the given scalar.
  static DoubleForm scalar(int base_dim, double value);

 private:
  void check_index(const MultiIndex& I, const MultiIndex& J) const;

  int base_dim_ = 0;
  int p_ = 0;
  int q_ = 0;
  std::map<Key, double> coeffs_;
};

/// Double-form product; bidegrees add and each slot picks up its own
/// shuffle sign. Throws DimensionError on base dimension mismatch.
DoubleForm wedge(const DoubleForm& a, const DoubleForm& b);
/// a^k for k >= 0 (k = 0 gives the unit (0,0)-form).
DoubleForm wedge_power(const DoubleForm& a, int k);

/// Sum of diagonal coefficients of a (j,j)-form. Throws DimensionError when
/// p != q.
double trace_diag(const DoubleForm& a);

/// det T computed as (1/r!) tr (omega_T)^r.
double det_via_power(const Eigen::MatrixXd& T);

/// Skew r x r matrix whose entries are 2-forms over base_dim; stores the
/// coefficients F_{ab|ij} = F_ab(v_i, v_j) densely.
class SkewFormMatrix {
 public:
  SkewFormMatrix() = default;
  SkewFormMatrix(int rank, int base_dim);

  int rank() const { return rank_; }
  int base_dim() const { return base_dim_; }

  double operator()(int a, int b, int i, int j) const {
    return data_[index(a, b, i, j)];
  }
  /// Sets F_{ab|ij} and the three entries forced by antisymmetry.
  void set(int a, int b, int i, int j, double value);
  /// Sets the single entry F_{ab|ij} with no symmetry completion.
  void set_entry(int a, int b, int i, int j, double value) { data_[index(a, b, i, j)] = value; }

  /// Entry (a,b) as a (2,0)-double-form.
  DoubleForm entry(int a, int b) const;
  /// r x r scalar matrix F_{ab|ij} for fixed (i,j).
  Eigen::MatrixXd slice(int i, int j) const;

  SkewFormMatrix operator-() const;
  /// max |F_{ab|ij} + F_{ba|ij}| + |F_{ab|ij} + F_{ab|ji}|
  double antisymmetry_defect() const;

 private:
  std::size_t index(int a, int b, int i, int j) const {
    return ((static_cast<std::size_t>(a) * rank_ + b) * base_dim_ + i) * base_dim_ + j;
  }
  int rank_ = 0;
  int base_dim_ = 0;
  std::vector<double> data_;
};

/// Absolute tolerance on |F + F^T| accepted by the Pfaffian routines.
inline constexpr double kSkewTolerance = 1e-9;

/// Pfaffian with the (-1)^h prefactor. Throws DomainError on odd rank or
/// asymmetry beyond kSkewTolerance; the input is symmetrized otherwise.
double pfaffian_scalar(const Eigen::MatrixXd& F);

/// pf(F) in Lambda^r V*, component-wise: for each |I| = r the coefficient
/// is the Pfaffian of the restriction F^I, expanded as a double sum over
/// pair-ordered permutations of the bundle and form indices.
DoubleForm pfaffian_form(const SkewFormMatrix& F);
/// Same value through the Berezin form Omega_F = -sum_{a<b} F_ab (x) v^a^v^b:
/// pf(F)_I = (1/h!) [Omega_F^h]_{(I, {1..r})}.
DoubleForm pfaffian_form_berezin(const SkewFormMatrix& F);
/// Omega_F as a (2,2)-double-form: form indices in the first slot, bundle
/// indices in the second.
DoubleForm berezin_form(const SkewFormMatrix& F);

/// Law of a Gaussian r x r matrix S: mean mu and covariances
/// K[(a,i),(b,j)] = Cov(S_ai, S_bj), stored as an r^2 x r^2 matrix with row
/// index a*r + i.
class GaussianMatrixLaw {
 public:
  GaussianMatrixLaw(Eigen::MatrixXd mean, Eigen::MatrixXd covariance);
  /// Centered law.
  explicit GaussianMatrixLaw(const Eigen::MatrixXd& covariance);

  int rank() const { return rank_; }
  const Eigen::MatrixXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }
  double K(int a, int i, int b, int j) const { return cov_(a * rank_ + i, b * rank_ + j); }

 private:
  int rank_;
  Eigen::MatrixXd mean_;
  Eigen::MatrixXd cov_;
};

/// Xi_{ab|ij} = K_{ai|bj} - K_{aj|bi} as a (2,2)-double-form over base r.
DoubleForm xi_from_covariance(const GaussianMatrixLaw& law);

/// E[det S] for a centered law: (1/h!) tr Xi^h. Throws DomainError on odd
/// rank or nonzero mean.
double expected_det(const GaussianMatrixLaw& law);
/// E[det(mu + S)] = sum_j tr(mu^(2h-2j) ^ Xi^j) / ((2h-2j)! j!).
double expected_det_shifted(const GaussianMatrixLaw& law);

/// Sign of a permutation given as a vector of 0..n-1.
int permutation_sign(const std::vector<int>& perm);
double factorial(int n);

}  // namespace chernrice
