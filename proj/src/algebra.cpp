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

#include "chernrice/algebra.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace chernrice {

// ---------------------------------------------------------------- MultiIndex

MultiIndex::MultiIndex(const std::vector<int>& indices) {
  int prev = -1;
  for (int i : indices) {
    if (i <= prev || i < 0 || i >= 32) {
      throw DomainError("MultiIndex: indices must be strictly increasing in [0, 32)");
    }
    mask_ |= (1u << i);
    prev = i;
  }
}

MultiIndex MultiIndex::range(int n) {
  return from_mask(n >= 32 ? 0xffffffffu : ((1u << n) - 1u));
}

int MultiIndex::degree() const { return std::popcount(mask_); }

int MultiIndex::max_index() const { return mask_ == 0 ? -1 : 31 - std::countl_zero(mask_); }

std::vector<int> MultiIndex::indices() const {
  std::vector<int> out;
  for (std::uint32_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
  return out;
}

std::vector<MultiIndex> MultiIndex::enumerate(int dim, int degree) {
  std::vector<MultiIndex> out;
  if (degree < 0 || degree > dim) return out;
  std::vector<int> idx(degree);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    out.emplace_back(idx);
    int k = degree - 1;
    while (k >= 0 && idx[k] == dim - degree + k) --k;
    if (k < 0) break;
    ++idx[k];
    for (int l = k + 1; l < degree; ++l) idx[l] = idx[l - 1] + 1;
  }
  return out;
}

int MultiIndex::shuffle_sign(const MultiIndex& other) const {
  if (mask_ & other.mask_) return 0;
  int inversions = 0;
  for (std::uint32_t m = mask_; m != 0; m &= m - 1) {
    const int i = std::countr_zero(m);
    inversions += std::popcount(other.mask_ & ((1u << i) - 1u));
  }
  return (inversions & 1) ? -1 : 1;
}

bool MultiIndex::operator<(const MultiIndex& o) const {
  std::uint32_t a = mask_;
  std::uint32_t b = o.mask_;
  while (a != 0 && b != 0) {
    const int ia = std::countr_zero(a);
    const int ib = std::countr_zero(b);
    if (ia != ib) return ia < ib;
    a &= a - 1;
    b &= b - 1;
  }
  return a == 0 && b != 0;
}

std::string MultiIndex::to_string() const {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (int i : indices()) {
    if (!first) os << ',';
    os << (i + 1);
    first = false;
  }
  os << '}';
  return os.str();
}

// ---------------------------------------------------------------- DoubleForm

DoubleForm::DoubleForm(int base_dim, int p, int q) : base_dim_(base_dim), p_(p), q_(q) {
  if (base_dim < 0 || base_dim > 31 || p < 0 || q < 0) {
    throw DimensionError("DoubleForm: invalid base dimension or bidegree");
  }
}

void DoubleForm::check_index(const MultiIndex& I, const MultiIndex& J) const {
  if (I.degree() != p_ || J.degree() != q_) {
    throw DimensionError("DoubleForm: multi-index degree does not match bidegree");
  }
  if (I.max_index() >= base_dim_ || J.max_index() >= base_dim_) {
    throw DimensionError("DoubleForm: index exceeds base dimension");
  }
}

double DoubleForm::coeff(const MultiIndex& I, const MultiIndex& J) const {
  auto it = coeffs_.find({I, J});
  return it == coeffs_.end() ? 0.0 : it->second;
}

void DoubleForm::add(const MultiIndex& I, const MultiIndex& J, double value) {
  check_index(I, J);
  if (value == 0.0) return;
  coeffs_[{I, J}] += value;
}

void DoubleForm::set(const MultiIndex& I, const MultiIndex& J, double value) {
  check_index(I, J);
  coeffs_[{I, J}] = value;
}

DoubleForm DoubleForm::pruned(double tol) const {
  DoubleForm out(base_dim_, p_, q_);
  for (const auto& [key, c] : coeffs_) {
    if (std::abs(c) > tol) out.coeffs_.emplace(key, c);
  }
  return out;
}

bool DoubleForm::approx_equal(const DoubleForm& other, double tol) const {
  if (p_ != other.p_ || q_ != other.q_) return false;
  const DoubleForm diff = (*this) - other;
  return diff.max_abs() <= tol;
}

double DoubleForm::max_abs() const {
  double m = 0.0;
  for (const auto& [key, c] : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

DoubleForm DoubleForm::operator+(const DoubleForm& o) const {
  if (p_ != o.p_ || q_ != o.q_ || base_dim_ != o.base_dim_) {
    throw DimensionError("DoubleForm: sum of forms with different shapes");
  }
  DoubleForm out = *this;
  for (const auto& [key, c] : o.coeffs_) out.coeffs_[key] += c;
  return out;
}

DoubleForm DoubleForm::operator-(const DoubleForm& o) const { return *this + o * -1.0; }

DoubleForm DoubleForm::operator*(double s) const {
  DoubleForm out(base_dim_, p_, q_);
  for (const auto& [key, c] : coeffs_) out.coeffs_.emplace(key, c * s);
  return out;
}

DoubleForm DoubleForm::from_matrix(const Eigen::MatrixXd& T, int base_dim) {
  const int dim = base_dim < 0 ? static_cast<int>(std::max(T.rows(), T.cols())) : base_dim;
  DoubleForm out(dim, 1, 1);
  for (int a = 0; a < T.rows(); ++a) {
    for (int i = 0; i < T.cols(); ++i) {
      out.add(MultiIndex::from_mask(1u << a), MultiIndex::from_mask(1u << i), T(a, i));
    }
  }
  return out;
}

DoubleForm DoubleForm::scalar(int base_dim, double value) {
  DoubleForm out(base_dim, 0, 0);
  out.set(MultiIndex{}, MultiIndex{}, value);
  return out;
}

DoubleForm wedge(const DoubleForm& a, const DoubleForm& b) {
  if (a.base_dim() != b.base_dim()) {
    throw DimensionError("wedge: base dimensions differ");
  }
  DoubleForm out(a.base_dim(), a.p() + b.p(), a.q() + b.q());
  for (const auto& [ka, ca] : a.coefficients()) {
    for (const auto& [kb, cb] : b.coefficients()) {
      const int s1 = ka.first.shuffle_sign(kb.first);
      if (s1 == 0) continue;
      const int s2 = ka.second.shuffle_sign(kb.second);
      if (s2 == 0) continue;
      out.add(ka.first | kb.first, ka.second | kb.second, s1 * s2 * ca * cb);
    }
  }
  return out;
}

DoubleForm wedge_power(const DoubleForm& a, int k) {
  if (k < 0) throw DimensionError("wedge_power: negative exponent");
  DoubleForm out = DoubleForm::scalar(a.base_dim(), 1.0);
  for (int i = 0; i < k; ++i) out = wedge(out, a);
  return out;
}

double trace_diag(const DoubleForm& a) {
  if (a.p() != a.q()) throw DimensionError("trace_diag: bidegree is not square");
  double tr = 0.0;
  for (const auto& [key, c] : a.coefficients()) {
    if (key.first == key.second) tr += c;
  }
  return tr;
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

int permutation_sign(const std::vector<int>& perm) {
  int inversions = 0;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    for (std::size_t j = i + 1; j < perm.size(); ++j) {
      if (perm[i] > perm[j]) ++inversions;
    }
  }
  return (inversions & 1) ? -1 : 1;
}

double det_via_power(const Eigen::MatrixXd& T) {
  if (T.rows() != T.cols()) throw DimensionError("det_via_power: matrix is not square");
  const int r = static_cast<int>(T.rows());
  const DoubleForm omega = DoubleForm::from_matrix(T, r);
  return trace_diag(wedge_power(omega, r)) / factorial(r);
}

// ------------------------------------------------------------ SkewFormMatrix

SkewFormMatrix::SkewFormMatrix(int rank, int base_dim)
    : rank_(rank), base_dim_(base_dim),
      data_(static_cast<std::size_t>(rank) * rank * base_dim * base_dim, 0.0) {
  if (rank <= 0 || base_dim <= 0) throw DimensionError("SkewFormMatrix: empty shape");
}

void SkewFormMatrix::set(int a, int b, int i, int j, double value) {
  data_[index(a, b, i, j)] = value;
  data_[index(b, a, i, j)] = -value;
  data_[index(a, b, j, i)] = -value;
  data_[index(b, a, j, i)] = value;
}

DoubleForm SkewFormMatrix::entry(int a, int b) const {
  DoubleForm out(base_dim_, 2, 0);
  for (int i = 0; i < base_dim_; ++i) {
    for (int j = i + 1; j < base_dim_; ++j) {
      out.add(MultiIndex::from_mask((1u << i) | (1u << j)), MultiIndex{}, (*this)(a, b, i, j));
    }
  }
  return out;
}

Eigen::MatrixXd SkewFormMatrix::slice(int i, int j) const {
  Eigen::MatrixXd out(rank_, rank_);
  for (int a = 0; a < rank_; ++a) {
    for (int b = 0; b < rank_; ++b) out(a, b) = (*this)(a, b, i, j);
  }
  return out;
}

SkewFormMatrix SkewFormMatrix::operator-() const {
  SkewFormMatrix out = *this;
  for (double& v : out.data_) v = -v;
  return out;
}

double SkewFormMatrix::antisymmetry_defect() const {
  double defect = 0.0;
  for (int a = 0; a < rank_; ++a)
    for (int b = 0; b < rank_; ++b)
      for (int i = 0; i < base_dim_; ++i)
        for (int j = 0; j < base_dim_; ++j) {
          const double v = (*this)(a, b, i, j);
          defect = std::max(defect, std::abs(v + (*this)(b, a, i, j)));
          defect = std::max(defect, std::abs(v + (*this)(a, b, j, i)));
        }
  return defect;
}

// ---------------------------------------------------------------- Pfaffians

namespace {

// Conventional Pfaffian (no sign prefactor) by expansion along the first row.
double pfaffian_expand(const Eigen::MatrixXd& A, std::vector<int>& rows) {
  if (rows.empty()) return 1.0;
  const int first = rows.front();
  double total = 0.0;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const double a = A(first, rows[k]);
    if (a == 0.0) continue;
    std::vector<int> rest;
    rest.reserve(rows.size() - 2);
    for (std::size_t l = 1; l < rows.size(); ++l) {
      if (l != k) rest.push_back(rows[l]);
    }
    const double sign = (k % 2 == 1) ? 1.0 : -1.0;
    total += sign * a * pfaffian_expand(A, rest);
  }
  return total;
}

struct PairedPermutation {
  std::vector<int> perm;
  int sign;
};

// Permutations of {0..r-1} with perm[2k] < perm[2k+1] for every k.
std::vector<PairedPermutation> paired_permutations(int r) {
  std::vector<int> perm(r);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<PairedPermutation> out;
  do {
    bool ok = true;
    for (int k = 0; k + 1 < r; k += 2) {
      if (perm[k] > perm[k + 1]) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back({perm, permutation_sign(perm)});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

void require_even_rank(int r, const char* where) {
  if (r <= 0 || r % 2 != 0) {
    throw DomainError(std::string(where) + ": rank must be positive and even");
  }
}

}  // namespace

double pfaffian_scalar(const Eigen::MatrixXd& F) {
  if (F.rows() != F.cols()) throw DimensionError("pfaffian_scalar: matrix is not square");
  const int r = static_cast<int>(F.rows());
  require_even_rank(r, "pfaffian_scalar");
  if ((F + F.transpose()).cwiseAbs().maxCoeff() > kSkewTolerance) {
    throw DomainError("pfaffian_scalar: matrix is not skew-symmetric");
  }
  const Eigen::MatrixXd S = 0.5 * (F - F.transpose());
  std::vector<int> rows(r);
  std::iota(rows.begin(), rows.end(), 0);
  const int h = r / 2;
  return ((h % 2) ? -1.0 : 1.0) * pfaffian_expand(S, rows);
}

DoubleForm pfaffian_form(const SkewFormMatrix& F) {
  const int r = F.rank();
  const int m = F.base_dim();
  require_even_rank(r, "pfaffian_form");
  const int h = r / 2;
  DoubleForm out(m, r, 0);
  if (r > m) return out;
  const auto paired = paired_permutations(r);
  const double prefactor = ((h % 2) ? -1.0 : 1.0) / factorial(h);
  for (const MultiIndex& I : MultiIndex::enumerate(m, r)) {
    const std::vector<int> idx = I.indices();
    double sum = 0.0;
    for (const auto& sigma : paired) {
      for (const auto& phi : paired) {
        double prod = sigma.sign * phi.sign;
        for (int k = 0; k < r && prod != 0.0; k += 2) {
          prod *= F(sigma.perm[k], sigma.perm[k + 1], idx[phi.perm[k]], idx[phi.perm[k + 1]]);
        }
        sum += prod;
      }
    }
    out.add(I, MultiIndex{}, prefactor * sum);
  }
  return out;
}

DoubleForm berezin_form(const SkewFormMatrix& F) {
  const int r = F.rank();
  const int m = F.base_dim();
  DoubleForm omega(std::max(m, r), 2, 2);
  for (int a = 0; a < r; ++a) {
    for (int b = a + 1; b < r; ++b) {
      const MultiIndex ab = MultiIndex::from_mask((1u << a) | (1u << b));
      for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
          omega.add(MultiIndex::from_mask((1u << i) | (1u << j)), ab, -F(a, b, i, j));
        }
      }
    }
  }
  return omega;
}

DoubleForm pfaffian_form_berezin(const SkewFormMatrix& F) {
  const int r = F.rank();
  const int m = F.base_dim();
  require_even_rank(r, "pfaffian_form_berezin");
  const int h = r / 2;
  DoubleForm out(m, r, 0);
  if (r > m) return out;
  const DoubleForm power = wedge_power(berezin_form(F), h);
  const MultiIndex full = MultiIndex::range(r);
  for (const MultiIndex& I : MultiIndex::enumerate(m, r)) {
    out.add(I, MultiIndex{}, power.coeff(I, full) / factorial(h));
  }
  return out;
}

// ------------------------------------------------------- Gaussian matrices

GaussianMatrixLaw::GaussianMatrixLaw(Eigen::MatrixXd mean, Eigen::MatrixXd covariance)
    : rank_(static_cast<int>(mean.rows())), mean_(std::move(mean)), cov_(std::move(covariance)) {
  if (mean_.rows() != mean_.cols()) throw DimensionError("GaussianMatrixLaw: mean is not square");
  const int n = rank_ * rank_;
  if (cov_.rows() != n || cov_.cols() != n) {
    throw DimensionError("GaussianMatrixLaw: covariance must be r^2 x r^2");
  }
  const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw DomainError("GaussianMatrixLaw: covariance is not symmetric");
  }
  if (n > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (cov_ + cov_.transpose()),
                                                      Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9 * scale) {
      throw DomainError("GaussianMatrixLaw: covariance is not positive semidefinite");
    }
  }
}

namespace {

Eigen::MatrixXd zero_mean_for(const Eigen::MatrixXd& covariance) {
  const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(covariance.rows()))));
  return Eigen::MatrixXd::Zero(r, r);
}

}  // namespace

GaussianMatrixLaw::GaussianMatrixLaw(const Eigen::MatrixXd& covariance)
    : GaussianMatrixLaw(zero_mean_for(covariance), covariance) {}

DoubleForm xi_from_covariance(const GaussianMatrixLaw& law) {
  const int r = law.rank();
  DoubleForm xi(r, 2, 2);
  for (int a = 0; a < r; ++a) {
    for (int b = a + 1; b < r; ++b) {
      const MultiIndex ab = MultiIndex::from_mask((1u << a) | (1u << b));
      for (int i = 0; i < r; ++i) {
        for (int j = i + 1; j < r; ++j) {
          const double value = law.K(a, i, b, j) - law.K(a, j, b, i);
          xi.add(ab, MultiIndex::from_mask((1u << i) | (1u << j)), value);
        }
      }
    }
  }
  return xi;
}

double expected_det(const GaussianMatrixLaw& law) {
  require_even_rank(law.rank(), "expected_det");
  if (law.mean().cwiseAbs().maxCoeff() != 0.0) {
    throw DomainError("expected_det: law must be centered; use expected_det_shifted");
  }
  const int h = law.rank() / 2;
  return trace_diag(wedge_power(xi_from_covariance(law), h)) / factorial(h);
}

double expected_det_shifted(const GaussianMatrixLaw& law) {
  const int r = law.rank();
  require_even_rank(r, "expected_det_shifted");
  const int h = r / 2;
  const DoubleForm mu = DoubleForm::from_matrix(law.mean(), r);
  const DoubleForm xi = xi_from_covariance(law);
  double total = 0.0;
  DoubleForm xi_power = DoubleForm::scalar(r, 1.0);
  for (int j = 0; j <= h; ++j) {
    const DoubleForm term = wedge(wedge_power(mu, 2 * h - 2 * j), xi_power);
    total += trace_diag(term) / (factorial(2 * h - 2 * j) * factorial(j));
    xi_power = wedge(xi_power, xi);
  }
  return total;
}

}  // namespace chernrice
