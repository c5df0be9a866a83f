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
 * @file ensemble.hpp
 * @brief Finite-type Gaussian ensembles of sections.
 *
 * An ensemble is a finite list of sections s_1..s_n of a rank-r bundle,
 * written in a fixed reference trivialization over the chart. A random
 * section is u = sum_k c_k s_k with c_k iid standard normal, i.e. the stored
 * basis is orthonormal for the ensemble's inner product. Every covariance
 * and every derivative of a covariance at coincident points is then a finite
 * sum of products of section jets, with no finite differences involved.
 *
 * Builders supply exact first and second partial derivatives.
 */
#pragma once

#include "chernrice/manifold.hpp"
#include "chernrice/rng.hpp"

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace chernrice {

/// Values and partial derivatives of all n sections at one point, each as an
/// r x n matrix (column k is section k).
struct SectionJet {
  Eigen::MatrixXd value;
  std::vector<Eigen::MatrixXd> d1;  // size m
  std::vector<Eigen::MatrixXd> d2;  // size m*m, index i*m + j

  const Eigen::MatrixXd& second(int i, int j, int m) const { return d2[i * m + j]; }
};

/// Fills `jet` at x up to the requested order (0, 1 or 2). `jet` arrives
/// sized r x n for every block that the order requires.
using SectionEvaluator = std::function<void(const Point& x, int order, SectionJet& jet)>;
/// r x r positive definite fiber inner product in the reference
/// trivialization; only used for L2 Gram matrices.
using FiberMetric = std::function<Eigen::MatrixXd(const Point& x)>;

class SectionBasis {
 public:
  SectionBasis(std::string name, ManifoldPtr manifold, int rank, int count,
               SectionEvaluator evaluator, FiberMetric fiber_metric = {});

  const std::string& name() const { return name_; }
  const ManifoldPtr& manifold() const { return manifold_; }
  int rank() const { return rank_; }
  int count() const { return count_; }
  int dim() const { return manifold_->dim(); }

  SectionJet jet(const Point& x, int order) const;
  /// r x n evaluation matrix at x.
  Eigen::MatrixXd evaluate(const Point& x) const;
  Eigen::MatrixXd fiber_metric(const Point& x) const;

  /// Basis s'_k = sum_j s_j M(j, k), same span when M is invertible.
  SectionBasis mixed(const Eigen::MatrixXd& M, std::string name = {}) const;
  /// Same sections over a manifold with a different quadrature resolution.
  SectionBasis on_manifold(ManifoldPtr manifold) const;

 private:
  std::string name_;
  ManifoldPtr manifold_;
  int rank_;
  int count_;
  SectionEvaluator evaluator_;
  FiberMetric fiber_metric_;
};

using BasisPtr = std::shared_ptr<const SectionBasis>;

/// One draw of the ensemble.
struct SectionSample {
  Eigen::VectorXd coefficients;
  BasisPtr basis;

  /// u(x) in the reference trivialization.
  Eigen::VectorXd value(const Point& x) const;
};

/// Deterministic (non-random) section in the reference trivialization,
/// used as the mean of a non-centered ensemble.
struct DriftField {
  std::string name;
  double amplitude = 0.0;
  /// value(x) -> r-vector
  std::function<Eigen::VectorXd(const Point&)> value;
  /// jacobian(x) -> r x m matrix of partial derivatives
  std::function<Eigen::MatrixXd(const Point&)> jacobian;
};

/// Covariance data of u at a single point x, reference trivialization.
struct CovarianceJet {
  int rank = 0;
  int dim = 0;
  Eigen::MatrixXd C;               // E[u u^T]
  std::vector<Eigen::MatrixXd> D;  // D[i](a,b) = E[d_i u_a  u_b]
  std::vector<Eigen::MatrixXd> E;  // E[i*m+j](a,b) = E[d_i u_a  d_j u_b]
  std::vector<Eigen::MatrixXd> H;  // H[i*m+j](a,b) = E[d_ij u_a  u_b]

  const Eigen::MatrixXd& cross(int i, int j) const { return E[i * dim + j]; }
  const Eigen::MatrixXd& hess(int i, int j) const { return H[i * dim + j]; }
};

/// L2-orthonormal basis of the same span, using the manifold quadrature
/// and the basis fiber metric; symmetric inverse square root of the Gram
/// matrix. Throws DomainError when the Gram matrix is numerically singular.
SectionBasis orthonormalize(const SectionBasis& basis);
/// Gram matrix G(j,k) = integral of <s_j, s_k> dV.
Eigen::MatrixXd gram_matrix(const SectionBasis& basis);

/// iid standard normal coefficients from the stream.
SectionSample sample(const BasisPtr& basis, RandomStream& stream);
/// Sample with stream (master_seed, index).
SectionSample sample(const BasisPtr& basis, std::uint64_t master_seed, std::uint64_t index);

/// C(x, y) = sum_k s_k(x) s_k(y)^T.
Eigen::MatrixXd covariance_at(const SectionBasis& basis, const Point& x, const Point& y);
/// Exact covariance jet at x (second order).
CovarianceJet covariance_jet_at(const SectionBasis& basis, const Point& x);

struct AmplenessReport {
  bool pass = false;
  double threshold = 0.0;
  double min_singular_value = 0.0;
  Point worst_point;
  std::size_t points_checked = 0;
};

/// Default lower bound for the smallest singular value of the evaluation map.
inline constexpr double kAmplenessThreshold = 1e-4;

/// Minimum over the quadrature grid of sigma_min of the evaluation matrix.
AmplenessReport ampleness_check(const SectionBasis& basis,
                                double threshold = kAmplenessThreshold);

/// "sphere2_tangent", "torus3_trig", "torus3_stationary" or "torus2_flat".
/// resolution <= 0 keeps the manifold default. Throws std::invalid_argument
/// for unknown names.
BasisPtr builtin_ensemble(const std::string& name, int resolution = 0);
std::vector<std::string> builtin_ensemble_names();

/// Named drift sections; amplitude scales the whole field.
/// "sinsin" (rank 2 over a 2- or 3-dimensional chart): a (sin x^1, sin x^2).
/// "none": zero field.
DriftField builtin_drift(const std::string& name, double amplitude, int rank, int dim);

}  // namespace chernrice
