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

#include "chernrice/ensemble.hpp"

#include "chernrice/algebra.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace chernrice {

SectionBasis::SectionBasis(std::string name, ManifoldPtr manifold, int rank, int count,
                           SectionEvaluator evaluator, FiberMetric fiber_metric)
    : name_(std::move(name)),
      manifold_(std::move(manifold)),
      rank_(rank),
      count_(count),
      evaluator_(std::move(evaluator)),
      fiber_metric_(std::move(fiber_metric)) {
  if (!manifold_) throw std::invalid_argument("SectionBasis: null manifold");
  if (rank_ <= 0 || count_ < rank_) {
    throw std::invalid_argument("SectionBasis: need at least `rank` sections");
  }
}

SectionJet SectionBasis::jet(const Point& x, int order) const {
  const int m = dim();
  SectionJet out;
  out.value = Eigen::MatrixXd::Zero(rank_, count_);
  if (order >= 1) out.d1.assign(m, Eigen::MatrixXd::Zero(rank_, count_));
  if (order >= 2) out.d2.assign(m * m, Eigen::MatrixXd::Zero(rank_, count_));
  evaluator_(x, order, out);
  return out;
}

Eigen::MatrixXd SectionBasis::evaluate(const Point& x) const { return jet(x, 0).value; }

Eigen::MatrixXd SectionBasis::fiber_metric(const Point& x) const {
  return fiber_metric_ ? fiber_metric_(x) : Eigen::MatrixXd::Identity(rank_, rank_);
}

SectionBasis SectionBasis::mixed(const Eigen::MatrixXd& M, std::string name) const {
  if (M.rows() != count_) throw DimensionError("SectionBasis::mixed: M must have n rows");
  auto inner = evaluator_;
  const int r = rank_;
  const int n = count_;
  SectionEvaluator eval = [inner, M, r, n](const Point& x, int order, SectionJet& jet) {
    SectionJet base;
    base.value = Eigen::MatrixXd::Zero(r, n);
    if (order >= 1) base.d1.assign(jet.d1.size(), Eigen::MatrixXd::Zero(r, n));
    if (order >= 2) base.d2.assign(jet.d2.size(), Eigen::MatrixXd::Zero(r, n));
    inner(x, order, base);
    jet.value = base.value * M;
    for (std::size_t i = 0; i < jet.d1.size(); ++i) jet.d1[i] = base.d1[i] * M;
    for (std::size_t i = 0; i < jet.d2.size(); ++i) jet.d2[i] = base.d2[i] * M;
  };
  return SectionBasis(name.empty() ? name_ : std::move(name), manifold_, rank_,
                      static_cast<int>(M.cols()), std::move(eval), fiber_metric_);
}

SectionBasis SectionBasis::on_manifold(ManifoldPtr manifold) const {
  if (!manifold || manifold->dim() != dim()) {
    throw DimensionError("SectionBasis::on_manifold: dimension mismatch");
  }
  return SectionBasis(name_, std::move(manifold), rank_, count_, evaluator_, fiber_metric_);
}

Eigen::VectorXd SectionSample::value(const Point& x) const {
  return basis->evaluate(x) * coefficients;
}

Eigen::MatrixXd gram_matrix(const SectionBasis& basis) {
  const int n = basis.count();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
  const auto& mfd = *basis.manifold();
  // Accumulate per node in a fixed order.
  for (const auto& node : mfd.quadrature_nodes()) {
    const Eigen::MatrixXd V = basis.evaluate(node.x);
    const double w = node.weight * mfd.volume_density(node.x);
    G.noalias() += w * (V.transpose() * basis.fiber_metric(node.x) * V);
  }
  return 0.5 * (G + G.transpose());
}

SectionBasis orthonormalize(const SectionBasis& basis) {
  const Eigen::MatrixXd G = gram_matrix(basis);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const Eigen::VectorXd lambda = es.eigenvalues();
  if (lambda.minCoeff() <= 1e-12 * std::max(1.0, lambda.maxCoeff())) {
    throw DomainError("orthonormalize: sections are numerically dependent");
  }
  const Eigen::MatrixXd inv_sqrt =
      es.eigenvectors() * lambda.cwiseSqrt().cwiseInverse().asDiagonal() *
      es.eigenvectors().transpose();
  return basis.mixed(inv_sqrt);
}

SectionSample sample(const BasisPtr& basis, RandomStream& stream) {
  SectionSample s;
  s.basis = basis;
  s.coefficients.resize(basis->count());
  for (int k = 0; k < basis->count(); ++k) s.coefficients[k] = stream.normal();
  return s;
}

SectionSample sample(const BasisPtr& basis, std::uint64_t master_seed, std::uint64_t index) {
  RandomStream stream(master_seed, index);
  return sample(basis, stream);
}

Eigen::MatrixXd covariance_at(const SectionBasis& basis, const Point& x, const Point& y) {
  return basis.evaluate(x) * basis.evaluate(y).transpose();
}

CovarianceJet covariance_jet_at(const SectionBasis& basis, const Point& x) {
  const int m = basis.dim();
  const SectionJet jet = basis.jet(x, 2);
  CovarianceJet out;
  out.rank = basis.rank();
  out.dim = m;
  out.C = jet.value * jet.value.transpose();
  out.D.resize(m);
  out.E.resize(m * m);
  out.H.resize(m * m);
  for (int i = 0; i < m; ++i) {
    out.D[i] = jet.d1[i] * jet.value.transpose();
    for (int j = 0; j < m; ++j) {
      out.E[i * m + j] = jet.d1[i] * jet.d1[j].transpose();
      out.H[i * m + j] = jet.d2[i * m + j] * jet.value.transpose();
    }
  }
  return out;
}

AmplenessReport ampleness_check(const SectionBasis& basis, double threshold) {
  AmplenessReport report;
  report.threshold = threshold;
  report.min_singular_value = std::numeric_limits<double>::infinity();
  for (const auto& node : basis.manifold()->quadrature_nodes()) {
    const Eigen::MatrixXd V = basis.evaluate(node.x);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V);
    const double s = svd.singularValues().size() < basis.rank()
                         ? 0.0
                         : svd.singularValues()(basis.rank() - 1);
    ++report.points_checked;
    if (s < report.min_singular_value) {
      report.min_singular_value = s;
      report.worst_point = node.x;
    }
  }
  report.pass = report.min_singular_value > threshold ||
                (threshold == 0.0 && report.min_singular_value > 0.0);
  return report;
}

// ----------------------------------------------------------------- builtins

namespace {

// Tangential projections of the three ambient unit vectors onto T S^2,
// components in the coordinate frame (d_theta, d_phi).
void sphere_tangent_jet(const Point& x, int order, SectionJet& jet) {
  const double st = std::sin(x[0]), ct = std::cos(x[0]);
  const double sp = std::sin(x[1]), cp = std::cos(x[1]);
  auto& V = jet.value;
  V << ct * cp, ct * sp, -st,
       -sp / st, cp / st, 0.0;
  if (order < 1) return;
  const double st2 = st * st, st3 = st2 * st;
  jet.d1[0] << -st * cp, -st * sp, -ct,
               sp * ct / st2, -cp * ct / st2, 0.0;
  jet.d1[1] << -ct * sp, ct * cp, 0.0,
               -cp / st, -sp / st, 0.0;
  if (order < 2) return;
  const double q = (st2 + 2.0 * ct * ct) / st3;
  jet.d2[0] << -ct * cp, -ct * sp, st,
               -sp * q, cp * q, 0.0;
  jet.d2[1] << st * sp, -st * cp, 0.0,
               cp * ct / st2, sp * ct / st2, 0.0;
  jet.d2[2] = jet.d2[1];
  jet.d2[3] << -ct * cp, -ct * sp, 0.0,
               sp / st, -cp / st, 0.0;
}

// Trigonometric scalar functions {1, cos x^i, sin x^i} with exact jets.
struct TrigFunctions {
  int dim;
  int count() const { return 1 + 2 * dim; }

  double value(int a, const Point& x) const {
    if (a == 0) return 1.0;
    if (a <= dim) return std::cos(x[a - 1]);
    return std::sin(x[a - 1 - dim]);
  }
  double d1(int a, int i, const Point& x) const {
    if (a == 0) return 0.0;
    if (a <= dim) return (i == a - 1) ? -std::sin(x[i]) : 0.0;
    return (i == a - 1 - dim) ? std::cos(x[i]) : 0.0;
  }
  double d2(int a, int i, int j, const Point& x) const {
    if (a == 0 || i != j) return 0.0;
    if (a <= dim) return (i == a - 1) ? -std::cos(x[i]) : 0.0;
    return (i == a - 1 - dim) ? -std::sin(x[i]) : 0.0;
  }
};

// Sections phi_a e_alpha for every trig function phi_a and every
// reference vector e_alpha; column index 2a + alpha (rank 2).
SectionEvaluator trig_product_evaluator(int dim, int rank) {
  const TrigFunctions fns{dim};
  return [fns, dim, rank](const Point& x, int order, SectionJet& jet) {
    for (int a = 0; a < fns.count(); ++a) {
      for (int alpha = 0; alpha < rank; ++alpha) {
        const int col = a * rank + alpha;
        jet.value(alpha, col) = fns.value(a, x);
        if (order >= 1) {
          for (int i = 0; i < dim; ++i) jet.d1[i](alpha, col) = fns.d1(a, i, x);
        }
        if (order >= 2) {
          for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) jet.d2[i * dim + j](alpha, col) = fns.d2(a, i, j, x);
        }
      }
    }
  };
}

// Fixed, well-conditioned mixing of the 14 product sections; makes the
// correlator connection non-flat.
Eigen::MatrixXd torus3_mixing() {
  const int n = 14;
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      M(j, k) += 0.45 * std::sin(0.7 + 1.3 * j + 2.1 * k + 0.37 * j * k);
    }
  }
  return M;
}

// Rotation-type sections (cos t, sin t), (-sin t, cos t) in each coordinate
// plus the two constants; C(x, y) depends on x - y only.
void torus_stationary_jet(int dim, const Point& x, int order, SectionJet& jet) {
  jet.value(0, 0) = 1.0;
  jet.value(1, 1) = 1.0;
  for (int i = 0; i < dim; ++i) {
    const double c = std::cos(x[i]), s = std::sin(x[i]);
    const int k = 2 + 2 * i;
    jet.value.col(k) << c, s;
    jet.value.col(k + 1) << -s, c;
    if (order >= 1) {
      jet.d1[i].col(k) << -s, c;
      jet.d1[i].col(k + 1) << -c, -s;
    }
    if (order >= 2) {
      jet.d2[i * dim + i].col(k) << -c, -s;
      jet.d2[i * dim + i].col(k + 1) << s, -c;
    }
  }
}

}  // namespace

std::vector<std::string> builtin_ensemble_names() {
  return {"sphere2_tangent", "torus3_trig", "torus3_stationary", "torus2_flat"};
}

BasisPtr builtin_ensemble(const std::string& name, int resolution) {
  if (name == "sphere2_tangent") {
    auto mfd = builtin_sphere2(resolution > 0 ? resolution : 200);
    FiberMetric metric = [](const Point& x) {
      Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2);
      g(1, 1) = std::sin(x[0]) * std::sin(x[0]);
      return g;
    };
    return std::make_shared<SectionBasis>(name, mfd, 2, 3, sphere_tangent_jet, metric);
  }
  if (name == "torus3_trig") {
    auto mfd = builtin_torus(3, resolution);
    SectionBasis products(name, mfd, 2, 14, trig_product_evaluator(3, 2));
    return std::make_shared<SectionBasis>(products.mixed(torus3_mixing()));
  }
  if (name == "torus3_stationary") {
    auto mfd = builtin_torus(3, resolution);
    return std::make_shared<SectionBasis>(
        name, mfd, 2, 8, [](const Point& x, int order, SectionJet& jet) {
          torus_stationary_jet(3, x, order, jet);
        });
  }
  if (name == "torus2_flat") {
    auto mfd = builtin_torus(2, resolution);
    return std::make_shared<SectionBasis>(name, mfd, 2, 10, trig_product_evaluator(2, 2));
  }
  throw std::invalid_argument("unknown ensemble: " + name);
}

DriftField builtin_drift(const std::string& name, double amplitude, int rank, int dim) {
  DriftField drift;
  drift.name = name;
  drift.amplitude = amplitude;
  if (name == "none" || name.empty()) {
    drift.name = "none";
    drift.value = [rank](const Point&) { return Eigen::VectorXd::Zero(rank); };
    drift.jacobian = [rank, dim](const Point&) { return Eigen::MatrixXd::Zero(rank, dim); };
    return drift;
  }
  if (name == "sinsin") {
    if (rank != 2 || dim < 2) throw std::invalid_argument("drift sinsin needs rank 2, dim >= 2");
    drift.value = [amplitude](const Point& x) {
      Eigen::VectorXd v(2);
      v << amplitude * std::sin(x[0]), amplitude * std::sin(x[1]);
      return v;
    };
    drift.jacobian = [amplitude, dim](const Point& x) {
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, dim);
      J(0, 0) = amplitude * std::cos(x[0]);
      J(1, 1) = amplitude * std::cos(x[1]);
      return J;
    };
    return drift;
  }
  throw std::invalid_argument("unknown drift: " + name);
}

}  // namespace chernrice
