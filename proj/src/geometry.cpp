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

#include "chernrice/geometry.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>

namespace chernrice {

using Eigen::MatrixXd;

LinearJet LinearJet::identity(int r, int m) {
  LinearJet j;
  j.value = MatrixXd::Identity(r, r);
  j.d1.assign(m, MatrixXd::Zero(r, r));
  j.d2.assign(static_cast<std::size_t>(m) * m, MatrixXd::Zero(r, r));
  return j;
}

LinearJet LinearJet::times(const LinearJet& q) const {
  const int m = static_cast<int>(d1.size());
  LinearJet out;
  out.value = value * q.value;
  out.d1.resize(m);
  out.d2.resize(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) out.d1[i] = d1[i] * q.value + value * q.d1[i];
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const int k = i * m + j;
      out.d2[k] = d2[k] * q.value + d1[i] * q.d1[j] + d1[j] * q.d1[i] + value * q.d2[k];
    }
  }
  return out;
}

CovarianceJet transform_jet(const CovarianceJet& in, const LinearJet& G) {
  const int m = in.dim;
  CovarianceJet out;
  out.rank = static_cast<int>(G.value.rows());
  out.dim = m;
  const MatrixXd& g = G.value;
  out.C = g * in.C * g.transpose();
  out.D.resize(m);
  for (int i = 0; i < m; ++i) {
    out.D[i] = G.d1[i] * in.C * g.transpose() + g * in.D[i] * g.transpose();
  }
  out.E.resize(static_cast<std::size_t>(m) * m);
  out.H.resize(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const int k = i * m + j;
      out.E[k] = G.d1[i] * in.C * G.d1[j].transpose() +
                 G.d1[i] * in.D[j].transpose() * g.transpose() +
                 g * in.D[i] * G.d1[j].transpose() + g * in.E[k] * g.transpose();
      out.H[k] = G.d2[k] * in.C * g.transpose() + G.d1[i] * in.D[j] * g.transpose() +
                 G.d1[j] * in.D[i] * g.transpose() + g * in.H[k] * g.transpose();
    }
  }
  return out;
}

SquareRootJet sqrt_jet(const MatrixXd& C, const std::vector<MatrixXd>& dC,
                       const std::vector<MatrixXd>& d2C) {
  const int r = static_cast<int>(C.rows());
  const int m = static_cast<int>(dC.size());
  if ((C - C.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, C.cwiseAbs().maxCoeff())) {
    throw DomainError("sqrt_jet: covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (C + C.transpose()));
  const Eigen::VectorXd lam = eig.eigenvalues();
  if (!(lam.minCoeff() > 1e-14 * std::max(1.0, lam.maxCoeff()))) {
    throw DomainError("sqrt_jet: covariance is not positive definite");
  }
  const MatrixXd& Q = eig.eigenvectors();
  const Eigen::VectorXd s = lam.cwiseSqrt();
  auto sylvester = [&](const MatrixXd& Y) {
    MatrixXd Z = Q.transpose() * Y * Q;
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) Z(a, b) /= s[a] + s[b];
    return MatrixXd(Q * Z * Q.transpose());
  };

  SquareRootJet out;
  LinearJet& A = out.root;
  LinearJet& B = out.inverse;
  A.value = Q * s.asDiagonal() * Q.transpose();
  B.value = Q * s.cwiseInverse().asDiagonal() * Q.transpose();
  A.d1.resize(m);
  B.d1.resize(m);
  for (int i = 0; i < m; ++i) {
    A.d1[i] = sylvester(dC[i]);
    B.d1[i] = -B.value * A.d1[i] * B.value;
  }
  A.d2.resize(static_cast<std::size_t>(m) * m);
  B.d2.resize(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const int k = i * m + j;
      A.d2[k] = sylvester(d2C[k] - A.d1[i] * A.d1[j] - A.d1[j] * A.d1[i]);
      B.d2[k] = -B.d1[j] * A.d1[i] * B.value - B.value * A.d2[k] * B.value -
                B.value * A.d1[i] * B.d1[j];
    }
  }
  return out;
}

OrthoFrameField::OrthoFrameField(BasisPtr basis, RotationField rotation)
    : basis_(std::move(basis)), rotation_(std::move(rotation)) {
  if (!basis_) throw std::invalid_argument("OrthoFrameField: null basis");
}

OrthoFrameField OrthoFrameField::rotated(RotationField rotation) const {
  if (!rotation_) return OrthoFrameField(basis_, std::move(rotation));
  RotationField inner = rotation_;
  return OrthoFrameField(basis_, [inner, rotation](const Point& x) {
    return rotation(x).times(inner(x));
  });
}

namespace {

SquareRootJet reference_sqrt(const CovarianceJet& cj) {
  const int m = cj.dim;
  std::vector<MatrixXd> dC(m), d2C(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i) dC[i] = cj.D[i] + cj.D[i].transpose();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const int k = i * m + j;
      d2C[k] = cj.H[k] + cj.H[k].transpose() + cj.E[k] + cj.E[k].transpose();
    }
  }
  return sqrt_jet(cj.C, dC, d2C);
}

}  // namespace

LinearJet OrthoFrameField::component_map(const Point& x) const {
  const CovarianceJet cj = covariance_jet_at(*basis_, x);
  LinearJet B = reference_sqrt(cj).inverse;
  if (!rotation_) return B;
  return rotation_(x).times(B);
}

MatrixXd OrthoFrameField::frame_matrix(const Point& x) const {
  return component_map(x).value.inverse();
}

CovarianceJet OrthoFrameField::frame_covariance(const Point& x) const {
  const CovarianceJet cj = covariance_jet_at(*basis_, x);
  LinearJet T = reference_sqrt(cj).inverse;
  if (rotation_) T = rotation_(x).times(T);
  return transform_jet(cj, T);
}

Connection connection_coeffs(const OrthoFrameField& frame, const Point& x) {
  const CovarianceJet fj = frame.frame_covariance(x);
  Connection gamma(fj.dim);
  for (int i = 0; i < fj.dim; ++i) gamma[i] = -fj.D[i];
  return gamma;
}

std::vector<MatrixXd> connection_derivative(const OrthoFrameField& frame, const Point& x) {
  const CovarianceJet fj = frame.frame_covariance(x);
  const int m = fj.dim;
  std::vector<MatrixXd> out(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out[i * m + j] = -fj.hess(i, j) - fj.cross(i, j);
  return out;
}

MatrixXd tunneling(const OrthoFrameField& frame, const Point& x, const Point& y) {
  const MatrixXd Tx = frame.component_map(x).value;
  const MatrixXd Ty = frame.component_map(y).value;
  return Tx * covariance_at(*frame.basis(), x, y) * Ty.transpose();
}

namespace {

SkewFormMatrix pack(const std::vector<MatrixXd>& F, int r, int m) {
  SkewFormMatrix out(r, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const MatrixXd& f = F[i * m + j];
      for (int a = 0; a < r; ++a) {
        for (int b = 0; b < r; ++b) {
          out.set_entry(a, b, i, j, f(a, b));
          out.set_entry(a, b, j, i, -f(a, b));
        }
      }
    }
  }
  return out;
}

}  // namespace

SkewFormMatrix curvature_gauge(const OrthoFrameField& frame, const Point& x) {
  const CovarianceJet fj = frame.frame_covariance(x);
  const int m = fj.dim;
  const int r = fj.rank;
  Connection gamma(m);
  for (int i = 0; i < m; ++i) gamma[i] = -fj.D[i];
  auto dgamma = [&](int i, int j) -> MatrixXd { return -fj.hess(i, j) - fj.cross(i, j); };
  std::vector<MatrixXd> F(static_cast<std::size_t>(m) * m, MatrixXd::Zero(r, r));
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      F[i * m + j] = dgamma(j, i) - dgamma(i, j) + gamma[i] * gamma[j] - gamma[j] * gamma[i];
    }
  }
  return pack(F, r, m);
}

SkewFormMatrix curvature_stochastic(const OrthoFrameField& frame, const Point& x) {
  const CovarianceJet fj = frame.frame_covariance(x);
  const int m = fj.dim;
  const int r = fj.rank;
  LinearJet g = LinearJet::identity(r, m);
  for (int i = 0; i < m; ++i) g.d1[i] = -fj.D[i];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      g.d2[i * m + j] = 0.5 * (g.d1[i] * g.d1[j] + g.d1[j] * g.d1[i]);
  const CovarianceJet sj = transform_jet(fj, g);
  std::vector<MatrixXd> F(static_cast<std::size_t>(m) * m, MatrixXd::Zero(r, r));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) F[i * m + j] = sj.cross(i, j) - sj.cross(j, i);
  return pack(F, r, m);
}

MatrixXd synchronous_gauge(const Connection& gamma, const Point& x, const Point& y) {
  const int r = static_cast<int>(gamma.front().rows());
  MatrixXd S = MatrixXd::Zero(r, r);
  for (std::size_t i = 0; i < gamma.size(); ++i) S -= gamma[i] * (y[i] - x[i]);
  return S.exp();
}

DoubleForm euler_form(const OrthoFrameField& frame, const Point& x) {
  const int r = frame.rank();
  if (r % 2 != 0) throw DomainError("euler_form: odd rank");
  const SkewFormMatrix F = curvature_gauge(frame, x);
  SkewFormMatrix neg(r, F.base_dim());
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < r; ++b)
      for (int i = 0; i < F.base_dim(); ++i)
        for (int j = 0; j < F.base_dim(); ++j)
          neg.set_entry(a, b, i, j, -0.5 * (F(a, b, i, j) - F(b, a, i, j)));
  const double scale = std::pow(2.0 * std::numbers::pi, -(r / 2));
  return pfaffian_form(neg) * scale;
}

double euler_density(const OrthoFrameField& frame, const Point& x) {
  if (frame.rank() != frame.dim()) throw DimensionError("euler_density: rank must equal dim");
  return euler_form(frame, x).coeff(MultiIndex::range(frame.dim()), MultiIndex{});
}

IndependenceReport independence_check(const OrthoFrameField& frame, const Point& x,
                                      std::size_t samples, std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("independence_check: need at least two samples");
  const SectionBasis& basis = *frame.basis();
  const int r = frame.rank();
  const int m = frame.dim();
  const CovarianceJet cj = covariance_jet_at(basis, x);
  const LinearJet T = frame.component_map(x);
  const CovarianceJet fj = transform_jet(cj, T);
  const SectionJet sj = basis.jet(x, 1);

  // Frame-component value and derivative maps acting on the coefficients.
  const MatrixXd W = T.value * sj.value;
  std::vector<MatrixXd> dW(m);
  for (int i = 0; i < m; ++i) dW[i] = T.d1[i] * sj.value + T.value * sj.d1[i];
  const MatrixXd Cinv = fj.C.inverse();

  IndependenceReport rep;
  rep.samples = samples;
  rep.bound = 4.0 / std::sqrt(static_cast<double>(samples));
  rep.empirical = MatrixXd::Zero(r * m, r);
  BasisPtr bp = frame.basis();
  for (std::size_t s = 0; s < samples; ++s) {
    const SectionSample draw = sample(bp, seed, s);
    const Eigen::VectorXd w = W * draw.coefficients;
    for (int i = 0; i < m; ++i) {
      const Eigen::VectorXd nabla = dW[i] * draw.coefficients - fj.D[i] * Cinv * w;
      for (int a = 0; a < r; ++a) rep.empirical.row(a * m + i) += nabla[a] * w.transpose();
    }
  }
  rep.empirical /= static_cast<double>(samples);
  rep.max_empirical = rep.empirical.cwiseAbs().maxCoeff();
  for (int i = 0; i < m; ++i) {
    rep.max_analytic =
        std::max(rep.max_analytic, (fj.D[i] - fj.D[i] * Cinv * fj.C).cwiseAbs().maxCoeff());
    rep.max_raw_cross = std::max(rep.max_raw_cross, fj.D[i].cwiseAbs().maxCoeff());
  }
  rep.pass = rep.max_empirical <= rep.bound;
  return rep;
}

}  // namespace chernrice
