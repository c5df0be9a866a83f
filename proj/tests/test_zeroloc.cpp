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

#include "chernrice/zeroloc.hpp"
#include "doctest.h"
#include "support/frames.hpp"
#include "support/oracles.hpp"

#include <cmath>
#include <numbers>
#include <cstdio>
#include <fstream>
#include <random>

using namespace chernrice;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kPi = std::numbers::pi;

SectionField shifted_sines(double s1, double s2) {
  SectionField f;
  f.rank = 2;
  f.manifold = builtin_torus(3, 16);
  f.evaluate = [s1, s2](const Point& x, VectorXd& v, MatrixXd* J) {
    v.resize(2);
    v << std::sin(x[0] + s1), std::sin(x[1] + s2);
    if (J) {
      J->setZero(2, 3);
      (*J)(0, 0) = std::cos(x[0] + s1);
      (*J)(1, 1) = std::cos(x[1] + s2);
    }
  };
  return f;
}

TestForm dx3_form() {
  return {"dx3", 1, [](const Point&) { return VectorXd::Unit(3, 2); }};
}

TestForm cosx1_dx2_form() {
  return {"cosx1_dx2", 1, [](const Point& x) {
            VectorXd e = VectorXd::Zero(3);
            e[1] = std::cos(x[0]);
            return e;
          }};
}

TestForm mixed_form() {
  return {"mixed", 1, [](const Point& x) {
            VectorXd e(3);
            e << 0.3 + std::sin(x[1]), std::cos(x[0]) * std::cos(x[2]), 1.0 + 0.5 * std::sin(x[0] + x[1]);
            return e;
          }};
}

TestForm zero_form(int degree, int m) {
  return {"zero", degree, [degree, m](const Point&) {
            return VectorXd::Zero(degree == 0 ? 1 : m).eval();
          }};
}

TestForm sphere_z() {
  return {"z", 0, [](const Point& x) { return VectorXd::Constant(1, std::cos(x[0])); }};
}

double max_residual(const SectionField& field, const PointZeroSet& zs) {
  double worst = 0.0;
  VectorXd v;
  for (const auto& z : zs.points) {
    field.evaluate(z.location, v, nullptr);
    worst = std::max(worst, v.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

TEST_CASE("orientation helpers") {
  MatrixXd J(2, 2);
  J << 1, 0, 0, 1;
  CHECK(orientation_sign(J) == 1);
  J << 0, 1, 1, 0;
  CHECK(orientation_sign(J) == -1);
  CHECK(orientation_sign(MatrixXd::Zero(2, 2)) == 0);

  std::mt19937_64 gen(5);
  for (int k = 0; k < 50; ++k) {
    const MatrixXd A = oracle::random_matrix(2, 3, gen);
    const VectorXd t = oriented_tangent(A);
    CHECK(t.norm() == doctest::Approx(1.0));
    CHECK((A * t).norm() <= 1e-12);
    MatrixXd full(3, 3);
    full << A, t.transpose();
    CHECK(full.determinant() > 0.0);
    const MatrixXd P = oracle::random_spd(2, gen, 0.5, 2.0);
    CHECK((oriented_tangent(P * A) - t).norm() <= 1e-12);
  }
  CHECK_THROWS_AS(oriented_tangent(MatrixXd::Identity(2, 2)), DimensionError);
}

TEST_CASE("single ambient field on the sphere has two positive zeros at plus and minus v") {
  const BasisPtr basis = builtin_ensemble("sphere2_tangent", 64);
  const OrthoFrameField frame(basis);
  const SectionSample s{VectorXd::Unit(3, 0), basis};
  const PointZeroSet zs = find_zero_points(s, frame);
  REQUIRE(zs.ok());
  REQUIRE(zs.points.size() == 2);
  const ChartDomain& chart = basis->manifold()->chart();
  for (double phi : {0.0, kPi}) {
    const Point target = (Point(2) << kPi / 2, phi).finished();
    int hits = 0;
    for (const auto& z : zs.points) hits += chart.difference(z.location, target).norm() <= 1e-9;
    CHECK(hits == 1);
  }
  for (const auto& z : zs.points) {
    CHECK(z.sign == 1);
    CHECK(z.jacobian_det > 0.0);
  }
  CHECK(zs.signed_total() == 2);

  const SectionSample tilted{(VectorXd(3) << 0.3, -1.2, 0.7).finished(), basis};
  const PointZeroSet zt = find_zero_points(tilted, frame);
  REQUIRE(zt.points.size() == 2);
  const Eigen::Vector3d v = tilted.coefficients.normalized();
  for (const auto& z : zt.points) {
    const double th = z.location[0], ph = z.location[1];
    const Eigen::Vector3d p(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
    CHECK(std::abs(std::abs(p.dot(v)) - 1.0) <= 1e-9);
    CHECK(z.sign == 1);
  }
}

TEST_CASE("every sphere sample has signed zero total two, residuals at tolerance") {
  const BasisPtr basis = builtin_ensemble("sphere2_tangent", 64);
  const OrthoFrameField frame(basis);
  int discarded = 0;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const SectionSample s = sample(basis, 77, k);
    const PointZeroSet zs = find_zero_points(s, frame);
    if (!zs.ok()) {
      ++discarded;
      continue;
    }
    CHECK(zs.signed_total() == 2);
    CHECK(max_residual(section_field(s), zs) <= 1e-10);
    for (const auto& z : zs.points) {
      CHECK(z.newton_residual <= 1e-10);
      CHECK(std::abs(z.jacobian_det) > 1e-6);
      CHECK((z.jacobian_det > 0) == (z.sign > 0));
    }
  }
  CHECK(discarded <= 1);
}

TEST_CASE("doubling the seed grid does not change sphere zero counts") {
  const BasisPtr basis = builtin_ensemble("sphere2_tangent", 64);
  const OrthoFrameField frame(basis);
  ZeroSearchOptions coarse, fine;
  coarse.seed_resolution = 32;
  fine.seed_resolution = 64;
  for (std::uint64_t k = 0; k < 100; ++k) {
    const SectionSample s = sample(basis, 91, k);
    const PointZeroSet a = find_zero_points(s, frame, coarse);
    const PointZeroSet b = find_zero_points(s, frame, fine);
    CHECK(a.points.size() == b.points.size());
    CHECK(a.signed_total() == b.signed_total());
  }
}

TEST_CASE("zero signs do not depend on the frame or on a chart translation") {
  const BasisPtr basis = builtin_ensemble("sphere2_tangent", 64);
  const OrthoFrameField frame(basis);
  const OrthoFrameField turned = frame.rotated(oracle::angle_rotation(2, 2, 0.8, 3));
  for (std::uint64_t k = 0; k < 20; ++k) {
    const SectionSample s = sample(basis, 13, k);
    const PointZeroSet a = find_zero_points(s, frame);
    const PointZeroSet b = find_zero_points(s, turned);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK(a.points[i].sign == b.points[i].sign);
      CHECK((b.points[i].jacobian_det > 0) == (b.points[i].sign > 0));
    }

    const double shift = 0.7;
    SectionField moved = section_field(s);
    const auto inner = moved.evaluate;
    moved.evaluate = [inner, shift](const Point& x, VectorXd& v, MatrixXd* J) {
      Point y = x;
      y[1] += shift;
      inner(y, v, J);
    };
    const PointZeroSet c = find_zero_points(moved);
    REQUIRE(c.points.size() == a.points.size());
    int matched = 0;
    for (const auto& zc : c.points) {
      Point y = zc.location;
      y[1] += shift;
      for (const auto& za : a.points) {
        if (basis->manifold()->chart().difference(y, za.location).norm() < 1e-8) {
          CHECK(zc.sign == za.sign);
          ++matched;
        }
      }
    }
    CHECK(matched == static_cast<int>(a.points.size()));
  }
}

TEST_CASE("z current averages to zero and u, -u share their zero sets") {
  const BasisPtr basis = builtin_ensemble("sphere2_tangent", 64);
  const OrthoFrameField frame(basis);
  const TestForm z = sphere_z();
  const int N = 2000;
  std::vector<double> values;
  for (int k = 0; k < N; ++k) {
    const SectionSample s = sample(basis, 5, k);
    const PointZeroSet a = find_zero_points(s, frame);
    if (k < 50) {
      const SectionSample neg{-s.coefficients, basis};
      const PointZeroSet b = find_zero_points(neg, frame);
      REQUIRE(a.points.size() == b.points.size());
      for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK((a.points[i].location - b.points[i].location).norm() <= 1e-9);
        CHECK(a.points[i].sign == b.points[i].sign);
      }
    }
    values.push_back(evaluate_current(a, z));
  }
  const VectorXd v = Eigen::Map<const VectorXd>(values.data(), N);
  const double mean = v.mean();
  const double se = std::sqrt((v.array() - mean).square().sum() / (N - 1) / N);
  CHECK(std::abs(mean) <= 4.0 * se);
  CHECK(evaluate_current(find_zero_points(sample(basis, 5, 0), frame), zero_form(0, 2)) == 0.0);
}

TEST_CASE("constant field on the torus has no zeros") {
  SectionField f;
  f.rank = 2;
  f.manifold = builtin_torus(2, 16);
  f.evaluate = [](const Point&, VectorXd& v, MatrixXd* J) {
    v = (VectorXd(2) << 1.0, -0.5).finished();
    if (J) J->setZero(2, 2);
  };
  const PointZeroSet zs = find_zero_points(f);
  CHECK(zs.points.empty());
  CHECK(zs.ok());

  SectionField g = f;
  g.manifold = builtin_torus(3, 16);
  g.evaluate = [](const Point&, VectorXd& v, MatrixXd* J) {
    v = (VectorXd(2) << 1.0, -0.5).finished();
    if (J) J->setZero(2, 3);
  };
  const CurveZeroSet cs = trace_zero_curves(g);
  CHECK(cs.curves.empty());
  CHECK(cs.ok());
}

TEST_CASE("dimension checks") {
  SectionField f = shifted_sines(0.0, 0.0);
  CHECK_THROWS_AS(find_zero_points(f), DimensionError);
  SectionField g;
  g.rank = 2;
  g.manifold = builtin_torus(2, 16);
  g.evaluate = [](const Point& x, VectorXd& v, MatrixXd* J) {
    v = (VectorXd(2) << std::sin(x[0]), std::sin(x[1])).finished();
    if (J) *J = (MatrixXd(2, 2) << std::cos(x[0]), 0, 0, std::cos(x[1])).finished();
  };
  CHECK_THROWS_AS(trace_zero_curves(g), DimensionError);
  const PointZeroSet zs = find_zero_points(g);
  CHECK(zs.points.size() == 4);
  CHECK(zs.signed_total() == 0);
  CHECK_THROWS_AS(evaluate_current(zs, dx3_form()), DimensionError);
  const CurveZeroSet cs = trace_zero_curves(f);
  CHECK_THROWS_AS(evaluate_current(cs, f.manifold->chart(), zero_form(0, 3)), DimensionError);
}

TEST_CASE("transversality floor flags near-degenerate zeros") {
  SectionField g;
  g.rank = 2;
  g.manifold = builtin_torus(2, 16);
  g.evaluate = [](const Point& x, VectorXd& v, MatrixXd* J) {
    v = (VectorXd(2) << std::sin(x[0]) - 0.999, std::sin(x[1])).finished();
    if (J) *J = (MatrixXd(2, 2) << std::cos(x[0]), 0, 0, std::cos(x[1])).finished();
  };
  ZeroSearchOptions opt;
  const PointZeroSet loose = find_zero_points(g, nullptr, opt);
  CHECK(loose.ok());
  CHECK(loose.points.size() == 4);
  opt.transversality_floor = 0.1;
  const PointZeroSet strict = find_zero_points(g, nullptr, opt);
  CHECK_FALSE(strict.transversal);
  CHECK_FALSE(strict.ok());
}

TEST_CASE("coordinate circles on the 3-torus") {
  for (double shift : {0.0, 0.3}) {
    CAPTURE(shift);
    const SectionField f = shifted_sines(shift, -0.2 * shift);
    const CurveZeroSet cs = trace_zero_curves(f);
    REQUIRE(cs.ok());
    REQUIRE(cs.curves.size() == 4);
    int positive = 0, negative = 0;
    for (const auto& c : cs.curves) {
      CHECK(c.closed);
      const Point& x = c.vertices.front();
      const double expected = std::cos(x[0] + shift) * std::cos(x[1] - 0.2 * shift) > 0 ? 1.0 : -1.0;
      for (std::size_t v = 0; v < c.vertices.size(); ++v) {
        CHECK(std::abs(c.tangents[v][2] - expected) <= 1e-12);
        CHECK((c.jacobians[v] * c.tangents[v]).norm() <= 1e-12);
      }
      CurveZeroSet one;
      one.curves.push_back(c);
      const double I = evaluate_current(one, f.manifold->chart(), dx3_form());
      CHECK(std::abs(I - expected * 2 * kPi) <= 1e-9);
      (expected > 0 ? positive : negative)++;
    }
    CHECK(positive == 2);
    CHECK(negative == 2);
    const CoareaResult r = coarea_check(cs, f, dx3_form());
    CHECK(std::abs(r.direct) <= 1e-9);
    CHECK(std::abs(r.direct - r.coarea) <= 1e-6);
    const CoareaResult rm = coarea_check(cs, f, mixed_form());
    CHECK(std::abs(rm.direct - rm.coarea) <= 1e-6);
    const CoareaResult r0 = coarea_check(cs, f, zero_form(1, 3));
    CHECK(r0.direct == 0.0);
    CHECK(r0.coarea == 0.0);
  }
}

TEST_CASE("torus3_trig samples: closed curves, residuals and coarea agreement") {
  const BasisPtr basis = builtin_ensemble("torus3_trig", 16);
  const OrthoFrameField frame(basis);
  int discarded = 0;
  for (std::uint64_t k = 0; k < 10; ++k) {
    const SectionSample s = sample(basis, 2024, k);
    const SectionField f = section_field(s);
    const CurveZeroSet cs = trace_zero_curves(s, frame);
    if (!cs.ok()) {
      ++discarded;
      continue;
    }
    VectorXd v;
    MatrixXd J;
    for (const auto& c : cs.curves) {
      CHECK(c.closed);
      for (std::size_t i = 0; i < c.vertices.size(); ++i) {
        f.evaluate(c.vertices[i], v, &J);
        CHECK(v.cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((J * c.tangents[i]).norm() <= 1e-8);
        const MatrixXd W = frame.component_map(c.vertices[i]).value * J;
        CHECK((oriented_tangent(W) - c.tangents[i]).norm() <= 1e-8);
      }
    }
    for (const TestForm& eta : {cosx1_dx2_form(), mixed_form()}) {
      const CoareaResult r = coarea_check(cs, f, eta);
      CHECK(std::abs(r.direct - r.coarea) <= 1e-4);
    }
  }
  CHECK(discarded == 0);
}

TEST_CASE("curve sets do not depend on the seed grid and are traced once") {
  const BasisPtr basis = builtin_ensemble("torus3_trig", 16);
  const ChartDomain& chart = basis->manifold()->chart();
  ZeroSearchOptions coarse, fine;
  coarse.seed_resolution = 16;
  fine.seed_resolution = 32;
  for (std::uint64_t k = 0; k < 30; ++k) {
    const SectionField f = section_field(sample(basis, 9, k));
    const CurveZeroSet a = trace_zero_curves(f, coarse);
    const CurveZeroSet b = trace_zero_curves(f, fine);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(a.curves.size() == b.curves.size());
    CHECK(evaluate_current(a, chart, mixed_form()) ==
          doctest::Approx(evaluate_current(b, chart, mixed_form())).epsilon(1e-4));
    for (std::size_t i = 0; i < a.curves.size(); ++i) {
      for (std::size_t j = i + 1; j < a.curves.size(); ++j) {
        double closest = 1e300;
        for (const auto& p : a.curves[i].vertices)
          for (const auto& q : a.curves[j].vertices)
            closest = std::min(closest, chart.difference(p, q).norm());
        CHECK(closest > a.curves[i].step);
      }
    }
  }
}

TEST_CASE("halving the continuation step converges") {
  const BasisPtr basis = builtin_ensemble("torus3_trig", 16);
  const SectionField f = section_field(sample(basis, 8, 3));
  std::vector<double> I;
  for (double frac : {0.5, 0.25, 0.125}) {
    ZeroSearchOptions opt;
    opt.step_fraction = frac;
    opt.max_turn_angle = 1.0;
    const CurveZeroSet cs = trace_zero_curves(f, opt);
    REQUIRE(cs.ok());
    I.push_back(evaluate_current(cs, f.manifold->chart(), mixed_form()));
  }
  const double d1 = std::abs(I[0] - I[1]), d2 = std::abs(I[1] - I[2]);
  MESSAGE("step refinement differences " << d1 << " " << d2);
  CHECK(d1 <= 1e-3);
  CHECK((d2 <= d1 / 3.5 || d2 <= 1e-9));
}

TEST_CASE("CSV dumps") {
  const BasisPtr basis = builtin_ensemble("sphere2_tangent", 32);
  const OrthoFrameField frame(basis);
  const PointZeroSet zs = find_zero_points(sample(basis, 1, 1), frame);
  const std::string path = "zeroloc_points_test.csv";
  write_zero_points_csv(path, zs);
  std::ifstream is(path);
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) ++lines;
  CHECK(lines == static_cast<int>(zs.points.size()) + 1);
  std::remove(path.c_str());
}
