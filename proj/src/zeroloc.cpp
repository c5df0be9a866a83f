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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <stdexcept>

namespace chernrice {

using Eigen::MatrixXd;
using Eigen::VectorXd;

SectionField section_field(const SectionSample& sample, const DriftField* drift) {
  SectionField field;
  field.rank = sample.basis->rank();
  field.manifold = sample.basis->manifold();
  const BasisPtr basis = sample.basis;
  const VectorXd coeffs = sample.coefficients;
  DriftField d;
  const bool has_drift = drift != nullptr && drift->value;
  if (has_drift) d = *drift;
  field.evaluate = [basis, coeffs, has_drift, d](const Point& x, VectorXd& value, MatrixXd* jac) {
    const SectionJet jet = basis->jet(x, jac ? 1 : 0);
    value = jet.value * coeffs;
    if (has_drift) value += d.value(x);
    if (jac) {
      const int m = basis->dim();
      jac->resize(basis->rank(), m);
      for (int i = 0; i < m; ++i) jac->col(i) = jet.d1[i] * coeffs;
      if (has_drift) *jac += d.jacobian(x);
    }
  };
  return field;
}

int PointZeroSet::signed_total() const {
  int s = 0;
  for (const auto& p : points) s += p.sign;
  return s;
}

std::size_t CurveZeroSet::vertex_count() const {
  std::size_t n = 0;
  for (const auto& c : curves) n += c.vertices.size();
  return n;
}

int orientation_sign(const MatrixXd& jacobian) {
  const double d = jacobian.determinant();
  return (d > 0) - (d < 0);
}

VectorXd oriented_tangent(const MatrixXd& jacobian) {
  if (jacobian.rows() != 2 || jacobian.cols() != 3) {
    throw DimensionError("oriented_tangent: expects a 2 x 3 Jacobian");
  }
  const Eigen::Vector3d a1 = jacobian.row(0).transpose();
  const Eigen::Vector3d a2 = jacobian.row(1).transpose();
  const Eigen::Vector3d t = a1.cross(a2);
  const double n = t.norm();
  if (n == 0.0) return VectorXd::Zero(3);
  return t / n;
}

namespace {

struct AxisGrid {
  double lo = 0.0;
  double h = 0.0;
  int cells = 0;
  bool periodic = false;

  int nodes() const { return periodic ? cells : cells + 1; }
  double node(int k) const { return lo + k * h; }
  int wrap(int k) const { return periodic ? ((k % cells) + cells) % cells : k; }
};

std::vector<AxisGrid> make_grid(const ChartDomain& chart, int resolution, double margin) {
  std::vector<AxisGrid> grid;
  for (const auto& a : chart.axes) {
    AxisGrid g;
    g.periodic = a.periodic;
    g.cells = resolution;
    double lo = a.lower, hi = a.upper;
    if (a.degenerate_ends) {
      lo += margin;
      hi -= margin;
    }
    g.lo = lo;
    g.h = (hi - lo) / resolution;
    grid.push_back(g);
  }
  return grid;
}

struct NodeTable {
  std::vector<AxisGrid> grid;
  std::vector<VectorXd> values;
  std::vector<MatrixXd> jacobians;

  std::size_t flat(const std::vector<int>& k) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) idx = idx * grid[i].nodes() + grid[i].wrap(k[i]);
    return idx;
  }
  Point point(const std::vector<int>& k) const {
    Point x(static_cast<int>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) x[i] = grid[i].node(k[i]);
    return x;
  }
};

NodeTable tabulate(const SectionField& field, const std::vector<AxisGrid>& grid) {
  NodeTable table;
  table.grid = grid;
  std::size_t total = 1;
  for (const auto& g : grid) total *= g.nodes();
  table.values.resize(total);
  table.jacobians.resize(total);
  const int m = static_cast<int>(grid.size());
  std::vector<int> k(m, 0);
  for (std::size_t n = 0; n < total; ++n) {
    field.evaluate(table.point(k), table.values[n], &table.jacobians[n]);
    for (int i = m - 1; i >= 0; --i) {
      if (++k[i] < grid[i].nodes()) break;
      k[i] = 0;
    }
  }
  return table;
}

/// Cells (given by lower corner) whose corner data allow a zero of every
/// component inside; `free_axes` are the cell directions, the other axes
/// stay at the lower corner.
bool cell_may_contain_zero(const NodeTable& t, const std::vector<int>& lower,
                           const std::vector<int>& free_axes) {
  const int f = static_cast<int>(free_axes.size());
  const int r = static_cast<int>(t.values.front().size());
  double diam = 0.0;
  for (int ax : free_axes) diam += t.grid[ax].h * t.grid[ax].h;
  diam = std::sqrt(diam);
  std::vector<double> lo(r, 1e300), hi(r, -1e300), minabs(r, 1e300), grad(r, 0.0);
  std::vector<int> k = lower;
  for (int mask = 0; mask < (1 << f); ++mask) {
    for (int b = 0; b < f; ++b) k[free_axes[b]] = lower[free_axes[b]] + ((mask >> b) & 1);
    const std::size_t n = t.flat(k);
    for (int a = 0; a < r; ++a) {
      const double v = t.values[n][a];
      lo[a] = std::min(lo[a], v);
      hi[a] = std::max(hi[a], v);
      minabs[a] = std::min(minabs[a], std::abs(v));
      double g = 0.0;
      for (int ax : free_axes) g += t.jacobians[n](a, ax) * t.jacobians[n](a, ax);
      grad[a] = std::max(grad[a], std::sqrt(g));
    }
  }
  for (int a = 0; a < r; ++a) {
    const bool sign_change = lo[a] <= 0.0 && hi[a] >= 0.0;
    if (!sign_change && minabs[a] > 1.5 * grad[a] * diam) return false;
  }
  return true;
}

bool inside_box(const std::vector<AxisGrid>& grid, const Point& x) {
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i].periodic) continue;
    if (x[i] < grid[i].lo || x[i] > grid[i].lo + grid[i].cells * grid[i].h) return false;
  }
  return true;
}

struct NewtonResult {
  bool converged = false;
  Point x;
  double residual = 0.0;
  MatrixXd jacobian;
};

/// Newton iteration over the coordinates in `free_axes` from the center of
/// a seed cell, others held fixed. Iterates leaving the cell grown by half a
/// cell on each side are abandoned.
NewtonResult newton(const SectionField& field, const ChartDomain& chart,
                    const std::vector<AxisGrid>& grid, Point x, const std::vector<int>& free_axes,
                    const ZeroSearchOptions& opt, double max_step) {
  NewtonResult res;
  const Point center = x;
  VectorXd f;
  MatrixXd J;
  const int nf = static_cast<int>(free_axes.size());
  for (int it = 0; it <= opt.newton_iterations; ++it) {
    field.evaluate(x, f, &J);
    res.residual = f.cwiseAbs().maxCoeff();
    if (!std::isfinite(res.residual)) return res;
    if (res.residual <= opt.newton_tolerance) {
      res.converged = true;
      res.x = chart.wrap(x);
      res.jacobian = J;
      return res;
    }
    MatrixXd Jf(J.rows(), nf);
    for (int b = 0; b < nf; ++b) Jf.col(b) = J.col(free_axes[b]);
    Eigen::FullPivLU<MatrixXd> lu(Jf);
    if (lu.rank() < nf) return res;
    VectorXd step = lu.solve(-f);
    const double len = step.norm();
    if (len > max_step) step *= max_step / len;
    for (int b = 0; b < nf; ++b) {
      const int ax = free_axes[b];
      x[ax] += step[b];
      if (std::abs(x[ax] - center[ax]) > grid[ax].h) return res;
    }
    if (!inside_box(grid, x)) return res;
  }
  return res;
}

double frame_det(const OrthoFrameField* frame, const Point& x, const MatrixXd& J) {
  if (frame == nullptr) return J.determinant();
  return (frame->component_map(x).value * J).determinant();
}

std::vector<int> all_axes(int m) {
  std::vector<int> out(m);
  for (int i = 0; i < m; ++i) out[i] = i;
  return out;
}

/// Visit every lower corner of cells spanned by `free_axes`, with the other
/// axes ranging over all nodes.
template <class Fn>
void for_each_cell(const std::vector<AxisGrid>& grid, const std::vector<int>& free_axes, Fn&& fn) {
  const int m = static_cast<int>(grid.size());
  std::vector<int> limit(m);
  for (int i = 0; i < m; ++i) {
    const bool is_free = std::find(free_axes.begin(), free_axes.end(), i) != free_axes.end();
    limit[i] = is_free ? grid[i].cells : grid[i].nodes();
  }
  std::vector<int> k(m, 0);
  while (true) {
    fn(k);
    int i = m - 1;
    for (; i >= 0; --i) {
      if (++k[i] < limit[i]) break;
      k[i] = 0;
    }
    if (i < 0) break;
  }
}

int default_resolution(int m) { return m == 2 ? 64 : 24; }

}  // namespace

PointZeroSet find_zero_points(const SectionField& field, const OrthoFrameField* frame,
                              const ZeroSearchOptions& opt) {
  const int m = field.dim();
  if (m != field.rank) throw DimensionError("find_zero_points: needs dim == rank");
  const ChartDomain& chart = field.manifold->chart();
  const int res = opt.seed_resolution > 0 ? opt.seed_resolution : default_resolution(m);
  const auto grid = make_grid(chart, res, opt.excluded_margin);
  const NodeTable table = tabulate(field, grid);
  const std::vector<int> axes = all_axes(m);
  double cell_diam = 0.0;
  for (const auto& g : grid) cell_diam += g.h * g.h;
  cell_diam = std::sqrt(cell_diam);
  const double dedupe = opt.dedupe_fraction * chart.diameter();

  PointZeroSet out;
  for_each_cell(grid, axes, [&](const std::vector<int>& lower) {
    if (!out.failure.empty()) return;
    if (!cell_may_contain_zero(table, lower, axes)) return;
    Point center(m);
    for (int i = 0; i < m; ++i) center[i] = grid[i].node(lower[i]) + 0.5 * grid[i].h;
    const NewtonResult nr = newton(field, chart, grid, center, axes, opt, 2.0 * cell_diam);
    if (!nr.converged) return;
    for (const auto& z : out.points) {
      if (chart.difference(z.location, nr.x).norm() <= dedupe) return;
    }
    ZeroPoint zp;
    zp.location = nr.x;
    zp.newton_residual = nr.residual;
    zp.jacobian_det = frame_det(frame, nr.x, nr.jacobian);
    zp.sign = orientation_sign(nr.jacobian);
    if (std::abs(zp.jacobian_det) < opt.transversality_floor) out.transversal = false;
    out.points.push_back(zp);
  });
  std::sort(out.points.begin(), out.points.end(), [](const ZeroPoint& a, const ZeroPoint& b) {
    return std::lexicographical_compare(a.location.data(), a.location.data() + a.location.size(),
                                        b.location.data(), b.location.data() + b.location.size());
  });
  return out;
}

PointZeroSet find_zero_points(const SectionSample& sample, const OrthoFrameField& frame,
                              const ZeroSearchOptions& options) {
  return find_zero_points(section_field(sample), &frame, options);
}

// ------------------------------------------------------------------ curves

namespace {

constexpr double kGaussNodes[3] = {0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
constexpr double kGaussWeights[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

struct HermiteSegment {
  Point p0;
  VectorXd d, m0, m1;

  HermiteSegment(const ChartDomain& chart, const Point& a, const Point& b, const VectorXd& ta,
                 const VectorXd& tb)
      : p0(a), d(chart.difference(b, a)) {
    const double L = d.norm();
    m0 = L * ta;
    m1 = L * tb;
  }
  Point at(double s) const {
    const double s2 = s * s, s3 = s2 * s;
    return p0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * d + (s3 - s2) * m1;
  }
  VectorXd velocity(double s) const {
    const double s2 = s * s;
    return (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * d + (3 * s2 - 2 * s) * m1;
  }
};

template <class Fn>
void for_each_segment(const ZeroCurve& c, const ChartDomain& chart, Fn&& fn) {
  const std::size_t n = c.vertices.size();
  if (n < 2) return;
  const std::size_t segs = c.closed ? n : n - 1;
  for (std::size_t k = 0; k < segs; ++k) {
    const std::size_t j = (k + 1) % n;
    fn(HermiteSegment(chart, c.vertices[k], c.vertices[j], c.tangents[k], c.tangents[j]));
  }
}

using CrossingKey = std::pair<int, int>;  // (axis, plane index)
using CrossingMap = std::map<CrossingKey, std::vector<Point>>;

void record_crossings(const HermiteSegment& seg, const std::vector<AxisGrid>& grid,
                      const ChartDomain& chart, CrossingMap& out) {
  const int m = static_cast<int>(grid.size());
  for (int ax = 0; ax < m; ++ax) {
    const AxisGrid& g = grid[ax];
    const double C = seg.m0[ax];
    const double B = 2.0 * (-2.0 * seg.m0[ax] + 3.0 * seg.d[ax] - seg.m1[ax]);
    const double A = 3.0 * (seg.m0[ax] - 2.0 * seg.d[ax] + seg.m1[ax]);
    std::vector<double> cuts{0.0};
    if (A != 0.0) {
      const double disc = B * B - 4.0 * A * C;
      if (disc > 0.0) {
        const double q = -0.5 * (B + std::copysign(std::sqrt(disc), B));
        for (double r : {q / A, q != 0.0 ? C / q : 2.0})
          if (r > 0.0 && r < 1.0) cuts.push_back(r);
      }
    } else if (B != 0.0 && -C / B > 0.0 && -C / B < 1.0) {
      cuts.push_back(-C / B);
    }
    cuts.push_back(1.0);
    std::sort(cuts.begin(), cuts.end());
    auto coord = [&](double s) { return seg.at(s)[ax]; };
    for (std::size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
      const double sa = cuts[piece], sb = cuts[piece + 1];
      const double ya = coord(sa), yb = coord(sb);
      const double lo = std::min(ya, yb), hi = std::max(ya, yb);
      const int j0 = static_cast<int>(std::ceil((lo - g.lo) / g.h - 1e-12));
      const int j1 = static_cast<int>(std::floor((hi - g.lo) / g.h + 1e-12));
      for (int j = j0; j <= j1; ++j) {
        if (!g.periodic && (j < 0 || j > g.cells)) continue;
        const double c = g.lo + j * g.h;
        double a = sa, b = sb;
        const bool rising = yb >= ya;
        for (int it = 0; it < 60 && b - a > 1e-15; ++it) {
          const double mid = 0.5 * (a + b);
          if ((coord(mid) < c) == rising) a = mid;
          else b = mid;
        }
        out[{ax, g.wrap(j)}].push_back(chart.wrap(seg.at(0.5 * (a + b))));
      }
    }
  }
}

struct Seed {
  int axis;
  int plane;
  Point x;
};

bool covered(const Seed& s, const CrossingMap& crossings, const ChartDomain& chart, double tol) {
  const auto it = crossings.find({s.axis, s.plane});
  if (it == crossings.end()) return false;
  for (const auto& p : it->second) {
    if (chart.difference(p, s.x).norm() <= tol) return true;
  }
  return false;
}

struct Corrected {
  bool ok = false;
  Point y;
  MatrixXd J;
};

Corrected correct(const SectionField& field, const ChartDomain& chart, const Point& y0,
                  const VectorXd& t, const ZeroSearchOptions& opt) {
  Corrected c;
  Point y = y0;
  VectorXd f;
  MatrixXd J;
  for (int it = 0; it < 12; ++it) {
    field.evaluate(chart.wrap(y), f, &J);
    if (!f.allFinite()) return c;
    if (f.cwiseAbs().maxCoeff() <= opt.newton_tolerance) {
      c.ok = true;
      c.y = chart.wrap(y);
      c.J = J;
      return c;
    }
    MatrixXd A(3, 3);
    A.topRows(2) = J;
    A.row(2) = t.transpose();
    VectorXd rhs(3);
    rhs << -f, 0.0;
    Eigen::FullPivLU<MatrixXd> lu(A);
    if (lu.rank() < 3) return c;
    y += lu.solve(rhs);
  }
  return c;
}

double sigma_min(const MatrixXd& J) {
  Eigen::JacobiSVD<MatrixXd> svd(J);
  return svd.singularValues()[J.rows() - 1];
}

}  // namespace

CurveZeroSet trace_zero_curves(const SectionField& field, const ZeroSearchOptions& opt) {
  const int m = field.dim();
  if (m != 3 || field.rank != 2) throw DimensionError("trace_zero_curves: needs dim 3, rank 2");
  const ChartDomain& chart = field.manifold->chart();
  const int res = opt.seed_resolution > 0 ? opt.seed_resolution : default_resolution(m);
  const auto grid = make_grid(chart, res, opt.excluded_margin);
  const NodeTable table = tabulate(field, grid);
  double cell = 1e300;
  for (const auto& g : grid) cell = std::min(cell, g.h);
  const double h0 = opt.step_fraction * cell;
  const double cos_turn = std::cos(opt.max_turn_angle);

  CurveZeroSet out;

  std::vector<Seed> seeds;
  for (int ax = 0; ax < m; ++ax) {
    std::vector<int> free_axes;
    for (int i = 0; i < m; ++i)
      if (i != ax) free_axes.push_back(i);
    double diam = std::hypot(grid[free_axes[0]].h, grid[free_axes[1]].h);
    for_each_cell(grid, free_axes, [&](const std::vector<int>& lower) {
      if (!grid[ax].periodic && lower[ax] >= grid[ax].nodes()) return;
      if (!cell_may_contain_zero(table, lower, free_axes)) return;
      Point center = table.point(lower);
      for (int b : free_axes) center[b] += 0.5 * grid[b].h;
      const NewtonResult nr = newton(field, chart, grid, center, free_axes, opt, 2.0 * diam);
      if (!nr.converged) return;
      seeds.push_back({ax, grid[ax].wrap(lower[ax]), nr.x});
    });
  }

  CrossingMap crossings;
  const double cover_tol = std::max(1e-6, 0.05 * h0);
  long steps_total = 0;
  for (const Seed& seed : seeds) {
    if (!out.failure.empty()) break;
    if (covered(seed, crossings, chart, cover_tol)) continue;

    ZeroCurve curve;
    curve.step = h0;
    VectorXd f;
    MatrixXd J;
    field.evaluate(seed.x, f, &J);
    if (sigma_min(J) < opt.transversality_floor) {
      out.transversal = false;
      continue;
    }
    Point x = seed.x;
    VectorXd t = oriented_tangent(J);
    const VectorXd t_start = t;
    curve.vertices.push_back(x);
    curve.tangents.push_back(t);
    curve.jacobians.push_back(J);
    double h = h0;
    while (true) {
      if (++steps_total > opt.max_curve_steps) {
        out.failure = "continuation exceeded the step budget";
        break;
      }
      const Corrected c = correct(field, chart, x + h * t, t, opt);
      bool accept = c.ok && chart.difference(c.y, x + h * t).norm() <= 0.5 * h;
      VectorXd t_new;
      if (accept) {
        t_new = oriented_tangent(c.J);
        const double turn = t_new.dot(t);
        accept = turn > 0.7 && (turn >= cos_turn || h <= h0 / 64.0);
      }
      if (!accept) {
        h *= 0.5;
        if (h < h0 * 1e-3) {
          out.failure = "continuation step failure";
          break;
        }
        continue;
      }
      if (sigma_min(c.J) < opt.transversality_floor) out.transversal = false;
      x = c.y;
      t = t_new;
      h = std::min(h0, 2.0 * h);
      const VectorXd back = chart.difference(seed.x, x);
      if (curve.vertices.size() >= 3 && back.norm() <= 1.2 * h0 && back.dot(t) > 0.0 &&
          t.dot(t_start) > 0.5) {
        curve.vertices.push_back(x);
        curve.tangents.push_back(t);
        curve.jacobians.push_back(c.J);
        curve.closed = true;
        break;
      }
      curve.vertices.push_back(x);
      curve.tangents.push_back(t);
      curve.jacobians.push_back(c.J);
    }
    for_each_segment(curve, chart, [&](const HermiteSegment& seg) {
      record_crossings(seg, grid, chart, crossings);
    });
    out.curves.push_back(std::move(curve));
  }
  return out;
}

CurveZeroSet trace_zero_curves(const SectionSample& sample, const OrthoFrameField&,
                               const ZeroSearchOptions& options) {
  return trace_zero_curves(section_field(sample), options);
}

double evaluate_current(const PointZeroSet& zeros, const TestForm& eta) {
  if (eta.degree != 0) throw DimensionError("evaluate_current: point currents need a 0-form");
  std::vector<double> terms;
  for (const auto& z : zeros.points) terms.push_back(z.sign * eta.coefficients(z.location)[0]);
  return pairwise_sum(terms);
}

double evaluate_current(const CurveZeroSet& zeros, const ChartDomain& chart, const TestForm& eta) {
  if (eta.degree != 1) throw DimensionError("evaluate_current: curve currents need a 1-form");
  std::vector<double> terms;
  for (const auto& c : zeros.curves) {
    for_each_segment(c, chart, [&](const HermiteSegment& seg) {
      double s = 0.0;
      for (int q = 0; q < 3; ++q) {
        const Point p = chart.wrap(seg.at(kGaussNodes[q]));
        s += kGaussWeights[q] * eta.coefficients(p).dot(seg.velocity(kGaussNodes[q]));
      }
      terms.push_back(s);
    });
  }
  return pairwise_sum(terms);
}

CoareaResult coarea_check(const CurveZeroSet& zeros, const SectionField& field, const TestForm& eta) {
  const ChartDomain& chart = field.manifold->chart();
  CoareaResult out;
  out.direct = evaluate_current(zeros, chart, eta);
  std::vector<double> terms;
  VectorXd f;
  MatrixXd J;
  for (const auto& c : zeros.curves) {
    for_each_segment(c, chart, [&](const HermiteSegment& seg) {
      double s = 0.0;
      for (int q = 0; q < 3; ++q) {
        const Point p = chart.wrap(seg.at(kGaussNodes[q]));
        field.evaluate(p, f, &J);
        const VectorXd e = eta.coefficients(p);
        Eigen::JacobiSVD<MatrixXd> svd(J);
        const double jac = svd.singularValues().prod();
        double g = 0.0;
        for (int k = 0; k < 3; ++k) {
          if (e[k] == 0.0) continue;
          MatrixXd minor(2, 2);
          int col = 0;
          for (int i = 0; i < 3; ++i)
            if (i != k) minor.col(col++) = J.col(i);
          g += ((k % 2) ? -1.0 : 1.0) * e[k] * minor.determinant() / jac;
        }
        s += kGaussWeights[q] * g * seg.velocity(kGaussNodes[q]).norm();
      }
      terms.push_back(s);
    });
  }
  out.coarea = pairwise_sum(terms);
  return out;
}

void write_zero_points_csv(const std::string& path, const PointZeroSet& zeros) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << std::setprecision(17);
  const int m = zeros.points.empty() ? 0 : static_cast<int>(zeros.points.front().location.size());
  for (int i = 0; i < m; ++i) os << "x" << i + 1 << ",";
  os << "sign,jacobian_det,residual\n";
  for (const auto& z : zeros.points) {
    for (int i = 0; i < m; ++i) os << z.location[i] << ",";
    os << z.sign << "," << z.jacobian_det << "," << z.newton_residual << "\n";
  }
}

void write_zero_curves_csv(const std::string& path, const CurveZeroSet& zeros) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << std::setprecision(17) << "curve,vertex,closed,x1,x2,x3,t1,t2,t3\n";
  for (std::size_t c = 0; c < zeros.curves.size(); ++c) {
    const auto& curve = zeros.curves[c];
    for (std::size_t v = 0; v < curve.vertices.size(); ++v) {
      os << c << "," << v << "," << (curve.closed ? 1 : 0);
      for (int i = 0; i < 3; ++i) os << "," << curve.vertices[v][i];
      for (int i = 0; i < 3; ++i) os << "," << curve.tangents[v][i];
      os << "\n";
    }
  }
}

}  // namespace chernrice
