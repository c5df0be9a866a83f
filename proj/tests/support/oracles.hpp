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
 * @file oracles.hpp
 * @brief Independent reference computations for the test suites.
 *
 * Nothing here calls into the library's algebra: determinants and
 * Pfaffians are brute-force permutation sums, Monte Carlo uses the standard
 * library generators, and derivatives are central differences.
 */
#pragma once

#include "chernrice/algebra.hpp"
#include "chernrice/manifold.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// All permutations of 0..n-1 with their signs, via std::next_permutation.
struct SignedPerm {
  std::vector<int> perm;
  int sign;
};
std::vector<SignedPerm> all_permutations(int n);

/// Leibniz determinant.
double leibniz_det(const MatrixXd& M);
/// (-1)^h / (2^h h!) sum over S_r of sign * prod F(s(2k), s(2k+1)).
double leibniz_pfaffian(const MatrixXd& F);

/// Coefficient of dx^I in the same permutation sum with 2-form entries
/// F_ab = sum_{i<j} F(a,b,i,j) dx^i ^ dx^j, multiplied out over ordered
/// index tuples.
double leibniz_pfaffian_form(const chernrice::SkewFormMatrix& F, const std::vector<int>& I);

MatrixXd random_matrix(int rows, int cols, std::mt19937_64& gen);
MatrixXd random_skew(int r, std::mt19937_64& gen);
/// Random positive definite matrix with eigenvalues in [lo, hi].
MatrixXd random_spd(int n, std::mt19937_64& gen, double lo = 0.2, double hi = 2.0);

struct MeanEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
};
/// Monte Carlo E[det S] for S = mean + Gaussian with covariance cov over
/// the row-major flattening (row index a*r + i).
MeanEstimate mc_expected_det(const MatrixXd& mean, const MatrixXd& cov, std::size_t samples,
                             std::uint64_t seed);
/// Empirical covariance of S(a,i), S(b,j) from the same sampler.
MatrixXd mc_covariance(const MatrixXd& cov, std::size_t samples, std::uint64_t seed);

/// Central difference of a matrix field along coordinate i.
MatrixXd central_difference(const std::function<MatrixXd(const chernrice::Point&)>& f,
                            const chernrice::Point& x, int i, double h);

/// Levi-Civita coefficients of the unit round sphere in the orthonormal
/// frame (d_theta, d_phi / sin theta): returns Gamma_i with
/// nabla_i e_b = sum_a Gamma_i(a, b) e_a.
std::vector<MatrixXd> round_sphere_levi_civita(double theta);

/// Uniform random chart point with every coordinate in [lo_i + margin,
/// hi_i - margin].
chernrice::Point random_point(const chernrice::ChartDomain& chart, std::mt19937_64& gen,
                              double margin = 0.1);

}  // namespace oracle
