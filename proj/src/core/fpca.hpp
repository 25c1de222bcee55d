#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/bspline.hpp"

namespace lobres::fda {

inline constexpr int kDefaultFactors = 3;

/// Functional principal components of a set of curves on one basis.
///
/// With Gram matrix W and centered coefficients C, the covariance operator's
/// eigenproblem becomes the symmetric problem
///   W^{1/2} (C'C / (N-1)) W^{1/2} v = rho v,  xi = W^{-1/2} v,
/// so the eigenfunctions are L2-orthonormal. Each eigenfunction is signed so
/// that its integral is non-negative.
struct FpcaResult {
  FunctionalCurve mean;
  std::vector<FunctionalCurve> eigenfunctions;
  std::vector<double> eigenvalues;      // leading q, non-increasing
  std::vector<double> all_eigenvalues;  // all K
  /// scores(i, k) = integral of xi_k (x_i - mean).
  Eigen::MatrixXd scores;
  std::vector<std::string> labels;
  bool degenerate = false;  // no variation across curves
  std::vector<std::string> warnings;

  /// Total variance: integral of v(u, u).
  [[nodiscard]] double total_variance() const;
};

FpcaResult fpca(std::span<const FunctionalCurve> curves, int q = kDefaultFactors);

}  // namespace lobres::fda
