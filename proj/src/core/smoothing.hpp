#pragma once

// Penalized least-squares spline smoothing:
//   PENSSE(c) = (y - Phi c)'(y - Phi c) + lambda c' R c
//   c_hat     = (Phi'Phi + lambda R)^{-1} Phi' y

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/bspline.hpp"
#include "core/survival.hpp"

namespace lobres::fda {

inline constexpr double kDefaultLambda = 0.02;

struct SmoothFit {
  Eigen::VectorXd coefficients;
  double df = 0.0;    // trace of the hat matrix
  double sse = 0.0;
  std::vector<std::string> warnings;
};

SmoothFit smooth_points(std::span<const double> u, std::span<const double> y, const BsplineBasis& basis,
                        double lambda);

/// Curve over the decile index domain (u_j = j).
FunctionalCurve smooth(const survival::LrpPoints& points, const BsplineBasis& basis, double lambda,
                       CurveMetadata metadata = {});

/// Basis used for every LRP curve: cubic, [1, 9], L = 4.
BsplineBasis default_lrp_basis();

double pensse(std::span<const double> u, std::span<const double> y, const BsplineBasis& basis, double lambda,
              const Eigen::VectorXd& coefficients);

struct GcvResult {
  std::vector<double> lambdas;
  std::vector<double> scores;  // +inf when the fit uses every degree of freedom
  std::vector<double> dfs;
  double best_lambda = 0.0;
  std::size_t best_index = 0;
};

/// GCV(lambda) = n SSE / (n - df)^2 on each grid value.
GcvResult gcv(std::span<const double> u, std::span<const double> y, const BsplineBasis& basis,
              std::span<const double> lambda_grid);

/// Log-spaced 1e-6 .. 1e2.
std::vector<double> default_lambda_grid(std::size_t points = 41);

}  // namespace lobres::fda
