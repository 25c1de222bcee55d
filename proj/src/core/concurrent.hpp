#pragma once

// Concurrent functional regression of one asset's daily curves on the daily
// market eigenfunctions:
//   x_t(u) = [beta_0] + sum_j beta_j(u) xi_{j,t}(u) + e_t(u)
// Integrals over u use composite Simpson weights on an equally spaced grid
// with an odd number of points, trapezoid weights otherwise.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/bspline.hpp"

namespace lobres::fda {

struct ConcurrentOptions {
  double lambda = 1e-2;          // J2 penalty on each beta_j
  bool intercept = false;        // constant beta_0
  std::size_t grid_points = 101;
  /// Defaults to a cubic basis with five functions on the response range.
  std::optional<BsplineBasis> beta_basis;
};

struct ConcurrentFit {
  std::optional<double> intercept;
  std::vector<FunctionalCurve> betas;
  std::vector<double> grid;
  std::vector<double> r2;           // SS_reg / (SS_reg + SS_res)
  std::vector<double> ss_reg;
  std::vector<double> ss_res;
  std::vector<double> r2_standard;  // 1 - SS_res / SS_tot
  std::size_t days = 0;
  double lambda = 0.0;              // after any escalation
  std::vector<std::string> warnings;

  [[nodiscard]] double mean_r2(double u_from, double u_to) const;
};

/// Grid form: responses(t, g) and covariates[j](t, g) sampled on `grid`.
ConcurrentFit concurrent_regress(const Eigen::MatrixXd& responses, const std::vector<Eigen::MatrixXd>& covariates,
                                 std::span<const double> grid, const ConcurrentOptions& options);

/// Curve form: responses[t], covariates[t][j].
ConcurrentFit concurrent_regress(std::span<const FunctionalCurve> responses,
                                 const std::vector<std::vector<FunctionalCurve>>& covariates,
                                 const ConcurrentOptions& options = {});

/// Trapezoid weights for a sorted grid.
std::vector<double> trapezoid_weights(std::span<const double> grid);
/// Composite Simpson weights; falls back to trapezoid for uneven grids or an
/// even point count.
std::vector<double> simpson_weights(std::span<const double> grid);

}  // namespace lobres::fda
