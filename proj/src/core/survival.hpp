#pragma once

// Lognormal accelerated-failure-time regression of exceedance durations:
//   log(duration) = [1, x]' beta + eps,  eps ~ N(0, sigma^2)
// Without censoring the maximum-likelihood beta is least squares on the log
// durations and the MLE of sigma^2 is SSE / n.

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/liquidity.hpp"
#include "core/ted.hpp"

namespace lobres::survival {

struct SurvivalFit {
  int threshold_index = 0;
  /// Intercept first, then one entry per covariate column. Dropped columns
  /// carry 0 and active[k] = false.
  Eigen::VectorXd beta;
  Eigen::VectorXd std_errors;  // from sigma_unbiased; NaN for dropped or saturated
  std::vector<bool> active;
  double sigma = 0.0;            // MLE, SSE / n
  double sigma_unbiased = 0.0;   // SSE / (n - p)
  std::size_t n_obs = 0;
  double loglik = 0.0;           // lognormal density of the durations
  bool saturated = false;        // n equals the active parameter count, sigma = 0
  double x8_fill = 0.0;          // imputation used for a missing mean-of-last-5 covariate
  std::vector<std::string> warnings;

  [[nodiscard]] std::size_t active_count() const;
};

/// `covariates` is n x p without an intercept column. Throws
/// TooFewObservations when n < p + 1; collinear columns are dropped with a
/// warning.
SurvivalFit fit_lognormal_aft(const Eigen::MatrixXd& covariates, std::span<const double> durations);

/// Records from one threshold. Missing x8 is imputed with the mean of the
/// observed x8 values in `records`.
SurvivalFit fit_lognormal_aft(std::span<const ted::TedRecord> records);

/// Design matrix for records (n x 10) after x8 imputation with `x8_fill`.
Eigen::MatrixXd design_matrix(std::span<const ted::TedRecord> records, double x8_fill);
double x8_mean(std::span<const ted::TedRecord> records);

/// Componentwise median of the (imputed) covariates.
liquidity::CovariateVector median_covariates(std::span<const ted::TedRecord> records, double x8_fill);

struct LrpPoints {
  std::array<double, ted::kThresholdCount> thresholds{};  // measure units
  std::array<double, ted::kThresholdCount> values{};      // E[log duration]
  std::array<liquidity::CovariateVector, ted::kThresholdCount> references{};

  /// Curve domain: decile index j = 1..9.
  [[nodiscard]] static double domain_point(std::size_t j) { return static_cast<double>(j + 1); }
};

/// Expected log duration [1, x_ref]' beta_j at each threshold.
double expected_log_duration(const SurvivalFit& fit, const liquidity::CovariateVector& reference);

/// One reference vector shared by every threshold. Throws MissingFit unless
/// exactly nine fits are supplied.
LrpPoints lrp_points(std::span<const SurvivalFit> fits, std::span<const double> thresholds,
                     const liquidity::CovariateVector& reference);

/// Per-threshold references (the usual choice: median covariates).
LrpPoints lrp_points(std::span<const SurvivalFit> fits, std::span<const double> thresholds,
                     std::span<const liquidity::CovariateVector> references);

}  // namespace lobres::survival
