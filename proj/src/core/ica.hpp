#pragma once

// Projection-pursuit ICA: whitening followed by deflationary FastICA with the
// log-cosh negentropy contrast
//   J(y) ~ (E G(y) - E G(nu))^2,  G(y) = log cosh(y),  nu ~ N(0, 1).

#include <cstdint>

#include "core/commonality.hpp"

namespace lobres::commonality {

struct IcaOptions {
  int components = kMarketFactors;  // returned, ranked by negentropy
  int extract = 20;                 // searched (capped by the whitened dimension)
  int max_iterations = 500;
  int max_restarts = 5;
  double tolerance = 1e-7;
  std::uint64_t seed = 1;
  /// Warn with DegenerateContrast when the best negentropy is below this.
  double degenerate_negentropy = 1e-4;
};

/// Components have unit variance, are mutually uncorrelated, and are signed
/// to have non-negative skewness.
Factors ica_factors(const CrossSection& y, const IcaOptions& options = {});

/// Log-cosh negentropy estimate of a standardized sample.
double negentropy(const Eigen::VectorXd& y);

/// E log cosh(nu) for a standard normal nu.
double gaussian_logcosh_mean();

}  // namespace lobres::commonality
