#pragma once

// Scalar liquidity commonality: daily principal components (or independent
// components) of the sampled liquidity cross-section, and per-asset
// regressions on the first three of them.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "core/sampling.hpp"

namespace lobres::commonality {

/// One day's measurements: rows are time samples, columns assets.
struct CrossSection {
  Eigen::MatrixXd y;
  std::vector<std::string> labels;
  /// Sample times of the rows kept.
  std::vector<lob::TimestampMs> times_ms;
  /// Per original sample: true when the slice was deleted for a missing value.
  std::vector<bool> dropped;

  [[nodiscard]] Eigen::Index slices() const noexcept { return y.rows(); }
  [[nodiscard]] Eigen::Index assets() const noexcept { return y.cols(); }
};

/// Aligns series sampled on a common grid and deletes every slice where any
/// asset is missing. With `differences` the rows become first differences of
/// consecutive kept slices.
CrossSection make_cross_section(std::span<const lob::LiquiditySeries> series, std::vector<std::string> labels,
                                bool differences = false);

/// Direct construction from a complete matrix.
CrossSection make_cross_section(Eigen::MatrixXd y, std::vector<std::string> labels);

enum class Method : std::uint8_t { Pca, Ica };
std::string_view to_string(Method m) noexcept;

struct Factors {
  Method method = Method::Pca;
  Eigen::MatrixXd series;    // slices x k
  /// PCA: eigenvalues of the correlation matrix, descending. ICA: negentropy
  /// estimates of the returned components, descending.
  std::vector<double> strength;
  /// assets x k. PCA: eigenvector entries (0 rows for dropped assets).
  /// ICA: correlation of each asset with each component.
  Eigen::MatrixXd loadings;
  std::vector<bool> used;  // per asset, false when dropped as constant
  std::vector<std::string> warnings;
};

inline constexpr int kMarketFactors = 3;

/// PCA on standardized columns; factors are the leading score series.
/// Constant columns are dropped with a ConstantColumn warning. Needs at least
/// four assets and four slices.
Factors pca_factors(const CrossSection& y, int k = kMarketFactors);

struct FactorRegression {
  Method method = Method::Pca;
  std::vector<std::string> labels;
  /// assets x (1 + k): intercept, then one slope per factor.
  Eigen::MatrixXd coefficients;
  std::vector<double> r2;  // NaN for a constant asset
  Eigen::MatrixXd factors;
};

/// Per-asset OLS of each column on an intercept and the factor series.
FactorRegression factor_regression(const CrossSection& y, const Factors& factors);

/// Column-standardized copy of `y` (mean 0, sd 1) restricted to `used`.
Eigen::MatrixXd standardize(const Eigen::MatrixXd& y, const std::vector<bool>& used);

}  // namespace lobres::commonality
