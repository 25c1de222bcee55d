#include "core/survival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "core/error.hpp"

namespace lobres::survival {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Greedy left-to-right selection of linearly independent columns, judged on
// unit-norm columns so that covariate scale does not matter.
std::vector<bool> independent_columns(const Eigen::MatrixXd& z) {
  std::vector<bool> keep(static_cast<std::size_t>(z.cols()), false);
  std::vector<Eigen::VectorXd> basis;
  for (Eigen::Index k = 0; k < z.cols(); ++k) {
    const double norm = z.col(k).norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) continue;
    Eigen::VectorXd v = z.col(k) / norm;
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis) v -= q.dot(v) * q;
    }
    const double residual = v.norm();
    if (residual < 1e-9) continue;
    basis.push_back(v / residual);
    keep[static_cast<std::size_t>(k)] = true;
  }
  return keep;
}

}  // namespace

std::size_t SurvivalFit::active_count() const {
  return static_cast<std::size_t>(std::count(active.begin(), active.end(), true));
}

SurvivalFit fit_lognormal_aft(const Eigen::MatrixXd& covariates, std::span<const double> durations) {
  const auto n = static_cast<Eigen::Index>(durations.size());
  const Eigen::Index p = covariates.cols();
  if (covariates.rows() != n) fail(ErrorCode::InvalidArgument, "covariate rows do not match durations");
  if (n < p + 1) {
    fail(ErrorCode::TooFewObservations,
         "lognormal fit needs at least " + std::to_string(p + 1) + " observations, got " + std::to_string(n));
  }

  Eigen::VectorXd y(n);
  double sum_log = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = durations[static_cast<std::size_t>(i)];
    if (!(d > 0.0) || !std::isfinite(d)) fail(ErrorCode::InvalidArgument, "durations must be positive");
    y(i) = std::log(d);
    sum_log += y(i);
  }

  Eigen::MatrixXd z(n, p + 1);
  z.col(0).setOnes();
  z.rightCols(p) = covariates;
  if (!z.allFinite()) fail(ErrorCode::InvalidArgument, "covariates must be finite");

  SurvivalFit fit;
  fit.n_obs = static_cast<std::size_t>(n);
  fit.active = independent_columns(z);
  fit.beta = Eigen::VectorXd::Zero(p + 1);
  fit.std_errors = Eigen::VectorXd::Constant(p + 1, kNaN);
  for (Eigen::Index k = 0; k <= p; ++k) {
    if (!fit.active[static_cast<std::size_t>(k)]) {
      fit.warnings.push_back("RankDeficientDesign: dropped column " + std::to_string(k));
    }
  }

  std::vector<Eigen::Index> cols;
  for (Eigen::Index k = 0; k <= p; ++k) {
    if (fit.active[static_cast<std::size_t>(k)]) cols.push_back(k);
  }
  const auto q = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd za(n, q);
  for (Eigen::Index c = 0; c < q; ++c) za.col(c) = z.col(cols[static_cast<std::size_t>(c)]);

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(za);
  const Eigen::VectorXd b = qr.solve(y);
  const Eigen::VectorXd resid = y - za * b;
  const double sse = resid.squaredNorm();
  for (Eigen::Index c = 0; c < q; ++c) fit.beta(cols[static_cast<std::size_t>(c)]) = b(c);

  const double nd = static_cast<double>(n);
  fit.sigma = std::sqrt(sse / nd);
  fit.saturated = n == q || fit.sigma <= 1e-12 * std::max(1.0, y.cwiseAbs().maxCoeff());
  if (n > q) {
    fit.sigma_unbiased = std::sqrt(sse / static_cast<double>(n - q));
    const Eigen::MatrixXd r = qr.matrixQR().topRows(q).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(q, q));
    const Eigen::MatrixXd cov = fit.sigma_unbiased * fit.sigma_unbiased * (r_inv * r_inv.transpose());
    for (Eigen::Index c = 0; c < q; ++c) {
      fit.std_errors(cols[static_cast<std::size_t>(c)]) = std::sqrt(std::max(0.0, cov(c, c)));
    }
  }
  if (fit.saturated) {
    fit.warnings.emplace_back("saturated fit: residual scale is zero");
    fit.loglik = std::numeric_limits<double>::infinity();
  } else {
    fit.loglik = -sum_log - nd * std::log(fit.sigma) - 0.5 * nd * std::log(2.0 * std::numbers::pi) - 0.5 * nd;
  }
  return fit;
}

double x8_mean(std::span<const ted::TedRecord> records) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : records) {
    const double v = r.covariates[7];
    if (!std::isnan(v)) {
      sum += v;
      ++n;
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

Eigen::MatrixXd design_matrix(std::span<const ted::TedRecord> records, double x8_fill) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(records.size()), static_cast<Eigen::Index>(liquidity::kCovariateCount));
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t k = 0; k < liquidity::kCovariateCount; ++k) {
      double v = records[i].covariates[k];
      if (std::isnan(v) && k == 7) v = x8_fill;
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
    }
  }
  return x;
}

SurvivalFit fit_lognormal_aft(std::span<const ted::TedRecord> records) {
  const double fill = x8_mean(records);
  std::vector<double> durations;
  durations.reserve(records.size());
  for (const auto& r : records) durations.push_back(static_cast<double>(r.duration_ms));
  SurvivalFit fit = fit_lognormal_aft(design_matrix(records, fill), durations);
  fit.x8_fill = fill;
  if (!records.empty()) fit.threshold_index = records.front().threshold_index;
  return fit;
}

liquidity::CovariateVector median_covariates(std::span<const ted::TedRecord> records, double x8_fill) {
  liquidity::CovariateVector med;
  if (records.empty()) return med;
  std::vector<double> col(records.size());
  for (std::size_t k = 0; k < liquidity::kCovariateCount; ++k) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      const double v = records[i].covariates[k];
      col[i] = (std::isnan(v) && k == 7) ? x8_fill : v;
    }
    std::sort(col.begin(), col.end());
    med[k] = ted::quantile_sorted(col, 0.5);
  }
  return med;
}

double expected_log_duration(const SurvivalFit& fit, const liquidity::CovariateVector& reference) {
  if (fit.beta.size() != static_cast<Eigen::Index>(liquidity::kCovariateCount + 1)) {
    fail(ErrorCode::InvalidArgument, "fit does not use the ten standard covariates");
  }
  double y = fit.beta(0);
  for (std::size_t k = 0; k < liquidity::kCovariateCount; ++k) {
    double x = reference[k];
    if (std::isnan(x) && k == 7) x = fit.x8_fill;
    y += fit.beta(static_cast<Eigen::Index>(k + 1)) * x;
  }
  return y;
}

LrpPoints lrp_points(std::span<const SurvivalFit> fits, std::span<const double> thresholds,
                     std::span<const liquidity::CovariateVector> references) {
  if (fits.size() != ted::kThresholdCount) {
    fail(ErrorCode::MissingFit, "LRP needs 9 threshold fits, got " + std::to_string(fits.size()));
  }
  if (thresholds.size() != ted::kThresholdCount || references.size() != ted::kThresholdCount) {
    fail(ErrorCode::InvalidArgument, "LRP needs 9 thresholds and 9 references");
  }
  LrpPoints pts;
  for (std::size_t j = 0; j < ted::kThresholdCount; ++j) {
    pts.thresholds[j] = thresholds[j];
    pts.references[j] = references[j];
    pts.values[j] = expected_log_duration(fits[j], references[j]);
  }
  return pts;
}

LrpPoints lrp_points(std::span<const SurvivalFit> fits, std::span<const double> thresholds,
                     const liquidity::CovariateVector& reference) {
  std::array<liquidity::CovariateVector, ted::kThresholdCount> refs;
  refs.fill(reference);
  return lrp_points(fits, thresholds, refs);
}

}  // namespace lobres::survival
