#include "core/commonality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace lobres::commonality {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<bool> usable_columns(const Eigen::MatrixXd& y, std::vector<std::string>& warnings,
                                 const std::vector<std::string>& labels) {
  std::vector<bool> used(static_cast<std::size_t>(y.cols()), true);
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    const double lo = y.col(j).minCoeff();
    const double hi = y.col(j).maxCoeff();
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
      used[static_cast<std::size_t>(j)] = false;
      warnings.push_back("ConstantColumn: dropped " + labels[static_cast<std::size_t>(j)]);
    }
  }
  return used;
}

}  // namespace

std::string_view to_string(Method m) noexcept { return m == Method::Pca ? "pca" : "ica"; }

CrossSection make_cross_section(std::span<const lob::LiquiditySeries> series, std::vector<std::string> labels,
                                bool differences) {
  if (series.empty()) fail(ErrorCode::InvalidArgument, "empty cross-section");
  if (labels.size() != series.size()) fail(ErrorCode::InvalidArgument, "one label per series required");
  const std::size_t n = series.front().size();
  for (const auto& s : series) {
    if (s.size() != n || s.times_ms != series.front().times_ms) {
      fail(ErrorCode::InvalidArgument, "series must share one sampling grid");
    }
  }
  CrossSection cs;
  cs.labels = std::move(labels);
  cs.dropped.assign(n, false);
  std::vector<std::size_t> rows;
  for (std::size_t t = 0; t < n; ++t) {
    for (const auto& s : series) {
      if (!std::isfinite(s.values[t])) {
        cs.dropped[t] = true;
        break;
      }
    }
    if (!cs.dropped[t]) rows.push_back(t);
  }
  const auto m = static_cast<Eigen::Index>(series.size());
  const std::size_t first = differences ? 1 : 0;
  const auto out_rows = static_cast<Eigen::Index>(rows.size() > first ? rows.size() - first : 0);
  cs.y.resize(out_rows, m);
  for (Eigen::Index r = 0; r < out_rows; ++r) {
    const std::size_t t = rows[static_cast<std::size_t>(r) + first];
    cs.times_ms.push_back(series.front().times_ms[t]);
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& v = series[static_cast<std::size_t>(j)].values;
      cs.y(r, j) = differences ? v[t] - v[rows[static_cast<std::size_t>(r)]] : v[t];
    }
  }
  return cs;
}

CrossSection make_cross_section(Eigen::MatrixXd y, std::vector<std::string> labels) {
  if (labels.size() != static_cast<std::size_t>(y.cols())) {
    fail(ErrorCode::InvalidArgument, "one label per column required");
  }
  if (!y.allFinite()) fail(ErrorCode::InvalidArgument, "cross-section values must be finite");
  CrossSection cs;
  cs.dropped.assign(static_cast<std::size_t>(y.rows()), false);
  for (Eigen::Index t = 0; t < y.rows(); ++t) cs.times_ms.push_back(t);
  cs.y = std::move(y);
  cs.labels = std::move(labels);
  return cs;
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& y, const std::vector<bool>& used) {
  Eigen::Index cols = 0;
  for (bool u : used) cols += u ? 1 : 0;
  Eigen::MatrixXd z(y.rows(), cols);
  Eigen::Index c = 0;
  const double dof = static_cast<double>(std::max<Eigen::Index>(1, y.rows() - 1));
  for (Eigen::Index j = 0; j < y.cols(); ++j) {
    if (!used[static_cast<std::size_t>(j)]) continue;
    const Eigen::VectorXd centered = y.col(j).array() - y.col(j).mean();
    z.col(c++) = centered / std::sqrt(centered.squaredNorm() / dof);
  }
  return z;
}

Factors pca_factors(const CrossSection& y, int k) {
  if (y.assets() < 4 || y.slices() < 4) {
    fail(ErrorCode::TooFewObservations, "PCA needs at least 4 assets and 4 time slices");
  }
  Factors out;
  out.method = Method::Pca;
  out.used = usable_columns(y.y, out.warnings, y.labels);
  const Eigen::MatrixXd z = standardize(y.y, out.used);
  if (z.cols() < k) fail(ErrorCode::ConstantColumn, "too few non-constant assets for " + std::to_string(k) + " factors");

  Eigen::MatrixXd corr = z.transpose() * z / static_cast<double>(z.rows() - 1);
  corr = 0.5 * (corr + corr.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(corr);
  const Eigen::Index m = corr.rows();

  out.loadings = Eigen::MatrixXd::Zero(y.assets(), k);
  out.series.resize(z.rows(), k);
  for (Eigen::Index i = m - 1; i >= 0; --i) out.strength.push_back(eig.eigenvalues()(i));
  out.strength.resize(static_cast<std::size_t>(k));
  for (int f = 0; f < k; ++f) {
    Eigen::VectorXd v = eig.eigenvectors().col(m - 1 - f);
    // Sign: largest-magnitude entry positive.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0.0) v = -v;
    out.series.col(f) = z * v;
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < y.assets(); ++j) {
      if (out.used[static_cast<std::size_t>(j)]) out.loadings(j, f) = v(c++);
    }
  }
  return out;
}

FactorRegression factor_regression(const CrossSection& y, const Factors& factors) {
  if (factors.series.rows() != y.slices()) fail(ErrorCode::InvalidArgument, "factor and asset series are not aligned");
  const Eigen::Index n = y.slices();
  const Eigen::Index k = factors.series.cols();
  Eigen::MatrixXd x(n, k + 1);
  x.col(0).setOnes();
  x.rightCols(k) = factors.series;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);

  FactorRegression out;
  out.method = factors.method;
  out.labels = y.labels;
  out.factors = factors.series;
  out.coefficients = Eigen::MatrixXd::Constant(y.assets(), k + 1, kNaN);
  out.r2.assign(static_cast<std::size_t>(y.assets()), kNaN);
  for (Eigen::Index j = 0; j < y.assets(); ++j) {
    const Eigen::VectorXd col = y.y.col(j);
    const double tot = (col.array() - col.mean()).square().sum();
    const Eigen::VectorXd b = qr.solve(col);
    out.coefficients.row(j) = b.transpose();
    if (!(tot > 1e-24 * std::max(1.0, col.squaredNorm()))) continue;
    const double res = (col - x * b).squaredNorm();
    out.r2[static_cast<std::size_t>(j)] = std::clamp(1.0 - res / tot, 0.0, 1.0);
  }
  return out;
}

}  // namespace lobres::commonality
