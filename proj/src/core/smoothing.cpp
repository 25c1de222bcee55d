#include "core/smoothing.hpp"

#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace lobres::fda {

namespace {

struct System {
  Eigen::MatrixXd phi;
  Eigen::MatrixXd lhs;
};

System build(std::span<const double> u, std::span<const double> y, const BsplineBasis& basis, double lambda) {
  if (u.size() != y.size()) fail(ErrorCode::InvalidArgument, "u and y lengths differ");
  if (u.empty()) fail(ErrorCode::InvalidArgument, "no points to smooth");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail(ErrorCode::InvalidArgument, "lambda must be >= 0");
  System s;
  s.phi = basis.evaluate(u);
  s.lhs = s.phi.transpose() * s.phi;
  if (lambda > 0.0) s.lhs += lambda * basis.penalty_matrix(2);
  return s;
}

// Solves lhs X = rhs, regularizing the diagonal when lhs is numerically singular.
Eigen::MatrixXd solve(Eigen::MatrixXd lhs, const Eigen::MatrixXd& rhs, std::vector<std::string>& warnings) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(lhs);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > 1e-13)) {
    warnings.emplace_back("SingularSystem: added 1e-10 to the diagonal");
    lhs.diagonal().array() += 1e-10;
    ldlt.compute(lhs);
    if (ldlt.info() != Eigen::Success) fail(ErrorCode::SingularSystem, "smoothing system is singular");
  }
  return ldlt.solve(rhs);
}

}  // namespace

SmoothFit smooth_points(std::span<const double> u, std::span<const double> y, const BsplineBasis& basis,
                        double lambda) {
  System s = build(u, y, basis, lambda);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  SmoothFit fit;
  // One factorization for both the coefficients and the hat-matrix trace.
  Eigen::MatrixXd rhs(basis.size(), 1 + s.phi.rows());
  rhs.col(0) = s.phi.transpose() * yv;
  rhs.rightCols(s.phi.rows()) = s.phi.transpose();
  const Eigen::MatrixXd sol = solve(s.lhs, rhs, fit.warnings);
  fit.coefficients = sol.col(0);
  fit.df = (s.phi * sol.rightCols(s.phi.rows())).trace();
  fit.sse = (yv - s.phi * fit.coefficients).squaredNorm();
  return fit;
}

BsplineBasis default_lrp_basis() { return BsplineBasis::uniform(4, 1.0, 9.0, 4); }

FunctionalCurve smooth(const survival::LrpPoints& points, const BsplineBasis& basis, double lambda,
                       CurveMetadata metadata) {
  std::vector<double> u(points.values.size());
  for (std::size_t j = 0; j < u.size(); ++j) u[j] = survival::LrpPoints::domain_point(j);
  const SmoothFit fit = smooth_points(u, points.values, basis, lambda);
  return {basis, fit.coefficients, std::move(metadata)};
}

double pensse(std::span<const double> u, std::span<const double> y, const BsplineBasis& basis, double lambda,
              const Eigen::VectorXd& coefficients) {
  const Eigen::MatrixXd phi = basis.evaluate(u);
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
  double value = (yv - phi * coefficients).squaredNorm();
  if (lambda > 0.0) value += lambda * coefficients.dot(basis.penalty_matrix(2) * coefficients);
  return value;
}

GcvResult gcv(std::span<const double> u, std::span<const double> y, const BsplineBasis& basis,
              std::span<const double> lambda_grid) {
  if (lambda_grid.empty()) fail(ErrorCode::InvalidArgument, "empty lambda grid");
  GcvResult out;
  const double n = static_cast<double>(u.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    const SmoothFit fit = smooth_points(u, y, basis, lambda_grid[i]);
    const double resid_df = n - fit.df;
    const double score = resid_df > 1e-8 ? n * fit.sse / (resid_df * resid_df)
                                         : std::numeric_limits<double>::infinity();
    out.lambdas.push_back(lambda_grid[i]);
    out.scores.push_back(score);
    out.dfs.push_back(fit.df);
    if (score < best || (i == 0 && std::isinf(score))) {
      if (score < best) best = score;
      out.best_index = i;
    }
  }
  out.best_lambda = out.lambdas[out.best_index];
  return out;
}

std::vector<double> default_lambda_grid(std::size_t points) {
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    grid[i] = std::pow(10.0, -6.0 + 8.0 * t);
  }
  return grid;
}

}  // namespace lobres::fda
