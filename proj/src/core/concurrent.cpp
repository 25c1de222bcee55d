#include "core/concurrent.hpp"

#include <cmath>
#include <limits>

#include "core/error.hpp"

namespace lobres::fda {

std::vector<double> trapezoid_weights(std::span<const double> grid) {
  std::vector<double> w(grid.size(), 0.0);
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    const double h = 0.5 * (grid[g + 1] - grid[g]);
    w[g] += h;
    w[g + 1] += h;
  }
  return w;
}

std::vector<double> simpson_weights(std::span<const double> grid) {
  const std::size_t n = grid.size();
  if (n < 3 || n % 2 == 0) return trapezoid_weights(grid);
  const double h = (grid.back() - grid.front()) / static_cast<double>(n - 1);
  for (std::size_t g = 0; g + 1 < n; ++g) {
    if (std::abs(grid[g + 1] - grid[g] - h) > 1e-9 * std::abs(h)) return trapezoid_weights(grid);
  }
  std::vector<double> w(n);
  for (std::size_t g = 0; g < n; ++g) w[g] = (g == 0 || g + 1 == n ? 1.0 : (g % 2 == 1 ? 4.0 : 2.0)) * h / 3.0;
  return w;
}

double ConcurrentFit::mean_r2(double u_from, double u_to) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (grid[g] >= u_from && grid[g] <= u_to && std::isfinite(r2[g])) {
      sum += r2[g];
      ++n;
    }
  }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(n);
}

ConcurrentFit concurrent_regress(const Eigen::MatrixXd& responses, const std::vector<Eigen::MatrixXd>& covariates,
                                 std::span<const double> grid, const ConcurrentOptions& options) {
  const Eigen::Index days = responses.rows();
  const auto ng = static_cast<Eigen::Index>(grid.size());
  const auto q = static_cast<Eigen::Index>(covariates.size());
  if (q < 1) fail(ErrorCode::InvalidArgument, "need at least one covariate function");
  if (days < q + 1) {
    fail(ErrorCode::InsufficientCurves, "concurrent regression needs at least " + std::to_string(q + 1) + " days");
  }
  if (responses.cols() != ng) fail(ErrorCode::InvalidArgument, "response grid size mismatch");
  for (const auto& z : covariates) {
    if (z.rows() != days || z.cols() != ng) fail(ErrorCode::InvalidArgument, "covariate shape mismatch");
  }
  if (ng < 2) fail(ErrorCode::InvalidArgument, "grid needs at least two points");

  const BsplineBasis beta_basis =
      options.beta_basis ? *options.beta_basis : BsplineBasis::with_size(4, grid.front(), grid.back(), 5);
  const Eigen::Index kb = beta_basis.size();
  const Eigen::Index offset = options.intercept ? 1 : 0;
  const Eigen::Index np = offset + q * kb;

  const std::vector<double> w = simpson_weights(grid);
  const Eigen::MatrixXd theta = beta_basis.evaluate(grid);  // ng x kb

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(np, np);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(np);
  Eigen::VectorXd z(np);
  for (Eigen::Index g = 0; g < ng; ++g) {
    const double wg = w[static_cast<std::size_t>(g)];
    for (Eigen::Index t = 0; t < days; ++t) {
      if (options.intercept) z(0) = 1.0;
      for (Eigen::Index j = 0; j < q; ++j) {
        z.segment(offset + j * kb, kb) = covariates[static_cast<std::size_t>(j)](t, g) * theta.row(g).transpose();
      }
      gram.selfadjointView<Eigen::Lower>().rankUpdate(z, wg);
      rhs += wg * responses(t, g) * z;
    }
  }
  gram = gram.selfadjointView<Eigen::Lower>();

  Eigen::MatrixXd penalty = Eigen::MatrixXd::Zero(np, np);
  if (beta_basis.order() > 2) {
    const Eigen::MatrixXd r = beta_basis.penalty_matrix(2);
    for (Eigen::Index j = 0; j < q; ++j) penalty.block(offset + j * kb, offset + j * kb, kb, kb) = r;
  }

  ConcurrentFit fit;
  fit.days = static_cast<std::size_t>(days);
  fit.grid.assign(grid.begin(), grid.end());
  double lambda = options.lambda;
  Eigen::VectorXd b;
  for (int attempt = 0;; ++attempt) {
    const Eigen::MatrixXd lhs = gram + lambda * penalty;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lhs);
    const Eigen::VectorXd ev = eig.eigenvalues();
    if (eig.info() == Eigen::Success && ev(ev.size() - 1) > 0.0 && ev(0) > 1e-12 * ev(ev.size() - 1)) {
      b = eig.eigenvectors() * ((eig.eigenvectors().transpose() * rhs).array() / ev.array()).matrix();
      break;
    }
    if (attempt >= 8 || penalty.isZero()) {
      fail(ErrorCode::SingularNormalEquations, "concurrent regression normal equations are singular");
    }
    lambda = std::max(lambda * 10.0, 1e-8);
    fit.warnings.push_back("SingularNormalEquations: lambda raised to " + std::to_string(lambda));
  }
  fit.lambda = lambda;

  if (options.intercept) fit.intercept = b(0);
  for (Eigen::Index j = 0; j < q; ++j) {
    CurveMetadata meta;
    meta.asset = "beta" + std::to_string(j + 1);
    fit.betas.emplace_back(beta_basis, b.segment(offset + j * kb, kb), std::move(meta));
  }

  // Fitted values and the R^2 function.
  Eigen::MatrixXd fitted = Eigen::MatrixXd::Constant(days, ng, options.intercept ? b(0) : 0.0);
  for (Eigen::Index j = 0; j < q; ++j) {
    const Eigen::VectorXd beta_g = theta * b.segment(offset + j * kb, kb);
    fitted += (covariates[static_cast<std::size_t>(j)].array().rowwise() * beta_g.transpose().array()).matrix();
  }
  const Eigen::RowVectorXd mu = responses.colwise().mean();
  fit.r2.resize(static_cast<std::size_t>(ng));
  fit.ss_reg.resize(static_cast<std::size_t>(ng));
  fit.ss_res.resize(static_cast<std::size_t>(ng));
  fit.r2_standard.resize(static_cast<std::size_t>(ng));
  for (Eigen::Index g = 0; g < ng; ++g) {
    const double reg = (fitted.col(g).array() - mu(g)).square().sum();
    const double res = (fitted.col(g) - responses.col(g)).squaredNorm();
    const double tot = (responses.col(g).array() - mu(g)).square().sum();
    const auto gi = static_cast<std::size_t>(g);
    fit.ss_reg[gi] = reg;
    fit.ss_res[gi] = res;
    fit.r2[gi] = reg + res > 0.0 ? reg / (reg + res) : 0.0;
    fit.r2_standard[gi] = tot > 0.0 ? 1.0 - res / tot : std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

ConcurrentFit concurrent_regress(std::span<const FunctionalCurve> responses,
                                 const std::vector<std::vector<FunctionalCurve>>& covariates,
                                 const ConcurrentOptions& options) {
  if (responses.empty()) fail(ErrorCode::InsufficientCurves, "no response curves");
  if (covariates.size() != responses.size()) fail(ErrorCode::InvalidArgument, "one covariate set per day required");
  const double lo = responses.front().basis.lo();
  const double hi = responses.front().basis.hi();
  const std::size_t q = covariates.front().size();
  for (const auto& day : covariates) {
    if (day.size() != q) fail(ErrorCode::InvalidArgument, "covariate count differs between days");
    for (const auto& c : day) {
      if (c.basis.lo() != lo || c.basis.hi() != hi) {
        fail(ErrorCode::InvalidArgument, "covariates and responses must share the domain");
      }
    }
  }
  if (options.grid_points < 2) fail(ErrorCode::InvalidArgument, "grid needs at least two points");
  const std::vector<double> grid = linspace(lo, hi, options.grid_points);
  const auto days = static_cast<Eigen::Index>(responses.size());
  const auto ng = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd x(days, ng);
  std::vector<Eigen::MatrixXd> z(q, Eigen::MatrixXd(days, ng));
  for (Eigen::Index t = 0; t < days; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    if (responses[ti].basis.lo() != lo || responses[ti].basis.hi() != hi) {
      fail(ErrorCode::InvalidArgument, "response curves must share the domain");
    }
    x.row(t) = responses[ti].evaluate(grid).transpose();
    for (std::size_t j = 0; j < q; ++j) z[j].row(t) = covariates[ti][j].evaluate(grid).transpose();
  }
  return concurrent_regress(x, z, grid, options);
}

}  // namespace lobres::fda
