#include "core/ica.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "core/error.hpp"

namespace lobres::commonality {

namespace {

double logcosh(double x) {
  const double a = std::abs(x);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

struct Component {
  Eigen::VectorXd w;
  bool converged = false;
};

Component fixed_point(const Eigen::MatrixXd& z, const std::vector<Eigen::VectorXd>& previous,
                      const IcaOptions& opt, std::mt19937_64& rng) {
  const Eigen::Index m = z.cols();
  const double n = static_cast<double>(z.rows());
  std::normal_distribution<double> normal;
  auto deflate = [&](Eigen::VectorXd& w) {
    for (const auto& p : previous) w -= p.dot(w) * p;
    w.normalize();
  };
  Component out;
  for (int attempt = 0; attempt <= opt.max_restarts; ++attempt) {
    Eigen::VectorXd w(m);
    for (Eigen::Index i = 0; i < m; ++i) w(i) = normal(rng);
    deflate(w);
    for (int it = 0; it < opt.max_iterations; ++it) {
      const Eigen::VectorXd proj = z * w;
      const Eigen::ArrayXd g = proj.array().tanh();
      const double dg = (1.0 - g.square()).sum() / n;
      Eigen::VectorXd next = z.transpose() * g.matrix() / n - dg * w;
      deflate(next);
      const double change = 1.0 - std::abs(next.dot(w));
      w = next;
      if (change < opt.tolerance) {
        out.w = w;
        out.converged = true;
        return out;
      }
    }
    out.w = w;
  }
  return out;
}

}  // namespace

double gaussian_logcosh_mean() {
  static const double value = [] {
    // Simpson's rule on [-12, 12]; the tails beyond contribute < 1e-30.
    const int n = 24000;
    const double a = -12.0;
    const double h = 24.0 / n;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double x = a + h * i;
      const double f = logcosh(x) * std::exp(-0.5 * x * x);
      sum += f * (i == 0 || i == n ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0));
    }
    return sum * h / 3.0 / std::sqrt(2.0 * std::numbers::pi);
  }();
  return value;
}

double negentropy(const Eigen::VectorXd& y) {
  double mean_g = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) mean_g += logcosh(y(i));
  mean_g /= static_cast<double>(y.size());
  const double d = mean_g - gaussian_logcosh_mean();
  return d * d;
}

Factors ica_factors(const CrossSection& y, const IcaOptions& options) {
  if (y.assets() < 4 || y.slices() < 4) {
    fail(ErrorCode::TooFewObservations, "ICA needs at least 4 assets and 4 time slices");
  }
  if (options.components < 1 || options.max_iterations < 1 || options.max_restarts < 0) {
    fail(ErrorCode::InvalidArgument, "invalid ICA options");
  }
  Factors out;
  out.method = Method::Ica;
  std::vector<bool> used(static_cast<std::size_t>(y.assets()), true);
  for (Eigen::Index j = 0; j < y.assets(); ++j) {
    const double lo = y.y.col(j).minCoeff();
    const double hi = y.y.col(j).maxCoeff();
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
      used[static_cast<std::size_t>(j)] = false;
      out.warnings.push_back("ConstantColumn: dropped " + y.labels[static_cast<std::size_t>(j)]);
    }
  }
  out.used = used;
  const Eigen::MatrixXd x = standardize(y.y, used);
  const auto n = static_cast<double>(x.rows());

  // Whitening: z = x E D^{-1/2}, keeping the numerically non-zero directions.
  Eigen::MatrixXd cov = x.transpose() * x / n;
  cov = 0.5 * (cov + cov.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const double top = eig.eigenvalues().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = eig.eigenvalues().size() - 1; i >= 0; --i) {
    if (eig.eigenvalues()(i) > 1e-10 * top) keep.push_back(i);
  }
  const auto m = static_cast<Eigen::Index>(keep.size());
  if (m < options.components) {
    fail(ErrorCode::ConstantColumn, "whitened dimension below the requested component count");
  }
  Eigen::MatrixXd whitener(x.cols(), m);
  for (Eigen::Index c = 0; c < m; ++c) {
    const Eigen::Index i = keep[static_cast<std::size_t>(c)];
    whitener.col(c) = eig.eigenvectors().col(i) / std::sqrt(eig.eigenvalues()(i));
  }
  const Eigen::MatrixXd z = x * whitener;

  const int extract = static_cast<int>(std::min<Eigen::Index>(m, std::max(options.extract, options.components)));
  std::mt19937_64 rng(options.seed);
  std::vector<Eigen::VectorXd> ws;
  std::vector<double> scores;
  for (int c = 0; c < extract; ++c) {
    Component comp = fixed_point(z, ws, options, rng);
    if (!comp.converged) {
      out.warnings.push_back("NonConvergence: component " + std::to_string(c + 1) + " did not converge after " +
                             std::to_string(options.max_restarts + 1) + " starts");
    }
    ws.push_back(comp.w);
    scores.push_back(negentropy(z * comp.w));
  }

  std::vector<std::size_t> order(ws.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const int k = options.components;
  out.series.resize(x.rows(), k);
  out.loadings = Eigen::MatrixXd::Zero(y.assets(), k);
  for (int f = 0; f < k; ++f) {
    const std::size_t idx = order[static_cast<std::size_t>(f)];
    Eigen::VectorXd s = z * ws[idx];
    // Unit sample variance with the (n - 1) convention used elsewhere.
    s -= Eigen::VectorXd::Constant(s.size(), s.mean());
    s /= std::sqrt(s.squaredNorm() / (n - 1.0));
    if (s.array().cube().sum() < 0.0) s = -s;
    out.series.col(f) = s;
    out.strength.push_back(scores[idx]);
    Eigen::Index c = 0;
    for (Eigen::Index j = 0; j < y.assets(); ++j) {
      if (!used[static_cast<std::size_t>(j)]) continue;
      out.loadings(j, f) = x.col(c++).dot(s) / (n - 1.0);
    }
  }
  if (out.strength.front() < options.degenerate_negentropy) {
    out.warnings.emplace_back("DegenerateContrast: components are close to Gaussian; ranking is unstable");
  }
  return out;
}

}  // namespace lobres::commonality
