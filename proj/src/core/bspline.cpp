#include "core/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "core/error.hpp"

namespace lobres::fda {

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "Gauss-Legendre needs at least one node");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  if (n == 1) {
    weights[0] = 2.0;
    return;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(n - 1 - i);
    nodes[a] = -x;
    nodes[b] = x;
    weights[a] = weights[b] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

BsplineBasis::BsplineBasis(int order, double lo, double hi, std::vector<double> interior_knots)
    : order_(order), lo_(lo), hi_(hi), interior_(std::move(interior_knots)) {
  if (order < 1) fail(ErrorCode::InvalidArgument, "spline order must be at least 1");
  if (!(hi > lo)) fail(ErrorCode::InvalidArgument, "spline range must be non-empty");
  double prev = lo;
  for (double k : interior_) {
    if (!(k > prev)) fail(ErrorCode::InvalidArgument, "interior knots must be strictly increasing inside the range");
    prev = k;
  }
  if (!interior_.empty() && !(interior_.back() < hi)) {
    fail(ErrorCode::InvalidArgument, "interior knots must lie inside the range");
  }
  knots_.assign(static_cast<std::size_t>(order), lo);
  knots_.insert(knots_.end(), interior_.begin(), interior_.end());
  knots_.insert(knots_.end(), static_cast<std::size_t>(order), hi);
}

BsplineBasis BsplineBasis::uniform(int order, double lo, double hi, int intervals) {
  if (intervals < 1) fail(ErrorCode::InvalidArgument, "need at least one subinterval");
  std::vector<double> interior;
  for (int i = 1; i < intervals; ++i) interior.push_back(lo + (hi - lo) * i / intervals);
  return {order, lo, hi, std::move(interior)};
}

BsplineBasis BsplineBasis::with_size(int order, double lo, double hi, int size) {
  return uniform(order, lo, hi, size - order + 1);
}

std::vector<double> BsplineBasis::breakpoints() const {
  std::vector<double> b{lo_};
  b.insert(b.end(), interior_.begin(), interior_.end());
  b.push_back(hi_);
  return b;
}

int BsplineBasis::span_index(double u) const {
  // Last s with knots[s] <= u < knots[s+1]; the right end belongs to the last
  // non-degenerate interval.
  const int k = size();
  if (u >= hi_) return k - 1;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
  return static_cast<int>(std::distance(knots_.begin(), it)) - 1;
}

Eigen::VectorXd BsplineBasis::evaluate(double u, int derivative) const {
  const double tol = 1e-12 * (hi_ - lo_);
  if (!(u >= lo_ - tol && u <= hi_ + tol)) {
    fail(ErrorCode::OutOfRange, "point " + std::to_string(u) + " outside [" + std::to_string(lo_) + ", " +
                                    std::to_string(hi_) + "]");
  }
  u = std::clamp(u, lo_, hi_);
  const int k = size();
  if (derivative < 0) fail(ErrorCode::InvalidArgument, "negative derivative order");
  if (derivative >= order_) return Eigen::VectorXd::Zero(k);

  const auto& t = knots_;
  const int nk = static_cast<int>(t.size());
  const int base_order = order_ - derivative;

  // Order-1 functions: indicators of the knot intervals.
  std::vector<double> b(static_cast<std::size_t>(nk - 1), 0.0);
  b[static_cast<std::size_t>(span_index(u))] = 1.0;

  // Cox-de Boor: B_{i,j} = a_{i,j} B_{i,j-1} + (1 - a_{i+1,j}) B_{i+1,j-1},
  // a_{i,j} = (u - t_i) / (t_{i+j-1} - t_i), zero when the knots coincide.
  auto alpha = [&](int i, int j) {
    const double den = t[static_cast<std::size_t>(i + j - 1)] - t[static_cast<std::size_t>(i)];
    return den > 0.0 ? (u - t[static_cast<std::size_t>(i)]) / den : 0.0;
  };
  for (int j = 2; j <= base_order; ++j) {
    const int count = nk - j;
    std::vector<double> next(static_cast<std::size_t>(count), 0.0);
    for (int i = 0; i < count; ++i) {
      next[static_cast<std::size_t>(i)] = alpha(i, j) * b[static_cast<std::size_t>(i)] +
                                          (1.0 - alpha(i + 1, j)) * b[static_cast<std::size_t>(i + 1)];
    }
    b.swap(next);
  }
  // D B_{i,j} = (j-1) [B_{i,j-1} / (t_{i+j-1} - t_i) - B_{i+1,j-1} / (t_{i+j} - t_{i+1})]
  for (int j = base_order + 1; j <= order_; ++j) {
    const int count = nk - j;
    std::vector<double> next(static_cast<std::size_t>(count), 0.0);
    for (int i = 0; i < count; ++i) {
      const double d1 = t[static_cast<std::size_t>(i + j - 1)] - t[static_cast<std::size_t>(i)];
      const double d2 = t[static_cast<std::size_t>(i + j)] - t[static_cast<std::size_t>(i + 1)];
      double v = 0.0;
      if (d1 > 0.0) v += b[static_cast<std::size_t>(i)] / d1;
      if (d2 > 0.0) v -= b[static_cast<std::size_t>(i + 1)] / d2;
      next[static_cast<std::size_t>(i)] = (j - 1) * v;
    }
    b.swap(next);
  }
  return Eigen::Map<const Eigen::VectorXd>(b.data(), k);
}

Eigen::MatrixXd BsplineBasis::evaluate(std::span<const double> u, int derivative) const {
  Eigen::MatrixXd phi(static_cast<Eigen::Index>(u.size()), size());
  for (std::size_t i = 0; i < u.size(); ++i) phi.row(static_cast<Eigen::Index>(i)) = evaluate(u[i], derivative);
  return phi;
}

Eigen::MatrixXd BsplineBasis::product_integral(int derivative) const {
  // Products of two degree (m-1-d) pieces have degree 2(m-1-d); m nodes
  // integrate degree 2m-1 exactly.
  std::vector<double> nodes;
  std::vector<double> weights;
  gauss_legendre(std::max(order_, 2), nodes, weights);
  const int k = size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k, k);
  const auto bp = breakpoints();
  for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
    const double a = bp[s];
    const double b = bp[s + 1];
    const double half = 0.5 * (b - a);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double u = a + half * (nodes[q] + 1.0);
      // Evaluate from inside the interval so the right end never picks the next piece.
      const Eigen::VectorXd v = evaluate(u, derivative);
      out.noalias() += (weights[q] * half) * (v * v.transpose());
    }
  }
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd BsplineBasis::penalty_matrix(int derivative) const {
  if (order_ <= derivative) {
    fail(ErrorCode::InvalidArgument, "roughness penalty of order " + std::to_string(derivative) +
                                         " needs spline order above it");
  }
  return product_integral(derivative);
}

Eigen::MatrixXd BsplineBasis::gram_matrix() const { return product_integral(0); }

Eigen::VectorXd BsplineBasis::integrals() const {
  // Closed form: integral of B_{i,m} = (t_{i+m} - t_i) / m.
  Eigen::VectorXd out(size());
  for (int i = 0; i < size(); ++i) {
    out(i) = (knots_[static_cast<std::size_t>(i + order_)] - knots_[static_cast<std::size_t>(i)]) / order_;
  }
  return out;
}

bool BsplineBasis::operator==(const BsplineBasis& o) const {
  return order_ == o.order_ && lo_ == o.lo_ && hi_ == o.hi_ && interior_ == o.interior_;
}

FunctionalCurve::FunctionalCurve(BsplineBasis b, Eigen::VectorXd c, CurveMetadata m)
    : basis(std::move(b)), coefficients(std::move(c)), metadata(std::move(m)) {
  if (coefficients.size() != basis.size()) {
    fail(ErrorCode::InvalidArgument, "coefficient count does not match basis size");
  }
}

double FunctionalCurve::operator()(double u, int derivative) const {
  return basis.evaluate(u, derivative).dot(coefficients);
}

Eigen::VectorXd FunctionalCurve::evaluate(std::span<const double> u, int derivative) const {
  return basis.evaluate(u, derivative) * coefficients;
}

double inner_product(const FunctionalCurve& a, const FunctionalCurve& b) {
  if (a.basis != b.basis) fail(ErrorCode::SharedBasisViolation, "curves use different bases");
  return a.coefficients.dot(a.basis.gram_matrix() * b.coefficients);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

}  // namespace lobres::fda
