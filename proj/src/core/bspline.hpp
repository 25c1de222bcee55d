#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lobres::fda {

/// B-spline basis of order m (degree m-1) on [lo, hi] with L-1 interior
/// knots, giving K = m + L - 1 functions. The knot vector repeats each end m
/// times.
class BsplineBasis {
 public:
  BsplineBasis(int order, double lo, double hi, std::vector<double> interior_knots);

  /// L equal subintervals (L-1 equally spaced interior knots).
  static BsplineBasis uniform(int order, double lo, double hi, int intervals);
  /// Equally spaced knots chosen so the basis has `size` functions.
  static BsplineBasis with_size(int order, double lo, double hi, int size);

  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] int size() const noexcept { return static_cast<int>(knots_.size()) - order_; }
  [[nodiscard]] double lo() const noexcept { return lo_; }
  [[nodiscard]] double hi() const noexcept { return hi_; }
  [[nodiscard]] const std::vector<double>& interior_knots() const noexcept { return interior_; }
  [[nodiscard]] const std::vector<double>& knot_vector() const noexcept { return knots_; }
  /// lo, interior knots, hi.
  [[nodiscard]] std::vector<double> breakpoints() const;

  /// Values (or derivatives) of all K functions at u. Throws OutOfRange.
  [[nodiscard]] Eigen::VectorXd evaluate(double u, int derivative = 0) const;
  /// Row i holds evaluate(u[i]).
  [[nodiscard]] Eigen::MatrixXd evaluate(std::span<const double> u, int derivative = 0) const;

  /// R = integral of D^d phi D^d phi' (d = 2 by default), exact Gauss-Legendre
  /// quadrature per subinterval. Requires order > d.
  [[nodiscard]] Eigen::MatrixXd penalty_matrix(int derivative = 2) const;
  /// W = integral of phi phi'.
  [[nodiscard]] Eigen::MatrixXd gram_matrix() const;
  /// integral of each phi_k.
  [[nodiscard]] Eigen::VectorXd integrals() const;

  bool operator==(const BsplineBasis& o) const;
  bool operator!=(const BsplineBasis& o) const { return !(*this == o); }

 private:
  [[nodiscard]] int span_index(double u) const;
  [[nodiscard]] Eigen::MatrixXd product_integral(int derivative) const;

  int order_;
  double lo_;
  double hi_;
  std::vector<double> interior_;
  std::vector<double> knots_;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct CurveMetadata {
  std::string asset;
  std::string day;
  std::string measure;
};

/// x(u) = sum_k c_k phi_k(u).
struct FunctionalCurve {
  BsplineBasis basis;
  Eigen::VectorXd coefficients;
  CurveMetadata metadata;

  FunctionalCurve(BsplineBasis b, Eigen::VectorXd c, CurveMetadata m = {});

  [[nodiscard]] double operator()(double u, int derivative = 0) const;
  [[nodiscard]] Eigen::VectorXd evaluate(std::span<const double> u, int derivative = 0) const;
};

/// L2 inner product of two curves on the same basis.
double inner_product(const FunctionalCurve& a, const FunctionalCurve& b);

std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace lobres::fda
