#include "core/fpca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "core/error.hpp"

namespace lobres::fda {

double FpcaResult::total_variance() const {
  return std::accumulate(all_eigenvalues.begin(), all_eigenvalues.end(), 0.0);
}

FpcaResult fpca(std::span<const FunctionalCurve> curves, int q) {
  if (q < 1) fail(ErrorCode::InvalidArgument, "need at least one component");
  if (curves.size() < static_cast<std::size_t>(q) + 1) {
    fail(ErrorCode::InsufficientCurves,
         "FPCA with " + std::to_string(q) + " components needs at least " + std::to_string(q + 1) + " curves");
  }
  const BsplineBasis& basis = curves.front().basis;
  for (const auto& c : curves) {
    if (c.basis != basis) fail(ErrorCode::SharedBasisViolation, "FPCA curves must share one basis");
  }
  const int k = basis.size();
  if (q > k) fail(ErrorCode::InvalidArgument, "more components than basis functions");
  const auto n = static_cast<Eigen::Index>(curves.size());

  Eigen::MatrixXd coef(n, k);
  for (Eigen::Index i = 0; i < n; ++i) coef.row(i) = curves[static_cast<std::size_t>(i)].coefficients.transpose();
  const Eigen::VectorXd mean = coef.colwise().mean().transpose();
  const Eigen::MatrixXd centered = coef.rowwise() - mean.transpose();

  const Eigen::MatrixXd gram = basis.gram_matrix();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> gram_eig(gram);
  const Eigen::VectorXd gvals = gram_eig.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd half = gram_eig.eigenvectors() * gvals.cwiseSqrt().asDiagonal() *
                               gram_eig.eigenvectors().transpose();
  const Eigen::MatrixXd inv_half = gram_eig.eigenvectors() * gvals.cwiseSqrt().cwiseInverse().asDiagonal() *
                                   gram_eig.eigenvectors().transpose();

  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n - 1);
  Eigen::MatrixXd op = half * cov * half;
  op = 0.5 * (op + op.transpose());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(op);

  FpcaResult out{FunctionalCurve(basis, mean), {}, {}, {}, Eigen::MatrixXd(n, q), {}, false, {}};
  out.mean.metadata.measure = curves.front().metadata.measure;
  out.mean.metadata.day = curves.front().metadata.day;
  out.mean.metadata.asset = "mean";
  for (const auto& c : curves) out.labels.push_back(c.metadata.asset);

  // Eigen returns ascending order.
  for (Eigen::Index i = k - 1; i >= 0; --i) out.all_eigenvalues.push_back(eig.eigenvalues()(i));
  const double scale = std::max(1.0, mean.squaredNorm());
  for (double& v : out.all_eigenvalues) {
    if (std::abs(v) < 1e-14 * scale) v = 0.0;
  }
  out.degenerate = out.all_eigenvalues.front() <= 1e-12 * scale;
  if (out.degenerate) out.warnings.emplace_back("curves show no variation; eigenfunctions are arbitrary");

  const Eigen::VectorXd integrals = basis.integrals();
  for (int j = 0; j < q; ++j) {
    Eigen::VectorXd b = inv_half * eig.eigenvectors().col(k - 1 - j);
    if (b.dot(integrals) < 0.0) b = -b;
    out.eigenvalues.push_back(out.all_eigenvalues[static_cast<std::size_t>(j)]);
    out.scores.col(j) = centered * (gram * b);
    CurveMetadata meta = out.mean.metadata;
    meta.asset = "xi" + std::to_string(j + 1);
    out.eigenfunctions.emplace_back(basis, b, std::move(meta));
  }
  return out;
}

}  // namespace lobres::fda
