#include "rankcorr/spearman_stats.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace rankcorr {

namespace {

// Centered rank column scaled to unit Euclidean norm.
Vector standardized_ranks(std::span<const double> column, Eigen::Index column_index) {
  Vector r = ranks(column);
  const double mean = 0.5 * (static_cast<double>(r.size()) + 1.0);
  r.array() -= mean;
  const double norm = r.norm();
  if (norm == 0.0) {
    throw Error(ErrorCode::ConstantColumn,
                "column " + std::to_string(column_index) + " is constant");
  }
  return r / norm;
}

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace

Vector ranks(std::span<const double> column) {
  const std::size_t n = column.size();
  if (n < 2) {
    throw Error(ErrorCode::TooFewObservations, "need at least 2 observations, got " +
                                                   std::to_string(n));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });

  Vector out(static_cast<Eigen::Index>(n));
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && column[order[j]] == column[order[i]]) ++j;
    // positions i..j-1 (0-based) hold ties; ranks i+1..j average to (i+j+1)/2
    const double shared = 0.5 * static_cast<double>(i + j + 1);
    for (std::size_t t = i; t < j; ++t) out(static_cast<Eigen::Index>(order[t])) = shared;
    i = j;
  }
  return out;
}

Vector ranks(const Vector& column) { return ranks(as_span(column)); }

double spearman_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::LengthMismatch, std::to_string(x.size()) + " vs " +
                                               std::to_string(y.size()) + " observations");
  }
  const Vector rx = standardized_ranks(x, 0);
  const Vector ry = standardized_ranks(y, 1);
  return std::clamp(rx.dot(ry), -1.0, 1.0);
}

double spearman_pair(const Vector& x, const Vector& y) { return spearman_pair(as_span(x), as_span(y)); }

Matrix spearman_matrix(const Sample& s) {
  const Eigen::Index n = s.rows();
  const Eigen::Index d = s.cols();
  if (n < 2) {
    throw Error(ErrorCode::TooFewObservations, "need at least 2 observations, got " +
                                                   std::to_string(n));
  }
  Matrix z(n, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const Vector column = s.col(j);
    z.col(j) = standardized_ranks(as_span(column), j);
  }
  Matrix out(d, d);
  out.setZero();
  out.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
  out = out.selfadjointView<Eigen::Lower>();
  out = out.cwiseMax(-1.0).cwiseMin(1.0);
  out.diagonal().setOnes();
  return out;
}

}  // namespace rankcorr
