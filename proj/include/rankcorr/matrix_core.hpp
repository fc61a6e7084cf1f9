#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rankcorr/error.hpp"

namespace rankcorr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Tolerance policy for "numerically PSD" and "numerical rank".
inline double default_psd_tol(Eigen::Index d) { return 1e-8 * static_cast<double>(d); }
inline constexpr double kDefaultRankTol = 1e-8;

inline constexpr double kSymmetryTol = 1e-9;
inline constexpr double kDiagonalTol = 1e-9;
inline constexpr double kEntryRangeSlack = 1e-12;

/// A validated member of the set of standardized symmetric positive
/// semidefinite matrices (linear correlation matrices).
///
/// Instances are only produced by `validate`, so the diagonal is exactly one,
/// storage is exactly symmetric and the spectrum has been checked. The
/// eigenpairs are kept in descending eigenvalue order.
class CorrelationMatrix {
 public:
  const Matrix& entries() const { return entries_; }
  Eigen::Index dim() const { return entries_.rows(); }
  int rank() const { return rank_; }
  double min_eigenvalue() const { return eigenvalues_(eigenvalues_.size() - 1); }
  double max_eigenvalue() const { return eigenvalues_(0); }
  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }
  double psd_tol() const { return psd_tol_; }
  double rank_tol() const { return rank_tol_; }

 private:
  friend CorrelationMatrix validate(const Matrix&, double, double);
  CorrelationMatrix() = default;

  Matrix entries_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
  int rank_ = 0;
  double psd_tol_ = 0.0;
  double rank_tol_ = 0.0;
};

/// d x k factor with unit rows whose Gram matrix reproduces a correlation
/// matrix.
struct RankDecomposition {
  Matrix a;

  Eigen::Index d() const { return a.rows(); }
  Eigen::Index k() const { return a.cols(); }
  Matrix gram() const { return a * a.transpose(); }
};

struct ValidationIssue {
  ErrorCode code;
  std::string message;
};

/// Every problem found with a candidate, plus the spectrum when it could be
/// computed. `valid` is true iff `issues` is empty.
struct ValidationReport {
  Eigen::Index dimension = 0;
  bool valid = false;
  int rank = 0;
  double min_eigenvalue = 0.0;
  double psd_tol = 0.0;
  double rank_tol = 0.0;
  std::vector<ValidationIssue> issues;
};

/// Inspects a candidate without throwing. Pass a negative psd_tol to use
/// `default_psd_tol(d)`.
ValidationReport check(const Matrix& m, double psd_tol = -1.0, double rank_tol = kDefaultRankTol);

/// Validates a candidate correlation matrix. Small asymmetry (<= 1e-9) is
/// removed by averaging with the transpose; diagonal entries within 1e-9 of one
/// are snapped to one. Throws `Error` with the first issue reported by `check`.
CorrelationMatrix validate(const Matrix& m, double psd_tol = -1.0, double rank_tol = kDefaultRankTol);
inline CorrelationMatrix validate(const CorrelationMatrix& r) {
  return validate(r.entries(), r.psd_tol(), r.rank_tol());
}

/// Number of eigenvalues above rank_tol times the largest one.
int rank_of(const CorrelationMatrix& r, double rank_tol = kDefaultRankTol);

/// A = U_k diag(sqrt(lambda_1..lambda_k)) with k = r.rank(), columns in
/// descending eigenvalue order. Each eigenvector is sign-normalized so that its
/// largest-magnitude component is positive.
RankDecomposition rank_decompose(const CorrelationMatrix& r);

/// Largest k with k(k+1)/2 <= d.
int k_max(int d);

/// Nearest correlation matrix by alternating projections (with Dykstra's
/// correction) between the PSD cone and the unit-diagonal matrices.
CorrelationMatrix nearest_correlation(const Matrix& m, double tol = 1e-10, int max_iter = 10000);

double frobenius_distance(const Matrix& a, const Matrix& b);

}  // namespace rankcorr
