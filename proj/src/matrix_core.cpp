#include "rankcorr/matrix_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rankcorr {

namespace {

struct Spectrum {
  Vector values;   // descending
  Matrix vectors;  // columns match `values`
};

Spectrum descending_spectrum(const Matrix& sym) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::NoConvergence, "symmetric eigensolver failed");
  }
  Spectrum s;
  s.values = solver.eigenvalues().reverse();
  s.vectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index j = 0; j < s.vectors.cols(); ++j) {
    Eigen::Index pivot = 0;
    s.vectors.col(j).cwiseAbs().maxCoeff(&pivot);
    if (s.vectors(pivot, j) < 0.0) s.vectors.col(j) = -s.vectors.col(j);
  }
  return s;
}

int count_rank(const Vector& descending, double rank_tol) {
  const double top = descending.size() > 0 ? descending(0) : 0.0;
  if (top <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < descending.size(); ++i) {
    if (descending(i) > rank_tol * top) ++rank;
  }
  return rank;
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Matrix project_psd(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(x);
  const Vector clipped = solver.eigenvalues().cwiseMax(0.0);
  return solver.eigenvectors() * clipped.asDiagonal() * solver.eigenvectors().transpose();
}

}  // namespace

double frobenius_distance(const Matrix& a, const Matrix& b) { return (a - b).norm(); }

ValidationReport check(const Matrix& m, double psd_tol, double rank_tol) {
  ValidationReport report;
  report.dimension = m.rows();
  report.rank_tol = rank_tol;
  if (m.rows() != m.cols() || m.rows() < 1) {
    std::ostringstream os;
    os << "matrix is " << m.rows() << "x" << m.cols();
    report.issues.push_back({ErrorCode::NotSquare, os.str()});
    return report;
  }
  const Eigen::Index d = m.rows();
  report.psd_tol = psd_tol < 0.0 ? default_psd_tol(d) : psd_tol;

  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol) {
    report.issues.push_back({ErrorCode::NotSymmetric, "max asymmetry " + fmt_double(asym)});
  }
  const double diag_dev = (m.diagonal().array() - 1.0).abs().maxCoeff();
  if (diag_dev > kDiagonalTol) {
    report.issues.push_back(
        {ErrorCode::NotStandardized, "max diagonal deviation " + fmt_double(diag_dev)});
  }
  if (!m.allFinite()) {
    report.issues.push_back({ErrorCode::EntryOutOfRange, "non-finite entry"});
    return report;
  }

  Matrix sym = 0.5 * (m + m.transpose());
  sym.diagonal().setOnes();
  const Spectrum spectrum = descending_spectrum(sym);
  report.min_eigenvalue = spectrum.values(d - 1);
  report.rank = count_rank(spectrum.values, rank_tol);
  if (report.min_eigenvalue < -report.psd_tol) {
    report.issues.push_back(
        {ErrorCode::NotPSD, "min eigenvalue " + fmt_double(report.min_eigenvalue)});
  }
  const double max_abs = sym.cwiseAbs().maxCoeff();
  if (max_abs > 1.0 + kEntryRangeSlack) {
    report.issues.push_back({ErrorCode::EntryOutOfRange, "max |entry| " + fmt_double(max_abs)});
  }
  report.valid = report.issues.empty();
  return report;
}

CorrelationMatrix validate(const Matrix& m, double psd_tol, double rank_tol) {
  const ValidationReport report = check(m, psd_tol, rank_tol);
  if (!report.valid) {
    throw Error(report.issues.front().code, report.issues.front().message);
  }
  CorrelationMatrix r;
  r.entries_ = 0.5 * (m + m.transpose());
  r.entries_.diagonal().setOnes();
  Spectrum spectrum = descending_spectrum(r.entries_);
  r.eigenvalues_ = std::move(spectrum.values);
  r.eigenvectors_ = std::move(spectrum.vectors);
  r.rank_ = count_rank(r.eigenvalues_, rank_tol);
  r.psd_tol_ = report.psd_tol;
  r.rank_tol_ = rank_tol;
  return r;
}

int rank_of(const CorrelationMatrix& r, double rank_tol) {
  return count_rank(r.eigenvalues(), rank_tol);
}

RankDecomposition rank_decompose(const CorrelationMatrix& r) {
  const Eigen::Index d = r.dim();
  const Eigen::Index k = std::max(1, r.rank());
  const Vector roots = r.eigenvalues().head(k).cwiseMax(0.0).cwiseSqrt();
  RankDecomposition out{r.eigenvectors().leftCols(k) * roots.asDiagonal()};

  for (Eigen::Index i = 0; i < d; ++i) {
    const double norm = out.a.row(i).norm();
    if (std::abs(norm - 1.0) <= 1e-8 && norm > 0.0) out.a.row(i) /= norm;
    if (std::abs(out.a.row(i).norm() - 1.0) > 1e-10) {
      throw Error(ErrorCode::ReconstructionFailure,
                  "row " + std::to_string(i) + " has norm " + fmt_double(norm) +
                      "; rank_tol drops too much of the spectrum");
    }
  }
  const double residual = frobenius_distance(out.gram(), r.entries());
  if (residual > 1e-8 * static_cast<double>(d)) {
    throw Error(ErrorCode::ReconstructionFailure, "residual " + fmt_double(residual));
  }
  return out;
}

int k_max(int d) {
  int k = 0;
  while ((k + 1) * (k + 2) / 2 <= d) ++k;
  return k;
}

CorrelationMatrix nearest_correlation(const Matrix& m, double tol, int max_iter) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw Error(ErrorCode::NotSquare, "nearest_correlation needs a square matrix");
  }
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
    throw Error(ErrorCode::NotSymmetric, "nearest_correlation needs a symmetric matrix");
  }
  const Matrix target = 0.5 * (m + m.transpose());

  Matrix y = target;
  y.diagonal().setOnes();
  Matrix correction = Matrix::Zero(m.rows(), m.cols());
  for (int iter = 0; iter < max_iter; ++iter) {
    const Matrix r = y - correction;
    const Matrix x = project_psd(r);
    correction = x - r;
    Matrix next = x;
    next.diagonal().setOnes();
    const double step = frobenius_distance(next, y);
    y = std::move(next);
    if (step < tol) {
      // Finish on an exactly PSD point and restore the unit diagonal by
      // congruence scaling, which keeps it PSD.
      Matrix psd = project_psd(y);
      const Vector scale = psd.diagonal().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
      psd = scale.asDiagonal() * psd * scale.asDiagonal();
      psd = 0.5 * (psd + psd.transpose());
      psd.diagonal().setOnes();
      return validate(psd);
    }
  }
  throw Error(ErrorCode::NoConvergence,
              "nearest_correlation did not converge in " + std::to_string(max_iter) + " iterations");
}

}  // namespace rankcorr
