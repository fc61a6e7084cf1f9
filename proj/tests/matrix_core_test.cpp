#include "rankcorr/matrix_core.hpp"

#include <gtest/gtest.h>

#include "rankcorr/infeasibility.hpp"
#include "support/oracles.hpp"

namespace rankcorr {
namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::IoError;
}

// Solves B ~= A Q in the least-squares sense and checks Q is orthogonal, i.e.
// the rows of A and B agree up to one right-orthogonal transform.
void expect_same_up_to_rotation(const Matrix& a, const Matrix& b, double tol) {
  ASSERT_EQ(a.rows(), b.rows());
  ASSERT_EQ(a.cols(), b.cols());
  const Matrix q = a.colPivHouseholderQr().solve(b);
  EXPECT_LT((a * q - b).norm(), tol);
  EXPECT_LT((q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).norm(), tol);
}

TEST(Validate, IdentityIsFullRank) {
  const auto r = validate(Matrix::Identity(3, 3));
  EXPECT_EQ(r.rank(), 3);
  EXPECT_DOUBLE_EQ(r.min_eigenvalue(), 1.0);
}

TEST(Validate, M12MatrixHasRankFour) {
  const auto r = validate(gram_matrix(builtin_vectors_12()));
  EXPECT_EQ(r.dim(), 12);
  EXPECT_EQ(r.rank(), 4);
}

TEST(Validate, RejectsIndefinite) {
  Matrix m(2, 2);
  m << 1, 2, 2, 1;
  EXPECT_EQ(code_of([&] { validate(m); }), ErrorCode::NotPSD);
  const auto report = check(m);
  EXPECT_FALSE(report.valid);
  EXPECT_NEAR(report.min_eigenvalue, -1.0, 1e-12);
}

TEST(Validate, ErrorPaths) {
  EXPECT_EQ(code_of([] { validate(Matrix::Identity(2, 3)); }), ErrorCode::NotSquare);

  Matrix asym = Matrix::Identity(2, 2);
  asym(0, 1) = 0.1;
  EXPECT_EQ(code_of([&] { validate(asym); }), ErrorCode::NotSymmetric);

  Matrix diag = Matrix::Identity(2, 2);
  diag(1, 1) = 1.0 + 1e-6;
  EXPECT_EQ(code_of([&] { validate(diag); }), ErrorCode::NotStandardized);

  // PSD within a generous tolerance but with an entry beyond 1.
  Matrix over(2, 2);
  over << 1, 1 + 1e-9, 1 + 1e-9, 1;
  EXPECT_EQ(code_of([&] { validate(over, 1e-6); }), ErrorCode::EntryOutOfRange);
}

TEST(Validate, SymmetrizesAndSnapsSmallDefects) {
  Matrix m(2, 2);
  m << 1 + 5e-10, 0.3 + 4e-10, 0.3 - 4e-10, 1 - 5e-10;
  const auto r = validate(m);
  EXPECT_EQ(r.entries()(0, 0), 1.0);
  EXPECT_EQ(r.entries()(1, 1), 1.0);
  EXPECT_EQ(r.entries()(0, 1), r.entries()(1, 0));
  EXPECT_NEAR(r.entries()(0, 1), 0.3, 1e-15);
}

TEST(Validate, IsIdempotent) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 20; ++t) {
    const Matrix a = testing::random_unit_rows(5, 3, rng);
    const auto once = validate(a * a.transpose());
    const auto twice = validate(once);
    EXPECT_EQ(once.entries(), twice.entries());
    EXPECT_EQ(once.rank(), twice.rank());
    EXPECT_EQ(once.min_eigenvalue(), twice.min_eigenvalue());
  }
}

TEST(RankOf, Examples) {
  EXPECT_EQ(rank_of(validate(Matrix::Identity(7, 7))), 7);
  EXPECT_EQ(rank_of(m12()), 4);
  EXPECT_EQ(rank_of(validate(Matrix::Ones(2, 2))), 1);
}

TEST(RankDecompose, Identity) {
  const auto dec = rank_decompose(validate(Matrix::Identity(4, 4)));
  ASSERT_EQ(dec.k(), 4);
  // Each row is a signed standard basis vector; column order is arbitrary.
  EXPECT_LT((dec.a.cwiseAbs() * dec.a.cwiseAbs().transpose() - Matrix::Identity(4, 4)).norm(), 1e-12);
  EXPECT_LT((dec.a.cwiseAbs().colwise().sum() - Eigen::RowVectorXd::Ones(4)).norm(), 1e-12);
}

TEST(RankDecompose, M12MatrixMatchesVectorsUpToRotation) {
  const auto dec = rank_decompose(m12());
  ASSERT_EQ(dec.k(), 4);
  EXPECT_LT((dec.gram() - gram_matrix(builtin_vectors_12())).cwiseAbs().maxCoeff(), 1e-10);
  expect_same_up_to_rotation(dec.a, builtin_vectors_12().vectors(), 1e-10);
}

TEST(RankDecompose, TwoByTwo) {
  Matrix m(2, 2);
  m << 1, 0.6, 0.6, 1;
  const auto dec = rank_decompose(validate(m));
  Matrix expected(2, 2);
  expected << 1, 0, 0.6, 0.8;
  expect_same_up_to_rotation(dec.a, expected, 1e-12);
}

TEST(RankDecompose, RandomLowRankInvariants) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(2, 12);
  for (int t = 0; t < 100; ++t) {
    const int d = dim(rng);
    const int k = std::uniform_int_distribution<int>(1, d)(rng);
    const Matrix a = testing::random_unit_rows(d, k, rng);
    const auto r = validate(a * a.transpose());
    const auto dec = rank_decompose(r);
    for (Eigen::Index i = 0; i < dec.d(); ++i) EXPECT_NEAR(dec.a.row(i).norm(), 1.0, 1e-10);
    EXPECT_LE((dec.gram() - r.entries()).norm(), 1e-8 * d);
    EXPECT_LE(dec.k(), k);
  }
}

TEST(RankDecompose, ColumnsFollowDescendingEigenvalues) {
  Matrix m(3, 3);
  m << 1, 0.5, 0.2, 0.5, 1, 0.3, 0.2, 0.3, 1;
  const auto dec = rank_decompose(validate(m));
  const Vector col_norms = dec.a.colwise().squaredNorm();
  for (Eigen::Index j = 1; j < col_norms.size(); ++j) EXPECT_GE(col_norms(j - 1), col_norms(j));
}

TEST(RankDecompose, ReconstructionFailureWhenRankTolDropsSpectrum) {
  Matrix m(2, 2);
  m << 1, 0.6, 0.6, 1;
  // Eigenvalues 1.6 and 0.4; a 0.5 relative threshold discards the second.
  const auto r = validate(m, -1.0, 0.5);
  EXPECT_EQ(r.rank(), 1);
  EXPECT_EQ(code_of([&] { rank_decompose(r); }), ErrorCode::ReconstructionFailure);
}

TEST(KMax, Examples) {
  EXPECT_EQ(k_max(9), 3);
  EXPECT_EQ(k_max(12), 4);
  EXPECT_EQ(k_max(1), 1);
  EXPECT_EQ(k_max(10), 4);
  for (int k = 1; k <= 10; ++k) EXPECT_EQ(k_max(k * (k + 1) / 2), k);
}

TEST(NearestCorrelation, FixedPoint) {
  Matrix m(3, 3);
  m << 1, 0.2, -0.1, 0.2, 1, 0.4, -0.1, 0.4, 1;
  const auto r = nearest_correlation(m, 1e-10);
  EXPECT_LT(frobenius_distance(r.entries(), m), 1e-9);
}

TEST(NearestCorrelation, TwoByTwoMatchesBruteForce) {
  Matrix m(2, 2);
  m << 1, 2, 2, 1;
  const double expected = testing::nearest_2x2_offdiag(2.0);
  EXPECT_EQ(expected, 1.0);
  const auto r = nearest_correlation(m, 1e-12);
  EXPECT_NEAR(r.entries()(0, 1), expected, 1e-6);
}

TEST(NearestCorrelation, RepairsIndefinite3x3) {
  Matrix m(3, 3);
  m << 1, 0.9, 0.9, 0.9, 1, -0.9, 0.9, -0.9, 1;
  ASSERT_FALSE(check(m).valid);
  const double tol = 1e-10;
  const auto r = nearest_correlation(m, tol);
  EXPECT_GE(r.min_eigenvalue(), -tol);
  EXPECT_TRUE(check(r.entries()).valid);
}

TEST(NearestCorrelation, BeatsRandomValidMatrices) {
  Matrix m(4, 4);
  m << 1, 0.9, 0.9, -0.5,
       0.9, 1, -0.9, 0.3,
       0.9, -0.9, 1, 0.7,
       -0.5, 0.3, 0.7, 1;
  const auto r = nearest_correlation(m, 1e-12);
  const double best = frobenius_distance(r.entries(), m);
  std::mt19937_64 rng(99);
  for (int t = 0; t < 1000; ++t) {
    const Matrix a = testing::random_unit_rows(4, std::uniform_int_distribution<int>(1, 4)(rng), rng);
    EXPECT_LE(best, frobenius_distance(a * a.transpose(), m) + 1e-9);
  }
}

TEST(NearestCorrelation, NoConvergenceWithTinyBudget) {
  Matrix m(3, 3);
  m << 1, 0.9, 0.9, 0.9, 1, -0.9, 0.9, -0.9, 1;
  EXPECT_EQ(code_of([&] { nearest_correlation(m, 1e-14, 1); }), ErrorCode::NoConvergence);
}

}  // namespace
}  // namespace rankcorr
