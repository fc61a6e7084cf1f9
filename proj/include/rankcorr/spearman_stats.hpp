#pragma once

#include <span>

#include "rankcorr/matrix_core.hpp"

namespace rankcorr {

// n x d observations, one row per realization.
using Sample = Matrix;

/// Average ranks (1-based); tied values share the mean of the ranks they span.
Vector ranks(std::span<const double> column);
Vector ranks(const Vector& column);

/// Sample Spearman's rho: the Pearson correlation of the two rank vectors.
double spearman_pair(std::span<const double> x, std::span<const double> y);
double spearman_pair(const Vector& x, const Vector& y);

/// Matrix of pairwise sample Spearman's rho values. Columns are ranked once and
/// the result is the Gram matrix of the standardized rank columns, so it is
/// positive semidefinite up to rounding. The diagonal is exactly one.
Matrix spearman_matrix(const Sample& s);

}  // namespace rankcorr
