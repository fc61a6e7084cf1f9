#pragma once

#include <cstdint>

#include "rankcorr/matrix_core.hpp"
#include "rankcorr/random.hpp"
#include "rankcorr/spearman_stats.hpp"

namespace rankcorr {

/// Pearson parameter of a bivariate Gaussian copula with Spearman's rho r:
/// 2 sin(pi r / 6). Throws OutOfRange unless |r| <= 1.
double pearson_param_from_spearman(double r);

/// Population Spearman's rho of a Gaussian copula with Pearson parameter rho:
/// (6 / pi) asin(rho / 2). Throws OutOfRange unless |rho| <= 1.
double spearman_of_gaussian(double rho);

/// (pi - 3) / pi, the worst relative error of using the target rank
/// correlation directly as the Gaussian parameter.
double worst_case_error();

enum class GaussianCalibration {
  Calibrated,  // parameter = entrywise pearson_param_from_spearman(target)
  Naive,       // parameter = target
};

struct GaussianModel {
  CorrelationMatrix param;
  bool repaired = false;
  double repair_distance = 0.0;
};

/// Gaussian copula approximating the target Spearman matrix. If the entrywise
/// conversion is not PSD it is replaced by its nearest correlation matrix and
/// the Frobenius repair distance is recorded. Throws RepairFailed when that
/// projection does not converge.
GaussianModel build_gaussian_model(const CorrelationMatrix& target,
                                   GaussianCalibration calibration = GaussianCalibration::Calibrated);

/// Entrywise spearman_of_gaussian of the model parameter.
Matrix implied_spearman(const GaussianModel& model);

/// max over off-diagonal pairs with target != 0 of |achieved - target| / |target|.
double max_relative_error(const Matrix& target, const Matrix& achieved);

/// n rows of Phi(Z) with Z ~ N(0, param). Z is built from the eigen square
/// root of param, so rank-deficient parameters are fine. Margins are U[0,1].
Sample sample_gaussian(const GaussianModel& model, Eigen::Index n, Rng& rng);

/// Parallel variant with the same (seed, workers) contract as sample_model.
Sample sample_gaussian(const GaussianModel& model, Eigen::Index n, std::uint64_t seed,
                       std::size_t workers);

}  // namespace rankcorr
