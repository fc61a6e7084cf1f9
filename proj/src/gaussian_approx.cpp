#include "rankcorr/gaussian_approx.hpp"

#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

namespace rankcorr {

namespace {

void require_unit_interval(double x, const char* what) {
  if (!(std::abs(x) <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, std::string(what) + " must lie in [-1, 1]");
  }
}

Matrix square_root_factor(const CorrelationMatrix& param) {
  Vector roots = param.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  roots.tail(roots.size() - param.rank()).setZero();
  return param.eigenvectors() * roots.asDiagonal();
}

double standard_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

void fill_rows(const Matrix& factor, Sample& out, Eigen::Index begin, Eigen::Index end, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::Index d = factor.rows();
  Vector g(d);
  for (Eigen::Index i = begin; i < end; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(j) = normal(rng);
    const Vector z = factor * g;
    for (Eigen::Index j = 0; j < d; ++j) out(i, j) = standard_normal_cdf(z(j));
  }
}

}  // namespace

double pearson_param_from_spearman(double r) {
  require_unit_interval(r, "Spearman's rho");
  return std::clamp(2.0 * std::sin(std::numbers::pi * r / 6.0), -1.0, 1.0);
}

double spearman_of_gaussian(double rho) {
  require_unit_interval(rho, "Pearson parameter");
  return std::clamp(6.0 / std::numbers::pi * std::asin(rho / 2.0), -1.0, 1.0);
}

double worst_case_error() { return (std::numbers::pi - 3.0) / std::numbers::pi; }

GaussianModel build_gaussian_model(const CorrelationMatrix& target,
                                   GaussianCalibration calibration) {
  Matrix param = target.entries();
  if (calibration == GaussianCalibration::Calibrated) {
    param = param.unaryExpr([](double r) { return pearson_param_from_spearman(r); });
    param.diagonal().setOnes();
  }
  const ValidationReport report = check(param, target.psd_tol(), target.rank_tol());
  if (report.valid) return GaussianModel{validate(param, target.psd_tol(), target.rank_tol())};

  try {
    CorrelationMatrix repaired = nearest_correlation(param);
    const double distance = frobenius_distance(repaired.entries(), param);
    return GaussianModel{std::move(repaired), true, distance};
  } catch (const Error& e) {
    throw Error(ErrorCode::RepairFailed, e.what());
  }
}

Matrix implied_spearman(const GaussianModel& model) {
  Matrix out = model.param.entries().unaryExpr([](double rho) { return spearman_of_gaussian(rho); });
  out.diagonal().setOnes();
  return out;
}

double max_relative_error(const Matrix& target, const Matrix& achieved) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < target.rows(); ++i) {
    for (Eigen::Index j = 0; j < target.cols(); ++j) {
      if (i == j || target(i, j) == 0.0) continue;
      worst = std::max(worst, std::abs(achieved(i, j) - target(i, j)) / std::abs(target(i, j)));
    }
  }
  return worst;
}

Sample sample_gaussian(const GaussianModel& model, Eigen::Index n, Rng& rng) {
  Sample out(n, model.param.dim());
  fill_rows(square_root_factor(model.param), out, 0, n, rng);
  return out;
}

Sample sample_gaussian(const GaussianModel& model, Eigen::Index n, std::uint64_t seed,
                       std::size_t workers) {
  if (workers == 0) workers = 1;
  const Matrix factor = square_root_factor(model.param);
  Sample out(n, model.param.dim());
  auto work = [&](std::size_t w) {
    const RowRange rows = worker_rows(static_cast<std::size_t>(n), workers, w);
    Rng rng = make_substream(seed, w);
    fill_rows(factor, out, static_cast<Eigen::Index>(rows.begin),
              static_cast<Eigen::Index>(rows.end), rng);
  };
  if (workers == 1) {
    work(0);
    return out;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  pool.clear();
  return out;
}

}  // namespace rankcorr
