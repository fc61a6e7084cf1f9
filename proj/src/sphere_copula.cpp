#include "rankcorr/sphere_copula.hpp"

#include <cmath>
#include <thread>

namespace rankcorr {

namespace {

void fill_rows(const SphereModel& model, Sample& out, Eigen::Index begin, Eigen::Index end,
               Rng& rng) {
  for (Eigen::Index i = begin; i < end; ++i) {
    out.row(i).noalias() = (model.a() * sample_sphere_point(rng)).transpose();
  }
}

void fill_rows(const MixtureModel& model, Sample& out, Eigen::Index begin, Eigen::Index end,
               Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& weights = model.weights();
  for (Eigen::Index i = begin; i < end; ++i) {
    const double u = unit(rng);
    std::size_t pick = 0;
    double cumulative = weights[0];
    while (u >= cumulative && pick + 1 < weights.size()) cumulative += weights[++pick];
    out.row(i).noalias() = (model.components()[pick].a() * sample_sphere_point(rng)).transpose();
  }
}

}  // namespace

Eigen::Vector3d sample_sphere_point(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  while (true) {
    Eigen::Vector3d v(normal(rng), normal(rng), normal(rng));
    const double norm = v.norm();
    if (norm > 0.0) return v / norm;
  }
}

SphereModel::SphereModel(Matrix a) : a_(std::move(a)) {
  if (a_.cols() != 3 || a_.rows() < 1) {
    throw Error(ErrorCode::InvalidModel, "sphere model needs a d x 3 matrix with d >= 1");
  }
  for (Eigen::Index i = 0; i < a_.rows(); ++i) {
    if (std::abs(a_.row(i).norm() - 1.0) > kUnitRowTol) {
      throw Error(ErrorCode::InvalidModel, "row " + std::to_string(i) + " is not a unit vector");
    }
  }
}

MixtureModel::MixtureModel(std::vector<double> weights, std::vector<SphereModel> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (weights_.empty() || weights_.size() != components_.size()) {
    throw Error(ErrorCode::InvalidModel, "mixture needs one weight per component");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw Error(ErrorCode::InvalidModel, "negative mixture weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    throw Error(ErrorCode::InvalidModel, "mixture weights do not sum to one");
  }
  for (const auto& c : components_) {
    if (c.dim() != components_.front().dim()) {
      throw Error(ErrorCode::InvalidModel, "mixture components differ in dimension");
    }
  }
}

SphereModel build_from_rank3(const CorrelationMatrix& r) {
  if (r.rank() > 3) {
    throw Error(ErrorCode::RankTooHigh,
                "rank " + std::to_string(r.rank()) + " exceeds 3; no exact sphere construction");
  }
  const RankDecomposition dec = rank_decompose(r);
  Matrix a = Matrix::Zero(r.dim(), 3);
  a.leftCols(dec.k()) = dec.a;
  return SphereModel(std::move(a));
}

Sample sample_model(const SphereModel& model, Eigen::Index n, Rng& rng) {
  Sample out(n, model.dim());
  fill_rows(model, out, 0, n, rng);
  return out;
}

Sample sample_model(const MixtureModel& model, Eigen::Index n, Rng& rng) {
  Sample out(n, model.dim());
  fill_rows(model, out, 0, n, rng);
  return out;
}

Sample sample_model(const CopulaModel& model, Eigen::Index n, Rng& rng) {
  return std::visit([&](const auto& m) { return sample_model(m, n, rng); }, model);
}

Sample sample_model(const CopulaModel& model, Eigen::Index n, std::uint64_t seed,
                    std::size_t workers) {
  if (workers == 0) workers = 1;
  Sample out(n, model_dim(model));
  auto work = [&](std::size_t w) {
    const RowRange rows = worker_rows(static_cast<std::size_t>(n), workers, w);
    Rng rng = make_substream(seed, w);
    std::visit(
        [&](const auto& m) {
          fill_rows(m, out, static_cast<Eigen::Index>(rows.begin),
                    static_cast<Eigen::Index>(rows.end), rng);
        },
        model);
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

Matrix spearman_law(const SphereModel& model) { return model.a() * model.a().transpose(); }

Matrix spearman_law(const MixtureModel& model) {
  Matrix out = Matrix::Zero(model.dim(), model.dim());
  for (std::size_t i = 0; i < model.weights().size(); ++i) {
    out += model.weights()[i] * spearman_law(model.components()[i]);
  }
  return out;
}

Matrix spearman_law(const CopulaModel& model) {
  return std::visit([](const auto& m) { return spearman_law(m); }, model);
}

Eigen::Index model_dim(const CopulaModel& model) {
  return std::visit([](const auto& m) { return m.dim(); }, model);
}

}  // namespace rankcorr
