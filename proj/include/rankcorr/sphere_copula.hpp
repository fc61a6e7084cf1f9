#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "rankcorr/matrix_core.hpp"
#include "rankcorr/random.hpp"
#include "rankcorr/spearman_stats.hpp"

namespace rankcorr {

inline constexpr double kUnitRowTol = 1e-10;
inline constexpr double kWeightSumTol = 1e-12;

/// Uniform point on the unit sphere in R^3: three standard normals, normalized.
Eigen::Vector3d sample_sphere_point(Rng& rng);

/// Copula model X = A V with V uniform on the unit sphere of R^3 and A a d x 3
/// matrix with unit rows. Every margin of X is U[-1, 1] and the Spearman matrix
/// of X is A A^T.
class SphereModel {
 public:
  /// Throws InvalidModel unless `a` has 3 columns and unit rows (within 1e-10).
  explicit SphereModel(Matrix a);

  const Matrix& a() const { return a_; }
  Eigen::Index dim() const { return a_.rows(); }

 private:
  Matrix a_;
};

/// Convex combination of sphere models sharing a dimension. Each observation
/// picks one component with probability equal to its weight.
class MixtureModel {
 public:
  /// Throws InvalidModel on negative weights, weights not summing to one
  /// (within 1e-12), size mismatch or components of different dimension.
  MixtureModel(std::vector<double> weights, std::vector<SphereModel> components);

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<SphereModel>& components() const { return components_; }
  Eigen::Index dim() const { return components_.front().dim(); }

 private:
  std::vector<double> weights_;
  std::vector<SphereModel> components_;
};

using CopulaModel = std::variant<SphereModel, MixtureModel>;

/// Sphere model from a correlation matrix of rank <= 3. The rank
/// decomposition is zero-padded to three columns.
SphereModel build_from_rank3(const CorrelationMatrix& r);

/// Draws n observations sequentially from `rng`.
///
/// Random numbers are consumed row by row. For a mixture each row first takes
/// one U[0,1) draw to select the component, then the three normals of the
/// sphere point.
Sample sample_model(const SphereModel& model, Eigen::Index n, Rng& rng);
Sample sample_model(const MixtureModel& model, Eigen::Index n, Rng& rng);
Sample sample_model(const CopulaModel& model, Eigen::Index n, Rng& rng);

/// Parallel sampling. Rows are split into `workers` contiguous chunks and chunk
/// w is filled sequentially from `make_substream(seed, w)`. The output depends
/// only on (seed, workers).
Sample sample_model(const CopulaModel& model, Eigen::Index n, std::uint64_t seed,
                    std::size_t workers);

/// Exact Spearman matrix of the model law: A A^T, or sum_i w_i A_i A_i^T.
Matrix spearman_law(const SphereModel& model);
Matrix spearman_law(const MixtureModel& model);
Matrix spearman_law(const CopulaModel& model);

Eigen::Index model_dim(const CopulaModel& model);

}  // namespace rankcorr
