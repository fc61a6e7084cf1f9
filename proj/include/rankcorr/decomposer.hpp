#pragma once

#include <vector>

#include "rankcorr/matrix_core.hpp"
#include "rankcorr/random.hpp"
#include "rankcorr/sphere_copula.hpp"

namespace rankcorr {

inline constexpr int kAtomRank = 3;
inline constexpr double kWeightDropTol = 1e-12;

struct DecomposeOptions {
  int max_atoms = 0;  // <= 0 means d(d+1)/2 + 1
  int max_iters = 500;
  int restarts = 10;
  double tol = 1e-6;
  int polish_steps = 20;  // Levenberg-Marquardt steps on the atoms after each refit; 0 disables
  int stall_rounds = 50;  // stop once this many rounds gain < 1e-6 relative; 0 disables
  std::size_t workers = 1;  // threads for the atom restarts; results do not depend on it
};

/// Convex combination sum_i w_i A_i A_i^T of rank <= 3 atoms approximating a
/// target. `converged` means residual < tol, in which case the mixture copula
/// built from it has the target as Spearman matrix up to `residual`. A
/// non-converged result says nothing about compatibility.
struct DecompositionResult {
  Matrix target;
  std::vector<double> weights;
  std::vector<RankDecomposition> atoms;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_trace;

  Matrix combination() const;
  double recompute_residual() const { return frobenius_distance(target, combination()); }
};

/// Fully corrective conditional-gradient decomposition.
///
/// Each round takes G = R - S for the current combination S, searches for an
/// atom B (d x 3, unit rows) with large <G, B B^T> by projected gradient ascent
/// with backtracking (rows renormalized after every step, best of `restarts`
/// random starts plus one start from the top eigenvectors of G), then
/// re-optimizes all weights over the simplex. Targets of rank <= 3 are
/// returned as a single exact atom.
DecompositionResult decompose(const CorrelationMatrix& r, const DecomposeOptions& options, Rng& rng);

/// Mixture of sphere models with the decomposition's weights and atoms.
/// Throws NotConverged unless `result.converged`.
MixtureModel copula_from_decomposition(const DecompositionResult& result);

/// Euclidean projection onto the probability simplex.
Vector project_simplex(const Vector& v);

/// Best atom for the linear objective <G, B B^T>, starting from `start`.
/// Exposed for testing; `start` rows must be nonzero.
Matrix ascend_atom(const Matrix& g, Matrix start, int max_steps = 500);

}  // namespace rankcorr
