#include "rankcorr/decomposer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace rankcorr {

namespace {

double inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

double atom_value(const Matrix& g, const Matrix& b) { return inner(b, g * b); }

void normalize_rows(Matrix& b, const Matrix& fallback) {
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    const double norm = b.row(i).norm();
    if (norm > 0.0 && std::isfinite(norm)) {
      b.row(i) /= norm;
    } else {
      b.row(i) = fallback.row(i);
    }
  }
}

Matrix random_start(Eigen::Index d, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix b(d, kAtomRank);
  for (Eigen::Index i = 0; i < d; ++i) {
    do {
      for (Eigen::Index j = 0; j < kAtomRank; ++j) b(i, j) = normal(rng);
    } while (b.row(i).squaredNorm() == 0.0);
  }
  return b;
}

// Top eigenvectors of G scaled by the positive part of their eigenvalues; rows
// that vanish are replaced by e_1.
Matrix spectral_start(const Matrix& g) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(g);
  const Eigen::Index d = g.rows();
  const Eigen::Index k = std::min<Eigen::Index>(kAtomRank, d);
  Matrix b = Matrix::Zero(d, kAtomRank);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double lambda = std::max(0.0, solver.eigenvalues()(d - 1 - j));
    b.col(j) = solver.eigenvectors().col(d - 1 - j) * std::sqrt(lambda);
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (b.row(i).norm() < 1e-12) {
      b.row(i).setZero();
      b(i, 0) = 1.0;
    }
  }
  return b;
}

struct Candidate {
  Matrix atom;
  double value;
};

Candidate best_atom(const Matrix& g, int restarts, std::uint64_t round_seed, std::size_t workers) {
  const int starts = restarts + 1;
  std::vector<Candidate> found(static_cast<std::size_t>(starts));
  auto run = [&](int s) {
    Matrix start;
    if (s == 0) {
      start = spectral_start(g);
    } else {
      Rng rng = make_substream(round_seed, static_cast<std::uint64_t>(s));
      start = random_start(g.rows(), rng);
    }
    Matrix atom = ascend_atom(g, std::move(start));
    const double value = atom_value(g, atom);
    found[static_cast<std::size_t>(s)] = {std::move(atom), value};
  };
  if (workers <= 1) {
    for (int s = 0; s < starts; ++s) run(s);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int s = static_cast<int>(w); s < starts; s += static_cast<int>(workers)) run(s);
      });
    }
  }
  std::size_t best = 0;
  for (std::size_t s = 1; s < found.size(); ++s) {
    if (found[s].value > found[best].value) best = s;
  }
  return std::move(found[best]);
}

// Projected gradient with step 1/L on 0.5 w^T H w - b^T w over the simplex;
// monotone from the warm start.
Vector optimize_weights(const Matrix& h, const Vector& b, Vector w) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  const double lipschitz = std::max(solver.eigenvalues().maxCoeff(), 1e-12);
  for (int it = 0; it < 20000; ++it) {
    Vector next = project_simplex(w - (h * w - b) / lipschitz);
    const double change = (next - w).lpNorm<Eigen::Infinity>();
    w = std::move(next);
    if (change < 1e-16) break;
  }
  return w;
}

Matrix padded(const Matrix& a) {
  Matrix out = Matrix::Zero(a.rows(), kAtomRank);
  out.leftCols(std::min<Eigen::Index>(a.cols(), kAtomRank)) =
      a.leftCols(std::min<Eigen::Index>(a.cols(), kAtomRank));
  return out;
}

struct Combination {
  std::vector<Matrix> atoms;
  std::vector<Matrix> grams;
  Vector weights;
};

Matrix combine(const Combination& c, Eigen::Index d) {
  Matrix s = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < c.grams.size(); ++i) s += c.weights(static_cast<Eigen::Index>(i)) * c.grams[i];
  return s;
}

// Re-optimizes all weights, then drops atoms below kWeightDropTol.
void refit(Combination& c, const Matrix& target) {
  const auto m = static_cast<Eigen::Index>(c.grams.size());
  Matrix h(m, m);
  Vector b(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    b(i) = inner(target, c.grams[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j <= i; ++j) {
      h(i, j) = h(j, i) = inner(c.grams[static_cast<std::size_t>(i)], c.grams[static_cast<std::size_t>(j)]);
    }
  }
  c.weights = optimize_weights(h, b, c.weights);

  Combination kept;
  std::vector<double> w;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (c.weights(i) >= kWeightDropTol) {
      kept.atoms.push_back(std::move(c.atoms[static_cast<std::size_t>(i)]));
      kept.grams.push_back(std::move(c.grams[static_cast<std::size_t>(i)]));
      w.push_back(c.weights(i));
    }
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  kept.weights = Eigen::Map<Vector>(w.data(), static_cast<Eigen::Index>(w.size())) / total;
  c = std::move(kept);
}

// Off-diagonal upper-triangle entries of R - S, the only free residuals
// (diagonals match exactly because every atom has unit rows).
Vector off_diagonal(const Matrix& m) {
  const Eigen::Index d = m.rows();
  Vector out(d * (d - 1) / 2);
  Eigen::Index t = 0;
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index s = r + 1; s < d; ++s) out(t++) = m(r, s);
  }
  return out;
}

// Levenberg-Marquardt on the atom rows with the weights held fixed. Each row
// moves in its tangent plane and is renormalized; the minimum-norm step is
// taken because there are far more row coordinates than residuals. Only
// improving steps are accepted, then the weights are refit.
void polish(Combination& c, const Matrix& target, int max_steps) {
  const Eigen::Index d = target.rows();
  const auto m = c.atoms.size();
  if (d < 2 || m == 0) return;
  const Eigen::Index residuals = d * (d - 1) / 2;
  const Eigen::Index params = static_cast<Eigen::Index>(m) * d * kAtomRank;

  Vector error = off_diagonal(target - combine(c, d));
  double objective = error.squaredNorm();
  double damping = 1e-3;
  for (int it = 0; it < max_steps && objective > 1e-30; ++it) {
    // d(R - S)_{rs} / d b^i_r = -w_i P_r b^i_s, with P_r the tangent projector at b^i_r.
    Matrix jac = Matrix::Zero(residuals, params);
    for (std::size_t i = 0; i < m; ++i) {
      const Matrix& b = c.atoms[i];
      const double w = c.weights(static_cast<Eigen::Index>(i));
      const Eigen::Index base = static_cast<Eigen::Index>(i) * d * kAtomRank;
      Eigen::Index t = 0;
      for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index s = r + 1; s < d; ++s, ++t) {
          const Eigen::RowVector3d br = b.row(r);
          const Eigen::RowVector3d bs = b.row(s);
          jac.block<1, 3>(t, base + r * kAtomRank) = -w * (bs - bs.dot(br) * br);
          jac.block<1, 3>(t, base + s * kAtomRank) = -w * (br - br.dot(bs) * bs);
        }
      }
    }
    const Matrix jjt = jac * jac.transpose();
    const double scale = std::max(jjt.diagonal().maxCoeff(), 1e-300);
    bool improved = false;
    while (damping < 1e12) {
      Matrix system = jjt;
      system.diagonal().array() += damping * scale;
      const Vector delta = -jac.transpose() * system.ldlt().solve(error);
      Combination trial = c;
      for (std::size_t i = 0; i < m; ++i) {
        const Eigen::Index base = static_cast<Eigen::Index>(i) * d * kAtomRank;
        Matrix moved = c.atoms[i];
        for (Eigen::Index r = 0; r < d; ++r) {
          moved.row(r) += delta.segment<3>(base + r * kAtomRank).transpose();
        }
        normalize_rows(moved, c.atoms[i]);
        trial.grams[i] = moved * moved.transpose();
        trial.atoms[i] = std::move(moved);
      }
      Vector trial_error = off_diagonal(target - combine(trial, d));
      const double trial_objective = trial_error.squaredNorm();
      if (trial_objective < objective) {
        improved = objective - trial_objective > 1e-12 * objective;
        c = std::move(trial);
        error = std::move(trial_error);
        objective = trial_objective;
        damping = std::max(damping * 0.1, 1e-12);
        break;
      }
      damping *= 10.0;
    }
    if (!improved) break;
  }
  refit(c, target);
}

}  // namespace

Vector project_simplex(const Vector& v) {
  const Eigen::Index n = v.size();
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumulative += sorted[static_cast<std::size_t>(i)];
    const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (sorted[static_cast<std::size_t>(i)] - t > 0.0) theta = t;
  }
  return (v.array() - theta).cwiseMax(0.0);
}

Matrix ascend_atom(const Matrix& g, Matrix start, int max_steps) {
  Matrix b = std::move(start);
  normalize_rows(b, Matrix::Identity(b.rows(), b.cols()));
  double value = atom_value(g, b);
  double step = 1.0 / std::max(g.norm(), 1e-12);
  for (int it = 0; it < max_steps; ++it) {
    const Matrix grad = 2.0 * g * b;
    bool moved = false;
    while (step > 1e-14) {
      Matrix candidate = b + step * grad;
      normalize_rows(candidate, b);
      const double candidate_value = atom_value(g, candidate);
      if (candidate_value > value) {
        const double gain = candidate_value - value;
        b = std::move(candidate);
        value = candidate_value;
        step *= 2.0;
        moved = gain > 1e-15 * std::max(1.0, std::abs(value));
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return b;
}

Matrix DecompositionResult::combination() const {
  const Eigen::Index d = target.rows();
  Matrix s = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < atoms.size(); ++i) s += weights[i] * atoms[i].gram();
  return s;
}

DecompositionResult decompose(const CorrelationMatrix& r, const DecomposeOptions& options, Rng& rng) {
  const Eigen::Index d = r.dim();
  const Matrix& target = r.entries();
  DecompositionResult result;
  result.target = target;

  if (r.rank() <= kAtomRank) {
    result.atoms.push_back({padded(rank_decompose(r).a)});
    result.weights = {1.0};
    result.residual = result.recompute_residual();
    result.residual_trace = {result.residual};
    result.converged = result.residual < options.tol;
    return result;
  }

  const std::size_t max_atoms = options.max_atoms > 0
                                    ? static_cast<std::size_t>(options.max_atoms)
                                    : static_cast<std::size_t>(d * (d + 1) / 2 + 1);
  Combination current;
  double residual = target.norm();

  for (int round = 1; round <= options.max_iters; ++round) {
    const Matrix s = combine(current, d);
    const Matrix g = target - s;
    const std::uint64_t round_seed = rng();
    Candidate atom = best_atom(g, options.restarts, round_seed, options.workers);
    Matrix gram = atom.atom * atom.atom.transpose();
    const double gap = inner(g, gram - s);
    result.iterations = round;
    if (gap <= 1e-15 * std::max(1.0, target.squaredNorm())) break;

    Combination next = current;
    next.atoms.push_back(std::move(atom.atom));
    next.grams.push_back(std::move(gram));
    next.weights.conservativeResize(static_cast<Eigen::Index>(next.atoms.size()));
    next.weights(next.weights.size() - 1) = current.atoms.empty() ? 1.0 : 0.0;
    refit(next, target);
    if (options.polish_steps > 0) polish(next, target, options.polish_steps);

    if (next.atoms.size() > max_atoms) {
      Eigen::Index smallest = 0;
      next.weights.minCoeff(&smallest);
      next.atoms.erase(next.atoms.begin() + smallest);
      next.grams.erase(next.grams.begin() + smallest);
      Vector w(next.weights.size() - 1);
      for (Eigen::Index i = 0, j = 0; i < next.weights.size(); ++i) {
        if (i != smallest) w(j++) = next.weights(i);
      }
      next.weights = w / w.sum();
      refit(next, target);
    }

    const double next_residual = frobenius_distance(target, combine(next, d));
    if (next_residual > residual && !current.atoms.empty()) break;
    current = std::move(next);
    residual = next_residual;
    result.residual_trace.push_back(residual);
    if (residual < options.tol) break;
    const auto& trace = result.residual_trace;
    if (options.stall_rounds > 0 && trace.size() > static_cast<std::size_t>(options.stall_rounds)) {
      const double before = trace[trace.size() - 1 - static_cast<std::size_t>(options.stall_rounds)];
      if (before - residual <= 1e-6 * before) break;
    }
  }

  for (std::size_t i = 0; i < current.atoms.size(); ++i) {
    result.atoms.push_back({std::move(current.atoms[i])});
    result.weights.push_back(current.weights(static_cast<Eigen::Index>(i)));
  }
  result.residual = result.recompute_residual();
  result.converged = result.residual < options.tol;
  return result;
}

MixtureModel copula_from_decomposition(const DecompositionResult& result) {
  if (!result.converged) {
    throw Error(ErrorCode::NotConverged, "decomposition did not reach its tolerance");
  }
  std::vector<SphereModel> components;
  components.reserve(result.atoms.size());
  for (const auto& atom : result.atoms) components.emplace_back(padded(atom.a));
  return MixtureModel(result.weights, std::move(components));
}

}  // namespace rankcorr
