#include "rankcorr/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rankcorr/decomposer.hpp"
#include "rankcorr/gaussian_approx.hpp"
#include "rankcorr/infeasibility.hpp"
#include "rankcorr/io.hpp"
#include "rankcorr/spearman_stats.hpp"

namespace rankcorr::cli {

namespace {

using io::json;

struct RunConfig {
  std::string input;
  std::string output;
  std::string format = "json";
  std::uint64_t seed = kDefaultSeed;
  long long samples = 100000;
  double tol = -1.0;  // < 0: command default
  std::size_t workers = 1;
  bool m12 = false;
  int dim = 12;
  bool normalize = false;
  bool rescale = false;
  bool naive = false;
  int trials = kDefaultFrameTrials;
  double rank_tol = kDefaultRankTol;
  int max_iters = 500;
  int restarts = 10;
  int max_atoms = 0;
  std::string model_output;
};

class Emitter {
 public:
  Emitter(const RunConfig& config, std::ostream& out) : config_(config), out_(out) {}

  void text(const std::string& contents) const {
    if (config_.output.empty()) {
      out_ << contents;
    } else {
      io::write_file(config_.output, contents);
    }
  }
  void document(const json& j) const { text(j.dump(2) + "\n"); }
  void matrix(const Matrix& m) const {
    if (config_.format == "csv") {
      text(io::to_csv(m));
    } else {
      document(io::matrix_to_json(m));
    }
  }

 private:
  const RunConfig& config_;
  std::ostream& out_;
};

Matrix read_matrix(const std::string& path) { return io::parse_matrix_csv(io::read_file(path)); }

DecomposeOptions decompose_options(const RunConfig& c) {
  DecomposeOptions o;
  o.max_iters = c.max_iters;
  o.restarts = c.restarts;
  o.max_atoms = c.max_atoms;
  o.workers = c.workers;
  if (c.tol > 0.0) o.tol = c.tol;
  return o;
}

int cmd_validate(const RunConfig& c, const Emitter& emit) {
  const ValidationReport report = check(read_matrix(c.input), c.tol, c.rank_tol);
  emit.document(io::to_json(report));
  return report.valid ? kExitOk : kExitInvalid;
}

int cmd_certify(const RunConfig& c, const Emitter& emit) {
  if (!c.m12 && c.input.empty()) throw Error(ErrorCode::ParseError, "certify needs a vectors file or --m12");
  const Matrix vectors = c.m12 ? builtin_vectors_12().vectors()
                               : io::parse_csv(io::read_file(c.input), false).values;
  const VectorFamily family = c.normalize ? VectorFamily::normalized(vectors) : VectorFamily(vectors);
  const double tol = c.tol > 0.0 ? c.tol : kDefaultFrameTol;
  Rng rng = make_substream(c.seed, 0);
  json report{{"seed", c.seed}, {"trials", c.trials}, {"tol", tol}};
  try {
    const MomentCertificate cert = moment_certificate(family, c.trials, tol, rng);
    report.update(io::to_json(cert));
    report["verdict"] = cert.violated ? "violated" : "inconclusive";
    emit.document(report);
    return cert.violated ? kExitOk : kExitInconclusive;
  } catch (const NotAFrameError& e) {
    report["m"] = family.size();
    report["k"] = family.ambient_dim();
    report["verdict"] = "inconclusive";
    report["error"] = std::string(to_string(e.code()));
    report["message"] = e.what();
    report["point"] = std::vector<double>(e.point().data(), e.point().data() + e.point().size());
    emit.document(report);
    return kExitInconclusive;
  }
}

int cmd_m12(const RunConfig& c, const Emitter& emit) {
  emit.matrix(embed_high_dim(c.dim).entries());
  return kExitOk;
}

int cmd_decompose(const RunConfig& c, const Emitter& emit) {
  const CorrelationMatrix target = validate(read_matrix(c.input), -1.0, c.rank_tol);
  Rng rng = make_substream(c.seed, 0);
  const DecompositionResult result = decompose(target, decompose_options(c), rng);
  json report = io::to_json(result);
  report["seed"] = c.seed;
  emit.document(report);
  if (!c.model_output.empty() && result.converged) {
    io::write_file(c.model_output, io::to_json(CopulaModel{copula_from_decomposition(result)}).dump(2) + "\n");
  }
  return result.converged ? kExitOk : kExitInconclusive;
}

int cmd_gaussian(const RunConfig& c, const Emitter& emit) {
  const CorrelationMatrix target = validate(read_matrix(c.input), -1.0, c.rank_tol);
  const GaussianModel model = build_gaussian_model(
      target, c.naive ? GaussianCalibration::Naive : GaussianCalibration::Calibrated);
  json report = io::to_json(model);
  report["calibration"] = c.naive ? "naive" : "calibrated";
  report["max_relative_error"] = max_relative_error(target.entries(), implied_spearman(model));
  report["worst_case_error"] = worst_case_error();
  emit.document(report);
  return kExitOk;
}

int cmd_sample(const RunConfig& c, const Emitter& emit, std::ostream& err) {
  const io::AnyModel model = io::model_from_json(json::parse(io::read_file(c.input)));
  const auto n = static_cast<Eigen::Index>(c.samples);
  Sample sample;
  double center = 0.0;
  double spread = 1.0;
  if (const auto* g = std::get_if<GaussianModel>(&model)) {
    sample = sample_gaussian(*g, n, c.seed, c.workers);
    center = 0.5;
    spread = std::sqrt(12.0);  // U[0,1] -> unit variance
  } else if (const auto* s = std::get_if<SphereModel>(&model)) {
    sample = sample_model(CopulaModel{*s}, n, c.seed, c.workers);
    spread = std::numbers::sqrt3;  // U[-1,1] -> U[-sqrt3, sqrt3]
  } else {
    sample = sample_model(CopulaModel{std::get<MixtureModel>(model)}, n, c.seed, c.workers);
    spread = std::numbers::sqrt3;
  }
  if (c.rescale) sample = ((sample.array() - center) * spread).matrix();
  err << "# seed=" << c.seed << " samples=" << n << " workers=" << c.workers << "\n";
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < sample.cols(); ++j) header.push_back("x" + std::to_string(j + 1));
  emit.text(io::to_csv(sample, header));
  return kExitOk;
}

int cmd_estimate(const RunConfig& c, const Emitter& emit) {
  const io::Table table = io::parse_csv(io::read_file(c.input), true);
  emit.matrix(spearman_matrix(table.values));
  return kExitOk;
}

int cmd_roundtrip(const RunConfig& c, const Emitter& emit) {
  const CorrelationMatrix target = validate(read_matrix(c.input), -1.0, c.rank_tol);
  Rng rng = make_substream(c.seed, 0);
  const DecompositionResult result = decompose(target, decompose_options(c), rng);
  json report{{"seed", c.seed},
              {"samples", c.samples},
              {"workers", c.workers},
              {"converged", result.converged},
              {"residual", result.residual},
              {"iterations", result.iterations},
              {"atoms", result.atoms.size()}};
  if (!result.converged) {
    report["max_deviation"] = nullptr;
    emit.document(report);
    return kExitInconclusive;
  }
  const CopulaModel model{copula_from_decomposition(result)};
  const Sample sample = sample_model(model, static_cast<Eigen::Index>(c.samples),
                                     substream_seed(c.seed, 1), c.workers);
  const Matrix estimate = spearman_matrix(sample);
  report["max_deviation"] = (estimate - target.entries()).cwiseAbs().maxCoeff();
  emit.document(report);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spearman rank-correlation matrices: validate, construct, refute"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--output,-o", c.output, "Write the result here instead of stdout");
    sub->add_option("--format", c.format, "Matrix output format")
        ->check(CLI::IsMember({"csv", "json"}));
  };
  auto add_random = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "Master seed (default 0)");
    sub->add_option("--workers", c.workers, "Worker threads; output depends on (seed, workers)")
        ->check(CLI::PositiveNumber);
  };
  auto add_decompose = [&](CLI::App* sub) {
    sub->add_option("--tol", c.tol, "Residual tolerance (default 1e-6)");
    sub->add_option("--max-iters", c.max_iters, "Conditional-gradient rounds");
    sub->add_option("--restarts", c.restarts, "Random starts per atom search");
    sub->add_option("--max-atoms", c.max_atoms, "Atom cap (default d(d+1)/2+1)");
    sub->add_option("--rank-tol", c.rank_tol, "Relative eigenvalue threshold for rank");
  };

  auto* validate_cmd = app.add_subcommand("validate", "Check a matrix CSV for membership in P_d");
  validate_cmd->add_option("matrix", c.input, "Matrix CSV")->required();
  validate_cmd->add_option("--tol", c.tol, "PSD tolerance (default 1e-8*d)");
  validate_cmd->add_option("--rank-tol", c.rank_tol, "Relative eigenvalue threshold for rank");
  add_common(validate_cmd);

  auto* certify_cmd = app.add_subcommand("certify", "Moment certificate for a unit-vector family");
  certify_cmd->add_option("vectors", c.input, "Vector family CSV (m rows x k columns)");
  certify_cmd->add_flag("--m12", c.m12, "Use the built-in 12 vectors in R^4");
  certify_cmd->add_flag("--normalize", c.normalize, "Scale input rows to unit length");
  certify_cmd->add_option("--trials", c.trials, "Random identity checks");
  certify_cmd->add_option("--tol", c.tol, "Relative tolerance of the identity checks (default 1e-9)");
  add_random(certify_cmd);
  add_common(certify_cmd);

  auto* m12_cmd = app.add_subcommand("m12", "Write M, or blockdiag(M, I) with --dim");
  m12_cmd->add_option("--dim", c.dim, "Dimension d >= 12");
  add_common(m12_cmd);

  auto* decompose_cmd = app.add_subcommand("decompose", "Convex decomposition into rank-3 atoms");
  decompose_cmd->add_option("matrix", c.input, "Matrix CSV")->required();
  decompose_cmd->add_option("--model-output", c.model_output, "Also write the mixture model JSON");
  add_decompose(decompose_cmd);
  add_random(decompose_cmd);
  add_common(decompose_cmd);

  auto* gaussian_cmd = app.add_subcommand("gaussian", "Gaussian copula approximation of a target");
  gaussian_cmd->add_option("matrix", c.input, "Matrix CSV")->required();
  gaussian_cmd->add_flag("--naive", c.naive, "Use the target itself as the Gaussian parameter");
  gaussian_cmd->add_option("--rank-tol", c.rank_tol, "Relative eigenvalue threshold for rank");
  add_common(gaussian_cmd);

  auto* sample_cmd = app.add_subcommand("sample", "Draw from a sphere, mixture or gaussian model");
  sample_cmd->add_option("model", c.input, "Model JSON")->required();
  sample_cmd->add_option("--samples,-n", c.samples, "Number of rows")->check(CLI::PositiveNumber);
  sample_cmd->add_flag("--rescale", c.rescale, "Affinely rescale margins to unit variance");
  add_random(sample_cmd);
  add_common(sample_cmd);

  auto* estimate_cmd = app.add_subcommand("estimate", "Sample Spearman matrix of a sample CSV");
  estimate_cmd->add_option("sample", c.input, "Sample CSV (optional header row)")->required();
  add_common(estimate_cmd);

  auto* roundtrip_cmd = app.add_subcommand("roundtrip", "decompose -> mixture -> sample -> estimate");
  roundtrip_cmd->add_option("matrix", c.input, "Matrix CSV")->required();
  roundtrip_cmd->add_option("--samples,-n", c.samples, "Number of rows")->check(CLI::PositiveNumber);
  add_decompose(roundtrip_cmd);
  add_random(roundtrip_cmd);
  add_common(roundtrip_cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const Emitter emit(c, out);
  try {
    if (*validate_cmd) return cmd_validate(c, emit);
    if (*certify_cmd) return cmd_certify(c, emit);
    if (*m12_cmd) return cmd_m12(c, emit);
    if (*decompose_cmd) return cmd_decompose(c, emit);
    if (*gaussian_cmd) return cmd_gaussian(c, emit);
    if (*sample_cmd) return cmd_sample(c, emit, err);
    if (*estimate_cmd) return cmd_estimate(c, emit);
    if (*roundtrip_cmd) return cmd_roundtrip(c, emit);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::NotSquare:
      case ErrorCode::NotSymmetric:
      case ErrorCode::NotStandardized:
      case ErrorCode::NotPSD:
      case ErrorCode::EntryOutOfRange:
        return kExitInvalid;
      default:
        return kExitUsage;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace rankcorr::cli
