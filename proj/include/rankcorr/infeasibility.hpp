#pragma once

#include <optional>

#include "rankcorr/matrix_core.hpp"
#include "rankcorr/random.hpp"

namespace rankcorr {

inline constexpr double kFamilyUnitTol = 1e-12;
inline constexpr int kDefaultFrameTrials = 200;
inline constexpr double kDefaultFrameTol = 1e-9;
inline constexpr double kDefaultCertificateTol = 1e-9;

/// m unit vectors in R^k, stored as the rows of an m x k matrix.
class VectorFamily {
 public:
  /// Throws NotUnitNorm if a row is not a unit vector within 1e-12.
  explicit VectorFamily(Matrix vectors);

  /// Scales every row to unit length. Throws NotUnitNorm on a zero row.
  static VectorFamily normalized(Matrix vectors);

  const Matrix& vectors() const { return vectors_; }
  Eigen::Index size() const { return vectors_.rows(); }
  Eigen::Index ambient_dim() const { return vectors_.cols(); }

 private:
  Matrix vectors_;
};

/// Second and fourth moments of the margin law every a_i^T V must follow.
struct MarginMoments {
  double m2;
  double m4;
};

/// Moments of U[-sqrt(3), sqrt(3)] (zero mean, unit variance): exactly 1 and 9/5.
inline constexpr MarginMoments kStandardUniformMoments{1.0, 9.0 / 5.0};

/// Moments of U[-a, a]: a^2/3 and a^4/5.
MarginMoments uniform_moments(double half_width);

struct FrameConstants {
  double c2;  // sum_i (a_i.v)^2 = c2 |v|^2
  double c4;  // sum_i (a_i.v)^4 = c4 |v|^4
};

/// Moment certificate for "no random V has a_i^T V ~ U for all i".
///
/// With the frame identities, E|V|^2 and E|V|^4 are pinned by the margin
/// moments alone. `violated` means (E|V|^2)^2 > E|V|^4, which no random vector
/// satisfies, so the Gram matrix of the family is not a Spearman's rho matrix.
/// A non-violated certificate is inconclusive.
struct MomentCertificate {
  Eigen::Index m = 0;
  Eigen::Index k = 0;
  double c2 = 0.0;
  double c4 = 0.0;
  double implied_m2 = 0.0;
  double implied_m4 = 0.0;
  double margin = 0.0;  // implied_m2^2 - implied_m4
  bool violated = false;
};

/// The twelve vectors in R^4: e_1..e_4 and the eight (1/2)(1, +-1, +-1, +-1).
VectorFamily builtin_vectors_12();

/// Gram matrix (a_i^T a_j).
Matrix gram_matrix(const VectorFamily& family);

/// sum_i (a_i.v)^2 / |v|^2 and sum_i (a_i.v)^4 / |v|^4 at a single point.
double quadratic_ratio(const VectorFamily& family, const Vector& v);
double quartic_ratio(const VectorFamily& family, const Vector& v);

/// Thrown by check_frame_identities; carries the first point where a ratio
/// departed from the fitted constant.
class NotAFrameError : public Error {
 public:
  NotAFrameError(const std::string& what, Vector point)
      : Error(ErrorCode::NotAFrame, what), point_(std::move(point)) {}
  const Vector& point() const { return point_; }

 private:
  Vector point_;
};

/// Randomized identity test: fits c2 and c4 at one random point, then checks
/// both ratios stay within tol (relative to max(1, |c|)) at `trials` more
/// random nonzero points. Throws NotAFrameError on the first violation.
FrameConstants check_frame_identities(const VectorFamily& family, int trials, double tol, Rng& rng);

/// Runs check_frame_identities and turns the constants into implied moments
/// of |V|. NotAFrameError propagates (the certificate does not apply).
MomentCertificate moment_certificate(const VectorFamily& family, int trials, double tol, Rng& rng,
                                     MarginMoments margins = kStandardUniformMoments,
                                     double certificate_tol = kDefaultCertificateTol);

/// Certificate from already verified frame constants.
MomentCertificate certificate_from_constants(Eigen::Index m, Eigen::Index k,
                                             FrameConstants constants,
                                             MarginMoments margins = kStandardUniformMoments,
                                             double certificate_tol = kDefaultCertificateTol);

/// The 12 x 12 Gram matrix of builtin_vectors_12 (rank 4).
CorrelationMatrix m12();

/// blockdiag(M, I_{d-12}); its leading 12 x 12 block keeps M incompatible.
/// Throws DimensionTooSmall for d < 12.
CorrelationMatrix embed_high_dim(int d);

}  // namespace rankcorr
