#include "rankcorr/infeasibility.hpp"

#include <cmath>
#include <sstream>

namespace rankcorr {

namespace {

Vector random_nonzero_point(Eigen::Index k, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(k);
  do {
    for (Eigen::Index i = 0; i < k; ++i) v(i) = normal(rng);
  } while (v.squaredNorm() == 0.0);
  return v;
}

bool within(double value, double constant, double tol) {
  return std::abs(value - constant) <= tol * std::max(1.0, std::abs(constant));
}

}  // namespace

VectorFamily::VectorFamily(Matrix vectors) : vectors_(std::move(vectors)) {
  if (vectors_.rows() < 1 || vectors_.cols() < 1) {
    throw Error(ErrorCode::NotUnitNorm, "empty vector family");
  }
  for (Eigen::Index i = 0; i < vectors_.rows(); ++i) {
    if (std::abs(vectors_.row(i).norm() - 1.0) > kFamilyUnitTol) {
      throw Error(ErrorCode::NotUnitNorm, "vector " + std::to_string(i) + " is not unit length");
    }
  }
}

VectorFamily VectorFamily::normalized(Matrix vectors) {
  for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
    const double norm = vectors.row(i).norm();
    if (!(norm > 0.0)) {
      throw Error(ErrorCode::NotUnitNorm, "vector " + std::to_string(i) + " is zero");
    }
    vectors.row(i) /= norm;
  }
  return VectorFamily(std::move(vectors));
}

MarginMoments uniform_moments(double half_width) {
  const double a2 = half_width * half_width;
  return {a2 / 3.0, a2 * a2 / 5.0};
}

VectorFamily builtin_vectors_12() {
  Matrix v = Matrix::Zero(12, 4);
  v.topRows(4).setIdentity();
  // Remaining eight: first coordinate +1/2, the other three run through all
  // sign patterns in the order (+++), (++-), (+-+), (+--), (-++), ...
  for (int s = 0; s < 8; ++s) {
    v(4 + s, 0) = 0.5;
    v(4 + s, 1) = (s & 4) ? -0.5 : 0.5;
    v(4 + s, 2) = (s & 2) ? -0.5 : 0.5;
    v(4 + s, 3) = (s & 1) ? -0.5 : 0.5;
  }
  return VectorFamily(std::move(v));
}

Matrix gram_matrix(const VectorFamily& family) {
  return family.vectors() * family.vectors().transpose();
}

double quadratic_ratio(const VectorFamily& family, const Vector& v) {
  const Vector proj = family.vectors() * v;
  return proj.squaredNorm() / v.squaredNorm();
}

double quartic_ratio(const VectorFamily& family, const Vector& v) {
  const Vector proj = family.vectors() * v;
  const double n2 = v.squaredNorm();
  return proj.array().square().square().sum() / (n2 * n2);
}

FrameConstants check_frame_identities(const VectorFamily& family, int trials, double tol,
                                      Rng& rng) {
  const Eigen::Index k = family.ambient_dim();
  const Vector first = random_nonzero_point(k, rng);
  FrameConstants c{quadratic_ratio(family, first), quartic_ratio(family, first)};
  for (int t = 0; t < trials; ++t) {
    const Vector v = random_nonzero_point(k, rng);
    const double q2 = quadratic_ratio(family, v);
    const double q4 = quartic_ratio(family, v);
    if (!within(q2, c.c2, tol) || !within(q4, c.c4, tol)) {
      std::ostringstream os;
      os.precision(17);
      os << "trial " << t << ": quadratic ratio " << q2 << " (fitted " << c.c2
         << "), quartic ratio " << q4 << " (fitted " << c.c4 << ")";
      throw NotAFrameError(os.str(), v);
    }
  }
  return c;
}

MomentCertificate certificate_from_constants(Eigen::Index m, Eigen::Index k,
                                             FrameConstants constants, MarginMoments margins,
                                             double certificate_tol) {
  MomentCertificate cert;
  cert.m = m;
  cert.k = k;
  cert.c2 = constants.c2;
  cert.c4 = constants.c4;
  const double count = static_cast<double>(m);
  cert.implied_m2 = count * margins.m2 / constants.c2;
  cert.implied_m4 = count * margins.m4 / constants.c4;
  cert.margin = cert.implied_m2 * cert.implied_m2 - cert.implied_m4;
  cert.violated = cert.margin > certificate_tol;
  return cert;
}

MomentCertificate moment_certificate(const VectorFamily& family, int trials, double tol, Rng& rng,
                                     MarginMoments margins, double certificate_tol) {
  const FrameConstants c = check_frame_identities(family, trials, tol, rng);
  return certificate_from_constants(family.size(), family.ambient_dim(), c, margins,
                                    certificate_tol);
}

CorrelationMatrix m12() { return validate(gram_matrix(builtin_vectors_12())); }

CorrelationMatrix embed_high_dim(int d) {
  if (d < 12) {
    throw Error(ErrorCode::DimensionTooSmall, "embedding needs d >= 12, got " + std::to_string(d));
  }
  Matrix out = Matrix::Identity(d, d);
  out.topLeftCorner(12, 12) = gram_matrix(builtin_vectors_12());
  return validate(out);
}

}  // namespace rankcorr
