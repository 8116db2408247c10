#pragma once

#include "spaceform/base.hpp"

#include <random>
#include <vector>

namespace spaceform {

// Orthonormalizes the columns of B with respect to the ambient form via the
// eigendecomposition of the form-Gram matrix.  Keeps combinations whose
// eigenvalue is larger in magnitude than eps; the result satisfies
// <w_i, w_j> = sign(lambda_i) delta_ij.
inline Mat form_orthonormalize(const SpaceForm& M, const Mat& B,
                               double eps = 1e-10) {
  if (B.cols() == 0) return B;
  Mat G(B.cols(), B.cols());
  for (int i = 0; i < B.cols(); ++i)
    for (int j = 0; j < B.cols(); ++j) G(i, j) = M.form(B.col(i), B.col(j));
  Eigen::SelfAdjointEigenSolver<Mat> es(G);
  double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  if (scale == 0.0) return Mat(B.rows(), 0);
  std::vector<int> keep;
  for (int k = 0; k < B.cols(); ++k)
    if (std::abs(es.eigenvalues()[k]) > eps * scale) keep.push_back(k);
  Mat out(B.rows(), static_cast<int>(keep.size()));
  for (int i = 0; i < out.cols(); ++i) {
    int k = keep[i];
    out.col(i) =
        B * es.eigenvectors().col(k) / std::sqrt(std::abs(es.eigenvalues()[k]));
  }
  return out;
}

// Complete totally geodesic W of dimension j.  For c != 0 it is the model
// intersected with a linear subspace L of dimension j+1 (basis form-
// orthonormal, timelike direction present when c < 0); for c = 0 it is the
// affine subspace origin + span(frame).
class TotallyGeodesic {
 public:
  // c != 0: span of the given ambient vectors.
  static TotallyGeodesic spanning(const SpaceForm& M, const Mat& raw) {
    if (!M.curved())
      throw GeometryError("spanning() requires nonzero curvature");
    Mat B = form_orthonormalize(M, raw);
    if (B.cols() != raw.cols())
      throw GeometryError("degenerate spanning set for TotallyGeodesic");
    if (B.cols() < 1 || B.cols() > M.n())
      throw GeometryError("TotallyGeodesic dimension out of range");
    if (M.c() < 0.0) {
      int timelike = 0;
      for (int i = 0; i < B.cols(); ++i)
        if (M.form(B.col(i), B.col(i)) < 0.0) ++timelike;
      if (timelike != 1)
        throw GeometryError("subspace must contain a timelike direction");
    }
    TotallyGeodesic W;
    W.basis_ = std::move(B);
    return W;
  }

  // c = 0: affine subspace through origin with the given directions
  // (j = 0, an empty frame, is a single point).
  static TotallyGeodesic affine(const SpaceForm& M, const Point& origin,
                                const Mat& directions) {
    if (M.curved())
      throw GeometryError("affine() requires curvature zero");
    Mat F = form_orthonormalize(M, directions);
    if (F.cols() != directions.cols())
      throw GeometryError("degenerate direction set for TotallyGeodesic");
    if (F.cols() > M.n() - 1)
      throw GeometryError("TotallyGeodesic dimension out of range");
    TotallyGeodesic W;
    W.origin_ = origin;
    W.frame_ = std::move(F);
    return W;
  }

  // c != 0: single point (j = 0), L = span of the point itself.
  static TotallyGeodesic at_point(const SpaceForm& M, const Point& p) {
    if (!M.curved()) return affine(M, p, Mat(p.x.size(), 0));
    return spanning(M, p.x);
  }

  bool is_linear() const { return basis_.cols() > 0; }
  int j(const SpaceForm& M) const {
    return is_linear() ? static_cast<int>(basis_.cols()) - 1
                       : static_cast<int>(frame_.cols());
  }
  const Mat& basis() const { return basis_; }
  const Point& origin() const { return origin_; }
  const Mat& frame() const { return frame_; }

  // Form-orthogonal projection of ambient coordinates onto L (c != 0)
  // or onto the affine subspace (c = 0).
  Vec linear_projection(const SpaceForm& M, const Vec& q) const {
    if (is_linear()) {
      Vec out = Vec::Zero(q.size());
      for (int i = 0; i < basis_.cols(); ++i) {
        double e = M.form(basis_.col(i), basis_.col(i));
        out += (M.form(q, basis_.col(i)) / e) * basis_.col(i);
      }
      return out;
    }
    return origin_.x + frame_ * (frame_.transpose() * (q - origin_.x));
  }

  bool contains(const SpaceForm& M, const Point& p, double tol = 1e-8) const {
    return (linear_projection(M, p.x) - p.x).norm() <= tol;
  }

 private:
  Mat basis_;     // c != 0
  Point origin_;  // c == 0
  Mat frame_;     // c == 0
};

// ---------------------------------------------------------------------------
// Geodesics

inline Point exp_map(const SpaceForm& M, const Point& p,
                     const TangentVector& v, double t) {
  double speed = M.norm(v.v);
  if (speed * std::abs(t) == 0.0) return p;
  double s = M.sqrt_abs_c();
  if (M.c() > 0.0) {
    double th = s * t * speed;
    return Point{std::cos(th) * p.x + std::sin(th) / (s * speed) * v.v};
  }
  if (M.c() < 0.0) {
    double th = s * t * speed;
    return Point{std::cosh(th) * p.x + std::sinh(th) / (s * speed) * v.v};
  }
  return Point{p.x + t * v.v};
}

// Nearby points go through the chord vector, <q-p, q-p> = (2/c)(1 - c<p,q>),
// which avoids the cancellation of the inner-product formula near d = 0.
// Far-apart hyperboloid points use arccosh directly: there the chord itself
// cancels against the exponentially large coordinates.
inline double dist(const SpaceForm& M, const Point& p, const Point& q,
                   const Tolerances& tol = {}) {
  if (!M.curved()) return (p.x - q.x).norm();
  double s = M.sqrt_abs_c();
  if (M.c() > 0.0) {
    Vec delta = q.x - p.x;
    double h = clamp_to(0.25 * M.c() * M.form(delta, delta), 0.0, 1.0,
                        tol.model, "chord length outside the sphere diameter");
    // h = sin^2(s d / 2)
    return 2.0 * std::atan2(std::sqrt(h), std::sqrt(1.0 - h)) / s;
  }
  double a = clamp_to(M.c() * M.form(p.x, q.x), 1.0,
                      std::numeric_limits<double>::infinity(), tol.model,
                      "arccosh argument out of range");
  if (a > 1.5) return std::acosh(a) / s;
  Vec delta = q.x - p.x;
  double x = clamp_to(-0.5 * M.c() * M.form(delta, delta), 0.0,
                      std::numeric_limits<double>::infinity(), tol.model,
                      "timelike chord between hyperboloid points");
  return std::asinh(std::sqrt(x * (x + 2.0))) / s;  // x = cosh(s d) - 1
}

inline TangentVector log_map(const SpaceForm& M, const Point& p,
                             const Point& q, const Tolerances& tol = {}) {
  double d = dist(M, p, q, tol);
  if (!M.curved()) return TangentVector{p, q.x - p.x};
  if (d < 1e-14) return TangentVector{p, Vec::Zero(p.x.size())};
  if (M.c() > 0.0 && d >= M_PI / std::sqrt(M.c()) - tol.antipode)
    throw AntipodalPoints("log_map at (nearly) antipodal points");
  Vec w = q.x - M.c() * M.form(p.x, q.x) * p.x;
  double nw = M.norm(w);
  if (nw < 1e-300) {
    // for c < 0 this is rounding noise at coincident points; for c > 0 it
    // marks a genuinely antipodal pair
    if (M.c() > 0.0)
      throw AntipodalPoints("log_map direction is degenerate");
    return TangentVector{p, Vec::Zero(p.x.size())};
  }
  return TangentVector{p, (d / nw) * w};
}

// Parallel transport along the minimal geodesic from the base of v to q.
inline TangentVector parallel_transport(const SpaceForm& M,
                                        const TangentVector& v, const Point& q,
                                        const Tolerances& tol = {}) {
  const Point& p = v.base;
  if (!M.curved()) return TangentVector{q, v.v};
  TangentVector u = log_map(M, p, q, tol);
  double d = M.norm(u.v);
  if (d < 1e-14) return TangentVector{q, v.v};
  Vec uh = u.v / d;
  double a = M.form(v.v, uh);
  Vec perp = v.v - a * uh;
  double s = M.sqrt_abs_c();
  Vec gprime;  // unit tangent of the connecting geodesic at q
  if (M.c() > 0.0)
    gprime = -s * std::sin(s * d) * p.x + std::cos(s * d) * uh;
  else
    gprime = s * std::sinh(s * d) * p.x + std::cosh(s * d) * uh;
  return TangentVector{q, perp + a * gprime};
}

struct GeodesicSegment {
  Point start;
  TangentVector direction;  // unit
  double length = 0.0;

  Point at(const SpaceForm& M, double t) const {
    return exp_map(M, start, direction, t);
  }
};

// ---------------------------------------------------------------------------
// Projection onto W and the associated frames

struct Projection {
  Point foot;
  double distance = 0.0;
};

inline Projection project_W(const SpaceForm& M, const Point& q,
                            const TotallyGeodesic& W,
                            const Tolerances& tol = {}) {
  Vec qL = W.linear_projection(M, q.x);
  if (!M.curved()) {
    Point foot{qL};
    return Projection{foot, (q.x - qL).norm()};
  }
  if (M.c() > 0.0) {
    if (qL.norm() < tol.focal)
      throw OnFocalSet("projection undefined on the focal set V_W");
    Point foot = normalize_to_model(M, qL);
    return Projection{foot, dist(M, q, foot, tol)};
  }
  double g = M.c() * M.form(qL, qL);
  if (g <= 0.0)
    throw ModelViolation("projection onto W lost the timelike direction");
  Point foot = normalize_to_model(M, qL);
  return Projection{foot, dist(M, q, foot, tol)};
}

inline std::optional<double> focal_distance(const SpaceForm& M) {
  if (M.c() > 0.0) return M_PI / (2.0 * std::sqrt(M.c()));
  return std::nullopt;
}

namespace detail {

// Form-orthonormal basis of the orthogonal complement of the columns of B
// inside the ambient space (c != 0) or of frame directions in R^n (c = 0).
inline Mat form_complement(const SpaceForm& M, const Mat& B, int expected) {
  int dim = M.ambient_dim();
  Mat cand(dim, dim);
  for (int k = 0; k < dim; ++k) {
    Vec e = Vec::Unit(dim, k);
    for (int i = 0; i < B.cols(); ++i) {
      double eps = M.form(B.col(i), B.col(i));
      e -= (M.form(e, B.col(i)) / eps) * B.col(i);
    }
    cand.col(k) = e;
  }
  Mat C = form_orthonormalize(M, cand, 1e-8);
  if (C.cols() != expected)
    throw GeometryError("complement basis has unexpected dimension");
  return C;
}

}  // namespace detail

// Orthonormal basis of T_p(S_pW): tangent at p in W, orthogonal to T_pW.
// For c != 0 this is the form-complement of L, which is independent of p.
inline Mat s_pw_frame(const SpaceForm& M, const Point& p,
                      const TotallyGeodesic& W) {
  int j = W.j(M);
  if (W.is_linear()) return detail::form_complement(M, W.basis(), M.n() - j);
  Mat F = W.frame();
  Mat C = detail::form_complement(M, F, M.n() - j);
  (void)p;
  return C;
}

// Orthonormal basis of T_pW for p in W.
inline Mat tangent_frame_of_W(const SpaceForm& M, const Point& p,
                              const TotallyGeodesic& W) {
  int j = W.j(M);
  if (!W.is_linear()) return W.frame();
  if (j == 0) return Mat(M.ambient_dim(), 0);
  Mat cand(M.ambient_dim(), W.basis().cols());
  for (int i = 0; i < W.basis().cols(); ++i)
    cand.col(i) = project_to_tangent(M, p, W.basis().col(i));
  Mat T = form_orthonormalize(M, cand, 1e-8);
  if (T.cols() != j)
    throw GeometryError("tangent frame of W has unexpected dimension");
  return T;
}

// ---------------------------------------------------------------------------
// Isometries fixing W pointwise

struct IsometryFixingW {
  Mat linear;       // ambient linear part
  Vec translation;  // zero for c != 0

  Point apply(const SpaceForm& M, const Point& p) const {
    Vec y = linear * p.x + translation;
    return M.curved() ? normalize_to_model(M, y) : Point{y};
  }
  TangentVector apply(const SpaceForm& M, const TangentVector& v) const {
    return TangentVector{apply(M, v.base), linear * v.v};
  }
};

namespace detail {

inline Mat random_orthogonal(int k, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Mat A(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) A(i, j) = gauss(rng);
  Eigen::HouseholderQR<Mat> qr(A);
  Mat Q = qr.householderQ();
  Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < k; ++i)
    if (R(i, i) < 0.0) Q.col(i) = -Q.col(i);
  return Q;
}

inline Mat form_matrix(const SpaceForm& M) {
  Mat J = Mat::Identity(M.ambient_dim(), M.ambient_dim());
  if (M.c() < 0.0) J(0, 0) = -1.0;
  return J;
}

}  // namespace detail

// Deterministic sample from G_W: identity on W, a seeded rotation of the
// orthogonal complement.
inline IsometryFixingW sample_G_W(const SpaceForm& M, const TotallyGeodesic& W,
                                  std::uint64_t seed) {
  int j = W.j(M);
  int k = M.n() - j;  // complement dimension
  int dim = M.ambient_dim();
  Mat J = detail::form_matrix(M);
  if (k < 2) {
    return IsometryFixingW{Mat::Identity(dim, dim), Vec::Zero(dim)};
  }
  Mat O = detail::random_orthogonal(k, seed);
  if (W.is_linear()) {
    const Mat& B = W.basis();
    Mat C = detail::form_complement(M, B, k);
    Mat A = Mat::Zero(dim, dim);
    for (int i = 0; i < B.cols(); ++i) {
      double eps = M.form(B.col(i), B.col(i));
      A += B.col(i) * (J * B.col(i)).transpose() / eps;
    }
    A += C * O * (J * C).transpose();
    return IsometryFixingW{A, Vec::Zero(dim)};
  }
  const Mat& F = W.frame();
  Mat C = detail::form_complement(M, F, k);
  Mat Alin = F * F.transpose() + C * O * C.transpose();
  Vec b = W.origin().x - Alin * W.origin().x;
  return IsometryFixingW{Alin, b};
}

// Random model point from a seeded stream: exp of a bounded random tangent
// at a base point.
inline Point random_model_point(const SpaceForm& M, std::uint64_t seed,
                                double scale = 2.0) {
  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  int dim = M.ambient_dim();
  Point base;
  if (!M.curved())
    base = Point{Vec::Zero(dim)};
  else if (M.c() > 0.0)
    base = Point{Vec::Unit(dim, 0) / std::sqrt(M.c())};
  else
    base = Point{Vec::Unit(dim, 0) / std::sqrt(-M.c())};
  Vec w(dim);
  for (int i = 0; i < dim; ++i) w[i] = gauss(rng);
  w = project_to_tangent(M, base, w);
  double nw = M.norm(w);
  if (nw < 1e-12) return base;
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double t = scale * uni(rng);
  if (M.c() > 0.0) t = std::min(t, 0.9 * M_PI / std::sqrt(M.c()));
  return exp_map(M, base, TangentVector{base, w / nw}, t);
}

}  // namespace spaceform
