#pragma once

#include "spaceform/horosphere.hpp"

namespace spaceform {

// Lipschitz function on the space form, restricted to the kinds needed for
// the level-set theorems: distances to a totally geodesic set, to a finite
// point cloud, to a single point, and Busemann functions.  Each kind knows
// the geodesics that realize its Lipschitz bound with equality, which is
// what the hypothesis residual tests.
class LipschitzField {
 public:
  enum class Kind { DistanceToGeodesic, DistanceToCloud, DistanceToPoint,
                    Busemann };

  static LipschitzField distance_to(const SpaceForm& M,
                                    const TotallyGeodesic& W) {
    LipschitzField f(M, Kind::DistanceToGeodesic);
    f.W_ = W;
    return f;
  }
  static LipschitzField distance_to(const SpaceForm& M, const Point& p) {
    LipschitzField f(M, Kind::DistanceToPoint);
    f.cloud_.push_back(p);
    return f;
  }
  static LipschitzField distance_to(const SpaceForm& M,
                                    std::vector<Point> cloud) {
    if (cloud.empty())
      throw EmptyNearestSet("distance field needs a nonempty point cloud");
    LipschitzField f(M, Kind::DistanceToCloud);
    f.cloud_ = std::move(cloud);
    return f;
  }
  static LipschitzField busemann_field(const SpaceForm& M,
                                       const IdealPoint& xi) {
    detail::require_hyperbolic(M, "busemann_field");
    LipschitzField f(M, Kind::Busemann);
    f.xi_ = xi;
    return f;
  }

  Kind kind() const { return kind_; }
  const SpaceForm& space() const { return M_; }
  double lipschitz_constant() const { return scale_; }

  LipschitzField scaled(double lambda) const {
    if (lambda <= 0.0) throw GeometryError("scale factor must be positive");
    LipschitzField f = *this;
    f.scale_ *= lambda;
    return f;
  }

  double eval(const Point& q, const Tolerances& tol = {}) const {
    switch (kind_) {
      case Kind::DistanceToGeodesic:
        return scale_ * project_W(M_, q, *W_, tol).distance;
      case Kind::Busemann:
        return scale_ * busemann(M_, q, *xi_);
      default: {
        double best = std::numeric_limits<double>::infinity();
        for (const Point& a : cloud_) best = std::min(best, dist(M_, q, a, tol));
        return scale_ * best;
      }
    }
  }

  // Points of the target set closest to q (ties kept within tol.predicate).
  // Meaningful for the distance kinds only.
  std::vector<Point> nearest(const Point& q, const Tolerances& tol = {}) const {
    switch (kind_) {
      case Kind::DistanceToGeodesic:
        return {project_W(M_, q, *W_, tol).foot};
      case Kind::Busemann:
        throw EmptyNearestSet("a Busemann field has no target set");
      default: {
        std::vector<double> d(cloud_.size());
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cloud_.size(); ++i) {
          d[i] = dist(M_, q, cloud_[i], tol);
          best = std::min(best, d[i]);
        }
        std::vector<Point> out;
        for (std::size_t i = 0; i < cloud_.size(); ++i)
          if (d[i] <= best + tol.predicate) out.push_back(cloud_[i]);
        if (out.empty())
          throw EmptyNearestSet("nearest-point search returned nothing");
        return out;
      }
    }
  }

  const IdealPoint& ideal() const {
    if (kind_ != Kind::Busemann)
      throw GeometryError("field has no ideal point");
    return *xi_;
  }

 private:
  LipschitzField(const SpaceForm& M, Kind k) : M_(M), kind_(k) {}

  SpaceForm M_;
  Kind kind_;
  double scale_ = 1.0;
  std::optional<TotallyGeodesic> W_;
  std::vector<Point> cloud_;
  std::optional<IdealPoint> xi_;
};

// Residual of the equal-slope hypothesis at (u, v): the geodesics realizing
// the Lipschitz bound with equality must leave orthogonally to v.  For
// distance fields those are the minimal segments to the target set; for
// Busemann fields, the asymptotic ray.  Zero means the hypothesis holds.
inline double hypothesis_residual(const LipschitzField& field,
                                  const ImmersedPatch& patch, const Vec& u,
                                  const Vec& v, const Tolerances& tol = {}) {
  const SpaceForm& M = patch.space();
  Point q = patch.eval(u);
  if (field.kind() == LipschitzField::Kind::Busemann) {
    TangentVector eta = asymptotic_direction(M, q, field.ideal());
    return std::abs(M.form(eta.v, v));
  }
  double best = std::numeric_limits<double>::infinity();
  for (const Point& a : field.nearest(q, tol)) {
    auto dir = detail::unit_log_dir(M, q, a, tol);
    if (!dir) continue;  // q on the target set: every direction realizes 0
    best = std::min(best, std::abs(M.form(*dir, v)));
  }
  if (!std::isfinite(best)) return 0.0;
  return best;
}

// Worst hypothesis residual over an orthonormal tangent frame at u.  For the
// distance kinds the minimizing nearest point is chosen per direction.
inline double sample_hypothesis_residual(const LipschitzField& field,
                                         const ImmersedPatch& patch,
                                         const Vec& u,
                                         const Tolerances& tol = {}) {
  FrameAtPoint fr = frame_at(patch, u, tol);
  double worst = 0.0;
  for (int i = 0; i < fr.tangent.cols(); ++i)
    worst = std::max(
        worst, hypothesis_residual(field, patch, u, fr.tangent.col(i), tol));
  return worst;
}

struct LevelReport {
  bool constant = false;
  double spread = 0.0;
  double level = 0.0;                  // median of the field over the sample
  double max_hypothesis_residual = 0.0;
  bool consistent = true;              // hypothesis => constancy, as sampled
  int samples = 0;
};

inline LevelReport verify_level(const LipschitzField& field,
                                const ImmersedPatch& patch,
                                const SamplePlan& plan,
                                const Tolerances& tol = {}) {
  LevelReport rep;
  std::vector<Vec> samples = sample_parameters(patch, plan);
  rep.samples = static_cast<int>(samples.size());
  if (samples.empty()) return rep;
  std::vector<double> values;
  values.reserve(samples.size());
  for (const Vec& u : samples) {
    values.push_back(field.eval(patch.eval(u), tol));
    rep.max_hypothesis_residual =
        std::max(rep.max_hypothesis_residual,
                 sample_hypothesis_residual(field, patch, u, tol));
  }
  auto mm = std::minmax_element(values.begin(), values.end());
  rep.spread = *mm.second - *mm.first;
  std::nth_element(values.begin(), values.begin() + values.size() / 2,
                   values.end());
  rep.level = values[values.size() / 2];
  rep.constant = rep.spread < tol.level * field.lipschitz_constant();
  bool hypothesis = rep.max_hypothesis_residual < tol.predicate;
  rep.consistent = !(hypothesis && !rep.constant);
  return rep;
}

// |G(x) - G(y)| <= C d(x, y) + slack over seeded random pairs of model
// points.  Returns the worst violation (<= 0 when the bound holds).
inline double lipschitz_violation(const LipschitzField& field, int pairs,
                                  std::uint64_t seed, double range = 2.0,
                                  const Tolerances& tol = {}) {
  const SpaceForm& M = field.space();
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < pairs; ++i) {
    Point x = random_model_point(M, splitmix64(seed ^ (2 * i + 1)), range);
    Point y = random_model_point(M, splitmix64(seed ^ (2 * i + 2)), range);
    double lhs = std::abs(field.eval(x, tol) - field.eval(y, tol));
    double rhs = field.lipschitz_constant() * dist(M, x, y, tol);
    worst = std::max(worst, lhs - rhs);
  }
  return worst;
}

}  // namespace spaceform
