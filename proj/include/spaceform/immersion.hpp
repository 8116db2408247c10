#pragma once

#include "spaceform/core.hpp"

#include <functional>
#include <utility>

namespace spaceform {

struct Box {
  Vec lo;
  Vec hi;

  bool contains(const Vec& u) const {
    for (int i = 0; i < u.size(); ++i)
      if (u[i] < lo[i] || u[i] > hi[i]) return false;
    return true;
  }
};

// Parametrized submanifold Sigma = f(U) of Q^n_c.  Evaluation must land on
// the model surface; the Jacobian is analytic when provided, otherwise
// central finite differences.
class ImmersedPatch {
 public:
  using EvalFn = std::function<Vec(const Vec&)>;
  using JacFn = std::function<Mat(const Vec&)>;
  using ExcludeFn = std::function<bool(const Vec&)>;

  ImmersedPatch(SpaceForm space, int param_dim, Box domain, EvalFn eval)
      : space_(std::move(space)),
        m_(param_dim),
        domain_(std::move(domain)),
        eval_(std::move(eval)) {}

  void set_analytic_jacobian(JacFn jac) { jac_ = std::move(jac); }
  void set_exclusion(ExcludeFn f, double guard = 1e-3) {
    exclude_ = std::move(f);
    guard_ = guard;
  }

  const SpaceForm& space() const { return space_; }
  int param_dim() const { return m_; }
  const Box& domain() const { return domain_; }
  double guard_radius() const { return guard_; }
  bool has_analytic_jacobian() const { return static_cast<bool>(jac_); }

  bool admissible(const Vec& u) const {
    if (!domain_.contains(u)) return false;
    return !(exclude_ && exclude_(u));
  }

  Point eval(const Vec& u) const { return Point{eval_(u)}; }

  double fd_step(const Vec& u, const Tolerances& tol) const {
    return tol.fd_step * std::max(1.0, u.norm());
  }

  Mat jacobian(const Vec& u, const Tolerances& tol = {}) const {
    if (jac_) return jac_(u);
    double h = fd_step(u, tol);
    Mat J(space_.ambient_dim(), m_);
    for (int i = 0; i < m_; ++i) {
      Vec up = u, um = u;
      up[i] += h;
      um[i] -= h;
      J.col(i) = (eval_(up) - eval_(um)) / (2.0 * h);
    }
    return J;
  }

  // Composes the evaluation with an ambient isometry (the patch phi(Sigma)).
  ImmersedPatch transformed(const IsometryFixingW& phi) const {
    ImmersedPatch out = *this;
    SpaceForm M = space_;
    EvalFn base = eval_;
    Mat A = phi.linear;
    Vec b = phi.translation;
    out.eval_ = [M, base, A, b](const Vec& u) -> Vec {
      Vec y = A * base(u) + b;
      return M.curved() ? normalize_to_model(M, y).x : y;
    };
    if (jac_) {
      JacFn jb = jac_;
      out.jac_ = [A, jb](const Vec& u) -> Mat { return A * jb(u); };
    }
    return out;
  }

 private:
  SpaceForm space_;
  int m_;
  Box domain_;
  EvalFn eval_;
  JacFn jac_;
  ExcludeFn exclude_;
  double guard_ = 1e-3;
};

struct FrameAtPoint {
  Point point;
  Mat tangent;  // ambient x m, form-orthonormal, spans the Jacobian columns
  Mat normal;   // ambient x (n - m), completes the tangent space at point
};

inline FrameAtPoint frame_at(const ImmersedPatch& patch, const Vec& u,
                             const Tolerances& tol = {}) {
  const SpaceForm& M = patch.space();
  Point q = patch.eval(u);
  Mat J = patch.jacobian(u, tol);
  Eigen::JacobiSVD<Mat> svd(J);
  double smax = svd.singularValues()[0];
  double smin = svd.singularValues()[svd.singularValues().size() - 1];
  if (smin <= tol.rank * std::max(1.0, smax))
    throw RankDeficient("immersion fails: Jacobian is rank deficient");
  Mat Jt(J.rows(), J.cols());
  for (int i = 0; i < J.cols(); ++i)
    Jt.col(i) = project_to_tangent(M, q, J.col(i));
  Mat T = form_orthonormalize(M, Jt, 1e-10);
  if (T.cols() != patch.param_dim())
    throw RankDeficient("tangent frame collapsed during orthonormalization");

  // Complete to a frame of T_q(Q^n_c).
  int n = M.n();
  int dim = M.ambient_dim();
  Mat cand(dim, dim);
  for (int k = 0; k < dim; ++k) {
    Vec e = project_to_tangent(M, q, Vec::Unit(dim, k));
    for (int i = 0; i < T.cols(); ++i)
      e -= M.form(e, T.col(i)) * T.col(i);
    cand.col(k) = e;
  }
  Mat N = form_orthonormalize(M, cand, 1e-8);
  if (N.cols() != n - patch.param_dim())
    throw GeometryError("normal frame has unexpected dimension");
  return FrameAtPoint{q, T, N};
}

// Matrix of d(pi_W o f)_u expressed in an orthonormal frame of T_{foot}W
// (rows) against the parameter directions (columns); central differences of
// the projection.
inline Mat dpi_W_restricted(const ImmersedPatch& patch, const Vec& u,
                            const TotallyGeodesic& W,
                            const Tolerances& tol = {}) {
  const SpaceForm& M = patch.space();
  int m = patch.param_dim();
  int j = W.j(M);
  Point q0 = patch.eval(u);
  Projection pr0 = project_W(M, q0, W, tol);
  Mat TW = tangent_frame_of_W(M, pr0.foot, W);
  Mat D(j, m);
  double h = patch.fd_step(u, tol);
  for (int i = 0; i < m; ++i) {
    Vec up = u, um = u;
    up[i] += h;
    um[i] -= h;
    Projection pp = project_W(M, patch.eval(up), W, tol);
    Projection pm = project_W(M, patch.eval(um), W, tol);
    Vec dp = log_map(M, pr0.foot, pp.foot, tol).v;
    Vec dm = log_map(M, pr0.foot, pm.foot, tol).v;
    Vec vel = (dp - dm) / (2.0 * h);
    for (int r = 0; r < j; ++r) D(r, i) = M.form(TW.col(r), vel);
  }
  return D;
}

struct KernelBasis {
  Mat param_dirs;                       // m x k, orthonormal in R^m
  std::vector<TangentVector> vectors;   // unit ambient tangent vectors at q
};

// Null directions of dpi_W restricted to the patch, as parameter directions
// and as unit tangent vectors of Sigma.
inline KernelBasis kernel_basis(const ImmersedPatch& patch, const Vec& u,
                                const TotallyGeodesic& W,
                                const Tolerances& tol = {}) {
  const SpaceForm& M = patch.space();
  Mat D = dpi_W_restricted(patch, u, W, tol);
  int m = patch.param_dim();
  KernelBasis out;
  Point q = patch.eval(u);
  Mat J = patch.jacobian(u, tol);
  std::vector<Vec> dirs;
  if (D.rows() == 0) {
    for (int i = 0; i < m; ++i) dirs.push_back(Vec::Unit(m, i));
  } else {
    Eigen::JacobiSVD<Mat> svd(D, Eigen::ComputeFullV);
    double smax = svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0;
    double thr = tol.rank * std::max(1.0, smax);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > thr) ++rank;
    for (int i = rank; i < m; ++i) dirs.push_back(svd.matrixV().col(i));
  }
  out.param_dirs.resize(m, static_cast<int>(dirs.size()));
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    out.param_dirs.col(static_cast<int>(i)) = dirs[i];
    Vec w = project_to_tangent(M, q, J * dirs[i]);
    double nw = M.norm(w);
    if (nw < 1e-300) throw RankDeficient("kernel direction is degenerate");
    out.vectors.push_back(TangentVector{q, w / nw});
  }
  return out;
}

}  // namespace spaceform
