#pragma once

#include "spaceform/immersion.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace spaceform {

struct PredicateVerdict {
  bool holds = false;
  bool not_applicable = false;
  double residual = 0.0;
  std::optional<Point> witness_w;    // point of W realizing the verdict
  std::optional<Vec> witness_eta;    // direction eta at q
  int samples_used = 0;
};

// Chart over W centered at a base point: y in R^j -> exp_base(sum y_i t_i).
// For c > 0 the chart covers all of W within |y| <= pi/sqrt(c).
class WChart {
 public:
  WChart(const SpaceForm& M, const TotallyGeodesic& W, const Point& base)
      : M_(M), base_(base), frame_(tangent_frame_of_W(M, base, W)) {}

  int dim() const { return static_cast<int>(frame_.cols()); }

  Point point(const Vec& y) const {
    if (dim() == 0) return base_;
    Vec w = frame_ * y;
    double nw = M_.norm(w);
    if (nw < 1e-300) return base_;
    return exp_map(M_, base_, TangentVector{base_, w / nw}, nw);
  }

  double radius(const Tolerances& tol) const {
    if (M_.c() > 0.0) return M_PI / std::sqrt(M_.c()) - 10.0 * tol.antipode;
    return tol.search_radius;
  }

 private:
  SpaceForm M_;
  Point base_;
  Mat frame_;
};

namespace detail {

// Unit direction at q of the geodesic through q and w; empty when the pair is
// degenerate (w at q, or nearly antipodal for c > 0).
inline std::optional<Vec> unit_log_dir(const SpaceForm& M, const Point& q,
                                       const Point& w, const Tolerances& tol) {
  try {
    TangentVector u = log_map(M, q, w, tol);
    double nu = M.norm(u.v);
    if (nu < 1e-12) return std::nullopt;
    return u.v / nu;
  } catch (const AntipodalPoints&) {
    return std::nullopt;
  }
}

// Multistart damped Gauss-Newton for small least-squares problems over a box
// |y|_inf <= radius.  Returns the best (y, |rho|) found.
struct SearchResult {
  Vec y;
  double value = std::numeric_limits<double>::infinity();
};

template <typename ResidualFn>
SearchResult multistart_gauss_newton(const ResidualFn& rho, int dim,
                                     double radius, const Tolerances& tol,
                                     std::uint64_t seed,
                                     int multistart_override = -1) {
  int starts = multistart_override > 0 ? multistart_override : tol.multistart;
  std::mt19937_64 rng(splitmix64(seed));
  std::uniform_real_distribution<double> uni(-radius, radius);
  auto clamp_box = [&](Vec& y) {
    for (int i = 0; i < y.size(); ++i)
      y[i] = std::clamp(y[i], -radius, radius);
  };
  auto value_of = [&](const Vec& y) -> double {
    auto r = rho(y);
    return r ? r->norm() : std::numeric_limits<double>::infinity();
  };

  SearchResult best;
  best.y = Vec::Zero(dim);
  if (dim == 0) {
    best.value = value_of(best.y);
    return best;
  }
  for (int s = 0; s <= starts; ++s) {
    Vec y = Vec::Zero(dim);
    if (s > 0)
      for (int i = 0; i < dim; ++i) y[i] = uni(rng);
    auto r0 = rho(y);
    if (!r0) continue;
    Vec r = *r0;
    double lambda = 1e-6;
    for (int it = 0; it < tol.max_iter; ++it) {
      double fr = r.norm();
      if (fr < 1e-13) break;
      // forward-difference Jacobian of rho
      double h = 1e-7 * std::max(1.0, y.norm());
      Mat J(r.size(), dim);
      bool jac_ok = true;
      for (int i = 0; i < dim && jac_ok; ++i) {
        Vec yp = y;
        yp[i] += h;
        clamp_box(yp);
        auto rp = rho(yp);
        if (!rp) {
          jac_ok = false;
          break;
        }
        J.col(i) = (*rp - r) / (yp[i] - y[i]);
      }
      if (!jac_ok) break;
      bool stepped = false;
      for (int attempt = 0; attempt < 12; ++attempt) {
        Mat A = J.transpose() * J + lambda * Mat::Identity(dim, dim);
        Vec delta = A.ldlt().solve(-J.transpose() * r);
        Vec yn = y + delta;
        clamp_box(yn);
        auto rn = rho(yn);
        if (rn && rn->norm() < fr) {
          y = yn;
          r = *rn;
          lambda = std::max(lambda * 0.3, 1e-12);
          stepped = true;
          if (delta.norm() < 1e-13 * std::max(1.0, y.norm())) it = tol.max_iter;
          break;
        }
        lambda *= 8.0;
      }
      if (!stepped) break;
    }
    double v = r.norm();
    if (v < best.value) {
      best.value = v;
      best.y = y;
    }
  }
  return best;
}

// Coarse grid over the chart box; returns the grid points (used for
// sign-change detection and as extra starts).
inline std::vector<Vec> chart_grid(int dim, double radius, int per_dim) {
  std::vector<Vec> pts;
  if (dim == 0) {
    pts.push_back(Vec::Zero(0));
    return pts;
  }
  std::vector<int> idx(dim, 0);
  for (;;) {
    Vec y(dim);
    for (int i = 0; i < dim; ++i)
      y[i] = -radius + 2.0 * radius * idx[i] / (per_dim - 1);
    pts.push_back(y);
    int k = 0;
    while (k < dim && ++idx[k] == per_dim) idx[k++] = 0;
    if (k == dim) break;
  }
  return pts;
}

}  // namespace detail

// Property (B) at q = f(u): some geodesic normal to Sigma at q meets W.
// Reduced to a search over W for a point w whose log direction at q is
// orthogonal to the tangent frame.
inline PredicateVerdict check_B(const ImmersedPatch& patch, const Vec& u,
                                const TotallyGeodesic& W,
                                const Tolerances& tol = {},
                                std::uint64_t seed = 0) {
  const SpaceForm& M = patch.space();
  FrameAtPoint fr = frame_at(patch, u, tol);
  const Point& q = fr.point;
  Projection foot = project_W(M, q, W, tol);
  WChart chart(M, W, foot.foot);
  int j = chart.dim();
  double radius = chart.radius(tol);

  auto tangential = [&](const Point& w) -> std::optional<Vec> {
    auto dir = detail::unit_log_dir(M, q, w, tol);
    if (!dir) return std::nullopt;
    Vec comp(fr.tangent.cols());
    for (int i = 0; i < comp.size(); ++i)
      comp[i] = M.form(*dir, fr.tangent.col(i));
    return comp;
  };

  PredicateVerdict verdict;
  verdict.samples_used = 1;

  // c = 0: exact affine feasibility. The normal space at q is
  // q + span(normal frame); intersect with W = origin + span(frame).
  if (!M.curved()) {
    const Mat& T = fr.tangent;
    Mat A = T.transpose() * W.frame();                // m x j
    Vec b = T.transpose() * (q.x - W.origin().x);     // m
    Vec y = A.cols() > 0
                ? Vec(A.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                          .solve(b))
                : Vec(Vec::Zero(0));
    Point w{W.origin().x + W.frame() * y};
    auto comp = tangential(w);
    verdict.residual = comp ? comp->norm() : 0.0;
    verdict.holds = (A * y - b).norm() <= tol.predicate &&
                    verdict.residual <= tol.predicate;
    if (verdict.holds) {
      verdict.witness_w = w;
      auto dir = detail::unit_log_dir(M, q, w, tol);
      if (dir) verdict.witness_eta = *dir;
    }
    return verdict;
  }

  auto rho = [&](const Vec& y) -> std::optional<Vec> {
    return tangential(chart.point(y));
  };
  detail::SearchResult best =
      detail::multistart_gauss_newton(rho, j, radius, tol, seed);
  verdict.residual = best.value;
  verdict.holds = best.value < tol.predicate;
  if (verdict.holds) {
    Point w = chart.point(best.y);
    verdict.witness_w = w;
    auto dir = detail::unit_log_dir(M, q, w, tol);
    if (dir) verdict.witness_eta = *dir;
  }
  return verdict;
}

// Property (C) at q for the kernel directions of dpi_W|_Sigma: for each such
// v there must be a geodesic orthogonal to v meeting W.
inline PredicateVerdict check_C(const ImmersedPatch& patch, const Vec& u,
                                const TotallyGeodesic& W,
                                const Tolerances& tol = {},
                                std::uint64_t seed = 0,
                                int kernel_samples = 16) {
  const SpaceForm& M = patch.space();
  KernelBasis kb = kernel_basis(patch, u, W, tol);
  Point q = patch.eval(u);
  Projection foot = project_W(M, q, W, tol);
  WChart chart(M, W, foot.foot);
  int j = chart.dim();
  double radius = chart.radius(tol);

  // Directions to test: the kernel basis plus seeded unit combinations when
  // the kernel has dimension >= 2.
  std::vector<Vec> dirs;
  for (const auto& tv : kb.vectors) dirs.push_back(tv.v);
  if (static_cast<int>(kb.vectors.size()) >= 2) {
    std::mt19937_64 rng(splitmix64(seed ^ 0x5eedULL));
    std::normal_distribution<double> gauss(0.0, 1.0);
    int extra = std::max(0, kernel_samples -
                                static_cast<int>(kb.vectors.size()));
    for (int s = 0; s < extra; ++s) {
      Vec coeff(static_cast<int>(kb.vectors.size()));
      for (int i = 0; i < coeff.size(); ++i) coeff[i] = gauss(rng);
      Vec w = Vec::Zero(M.ambient_dim());
      for (int i = 0; i < coeff.size(); ++i) w += coeff[i] * kb.vectors[i].v;
      double nw = M.norm(w);
      if (nw > 1e-12) dirs.push_back(w / nw);
    }
  }

  PredicateVerdict verdict;
  verdict.samples_used = static_cast<int>(dirs.size());
  if (dirs.empty()) {  // empty kernel: vacuously true
    verdict.holds = true;
    verdict.residual = 0.0;
    return verdict;
  }

  double worst = 0.0;
  for (std::size_t di = 0; di < dirs.size(); ++di) {
    const Vec& v = dirs[di];
    auto g = [&](const Vec& y) -> std::optional<double> {
      auto dir = detail::unit_log_dir(M, q, chart.point(y), tol);
      if (!dir) return std::nullopt;
      return M.form(*dir, v);
    };
    // coarse grid with sign-change detection along axis-aligned neighbors
    double res_v = std::numeric_limits<double>::infinity();
    Vec res_y = Vec::Zero(j);
    int per_dim = j <= 2 ? 17 : 5;
    auto grid = detail::chart_grid(j, radius, per_dim);
    std::vector<std::optional<double>> vals(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      vals[k] = g(grid[k]);
      if (vals[k] && std::abs(*vals[k]) < res_v) {
        res_v = std::abs(*vals[k]);
        res_y = grid[k];
      }
    }
    if (j >= 1) {
      // bisection between consecutive grid nodes with a sign change
      int stride = 1;
      for (int d = 0; d < j; ++d) {
        for (std::size_t k = 0; k + stride < vals.size(); ++k) {
          std::size_t k2 = k + stride;
          if ((k / stride) % per_dim == static_cast<std::size_t>(per_dim - 1))
            continue;
          if (!vals[k] || !vals[k2]) continue;
          if (*vals[k] == 0.0 || *vals[k] * *vals[k2] > 0.0) continue;
          Vec lo = grid[k], hi = grid[k2];
          double flo = *vals[k];
          for (int b = 0; b < 60; ++b) {
            Vec mid = 0.5 * (lo + hi);
            auto fm = g(mid);
            if (!fm) break;
            if (*fm == 0.0 || *fm * flo > 0.0) {
              lo = mid;
              flo = *fm;
            } else {
              hi = mid;
            }
          }
          auto fl = g(lo);
          if (fl && std::abs(*fl) < res_v) {
            res_v = std::abs(*fl);
            res_y = lo;
          }
        }
        stride *= per_dim;
      }
    }
    // multistart polish
    auto rho = [&](const Vec& y) -> std::optional<Vec> {
      auto val = g(y);
      if (!val) return std::nullopt;
      Vec r(1);
      r[0] = *val;
      return r;
    };
    detail::SearchResult best = detail::multistart_gauss_newton(
        rho, j, radius, tol, seed ^ (0x1000 + di));
    if (best.value < res_v) {
      res_v = best.value;
      res_y = best.y;
    }
    if (res_v > worst) {
      worst = res_v;
      verdict.witness_eta = v;  // report the worst-case direction
    }
    if (res_v < tol.predicate && !verdict.witness_w)
      verdict.witness_w = chart.point(res_y);
  }
  verdict.residual = worst;
  verdict.holds = worst < tol.predicate;
  return verdict;
}

// Submersion hypothesis of the equivalence theorem: dpi_W|_Sigma has full
// rank j at q.
inline PredicateVerdict check_submersion(const ImmersedPatch& patch,
                                         const Vec& u,
                                         const TotallyGeodesic& W,
                                         const Tolerances& tol = {}) {
  const SpaceForm& M = patch.space();
  Mat D = dpi_W_restricted(patch, u, W, tol);
  int j = W.j(M);
  PredicateVerdict verdict;
  verdict.samples_used = 1;
  if (j == 0) {  // surjectivity onto a point is vacuous
    verdict.holds = true;
    verdict.residual = 0.0;
    return verdict;
  }
  Eigen::JacobiSVD<Mat> svd(D);
  double smax = svd.singularValues()[0];
  double sj = svd.singularValues().size() >= j
                  ? svd.singularValues()[j - 1]
                  : 0.0;
  if (D.cols() < j) sj = 0.0;
  double thr = tol.rank * std::max(1.0, smax);
  verdict.residual = std::max(0.0, thr - sj);
  verdict.holds = sj > thr;
  return verdict;
}

struct SamplePlan {
  std::vector<int> grid;  // per-dimension grid counts (defaults applied)
  int random_samples = 0;
  std::uint64_t seed = 0;
};

// Deterministic sample points of a patch: low-discrepancy grid at cell
// centers plus seeded uniform draws, excluded regions skipped.
inline std::vector<Vec> sample_parameters(const ImmersedPatch& patch,
                                          const SamplePlan& plan) {
  int m = patch.param_dim();
  std::vector<int> counts = plan.grid;
  if (static_cast<int>(counts.size()) != m) {
    int per = std::max(2, static_cast<int>(std::round(
                              std::pow(256.0, 1.0 / m))));
    counts.assign(m, per);
  }
  const Box& box = patch.domain();
  std::vector<Vec> out;
  std::vector<int> idx(m, 0);
  for (;;) {
    Vec u(m);
    for (int i = 0; i < m; ++i) {
      double f = (idx[i] + 0.5) / counts[i];
      u[i] = box.lo[i] + f * (box.hi[i] - box.lo[i]);
    }
    if (patch.admissible(u)) out.push_back(u);
    int k = 0;
    while (k < m && ++idx[k] == counts[k]) idx[k++] = 0;
    if (k == m) break;
  }
  std::mt19937_64 rng(splitmix64(plan.seed));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int s = 0; s < plan.random_samples; ++s) {
    Vec u(m);
    for (int i = 0; i < m; ++i)
      u[i] = box.lo[i] + uni(rng) * (box.hi[i] - box.lo[i]);
    if (patch.admissible(u)) out.push_back(u);
  }
  return out;
}

struct FiberWalkRecord {
  Vec start;
  double spread = 0.0;
  bool stalled = false;
  int steps = 0;
};

struct ACheckReport {
  bool holds = false;
  bool not_applicable = false;
  double max_spread = 0.0;
  std::optional<Vec> failing_sample;  // submersion failure, when NA
  std::vector<FiberWalkRecord> walks;

  PredicateVerdict as_verdict(const Tolerances& tol) const {
    PredicateVerdict v;
    v.not_applicable = not_applicable;
    v.holds = holds;
    v.residual = max_spread;
    v.samples_used = static_cast<int>(walks.size());
    (void)tol;
    return v;
  }
};

// Property (A) via the fiber-distance-constancy criterion: walk the fibers of
// pi_W|_Sigma by predictor/corrector continuation and require d(., W) to be
// constant along each walked fiber.  Valid only under the submersion
// hypothesis; refuses to report otherwise.
inline ACheckReport check_A_fiberwise(const ImmersedPatch& patch,
                                      const TotallyGeodesic& W,
                                      const SamplePlan& plan,
                                      const Tolerances& tol = {}) {
  const SpaceForm& M = patch.space();
  ACheckReport report;
  std::vector<Vec> samples = sample_parameters(patch, plan);

  for (const Vec& u0 : samples) {
    PredicateVerdict sub = check_submersion(patch, u0, W, tol);
    if (!sub.holds) {
      report.not_applicable = true;
      report.failing_sample = u0;
      return report;
    }
  }

  int steps_per_side = 20;
  for (const Vec& u0 : samples) {
    KernelBasis kb0 = kernel_basis(patch, u0, W, tol);
    if (kb0.param_dirs.cols() == 0) {
      // Discrete fibers: nothing to walk, spread zero by construction.
      report.walks.push_back(FiberWalkRecord{u0, 0.0, false, 0});
      continue;
    }
    Point q0 = patch.eval(u0);
    Projection pr0 = project_W(M, q0, W, tol);
    Mat TW = tangent_frame_of_W(M, pr0.foot, W);
    int j = static_cast<int>(TW.cols());

    auto foot_residual = [&](const Vec& u) -> std::optional<Vec> {
      if (!patch.admissible(u)) return std::nullopt;
      Projection pr = project_W(M, patch.eval(u), W, tol);
      Vec lg = j > 0 ? log_map(M, pr0.foot, pr.foot, tol).v
                     : Vec::Zero(M.ambient_dim());
      Vec r(j);
      for (int k = 0; k < j; ++k) r[k] = M.form(TW.col(k), lg);
      return r;
    };

    FiberWalkRecord rec;
    rec.start = u0;
    double d0 = pr0.distance;
    double dmin = d0, dmax = d0;

    int walk_dirs = std::min<int>(kb0.param_dirs.cols(), 2);
    for (int kd = 0; kd < walk_dirs; ++kd) {
      for (double sign : {+1.0, -1.0}) {
        Vec u = u0;
        Vec prev_dir = sign * kb0.param_dirs.col(kd);
        for (int step = 0; step < steps_per_side; ++step) {
          Vec dir;
          try {
            KernelBasis kb = kernel_basis(patch, u, W, tol);
            if (kb.param_dirs.cols() == 0) break;
            // align with the previous direction
            Vec best = kb.param_dirs.col(0);
            double besta = std::abs(prev_dir.dot(best));
            for (int i = 1; i < kb.param_dirs.cols(); ++i) {
              double a = std::abs(prev_dir.dot(kb.param_dirs.col(i)));
              if (a > besta) {
                besta = a;
                best = kb.param_dirs.col(i);
              }
            }
            dir = prev_dir.dot(best) >= 0 ? best : Vec(-best);
          } catch (const GeometryError&) {
            break;
          }
          Vec u_pred = u + tol.fiber_step * dir;
          if (!patch.admissible(u_pred)) break;
          // corrector: Gauss-Newton on the foot residual, min-norm steps
          Vec uc = u_pred;
          bool converged = false;
          if (j == 0) {
            converged = true;
          } else {
            for (int it = 0; it < tol.max_iter; ++it) {
              auto r = foot_residual(uc);
              if (!r) break;
              if (r->norm() < 1e-11) {
                converged = true;
                break;
              }
              double h = 1e-7 * std::max(1.0, uc.norm());
              Mat Jr(j, uc.size());
              bool ok = true;
              for (int i = 0; i < uc.size(); ++i) {
                Vec up = uc;
                up[i] += h;
                auto rp = foot_residual(up);
                if (!rp) {
                  ok = false;
                  break;
                }
                Jr.col(i) = (*rp - *r) / h;
              }
              if (!ok) break;
              Vec delta = Jr.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                              .solve(-*r);
              uc += delta;
              if (!patch.admissible(uc)) break;
            }
          }
          if (!converged) {
            rec.stalled = true;
            break;
          }
          u = uc;
          prev_dir = dir;
          double d = project_W(M, patch.eval(u), W, tol).distance;
          dmin = std::min(dmin, d);
          dmax = std::max(dmax, d);
          ++rec.steps;
        }
      }
    }
    rec.spread = dmax - dmin;
    report.max_spread = std::max(report.max_spread, rec.spread);
    report.walks.push_back(rec);
  }
  report.holds = report.max_spread < tol.fiber;
  return report;
}

enum class TriState { Holds, Fails, NotApplicable };

inline const char* to_string(TriState s) {
  switch (s) {
    case TriState::Holds: return "holds";
    case TriState::Fails: return "fails";
    default: return "not-applicable";
  }
}

struct ImplicationCell {
  std::string name;   // e.g. "B => A"
  bool applicable = false;
  bool violated = false;
};

struct Theorem1Report {
  TriState A = TriState::NotApplicable;
  bool B = false;
  bool C = false;
  bool submersion_ok = false;
  double a_spread = 0.0;
  double b_worst_residual = 0.0;   // max residual over holding samples,
  double b_best_residual = 0.0;    // min residual over failing samples
  double c_worst_residual = 0.0;
  std::vector<ImplicationCell> cells;
  bool consistent = true;
  int samples = 0;
};

// Evaluates the (A)/(B)/(C) verdicts on a sample and asserts exactly the
// implications proved for the sign of c.  A violated cell is a numerical
// failure and is flagged, never silently accepted.
inline Theorem1Report theorem1_consistency(const ImmersedPatch& patch,
                                           const TotallyGeodesic& W,
                                           const SamplePlan& plan,
                                           const Tolerances& tol = {}) {
  const SpaceForm& M = patch.space();
  Theorem1Report rep;
  std::vector<Vec> samples = sample_parameters(patch, plan);
  rep.samples = static_cast<int>(samples.size());

  bool b_all = true, c_all = true, sub_all = true;
  double b_hold_max = 0.0, b_fail_min =
                               std::numeric_limits<double>::infinity();
  double c_max = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vec& u = samples[i];
    PredicateVerdict sb = check_submersion(patch, u, W, tol);
    sub_all = sub_all && sb.holds;
    PredicateVerdict b =
        check_B(patch, u, W, tol, splitmix64(plan.seed ^ (i * 2 + 1)));
    PredicateVerdict c =
        check_C(patch, u, W, tol, splitmix64(plan.seed ^ (i * 2 + 2)));
    b_all = b_all && b.holds;
    c_all = c_all && c.holds;
    if (b.holds)
      b_hold_max = std::max(b_hold_max, b.residual);
    else
      b_fail_min = std::min(b_fail_min, b.residual);
    c_max = std::max(c_max, c.residual);
  }
  rep.B = b_all;
  rep.C = c_all;
  rep.submersion_ok = sub_all;
  rep.b_worst_residual = b_hold_max;
  rep.b_best_residual = std::isfinite(b_fail_min) ? b_fail_min : 0.0;
  rep.c_worst_residual = c_max;

  ACheckReport a = check_A_fiberwise(patch, W, plan, tol);
  rep.a_spread = a.max_spread;
  rep.A = a.not_applicable ? TriState::NotApplicable
                           : (a.holds ? TriState::Holds : TriState::Fails);

  auto add = [&](const std::string& name, bool premise, bool conclusion) {
    ImplicationCell cell{name, premise, premise && !conclusion};
    rep.cells.push_back(cell);
    if (cell.violated) rep.consistent = false;
  };
  bool a_known = rep.A != TriState::NotApplicable;
  bool a_holds = rep.A == TriState::Holds;
  // proved for all c (Remark: B => A, A => C)
  if (a_known) add("B => A", rep.B, a_holds);
  if (a_known) add("A => C", a_holds, rep.C);
  if (M.c() == 0.0 && a_known) {
    add("C => A (c=0)", rep.C, a_holds);
    add("A => B (c=0)", a_holds, rep.B);
  } else if (M.c() > 0.0 && a_known) {
    add("A => B (c>0)", a_holds, rep.B);
  } else if (M.c() < 0.0 && a_known) {
    add("C => A (c<0)", rep.C, a_holds);
  }
  return rep;
}

struct HypersurfaceReport {
  bool consistent = true;
  int samples = 0;
  int violations = 0;
};

// Proposition for hypersurfaces in c <= 0: not-submersion implies not-C.
inline HypersurfaceReport check_prop_hypersurface_submersion(
    const ImmersedPatch& patch, const TotallyGeodesic& W,
    const SamplePlan& plan, const Tolerances& tol = {}) {
  const SpaceForm& M = patch.space();
  if (M.c() > 0.0)
    throw GeometryError("hypersurface proposition requires c <= 0");
  if (patch.param_dim() != M.n() - 1)
    throw GeometryError("hypersurface proposition requires m = n - 1");
  HypersurfaceReport rep;
  std::vector<Vec> samples = sample_parameters(patch, plan);
  rep.samples = static_cast<int>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Vec& u = samples[i];
    PredicateVerdict sb = check_submersion(patch, u, W, tol);
    if (sb.holds) continue;  // implication vacuous
    PredicateVerdict c =
        check_C(patch, u, W, tol, splitmix64(plan.seed ^ (i + 77)));
    if (c.holds) ++rep.violations;
  }
  rep.consistent = rep.violations == 0;
  return rep;
}

}  // namespace spaceform
