#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "difflab/pde_solver.hpp"
#include "time_loop_detail.hpp"

namespace difflab {

namespace {

//! One direction of a cut-cell stencil: either a coupling to another unknown
//! or a fixed flux value at a shortened arm (obstacle boundary or box edge).
struct Arm {
  int neighbor = -1;  // unknown index, or -1 for a fixed-value arm
  double length = 0;
  double w_value = 0;  // fixed arms only: phi(u) held at the arm's end
};

struct Stencil {
  Arm lo[2], hi[2];  // per axis
  std::size_t node = 0;
  bool cut = false;  // any shortened arm
};

double indicator_fraction(const DomainSpec& set, double x0, double x1,
                          double y0, double y1) {
  double area = 0;
  for (const auto& prim : set.primitives) {
    if (const auto* b = std::get_if<Ball>(&prim)) {
      area += detail::circle_box_overlap(b->center[0], b->center[1], b->radius,
                                         x0, x1, y0, y1);
    } else if (const auto* e = std::get_if<Ellipse>(&prim)) {
      const double a = e->semi_axes[0], bb = e->semi_axes[1];
      area += a * bb *
              detail::circle_box_overlap(0, 0, 1.0, (x0 - e->center[0]) / a,
                                         (x1 - e->center[0]) / a,
                                         (y0 - e->center[1]) / bb,
                                         (y1 - e->center[1]) / bb);
    } else {
      throw UnsupportedError(
          "indicator initial data supports balls and ellipses only");
    }
  }
  return area / ((x1 - x0) * (y1 - y0));
}

void check_inside_box(const DomainSpec& spec, const CartesianGrid2D& g,
                      const char* what) {
  const double margin = 2 * g.h;
  const double x_lo = g.origin[0], x_hi = g.origin[0] + g.h * (g.nx - 1);
  const double y_lo = g.origin[1], y_hi = g.origin[1] + g.h * (g.ny - 1);
  for (std::size_t i = 0; i < spec.primitives.size(); ++i) {
    Point c{0, 0, 0};
    double r = 0;
    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, Ball>) {
            c = p.center;
            r = p.radius;
          } else if constexpr (std::is_same_v<T, Ellipse>) {
            c = p.center;
            r = std::max(p.semi_axes[0], p.semi_axes[1]);
          } else {
            c = {0.5 * (p.p0[0] + p.p1[0]), 0.5 * (p.p0[1] + p.p1[1]), 0};
            double dx = p.p1[0] - p.p0[0], dy = p.p1[1] - p.p0[1];
            r = 0.5 * std::sqrt(dx * dx + dy * dy) + p.radius;
          }
        },
        spec.primitives[i]);
    if (c[0] - r < x_lo + margin || c[0] + r > x_hi - margin ||
        c[1] - r < y_lo + margin || c[1] + r > y_hi - margin) {
      std::ostringstream os;
      os << what << ": primitive " << i
         << " is not inside the box with a two-cell margin";
      throw ConfigError(os.str());
    }
  }
}

class CartesianStepper {
 public:
  CartesianStepper(const CartesianProblem& p, const Nonlinearity& nl,
                   const SolverOptions& opt)
      : p_(p), nl_(nl), opt_(opt) {
    const auto& g = p.grid;
    if (g.nx < 5 || g.ny < 5 || !(g.h > 0))
      throw ConfigError("box grid needs positive spacing and at least 5x5 nodes");
    if (p.obstacle) {
      validate(*p.obstacle);
      if (p.obstacle->dimension != 2)
        throw ConfigError("box solver expects a two-dimensional domain");
      const double feat = min_feature_size(*p.obstacle);
      if (feat < 8 * g.h) {
        std::ostringstream os;
        os << "domain feature " << feat << " needs spacing at most " << feat / 8
           << ", got " << g.h;
        throw ResolutionError(os.str());
      }
      check_inside_box(*p.obstacle, g, "domain");
    }
    if (p.initial_set) {
      validate(*p.initial_set);
      if (p.initial_set->kind != DomainKind::interior)
        throw ConfigError("initial set must be the inside of a primitive");
      check_inside_box(*p.initial_set, g, "initial set");
    }
    if (!p.obstacle && !p.initial_set)
      throw ConfigError("box problem needs an obstacle, an initial set, or both");

    build_layout();
    build_matrix();
    build_initial();
  }

  bool step(double /*t_new*/, double dt, SchemeMeta& meta) {
    const Eigen::Index n = u_.size();
    Eigen::VectorXd u = u_;
    Eigen::VectorXd w(n), r(n), dphi(n);
    double worst_prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt_.max_newton_iter; ++it) {
      ++meta.newton_iterations;
      for (Eigen::Index i = 0; i < n; ++i) w[i] = nl_.phi(u[i]);
      Eigen::VectorXd div = A_ * w + g_;
      double worst = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        r[i] = u[i] - u_[i] - dt * div[i];
        const double scale = std::max(
            1.0, std::abs(u[i]) + std::abs(u_[i]) + dt * std::abs(div[i]));
        worst = std::max(worst, std::abs(r[i]) / scale);
      }
      if (worst <= opt_.newton_tol) {
        u_ = u;
        check_bounds(meta);
        return true;
      }
      if (worst >= worst_prev) return false;
      worst_prev = worst;
      for (Eigen::Index i = 0; i < n; ++i) dphi[i] = nl_.dphi(u[i]);
      Eigen::SparseMatrix<double> J = A_;
      for (int col = 0; col < J.outerSize(); ++col) {
        const double s = -dt * dphi[col];
        for (Eigen::SparseMatrix<double>::InnerIterator jt(J, col); jt; ++jt)
          jt.valueRef() *= s;
      }
      for (Eigen::Index i = 0; i < n; ++i) J.coeffRef(i, i) += 1.0;
      Eigen::BiCGSTAB<Eigen::SparseMatrix<double>> solver;
      solver.setTolerance(1e-13);
      solver.setMaxIterations(6000);
      solver.compute(J);
      Eigen::VectorXd delta = solver.solve(-r);
      if (!delta.allFinite()) return false;
      u += delta;
    }
    return false;
  }

  ScalarField field(std::shared_ptr<const Grid> grid) const {
    ScalarField f;
    f.grid = std::move(grid);
    f.values.assign(p_.grid.node_count(), 0.0);
    f.mask = mask_;
    for (std::size_t k = 0; k < stencils_.size(); ++k)
      f.values[stencils_[k].node] = u_[static_cast<Eigen::Index>(k)];
    return f;
  }

 private:
  bool member(int ix, int iy) const {
    if (!p_.obstacle) return true;
    const auto [x, y] = p_.grid.pos(ix, iy);
    return contains(*p_.obstacle, {x, y, 0});
  }

  void build_layout() {
    const auto& g = p_.grid;
    unknown_.assign(g.node_count(), -1);
    mask_.assign(g.node_count(), kMaskOutside);
    for (int iy = 1; iy + 1 < g.ny; ++iy) {
      for (int ix = 1; ix + 1 < g.nx; ++ix) {
        if (!member(ix, iy)) continue;
        const std::size_t id = g.index(ix, iy);
        unknown_[id] = static_cast<int>(stencils_.size());
        Stencil st;
        st.node = id;
        stencils_.push_back(st);
        mask_[id] = kMaskInside;
      }
    }
    const double w_bc = p_.obstacle ? nl_.phi(p_.boundary_value) : 0.0;
    for (auto& st : stencils_) {
      const int ix = static_cast<int>(st.node % static_cast<std::size_t>(g.nx));
      const int iy = static_cast<int>(st.node / static_cast<std::size_t>(g.nx));
      const auto [x, y] = g.pos(ix, iy);
      for (int axis = 0; axis < 2; ++axis) {
        for (int side = 0; side < 2; ++side) {
          const int jx = ix + (axis == 0 ? (side == 0 ? -1 : 1) : 0);
          const int jy = iy + (axis == 1 ? (side == 0 ? -1 : 1) : 0);
          Arm arm;
          arm.length = g.h;
          const std::size_t jd = g.index(jx, jy);
          if (member(jx, jy)) {
            if (unknown_[jd] >= 0) {
              arm.neighbor = unknown_[jd];
            } else {
              arm.w_value = 0.0;  // box edge truncation
            }
          } else {
            const Point dir = {axis == 0 ? (side == 0 ? -1.0 : 1.0) : 0.0,
                               axis == 1 ? (side == 0 ? -1.0 : 1.0) : 0.0, 0};
            const auto s =
                boundary_intercept(*p_.obstacle, {x, y, 0}, dir, g.h);
            if (!s)
              throw NumericError(
                  "membership changed across a cell without a boundary "
                  "crossing");
            arm.length = std::max(*s, 1e-6 * g.h);
            arm.w_value = w_bc;
            st.cut = true;
          }
          (side == 0 ? st.lo : st.hi)[axis] = arm;
        }
      }
      if (st.cut) mask_[st.node] = kMaskBoundaryAdjacent;
    }
  }

  void build_matrix() {
    const Eigen::Index n = static_cast<Eigen::Index>(stencils_.size());
    if (n == 0) throw ConfigError("box problem has no unknowns");
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(n) * 5);
    g_ = Eigen::VectorXd::Zero(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const Stencil& st = stencils_[static_cast<std::size_t>(k)];
      double diag = 0;
      for (int axis = 0; axis < 2; ++axis) {
        const Arm& lo = st.lo[axis];
        const Arm& hi = st.hi[axis];
        const double pre = 2.0 / (lo.length + hi.length);
        for (const Arm* arm : {&lo, &hi}) {
          const double c = pre / arm->length;
          diag -= c;
          if (arm->neighbor >= 0) {
            trips.emplace_back(k, arm->neighbor, c);
          } else {
            g_[k] += c * arm->w_value;
          }
        }
      }
      trips.emplace_back(k, k, diag);
    }
    A_.resize(n, n);
    A_.setFromTriplets(trips.begin(), trips.end());
    A_.makeCompressed();
  }

  void build_initial() {
    const auto& g = p_.grid;
    u_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(stencils_.size()));
    if (p_.initial_set) {
      for (std::size_t k = 0; k < stencils_.size(); ++k) {
        const Stencil& st = stencils_[k];
        const int ix = static_cast<int>(st.node % static_cast<std::size_t>(g.nx));
        const int iy = static_cast<int>(st.node / static_cast<std::size_t>(g.nx));
        const auto [x, y] = g.pos(ix, iy);
        u_[static_cast<Eigen::Index>(k)] = indicator_fraction(
            *p_.initial_set, x - 0.5 * g.h, x + 0.5 * g.h, y - 0.5 * g.h,
            y + 0.5 * g.h);
      }
    }
    bound_lo_ = std::min(u_.minCoeff(), 0.0);
    bound_hi_ = std::max(u_.maxCoeff(), 0.0);
    if (p_.obstacle) {
      bound_lo_ = std::min(bound_lo_, p_.boundary_value);
      bound_hi_ = std::max(bound_hi_, p_.boundary_value);
    }
  }

  void check_bounds(SchemeMeta& meta) {
    if (!opt_.check_maximum_principle || warned_) return;
    const double range = std::max(bound_hi_ - bound_lo_, 1e-30);
    const double lo = bound_lo_ - 1e-9 * range, hi = bound_hi_ + 1e-9 * range;
    for (Eigen::Index i = 0; i < u_.size(); ++i) {
      if (u_[i] < lo || u_[i] > hi) {
        std::ostringstream os;
        os << "solution left the initial/boundary range [" << bound_lo_ << ", "
           << bound_hi_ << "] (value " << u_[i] << ")";
        meta.warnings.push_back(os.str());
        warned_ = true;
        return;
      }
    }
  }

  const CartesianProblem& p_;
  const Nonlinearity& nl_;
  const SolverOptions& opt_;
  std::vector<Stencil> stencils_;
  std::vector<int> unknown_;
  std::vector<std::uint8_t> mask_;
  Eigen::SparseMatrix<double> A_;
  Eigen::VectorXd g_;
  Eigen::VectorXd u_;
  double bound_lo_ = 0, bound_hi_ = 0;
  bool warned_ = false;
};

}  // namespace

FieldSeries solve_cartesian(const CartesianProblem& problem,
                            const Nonlinearity& nl,
                            const SolverOptions& options,
                            const std::vector<double>& snapshot_times) {
  validate_invariants(nl);
  if (options.representation != Representation::primal)
    throw UnsupportedError("the box solver carries the density directly");
  CartesianStepper stepper(problem, nl, options);
  auto grid = std::make_shared<Grid>(Grid{problem.grid});

  FieldSeries series;
  series.nonlinearity_name = nl.name;
  series.linear = nl.delta1 == nl.delta2;
  series.meta.representation = options.representation;
  series.meta.policy = options.stepping.policy;
  detail::time_loop(
      options, 0.0, snapshot_times, series.meta,
      [&](double t_new, double dt) {
        return stepper.step(t_new, dt, series.meta);
      },
      [&](double t) { series.snapshots.push_back({t, stepper.field(grid)}); });
  return series;
}

}  // namespace difflab
