#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "difflab/geometry.hpp"
#include "difflab/grid.hpp"
#include "difflab/nonlinearity.hpp"

namespace difflab {

enum class TimeStepPolicy {
  geometric,     // dt grows by a fixed factor up to a cap
  proportional,  // dt = max(dt_min, rho * t), tracking the solution's own scale
};

struct TimeStepping {
  TimeStepPolicy policy = TimeStepPolicy::geometric;
  double dt_initial = 0;  // 0 picks min(1e-4, first snapshot / 20)
  double growth = 1.2;
  double dt_max = 1e-2;
  double rho = 0.005;
  double dt_min = 1e-9;
};

//! The unknown carried by the time stepper: the density itself, or its
//! logarithm. The log form follows the solution into ranges far below what
//! doubles can represent and is what every small-time limit is read from.
enum class Representation { primal, logarithmic };

struct SolverOptions {
  Representation representation = Representation::primal;
  TimeStepping stepping;
  double newton_tol = 1e-10;
  int max_newton_iter = 30;
  int max_halvings = 20;
  //! Log form only: the initial profile is the parabola
  //! log(set_value) - d^2 / (4 delta1 t) - offset planted at seed_time, with
  //! d the distance to the unit-value set. The offset keeps the start below
  //! the true solution; its memory decays with the seed time scale.
  double log_seed_time = 1e-9;
  double log_seed_offset = 50.0;
  bool check_maximum_principle = true;
};

struct SchemeMeta {
  Representation representation = Representation::primal;
  TimeStepPolicy policy = TimeStepPolicy::geometric;
  int steps = 0;
  int newton_iterations = 0;
  int dt_halvings = 0;
  double dt_final = 0;
  std::vector<std::string> warnings;
};

struct Snapshot {
  double time = 0;
  ScalarField field;
};

struct FieldSeries {
  std::vector<Snapshot> snapshots;
  SchemeMeta meta;
  std::string nonlinearity_name;
  bool linear = false;
};

enum class RadialEnd {
  pole,       // symmetry end: r = 0, or the far pole of the sphere
  dirichlet,  // fixed value
  far_field,  // truncation: frozen at the initial value for the primal form,
              // the seeding parabola evolved to the current time for the log
              // form
};

//! Initial data as a pointwise function plus the radii where it jumps, so
//! cell averages can be integrated exactly piece by piece.
struct RadialInitial {
  std::function<double(double)> pointwise;
  std::vector<double> jumps;
};

//! Rotationally symmetric problem in the radial coordinate. The volume
//! weight comes from grid.metric and grid.dim; dim = 1 with a Dirichlet left
//! end is the half-line problem.
struct RadialProblem {
  RadialGrid grid;
  RadialEnd left = RadialEnd::pole;
  double left_value = 0;
  RadialEnd right = RadialEnd::dirichlet;
  double right_value = 0;
  RadialInitial initial;
  //! Distance from radius r to the set where u starts (or is held) at
  //! set_value: zero on the set, positive elsewhere. Required by the log
  //! form for seeding and far-field tracking.
  std::function<double(double)> set_distance;
  double set_value = 1.0;
};

FieldSeries solve_radial(const RadialProblem& problem, const Nonlinearity& nl,
                         const SolverOptions& options,
                         const std::vector<double>& snapshot_times);

//! Two-dimensional problem on a uniform box grid. With an obstacle the value
//! boundary_value is imposed on the obstacle boundary through cut-cell arms
//! and the solution lives in Omega; without one the whole box evolves from
//! the indicator of initial_set averaged exactly over cells. Box edges hold
//! the value zero either way.
struct CartesianProblem {
  CartesianGrid2D grid;
  std::optional<DomainSpec> obstacle;
  double boundary_value = 1.0;
  std::optional<DomainSpec> initial_set;
};

FieldSeries solve_cartesian(const CartesianProblem& problem,
                            const Nonlinearity& nl,
                            const SolverOptions& options,
                            const std::vector<double>& snapshot_times);

//! The flux phi(s) = diffusivity * s packaged as a Nonlinearity, closed-form
//! transform included.
Nonlinearity make_scaled_linear(double diffusivity);

//! Constant-coefficient heat flow w_t = diffusivity * lap w with the given
//! value on every Dirichlet end and zero start. The problem's Dirichlet and
//! far-field seed values are overridden by boundary_value.
FieldSeries solve_linear_heat(const RadialProblem& problem, double diffusivity,
                              double boundary_value,
                              const SolverOptions& options,
                              const std::vector<double>& snapshot_times);
FieldSeries solve_linear_heat(const CartesianProblem& problem,
                              double diffusivity, double boundary_value,
                              const SolverOptions& options,
                              const std::vector<double>& snapshot_times);

struct SandwichReport {
  std::size_t comparisons = 0;
  std::size_t violations = 0;
  double worst_gap = 0;  // most negative margin encountered
  bool pass() const { return violations == 0; }
};

//! Nodewise ordering check lower <= mid <= upper across matching snapshots
//! of three series on the same grid. A node counts as a violation when the
//! ordering fails by more than tol.
SandwichReport sandwich_check(const FieldSeries& lower, const FieldSeries& mid,
                              const FieldSeries& upper, double tol);

//! The bracket of the transformed solution: verifies w1 <= phi(u) <= w2
//! nodewise, where u is the nonlinear run and w1, w2 the constant-coefficient
//! runs at the two derivative bounds.
SandwichReport sandwich_check(const FieldSeries& u, const Nonlinearity& nl,
                              const FieldSeries& w1, const FieldSeries& w2,
                              double tol);

namespace detail {

//! Snapshot landing: dt from the policy, clipped so the step lands exactly
//! on the next snapshot time when it would cross it.
double next_dt(const TimeStepping& st, double dt_prev, double t,
               double t_next_snapshot, bool first_step);

//! Cell averages of a piecewise-smooth radial function against the metric
//! volume weight.
std::vector<double> radial_cell_averages(const RadialGrid& grid,
                                         const RadialInitial& initial);

//! Exact area of the overlap of a disk with an axis-aligned box.
double circle_box_overlap(double cx, double cy, double r, double x1, double x2,
                          double y1, double y2);

}  // namespace detail

}  // namespace difflab
