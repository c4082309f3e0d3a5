#pragma once

#include <algorithm>
#include <sstream>
#include <vector>

#include "difflab/pde_solver.hpp"

namespace difflab::detail {

//! Shared bookkeeping of one backward Euler run: policy stepping, snapshot
//! landing, halving on failed steps. step_fn(t_new, dt) returns false when
//! the nonlinear solve did not converge; record_fn(t) is called exactly at
//! every snapshot time in ascending order.
template <typename StepFn, typename RecordFn>
void time_loop(const SolverOptions& options, double t_start,
               const std::vector<double>& snapshot_times, SchemeMeta& meta,
               StepFn&& step_fn, RecordFn&& record_fn) {
  std::vector<double> targets = snapshot_times;
  std::sort(targets.begin(), targets.end());
  if (targets.empty()) throw ConfigError("no snapshot times given");
  if (!(targets.front() > t_start)) {
    std::ostringstream os;
    os << "first snapshot time " << targets.front()
       << " is not after the start time " << t_start;
    throw ConfigError(os.str());
  }
  double t = t_start;
  double dt_prev = 0;
  bool first = true;
  for (const double target : targets) {
    while (t < target - 1e-13 * std::max(1.0, target)) {
      double dt = detail::next_dt(options.stepping, dt_prev, t, target, first);
      bool ok = false;
      for (int h = 0; h <= options.max_halvings; ++h) {
        if (step_fn(t + dt, dt)) {
          ok = true;
          break;
        }
        ++meta.dt_halvings;
        dt *= 0.5;
      }
      if (!ok) {
        std::ostringstream os;
        os << "time step at t = " << t << " failed to converge after "
           << options.max_halvings << " halvings";
        throw NumericError(os.str());
      }
      t += dt;
      dt_prev = dt;
      first = false;
      ++meta.steps;
      meta.dt_final = dt;
    }
    record_fn(target);
  }
}

}  // namespace difflab::detail
