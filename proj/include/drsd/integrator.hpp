#pragma once

#include <functional>
#include <limits>

#include "drsd/sampling.hpp"

namespace drsd {

struct IntegratorOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  /// Steps shorter than min_step_factor * max(1, |t|) count as step-size
  /// underflow.
  double min_step_factor = 1e-13;
  std::size_t max_steps = 1'000'000;
  /// |x| above this aborts the integration as an escape.
  double escape_norm = 1e12;

  IntegratorOptions halved() const {
    IntegratorOptions o = *this;
    o.abs_tol *= 0.5;
    o.rel_tol *= 0.5;
    return o;
  }
};

struct IntegrationResult {
  Vec x;
  /// Sum of accepted local error estimates (max-norm), a rough global bound.
  double error_estimate = 0.0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

using Rhs = std::function<Vec(double, const Vec&)>;

/// Dormand-Prince 5(4) with PI step-size control, from t0 to t1.
///
/// Throws DivergenceError (escape time measured from t0) on step-size
/// underflow, non-finite state, escape above `escape_norm`, or exhausting
/// `max_steps`. Deterministic for identical inputs.
IntegrationResult integrate_dopri5(const Rhs& rhs, double t0, double t1, Vec x,
                                   const IntegratorOptions& opts = {});

/// Classical fixed-step RK4 with `steps` equal steps. Used as an
/// independent reference in tests and as a cheap integrator elsewhere.
Vec integrate_rk4(const Rhs& rhs, double t0, double t1, Vec x, std::size_t steps);

}  // namespace drsd
