#include "drsd/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "drsd/errors.hpp"

namespace drsd {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// Error coefficients: b - b_hat.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

[[noreturn]] void diverge(const std::string& why, double elapsed) {
  std::ostringstream os;
  os << "integration diverged (" << why << ") after " << elapsed << " s";
  throw DivergenceError(os.str(), elapsed);
}

}  // namespace

IntegrationResult integrate_dopri5(const Rhs& rhs, double t0, double t1, Vec x,
                                   const IntegratorOptions& opts) {
  IntegrationResult res;
  if (!x.allFinite()) diverge("non-finite initial state", 0.0);
  const double span = t1 - t0;
  if (span <= 0.0) {
    res.x = std::move(x);
    return res;
  }

  Vec k1 = rhs(t0, x);
  if (!k1.allFinite()) diverge("non-finite vector field", 0.0);

  // Initial step guess (Hairer, Norsett & Wanner, II.4).
  auto scale = [&](const Vec& y) {
    return (opts.abs_tol + opts.rel_tol * y.cwiseAbs().array()).matrix();
  };
  const auto n = static_cast<double>(x.size());
  double h;
  {
    const Vec sc = scale(x);
    const double d0 = std::sqrt((x.array() / sc.array()).square().sum() / n);
    const double d1 = std::sqrt((k1.array() / sc.array()).square().sum() / n);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    const Vec x1 = x + h0 * k1;
    const Vec k2 = rhs(t0 + h0, x1);
    const double d2 = std::sqrt(((k2 - k1).array() / sc.array()).square().sum() / n) / h0;
    const double m = std::max(d1, d2);
    const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 1.0 / 5.0);
    h = std::min({100.0 * h0, h1, span, opts.max_step});
  }

  double t = t0;
  double err_prev = 1e-4;
  bool last_rejected = false;
  std::size_t steps = 0;
  while (t < t1) {
    if (++steps > opts.max_steps) diverge("step budget exhausted", t - t0);
    const double remaining = t1 - t;
    bool final_step = false;
    if (h >= remaining) {
      h = remaining;
      final_step = true;
    }
    if (!final_step && h < opts.min_step_factor * std::max(1.0, std::abs(t))) {
      diverge("step-size underflow", t - t0);
    }

    const Vec k2 = rhs(t + c2 * h, x + h * (a21 * k1));
    const Vec k3 = rhs(t + c3 * h, x + h * (a31 * k1 + a32 * k2));
    const Vec k4 = rhs(t + c4 * h, x + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 = rhs(t + c5 * h, x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 =
        rhs(t + h, x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Vec xn = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = rhs(t + h, xn);
    const Vec errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    const bool finite = xn.allFinite() && errv.allFinite();
    if (finite) {
      const Vec sc = (opts.abs_tol +
                      opts.rel_tol * x.cwiseAbs().cwiseMax(xn.cwiseAbs()).array())
                         .matrix();
      err = std::sqrt((errv.array() / sc.array()).square().sum() / n);
    } else {
      err = std::numeric_limits<double>::infinity();
    }

    if (err <= 1.0) {
      t = final_step ? t1 : t + h;
      x = std::move(xn);
      k1 = k7;
      res.error_estimate += errv.cwiseAbs().maxCoeff();
      ++res.accepted;
      if (x.norm() > opts.escape_norm) diverge("escape", t - t0);
      // PI controller (beta = 0.04).
      double fac = 0.9 * std::pow(err, -0.2 + 0.08) * std::pow(err_prev, 0.04);
      if (err == 0.0) fac = 10.0;
      fac = std::clamp(fac, 0.2, 10.0);
      if (last_rejected) fac = std::min(fac, 1.0);
      h = std::min(h * fac, opts.max_step);
      err_prev = std::max(err, 1e-4);
      last_rejected = false;
    } else {
      ++res.rejected;
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.2;
      h *= fac;
      last_rejected = true;
    }
  }
  res.x = std::move(x);
  return res;
}

Vec integrate_rk4(const Rhs& rhs, double t0, double t1, Vec x, std::size_t steps) {
  if (steps == 0) throw DomainError("integrate_rk4 needs at least one step");
  const double h = (t1 - t0) / static_cast<double>(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = t0 + h * static_cast<double>(i);
    const Vec k1 = rhs(t, x);
    const Vec k2 = rhs(t + 0.5 * h, x + 0.5 * h * k1);
    const Vec k3 = rhs(t + 0.5 * h, x + 0.5 * h * k2);
    const Vec k4 = rhs(t + h, x + h * k3);
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return x;
}

}  // namespace drsd
