#include "drsd/controller.hpp"

#include <algorithm>
#include <cmath>

#include "drsd/errors.hpp"
#include "drsd/expression.hpp"
#include "drsd/simloop.hpp"

namespace drsd {

ControlLaw::ControlLaw(std::string name, std::size_t n, std::size_t m, Fn fn)
    : name_(std::move(name)), n_(n), m_(m), fn_(std::move(fn)) {
  if (n_ == 0 || m_ == 0) throw DomainError("control law dimensions must be positive");
  if (!fn_) throw DomainError("control law needs a function");
}

void ControlLaw::require_zero_at_zero(double T, double h) const {
  const Vec u0 = fn_(Vec::Zero(static_cast<Eigen::Index>(n_)), T, h);
  if (static_cast<std::size_t>(u0.size()) != m_) {
    throw DomainError("control law '" + name_ + "' returns wrong dimension");
  }
  if (u0.cwiseAbs().maxCoeff() > 1e-12) {
    throw DomainError("control law '" + name_ + "' violates u(0) = 0");
  }
}

ControlLaw example_law(double c1, double c2, double cross_gain) {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw DomainError("example law needs c1, c2 > 0");
  auto fn = [c1, c2, cross_gain](const Vec& x, double T, double) {
    const double x1s = x[0] * x[0];
    Vec u(1);
    u[0] = cross_gain * x1s / (1.0 + x1s) - c1 * x[1] - T * c2 * x[1] * x1s;
    return u;
  };
  return ControlLaw("paper-example", 2, 1, fn);
}

ControlLaw expression_law(const std::string& name, std::size_t n,
                          const std::vector<std::string>& components,
                          const std::map<std::string, double>& params) {
  if (components.empty()) throw ConfigError("law '" + name + "' has no components");
  std::vector<std::string> vars;
  for (std::size_t i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
  vars.emplace_back("T");
  vars.emplace_back("h");
  std::vector<Expression> exprs;
  for (const auto& c : components) exprs.push_back(Expression::parse(c, vars, params));
  const std::size_t m = components.size();
  auto fn = [exprs, n, m](const Vec& x, double T, double h) {
    std::vector<double> args(n + 2);
    for (std::size_t i = 0; i < n; ++i) args[i] = x[static_cast<Eigen::Index>(i)];
    args[n] = T;
    args[n + 1] = h;
    Vec u(static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i) u[static_cast<Eigen::Index>(i)] = exprs[i](args);
    return u;
  };
  return ControlLaw(name, n, m, fn);
}

// ---------------------------------------------------------------------------

DualRateController::DualRateController(ControlLaw law, std::size_t ell,
                                       ApproxModelFamily estimator, double T)
    : law_(std::move(law)),
      ell_(ell),
      estimator_(std::move(estimator)),
      T_(T),
      zero_w_(DisturbanceSignal::zero(estimator_.plant().disturbance_dim())),
      xc_(Vec::Zero(static_cast<Eigen::Index>(law_.state_dim()))),
      u_prev_(Vec::Zero(static_cast<Eigen::Index>(law_.input_dim()))) {
  if (ell_ == 0) throw DomainError("rate ratio ell must be positive");
  if (!(T_ > 0.0)) throw DomainError("controller needs T > 0");
  if (estimator_.h() > T_ * (1.0 + 1e-12)) throw DomainError("estimator needs h <= T");
  law_.require_zero_at_zero(T_, estimator_.h());
}

Vec DualRateController::update(const std::optional<Vec>& measurement) {
  const bool sample_instant = expects_measurement();
  if (sample_instant && !measurement) {
    throw ProtocolError("measurement missing at sample instant k = " + std::to_string(k_));
  }
  if (!sample_instant && measurement) {
    throw ProtocolError("measurement supplied between samples at k = " + std::to_string(k_));
  }
  if (sample_instant) {
    xc_ = *measurement;
    // Guard for the first instant; u_prev is always overwritten below.
    if (k_ == 0) u_prev_ = law_(xc_, T_, estimator_.h());
  } else {
    xc_ = estimator_.step(xc_, u_prev_, zero_w_, T_);
  }
  Vec u = law_(xc_, T_, estimator_.h());
  u_prev_ = u;
  ++k_;
  return u;
}

// ---------------------------------------------------------------------------

double lipschitz_estimate(const ControlLaw& law, double dx, double T, double h,
                          std::size_t samples, std::size_t seed) {
  if (samples < 2) throw DomainError("lipschitz_estimate needs samples >= 2");
  if (!(dx > 0.0)) throw DomainError("lipschitz_estimate needs dx > 0");
  const std::size_t n = law.state_dim();
  const auto in = static_cast<Eigen::Index>(n);
  double best = 0.0;

  for (std::size_t i = 0; i < samples; ++i) {
    const auto pt = halton_point(seed + i + 1, 2 * n);
    Vec a(in), b(in);
    for (std::size_t d = 0; d < n; ++d) {
      a[static_cast<Eigen::Index>(d)] = 2 * pt[d] - 1;
      b[static_cast<Eigen::Index>(d)] = 2 * pt[n + d] - 1;
    }
    a = dx * cube_to_ball(a);
    b = dx * cube_to_ball(b);
    const double dist = (b - a).norm();
    if (dist < 1e-12) continue;
    best = std::max(best, (law(b, T, h) - law(a, T, h)).norm() / dist);
  }

  const double delta = 1e-6 * std::max(dx, 1.0);
  const double anchor_radius = std::max(dx - delta, 0.0);
  for (const Vec& anchor : state_grid(n, anchor_radius, 100, seed)) {
    for (std::size_t d = 0; d < n; ++d) {
      Vec e = Vec::Zero(in);
      e[static_cast<Eigen::Index>(d)] = delta;
      const double r = (law(anchor + e, T, h) - law(anchor - e, T, h)).norm() / (2.0 * delta);
      best = std::max(best, r);
    }
  }
  return best;
}

EstimatorErrorReport estimator_error_trace(const SimulationTrace& trace, double eps, double L) {
  if (!trace.has_estimates || trace.xc.size() != trace.x.size()) {
    throw ProtocolError("trace carries no estimator states");
  }
  EstimatorErrorReport rep;
  const double T = trace.T;
  const auto ell = static_cast<long long>(trace.ell);
  const auto abs_w = ComparisonFunction::identity();
  for (std::size_t k = 0; k < trace.x.size(); ++k) {
    EstimatorErrorPoint p;
    p.k = k;
    p.actual = (trace.x[k] - trace.xc[k]).norm();
    double sum = 0.0;
    for (long long i = 0; i <= ell - 2; ++i) {
      const long long lo = static_cast<long long>(k) - i - 1;
      if (lo < 0) break;
      const double seg = trace.disturbance.gamma_integral(abs_w, static_cast<double>(lo) * T,
                                                          static_cast<double>(lo + 1) * T);
      sum += std::exp(L * static_cast<double>(i + 1) * T) * seg;
    }
    p.bound = T * eps + L * sum;
    p.violated = p.actual > p.bound;
    if (p.violated) ++rep.violations;
    rep.max_actual = std::max(rep.max_actual, p.actual);
    rep.points.push_back(p);
  }
  return rep;
}

}  // namespace drsd
