#include "drsd/plant.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "drsd/errors.hpp"
#include "drsd/expression.hpp"
#include "drsd/parallel.hpp"

namespace drsd {

// ---------------------------------------------------------------------------
// PlantModel

PlantModel::PlantModel(std::string name, std::size_t n, std::size_t m, std::size_t p,
                       VectorField f, double lipschitz_hint, double compact_radius)
    : name_(std::move(name)),
      n_(n),
      m_(m),
      p_(p),
      f_(std::move(f)),
      lipschitz_hint_(lipschitz_hint),
      compact_radius_(compact_radius) {
  if (n_ == 0 || m_ == 0 || p_ == 0) throw DomainError("plant dimensions must be positive");
  if (!(lipschitz_hint_ > 0.0)) throw DomainError("plant lipschitz_hint must be positive");
  if (!(compact_radius_ > 0.0)) throw DomainError("plant compact_radius must be positive");
  const auto in = static_cast<Eigen::Index>(n_);
  const auto im = static_cast<Eigen::Index>(m_);
  const auto ip = static_cast<Eigen::Index>(p_);

  const Vec f0 = f_(Vec::Zero(in), Vec::Zero(im), Vec::Zero(ip));
  if (f0.size() != in) throw DomainError("plant '" + name_ + "' returns wrong dimension");
  if (f0.cwiseAbs().maxCoeff() > 1e-12) {
    throw DomainError("plant '" + name_ + "' violates f(0,0,0) = 0");
  }
  constexpr std::size_t kProbes = 256;
  for (std::size_t i = 0; i < kProbes; ++i) {
    const auto pt = halton_point(i + 1, n_ + m_ + p_);
    Vec x(in), u(im), w(ip);
    for (std::size_t d = 0; d < n_; ++d) x[static_cast<Eigen::Index>(d)] = 2 * pt[d] - 1;
    for (std::size_t d = 0; d < m_; ++d) u[static_cast<Eigen::Index>(d)] = 2 * pt[n_ + d] - 1;
    for (std::size_t d = 0; d < p_; ++d) {
      w[static_cast<Eigen::Index>(d)] = 2 * pt[n_ + m_ + d] - 1;
    }
    x = compact_radius_ * cube_to_ball(x);
    u = compact_radius_ * cube_to_ball(u);
    w = compact_radius_ * cube_to_ball(w);
    if (!f_(x, u, w).allFinite()) {
      throw DomainError("plant '" + name_ + "' is not finite on its compact set");
    }
  }
}

PlantModel example_plant() {
  auto f = [](const Vec& x, const Vec& u, const Vec& w) {
    Vec dx(2);
    dx[0] = -x[0] / (1.0 + x[0] * x[0]) + x[0] * x[1];
    dx[1] = u[0] + w[0];
    return dx;
  };
  // |df/dx| <= |x| + 1, so 11 covers the radius-10 ball.
  return PlantModel("paper-example", 2, 1, 1, f, 11.0, 10.0);
}

PlantModel expression_plant(const std::string& name, const std::vector<std::string>& rhs,
                            std::size_t m, std::size_t p,
                            const std::map<std::string, double>& params, double lipschitz_hint,
                            double compact_radius) {
  const std::size_t n = rhs.size();
  if (n == 0) throw ConfigError("plant '" + name + "' has no state equations");
  std::vector<std::string> vars;
  for (std::size_t i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
  for (std::size_t i = 1; i <= m; ++i) vars.push_back("u" + std::to_string(i));
  for (std::size_t i = 1; i <= p; ++i) vars.push_back("w" + std::to_string(i));
  std::vector<Expression> exprs;
  exprs.reserve(n);
  for (const auto& text : rhs) exprs.push_back(Expression::parse(text, vars, params));
  auto f = [exprs, n, m, p](const Vec& x, const Vec& u, const Vec& w) {
    std::vector<double> args(n + m + p);
    for (std::size_t i = 0; i < n; ++i) args[i] = x[static_cast<Eigen::Index>(i)];
    for (std::size_t i = 0; i < m; ++i) args[n + i] = u[static_cast<Eigen::Index>(i)];
    for (std::size_t i = 0; i < p; ++i) args[n + m + i] = w[static_cast<Eigen::Index>(i)];
    Vec dx(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) dx[static_cast<Eigen::Index>(i)] = exprs[i](args);
    return dx;
  };
  return PlantModel(name, n, m, p, f, lipschitz_hint, compact_radius);
}

// ---------------------------------------------------------------------------
// ExactStepOracle

ExactStepOracle::ExactStepOracle(PlantModel plant, IntegratorOptions opts)
    : plant_(std::move(plant)), opts_(opts) {}

IntegrationResult ExactStepOracle::step_with_error(const Vec& x, const Vec& u,
                                                   const DisturbanceSignal& w_seg,
                                                   double T) const {
  if (!(T > 0.0)) throw DomainError("exact_step needs T > 0");
  if (!x.allFinite() || !u.allFinite()) throw DomainError("exact_step needs finite x and u");
  std::vector<double> knots{0.0};
  for (double b : w_seg.breakpoints(0.0, T)) knots.push_back(b);
  knots.push_back(T);

  IntegrationResult total;
  total.x = x;
  for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
    const double a = knots[s];
    const double b = knots[s + 1];
    const SignalPiece* piece = w_seg.piece_at(0.5 * (a + b));
    Rhs rhs;
    if (piece == nullptr) {
      rhs = [&, w = w_seg.tail()](double, const Vec& y) { return plant_(y, u, w); };
    } else if (piece->constant) {
      rhs = [&, w = *piece->constant](double, const Vec& y) { return plant_(y, u, w); };
    } else {
      rhs = [&, piece](double t, const Vec& y) { return plant_(y, u, piece->value(t)); };
    }
    try {
      auto r = integrate_dopri5(rhs, a, b, total.x, opts_);
      total.x = std::move(r.x);
      total.error_estimate += r.error_estimate;
      total.accepted += r.accepted;
      total.rejected += r.rejected;
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.what(), a + e.escape_time());
    }
  }
  return total;
}

// ---------------------------------------------------------------------------
// ApproxModelFamily

ApproxModelFamily::ApproxModelFamily(PlantModel plant, double h, DisturbanceHandling handling)
    : plant_(std::move(plant)),
      scheme_(ApproxScheme::EulerSubstep),
      handling_(handling),
      h_(h),
      name_(handling == DisturbanceHandling::SampledLeftEndpoint ? "euler"
                                                                 : "euler-segment-integral") {
  if (!(h_ > 0.0)) throw DomainError("approximate model needs h > 0");
}

ApproxModelFamily::ApproxModelFamily(PlantModel plant, double h, SubstepMap map,
                                     std::string map_name)
    : plant_(std::move(plant)),
      scheme_(ApproxScheme::CustomMap),
      handling_(DisturbanceHandling::ExactSegmentIntegral),
      h_(h),
      map_(std::move(map)),
      name_(std::move(map_name)) {
  if (!(h_ > 0.0)) throw DomainError("approximate model needs h > 0");
  if (!map_) throw DomainError("custom approximate model needs a substep map");
}

ApproxModelFamily ApproxModelFamily::with_h(double h) const {
  ApproxModelFamily copy = *this;
  if (!(h > 0.0)) throw DomainError("approximate model needs h > 0");
  copy.h_ = h;
  return copy;
}

std::size_t ApproxModelFamily::substeps(double T) const {
  const double ratio = T / h_;
  auto full = static_cast<std::size_t>(std::floor(ratio * (1.0 + 1e-12)));
  const double rem = T - static_cast<double>(full) * h_;
  if (rem > 1e-12 * T) ++full;
  return std::max<std::size_t>(full, 1);
}

Vec ApproxModelFamily::step(const Vec& x, const Vec& u, const DisturbanceSignal& w_seg,
                            double T) const {
  if (!(T > 0.0) || h_ > T * (1.0 + 1e-12)) {
    throw DomainError("approx_step needs 0 < h <= T");
  }
  const std::size_t count = substeps(T);
  Vec y = x;
  for (std::size_t i = 0; i < count; ++i) {
    const double t0 = static_cast<double>(i) * h_;
    const double dt = (i + 1 == count) ? T - t0 : h_;
    if (scheme_ == ApproxScheme::CustomMap) {
      y = map_(y, u, w_seg, t0, dt);
    } else if (handling_ == DisturbanceHandling::SampledLeftEndpoint) {
      y = y + dt * plant_(y, u, w_seg(t0));
    } else {
      const Vec wbar = w_seg.integral(t0, t0 + dt) / dt;
      y = y + dt * plant_(y, u, wbar);
    }
    if (!y.allFinite()) {
      throw DivergenceError("approximate model produced a non-finite state", t0 + dt);
    }
  }
  return y;
}

ApproxModelFamily example_approx_model(double h) {
  auto map = [](const Vec& x, const Vec& u, const DisturbanceSignal& w_seg, double t0,
                double dt) {
    Vec y(2);
    y[0] = x[0] + dt * (-x[0] / (1.0 + x[0] * x[0]) + x[0] * x[1]);
    y[1] = x[1] + dt * u[0] + w_seg.integral(t0, t0 + dt)[0];
    return y;
  };
  return ApproxModelFamily(example_plant(), h, map, "paper-example");
}

ApproxModelFamily oracle_as_family(const ExactStepOracle& oracle, double h) {
  auto map = [oracle](const Vec& x, const Vec& u, const DisturbanceSignal& w_seg, double t0,
                      double dt) { return oracle.step(x, u, w_seg.shifted(t0), dt); };
  return ApproxModelFamily(oracle.plant(), h, map, "exact-oracle");
}

// ---------------------------------------------------------------------------
// Consistency profile

std::vector<ConsistencyPoint> consistency_profile(const ExactStepOracle& oracle,
                                                  const ApproxModelFamily& family,
                                                  const ConsistencyBounds& bounds, double T,
                                                  const std::vector<double>& h_list,
                                                  std::size_t samples, std::size_t seed,
                                                  std::size_t jobs) {
  if (samples < 1) throw DomainError("consistency_profile needs samples >= 1");
  if (h_list.empty()) throw DomainError("consistency_profile needs at least one h");
  if (!std::is_sorted(h_list.begin(), h_list.end())) {
    throw DomainError("consistency_profile needs h_list sorted ascending");
  }
  for (double h : h_list) {
    if (!(h > 0.0) || h > T * (1.0 + 1e-12)) {
      throw DomainError("consistency_profile needs 0 < h <= T");
    }
  }
  const PlantModel& plant = oracle.plant();
  const std::size_t n = plant.state_dim(), m = plant.input_dim(), p = plant.disturbance_dim();
  const auto in = static_cast<Eigen::Index>(n);
  const auto im = static_cast<Eigen::Index>(m);
  const auto ip = static_cast<Eigen::Index>(p);

  struct Sample {
    Vec x, u, w;
    int square = -1;  // index into `squares`, or -1 for constant w
  };
  std::vector<Sample> pts;
  // Axis extremes of x combined with zero and extreme u, w.
  for (std::size_t d = 0; d < n; ++d) {
    for (double sx : {1.0, -1.0}) {
      Vec x = Vec::Zero(in);
      x[static_cast<Eigen::Index>(d)] = sx * bounds.dx;
      for (int su : {0, 1, -1}) {
        for (int sw : {0, 1, -1}) {
          Vec u = Vec::Zero(im);
          Vec w = Vec::Zero(ip);
          u[0] = su * bounds.du;
          w[0] = sw * bounds.dw;
          pts.push_back({x, u, w});
        }
      }
    }
  }
  for (std::size_t i = 0; i < samples; ++i) {
    const auto pt = halton_point(seed + i + 1, n + m + p);
    Vec x(in), u(im), w(ip);
    for (std::size_t d = 0; d < n; ++d) x[static_cast<Eigen::Index>(d)] = 2 * pt[d] - 1;
    for (std::size_t d = 0; d < m; ++d) u[static_cast<Eigen::Index>(d)] = 2 * pt[n + d] - 1;
    for (std::size_t d = 0; d < p; ++d) {
      w[static_cast<Eigen::Index>(d)] = 2 * pt[n + m + d] - 1;
    }
    pts.push_back({bounds.dx * cube_to_ball(x), bounds.du * cube_to_ball(u),
                   bounds.dw * cube_to_ball(w)});
  }
  std::vector<DisturbanceSignal> squares;
  if (bounds.square_wave && p == 1 && bounds.dw >= 1.0) {
    for (double frac : kSquareWaveSwitches) {
      squares.push_back(example_square_wave().shifted(1.0 - frac * T));
    }
    const std::size_t base = pts.size() - samples;
    for (std::size_t i = 0; i < samples; ++i) {
      for (std::size_t j = 0; j < squares.size(); ++j) {
        Sample s = pts[base + i];
        s.square = static_cast<int>(j);
        pts.push_back(std::move(s));
      }
    }
  }

  // errors[i][j]: sample i, h_list[j]; negative marks oracle divergence.
  std::vector<std::vector<double>> errors(pts.size(), std::vector<double>(h_list.size(), -1.0));
  std::vector<ApproxModelFamily> families;
  families.reserve(h_list.size());
  for (double h : h_list) families.push_back(family.with_h(h));

  parallel_for(pts.size(), jobs, [&](std::size_t i) {
    const auto& s = pts[i];
    const DisturbanceSignal w =
        s.square >= 0 ? squares[static_cast<std::size_t>(s.square)] : DisturbanceSignal::constant(s.w);
    Vec exact;
    try {
      exact = oracle.step(s.x, s.u, w, T);
    } catch (const DivergenceError&) {
      return;
    }
    for (std::size_t j = 0; j < h_list.size(); ++j) {
      try {
        errors[i][j] = (exact - families[j].step(s.x, s.u, w, T)).norm() / T;
      } catch (const DivergenceError&) {
        errors[i][j] = std::numeric_limits<double>::infinity();
      }
    }
  });

  std::vector<ConsistencyPoint> out;
  for (std::size_t j = 0; j < h_list.size(); ++j) {
    ConsistencyPoint cp;
    cp.h = h_list[j];
    double best = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const double e = errors[i][j];
      if (e < 0.0) {
        ++cp.diverged;
        continue;
      }
      ++cp.evaluated;
      if (e > best) {
        best = e;
        cp.worst_x = pts[i].x;
        cp.worst_u = pts[i].u;
        cp.worst_w = pts[i].w;
      }
    }
    cp.rho = std::max(best, 0.0);
    out.push_back(std::move(cp));
  }
  return out;
}

double loglog_slope(const std::vector<ConsistencyPoint>& profile) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t k = 0;
  for (const auto& p : profile) {
    if (!(p.rho > 0.0) || !std::isfinite(p.rho)) continue;
    const double lx = std::log(p.h), ly = std::log(p.rho);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++k;
  }
  if (k < 2) throw DomainError("loglog_slope needs two positive points");
  const double kk = static_cast<double>(k);
  return (kk * sxy - sx * sy) / (kk * sxx - sx * sx);
}

}  // namespace drsd
