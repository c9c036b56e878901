#include "drsd/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/tools/minima.hpp>
#include <json.hpp>

#include "drsd/errors.hpp"
#include "drsd/parallel.hpp"

namespace drsd {

namespace {

void require_class(const ComparisonFunction& f, ComparisonClass claim, const std::string& role,
                   const GridSpec& grid) {
  const auto rep = validate_comparison_function(f, claim, grid);
  if (!rep.passed()) {
    throw CertificateError(role + " '" + f.name() + "' fails class " + to_string(claim) + ": " +
                           rep.detail);
  }
}

// Folds residuals into the report in index order so ties resolve to the
// lowest index regardless of how they were computed.
void summarize(CheckReport& rep, const std::vector<Vec>* points) {
  rep.evaluated = 0;
  rep.violations = 0;
  rep.worst_residual = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rep.residuals.size(); ++i) {
    const double r = rep.residuals[i];
    if (std::isnan(r)) continue;
    ++rep.evaluated;
    if (r > kResidualTolerance) ++rep.violations;
    if (r > rep.worst_residual) {
      rep.worst_residual = r;
      rep.worst_index = i;
    }
  }
  if (rep.worst_index && points && *rep.worst_index < points->size()) {
    rep.worst_point = (*points)[*rep.worst_index];
  }
  rep.passed = rep.violations == 0 && rep.failures == 0 && rep.evaluated > 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// Certificates

void LyapunovCertificate::validate() const {
  if (!V) throw CertificateError("certificate has no V");
  const double v0 = V(Vec::Zero(static_cast<Eigen::Index>(state_dim)));
  if (std::abs(v0) > 1e-12) throw CertificateError("certificate violates V(0) = 0");
  if (!(delta1 >= 0.0)) throw CertificateError("certificate needs delta1 >= 0");
  if (!(Delta1 > 0.0) || !(Delta2 > 0.0) || !(Delta3 > 0.0) || !(M > 0.0)) {
    throw CertificateError("certificate needs positive Delta1, Delta2, Delta3, M");
  }
  if (!(T > 0.0) || !(h > 0.0) || h > T * (1.0 + 1e-12)) {
    throw CertificateError("certificate needs 0 < h <= T");
  }
  const GridSpec grid{Delta1, 401, 10.0};
  require_class(alpha_lo, ComparisonClass::KInf, "alpha_lo", grid);
  require_class(alpha_hi, ComparisonClass::KInf, "alpha_hi", grid);
  require_class(alpha, integral_flavor ? ComparisonClass::KInf : ComparisonClass::PD, "alpha",
                grid);
  require_class(gamma_hat, ComparisonClass::K, "gamma_hat", GridSpec{Delta2, 401, 10.0});
  for (std::size_t i = 0; i < grid.points; ++i) {
    const double s = Delta1 * static_cast<double>(i) / static_cast<double>(grid.points - 1);
    if (alpha_lo(s) > alpha_hi(s) + 1e-12) {
      throw CertificateError("certificate has alpha_lo > alpha_hi at s = " + std::to_string(s));
    }
  }
}

ComparisonFunction radial_envelope(std::function<double(const Vec&)> terms, std::string name) {
  auto f = [terms](double s) {
    if (s == 0.0) return terms(Vec::Zero(2));
    auto at = [&](double th) {
      Vec x(2);
      x << s * std::cos(th), s * std::sin(th);
      return terms(x);
    };
    constexpr int kAngles = 720;
    const double step = 2.0 * std::numbers::pi / kAngles;
    int best_i = 0;
    double best = at(0.0);
    for (int i = 1; i < kAngles; ++i) {
      const double v = at(step * i);
      if (v < best) {
        best = v;
        best_i = i;
      }
    }
    const auto refined = boost::math::tools::brent_find_minima(
        at, step * (best_i - 1), step * (best_i + 1), 52);
    return std::min(best, refined.second);
  };
  return ComparisonFunction(ComparisonClass::PD, f, std::move(name));
}

ComparisonFunction example_decrease_rate(double T, double c1, double c2, double scale) {
  auto terms = [T, c1, c2, scale](const Vec& x) {
    const double p = x[0] * x[0];
    const double q = x[1] * x[1];
    return scale * (2.0 * p / ((1.0 + p) * (1.0 + p)) + (c1 - 0.5) * q + T * c2 * p * q);
  };
  std::ostringstream name;
  name << scale << "*min_{|x|=s}[2x1^2/(1+x1^2)^2+" << (c1 - 0.5) << "x2^2+" << T * c2
       << "x1^2x2^2]";
  return radial_envelope(terms, name.str());
}

LyapunovCertificate example_certificate(double T, double delta1, double Delta1, double c1,
                                        double c2, double alpha_scale) {
  LyapunovCertificate c{
      [](const Vec& x) { return std::log1p(x[0] * x[0]) + 0.5 * x[1] * x[1]; },
      ComparisonFunction(
          ComparisonClass::KInf,
          [](double s) { return std::min(std::log1p(0.5 * s * s), 0.25 * s * s); },
          "min(ln(1+s^2/2), s^2/4)"),
      ComparisonFunction(
          ComparisonClass::KInf, [](double s) { return std::log1p(s * s) + 0.5 * s * s; },
          "ln(1+s^2)+s^2/2"),
      example_decrease_rate(T, c1, c2, alpha_scale),
      ComparisonFunction::identity(),
  };
  c.delta1 = delta1;
  c.Delta1 = Delta1;
  c.Delta2 = 1.0;
  c.Delta3 = T;
  c.M = 1.0 + Delta1;  // |dV/dx1| <= 1, |dV/dx2| <= Delta1
  c.T = T;
  c.h = T;
  c.state_dim = 2;
  return c;
}

// ---------------------------------------------------------------------------
// Reports

std::vector<std::pair<std::string, std::size_t>> CheckReport::histogram() const {
  static const std::vector<std::pair<std::string, double>> edges = {
      {"<=-1", -1.0},       {"(-1,-1e-1]", -1e-1}, {"(-1e-1,-1e-2]", -1e-2},
      {"(-1e-2,-1e-3]", -1e-3}, {"(-1e-3,-1e-6]", -1e-6}, {"(-1e-6,-1e-9]", -1e-9},
      {"(-1e-9,1e-9]", 1e-9},  {"(1e-9,1e-6]", 1e-6},
  };
  std::vector<std::pair<std::string, std::size_t>> out;
  for (const auto& [label, _] : edges) out.emplace_back(label, 0);
  out.emplace_back(">1e-6", 0);
  for (double r : residuals) {
    if (std::isnan(r)) continue;
    std::size_t b = 0;
    while (b < edges.size() && r > edges[b].second) ++b;
    ++out[b].second;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lyapunov conditions

CheckReport check_sandwich(const LyapunovCertificate& cert, const std::vector<Vec>& grid) {
  CheckReport rep;
  rep.name = "sandwich";
  rep.residuals.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec& x = grid[i];
    if (x.norm() > cert.Delta1 * (1.0 + 1e-12)) {
      throw DomainError("check_sandwich: grid point outside the Delta1 ball");
    }
    const double s = x.norm();
    const double v = cert.V(x);
    const double margin = std::min(v - cert.alpha_lo(s), cert.alpha_hi(s) - v);
    rep.residuals[i] = -margin;
  }
  summarize(rep, &grid);
  return rep;
}

CheckReport check_decrease(const LyapunovCertificate& cert, const ClosedLoopMap& map,
                           const std::vector<DisturbanceSignal>& w_bank,
                           const std::vector<Vec>& grid, std::size_t jobs) {
  if (w_bank.empty()) throw DomainError("check_decrease needs a nonempty w bank");
  const double T = cert.T;
  std::vector<double> gamma_terms;
  for (const auto& w : w_bank) {
    if (l_infinity_norm(w, T) > cert.Delta2 * (1.0 + 1e-12)) {
      throw DomainError("check_decrease: w-bank signal exceeds Delta2");
    }
    const double g = w.gamma_integral(cert.gamma_hat, 0.0, T);
    if (g > cert.Delta3 * (1.0 + 1e-12)) {
      throw DomainError("check_decrease: w-bank signal exceeds Delta3");
    }
    gamma_terms.push_back(g);
  }
  for (const auto& x : grid) {
    if (x.norm() > cert.Delta1 * (1.0 + 1e-12)) {
      throw DomainError("check_decrease: grid point outside the Delta1 ball");
    }
  }

  const std::size_t nb = w_bank.size();
  CheckReport rep;
  rep.name = "decrease";
  rep.residuals.assign(grid.size() * nb, std::numeric_limits<double>::quiet_NaN());
  std::vector<char> failed(grid.size() * nb, 0);
  parallel_for(grid.size(), jobs, [&](std::size_t i) {
    const Vec& x = grid[i];
    const double vx = cert.V(x);
    const double a = cert.alpha(x.norm());
    for (std::size_t j = 0; j < nb; ++j) {
      try {
        const Vec next = map(x, w_bank[j]);
        const double rhs = T * (-a + gamma_terms[j] / T + cert.delta1);
        rep.residuals[i * nb + j] = cert.V(next) - vx - rhs;
      } catch (const DivergenceError&) {
        failed[i * nb + j] = 1;
      }
    }
  });
  rep.failures = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  summarize(rep, nullptr);
  if (rep.worst_index) {
    rep.worst_point = grid[*rep.worst_index / nb];
    rep.worst_signal = *rep.worst_index % nb;
  }
  return rep;
}

CheckReport check_v_lipschitz(const LyapunovCertificate& cert, std::size_t samples,
                              std::size_t seed) {
  if (samples < 2) throw DomainError("check_v_lipschitz needs samples >= 2");
  const std::size_t n = cert.state_dim;
  const auto in = static_cast<Eigen::Index>(n);
  CheckReport rep;
  rep.name = "v_lipschitz";
  double best = 0.0;
  Vec best_point = Vec::Zero(in);
  auto consider = [&](const Vec& a, const Vec& b) {
    const double d = (a - b).norm();
    if (d < 1e-12) return;
    const double r = std::abs(cert.V(a) - cert.V(b)) / d;
    rep.residuals.push_back(r - cert.M * (1.0 + 1e-6));
    if (r > best) {
      best = r;
      best_point = a;
    }
  };
  for (std::size_t i = 0; i < samples; ++i) {
    const auto pt = halton_point(seed + i + 1, 2 * n);
    Vec a(in), b(in);
    for (std::size_t d = 0; d < n; ++d) {
      a[static_cast<Eigen::Index>(d)] = 2 * pt[d] - 1;
      b[static_cast<Eigen::Index>(d)] = 2 * pt[n + d] - 1;
    }
    consider(cert.Delta1 * cube_to_ball(a), cert.Delta1 * cube_to_ball(b));
  }
  const double delta = 1e-6 * std::max(1.0, cert.Delta1);
  for (const Vec& anchor : state_grid(n, cert.Delta1 - delta, 100, seed)) {
    for (std::size_t d = 0; d < n; ++d) {
      Vec e = Vec::Zero(in);
      e[static_cast<Eigen::Index>(d)] = delta;
      consider(anchor + e, anchor - e);
    }
  }
  summarize(rep, nullptr);
  rep.worst_point = best_point;
  std::ostringstream os;
  os << "max sampled ratio " << best << " vs M = " << cert.M;
  rep.detail = os.str();
  return rep;
}

// ---------------------------------------------------------------------------
// Trajectory bounds

void TrajectoryBoundSpec::validate() const {
  const GridSpec grid{10.0, 401, 10.0};
  require_class(alpha, ComparisonClass::KInf, "alpha", grid);
  require_class(gamma, ComparisonClass::K, "gamma", grid);
  if (beta) require_class(*beta, ComparisonClass::KL, "beta", GridSpec{10.0, 101, 10.0});
  if (chi) require_class(*chi, ComparisonClass::KInf, "chi", grid);
  if (!(delta > 0.0)) throw CertificateError("trajectory bound needs delta > 0");
}

double trace_gamma_integral(const SimulationTrace& trace, const ComparisonFunction& gamma,
                            std::size_t k) {
  return trace.disturbance.gamma_integral(gamma, 0.0, trace.time(k));
}

namespace {

std::vector<double> cumulative_gamma(const SimulationTrace& trace,
                                     const ComparisonFunction& gamma) {
  std::vector<double> out(trace.x.size(), 0.0);
  for (std::size_t k = 1; k < trace.x.size(); ++k) {
    out[k] = out[k - 1] +
             trace.disturbance.gamma_integral(gamma, trace.time(k - 1), trace.time(k));
  }
  return out;
}

void fail_if_diverged(CheckReport& rep, const SimulationTrace& trace) {
  if (!trace.completed()) {
    rep.passed = false;
    rep.failures = 1;
    rep.detail = "trajectory diverged at k = " + std::to_string(trace.diverged_at.value_or(0)) +
                 " (" + trace.divergence_reason + ")";
  }
}

}  // namespace

CheckReport check_spiiss_trajectory(const SimulationTrace& trace,
                                    const TrajectoryBoundSpec& spec) {
  if (!spec.beta) throw DomainError("check_spiiss_trajectory needs a beta candidate");
  CheckReport rep;
  rep.name = "spiiss_trajectory";
  if (trace.x.empty()) throw DomainError("check_spiiss_trajectory: empty trace");
  const double r0 = trace.x.front().norm();
  const auto gi = cumulative_gamma(trace, spec.gamma);
  rep.residuals.resize(trace.x.size());
  for (std::size_t k = 0; k < trace.x.size(); ++k) {
    const double lhs = spec.alpha(trace.x[k].norm());
    const double rhs = (*spec.beta)(r0, trace.time(k)) + gi[k] + spec.delta;
    rep.residuals[k] = lhs - rhs;
  }
  summarize(rep, &trace.x);
  fail_if_diverged(rep, trace);
  return rep;
}

CheckReport check_spiiiss_sum(const SimulationTrace& trace, const TrajectoryBoundSpec& spec) {
  if (!spec.chi) throw DomainError("check_spiiiss_sum needs a chi candidate");
  CheckReport rep;
  rep.name = "spiiiss_sum";
  if (trace.x.empty()) throw DomainError("check_spiiiss_sum: empty trace");
  const double r0 = trace.x.front().norm();
  const auto gi = cumulative_gamma(trace, spec.gamma);
  rep.residuals.resize(trace.x.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < trace.x.size(); ++k) {
    const double kk = static_cast<double>(k);
    const double rhs = (*spec.chi)(r0) + gi[k] + trace.T * kk * spec.delta;
    rep.residuals[k] = trace.T * sum - rhs;
    sum += spec.alpha(trace.x[k].norm());
  }
  summarize(rep, &trace.x);
  fail_if_diverged(rep, trace);
  return rep;
}

ComparisonFunction exponential_beta(ComparisonFunction scale, double lambda) {
  std::ostringstream name;
  name << "(" << scale.name() << ")*exp(-" << lambda << " s)";
  return ComparisonFunction(
      [scale, lambda](double r, double s) { return scale(r) * std::exp(-lambda * s); },
      name.str());
}

double fit_decay_rate(const SimulationTrace& trace, const ComparisonFunction& alpha,
                      const ComparisonFunction& alpha_hi, const ComparisonFunction& gamma,
                      double delta, double lambda_max, double tol) {
  auto passes = [&](double lambda) {
    TrajectoryBoundSpec spec{alpha, exponential_beta(alpha_hi, lambda), std::nullopt, gamma,
                             delta};
    return check_spiiss_trajectory(trace, spec).passed;
  };
  if (!passes(0.0)) return 0.0;
  if (passes(lambda_max)) return lambda_max;
  double lo = 0.0, hi = lambda_max;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (passes(mid) ? lo : hi) = mid;
  }
  return lo;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

nlohmann::json to_json(const CheckReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["passed"] = r.passed;
  j["evaluated"] = r.evaluated;
  j["violations"] = r.violations;
  j["failures"] = r.failures;
  j["worst_residual"] = std::isfinite(r.worst_residual) ? nlohmann::json(r.worst_residual)
                                                        : nlohmann::json(nullptr);
  j["worst_point"] = std::vector<double>(r.worst_point.data(),
                                         r.worst_point.data() + r.worst_point.size());
  if (r.worst_signal) j["worst_signal"] = *r.worst_signal;
  if (r.worst_index) j["worst_index"] = *r.worst_index;
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [label, count] : r.histogram()) {
    hist.push_back({{"bin", label}, {"count", count}});
  }
  j["histogram"] = hist;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

}  // namespace

void write_report_json(std::ostream& os, const std::vector<CheckReport>& reports) {
  nlohmann::json j;
  bool all = true;
  j["checks"] = nlohmann::json::array();
  for (const auto& r : reports) {
    j["checks"].push_back(to_json(r));
    all = all && r.passed;
  }
  j["passed"] = all;
  os << j.dump(2) << '\n';
}

void write_report_text(std::ostream& os, const std::vector<CheckReport>& reports) {
  for (const auto& r : reports) {
    os << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.evaluated << " evaluated, "
       << r.violations << " violations, " << r.failures << " failures, worst residual "
       << r.worst_residual;
    if (r.worst_point.size() > 0) {
      os << " at x = (";
      for (Eigen::Index i = 0; i < r.worst_point.size(); ++i) {
        os << (i ? ", " : "") << r.worst_point[i];
      }
      os << ")";
    }
    if (r.worst_signal) os << " w#" << *r.worst_signal;
    if (!r.detail.empty()) os << " [" << r.detail << "]";
    os << '\n';
  }
}

}  // namespace drsd
