#include "drsd/simloop.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "drsd/errors.hpp"

namespace drsd {

ClosedLoopSetup example_setup(double c1, double c2) {
  return ClosedLoopSetup{example_plant(), example_law(c1, c2), example_square_wave(),
                         example_approx_model(0.05)};
}

void SimulationConfig::validate() const {
  if (!(T > 0.0)) throw DomainError("simulation needs T > 0");
  if (!(h > 0.0) || h > T * (1.0 + 1e-12)) throw DomainError("simulation needs 0 < h <= T");
  if (K < 1) throw DomainError("simulation needs K >= 1");
  if (ell < 1) throw DomainError("simulation needs ell >= 1");
  if (x0.size() == 0 || !x0.allFinite()) throw DomainError("simulation needs a finite x0");
}

double SimulationTrace::max_norm() const {
  double m = 0.0;
  for (const auto& v : x) m = std::max(m, v.norm());
  return m;
}

namespace {

// Shared loop; `controller` is null for the single-rate law.
SimulationTrace run_loop(const ClosedLoopSetup& setup, const SimulationConfig& cfg,
                         bool dual_rate) {
  cfg.validate();
  if (static_cast<std::size_t>(cfg.x0.size()) != setup.plant.state_dim()) {
    throw DomainError("x0 dimension does not match the plant");
  }
  const ExactStepOracle oracle(setup.plant, setup.integrator);
  std::optional<DualRateController> controller;
  if (dual_rate) {
    controller.emplace(setup.law, cfg.ell, setup.estimator.with_h(cfg.h), cfg.T);
  } else {
    setup.law.require_zero_at_zero(cfg.T, cfg.h);
  }

  SimulationTrace tr;
  tr.T = cfg.T;
  tr.ell = dual_rate ? cfg.ell : 1;
  tr.h = cfg.h;
  tr.horizon = cfg.K;
  tr.disturbance = setup.disturbance;
  tr.has_estimates = dual_rate;
  tr.x.reserve(cfg.K + 1);

  Vec x = cfg.x0;
  double gamma_acc = 0.0;
  for (std::size_t k = 0;; ++k) {
    Vec xc;
    Vec u;
    if (controller) {
      std::optional<Vec> meas;
      if (controller->expects_measurement()) meas = x;
      u = controller->update(meas);
      xc = controller->estimate();
    } else {
      u = setup.law(x, cfg.T, cfg.h);
      xc = x;
    }
    tr.x.push_back(x);
    tr.xc.push_back(std::move(xc));
    tr.u.push_back(u);
    tr.gamma_integral.push_back(gamma_acc);

    if (x.norm() > setup.blowup || !x.allFinite()) {
      tr.status = TraceStatus::Diverged;
      tr.diverged_at = k;
      tr.divergence_reason = "blow-up threshold exceeded";
      break;
    }
    if (k == cfg.K) break;

    const double t0 = static_cast<double>(k) * cfg.T;
    const DisturbanceSignal w_seg = setup.disturbance.shifted(t0);
    try {
      x = oracle.step(x, u, w_seg, cfg.T);
    } catch (const DivergenceError& e) {
      tr.status = TraceStatus::Diverged;
      tr.diverged_at = k + 1;
      tr.divergence_reason = e.what();
      break;
    }
    gamma_acc += w_seg.gamma_integral(setup.gamma_hat, 0.0, cfg.T);
  }
  return tr;
}

}  // namespace

SimulationTrace simulate_closed_loop(const ClosedLoopSetup& setup, const SimulationConfig& cfg) {
  return run_loop(setup, cfg, true);
}

SimulationTrace simulate_single_rate(const ClosedLoopSetup& setup, const SimulationConfig& cfg) {
  return run_loop(setup, cfg, false);
}

double overshoot(const SimulationTrace& t) {
  if (t.x.empty()) return 0.0;
  const Vec& x0 = t.x.front();
  double best = 0.0;
  for (const auto& x : t.x) {
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double e = x0[i] > 0.0 ? -x[i] : x0[i] < 0.0 ? x[i] : std::abs(x[i]);
      best = std::max(best, e);
    }
  }
  return best;
}

std::optional<double> settling_time(const SimulationTrace& t, double fraction) {
  if (t.x.empty() || !t.completed()) return std::nullopt;
  const double band = fraction * t.x.front().norm();
  std::size_t k = t.x.size();
  while (k > 0 && t.x[k - 1].norm() <= band) --k;
  if (k == t.x.size()) return std::nullopt;
  return t.time(k);
}

TraceComparison compare_traces(const SimulationTrace& a, const SimulationTrace& b) {
  if (std::abs(a.time(a.horizon) - b.time(b.horizon)) > 1e-9) {
    throw ProtocolError("compare_traces: horizons differ");
  }
  if (a.x.empty() || b.x.empty() || a.x.front() != b.x.front()) {
    throw ProtocolError("compare_traces: initial states differ");
  }
  TraceComparison c;
  c.peak_a = a.max_norm();
  c.peak_b = b.max_norm();
  c.overshoot_a = overshoot(a);
  c.overshoot_b = overshoot(b);
  c.settling_a = settling_time(a);
  c.settling_b = settling_time(b);
  // Traces at different T are compared on the coarser time grid.
  const SimulationTrace& coarse = a.T >= b.T ? a : b;
  const SimulationTrace& fine = a.T >= b.T ? b : a;
  const double ratio = coarse.T / fine.T;
  const auto stride = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(stride)) > 1e-9) {
    throw ProtocolError("compare_traces: periods are not integer multiples");
  }
  for (std::size_t k = 0; k < coarse.x.size(); ++k) {
    const std::size_t j = k * stride;
    if (j >= fine.x.size()) break;
    c.max_deviation = std::max(c.max_deviation, (coarse.x[k] - fine.x[j]).norm());
  }
  return c;
}

// ---------------------------------------------------------------------------
// Output

namespace {

void put(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, const SimulationTrace& trace) {
  if (trace.x.empty()) return;
  const auto n = trace.x.front().size();
  const auto m = trace.u.front().size();
  const auto p = static_cast<Eigen::Index>(trace.disturbance.dim());
  os << "t";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",x" << i;
  for (Eigen::Index i = 1; i <= n; ++i) os << ",xc" << i;
  for (Eigen::Index i = 1; i <= m; ++i) os << ",u" << i;
  for (Eigen::Index i = 1; i <= p; ++i) os << ",w" << i;
  os << ",gamma_integral\n";
  for (std::size_t k = 0; k < trace.x.size(); ++k) {
    const double t = trace.time(k);
    put(os, t);
    for (Eigen::Index i = 0; i < n; ++i) os << ',', put(os, trace.x[k][i]);
    for (Eigen::Index i = 0; i < n; ++i) os << ',', put(os, trace.xc[k][i]);
    for (Eigen::Index i = 0; i < m; ++i) os << ',', put(os, trace.u[k][i]);
    const Vec w = trace.disturbance(t);
    for (Eigen::Index i = 0; i < p; ++i) os << ',', put(os, w[i]);
    os << ',';
    put(os, trace.gamma_integral[k]);
    os << '\n';
  }
}

std::vector<PlotSeries> state_series(const SimulationTrace& trace, const std::string& prefix,
                                     bool dashed) {
  std::vector<PlotSeries> out;
  if (trace.x.empty()) return out;
  for (Eigen::Index i = 0; i < trace.x.front().size(); ++i) {
    PlotSeries s;
    s.label = prefix + " x" + std::to_string(i + 1);
    s.dashed = dashed;
    for (std::size_t k = 0; k < trace.x.size(); ++k) {
      s.t.push_back(trace.time(k));
      s.y.push_back(trace.x[k][i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_svg_plot(std::ostream& os, const std::string& title,
                    const std::vector<PlotSeries>& series, const std::string& x_label) {
  constexpr double W = 900, H = 540, L = 70, R = 200, Tm = 40, B = 50;
  double xmin = 0, xmax = 1, ymin = -1, ymax = 1;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.t.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      if (first) {
        xmin = xmax = s.t[i];
        ymin = ymax = s.y[i];
        first = false;
      }
      xmin = std::min(xmin, s.t[i]);
      xmax = std::max(xmax, s.t[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  if (xmax <= xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  auto sx = [&](double v) { return L + (v - xmin) / (xmax - xmin) * (W - L - R); };
  auto sy = [&](double v) { return Tm + (ymax - v) / (ymax - ymin) * (H - Tm - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                 "#9467bd", "#8c564b", "#e377c2", "#17becf"};
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
     << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << Tm << "\" width=\"" << W - L - R << "\" height=\""
     << H - Tm - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 5.0;
    const double yv = ymin + (ymax - ymin) * i / 5.0;
    os << "<text x=\"" << sx(xv) << "\" y=\"" << H - B + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">" << std::round(xv * 100) / 100
       << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << sy(yv) + 4
       << "\" text-anchor=\"end\" font-size=\"11\">" << std::round(yv * 100) / 100
       << "</text>\n";
  }
  if (ymin < 0 && ymax > 0) {
    os << "<line x1=\"" << L << "\" x2=\"" << W - R << "\" y1=\"" << sy(0) << "\" y2=\""
       << sy(0) << "\" stroke=\"#bbbbbb\"/>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = colors[s % 8];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
    if (ser.dashed) os << " stroke-dasharray=\"6,4\"";
    os << " points=\"";
    for (std::size_t i = 0; i < ser.t.size(); ++i) {
      if (!std::isfinite(ser.y[i])) break;
      os << sx(ser.t[i]) << ',' << sy(ser.y[i]) << ' ';
    }
    os << "\"/>\n";
    const double ly = Tm + 16 + 18.0 * static_cast<double>(s);
    os << "<line x1=\"" << W - R + 10 << "\" x2=\"" << W - R + 40 << "\" y1=\"" << ly
       << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"1.5\""
       << (ser.dashed ? " stroke-dasharray=\"6,4\"" : "") << "/>\n";
    os << "<text x=\"" << W - R + 46 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">"
       << ser.label << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace drsd
