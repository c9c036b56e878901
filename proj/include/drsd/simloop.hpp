#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "drsd/controller.hpp"
#include "drsd/plant.hpp"
#include "drsd/signals.hpp"

namespace drsd {

/// Everything a closed-loop run needs besides the rates and initial state.
struct ClosedLoopSetup {
  PlantModel plant;
  ControlLaw law;
  DisturbanceSignal disturbance;
  /// Estimator family; its h is replaced by SimulationConfig::h.
  ApproxModelFamily estimator;
  ComparisonFunction gamma_hat = ComparisonFunction::identity();
  IntegratorOptions integrator{};
  /// |x| above this declares divergence.
  double blowup = 1e6;
};

/// The worked example: example plant, example law (c1, c2), square-wave
/// disturbance, closed-form approximate model as estimator, gamma_hat = id.
ClosedLoopSetup example_setup(double c1 = 6.0, double c2 = 1.0);

struct SimulationConfig {
  double T = 0.05;       // ZOH period
  std::size_t ell = 1;   // T_s = ell * T
  double h = 0.05;
  std::size_t K = 400;   // horizon in steps
  Vec x0;

  void validate() const;
  double Ts() const { return T * static_cast<double>(ell); }
};

enum class TraceStatus { Completed, Diverged };

struct SimulationTrace {
  double T = 0.0;
  std::size_t ell = 1;
  double h = 0.0;
  std::size_t horizon = 0;
  std::vector<Vec> x;   // x(k)
  std::vector<Vec> xc;  // x_c(k); equals x(k) in single-rate traces
  std::vector<Vec> u;   // u(k), held on [kT, (k+1)T)
  std::vector<double> gamma_integral;  // int_0^{kT} gamma_hat(|w|)
  DisturbanceSignal disturbance;
  bool has_estimates = true;
  TraceStatus status = TraceStatus::Completed;
  std::optional<std::size_t> diverged_at;
  std::string divergence_reason;

  std::size_t size() const { return x.size(); }
  double time(std::size_t k) const { return static_cast<double>(k) * T; }
  bool completed() const { return status == TraceStatus::Completed; }
  double max_norm() const;
};

/// Dual-rate closed loop with the exact plant oracle: at each k the
/// controller sees x(k) iff k mod ell = 0, u(k) is held over the period and
/// x(k+1) = F^e_T(x(k), u(k), w_T[k]). Stops with Diverged status when the
/// oracle fails or |x| exceeds setup.blowup; never throws on divergence.
SimulationTrace simulate_closed_loop(const ClosedLoopSetup& setup, const SimulationConfig& cfg);

/// Single-rate loop u(k) = u_{T,h}(x(k)); `cfg.ell` is ignored.
SimulationTrace simulate_single_rate(const ClosedLoopSetup& setup, const SimulationConfig& cfg);

struct TraceComparison {
  double max_deviation = 0.0;  // sup_k |x_a(k) - x_b(k)|
  double peak_a = 0.0;         // max_k |x_a(k)|
  double peak_b = 0.0;
  double overshoot_a = 0.0;    // see `overshoot`
  double overshoot_b = 0.0;
  std::optional<double> settling_a;  // first kT with |x(j)| <= 0.02 |x0| for all j >= k
  std::optional<double> settling_b;
};

/// Largest excursion past the origin against the initial condition:
/// max over k, i of -sign(x0_i) x_i(k), floored at 0 (|x_i(k)| where x0_i = 0).
double overshoot(const SimulationTrace& t);

std::optional<double> settling_time(const SimulationTrace& t, double fraction = 0.02);

/// ProtocolError unless both traces cover the same time horizon from the
/// same x0. Deviation is measured on the coarser of the two time grids.
TraceComparison compare_traces(const SimulationTrace& a, const SimulationTrace& b);

/// CSV with columns t, x1..xn, xc1..xcn, u1..um, w1..wp, gamma_integral;
/// 17 significant digits.
void write_trace_csv(std::ostream& os, const SimulationTrace& trace);

struct PlotSeries {
  std::string label;
  std::vector<double> t;
  std::vector<double> y;
  bool dashed = false;
};

/// Static SVG line chart.
void write_svg_plot(std::ostream& os, const std::string& title,
                    const std::vector<PlotSeries>& series, const std::string& x_label = "t [s]");

/// State components of one or more traces as plot series.
std::vector<PlotSeries> state_series(const SimulationTrace& trace, const std::string& prefix,
                                     bool dashed = false);

}  // namespace drsd
