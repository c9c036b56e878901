#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "drsd/plant.hpp"

namespace drsd {

struct SimulationTrace;

/// Control law u_{T,h}(x). The u(0) = 0 requirement depends on (T, h) and
/// is checked by `require_zero_at_zero` wherever a pair is fixed.
class ControlLaw {
 public:
  using Fn = std::function<Vec(const Vec& x, double T, double h)>;

  ControlLaw(std::string name, std::size_t n, std::size_t m, Fn fn);

  const std::string& name() const { return name_; }
  std::size_t state_dim() const { return n_; }
  std::size_t input_dim() const { return m_; }

  Vec operator()(const Vec& x, double T, double h) const { return fn_(x, T, h); }

  /// Throws DomainError when u_{T,h}(0) != 0.
  void require_zero_at_zero(double T, double h) const;

 private:
  std::string name_;
  std::size_t n_, m_;
  Fn fn_;
};

/// u = k_cross x1^2/(1+x1^2) - c1 x2 - T c2 x2 x1^2.
///
/// `cross_gain` = -2 cancels the x1^2 x2/(1+x1^2) cross term of dV/dt for
/// V = ln(1+x1^2) + x2^2/2 and is the default; +2 reproduces the law exactly
/// as printed alongside the example.
ControlLaw example_law(double c1 = 6.0, double c2 = 1.0, double cross_gain = -2.0);

/// Law from expressions in x1..xn, T, h and named parameters.
ControlLaw expression_law(const std::string& name, std::size_t n,
                          const std::vector<std::string>& components,
                          const std::map<std::string, double>& params);

/// Dual-rate controller: applies u_{T,h} to an inter-sample estimate x_c that
/// is reset to the measurement every `ell` steps and otherwise propagated by
/// the disturbance-free approximate model.
class DualRateController {
 public:
  DualRateController(ControlLaw law, std::size_t ell, ApproxModelFamily estimator, double T);

  /// Step k: `measurement` must be present iff k mod ell == 0 (ProtocolError
  /// otherwise). Returns u(k) and advances k.
  Vec update(const std::optional<Vec>& measurement);

  bool expects_measurement() const { return k_ % ell_ == 0; }
  std::size_t step_index() const { return k_; }
  std::size_t ell() const { return ell_; }
  double T() const { return T_; }
  const Vec& estimate() const { return xc_; }
  const Vec& last_input() const { return u_prev_; }
  const ControlLaw& law() const { return law_; }
  const ApproxModelFamily& estimator() const { return estimator_; }

 private:
  ControlLaw law_;
  std::size_t ell_;
  ApproxModelFamily estimator_;
  double T_;
  DisturbanceSignal zero_w_;
  Vec xc_;
  Vec u_prev_;
  std::size_t k_ = 0;
};

/// Sampled lower bound on the Lipschitz constant of u_{T,h} on {|x| <= dx}:
/// Halton pairs plus central differences along each axis at 100 anchors.
double lipschitz_estimate(const ControlLaw& law, double dx, double T, double h,
                          std::size_t samples, std::size_t seed = 0);

struct EstimatorErrorPoint {
  std::size_t k = 0;
  double actual = 0.0;
  double bound = 0.0;
  bool violated = false;
};

struct EstimatorErrorReport {
  std::vector<EstimatorErrorPoint> points;
  std::size_t violations = 0;
  double max_actual = 0.0;
};

/// Compares |x(k) - x_c(k)| with T eps + L sum_{i=0}^{ell-2} e^{L(i+1)T}
/// int_{(k-i-1)T}^{(k-i)T} |w(s)| ds along a trace.
EstimatorErrorReport estimator_error_trace(const SimulationTrace& trace, double eps, double L);

}  // namespace drsd
