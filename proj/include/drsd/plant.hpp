#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "drsd/integrator.hpp"
#include "drsd/signals.hpp"

namespace drsd {

using VectorField = std::function<Vec(const Vec& x, const Vec& u, const Vec& w)>;

/// Continuous-time plant x' = f(x, u, w).
///
/// Construction checks f(0,0,0) = 0 to 1e-12 and that f is finite on a
/// Halton probe of the declared compact set {|x|, |u|, |w| <= compact_radius}.
class PlantModel {
 public:
  PlantModel(std::string name, std::size_t n, std::size_t m, std::size_t p, VectorField f,
             double lipschitz_hint, double compact_radius);

  const std::string& name() const { return name_; }
  std::size_t state_dim() const { return n_; }
  std::size_t input_dim() const { return m_; }
  std::size_t disturbance_dim() const { return p_; }
  /// Local Lipschitz constant of f in x on the compact set.
  double lipschitz_hint() const { return lipschitz_hint_; }
  double compact_radius() const { return compact_radius_; }

  Vec operator()(const Vec& x, const Vec& u, const Vec& w) const { return f_(x, u, w); }

 private:
  std::string name_;
  std::size_t n_, m_, p_;
  VectorField f_;
  double lipschitz_hint_;
  double compact_radius_;
};

/// x1' = -x1/(1+x1^2) + x1 x2,  x2' = u + w.
PlantModel example_plant();

/// Plant from expressions in x1..xn, u1..um, w1..wp and named parameters.
PlantModel expression_plant(const std::string& name, const std::vector<std::string>& rhs,
                            std::size_t m, std::size_t p,
                            const std::map<std::string, double>& params, double lipschitz_hint,
                            double compact_radius);

/// High-accuracy one-step map F^e_T: integrates the plant over [0, T] with u
/// held constant, restarting the integrator at every breakpoint of the
/// disturbance segment.
class ExactStepOracle {
 public:
  explicit ExactStepOracle(PlantModel plant, IntegratorOptions opts = {});

  const PlantModel& plant() const { return plant_; }
  const IntegratorOptions& options() const { return opts_; }

  /// `w_seg` is read on [0, T] (use DisturbanceSignal::shifted(k T)).
  IntegrationResult step_with_error(const Vec& x, const Vec& u, const DisturbanceSignal& w_seg,
                                    double T) const;
  Vec step(const Vec& x, const Vec& u, const DisturbanceSignal& w_seg, double T) const {
    return step_with_error(x, u, w_seg, T).x;
  }

 private:
  PlantModel plant_;
  IntegratorOptions opts_;
};

enum class ApproxScheme { EulerSubstep, CustomMap };
enum class DisturbanceHandling { SampledLeftEndpoint, ExactSegmentIntegral };

/// One substep of a custom approximate map: state after `dt` starting at
/// segment-relative time `t0`.
using SubstepMap = std::function<Vec(const Vec& x, const Vec& u, const DisturbanceSignal& w_seg,
                                     double t0, double dt)>;

/// Family F^a_{T,h}: composition of substeps of length h over [0, T], with a
/// shorter final substep when h does not divide T.
class ApproxModelFamily {
 public:
  ApproxModelFamily(PlantModel plant, double h,
                    DisturbanceHandling handling = DisturbanceHandling::SampledLeftEndpoint);
  ApproxModelFamily(PlantModel plant, double h, SubstepMap map, std::string map_name);

  const PlantModel& plant() const { return plant_; }
  ApproxScheme scheme() const { return scheme_; }
  DisturbanceHandling handling() const { return handling_; }
  double h() const { return h_; }
  const std::string& name() const { return name_; }

  /// Same scheme with a different integration parameter.
  ApproxModelFamily with_h(double h) const;

  /// Throws DomainError unless 0 < h <= T; DivergenceError on non-finite state.
  Vec step(const Vec& x, const Vec& u, const DisturbanceSignal& w_seg, double T) const;

  /// Substep count used for period T (last one possibly partial).
  std::size_t substeps(double T) const;

 private:
  PlantModel plant_;
  ApproxScheme scheme_;
  DisturbanceHandling handling_ = DisturbanceHandling::SampledLeftEndpoint;
  double h_;
  SubstepMap map_;
  std::string name_;
};

/// Custom substep of the worked example: Euler on x1 and the exact
/// disturbance integral on x2.
ApproxModelFamily example_approx_model(double h);

/// Custom family whose substep is the exact oracle itself (self-comparison).
ApproxModelFamily oracle_as_family(const ExactStepOracle& oracle, double h);

inline constexpr double kSquareWaveSwitches[] = {0.1, 0.3, 0.5, 0.7, 0.9};

struct ConsistencyBounds {
  double dx = 1.0;
  double du = 1.0;
  double dw = 1.0;
  bool square_wave = true;  // add square-wave segments (scalar w, dw >= 1)
};

struct ConsistencyPoint {
  double h = 0.0;
  double rho = 0.0;  // max |F^e - F^a| / T
  std::size_t evaluated = 0;
  std::size_t diverged = 0;
  Vec worst_x, worst_u, worst_w;
};

/// Empirical one-step consistency curve rho(h).
///
/// Sample set: Halton points of the (x, u, w) balls (constant w), the axis
/// extremes x = +-dx e_i combined with u in {0, +-du}, w in {0, +-dw}, and,
/// for scalar w with dw >= 1, the Halton (x, u) points again under the
/// example square wave switching at each fraction of `kSquareWaveSwitches`
/// into the segment. Points where the
/// oracle diverges are counted and skipped. `jobs` bounds worker threads.
std::vector<ConsistencyPoint> consistency_profile(const ExactStepOracle& oracle,
                                                  const ApproxModelFamily& family,
                                                  const ConsistencyBounds& bounds, double T,
                                                  const std::vector<double>& h_list,
                                                  std::size_t samples, std::size_t seed = 0,
                                                  std::size_t jobs = 1);

/// Least-squares slope of log(rho) against log(h) over points with rho > 0.
double loglog_slope(const std::vector<ConsistencyPoint>& profile);

}  // namespace drsd
