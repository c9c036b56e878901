#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "drsd/controller.hpp"
#include "drsd/plant.hpp"
#include "drsd/signals.hpp"
#include "drsd/simloop.hpp"

namespace drsd {

/// Candidate SP-iISS / SP-iIiSS Lyapunov function for the single-rate
/// approximate closed loop, with its bounding functions and the compact data
/// (Delta1, Delta2, Delta3, delta1) it is claimed for.
struct LyapunovCertificate {
  std::function<double(const Vec&)> V;
  ComparisonFunction alpha_lo;   // K-infinity lower bound
  ComparisonFunction alpha_hi;   // K-infinity upper bound
  ComparisonFunction alpha;      // decrease rate: PD (SP-iISS) or K-infinity (SP-iIiSS)
  ComparisonFunction gamma_hat;  // class K disturbance gain
  double delta1 = 0.05;
  double Delta1 = 5.0;  // state radius
  double Delta2 = 1.0;  // |w|_inf bound
  double Delta3 = 1.0;  // |w|_gamma_hat bound per segment
  double M = 1.0;       // Lipschitz constant of V on the Delta1 ball
  double T = 0.05;
  double h = 0.05;
  std::size_t state_dim = 2;
  bool integral_flavor = false;  // alpha claimed K-infinity

  /// V(0) = 0 and class claims of the bounding functions; CertificateError
  /// with the failing item otherwise.
  void validate() const;
};

/// V = ln(1 + x1^2) + x2^2/2 with alpha_lo(s) = min(ln(1+s^2/2), s^2/4),
/// alpha_hi(s) = ln(1+s^2) + s^2/2, gamma_hat = identity, and alpha built
/// by `example_decrease_rate`.
LyapunovCertificate example_certificate(double T, double delta1 = 0.05, double Delta1 = 5.0,
                                        double c1 = 6.0, double c2 = 1.0,
                                        double alpha_scale = 0.1);

/// alpha(s) = scale * min over |x| = s of
///   2 x1^2/(1+x1^2)^2 + (c1 - 1/2) x2^2 + T c2 x1^2 x2^2,
/// the radial lower envelope of the example's per-state decrease terms.
ComparisonFunction example_decrease_rate(double T, double c1, double c2, double scale);

/// alpha(s) = min over |x| = s of terms(x) for n = 2 (dense angle sweep plus
/// Brent refinement of the best bracket).
ComparisonFunction radial_envelope(std::function<double(const Vec&)> terms, std::string name);

/// Single-rate approximate closed loop x -> F^a_{T,h}(x, u_{T,h}(x), w).
struct ClosedLoopMap {
  ApproxModelFamily family;
  ControlLaw law;
  double T;

  Vec operator()(const Vec& x, const DisturbanceSignal& w_seg) const {
    return family.step(x, law(x, T, family.h()), w_seg, T);
  }
};

struct CheckReport {
  std::string name;
  bool passed = false;
  std::size_t evaluated = 0;
  std::size_t violations = 0;
  std::size_t failures = 0;  // points where the map diverged
  double worst_residual = 0.0;  // max residual (positive = violation)
  std::optional<std::size_t> worst_index;
  Vec worst_point;
  std::optional<std::size_t> worst_signal;  // w-bank index for check_decrease
  std::vector<double> residuals;
  std::string detail;

  /// Counts of residuals in fixed bins: (-inf,-1], (-1,-1e-1], ..., (-1e-9, 1e-9],
  /// (1e-9, 1e-6], (1e-6, inf).
  std::vector<std::pair<std::string, std::size_t>> histogram() const;
};

inline constexpr double kResidualTolerance = 1e-9;

struct GridOptions {
  std::size_t points = 4096;
  std::size_t seed = 0;
  std::size_t jobs = 1;
};

/// Per-point margin min(V - alpha_lo(|x|), alpha_hi(|x|) - V) on the grid.
/// `residuals` holds the negated margins so that positive means violation.
CheckReport check_sandwich(const LyapunovCertificate& cert, const std::vector<Vec>& grid);

/// Residual V(F(x,w)) - V(x) - T[-alpha(|x|) + (1/T) int_0^T gamma_hat(|w|) + delta1]
/// over grid x w_bank; each bank signal is read on [0, T]. Residuals are
/// stored grid-major (index = i * bank + j).
CheckReport check_decrease(const LyapunovCertificate& cert, const ClosedLoopMap& map,
                           const std::vector<DisturbanceSignal>& w_bank,
                           const std::vector<Vec>& grid, std::size_t jobs = 1);

/// Largest sampled |V(x1) - V(x2)| / |x1 - x2| on the Delta1 ball; passes iff
/// <= M (1 + 1e-6).
CheckReport check_v_lipschitz(const LyapunovCertificate& cert, std::size_t samples,
                              std::size_t seed = 0);

/// Candidate functions for the trajectory-level bounds.
struct TrajectoryBoundSpec {
  ComparisonFunction alpha;
  std::optional<ComparisonFunction> beta;  // SP-iISS
  std::optional<ComparisonFunction> chi;   // SP-iIiSS
  ComparisonFunction gamma;
  double delta = 0.1;

  /// CertificateError unless every function passes its declared class.
  void validate() const;
};

/// alpha(|x(k)|) - [beta(|x(0)|, kT) + int_0^{kT} gamma(|w|) + delta] <= 0
/// for every recorded k; a diverged trace fails outright.
CheckReport check_spiiss_trajectory(const SimulationTrace& trace, const TrajectoryBoundSpec& spec);

/// T sum_{i<k} alpha(|x(i)|) - [chi(|x(0)|) + int_0^{kT} gamma(|w|) + T k delta] <= 0
/// for every recorded k; a diverged trace fails outright.
CheckReport check_spiiiss_sum(const SimulationTrace& trace, const TrajectoryBoundSpec& spec);

/// beta(r, s) = scale(r) * exp(-lambda s).
ComparisonFunction exponential_beta(ComparisonFunction scale, double lambda);

/// Largest lambda in [0, lambda_max] (bisection to `tol`) for which
/// check_spiiss_trajectory passes with beta = exponential_beta(alpha_hi, lambda).
/// Returns 0 when even lambda = 0 fails.
double fit_decay_rate(const SimulationTrace& trace, const ComparisonFunction& alpha,
                      const ComparisonFunction& alpha_hi, const ComparisonFunction& gamma,
                      double delta, double lambda_max = 50.0, double tol = 1e-4);

/// Integral of gamma(|w|) over [0, kT] for the trace's disturbance.
double trace_gamma_integral(const SimulationTrace& trace, const ComparisonFunction& gamma,
                            std::size_t k);

void write_report_json(std::ostream& os, const std::vector<CheckReport>& reports);
void write_report_text(std::ostream& os, const std::vector<CheckReport>& reports);

}  // namespace drsd
