#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "drsd/simloop.hpp"

namespace drsd {

/// Radius-of-boundedness query: which initial radii keep the closed loop
/// bounded over `horizon` seconds along a fixed set of directions.
struct RobQuery {
  ClosedLoopSetup setup = example_setup();
  double T = 0.05;
  std::size_t ell = 1;
  double h = 0.05;
  bool single_rate = false;
  std::size_t directions = 16;
  double r_lo = 0.05;
  double r_hi = 120.0;
  double tol = 0.05;
  double horizon = 60.0;
  std::size_t jobs = 1;

  void validate() const;
  std::size_t steps() const;
};

struct RobResult {
  double R = 0.0;                     // min over directions
  std::vector<double> radii;          // per-direction critical radius
  std::vector<Vec> directions;
  std::optional<std::size_t> failing_direction;  // argmin, lowest index on ties
  bool capped = false;                // some direction stayed bounded at r_hi
};

/// True iff the loop from x0 completes the horizon without divergence.
bool bounded_from(const RobQuery& q, const Vec& x0);

/// Per-direction bisection of the largest bounded radius in [r_lo, r_hi];
/// a direction that diverges at r_lo contributes 0.
RobResult rob_estimate(const RobQuery& q);

/// One cell of a sweep: scheme label, the requested sampler period and the
/// (T, ell) pair realizing it.
struct RobCellSpec {
  std::string scheme;
  double Ts = 0.0;
  double T = 0.0;
  std::size_t ell = 1;
  bool single_rate = false;
  std::optional<double> reference;
};

/// Cell for sampler period Ts with ZOH period close to T_nominal:
/// ell = max(1, round(Ts / T_nominal)) and T = Ts / ell.
RobCellSpec make_cell(const std::string& scheme, double Ts, double T_nominal, bool single_rate,
                      std::optional<double> reference = std::nullopt);

/// Ts in {0.1, 0.2, 0.3, 0.34, 0.38} x {SR, MR T=0.05, MR T=0.01}, with the
/// reference radii attached.
std::vector<RobCellSpec> reference_schedule();

struct RobCell {
  RobCellSpec spec;
  std::optional<RobResult> result;
  std::string error;
  std::string note;  // methodology note when the reference deviates > 20 %
};

struct RobTable {
  std::vector<RobCell> cells;
  std::vector<std::string> ordering_violations;
  std::vector<std::string> monotonicity_violations;
  double tol = 0.05;
  std::size_t directions = 16;
  double horizon = 60.0;
  double blowup = 1e6;
};

/// Runs every cell (directions of all cells share the worker pool); cell
/// failures are recorded and the sweep continues. Orderings are checked per
/// Ts column in schedule order of schemes, monotonicity per scheme in Ts.
RobTable rob_sweep(const RobQuery& base, const std::vector<RobCellSpec>& schedule);

/// Long format: scheme,Ts,T,ell,R_T,reference,deviation_pct,failing_direction,note
/// followed by '#' methodology footer lines.
void write_rob_csv(std::ostream& os, const RobTable& table);

/// Table layout: one row per scheme, one column per Ts.
void write_rob_table_csv(std::ostream& os, const RobTable& table);

}  // namespace drsd
