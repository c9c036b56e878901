// Acceptance run: one PASS/FAIL line per criterion, indented diagnostics below it.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "drsd/certify.hpp"
#include "drsd/controller.hpp"
#include "drsd/rob.hpp"
#include "drsd/simloop.hpp"

using namespace drsd;

namespace {

struct Verdict {
  bool pass = true;
  std::string summary;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    notes.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void info(const std::string& what) { notes.push_back("     " + what); }
};

std::string num(double v, int prec = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

bool same_bits(const Vec& a, const Vec& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), sizeof(double) * static_cast<std::size_t>(a.size())) == 0;
}

const Vec kX0 = v2(1.2, -5.9);

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

RobTable g_table;
double g_sweep_seconds = 0.0;

void run_sweep() {
  RobQuery base;
  base.jobs = std::max(1u, std::thread::hardware_concurrency());
  const auto t0 = std::chrono::steady_clock::now();
  g_table = rob_sweep(base, reference_schedule());
  g_sweep_seconds = seconds_since(t0);
}

double cell_R(const std::string& scheme, double ts) {
  for (const auto& c : g_table.cells) {
    if (c.spec.scheme == scheme && std::abs(c.spec.Ts - ts) < 1e-12 && c.result) {
      return c.result->R;
    }
  }
  return std::nan("");
}

Verdict criterion1() {
  Verdict v;
  const double tol = g_table.tol;
  const std::vector<double> ts = {0.1, 0.2, 0.3, 0.34, 0.38};
  for (const auto& c : g_table.cells) {
    if (!c.error.empty()) v.require(false, c.spec.scheme + " Ts=" + num(c.spec.Ts) + ": " + c.error);
  }
  for (double t : ts) {
    const double sr = cell_R("SR", t), m05 = cell_R("MR T=0.05", t), m01 = cell_R("MR T=0.01", t);
    v.require(m01 + tol >= m05 && m05 + tol >= sr,
              "Ts=" + num(t) + ": MR0.01=" + num(m01, 5) + " >= MR0.05=" + num(m05, 5) +
                  " >= SR=" + num(sr, 5));
  }
  for (const auto& c : g_table.cells) {
    if (!c.result || !c.spec.reference) continue;
    const bool want_zero = *c.spec.reference == 0.0;
    const bool is_zero = c.result->R == 0.0;
    if (want_zero || is_zero) {
      v.require(want_zero == is_zero, c.spec.scheme + " Ts=" + num(c.spec.Ts) + ": R=" +
                                          num(c.result->R, 5) + ", reference " +
                                          num(*c.spec.reference));
    }
  }
  v.require(g_sweep_seconds <= 900.0, "sweep runtime " + num(g_sweep_seconds, 3) + " s (budget 900 s)");
  v.summary = "reference radius orderings and zero pattern";
  return v;
}

Verdict criterion2() {
  Verdict v;
  std::size_t in_band = 0, nonzero = 0, noted = 0;
  for (const auto& c : g_table.cells) {
    if (!c.result || !c.spec.reference || *c.spec.reference == 0.0) continue;
    ++nonzero;
    const double ref = *c.spec.reference;
    const double dev = (c.result->R - ref) / ref;
    const bool ok = std::abs(dev) <= 0.2;
    in_band += ok ? 1 : 0;
    noted += (!ok && !c.note.empty()) ? 1 : 0;
    v.require(ok || !c.note.empty(), c.spec.scheme + " Ts=" + num(c.spec.Ts) + ": R=" +
                                         num(c.result->R, 5) + " vs " + num(ref) + " (" +
                                         num(100 * dev, 3) + "%" +
                                         (ok ? ")" : ", methodology note attached)"));
  }
  v.summary = "reference radius magnitudes: " + std::to_string(in_band) + "/" + std::to_string(nonzero) +
              " nonzero cells within 20%, " + std::to_string(noted) +
              " outside with a methodology note";
  return v;
}

Verdict criterion3() {
  Verdict v;
  const auto setup = example_setup(6.0, 1.0);
  const auto sr = simulate_single_rate(setup, {0.3, 1, 0.3, 70, kX0});
  const auto m1 = simulate_closed_loop(setup, {0.05, 6, 0.05, 420, kX0});
  const auto m2 = simulate_closed_loop(setup, {0.01, 30, 0.01, 2100, kX0});
  v.require(sr.completed() && m1.completed() && m2.completed(), "all three runs complete 21 s");
  if (!v.pass) return v;
  const auto a = compare_traces(sr, m1);
  const auto b = compare_traces(sr, m2);
  const auto c = compare_traces(m1, m2);
  v.info("peak |x|: SR " + num(a.peak_a) + ", MR0.05 " + num(a.peak_b) + ", MR0.01 " +
         num(b.peak_b) + " (all equal |x0|; overshoot is measured as excursion past the origin)");
  const double os = overshoot(sr), o1 = overshoot(m1), o2 = overshoot(m2);
  v.require(os > o1 && os > o2, "overshoot SR " + num(os) + " > MR0.05 " + num(o1) +
                                    ", MR0.01 " + num(o2));
  const auto ss = settling_time(sr), s1 = settling_time(m1), s2 = settling_time(m2);
  v.require(ss && s1 && s2 && *ss > *s1 && *ss > *s2,
            "2% settling SR " + (ss ? num(*ss) : "none") + " s > MR0.05 " +
                (s1 ? num(*s1) : "none") + " s, MR0.01 " + (s2 ? num(*s2) : "none") + " s");
  const double sr_mr = std::min(a.max_deviation, b.max_deviation);
  v.require(c.max_deviation < 0.1 * sr_mr, "sup|MR0.05 - MR0.01| = " + num(c.max_deviation) +
                                               " < 10% of SR-MR difference " + num(sr_mr));
  v.summary = "single-rate vs multi-rate transients";
  return v;
}

Verdict criterion4() {
  Verdict v;
  const auto plant = example_plant();
  const ExactStepOracle oracle(plant);
  const double T = 0.1;
  const ConsistencyBounds bounds{5.0, 10.0, 1.0};
  const std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
  const std::vector<double> hs = {T / 8, T / 4, T / 2, T};
  const auto prof = consistency_profile(oracle, ApproxModelFamily(plant, T), bounds, T, hs, 512,
                                        0, jobs);
  std::string rhos;
  for (const auto& p : prof) rhos += " rho(" + num(p.h) + ")=" + num(p.rho);
  v.info("Euler:" + rhos);
  const double slope = loglog_slope(prof);
  v.require(slope >= 0.9, "log-log slope over {T, T/2, T/4, T/8} = " + num(slope, 4) + " >= 0.9");
  for (std::size_t i = 0; i + 1 < prof.size(); ++i) {
    v.info("pairwise slope h=" + num(prof[i].h) + ".." + num(prof[i + 1].h) + ": " +
           num(std::log(prof[i + 1].rho / prof[i].rho) / std::log(prof[i + 1].h / prof[i].h), 4));
  }
  const std::vector<double> fine = {1e-3, 2e-3, 4e-3, 8e-3};
  const auto deep = consistency_profile(oracle, ApproxModelFamily(plant, T), bounds, T, fine, 256,
                                        0, jobs);
  v.info("supplementary slope over h in [1e-3, 8e-3]: " + num(loglog_slope(deep), 4));
  ConsistencyBounds constants = bounds;
  constants.square_wave = false;
  const auto flat = consistency_profile(oracle, ApproxModelFamily(plant, T), constants, T, hs, 512,
                                        0, jobs);
  v.info("supplementary slope with constant disturbances only: " + num(loglog_slope(flat), 4));
  const auto self = consistency_profile(oracle, oracle_as_family(oracle, T), bounds, T, hs, 128,
                                        0, jobs);
  double worst = 0.0;
  for (const auto& p : self) worst = std::max(worst, p.rho);
  v.require(worst <= 1e-8, "self-comparison max rho = " + num(worst) + " <= 1e-8");
  v.summary = "one-step consistency order";
  return v;
}

Verdict criterion5() {
  Verdict v;
  const double T = 0.05;
  const auto cert = example_certificate(T, 0.05, 5.0);
  cert.validate();
  const ClosedLoopMap map{example_approx_model(T), example_law(), T};
  const std::vector<DisturbanceSignal> bank = {
      DisturbanceSignal::zero(1), DisturbanceSignal::constant(Vec::Constant(1, 1.0)),
      DisturbanceSignal::constant(Vec::Constant(1, -1.0))};
  const auto grid = state_grid(2, 5.0, 4096, 0);
  const auto rep = check_decrease(cert, map, bank, grid,
                                  std::max(1u, std::thread::hardware_concurrency()));
  v.require(rep.passed && rep.violations == 0 && rep.failures == 0,
            "check_decrease: " + std::to_string(rep.evaluated) + " evaluated, " +
                std::to_string(rep.violations) + " violations, worst residual " +
                num(rep.worst_residual));
  v.require(check_sandwich(cert, grid).passed, "sandwich bounds on the same grid");
  v.summary = "Lyapunov decrease at T = 0.05, delta1 = 0.05";
  return v;
}

Verdict criterion6() {
  Verdict v;
  const auto setup = example_setup();
  const auto tr = simulate_closed_loop(setup, {0.05, 6, 0.05, 400, kX0});
  bool reset = tr.completed();
  for (std::size_t k = 0; k < tr.size(); k += 6) reset = reset && same_bits(tr.xc[k], tr.x[k]);
  v.require(reset, "estimator reset is bitwise exact at every sampling instant");

  const SimulationConfig one{0.1, 1, 0.1, 150, kX0};
  const auto dr = simulate_closed_loop(setup, one);
  const auto srt = simulate_single_rate(setup, one);
  bool reduce = dr.size() == srt.size();
  for (std::size_t k = 0; reduce && k < dr.size(); ++k) reduce = same_bits(dr.x[k], srt.x[k]);
  v.require(reduce, "ell = 1 reduces bitwise to the single-rate loop");

  const ExactStepOracle oracle(setup.plant);
  const auto z = DisturbanceSignal::zero(1);
  const Vec u0 = Vec::Zero(1);
  const bool fixed = oracle.step(Vec::Zero(2), u0, z, 0.3).norm() == 0.0 &&
                     example_approx_model(0.05).step(Vec::Zero(2), u0, z, 0.05).norm() == 0.0 &&
                     ApproxModelFamily(setup.plant, 0.05).step(Vec::Zero(2), u0, z, 0.1).norm() == 0.0;
  v.require(fixed, "origin is a fixed point of the exact and approximate steps");

  double umax = 0.0;
  for (const auto& u : tr.u) umax = std::max(umax, u.norm());
  const double dx = tr.max_norm() + 0.5;
  const double L = dx + 1.0;
  const auto prof = consistency_profile(oracle, example_approx_model(0.05), {dx, umax, 1.0}, 0.05,
                                        {0.05}, 1024);
  const double eps = 5.0 * std::exp(L * 5.0 * 0.05) * prof.front().rho;
  const auto lem = estimator_error_trace(tr, eps, L);
  v.require(lem.violations == 0, "estimator error bound: " + std::to_string(lem.violations) +
                                     " violations over " + std::to_string(lem.points.size()) +
                                     " steps (L=" + num(L, 4) + ", eps=" + num(eps, 4) +
                                     ", max error " + num(lem.max_actual, 4) + ")");

  const double lg = l_gamma_norm(example_square_wave(), ComparisonFunction::identity(), 10.0);
  v.require(lg == 6.0, "L_gamma norm of the square wave with gamma = id: " + num(lg, 17));

  const double Lf = setup.plant.lipschitz_hint();
  double worst = -1e300;
  for (std::size_t i = 0; i < 1000; ++i) {
    const auto pt = halton_point(i + 1, 6);
    Vec a = v2(2 * pt[0] - 1, 2 * pt[1] - 1), b = v2(2 * pt[2] - 1, 2 * pt[3] - 1);
    a = 5.0 * cube_to_ball(a);
    b = 5.0 * cube_to_ball(b);
    const Vec u = Vec::Constant(1, 2 * pt[4] - 1);
    const auto w = DisturbanceSignal::constant(Vec::Constant(1, 2 * pt[5] - 1));
    const double lhs = (oracle.step(a, u, w, 0.1) - oracle.step(b, u, w, 0.1)).norm();
    worst = std::max(worst, lhs - std::exp(Lf * 0.1) * (a - b).norm());
  }
  v.require(worst <= 1e-6, "Gronwall sensitivity on 1000 pairs, worst excess " + num(worst));
  v.summary = "invariant suite";
  return v;
}

Verdict criterion7() {
  Verdict v;
  const auto cert = example_certificate(0.05);
  const auto setup = example_setup();
  const auto gamma = ComparisonFunction::power(2.0, 1.0);
  const double delta = 0.1;
  const std::vector<std::pair<std::string, SimulationTrace>> stable = {
      {"SR Ts=0.3", simulate_single_rate(setup, {0.3, 1, 0.3, 70, kX0})},
      {"MR T=0.05", simulate_closed_loop(setup, {0.05, 6, 0.05, 420, kX0})},
      {"MR T=0.01", simulate_closed_loop(setup, {0.01, 30, 0.01, 2100, kX0})},
  };
  // One beta for the whole family: fitted on a polar grid of initial states
  // for the T = 0.05 loop and on the stable runs themselves.
  double lambda = 1e300;
  for (double r : {1.0, 2.0, 4.0, 6.0}) {
    for (const Vec& d : unit_directions(2, 64)) {
      const auto tr = simulate_closed_loop(setup, {0.05, 6, 0.05, 400, Vec(r * d)});
      lambda = std::min(lambda, fit_decay_rate(tr, cert.alpha_lo, cert.alpha_hi, gamma, delta));
    }
  }
  for (const auto& [name, tr] : stable) {
    lambda = std::min(lambda, fit_decay_rate(tr, cert.alpha_lo, cert.alpha_hi, gamma, delta));
  }
  v.info("fitted beta(r, s) = alpha_hi(r) exp(-" + num(lambda, 4) + " s)");
  const TrajectoryBoundSpec spec{cert.alpha_lo, exponential_beta(cert.alpha_hi, lambda),
                                 cert.alpha_hi, gamma, delta};
  spec.validate();
  const TrajectoryBoundSpec sum_spec{ComparisonFunction::power(0.1, 2.0), std::nullopt,
                                     cert.alpha_hi, cert.gamma_hat, delta};
  sum_spec.validate();
  v.require(lambda > 0.0, "positive decay rate fitted");
  for (const auto& [name, tr] : stable) {
    v.require(check_spiiss_trajectory(tr, spec).passed, name + ": SP-iISS bound holds");
    v.require(check_spiiiss_sum(tr, sum_spec).passed, name + ": SP-iIiSS sum holds");
  }
  std::size_t held_out_fail = 0;
  const auto held_out = halton_ball(2, 6.0, 500, 7);
  for (const Vec& x0 : held_out) {
    const auto tr = simulate_closed_loop(setup, {0.05, 6, 0.05, 400, x0});
    const bool ok = check_spiiss_trajectory(tr, spec).passed && check_spiiiss_sum(tr, sum_spec).passed;
    held_out_fail += ok ? 0 : 1;
  }
  v.require(held_out_fail == 0, "both bounds on " + std::to_string(held_out.size()) +
                                    " held-out initial states: " + std::to_string(held_out_fail) +
                                    " failures");
  const auto bad = simulate_single_rate(setup, {0.38, 1, 0.38, 160, kX0});
  v.require(!bad.completed(), "SR Ts=0.38 diverges (k = " +
                                  std::to_string(bad.diverged_at.value_or(0)) + ")");
  v.require(!check_spiiss_trajectory(bad, spec).passed, "SR Ts=0.38: SP-iISS bound fails");
  v.require(!check_spiiiss_sum(bad, sum_spec).passed, "SR Ts=0.38: SP-iIiSS sum fails");
  v.summary = "trajectory-level bounds with fitted candidates";
  return v;
}

}  // namespace

int main() {
  std::cout << "running the 15-cell radius sweep..." << std::endl;
  run_sweep();
  std::vector<Verdict (*)()> criteria = {criterion1, criterion2, criterion3, criterion4,
                                         criterion5, criterion6, criterion7};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i]();
    } catch (const std::exception& e) {
      v.pass = false;
      v.summary = std::string("exception: ") + e.what();
    }
    failed += v.pass ? 0 : 1;
    std::cout << (v.pass ? "[PASS] " : "[FAIL] ") << "criterion " << (i + 1) << ": " << v.summary
              << '\n';
    for (const auto& n : v.notes) std::cout << "       " << n << '\n';
    std::cout.flush();
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
