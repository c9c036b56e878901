#include "drsd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "drsd/errors.hpp"
#include "drsd/expression.hpp"
#include "drsd/parallel.hpp"

namespace drsd {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Config access

Config Config::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

Config Config::parse(const std::string& text) {
  Config c;
  try {
    c.doc = json::parse(text, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!c.doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> known = {"plant",       "law",   "disturbance", "rates",
                                                 "certificate", "query", "description"};
  for (const auto& [key, _] : c.doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError("unknown config section '" + key + "'");
    }
  }
  return c;
}

const json& Config::section(const std::string& name) const {
  static const json empty = json::object();
  if (!doc.contains(name)) return empty;
  const json& s = doc.at(name);
  if (!s.is_object()) throw ConfigError("config section '" + name + "' must be an object");
  return s;
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

template <class T>
T get(const json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

template <class T>
T require(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + " needs '" + key + "'");
  return get<T>(j, key, T{});
}

Vec to_vec(const json& j, const std::string& what) {
  if (j.is_number()) return Vec::Constant(1, j.get<double>());
  if (!j.is_array() || j.empty()) throw ConfigError(what + " must be a number or nonempty array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(what + " must contain numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

std::string id_of(const json& s, const std::string& fallback) {
  return get<std::string>(s, "id", fallback);
}

[[noreturn]] void unknown(const std::string& kind, const std::string& id,
                          const std::vector<std::string>& known) {
  throw ConfigError("unknown " + kind + " id '" + id + "'; registered: " + join(known));
}

std::map<std::string, double> params_of(const json& s) {
  return get<std::map<std::string, double>>(s, "params", {});
}

ComparisonFunction function_from(const json& j, const std::string& what,
                                 ComparisonClass default_class) {
  if (j.is_string() && j.get<std::string>() == "identity") return ComparisonFunction::identity();
  std::string text;
  ComparisonClass cls = default_class;
  std::map<std::string, double> params;
  if (j.is_string()) {
    text = j.get<std::string>();
  } else if (j.is_object()) {
    text = require<std::string>(j, "expr", what);
    if (j.contains("class")) {
      try {
        cls = comparison_class_from_string(j.at("class").get<std::string>());
      } catch (const std::exception& e) {
        throw ConfigError(what + ": " + e.what());
      }
    }
    params = params_of(j);
  } else {
    throw ConfigError(what + " must be an expression string or {expr, class}");
  }
  const auto e = Expression::parse(text, {"s"}, params);
  return ComparisonFunction(
      cls, [e](double s) { return e(std::span<const double>(&s, 1)); }, text);
}

}  // namespace

// ---------------------------------------------------------------------------
// Registries

std::vector<std::string> registered_plants() { return {"paper-example", "custom"}; }
std::vector<std::string> registered_laws() { return {"paper-example", "custom"}; }
std::vector<std::string> registered_disturbances() {
  return {"paper-example", "zero", "constant", "piecewise-constant"};
}
std::vector<std::string> registered_approx_models() {
  return {"paper-example", "euler", "euler-exact-w", "exact"};
}
std::vector<std::string> registered_certificates() { return {"paper-example", "custom"}; }

PlantModel build_plant(const Config& cfg) {
  const json& s = cfg.section("plant");
  const auto id = id_of(s, "paper-example");
  if (id == "paper-example") return example_plant();
  if (id == "custom") {
    const auto rhs = require<std::vector<std::string>>(s, "f", "custom plant");
    return expression_plant(get<std::string>(s, "name", "custom"), rhs,
                            get<std::size_t>(s, "input_dim", 1),
                            get<std::size_t>(s, "disturbance_dim", 1), params_of(s),
                            require<double>(s, "lipschitz_hint", "custom plant"),
                            get<double>(s, "compact_radius", 10.0));
  }
  unknown("plant", id, registered_plants());
}

ControlLaw build_law(const Config& cfg, std::size_t n) {
  const json& s = cfg.section("law");
  const auto id = id_of(s, "paper-example");
  if (id == "paper-example") {
    return example_law(get<double>(s, "c1", 6.0), get<double>(s, "c2", 1.0),
                       get<double>(s, "cross_gain", -2.0));
  }
  if (id == "custom") {
    return expression_law(get<std::string>(s, "name", "custom"), n,
                          require<std::vector<std::string>>(s, "u", "custom law"), params_of(s));
  }
  unknown("law", id, registered_laws());
}

DisturbanceSignal build_disturbance(const Config& cfg, std::size_t p) {
  const json& s = cfg.section("disturbance");
  const auto id = id_of(s, "paper-example");
  DisturbanceSignal w;
  if (id == "paper-example") {
    w = example_square_wave();
  } else if (id == "zero") {
    w = DisturbanceSignal::zero(p);
  } else if (id == "constant") {
    w = DisturbanceSignal::constant(to_vec(s.value("value", json(0.0)), "disturbance.value"));
  } else if (id == "piecewise-constant") {
    std::vector<ConstantPiece> pieces;
    for (const auto& piece : s.value("pieces", json::array())) {
      pieces.push_back({require<double>(piece, "start", "disturbance piece"),
                        require<double>(piece, "end", "disturbance piece"),
                        to_vec(piece.value("value", json()), "disturbance piece value")});
    }
    const Vec tail = s.contains("tail") ? to_vec(s.at("tail"), "disturbance.tail")
                                        : Vec::Zero(static_cast<Eigen::Index>(p));
    try {
      w = DisturbanceSignal::piecewise_constant(std::move(pieces), tail);
    } catch (const DomainError& e) {
      throw ConfigError(std::string("disturbance: ") + e.what());
    }
  } else {
    unknown("disturbance", id, registered_disturbances());
  }
  if (w.dim() != p) throw ConfigError("disturbance dimension does not match the plant");
  return w;
}

ApproxModelFamily build_approx(const Config& cfg, const PlantModel& plant, double h,
                               const std::string& key) {
  const json& s = cfg.section("plant");
  const auto id =
      get<std::string>(s, key, plant.name() == "paper-example" ? "paper-example" : "euler");
  if (id == "paper-example") {
    if (plant.name() != "paper-example") {
      throw ConfigError("approx model 'paper-example' requires the paper-example plant");
    }
    return example_approx_model(h);
  }
  if (id == "euler") return ApproxModelFamily(plant, h, DisturbanceHandling::SampledLeftEndpoint);
  if (id == "euler-exact-w") {
    return ApproxModelFamily(plant, h, DisturbanceHandling::ExactSegmentIntegral);
  }
  if (id == "exact") return oracle_as_family(ExactStepOracle(plant), h);
  unknown("approx model", id, registered_approx_models());
}

ClosedLoopSetup build_setup(const Config& cfg) {
  auto plant = build_plant(cfg);
  auto law = build_law(cfg, plant.state_dim());
  auto w = build_disturbance(cfg, plant.disturbance_dim());
  auto est = build_approx(cfg, plant, 0.05, "estimator");
  ClosedLoopSetup setup{plant, law, w, est};
  const json& r = cfg.section("rates");
  setup.blowup = get<double>(r, "blowup", 1e6);
  setup.integrator.abs_tol = get<double>(r, "abs_tol", setup.integrator.abs_tol);
  setup.integrator.rel_tol = get<double>(r, "rel_tol", setup.integrator.rel_tol);
  return setup;
}

LyapunovCertificate build_certificate(const Config& cfg) {
  const json& s = cfg.section("certificate");
  const json& law = cfg.section("law");
  const auto id = id_of(s, "paper-example");
  const double T = get<double>(s, "T", 0.05);
  LyapunovCertificate c = [&] {
    if (id == "paper-example") {
      return example_certificate(T, get<double>(s, "delta1", 0.05), get<double>(s, "Delta1", 5.0),
                                 get<double>(law, "c1", 6.0), get<double>(law, "c2", 1.0),
                                 get<double>(s, "alpha_scale", 0.1));
    }
    if (id == "custom") {
      const auto n = require<std::size_t>(s, "state_dim", "custom certificate");
      std::vector<std::string> vars;
      for (std::size_t i = 1; i <= n; ++i) vars.push_back("x" + std::to_string(i));
      const auto V = Expression::parse(require<std::string>(s, "V", "custom certificate"), vars,
                                       params_of(s));
      LyapunovCertificate out{
          [V](const Vec& x) { return V(std::span<const double>(x.data(), x.size())); },
          function_from(s.value("alpha_lo", json()), "alpha_lo", ComparisonClass::KInf),
          function_from(s.value("alpha_hi", json()), "alpha_hi", ComparisonClass::KInf),
          function_from(s.value("alpha", json()), "alpha", ComparisonClass::PD),
          function_from(s.value("gamma_hat", json("identity")), "gamma_hat", ComparisonClass::K),
      };
      out.state_dim = n;
      out.T = T;
      out.delta1 = get<double>(s, "delta1", 0.05);
      out.Delta1 = get<double>(s, "Delta1", 5.0);
      out.M = require<double>(s, "M", "custom certificate");
      return out;
    }
    unknown("certificate", id, registered_certificates());
  }();
  c.h = get<double>(s, "h", T);
  c.Delta2 = get<double>(s, "Delta2", c.Delta2);
  c.Delta3 = get<double>(s, "Delta3", T * c.gamma_hat(c.Delta2));
  c.M = get<double>(s, "M", c.M);
  c.integral_flavor = get<bool>(s, "integral_flavor", false);
  return c;
}

RobQuery build_rob_query(const Config& cfg, std::size_t jobs) {
  const json& q = cfg.section("query");
  RobQuery r;
  r.setup = build_setup(cfg);
  r.directions = get<std::size_t>(q, "directions", 16);
  r.r_lo = get<double>(q, "r_lo", 0.05);
  r.r_hi = get<double>(q, "r_hi", 120.0);
  r.tol = get<double>(q, "tol", 0.05);
  r.horizon = get<double>(q, "horizon_s", 60.0);
  r.jobs = jobs;
  return r;
}

std::vector<RobCellSpec> build_rob_schedule(const Config& cfg) {
  const json& q = cfg.section("query");
  const json sched = q.value("schedule", json("reference"));
  if (sched.is_string()) {
    if (sched.get<std::string>() == "reference") return reference_schedule();
    throw ConfigError("unknown schedule '" + sched.get<std::string>() + "'; registered: reference");
  }
  if (!sched.is_array() || sched.empty()) throw ConfigError("query.schedule must be nonempty");
  std::vector<RobCellSpec> out;
  for (const auto& c : sched) {
    const bool sr = get<bool>(c, "single_rate", false);
    const double Ts = require<double>(c, "Ts", "schedule cell");
    std::optional<double> ref;
    if (c.contains("reference")) ref = c.at("reference").get<double>();
    RobCellSpec spec = make_cell(get<std::string>(c, "scheme", sr ? "SR" : "MR"), Ts,
                                 get<double>(c, "T", Ts), sr, ref);
    if (c.contains("ell")) {
      spec.ell = c.at("ell").get<std::size_t>();
      spec.T = Ts / static_cast<double>(spec.ell);
    }
    out.push_back(spec);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Subcommands

namespace {

struct Context {
  const RunManifest& m;
  const Config& cfg;
  std::ostream& log;

  void info(const std::string& s) const {
    if (m.verbosity > 0) log << s << '\n';
  }
  std::ofstream open(const std::string& name) const {
    std::ofstream f(m.out / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (m.out / name).string());
    return f;
  }
};

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

struct RunSpec {
  std::string label;
  SimulationConfig cfg;
  bool single_rate = false;
};

RunSpec run_spec(const json& r, const json& defaults, const std::string& fallback_label) {
  RunSpec s;
  auto pick = [&](const std::string& k) -> const json& {
    if (r.contains(k)) return r.at(k);
    if (defaults.contains(k)) return defaults.at(k);
    throw ConfigError("rates needs '" + k + "'");
  };
  s.single_rate = get<bool>(r, "single_rate", get<bool>(defaults, "single_rate", false));
  s.cfg.T = pick("T").get<double>();
  s.cfg.ell = s.single_rate ? 1 : get<std::size_t>(r, "ell", get<std::size_t>(defaults, "ell", 1));
  s.cfg.h = get<double>(r, "h", get<double>(defaults, "h", s.cfg.T));
  const double horizon = pick("horizon_s").get<double>();
  s.cfg.K = static_cast<std::size_t>(std::llround(horizon / s.cfg.T));
  s.cfg.x0 = to_vec(pick("x0"), "rates.x0");
  s.label = get<std::string>(r, "label", fallback_label);
  try {
    s.cfg.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("rates: ") + e.what());
  }
  return s;
}

SimulationTrace execute(const ClosedLoopSetup& setup, const RunSpec& s) {
  return s.single_rate ? simulate_single_rate(setup, s.cfg) : simulate_closed_loop(setup, s.cfg);
}

json trace_summary(const SimulationTrace& t) {
  json j;
  j["T"] = t.T;
  j["ell"] = t.ell;
  j["h"] = t.h;
  j["steps"] = t.horizon;
  j["status"] = t.completed() ? "completed" : "diverged";
  if (t.diverged_at) {
    j["diverged_at"] = *t.diverged_at;
    j["reason"] = t.divergence_reason;
  }
  j["final_norm"] = t.x.back().norm();
  j["peak_norm"] = t.max_norm();
  j["overshoot"] = overshoot(t);
  j["settling_time"] = opt_json(settling_time(t));
  return j;
}

int cmd_simulate(const Context& c) {
  const auto setup = build_setup(c.cfg);
  const auto spec = run_spec(c.cfg.section("rates"), json::object(), "run");
  c.info("simulate: T=" + num(spec.cfg.T) + " ell=" + std::to_string(spec.cfg.ell) +
         " K=" + std::to_string(spec.cfg.K));
  const auto trace = execute(setup, spec);
  {
    auto f = c.open("trace.csv");
    write_trace_csv(f, trace);
  }
  {
    auto f = c.open("trace.svg");
    write_svg_plot(f, spec.label, state_series(trace, spec.label));
  }
  {
    auto f = c.open("summary.json");
    f << trace_summary(trace).dump(2) << '\n';
  }
  c.info("simulate: " + std::string(trace.completed() ? "completed" : "diverged") +
         ", |x(K)| = " + num(trace.x.back().norm()));
  return trace.completed() ? kExitOk : kExitDivergence;
}

int cmd_compare(const Context& c) {
  const auto setup = build_setup(c.cfg);
  const json& rates = c.cfg.section("rates");
  const json runs = rates.value("runs", json::array());
  if (!runs.is_array() || runs.size() < 2) throw ConfigError("compare needs rates.runs with >= 2 runs");
  std::vector<RunSpec> specs;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    specs.push_back(run_spec(runs[i], rates, "run" + std::to_string(i + 1)));
  }
  std::vector<SimulationTrace> traces(specs.size());
  parallel_for(specs.size(), c.m.jobs, [&](std::size_t i) { traces[i] = execute(setup, specs[i]); });

  std::vector<PlotSeries> series;
  json summary = json::array();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    auto f = c.open("run" + std::to_string(i + 1) + ".csv");
    write_trace_csv(f, traces[i]);
    auto s = state_series(traces[i], specs[i].label, !specs[i].single_rate);
    series.insert(series.end(), s.begin(), s.end());
    auto js = trace_summary(traces[i]);
    js["label"] = specs[i].label;
    summary.push_back(js);
  }
  {
    auto f = c.open("compare.svg");
    write_svg_plot(f, "state response", series);
  }
  auto f = c.open("comparison.csv");
  f << "run_a,run_b,max_deviation,peak_a,peak_b,overshoot_a,overshoot_b,settling_a,settling_b\n";
  for (std::size_t a = 0; a < specs.size(); ++a) {
    for (std::size_t b = a + 1; b < specs.size(); ++b) {
      const auto cmp = compare_traces(traces[a], traces[b]);
      f << specs[a].label << ',' << specs[b].label << ',' << num(cmp.max_deviation) << ','
        << num(cmp.peak_a) << ',' << num(cmp.peak_b) << ',' << num(cmp.overshoot_a) << ',' << num(cmp.overshoot_b) << ','
        << (cmp.settling_a ? num(*cmp.settling_a) : "") << ','
        << (cmp.settling_b ? num(*cmp.settling_b) : "") << '\n';
    }
  }
  auto js = c.open("summary.json");
  js << summary.dump(2) << '\n';
  return kExitOk;
}

int cmd_rob(const Context& c) {
  const auto q = build_rob_query(c.cfg, c.m.jobs);
  const auto schedule = build_rob_schedule(c.cfg);
  c.info("rob: " + std::to_string(schedule.size()) + " cells, " + std::to_string(q.directions) +
         " directions, horizon " + num(q.horizon) + " s");
  const auto table = rob_sweep(q, schedule);
  {
    auto f = c.open("rob.csv");
    write_rob_csv(f, table);
  }
  {
    auto f = c.open("rob_table.csv");
    write_rob_table_csv(f, table);
  }
  for (const auto& v : table.ordering_violations) c.info("ordering violation: " + v);
  for (const auto& v : table.monotonicity_violations) c.info("monotonicity violation: " + v);
  const bool strict = get<bool>(c.cfg.section("query"), "fail_on_violation", false);
  if (strict && !(table.ordering_violations.empty() && table.monotonicity_violations.empty())) {
    return kExitCheckFailed;
  }
  return kExitOk;
}

int cmd_consistency(const Context& c) {
  const auto plant = build_plant(c.cfg);
  const json& q = c.cfg.section("query");
  const double T = get<double>(q, "T", 0.1);
  const auto divisors = get<std::vector<double>>(q, "h_divisors", {1, 2, 4, 8});
  std::vector<double> hs;
  for (double d : divisors) hs.push_back(T / d);
  std::sort(hs.begin(), hs.end());
  const Vec b = to_vec(q.value("bounds", json::array({5, 10, 1})), "query.bounds");
  if (b.size() != 3) throw ConfigError("query.bounds must be [dx, du, dw]");
  const ExactStepOracle oracle(plant);
  const auto family = build_approx(c.cfg, plant, T, "consistency_family");
  const ConsistencyBounds bounds{b[0], b[1], b[2], get<bool>(q, "square_wave", true)};
  const auto profile = consistency_profile(oracle, family, bounds, T, hs,
                                           get<std::size_t>(q, "samples", 512),
                                           get<std::size_t>(q, "seed", 0), c.m.jobs);
  const double slope = loglog_slope(profile);
  auto f = c.open("consistency.csv");
  f << "h,rho,evaluated,diverged\n";
  for (const auto& p : profile) {
    f << num(p.h) << ',' << num(p.rho) << ',' << p.evaluated << ',' << p.diverged << '\n';
  }
  f << "# family=" << family.name() << " T=" << num(T) << " square_wave=" << (bounds.square_wave ? "yes" : "no") << " slope=" << num(slope) << '\n';
  c.info("consistency: slope " + num(slope));
  if (q.contains("min_slope") && !(slope >= q.at("min_slope").get<double>())) {
    return kExitCheckFailed;
  }
  if (q.contains("max_rho")) {
    for (const auto& p : profile) {
      if (!(p.rho <= q.at("max_rho").get<double>())) return kExitCheckFailed;
    }
  }
  return kExitOk;
}

int cmd_certify(const Context& c) {
  const auto cert = build_certificate(c.cfg);
  try {
    cert.validate();
  } catch (const CertificateError& e) {
    auto f = c.open("certificate.txt");
    f << "FAIL validate: " << e.what() << '\n';
    c.info(std::string("certificate invalid: ") + e.what());
    return kExitCheckFailed;
  }
  const json& s = c.cfg.section("certificate");
  const auto plant = build_plant(c.cfg);
  const auto law = build_law(c.cfg, plant.state_dim());
  const ClosedLoopMap map{build_approx(c.cfg, plant, cert.h), law, cert.T};

  const auto n = plant.state_dim();
  const auto p = static_cast<Eigen::Index>(plant.disturbance_dim());
  std::vector<DisturbanceSignal> bank{DisturbanceSignal::zero(plant.disturbance_dim())};
  for (Eigen::Index i = 0; i < p; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vec v = Vec::Zero(p);
      v[i] = sign * cert.Delta2;
      bank.push_back(DisturbanceSignal::constant(v));
    }
  }
  if (get<bool>(s, "include_config_disturbance", false)) {
    bank.push_back(build_disturbance(c.cfg, plant.disturbance_dim()));
  }
  const auto points = get<std::size_t>(s, "grid_points", 4096);
  const auto seed = get<std::size_t>(s, "seed", 0);
  const auto grid = state_grid(n, cert.Delta1, points, seed);
  c.info("certify: " + std::to_string(grid.size()) + " grid points x " +
         std::to_string(bank.size()) + " signals");

  std::vector<CheckReport> reports;
  reports.push_back(check_sandwich(cert, grid));
  reports.push_back(check_decrease(cert, map, bank, grid, c.m.jobs));
  reports.push_back(check_v_lipschitz(cert, get<std::size_t>(s, "lipschitz_samples", 20000), seed));
  {
    auto f = c.open("certificate.json");
    write_report_json(f, reports);
  }
  {
    auto f = c.open("certificate.txt");
    write_report_text(f, reports);
  }
  if (c.m.verbosity > 0) write_report_text(c.log, reports);
  const bool ok = std::all_of(reports.begin(), reports.end(),
                              [](const CheckReport& r) { return r.passed; });
  if (!ok && c.m.verbosity == 0) {
    for (const auto& r : reports) {
      if (!r.passed) write_report_text(c.log, {r});
    }
  }
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run(const RunManifest& manifest, std::ostream& log) {
  try {
    const Config cfg = Config::load(manifest.config);
    std::error_code ec;
    fs::create_directories(manifest.out, ec);
    if (ec || !fs::is_directory(manifest.out)) {
      log << "error: output directory " << manifest.out.string() << " is not writable\n";
      return kExitUsage;
    }
    const Context ctx{manifest, cfg, log};
    if (manifest.subcommand == "simulate") return cmd_simulate(ctx);
    if (manifest.subcommand == "compare") return cmd_compare(ctx);
    if (manifest.subcommand == "rob") return cmd_rob(ctx);
    if (manifest.subcommand == "consistency") return cmd_consistency(ctx);
    if (manifest.subcommand == "certify") return cmd_certify(ctx);
    log << "error: unknown subcommand '" << manifest.subcommand
        << "'; expected simulate, rob, consistency, certify, compare\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CertificateError& e) {
    log << "certificate error: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const DivergenceError& e) {
    log << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace drsd
