#include "drsd/rob.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "drsd/errors.hpp"
#include "drsd/parallel.hpp"

namespace drsd {

void RobQuery::validate() const {
  if (!(T > 0.0) || ell < 1) throw DomainError("rob query needs T > 0 and ell >= 1");
  if (!(h > 0.0) || h > T * (1.0 + 1e-12)) throw DomainError("rob query needs 0 < h <= T");
  if (directions < 4) throw DomainError("rob query needs at least 4 directions");
  if (!(r_lo > 0.0) || !(r_lo < r_hi)) throw DomainError("rob query needs 0 < r_lo < r_hi");
  if (!(tol > 0.0)) throw DomainError("rob query needs tol > 0");
  if (!(horizon > 0.0)) throw DomainError("rob query needs a positive horizon");
}

std::size_t RobQuery::steps() const {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(horizon / T)));
}

bool bounded_from(const RobQuery& q, const Vec& x0) {
  SimulationConfig cfg{q.T, q.ell, q.h, q.steps(), x0};
  const auto trace =
      q.single_rate ? simulate_single_rate(q.setup, cfg) : simulate_closed_loop(q.setup, cfg);
  return trace.completed();
}

namespace {

double bisect_direction(const RobQuery& q, const Vec& dir) {
  if (!bounded_from(q, q.r_lo * dir)) return 0.0;
  if (bounded_from(q, q.r_hi * dir)) return q.r_hi;
  double lo = q.r_lo, hi = q.r_hi;
  while (hi - lo > q.tol) {
    const double mid = 0.5 * (lo + hi);
    (bounded_from(q, mid * dir) ? lo : hi) = mid;
  }
  return lo;
}

RobResult assemble(const RobQuery& q, std::vector<Vec> dirs, std::vector<double> radii) {
  RobResult r;
  r.directions = std::move(dirs);
  r.radii = std::move(radii);
  r.R = r.radii.front();
  r.failing_direction = 0;
  for (std::size_t i = 0; i < r.radii.size(); ++i) {
    if (r.radii[i] < r.R) {
      r.R = r.radii[i];
      r.failing_direction = i;
    }
    if (r.radii[i] >= q.r_hi) r.capped = true;
  }
  if (r.R >= q.r_hi) r.failing_direction.reset();
  return r;
}

RobQuery cell_query(const RobQuery& base, const RobCellSpec& c) {
  RobQuery q = base;
  q.T = c.T;
  q.ell = c.single_rate ? 1 : c.ell;
  q.h = c.T;
  q.single_rate = c.single_rate;
  return q;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

RobResult rob_estimate(const RobQuery& q) {
  q.validate();
  const auto n = q.setup.plant.state_dim();
  auto dirs = unit_directions(n, q.directions);
  std::vector<double> radii(dirs.size(), 0.0);
  parallel_for(dirs.size(), q.jobs, [&](std::size_t i) { radii[i] = bisect_direction(q, dirs[i]); });
  return assemble(q, std::move(dirs), std::move(radii));
}

RobCellSpec make_cell(const std::string& scheme, double Ts, double T_nominal, bool single_rate,
                      std::optional<double> reference) {
  if (!(Ts > 0.0) || !(T_nominal > 0.0)) throw DomainError("make_cell needs positive periods");
  RobCellSpec c;
  c.scheme = scheme;
  c.Ts = Ts;
  c.single_rate = single_rate;
  c.reference = reference;
  if (single_rate) {
    c.T = Ts;
    c.ell = 1;
  } else {
    c.ell = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(Ts / T_nominal)));
    c.T = Ts / static_cast<double>(c.ell);
  }
  return c;
}

std::vector<RobCellSpec> reference_schedule() {
  const std::vector<double> ts = {0.1, 0.2, 0.3, 0.34, 0.38};
  const std::vector<double> sr = {24, 11.5, 7.1, 0, 0};
  const std::vector<double> mr05 = {27.5, 13.4, 8.5, 7, 0};
  const std::vector<double> mr01 = {30.2, 14.7, 9.4, 8.2, 0};
  std::vector<RobCellSpec> out;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    out.push_back(make_cell("SR", ts[i], ts[i], true, sr[i]));
    out.push_back(make_cell("MR T=0.05", ts[i], 0.05, false, mr05[i]));
    out.push_back(make_cell("MR T=0.01", ts[i], 0.01, false, mr01[i]));
  }
  return out;
}

RobTable rob_sweep(const RobQuery& base, const std::vector<RobCellSpec>& schedule) {
  RobTable table;
  table.tol = base.tol;
  table.directions = base.directions;
  table.horizon = base.horizon;
  table.blowup = base.setup.blowup;

  std::vector<RobQuery> queries;
  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  const auto dirs = unit_directions(base.setup.plant.state_dim(), base.directions);
  for (const auto& spec : schedule) {
    RobCell cell;
    cell.spec = spec;
    try {
      queries.push_back(cell_query(base, spec));
      queries.back().validate();
      for (std::size_t d = 0; d < dirs.size(); ++d) tasks.emplace_back(table.cells.size(), d);
    } catch (const std::exception& e) {
      queries.push_back(base);
      cell.error = e.what();
    }
    table.cells.push_back(std::move(cell));
  }

  std::vector<std::vector<double>> radii(schedule.size(), std::vector<double>(dirs.size(), 0.0));
  std::vector<std::string> errors(tasks.size());
  parallel_for(tasks.size(), base.jobs, [&](std::size_t t) {
    const auto [c, d] = tasks[t];
    try {
      radii[c][d] = bisect_direction(queries[c], dirs[d]);
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  });
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto& cell = table.cells[tasks[t].first];
    if (!errors[t].empty() && cell.error.empty()) cell.error = errors[t];
  }

  for (std::size_t c = 0; c < table.cells.size(); ++c) {
    auto& cell = table.cells[c];
    if (!cell.error.empty()) continue;
    cell.result = assemble(queries[c], dirs, radii[c]);
    const double R = cell.result->R;
    if (cell.spec.reference) {
      const double ref = *cell.spec.reference;
      std::ostringstream note;
      if (ref == 0.0 && R > 0.0) {
        note << "reference radius is 0 but every direction stayed bounded up to " << R
             << "; zero entries depend on the unstated boundedness test";
      } else if (ref > 0.0 && R == 0.0) {
        note << "diverged at r_lo where the reference reports " << ref;
      } else if (ref > 0.0 && std::abs(R - ref) > 0.2 * ref) {
        note << "deviates " << std::round(100.0 * (R - ref) / ref) << "% from " << ref
             << "; direction sampling, horizon and blow-up test are methodology choices";
      }
      if (cell.result->capped && R >= base.r_hi) note << (note.tellp() ? "; " : "") << "capped at r_hi";
      cell.note = note.str();
    }
  }

  // Orderings: within each Ts column, later schemes must not fall below earlier ones.
  std::map<double, std::vector<const RobCell*>> by_ts;
  std::map<std::string, std::vector<const RobCell*>> by_scheme;
  std::vector<std::string> scheme_order;
  for (const auto& cell : table.cells) {
    if (!cell.result) continue;
    by_ts[cell.spec.Ts].push_back(&cell);
    if (!by_scheme.count(cell.spec.scheme)) scheme_order.push_back(cell.spec.scheme);
    by_scheme[cell.spec.scheme].push_back(&cell);
  }
  for (const auto& [ts, col] : by_ts) {
    for (std::size_t i = 1; i < col.size(); ++i) {
      if (col[i]->result->R + table.tol < col[i - 1]->result->R) {
        table.ordering_violations.push_back("Ts=" + fmt(ts) + ": " + col[i]->spec.scheme + " (" +
                                            fmt(col[i]->result->R) + ") < " +
                                            col[i - 1]->spec.scheme + " (" +
                                            fmt(col[i - 1]->result->R) + ")");
      }
    }
  }
  for (const auto& name : scheme_order) {
    auto row = by_scheme[name];
    std::stable_sort(row.begin(), row.end(),
                     [](const RobCell* a, const RobCell* b) { return a->spec.Ts < b->spec.Ts; });
    for (std::size_t i = 1; i < row.size(); ++i) {
      if (row[i]->result->R > row[i - 1]->result->R + table.tol) {
        table.monotonicity_violations.push_back(
            name + ": R(Ts=" + fmt(row[i]->spec.Ts) + ") = " + fmt(row[i]->result->R) +
            " > R(Ts=" + fmt(row[i - 1]->spec.Ts) + ") = " + fmt(row[i - 1]->result->R));
      }
    }
  }
  return table;
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

void write_rob_csv(std::ostream& os, const RobTable& table) {
  os << "scheme,Ts,T,ell,R_T,reference,deviation_pct,failing_direction,note\n";
  for (const auto& cell : table.cells) {
    os << csv_quote(cell.spec.scheme) << ',' << fmt(cell.spec.Ts) << ',' << fmt(cell.spec.T)
       << ',' << cell.spec.ell << ',';
    if (cell.result) os << fmt(cell.result->R);
    os << ',';
    if (cell.spec.reference) os << fmt(*cell.spec.reference);
    os << ',';
    if (cell.result && cell.spec.reference && *cell.spec.reference > 0.0) {
      os << fmt(100.0 * (cell.result->R - *cell.spec.reference) / *cell.spec.reference);
    }
    os << ',';
    if (cell.result && cell.result->failing_direction) os << *cell.result->failing_direction;
    os << ',' << csv_quote(cell.error.empty() ? cell.note : "error: " + cell.error) << '\n';
  }
  os << "# directions=" << table.directions << " horizon_s=" << fmt(table.horizon)
     << " blowup=" << fmt(table.blowup) << " bisection_tol=" << fmt(table.tol) << '\n';
  os << "# boundedness: run completes the horizon with |x| <= blowup and no integrator failure\n";
  for (const auto& v : table.ordering_violations) os << "# ordering violation: " << v << '\n';
  for (const auto& v : table.monotonicity_violations) os << "# monotonicity violation: " << v << '\n';
}

void write_rob_table_csv(std::ostream& os, const RobTable& table) {
  std::vector<double> ts;
  std::vector<std::string> schemes;
  for (const auto& c : table.cells) {
    if (std::find(ts.begin(), ts.end(), c.spec.Ts) == ts.end()) ts.push_back(c.spec.Ts);
    if (std::find(schemes.begin(), schemes.end(), c.spec.scheme) == schemes.end()) {
      schemes.push_back(c.spec.scheme);
    }
  }
  os << "scheme";
  for (double t : ts) os << ',' << fmt(t);
  os << '\n';
  for (const auto& s : schemes) {
    os << csv_quote(s);
    for (double t : ts) {
      os << ',';
      for (const auto& c : table.cells) {
        if (c.spec.scheme == s && c.spec.Ts == t && c.result) os << fmt(c.result->R);
      }
    }
    os << '\n';
  }
}

}  // namespace drsd
