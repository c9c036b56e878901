#include "drsd/signals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "drsd/errors.hpp"
#include "drsd/quadrature.hpp"

namespace drsd {

// ---------------------------------------------------------------------------
// DisturbanceSignal

DisturbanceSignal::DisturbanceSignal(std::size_t dim, std::vector<SignalPiece> pieces, Vec tail)
    : dim_(dim), pieces_(std::move(pieces)), tail_(std::move(tail)) {
  if (dim_ == 0) throw DomainError("disturbance dimension must be positive");
  if (static_cast<std::size_t>(tail_.size()) != dim_) {
    throw DomainError("disturbance tail has wrong dimension");
  }
  double expected_start = 0.0;
  for (const auto& p : pieces_) {
    if (p.start != expected_start) {
      throw DomainError("disturbance pieces must be contiguous and start at t = 0");
    }
    if (!(p.end > p.start)) throw DomainError("disturbance piece has empty interval");
    if (p.constant) {
      if (static_cast<std::size_t>(p.constant->size()) != dim_) {
        throw DomainError("disturbance piece has wrong dimension");
      }
      if (!p.constant->allFinite()) throw DomainError("disturbance piece is not finite");
    } else if (!p.value) {
      throw DomainError("disturbance piece has neither a constant nor a function");
    }
    expected_start = p.end;
  }
  if (!tail_.allFinite()) throw DomainError("disturbance tail is not finite");
}

DisturbanceSignal DisturbanceSignal::zero(std::size_t dim) {
  return DisturbanceSignal(dim, {}, Vec::Zero(static_cast<Eigen::Index>(dim)));
}

DisturbanceSignal DisturbanceSignal::constant(const Vec& value) {
  return DisturbanceSignal(static_cast<std::size_t>(value.size()), {}, value);
}

DisturbanceSignal DisturbanceSignal::piecewise_constant(std::vector<ConstantPiece> pieces,
                                                        Vec tail) {
  std::vector<SignalPiece> out;
  out.reserve(pieces.size());
  for (auto& p : pieces) {
    SignalPiece s;
    s.start = p.start;
    s.end = p.end;
    s.constant = std::move(p.value);
    out.push_back(std::move(s));
  }
  const auto dim = static_cast<std::size_t>(tail.size());
  return DisturbanceSignal(dim, std::move(out), std::move(tail));
}

DisturbanceSignal DisturbanceSignal::function(std::size_t dim, double end,
                                              std::function<Vec(double)> f, Vec tail) {
  SignalPiece s;
  s.start = 0.0;
  s.end = end;
  s.value = std::move(f);
  return DisturbanceSignal(dim, {std::move(s)}, std::move(tail));
}

bool DisturbanceSignal::is_piecewise_constant() const {
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [](const SignalPiece& p) { return p.constant.has_value(); });
}

const SignalPiece* DisturbanceSignal::piece_at(double t) const {
  // Last piece whose start is <= t.
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                             [](double v, const SignalPiece& p) { return v < p.start; });
  if (it == pieces_.begin()) return nullptr;
  --it;
  return t < it->end ? &*it : nullptr;
}

Vec DisturbanceSignal::operator()(double t) const {
  if (!(t >= 0.0)) throw DomainError("disturbance evaluated at negative time");
  const SignalPiece* p = piece_at(t);
  return p ? p->at(t) : tail_;
}

DisturbanceSignal DisturbanceSignal::shifted(double offset) const {
  if (!(offset >= 0.0)) throw DomainError("disturbance shift must be nonnegative");
  if (offset == 0.0) return *this;
  std::vector<SignalPiece> out;
  for (const auto& p : pieces_) {
    if (p.end <= offset) continue;
    SignalPiece s;
    s.start = std::max(p.start, offset) - offset;
    s.end = p.end - offset;
    s.constant = p.constant;
    if (!p.constant) {
      s.value = [f = p.value, offset](double t) { return f(t + offset); };
    }
    out.push_back(std::move(s));
  }
  if (!out.empty()) out.front().start = 0.0;
  return DisturbanceSignal(dim_, std::move(out), tail_);
}

std::vector<double> DisturbanceSignal::breakpoints(double a, double b) const {
  std::vector<double> out;
  for (const auto& p : pieces_) {
    if (p.start > a && p.start < b) out.push_back(p.start);
  }
  if (!pieces_.empty()) {
    const double last = pieces_.back().end;
    if (last > a && last < b) out.push_back(last);
  }
  return out;
}

template <class Fn>
void DisturbanceSignal::for_each_segment(double a, double b, Fn&& fn) const {
  for (const auto& p : pieces_) {
    const double lo = std::max(a, p.start);
    const double hi = std::min(b, p.end);
    if (hi > lo) fn(lo, hi, &p);
  }
  const double tail_start = pieces_.empty() ? 0.0 : pieces_.back().end;
  const double lo = std::max(a, tail_start);
  if (b > lo) fn(lo, b, static_cast<const SignalPiece*>(nullptr));
}

Vec DisturbanceSignal::integral(double a, double b) const {
  if (!(a >= 0.0)) throw DomainError("disturbance integral over negative time");
  Vec acc = Vec::Zero(static_cast<Eigen::Index>(dim_));
  if (b <= a) return acc;
  for_each_segment(a, b, [&](double lo, double hi, const SignalPiece* p) {
    if (p == nullptr) {
      acc += (hi - lo) * tail_;
    } else if (p->constant) {
      acc += (hi - lo) * *p->constant;
    } else {
      for (std::size_t i = 0; i < dim_; ++i) {
        const auto idx = static_cast<Eigen::Index>(i);
        acc[idx] += adaptive_simpson([&](double t) { return p->value(t)[idx]; }, lo, hi);
      }
    }
  });
  return acc;
}

double DisturbanceSignal::gamma_integral(const ComparisonFunction& gamma, double a,
                                         double b) const {
  if (!(a >= 0.0)) throw DomainError("disturbance integral over negative time");
  double acc = 0.0;
  if (b <= a) return acc;
  for_each_segment(a, b, [&](double lo, double hi, const SignalPiece* p) {
    if (p == nullptr) {
      acc += (hi - lo) * gamma(tail_.norm());
    } else if (p->constant) {
      acc += (hi - lo) * gamma(p->constant->norm());
    } else {
      acc += adaptive_simpson([&](double t) { return gamma(p->value(t).norm()); }, lo, hi);
    }
  });
  return acc;
}

DisturbanceSignal example_square_wave() {
  std::vector<ConstantPiece> pieces;
  for (int k = 0; k < 3; ++k) {
    pieces.push_back({2.0 * k, 2.0 * k + 1.0, Vec::Constant(1, 1.0)});
    pieces.push_back({2.0 * k + 1.0, 2.0 * k + 2.0, Vec::Constant(1, -1.0)});
  }
  return DisturbanceSignal::piecewise_constant(std::move(pieces), Vec::Zero(1));
}

// ---------------------------------------------------------------------------
// ComparisonFunction

std::string to_string(ComparisonClass c) {
  switch (c) {
    case ComparisonClass::PD: return "PD";
    case ComparisonClass::K: return "K";
    case ComparisonClass::KInf: return "Kinf";
    case ComparisonClass::KL: return "KL";
  }
  return "?";
}

ComparisonClass comparison_class_from_string(const std::string& s) {
  if (s == "PD") return ComparisonClass::PD;
  if (s == "K") return ComparisonClass::K;
  if (s == "Kinf" || s == "KInf" || s == "K_inf") return ComparisonClass::KInf;
  if (s == "KL") return ComparisonClass::KL;
  throw ConfigError("unknown comparison class '" + s + "' (expected PD, K, Kinf, KL)");
}

ComparisonFunction::ComparisonFunction(ComparisonClass kind, Scalar f, std::string name,
                                       std::optional<Scalar> inverse)
    : kind_(kind), f_(std::move(f)), inverse_(std::move(inverse)), name_(std::move(name)) {
  if (kind_ == ComparisonClass::KL) {
    throw DomainError("KL sections take two arguments; use the binary constructor");
  }
}

ComparisonFunction::ComparisonFunction(Binary beta, std::string name)
    : kind_(ComparisonClass::KL), beta_(std::move(beta)), name_(std::move(name)) {}

ComparisonFunction ComparisonFunction::identity() {
  return ComparisonFunction(
      ComparisonClass::KInf, [](double s) { return s; }, "s", Scalar([](double v) { return v; }));
}

ComparisonFunction ComparisonFunction::power(double scale, double p, ComparisonClass kind) {
  if (!(scale > 0.0) || !(p > 0.0)) throw DomainError("power comparison needs scale, p > 0");
  std::ostringstream name;
  name << scale << "*s^" << p;
  return ComparisonFunction(
      kind, [scale, p](double s) { return scale * std::pow(s, p); }, name.str(),
      Scalar([scale, p](double v) { return std::pow(v / scale, 1.0 / p); }));
}

ComparisonFunction ComparisonFunction::scaled(double scale) const {
  if (kind_ == ComparisonClass::KL) {
    return ComparisonFunction([b = beta_, scale](double r, double s) { return scale * b(r, s); },
                              std::to_string(scale) + "*(" + name_ + ")");
  }
  std::optional<Scalar> inv;
  if (inverse_) inv = [i = *inverse_, scale](double v) { return i(v / scale); };
  return ComparisonFunction(
      kind_, [f = f_, scale](double s) { return scale * f(s); },
      std::to_string(scale) + "*(" + name_ + ")", std::move(inv));
}

double ComparisonFunction::inverse(double v) const {
  if (!inverse_) throw DomainError("comparison function '" + name_ + "' has no inverse");
  return (*inverse_)(v);
}

bool ValidationReport::passed() const {
  if (!zero_at_zero || !positive) return false;
  if (claim == ComparisonClass::PD) return inverse_roundtrip.value_or(true);
  if (!increasing) return false;
  if (claim == ComparisonClass::KInf && !divergent) return false;
  if (claim == ComparisonClass::KL && (!decreasing_in_time || !vanishing_in_time)) return false;
  return inverse_roundtrip.value_or(true);
}

namespace {

std::vector<double> grid_points(double upper, std::size_t points) {
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i) {
    g[i] = upper * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return g;
}

}  // namespace

ValidationReport validate_comparison_function(const ComparisonFunction& f, ComparisonClass claim,
                                              const GridSpec& grid) {
  if (grid.points < 2) throw DomainError("validation grid needs at least 2 points");
  ValidationReport rep;
  rep.claim = claim;
  std::ostringstream detail;
  const auto g = grid_points(grid.upper, grid.points);

  if (claim == ComparisonClass::KL) {
    if (f.kind() != ComparisonClass::KL) {
      rep.detail = "KL claim on a one-argument function";
      return rep;
    }
    const auto tg = grid_points(grid.time_upper, std::min<std::size_t>(grid.points, 101));
    rep.zero_at_zero = true;
    rep.positive = true;
    for (double s : tg) {
      if (std::abs(f(0.0, s)) > 1e-12) rep.zero_at_zero = false;
      for (std::size_t i = 1; i < g.size(); ++i) {
        const double v = f(g[i], s);
        if (!(v > 0.0)) rep.positive = false;
        if (!(v > f(g[i - 1], s))) rep.increasing = false;
      }
    }
    for (std::size_t i = 1; i < g.size(); i += std::max<std::size_t>(1, g.size() / 50)) {
      for (std::size_t j = 1; j < tg.size(); ++j) {
        if (f(g[i], tg[j]) > f(g[i], tg[j - 1])) rep.decreasing_in_time = false;
      }
      const double v0 = f(g[i], 0.0);
      const double vl = f(g[i], 1e6);
      if (!(vl <= 1e-6 * std::max(1.0, v0))) rep.vanishing_in_time = false;
    }
    if (!rep.zero_at_zero) detail << "beta(0,s) != 0; ";
    if (!rep.positive) detail << "not positive; ";
    if (!rep.increasing) detail << "not increasing in r; ";
    if (!rep.decreasing_in_time) detail << "not decreasing in s; ";
    if (!rep.vanishing_in_time) detail << "does not vanish as s grows; ";
    rep.detail = detail.str();
    return rep;
  }

  if (f.kind() == ComparisonClass::KL) {
    rep.detail = "one-argument claim on a KL section";
    return rep;
  }

  const double f0 = f(0.0);
  rep.zero_at_zero = std::abs(f0) <= 1e-12;
  if (!rep.zero_at_zero) detail << "f(0) = " << f0 << "; ";

  rep.positive = true;
  double prev = f0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double v = f(g[i]);
    if (!(v > 0.0) || !std::isfinite(v)) {
      if (rep.positive) detail << "f(" << g[i] << ") = " << v << " not positive; ";
      rep.positive = false;
    }
    if (claim != ComparisonClass::PD && !(v > prev)) {
      if (rep.increasing) detail << "not increasing at s = " << g[i] << "; ";
      rep.increasing = false;
    }
    prev = v;
  }

  if (claim == ComparisonClass::KInf) {
    constexpr std::array<double, 3> probes = {1e3, 1e6, 1e9};
    const double a = f(probes[0]);
    const double b = f(probes[1]);
    const double c = f(probes[2]);
    if (std::isinf(c) && c > 0) {
      rep.divergent = true;
    } else {
      const double d1 = b - a;
      const double d2 = c - b;
      rep.divergent = d2 > 0.0 && d2 >= 0.5 * d1;
    }
    if (!rep.divergent) detail << "divergence probe failed (f(1e3)=" << a << ", f(1e6)=" << b
                               << ", f(1e9)=" << c << "); ";
  }

  if (f.has_inverse()) {
    bool ok = true;
    for (std::size_t i = 1; i < g.size(); ++i) {
      const double s = g[i];
      const double back = f.inverse(f(s));
      if (std::abs(back - s) > 1e-9 * std::max(1.0, s)) ok = false;
    }
    rep.inverse_roundtrip = ok;
    if (!ok) detail << "inverse round trip exceeds 1e-9; ";
  }
  rep.detail = detail.str();
  return rep;
}

// ---------------------------------------------------------------------------
// Norms

double l_infinity_norm(const DisturbanceSignal& w, double t_end) {
  if (!(t_end > 0.0)) throw DomainError("l_infinity_norm needs t_end > 0");
  double sup = 0.0;
  for (const auto& p : w.pieces()) {
    if (p.start >= t_end) break;
    if (p.constant) {
      sup = std::max(sup, p.constant->norm());
      continue;
    }
    const double hi = std::min(p.end, t_end);
    constexpr int kSamples = 1024;
    for (int i = 0; i <= kSamples; ++i) {
      double t = p.start + (hi - p.start) * i / kSamples;
      if (t >= p.end) t = std::nextafter(p.end, p.start);
      sup = std::max(sup, p.at(t).norm());
    }
  }
  const double tail_start = w.pieces().empty() ? 0.0 : w.pieces().back().end;
  if (tail_start <= t_end) sup = std::max(sup, w.tail().norm());
  return sup;
}

double l_gamma_norm(const DisturbanceSignal& w, const ComparisonFunction& gamma, double t_end) {
  if (!(t_end > 0.0)) throw DomainError("l_gamma_norm needs t_end > 0");
  const auto rep = validate_comparison_function(gamma, ComparisonClass::K);
  if (!rep.passed()) {
    throw CertificateError("gamma '" + gamma.name() + "' is not class K: " + rep.detail);
  }
  return w.gamma_integral(gamma, 0.0, t_end);
}

SignalNorms signal_norms(const DisturbanceSignal& w, const ComparisonFunction& gamma,
                         double t_end) {
  return {l_infinity_norm(w, t_end), l_gamma_norm(w, gamma, t_end), t_end};
}

}  // namespace drsd
