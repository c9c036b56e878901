#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "drsd/sampling.hpp"

namespace drsd {

class ComparisonFunction;

/// One piece of a disturbance signal on [start, end).
///
/// Constant pieces carry their value in `constant`; general pieces evaluate
/// `value(t)` with t in absolute signal time.
struct SignalPiece {
  double start = 0.0;
  double end = 0.0;
  std::optional<Vec> constant;
  std::function<Vec(double)> value;

  Vec at(double t) const { return constant ? *constant : value(t); }
};

struct ConstantPiece {
  double start;
  double end;
  Vec value;
};

/// Piecewise-continuous disturbance w : [0, inf) -> R^p.
///
/// Pieces are contiguous, left-closed/right-open and start at t = 0; after the
/// last piece the constant `tail` applies. Immutable once built.
class DisturbanceSignal {
 public:
  /// Scalar zero signal.
  DisturbanceSignal() : DisturbanceSignal(1, {}, Vec::Zero(1)) {}
  DisturbanceSignal(std::size_t dim, std::vector<SignalPiece> pieces, Vec tail);

  static DisturbanceSignal zero(std::size_t dim);
  static DisturbanceSignal constant(const Vec& value);
  static DisturbanceSignal piecewise_constant(std::vector<ConstantPiece> pieces, Vec tail);
  /// Single general piece on [0, end) followed by `tail`.
  static DisturbanceSignal function(std::size_t dim, double end, std::function<Vec(double)> f,
                                    Vec tail);

  std::size_t dim() const { return dim_; }
  const std::vector<SignalPiece>& pieces() const { return pieces_; }
  const Vec& tail() const { return tail_; }
  bool is_piecewise_constant() const;

  /// w(t); throws DomainError for t < 0.
  Vec operator()(double t) const;

  /// The signal s -> w(offset + s). Pieces are cut, not resampled, so the
  /// restriction w_T[k] is `shifted(k * T)` read on [0, T].
  DisturbanceSignal shifted(double offset) const;

  /// Piece containing t, or nullptr when t falls in the tail.
  const SignalPiece* piece_at(double t) const;

  /// Sorted breakpoints strictly inside (a, b).
  std::vector<double> breakpoints(double a, double b) const;

  /// Componentwise integral of w over [a, b]; closed form on constant pieces.
  Vec integral(double a, double b) const;

  /// Integral of gamma(|w(s)|) over [a, b]; closed form on constant pieces,
  /// adaptive Simpson (relative tolerance 1e-8) elsewhere. No class check.
  double gamma_integral(const ComparisonFunction& gamma, double a, double b) const;

 private:
  // Visits [a,b) split at piece boundaries: fn(lo, hi, piece or nullptr for tail).
  template <class Fn>
  void for_each_segment(double a, double b, Fn&& fn) const;

  std::size_t dim_;
  std::vector<SignalPiece> pieces_;
  Vec tail_;
};

/// The square wave used in the worked example: +1 on [2k, 2k+1), -1 on
/// [2k+1, 2k+2) for k = 0, 1, 2, zero from t = 6 on.
DisturbanceSignal example_square_wave();

enum class ComparisonClass { PD, K, KInf, KL };

std::string to_string(ComparisonClass c);
ComparisonClass comparison_class_from_string(const std::string& s);

/// A comparison function of class PD, K, K-infinity (one argument) or a
/// KL section beta(r, s) (two arguments). Class membership is a claim that
/// `validate_comparison_function` checks numerically.
class ComparisonFunction {
 public:
  using Scalar = std::function<double(double)>;
  using Binary = std::function<double(double, double)>;

  ComparisonFunction(ComparisonClass kind, Scalar f, std::string name = {},
                     std::optional<Scalar> inverse = std::nullopt);
  ComparisonFunction(Binary beta, std::string name = {});

  static ComparisonFunction identity();
  /// scale * s^power.
  static ComparisonFunction power(double scale, double power, ComparisonClass kind =
                                                                  ComparisonClass::KInf);
  /// scale * f(s); the class tag is kept, the inverse is rescaled.
  ComparisonFunction scaled(double scale) const;

  ComparisonClass kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool has_inverse() const { return inverse_.has_value(); }

  double operator()(double s) const { return f_(s); }
  double operator()(double r, double s) const { return beta_(r, s); }
  double inverse(double v) const;

 private:
  ComparisonClass kind_;
  Scalar f_;
  Binary beta_;
  std::optional<Scalar> inverse_;
  std::string name_;
};

struct GridSpec {
  double upper = 10.0;
  std::size_t points = 1001;
  /// Second axis for KL sections (time argument).
  double time_upper = 10.0;
};

struct ValidationReport {
  ComparisonClass claim = ComparisonClass::PD;
  bool zero_at_zero = false;
  bool positive = false;
  bool increasing = true;    // checked for K, KInf, and the r-argument of KL
  bool divergent = true;     // checked for KInf
  bool decreasing_in_time = true;  // KL only
  bool vanishing_in_time = true;   // KL only
  std::optional<bool> inverse_roundtrip;
  std::string detail;

  bool passed() const;
};

/// Checks a class claim on a sampled grid of [0, grid.upper].
///
/// PD: f(0) = 0 and f > 0 on the grid. K adds strict increase between
/// consecutive grid points. KInf adds a divergence probe at s = 1e3, 1e6,
/// 1e9: the increment over the last decade pair must be positive and at
/// least half the previous one (so log, roots and powers pass while
/// saturating functions fail). Inverses, when present, must round-trip to 1e-9.
ValidationReport validate_comparison_function(const ComparisonFunction& f, ComparisonClass claim,
                                              const GridSpec& grid = {});

struct SignalNorms {
  double l_inf = 0.0;
  double l_gamma = 0.0;
  double t_end = 0.0;
};

/// sup of |w(t)| over [0, t_end]; exact on constant pieces, dense sampling
/// (1024 intervals per piece) otherwise.
double l_infinity_norm(const DisturbanceSignal& w, double t_end);

/// Integral of gamma(|w(s)|) over [0, t_end]. gamma must validate as class K
/// (CertificateError otherwise).
double l_gamma_norm(const DisturbanceSignal& w, const ComparisonFunction& gamma, double t_end);

SignalNorms signal_norms(const DisturbanceSignal& w, const ComparisonFunction& gamma,
                         double t_end);

}  // namespace drsd
