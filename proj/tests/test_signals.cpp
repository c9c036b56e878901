#include <doctest.h>

#include <cmath>

#include "drsd/errors.hpp"
#include "drsd/signals.hpp"

using namespace drsd;

namespace {

Vec scalar(double v) { return Vec::Constant(1, v); }

DisturbanceSignal ramp_then_zero() {
  return DisturbanceSignal::function(1, 2.0, [](double t) { return scalar(t); }, scalar(0.0));
}

// The example square wave written as a general (non-constant) piece, so the
// quadrature path is exercised instead of the closed form.
DisturbanceSignal square_wave_as_function() {
  return DisturbanceSignal::function(
      1, 6.0,
      [](double t) { return scalar(static_cast<int>(std::floor(t)) % 2 == 0 ? 1.0 : -1.0); },
      scalar(0.0));
}

}  // namespace

TEST_CASE("square wave evaluation") {
  const auto w = example_square_wave();
  CHECK(w(0.5)[0] == 1.0);
  CHECK(w(1.5)[0] == -1.0);
  CHECK(w(7.0)[0] == 0.0);
  CHECK(w(0.0)[0] == 1.0);
  CHECK(w(1.0)[0] == -1.0);  // left-closed pieces
  CHECK(w(5.999)[0] == -1.0);
  CHECK(w(6.0)[0] == 0.0);
  CHECK_THROWS_AS(w(-0.1), DomainError);
}

TEST_CASE("l_infinity norm") {
  CHECK(l_infinity_norm(example_square_wave(), 10.0) == 1.0);
  CHECK(l_infinity_norm(DisturbanceSignal::zero(1), 3.0) == 0.0);
  CHECK(l_infinity_norm(DisturbanceSignal::zero(2), 100.0) == 0.0);
  CHECK(l_infinity_norm(ramp_then_zero(), 10.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(l_infinity_norm(example_square_wave(), 0.0), DomainError);
}

TEST_CASE("l_infinity norm is nondecreasing in t_end") {
  const auto w = ramp_then_zero();
  double prev = 0.0;
  for (double t = 0.1; t < 5.0; t += 0.1) {
    const double v = l_infinity_norm(w, t);
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("l_gamma norm") {
  const auto id = ComparisonFunction::identity();
  CHECK(l_gamma_norm(example_square_wave(), id, 10.0) == 6.0);
  CHECK(l_gamma_norm(DisturbanceSignal::zero(1), ComparisonFunction::power(3.0, 2.0), 7.0) ==
        0.0);
  const auto sq = ComparisonFunction::power(1.0, 2.0);
  CHECK(l_gamma_norm(DisturbanceSignal::constant(scalar(2.0)), sq, 3.0) ==
        doctest::Approx(12.0).epsilon(1e-14));
}

TEST_CASE("l_gamma norm rejects a non class-K gain") {
  const ComparisonFunction bad(ComparisonClass::K, [](double s) { return -s; }, "-s");
  CHECK_THROWS_AS(l_gamma_norm(example_square_wave(), bad, 1.0), CertificateError);
}

TEST_CASE("closed form and quadrature agree on the square wave") {
  const auto id = ComparisonFunction::identity();
  const auto sq = ComparisonFunction::power(1.0, 2.0);
  const auto exact = example_square_wave();
  const auto general = square_wave_as_function();
  for (double t_end : {0.7, 1.0, 2.5, 6.0, 9.0}) {
    CHECK(general.gamma_integral(id, 0.0, t_end) ==
          doctest::Approx(exact.gamma_integral(id, 0.0, t_end)).epsilon(1e-8));
    CHECK(general.gamma_integral(sq, 0.0, t_end) ==
          doctest::Approx(exact.gamma_integral(sq, 0.0, t_end)).epsilon(1e-8));
  }
}

TEST_CASE("l_gamma norm is additive over concatenation") {
  const auto sq = ComparisonFunction::power(1.0, 2.0);
  const auto id = ComparisonFunction::identity();
  const std::vector<DisturbanceSignal> signals = {example_square_wave(), ramp_then_zero(),
                                                  square_wave_as_function()};
  for (const auto& w : signals) {
    for (double t1 : {0.3, 1.0, 1.7, 4.2}) {
      for (double t2 : {4.5, 6.0, 8.0}) {
        for (const auto* g : {&sq, &id}) {
          const double whole = l_gamma_norm(w, *g, t2);
          const double split = l_gamma_norm(w, *g, t1) + l_gamma_norm(w.shifted(t1), *g, t2 - t1);
          CHECK(split == doctest::Approx(whole).epsilon(1e-8));
        }
      }
    }
  }
}

TEST_CASE("shifted restriction reads the original signal") {
  const auto w = example_square_wave();
  for (double offset : {0.05, 0.95, 1.0, 2.3, 5.9, 6.5}) {
    const auto s = w.shifted(offset);
    for (double t : {0.0, 0.01, 0.5, 1.2, 3.0}) {
      CHECK(s(t)[0] == w(offset + t)[0]);
    }
  }
  const auto r = ramp_then_zero().shifted(0.5);
  CHECK(r(1.0)[0] == doctest::Approx(1.5));
  CHECK(r(2.0)[0] == 0.0);
}

TEST_CASE("breakpoints and integrals") {
  const auto w = example_square_wave();
  const auto bps = w.breakpoints(0.5, 3.5);
  REQUIRE(bps.size() == 3);
  CHECK(bps[0] == 1.0);
  CHECK(bps[2] == 3.0);
  CHECK(w.integral(0.0, 2.0)[0] == 0.0);
  CHECK(w.integral(0.0, 1.5)[0] == 0.5);
  CHECK(w.integral(5.5, 8.0)[0] == -0.5);
}

TEST_CASE("membership of the square wave in L_inf balls") {
  const auto w = example_square_wave();
  for (double delta : {0.5, 0.99, 1.0, 1.01, 2.0}) {
    // Strict inclusion |w|_inf < delta, as in the open-ball convention.
    CHECK((l_infinity_norm(w, 10.0) < delta) == (delta > 1.0));
  }
}

TEST_CASE("piece validation") {
  CHECK_THROWS_AS(DisturbanceSignal::piecewise_constant({{0.5, 1.0, scalar(1.0)}}, scalar(0.0)),
                  DomainError);
  CHECK_THROWS_AS(
      DisturbanceSignal::piecewise_constant({{0.0, 1.0, scalar(1.0)}, {1.5, 2.0, scalar(1.0)}},
                                            scalar(0.0)),
      DomainError);
  CHECK_THROWS_AS(DisturbanceSignal::piecewise_constant({{0.0, 1.0, Vec::Zero(2)}}, scalar(0.0)),
                  DomainError);
}

TEST_CASE("comparison function validation") {
  const GridSpec grid{};
  CHECK(validate_comparison_function(ComparisonFunction::identity(), ComparisonClass::KInf, grid)
            .passed());

  const ComparisonFunction sat(ComparisonClass::K, [](double s) { return s / (1.0 + s); },
                               "s/(1+s)");
  const auto as_kinf = validate_comparison_function(sat, ComparisonClass::KInf, grid);
  CHECK_FALSE(as_kinf.passed());
  CHECK_FALSE(as_kinf.divergent);
  CHECK(validate_comparison_function(sat, ComparisonClass::K, grid).passed());

  const ComparisonFunction neg(ComparisonClass::PD, [](double s) { return -s; }, "-s");
  const auto pd = validate_comparison_function(neg, ComparisonClass::PD, grid);
  CHECK_FALSE(pd.passed());
  CHECK_FALSE(pd.positive);

  const ComparisonFunction log1p(ComparisonClass::KInf, [](double s) { return std::log1p(s); },
                                 "log(1+s)");
  CHECK(validate_comparison_function(log1p, ComparisonClass::KInf, grid).passed());

  // PD but not monotone.
  const ComparisonFunction bump(ComparisonClass::PD,
                                [](double s) { return s * std::exp(-s); }, "s e^-s");
  CHECK(validate_comparison_function(bump, ComparisonClass::PD, grid).passed());
  CHECK_FALSE(validate_comparison_function(bump, ComparisonClass::K, grid).passed());

  const ComparisonFunction offset(ComparisonClass::K, [](double s) { return 1.0 + s; }, "1+s");
  CHECK_FALSE(validate_comparison_function(offset, ComparisonClass::K, grid).zero_at_zero);
}

TEST_CASE("KL sections") {
  const ComparisonFunction beta([](double r, double s) { return r * std::exp(-s); }, "r e^-s");
  CHECK(validate_comparison_function(beta, ComparisonClass::KL, GridSpec{10.0, 201, 50.0})
            .passed());
  const ComparisonFunction grows([](double r, double s) { return r * (1.0 + s); }, "r (1+s)");
  const auto rep = validate_comparison_function(grows, ComparisonClass::KL, GridSpec{});
  CHECK_FALSE(rep.passed());
  CHECK_FALSE(rep.decreasing_in_time);
}

TEST_CASE("inverse round trip") {
  const auto p = ComparisonFunction::power(2.0, 3.0);
  REQUIRE(p.has_inverse());
  const auto rep = validate_comparison_function(p, ComparisonClass::KInf, GridSpec{});
  REQUIRE(rep.inverse_roundtrip.has_value());
  CHECK(*rep.inverse_roundtrip);

  const ComparisonFunction wrong(
      ComparisonClass::KInf, [](double s) { return 2.0 * s; }, "2s",
      [](double v) { return v; });
  const auto bad = validate_comparison_function(wrong, ComparisonClass::KInf, GridSpec{});
  REQUIRE(bad.inverse_roundtrip.has_value());
  CHECK_FALSE(*bad.inverse_roundtrip);
  CHECK_FALSE(bad.passed());
}

TEST_CASE("comparison class names round trip") {
  for (auto c : {ComparisonClass::PD, ComparisonClass::K, ComparisonClass::KInf,
                 ComparisonClass::KL}) {
    CHECK(comparison_class_from_string(to_string(c)) == c);
  }
}
