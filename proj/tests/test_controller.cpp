#include <doctest.h>

#include <cmath>
#include <cstring>

#include "drsd/controller.hpp"
#include "drsd/errors.hpp"
#include "drsd/simloop.hpp"

using namespace drsd;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

bool same_bits(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (std::memcmp(&a[i], &b[i], sizeof(double)) != 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("example law as printed") {
  const auto law = example_law(6.0, 1.0, 2.0);
  DualRateController ctrl(law, 3, example_approx_model(0.1), 0.1);
  const Vec u = ctrl.update(v2(1.0, 0.0));
  CHECK(u[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("example law vanishes at the origin for every ell") {
  for (std::size_t ell : {1u, 2u, 6u}) {
    DualRateController ctrl(example_law(), ell, example_approx_model(0.05), 0.05);
    for (std::size_t k = 0; k < 3 * ell; ++k) {
      std::optional<Vec> meas;
      if (ctrl.expects_measurement()) meas = Vec::Zero(2);
      CHECK(ctrl.update(meas).norm() == 0.0);
    }
  }
}

TEST_CASE("law with u(0) != 0 is rejected") {
  const auto bad = expression_law("bad", 2, {"1 + x1"}, {});
  CHECK_THROWS_AS(bad.require_zero_at_zero(0.1, 0.1), DomainError);
  CHECK_THROWS_AS(DualRateController(bad, 2, example_approx_model(0.1), 0.1), DomainError);
}

TEST_CASE("measurement protocol") {
  DualRateController ctrl(example_law(), 3, example_approx_model(0.1), 0.1);
  CHECK_THROWS_AS(ctrl.update(std::nullopt), ProtocolError);
  ctrl.update(v2(0.3, 0.1));
  CHECK_THROWS_AS(ctrl.update(v2(0.3, 0.1)), ProtocolError);
  ctrl.update(std::nullopt);
  ctrl.update(std::nullopt);
  CHECK(ctrl.expects_measurement());
  CHECK_THROWS_AS(ctrl.update(std::nullopt), ProtocolError);
}

TEST_CASE("reset is bitwise exact") {
  DualRateController ctrl(example_law(), 4, example_approx_model(0.05), 0.05);
  const std::vector<Vec> meas = {v2(0.1 + 1e-17, -5.9), v2(std::nextafter(1.2, 2.0), 3.3),
                                 v2(-0.0, 1e-300)};
  for (const auto& m : meas) {
    ctrl.update(m);
    CHECK(same_bits(ctrl.estimate(), m));
    for (int i = 0; i < 3; ++i) ctrl.update(std::nullopt);
  }
}

TEST_CASE("inter-sample propagation uses the disturbance-free model") {
  const auto est = example_approx_model(0.05);
  DualRateController ctrl(example_law(), 3, est, 0.05);
  const Vec x0 = v2(0.8, -0.5);
  const Vec u0 = ctrl.update(x0);
  ctrl.update(std::nullopt);
  const Vec expected = est.step(x0, u0, DisturbanceSignal::zero(1), 0.05);
  CHECK(same_bits(ctrl.estimate(), expected));
}

TEST_CASE("ell = 1 equals the single-rate law on raw measurements") {
  const auto law = example_law();
  DualRateController ctrl(law, 1, example_approx_model(0.05), 0.05);
  for (const Vec& x : state_grid(2, 4.0, 50, 1)) {
    const Vec u = ctrl.update(x);
    CHECK(same_bits(u, law(x, 0.05, 0.05)));
    CHECK(same_bits(ctrl.estimate(), x));
  }
}

TEST_CASE("estimator ignores the actual disturbance") {
  // Within one sampling period the estimates depend only on x(0).
  auto quiet = example_setup();
  quiet.disturbance = DisturbanceSignal::zero(1);
  auto loud = example_setup();
  loud.disturbance = DisturbanceSignal::constant(Vec::Constant(1, 50.0));
  const SimulationConfig cfg{0.05, 6, 0.05, 5, v2(1.2, -5.9)};
  const auto a = simulate_closed_loop(quiet, cfg);
  const auto b = simulate_closed_loop(loud, cfg);
  REQUIRE(a.completed());
  REQUIRE(b.completed());
  for (std::size_t k = 0; k <= 5; ++k) CHECK(same_bits(a.xc[k], b.xc[k]));
  CHECK((a.x[5] - b.x[5]).norm() > 1.0);
}

TEST_CASE("lipschitz estimate") {
  CHECK(lipschitz_estimate(example_law(), 1.0, 0.1, 0.1, 500) >= 6.0);
  const auto zero = expression_law("zero", 2, {"0"}, {});
  CHECK(lipschitz_estimate(zero, 3.0, 0.1, 0.1, 200) == 0.0);
  const auto lin = expression_law("lin", 2, {"x1"}, {});
  CHECK(lipschitz_estimate(lin, 7.0, 0.1, 0.1, 500) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(lipschitz_estimate(lin, 1.0, 0.1, 0.1, 1), DomainError);
}

TEST_CASE("lipschitz estimate is nondecreasing in the radius") {
  const auto law = example_law();
  double prev = 0.0;
  for (double dx : {0.5, 1.0, 2.0, 4.0, 8.0}) {
    const double l = lipschitz_estimate(law, dx, 0.05, 0.05, 400);
    CHECK(l >= prev - 1e-9);
    prev = l;
  }
}

TEST_CASE("estimator error: zero disturbance and ell = 1") {
  auto setup = example_setup();
  setup.disturbance = DisturbanceSignal::zero(1);
  const auto tr = simulate_closed_loop(setup, {0.05, 1, 0.05, 100, v2(1.2, -5.9)});
  const auto rep = estimator_error_trace(tr, 0.0, 1.0);
  CHECK(rep.violations == 0);
  CHECK(rep.max_actual == 0.0);
}

TEST_CASE("estimator error: bound built from the observed maximum") {
  auto setup = example_setup();
  setup.disturbance = DisturbanceSignal::zero(1);
  const auto tr = simulate_closed_loop(setup, {0.05, 6, 0.05, 200, v2(1.2, -5.9)});
  const double observed = estimator_error_trace(tr, 0.0, 1.0).max_actual;
  CHECK(observed > 0.0);
  const auto rep = estimator_error_trace(tr, observed / tr.T, 1.0);
  CHECK(rep.violations == 0);
}

TEST_CASE("estimator error bound on the worked example with fitted constants") {
  const auto setup = example_setup();
  const double T = 0.05;
  const std::size_t ell = 6;
  const auto tr = simulate_closed_loop(setup, {T, ell, T, 400, v2(1.2, -5.9)});
  REQUIRE(tr.completed());
  // |df/dx| <= |x| + 1 for the example plant; take the visited radius.
  double umax = 0.0;
  for (const auto& u : tr.u) umax = std::max(umax, u.norm());
  const double dx = tr.max_norm() + 0.5;
  const double L = dx + 1.0;
  const ExactStepOracle oracle(setup.plant);
  const auto prof = consistency_profile(oracle, example_approx_model(T), {dx, umax, 1.0}, T,
                                        {T}, 1024);
  const double rho = prof.front().rho;
  const double eps = static_cast<double>(ell - 1) * std::exp(L * (ell - 1) * T) * rho;
  const auto rep = estimator_error_trace(tr, eps, L);
  CHECK(rep.violations == 0);
  CHECK(rep.max_actual > 0.0);
}

TEST_CASE("estimator error needs estimator states") {
  auto setup = example_setup();
  const auto tr = simulate_single_rate(setup, {0.05, 1, 0.05, 10, v2(1.0, 0.0)});
  CHECK_THROWS_AS(estimator_error_trace(tr, 1.0, 1.0), ProtocolError);
}
