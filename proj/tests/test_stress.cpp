#include <cmath>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "swlw/error.hpp"
#include "swlw/stress.hpp"

using namespace swlw;

TEST_CASE("cubic law values") {
  const StressModel m = StressModel::cubic();
  auto at0 = m.evaluate(0.0);
  CHECK(at0.sigma == 0.0);
  CHECK(at0.dsigma == 1.0);
  CHECK(at0.d2sigma == 0.0);
  CHECK(at0.energy == 0.0);
  auto at1 = m.evaluate(1.0);
  CHECK(at1.sigma == 2.0);
  CHECK(at1.dsigma == 4.0);
  CHECK(at1.d2sigma == 6.0);
  CHECK(at1.energy == 0.75);
  auto atm1 = m.evaluate(-1.0);
  CHECK(atm1.sigma == -2.0);
  CHECK(atm1.dsigma == 4.0);
  CHECK(atm1.d2sigma == -6.0);
  CHECK(atm1.energy == 0.75);
}

TEST_CASE("stored energy of custom laws by quadrature") {
  const StressModel lin = StressModel::linear();
  CHECK(lin.stored_energy(3.0) == doctest::Approx(4.5).epsilon(1e-13));
  const StressModel sine = StressModel::custom(
      "v+sin", [](double v) { return v + 0.5 * std::sin(v); },
      [](double v) { return 1.0 + 0.5 * std::cos(v); }, [](double v) { return -0.5 * std::sin(v); },
      [](double v) { return -0.5 * std::cos(v); }, 0.5);
  for (double v : {-2.0, 0.3, 1.7}) {
    CHECK(sine.stored_energy(v) == doctest::Approx(0.5 * v * v + 0.5 * (1.0 - std::cos(v))).epsilon(1e-12));
  }
}

TEST_CASE("property: Sigma(v) >= sigma0 v^2 / 2 and sigma' matches finite differences") {
  oracle::Uniform rng(42);
  const StressModel cubic = StressModel::cubic();
  for (int i = 0; i < 1000; ++i) {
    const double v = rng(-10.0, 10.0);
    CHECK(cubic.stored_energy(v) >= 0.5 * cubic.sigma0() * v * v);
    const double d = 1e-4;
    const double fd = (cubic.sigma(v + d) - cubic.sigma(v - d)) / (2.0 * d);
    CHECK(fd == doctest::Approx(cubic.dsigma(v)).epsilon(1e-7));
    const double fd2 = (cubic.dsigma(v + d) - cubic.dsigma(v - d)) / (2.0 * d);
    CHECK(fd2 == doctest::Approx(cubic.d2sigma(v)).scale(1.0).epsilon(1e-7));
  }
}

TEST_CASE("cubic law satisfies H1-H4 on [-10, 10]") {
  const HypothesisReport r = check_hypotheses(StressModel::cubic(), {-10.0, 10.0});
  CHECK(r.h1_ok);
  CHECK(r.h2_ok);
  CHECK(r.h3_ok);
  CHECK(r.h4_ok);
  REQUIRE(r.lambda0.has_value());
  CHECK(std::abs(*r.lambda0) <= 1e-6);
  CHECK(r.min_dsigma == doctest::Approx(1.0));
  CHECK(r.d2_zero_events == 1);
  CHECK_FALSE(r.caveat.empty());
}

TEST_CASE("linear law fails H2") {
  const HypothesisReport r = check_hypotheses(StressModel::linear(), {-10.0, 10.0});
  CHECK(r.h1_ok);
  CHECK_FALSE(r.h2_ok);
  CHECK_FALSE(r.lambda0.has_value());
  // sigma/Sigma = 2/v at the endpoints
  CHECK(r.h4_ratio_right == doctest::Approx(0.2));
  CHECK(r.h4_ratio_left == doctest::Approx(-0.2));
}

TEST_CASE("H1 failure reports a witness") {
  // sigma' = (v - 0.7)^2 vanishes at 0.7
  const StressModel bad = StressModel::custom(
      "degenerate",
      [](double v) { return (std::pow(v - 0.7, 3) + std::pow(0.7, 3)) / 3.0; },
      [](double v) { return (v - 0.7) * (v - 0.7); }, [](double v) { return 2.0 * (v - 0.7); },
      [](double) { return 2.0; }, 0.1);
  const HypothesisReport r = check_hypotheses(bad, {-2.0, 2.0});
  CHECK_FALSE(r.h1_ok);
  CHECK(r.min_dsigma_at == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(r.min_dsigma <= 1e-10);
}

TEST_CASE("hypothesis checker input validation") {
  CHECK_THROWS_AS(check_hypotheses(StressModel::cubic(), {1.0, 1.0}), ConfigError);
  CHECK_THROWS_AS(check_hypotheses(StressModel::cubic(), {2.0, -2.0}), ConfigError);
  CHECK_THROWS_AS(check_hypotheses(StressModel::cubic(), {-1.0, 1.0}, 50), ConfigError);
}

TEST_CASE("hypothesis report serializations") {
  const HypothesisReport r = check_hypotheses(StressModel::cubic(), {-10.0, 10.0});
  const std::string kv = to_key_value(r);
  CHECK(kv.find("h1_ok=true") != std::string::npos);
  CHECK(kv.find("h4_ok=true") != std::string::npos);
  CHECK(kv.find("h2_lambda0=0") != std::string::npos);
  const std::string text = to_text(r);
  CHECK(text.find("H3") != std::string::npos);
  CHECK(text.find("caveat") != std::string::npos);
}

TEST_CASE("named stress models") {
  CHECK(parse_stress_model("cubic").is_cubic());
  CHECK(parse_stress_model("linear").name() == "linear");
  CHECK_THROWS_AS(parse_stress_model("quartic"), ConfigError);
}

TEST_CASE("Riemann invariants: examples") {
  const StressModel m = StressModel::cubic();
  auto a = riemann_forward(m, 0.0, 0.7);
  CHECK(a.l == 0.7);
  CHECK(a.r == 0.7);
  const auto p1 = static_cast<double>(oracle::cubic_primitive(1.0L));
  auto b = riemann_forward(m, 1.0, 0.0);
  CHECK(b.l == doctest::Approx(p1).epsilon(1e-14));
  CHECK(b.r == doctest::Approx(-p1).epsilon(1e-14));
  CHECK(std::abs(b.l - 1.38017) <= 1e-5);
  auto c = riemann_forward(m, 1.0, 2.0);
  CHECK(c.l == doctest::Approx(2.0 + p1));
  CHECK(c.r == doctest::Approx(2.0 - p1));

  auto back = riemann_inverse(m, b.l, b.r);
  CHECK(back.v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(back.w == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  auto flat = riemann_inverse(m, 0.3, 0.3);
  CHECK(flat.v == 0.0);
  CHECK(flat.w == 0.3);
}

TEST_CASE("characteristic primitive by quadrature for a custom law") {
  const StressModel lin = StressModel::linear();
  CHECK(characteristic_primitive(lin, 2.5) == doctest::Approx(2.5).epsilon(1e-13));
  const StressModel cubic_custom = StressModel::custom(
      "cubic-by-quadrature", [](double v) { return v * v * v + v; },
      [](double v) { return 3.0 * v * v + 1.0; }, [](double v) { return 6.0 * v; },
      [](double) { return 6.0; }, 1.0);
  for (double v : {-4.0, -0.5, 0.9, 3.3}) {
    CHECK(characteristic_primitive(cubic_custom, v) ==
          doctest::Approx(static_cast<double>(oracle::cubic_primitive(v))).epsilon(1e-12));
  }
}

TEST_CASE("property: Riemann round trip and monotonicity") {
  oracle::Uniform rng(1234);
  const StressModel m = StressModel::cubic();
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double v = rng(-5.0, 5.0);
    const double w = rng(-5.0, 5.0);
    const auto lr = riemann_forward(m, v, w);
    const auto vw = riemann_inverse(m, lr.l, lr.r);
    worst = std::max({worst, std::abs(vw.v - v), std::abs(vw.w - w)});

    const double v2 = v + rng(1e-6, 1.0);
    const auto lr2 = riemann_forward(m, v2, w);
    CHECK(lr2.l - lr2.r > lr.l - lr.r);
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("Riemann transforms honour the valid range") {
  const StressModel limited = StressModel::custom(
      "limited", [](double v) { return v; }, [](double) { return 1.0; }, [](double) { return 0.0; },
      [](double) { return 0.0; }, 1.0, Interval{-1.0, 1.0});
  CHECK_THROWS_AS(riemann_forward(limited, 2.0, 0.0), ConfigError);
  CHECK_NOTHROW(riemann_forward(limited, 0.5, 0.0));
}

TEST_CASE("malformed custom law hits the iteration cap") {
  // sigma' is NaN away from the origin, so Newton cannot make progress.
  const StressModel broken = StressModel::custom(
      "broken", [](double v) { return v; },
      [](double v) { return std::abs(v) < 1e-3 ? 1.0 : std::nan(""); }, [](double) { return 0.0; },
      [](double) { return 0.0; }, 1.0);
  CHECK_THROWS(riemann_inverse(broken, 3.0, -3.0));
}
