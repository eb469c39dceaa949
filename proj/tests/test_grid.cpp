#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "swlw/error.hpp"
#include "swlw/grid.hpp"

using namespace swlw;

TEST_CASE("grid geometry") {
  const Grid g(-2.0, 2.0, 4000);
  CHECK(g.size() == 4001);
  CHECK(g.spacing() == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(g.x(0) == -2.0);
  CHECK(g.x(4000) == 2.0);
  CHECK(g.x(2000) == 0.0);
  CHECK(g.symmetric());
  CHECK(g.coordinates().size() == 4001);
}

TEST_CASE("grid rejects bad parameters") {
  CHECK_THROWS_AS(Grid(1.0, 1.0, 10), ConfigError);
  CHECK_THROWS_AS(Grid(2.0, -2.0, 10), ConfigError);
  CHECK_THROWS_AS(Grid(-1.0, 1.0, 3), ConfigError);
  CHECK_NOTHROW(Grid(-1.0, 1.0, 4));
}

TEST_CASE("property: random grids reproduce both endpoints and are antisymmetric") {
  oracle::Uniform rng(20240611);
  for (int trial = 0; trial < 500; ++trial) {
    const double a = rng(-50.0, 49.0);
    const double b = a + rng(1e-3, 100.0);
    const std::size_t n = rng.index(4, 100000);
    const Grid g(a, b, n);
    CHECK(g.x(0) == a);
    CHECK(g.x(n) == b);
    CHECK(g.spacing() > 0.0);
    const std::size_t j = rng.index(0, n - 1);
    CHECK(g.x(j) < g.x(j + 1));

    const double half = std::abs(b) + 1e-3;
    const Grid s(-half, half, 2 * (n / 2 + 2));
    const std::size_t k = rng.index(0, s.intervals());
    CHECK(s.x(s.intervals() - k) == -s.x(k));
  }
}

TEST_CASE("paper-410 profile at the origin") {
  const Grid g(-2.0, 2.0, 4000);
  const SimState s = build_initial_state(g, {});
  const std::size_t mid = 2000;
  const auto expected = static_cast<double>(oracle::sech(std::sqrt(20.0L) * 0.1L));
  CHECK(s.u[mid].real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.u[mid].imag() == doctest::Approx(0.0));
  CHECK(s.v[mid] == doctest::Approx(expected).epsilon(1e-14));
  CHECK(s.w[mid] == doctest::Approx(expected).epsilon(1e-14));
  CHECK(expected == doctest::Approx(0.9077).epsilon(1e-4));
}

TEST_CASE("zero profile and zero amplitude give zero fields") {
  const Grid g(-2.0, 2.0, 400);
  InitialData zero;
  zero.profile = InitialProfile::zero;
  InitialData muted;
  muted.amplitude = 0.0;
  for (const auto& data : {zero, muted}) {
    const SimState s = build_initial_state(g, data);
    REQUIRE(s.matches(g));
    for (std::size_t j = 0; j < s.size(); ++j) {
      CHECK(s.u[j] == Complex{});
      CHECK(s.v[j] == 0.0);
      CHECK(s.w[j] == 0.0);
    }
  }
}

TEST_CASE("property: modulus of u follows the sech envelope for any amplitude") {
  oracle::Uniform rng(7);
  const Grid g(-2.0, 2.0, 2000);
  for (int trial = 0; trial < 20; ++trial) {
    InitialData data;
    data.amplitude = rng(-3.0, 3.0);
    const SimState s = build_initial_state(g, data);
    for (std::size_t j = 1; j < g.intervals(); j += 37) {
      const auto env = std::abs(data.amplitude) *
                       static_cast<double>(oracle::sech(std::sqrt(50.0L) * g.x(j)));
      CHECK(std::abs(s.u[j]) == doctest::Approx(env).epsilon(1e-13));
    }
  }
}

TEST_CASE("v and w are mirror images on a symmetric grid") {
  for (std::size_t n : {400u, 1000u, 4000u}) {
    const Grid g(-2.0, 2.0, n);
    for (auto profile : {InitialProfile::paper410, InitialProfile::gaussian}) {
      InitialData data;
      data.profile = profile;
      data.allow_underresolved = true;
      const SimState s = build_initial_state(g, data);
      for (std::size_t j = 0; j <= n; ++j) CHECK(s.v[j] == s.w[n - j]);
    }
  }
}

TEST_CASE("boundary nodes are zeroed") {
  const Grid g(-0.5, 0.5, 200);
  const SimState s = build_initial_state(g, {});
  const std::size_t n = g.intervals();
  CHECK(s.u[0] == Complex{});
  CHECK(s.u[n] == Complex{});
  CHECK(s.v[0] == 0.0);
  CHECK(s.v[n] == 0.0);
  CHECK(s.w[0] == 0.0);
  CHECK(s.w[n] == 0.0);
}

TEST_CASE("under-resolved carrier is rejected unless overridden") {
  const Grid coarse(-2.0, 2.0, 100);  // h = 0.04, about 5 points per wavelength
  CHECK_THROWS_AS(build_initial_state(coarse, {}), ConfigError);
  InitialData data;
  data.allow_underresolved = true;
  CHECK_NOTHROW(build_initial_state(coarse, data));
  data = {};
  data.amplitude = 0.0;
  CHECK_NOTHROW(build_initial_state(coarse, data));
}

TEST_CASE("profile names") {
  CHECK(parse_initial_profile("paper-410") == InitialProfile::paper410);
  CHECK(parse_initial_profile("zero") == InitialProfile::zero);
  CHECK(parse_initial_profile("gaussian") == InitialProfile::gaussian);
  CHECK(parse_initial_profile("table") == InitialProfile::table);
  CHECK(to_string(InitialProfile::paper410) == "paper-410");
  CHECK_THROWS_AS(parse_initial_profile("sech"), ConfigError);
}

TEST_CASE("table profile must match the grid") {
  const Grid g(-1.0, 1.0, 8);
  InitialData data;
  data.profile = InitialProfile::table;
  CHECK_THROWS_AS(build_initial_state(g, data), ConfigError);
  data.table = SimState::zeros(Grid(-1.0, 1.0, 10));
  CHECK_THROWS_AS(build_initial_state(g, data), ConfigError);
  SimState t = SimState::zeros(g);
  for (std::size_t j = 0; j < t.size(); ++j) t.v[j] = 1.0;
  data.table = t;
  const SimState s = build_initial_state(g, data);
  CHECK(s.v[0] == 0.0);
  CHECK(s.v[4] == 1.0);
  CHECK(s.v[8] == 0.0);
}

TEST_CASE("boundary tail of the default domain") {
  // The v and w bumps are centred at +-0.1 with rate sqrt(20), so the tail at
  // |x| = 2 is sech(sqrt20 * 1.9), well above 1e-6.
  const Grid g(-2.0, 2.0, 4000);
  const auto expected = static_cast<double>(oracle::sech(std::sqrt(20.0L) * 1.9L));
  CHECK(boundary_tail(g, {}) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(boundary_tail(g, {}) > 1e-6);
  const Grid wide(-3.0, 3.0, 6000);
  const auto wide_expected = static_cast<double>(oracle::sech(std::sqrt(20.0L) * 2.9L));
  CHECK(boundary_tail(wide, {}) == doctest::Approx(wide_expected).epsilon(1e-12));
  InitialData zero;
  zero.profile = InitialProfile::zero;
  CHECK(boundary_tail(g, zero) == 0.0);
}

TEST_CASE("finiteness check") {
  const Grid g(0.0, 1.0, 4);
  SimState s = SimState::zeros(g);
  CHECK(s.all_finite());
  s.w[2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_FALSE(s.all_finite());
  s.w[2] = 0.0;
  s.u[1] = Complex(std::numeric_limits<double>::infinity(), 0.0);
  CHECK_FALSE(s.all_finite());
}
