#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "swlw/diagnostics.hpp"
#include "swlw/error.hpp"
#include "swlw/solver.hpp"

using namespace swlw;

namespace {

double l2_squared(const Grid& g, const SimState& s, FieldId f) {
  double sum = 0.0;
  for (std::size_t j = 0; j < g.intervals(); ++j) {
    if (f == FieldId::u) sum += std::norm(s.u[j]);
    if (f == FieldId::v) sum += s.v[j] * s.v[j];
    if (f == FieldId::w) sum += s.w[j] * s.w[j];
  }
  return g.spacing() * sum;
}

SimState random_state(const Grid& g, oracle::Uniform& rng) {
  SimState s = SimState::zeros(g);
  for (std::size_t j = 1; j < g.intervals(); ++j) {
    s.u[j] = Complex(rng(-1.0, 1.0), rng(-1.0, 1.0));
    s.v[j] = rng(0.0, 1.0);
    s.w[j] = rng(-1.0, 1.0);
  }
  return s;
}

}  // namespace

TEST_CASE("mass of simple states") {
  const Grid g(-2.0, 2.0, 4000);
  CHECK(mass(SimState::zeros(g), g) == 0.0);
  const SimState s = build_initial_state(g, {});
  CHECK(mass(s, g) == doctest::Approx(2.0 / std::sqrt(50.0)).epsilon(1e-10));
  CHECK(2.0 / std::sqrt(50.0) == doctest::Approx(0.28284).epsilon(1e-5));
}

TEST_CASE("property: mass is quadratic in amplitude and phase invariant") {
  oracle::Uniform rng(17);
  const Grid g(-1.0, 1.0, 256);
  for (int trial = 0; trial < 50; ++trial) {
    SimState s = random_state(g, rng);
    const double m = mass(s, g);
    const double lambda = rng(-4.0, 4.0);
    const double theta = rng(0.0, 2.0 * std::numbers::pi);
    SimState scaled = s;
    SimState rotated = s;
    for (std::size_t j = 0; j < s.size(); ++j) {
      scaled.u[j] *= lambda;
      rotated.u[j] *= std::polar(1.0, theta);
    }
    CHECK(mass(scaled, g) == doctest::Approx(lambda * lambda * m).epsilon(1e-13));
    CHECK(mass(rotated, g) == doctest::Approx(m).epsilon(1e-14));
  }
}

TEST_CASE("energy of simple states") {
  const Grid g(-2.0, 2.0, 4000);
  const StressModel cubic = StressModel::cubic();
  CHECK(energy(SimState::zeros(g), g, cubic, 1.0) == 0.0);

  SimState s = SimState::zeros(g);
  const SimState init = build_initial_state(g, {});
  s.v = init.v;
  const long double a = std::sqrt(20.0L);
  const long double expected = oracle::simpson(
      [&](long double x) {
        const long double v = oracle::sech(a * (x - 0.1L));
        return v * v * v * v / 4.0L + v * v / 2.0L;
      },
      -2.0L, 2.0L, 20000);
  CHECK(energy(s, g, cubic, 1.0) == doctest::Approx(static_cast<double>(expected)).epsilon(1e-6));
  CHECK(energy(s, g, cubic, 1.0) > 0.0);
}

TEST_CASE("energy gradient term uses forward differences") {
  const Grid g(0.0, 1.0, 8);
  SimState s = SimState::zeros(g);
  s.u[4] = Complex(1.0, 0.0);
  // |u_x|^2 contributes 2 cells of (1/h)^2 * h; |u|^4/2 contributes h/2.
  const double h = g.spacing();
  CHECK(energy(s, g, StressModel::cubic(), 1.0) == doctest::Approx(2.0 / h + 0.5 * h));
  CHECK(energy(s, g, StressModel::cubic(), 0.0) == doctest::Approx(2.0 / h));
}

TEST_CASE("property: energy is nonnegative for alpha >= 0 and v >= 0") {
  oracle::Uniform rng(23);
  const Grid g(-1.0, 1.0, 128);
  for (int trial = 0; trial < 100; ++trial) {
    const SimState s = random_state(g, rng);
    CHECK(energy(s, g, StressModel::cubic(), rng(0.0, 3.0)) >= 0.0);
  }
}

TEST_CASE("property: energy is invariant under reflection on a symmetric grid") {
  oracle::Uniform rng(29);
  const Grid g(-1.5, 1.5, 300);
  for (int trial = 0; trial < 30; ++trial) {
    const SimState s = random_state(g, rng);
    SimState r = s;
    const std::size_t n = g.intervals();
    for (std::size_t j = 0; j <= n; ++j) {
      r.u[j] = s.u[n - j];
      r.v[j] = s.v[n - j];
      r.w[j] = s.w[n - j];
    }
    const double alpha = rng(-1.0, 2.0);
    CHECK(energy(r, g, StressModel::cubic(), alpha) ==
          doctest::Approx(energy(s, g, StressModel::cubic(), alpha)).epsilon(1e-12));
  }
}

TEST_CASE("work integration and balance residual") {
  std::vector<DiagnosticsRecord> h(3);
  for (int k = 0; k < 3; ++k) {
    h[k].t = 0.5 * k;
    h[k].energy = 10.0 + k;
    h[k].memory_power = 2.0 * k;
    h[k].viscous_power = 1.0;
  }
  integrate_work(h);
  CHECK(h[1].memory_work == doctest::Approx(0.5));
  CHECK(h[2].memory_work == doctest::Approx(2.0));
  CHECK(h[2].viscous_work == doctest::Approx(1.0));
  const auto r = balance_residual(h);
  REQUIRE(r.size() == 3);
  CHECK(r[0] == 0.0);
  CHECK(r[1] == doctest::Approx(1.0 - 0.5 + 0.5));
  CHECK(r[2] == doctest::Approx(2.0 - 2.0 + 1.0));
  CHECK(h[2].balance_residual == doctest::Approx(r[2]));
  CHECK_THROWS_AS(balance_residual(std::span<const DiagnosticsRecord>(h.data(), 1)), ConfigError);
}

TEST_CASE("zero run has an identically zero residual") {
  SimConfig c;
  c.grid = Grid(-2.0, 2.0, 200);
  c.t_end = 1e-3;
  c.initial.profile = InitialProfile::zero;
  c.diagnostics_every = 7;
  const RunReport r = run(c);
  for (double x : balance_residual(r.records)) CHECK(x == 0.0);
}

TEST_CASE("balance closes for a pure viscoelastic run") {
  SimConfig c;
  c.grid = Grid(-2.0, 2.0, 400);
  c.t_end = 5e-3;
  c.work = WorkAccumulation::step;
  c.diagnostics_every = 10;
  SimState init = build_initial_state(c);
  for (auto& z : init.u) z = Complex{};
  c.dt = 0.25 * stability_bound(c);
  const RunReport r = run(c, init);
  double worst = 0.0;
  double prev_visc = 0.0;
  for (const auto& rec : r.records) {
    worst = std::max(worst, std::abs(rec.balance_residual));
    CHECK(rec.viscous_work >= prev_visc);
    prev_visc = rec.viscous_work;
  }
  CHECK(worst <= 1e-9 * std::abs(r.records.front().energy));
  CHECK(r.records.back().viscous_work > 0.0);
}

TEST_CASE("diagnostics export") {
  std::vector<DiagnosticsRecord> h(4);
  for (int k = 0; k < 4; ++k) h[k].t = 0.1 * k;
  h[2].max_w = 1.0 / 3.0;
  std::ostringstream out;
  write_diagnostics(out, h);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,mass,energy,memory_work,viscous_work,balance_residual,max_u,max_v,max_w");
  int rows = 0;
  std::string third;
  while (std::getline(in, line)) {
    if (rows == 2) third = line;
    ++rows;
  }
  CHECK(rows == 4);
  CHECK(third.substr(third.rfind(',') + 1) == "0.33333333333333331");
}

TEST_CASE("field ids") {
  CHECK(parse_field_id("u") == FieldId::u);
  CHECK(parse_field_id("w") == FieldId::w);
  CHECK(to_string(FieldId::v) == "v");
  CHECK_THROWS_AS(parse_field_id("x"), ConfigError);
}

TEST_CASE("spectrum of a constant field") {
  const Grid g(0.0, 1.0, 64);
  SimState s = SimState::zeros(g);
  for (auto& a : s.v) a = 2.5;
  const SpectrumReport r = spectrum(s, g, FieldId::v);
  CHECK(r.modes.size() == 33);
  CHECK(r.energy[0] == doctest::Approx(2.5 * 2.5));
  for (std::size_t m = 1; m < r.energy.size(); ++m) CHECK(r.energy[m] <= 1e-25);
}

TEST_CASE("spectrum of a pure sine sits in one bin") {
  const Grid g(-2.0, 2.0, 128);
  for (long m : {1L, 5L, 17L, 63L}) {
    SimState s = SimState::zeros(g);
    for (std::size_t j = 0; j < s.size(); ++j) {
      s.v[j] = std::sin(2.0 * std::numbers::pi * static_cast<double>(m) * g.x(j) / g.length());
    }
    const SpectrumReport r = spectrum(s, g, FieldId::v);
    for (std::size_t k = 0; k < r.energy.size(); ++k) {
      if (r.modes[k] == m) {
        CHECK(r.energy[k] == doctest::Approx(0.5 * g.length()).epsilon(1e-12));
        CHECK(r.wavenumbers[k] == doctest::Approx(2.0 * std::numbers::pi * m / g.length()));
      } else {
        CHECK(r.energy[k] <= 1e-20);
      }
    }
  }
}

TEST_CASE("property: Parseval consistency") {
  oracle::Uniform rng(31);
  for (std::size_t n : {16u, 64u, 99u, 1000u}) {
    const Grid g(-1.0, 2.0, n);
    for (int trial = 0; trial < 5; ++trial) {
      const SimState s = random_state(g, rng);
      for (FieldId f : {FieldId::u, FieldId::v, FieldId::w}) {
        const SpectrumReport r = spectrum(s, g, f);
        CHECK(r.total() == doctest::Approx(l2_squared(g, s, f)).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("spectrum needs at least 16 nodes") {
  const Grid g(0.0, 1.0, 14);
  CHECK_THROWS_AS(spectrum(SimState::zeros(g), g, FieldId::w), ConfigError);
  const Grid ok(0.0, 1.0, 15);
  CHECK_NOTHROW(spectrum(SimState::zeros(ok), ok, FieldId::w));
}

TEST_CASE("new spectral content detection") {
  SpectrumReport before;
  before.modes = {0, 1, 2, 3};
  before.energy = {1.0, 1e-3, 1e-8, 1e-9};
  SpectrumReport after = before;
  after.energy = {1.0, 1e-3, 5e-4, 1e-9};
  const auto found = new_spectral_content(before, after);
  REQUIRE(found.size() == 1);
  CHECK(found[0] == 2);
  after.modes = {0, 1, 2, 4};
  CHECK_THROWS_AS(new_spectral_content(before, after), StateError);
}
