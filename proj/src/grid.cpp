#include "swlw/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "swlw/error.hpp"

namespace swlw {

Grid::Grid(double left, double right, std::size_t intervals)
    : left_(left), right_(right), intervals_(intervals) {
  if (!std::isfinite(left) || !std::isfinite(right) || !(left < right)) {
    throw ConfigError("grid: need finite L1 < L2, got [" + std::to_string(left) + ", " +
                      std::to_string(right) + "]");
  }
  if (intervals < 4) {
    throw ConfigError("grid: J must be at least 4, got " + std::to_string(intervals));
  }
  spacing_ = (right - left) / static_cast<double>(intervals);
}

std::vector<double> Grid::coordinates() const {
  std::vector<double> xs(size());
  for (std::size_t j = 0; j < xs.size(); ++j) xs[j] = x(j);
  return xs;
}

SimState SimState::zeros(const Grid& grid, double t) {
  SimState s;
  s.t = t;
  s.u.assign(grid.size(), Complex{});
  s.v.assign(grid.size(), 0.0);
  s.w.assign(grid.size(), 0.0);
  return s;
}

bool SimState::matches(const Grid& grid) const {
  return u.size() == grid.size() && v.size() == grid.size() && w.size() == grid.size();
}

bool SimState::all_finite() const {
  if (!std::isfinite(t)) return false;
  for (const auto& z : u)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  for (double a : v)
    if (!std::isfinite(a)) return false;
  for (double a : w)
    if (!std::isfinite(a)) return false;
  return true;
}

void SimState::zero_boundaries() {
  if (u.empty()) return;
  u.front() = u.back() = Complex{};
  v.front() = v.back() = 0.0;
  w.front() = w.back() = 0.0;
}

std::string_view to_string(InitialProfile profile) {
  switch (profile) {
    case InitialProfile::paper410: return "paper-410";
    case InitialProfile::zero: return "zero";
    case InitialProfile::gaussian: return "gaussian";
    case InitialProfile::table: return "table";
  }
  return "?";
}

InitialProfile parse_initial_profile(std::string_view name) {
  if (name == "paper-410") return InitialProfile::paper410;
  if (name == "zero") return InitialProfile::zero;
  if (name == "gaussian") return InitialProfile::gaussian;
  if (name == "table") return InitialProfile::table;
  throw ConfigError("unknown initial profile '" + std::string(name) +
                    "' (expected paper-410, zero, gaussian or table)");
}

namespace {

double sech(double y) { return 1.0 / std::cosh(y); }

struct ProfileValues {
  Complex u;
  double v;
  double w;
};

ProfileValues evaluate_profile(InitialProfile profile, double c, double x) {
  switch (profile) {
    case InitialProfile::paper410: {
      static const double kU = std::sqrt(50.0);
      static const double kVW = std::sqrt(20.0);
      const double phase = kCarrierWavenumber * x;
      return {c * sech(kU * x) * Complex(std::cos(phase), std::sin(phase)),
              c * sech(kVW * (x - 0.1)), c * sech(kVW * (x + 0.1))};
    }
    case InitialProfile::gaussian:
      return {Complex(c * std::exp(-25.0 * x * x), 0.0),
              c * std::exp(-10.0 * (x - 0.1) * (x - 0.1)),
              c * std::exp(-10.0 * (x + 0.1) * (x + 0.1))};
    case InitialProfile::zero:
    case InitialProfile::table:
      break;
  }
  return {Complex{}, 0.0, 0.0};
}

}  // namespace

SimState build_initial_state(const Grid& grid, const InitialData& data) {
  if (!std::isfinite(data.amplitude)) throw ConfigError("initial amplitude must be finite");

  if (data.profile == InitialProfile::table) {
    if (!data.table) throw ConfigError("initial profile 'table' requires table data");
    if (!data.table->matches(grid)) {
      throw ConfigError("initial table has " + std::to_string(data.table->size()) +
                        " nodes, grid has " + std::to_string(grid.size()));
    }
    SimState s = *data.table;
    s.t = 0.0;
    s.zero_boundaries();
    return s;
  }

  if (data.profile == InitialProfile::paper410 && data.amplitude != 0.0 &&
      !data.allow_underresolved) {
    const double wavelength = 2.0 * std::numbers::pi / kCarrierWavenumber;
    const double points = wavelength / grid.spacing();
    if (points < kMinPointsPerWavelength) {
      throw ConfigError("grid too coarse for the e^{30ix} carrier: " + std::to_string(points) +
                        " points per wavelength (need " +
                        std::to_string(kMinPointsPerWavelength) + ")");
    }
  }

  SimState s = SimState::zeros(grid);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto p = evaluate_profile(data.profile, data.amplitude, grid.x(j));
    s.u[j] = p.u;
    s.v[j] = p.v;
    s.w[j] = p.w;
  }
  s.zero_boundaries();
  return s;
}

double boundary_tail(const Grid& grid, const InitialData& data) {
  if (data.profile == InitialProfile::zero || data.profile == InitialProfile::table) return 0.0;
  double tail = 0.0;
  for (double x : {grid.left(), grid.right()}) {
    const auto p = evaluate_profile(data.profile, 1.0, x);
    tail = std::max({tail, std::abs(p.u), std::abs(p.v), std::abs(p.w)});
  }
  return tail;
}

}  // namespace swlw
