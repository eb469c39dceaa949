#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace swlw {

using Complex = std::complex<double>;
using ComplexField = std::vector<Complex>;
using RealField = std::vector<double>;

/// Uniform mesh x_j = L1 + j h, j = 0..J, on [L1, L2].
class Grid {
 public:
  /// Throws ConfigError unless left < right and intervals >= 4.
  Grid(double left, double right, std::size_t intervals);

  double left() const { return left_; }
  double right() const { return right_; }
  std::size_t intervals() const { return intervals_; }
  std::size_t size() const { return intervals_ + 1; }
  double spacing() const { return spacing_; }
  double length() const { return right_ - left_; }

  // Evaluated as (L1 (J - j) + L2 j) / J so that the endpoints are exact and
  // a grid with L1 = -L2 is exactly antisymmetric: x(J - j) == -x(j).
  double x(std::size_t j) const {
    if (j == 0) return left_;
    if (j == intervals_) return right_;
    const auto jj = static_cast<double>(j);
    const auto n = static_cast<double>(intervals_);
    return (left_ * (n - jj) + right_ * jj) / n;
  }

  std::vector<double> coordinates() const;

  bool symmetric() const { return left_ == -right_; }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  double left_;
  double right_;
  std::size_t intervals_;
  double spacing_;
};

/// Field triple at one time level, stored as separate contiguous arrays.
struct SimState {
  double t = 0.0;
  ComplexField u;  // short-wave envelope
  RealField v;     // deformation gradient
  RealField w;     // long-wave velocity

  static SimState zeros(const Grid& grid, double t = 0.0);

  std::size_t size() const { return u.size(); }
  bool matches(const Grid& grid) const;
  bool all_finite() const;
  void zero_boundaries();
};

enum class InitialProfile {
  paper410,  // C e^{30ix} sech(sqrt50 x), C sech(sqrt20 (x-0.1)), C sech(sqrt20 (x+0.1))
  zero,
  gaussian,  // C e^{-25x^2}, C e^{-10(x-0.1)^2}, C e^{-10(x+0.1)^2}
  table,     // values supplied explicitly
};

std::string_view to_string(InitialProfile profile);
InitialProfile parse_initial_profile(std::string_view name);

struct InitialData {
  InitialProfile profile = InitialProfile::paper410;
  double amplitude = 1.0;
  /// Required for InitialProfile::table; must match the grid size.
  std::optional<SimState> table;
  /// Skip the points-per-wavelength check for the e^{30ix} carrier.
  bool allow_underresolved = false;
};

/// Wavenumber of the carrier in the paper-410 envelope.
inline constexpr double kCarrierWavenumber = 30.0;
inline constexpr double kMinPointsPerWavelength = 8.0;

/// Samples the selected profile on the grid at t = 0 and zeroes the boundary
/// nodes. Throws ConfigError when the carrier is under-resolved or a table
/// does not match the grid.
SimState build_initial_state(const Grid& grid, const InitialData& data);

/// Largest modulus of the un-truncated profile at the two endpoints, relative
/// to the amplitude. Used to warn when zero boundaries cut a visible tail.
double boundary_tail(const Grid& grid, const InitialData& data);

}  // namespace swlw
