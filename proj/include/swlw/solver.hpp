#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "swlw/config.hpp"
#include "swlw/diagnostics.hpp"
#include "swlw/grid.hpp"
#include "swlw/memory.hpp"

namespace swlw {

namespace rk4 {

inline constexpr std::array<double, 4> kNodes{0.0, 0.5, 0.5, 1.0};
inline constexpr std::array<double, 4> kWeights{1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0};

/// Classical RK4 step for a scalar ODE y' = f(t, y), sharing the tableau of
/// the field stepper.
template <class F>
double scalar_step(F&& f, double t, double y, double dt) {
  const double k1 = f(t + kNodes[0] * dt, y);
  const double k2 = f(t + kNodes[1] * dt, y + kNodes[1] * dt * k1);
  const double k3 = f(t + kNodes[2] * dt, y + kNodes[2] * dt * k2);
  const double k4 = f(t + kNodes[3] * dt, y + kNodes[3] * dt * k3);
  return y + dt * (kWeights[0] * k1 + kWeights[1] * k2 + kWeights[2] * k3 + kWeights[3] * k4);
}

}  // namespace rk4

/// Time derivatives of (u, v, w); boundary entries are always zero.
struct Derivative {
  ComplexField du;
  RealField dv;
  RealField dw;

  static Derivative zeros(std::size_t n);
};

/// Stencil coefficients resolved from a configuration and grid.
struct RhsCoefficients {
  double inv_h2 = 0.0;     // 1/h^2, Laplacian of u
  double inv_2h = 0.0;     // 1/(2h), central first differences
  double coupling = 0.0;   // multiplier of |u_{j+1}|^2 - |u_{j-1}|^2
  double viscosity = 0.0;  // multiplier of w_{j+1} - 2 w_j + w_{j-1}
  double alpha = 1.0;
  double memory_weight = 0.0;  // q(0)
};

RhsCoefficients make_coefficients(const SimConfig& config, double memory_weight);

/// Extra forcing added to the interior rows (manufactured solutions).
using SourceTerm = std::function<void(double t, const Grid& grid, Derivative& accumulate)>;

/// In-place kernel of the semi-discrete system. For interior j:
///   du = (i/h^2)(u_{j+1} - 2u_j + u_{j-1}) - i alpha |u_j|^2 u_j - i v_j u_j
///   dv = (w_{j+1} - w_{j-1}) / (2h)
///   dw = (sigma(v_{j+1}) - sigma(v_{j-1})) / (2h) + viscosity term
///        + coupling (|u_{j+1}|^2 - |u_{j-1}|^2) + q(0) w_j - offset_j
/// where `memory_offset` is the frozen part of the memory term.
/// `scratch` is resized to hold sigma(v) and |u|^2.
void evaluate_rhs(const SimState& state, std::span<const double> memory_offset,
                  const RhsCoefficients& coeffs, const StressModel& stress, Derivative& out,
                  std::vector<double>& scratch);

/// Allocating convenience form; the memory term is taken from `memory` at
/// state.t.
Derivative semidiscrete_rhs(const SimState& state, const MemoryAccumulator& memory,
                            const SimConfig& config);

/// min(2 sqrt2 h^2 / 4, h^2 / (2 eps_eff)): imaginary-axis bound of RK4 for
/// the Schroedinger stencil and the explicit parabolic bound of the viscosity.
double stability_bound(const SimConfig& config);
/// safety_factor * stability_bound().
double stable_dt(const SimConfig& config);

/// Memory and viscous work done over one step.
struct StepWork {
  double memory = 0.0;
  double viscous = 0.0;
};

/// One run's stepping engine: owns the state, the memory accumulator and the
/// Runge-Kutta buffers. Not thread-safe; snapshots returned by state() are
/// never mutated in place after a step completes (the stepper swaps buffers).
class Solver {
 public:
  explicit Solver(SimConfig config);
  Solver(SimConfig config, SimState initial);

  const SimConfig& config() const { return config_; }
  const Grid& grid() const { return config_.grid; }
  const SimState& state() const { return state_; }
  const MemoryAccumulator& memory() const { return memory_; }
  double dt() const { return plan_.dt; }
  std::size_t planned_steps() const { return plan_.steps; }
  std::size_t step_index() const { return step_index_; }
  double epsilon_effective() const;
  const RhsCoefficients& coefficients() const { return coeffs_; }

  void set_source(SourceTerm source) { source_ = std::move(source); }
  /// Accumulate memory/viscous work with the stage weights on every step.
  void track_work(bool enabled) { track_work_ = enabled; }
  StepWork last_work() const { return last_work_; }

  /// Advances one RK4 step with the memory history frozen at t_n, then
  /// absorbs w^n into the accumulator. Throws BlowUpError and leaves the
  /// previous state intact when the result is not finite.
  void step();

  /// Memory term at the current state.
  RealField memory_term() const;

 private:
  void stage_rhs(const SimState& stage, double t, Derivative& k);
  double stage_power(const SimState& stage) const;

  SimConfig config_;
  StepPlan plan_;
  RhsCoefficients coeffs_;
  SimState state_;
  MemoryAccumulator memory_;
  SourceTerm source_;
  bool track_work_ = false;
  StepWork last_work_;
  std::size_t step_index_ = 0;

  RealField offset_;
  std::vector<double> scratch_;
  std::array<Derivative, 4> k_;
  SimState stage_;
  SimState next_;
};

/// Single step from `state` with a caller-owned accumulator (which is
/// advanced once).
SimState rk4_step(const SimState& state, double dt, MemoryAccumulator& memory,
                  const SimConfig& config);

struct SnapshotInfo {
  double requested_time = 0.0;
  double actual_time = 0.0;
  std::size_t step = 0;
};

enum class Termination { completed, blow_up, user_abort };
std::string_view to_string(Termination status);

/// Output consumers. Every callback is optional; snapshots are passed by const
/// reference to immutable copies.
struct RunObserver {
  std::function<void(const SimState&, const SnapshotInfo&)> on_snapshot;
  std::function<void(const DiagnosticsRecord&)> on_record;
  std::function<bool()> abort_requested;
};

struct RunReport {
  Termination status = Termination::completed;
  std::string message;
  std::vector<std::string> warnings;
  std::size_t steps = 0;
  double dt = 0.0;
  double wall_seconds = 0.0;
  std::vector<DiagnosticsRecord> records;
  std::vector<SnapshotInfo> snapshots;
  SimState last_good;
  HypothesisReport hypotheses;
};

/// Validates the config, steps to t_end, delivers snapshots at the nearest
/// completed step to each requested time and diagnostics every
/// `diagnostics_every` steps (plus the first and last step). Failed stress
/// hypotheses and visible boundary truncation of the profiles are reported as
/// warnings, not errors.
RunReport run(const SimConfig& config, const RunObserver& observer = {});
RunReport run(const SimConfig& config, SimState initial, const RunObserver& observer = {});

}  // namespace swlw
