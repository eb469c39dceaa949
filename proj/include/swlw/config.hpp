#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swlw/grid.hpp"
#include "swlw/memory.hpp"
#include "swlw/stress.hpp"

namespace swlw {

/// Artificial viscosity in the w equation.
///  - paper_literal: (h/2)(w_{j+1} - 2w_j + w_{j-1}), i.e. eps_eff = h^3/2
///  - scaled:        eps_eff (w_{j+1} - 2w_j + w_{j-1}) / h^2 with eps_eff = h/2
///  - physical:      user eps in place of eps_eff
struct ViscositySpec {
  enum class Mode { paper_literal, scaled, physical };
  Mode mode = Mode::scaled;
  double epsilon = 0.0;  // physical mode only

  /// Coefficient of w_xx the stencil approximates.
  double effective(double h) const;
  /// Multiplier of the undivided second difference.
  double stencil_coefficient(double h) const;
  std::string describe() const;
};

ViscositySpec parse_viscosity(const std::string& text);

/// Coefficient of |u_{j+1}|^2 - |u_{j-1}|^2 in the w equation.
///  - consistent:    1/(2h), the central difference of (|u|^2)_x
///  - paper_literal: 1/h^2 as printed in the reference scheme
enum class CouplingMode { consistent, paper_literal };

std::string_view to_string(CouplingMode mode);
CouplingMode parse_coupling(std::string_view text);

std::string_view to_string(MemoryRule rule);
MemoryRule parse_memory_rule(std::string_view text);

/// How the memory and viscous work integrals in the energy balance are
/// accumulated: trapezoid over diagnostics records, or per time step with the
/// Runge-Kutta stage weights.
enum class WorkAccumulation { record, step };

std::string_view to_string(WorkAccumulation mode);
WorkAccumulation parse_work_accumulation(std::string_view text);

struct SimConfig {
  Grid grid{-2.0, 2.0, 4000};
  std::optional<double> dt;  // empty: auto = stable_dt()
  double safety_factor = 0.5;
  bool allow_unstable_dt = false;
  double t_end = 0.1;
  double alpha = 1.0;
  StressModel stress = StressModel::cubic();
  KernelSpec kernel = KernelSpec::exponential(1.0);
  ViscositySpec viscosity;
  CouplingMode coupling = CouplingMode::consistent;
  MemoryRule memory_rule = MemoryRule::rectangle;
  WorkAccumulation work = WorkAccumulation::record;
  std::vector<double> snapshot_times;
  InitialData initial;
  std::size_t diagnostics_every = 100;
};

/// Throws ConfigError on the first violated rule: t_end > 0, snapshot times
/// sorted within [0, t_end], 0 < dt <= stable_dt unless overridden, safety
/// factor in (0, 1], finite alpha, cadence >= 1.
void validate(const SimConfig& config);

/// Time step actually used: dt (or auto) shrunk so that t_end is an integer
/// number of steps.
struct StepPlan {
  double dt = 0.0;
  std::size_t steps = 0;
};
StepPlan plan_steps(const SimConfig& config);

SimState build_initial_state(const SimConfig& config);

}  // namespace swlw
