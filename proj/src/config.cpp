#include "swlw/config.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "swlw/error.hpp"
#include "swlw/solver.hpp"

namespace swlw {

namespace {

std::string number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

double ViscositySpec::effective(double h) const {
  switch (mode) {
    case Mode::paper_literal: return 0.5 * h * h * h;
    case Mode::scaled: return 0.5 * h;
    case Mode::physical: return epsilon;
  }
  return 0.0;
}

double ViscositySpec::stencil_coefficient(double h) const { return effective(h) / (h * h); }

std::string ViscositySpec::describe() const {
  switch (mode) {
    case Mode::paper_literal: return "paper-literal";
    case Mode::scaled: return "scaled";
    case Mode::physical: return "physical:" + number(epsilon);
  }
  return "?";
}

ViscositySpec parse_viscosity(const std::string& text) {
  ViscositySpec spec;
  if (text == "scaled") return spec;
  if (text == "paper-literal") {
    spec.mode = ViscositySpec::Mode::paper_literal;
    return spec;
  }
  const std::string prefix = "physical:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string value = text.substr(prefix.size());
    std::size_t used = 0;
    double eps = 0.0;
    try {
      eps = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size() || !std::isfinite(eps) || eps <= 0.0) {
      throw ConfigError("viscosity: expected physical:<eps> with eps > 0, got '" + text + "'");
    }
    spec.mode = ViscositySpec::Mode::physical;
    spec.epsilon = eps;
    return spec;
  }
  throw ConfigError("unknown viscosity mode '" + text +
                    "' (expected scaled, paper-literal or physical:<eps>)");
}

std::string_view to_string(CouplingMode mode) {
  return mode == CouplingMode::consistent ? "consistent" : "paper-literal";
}

CouplingMode parse_coupling(std::string_view text) {
  if (text == "consistent") return CouplingMode::consistent;
  if (text == "paper-literal") return CouplingMode::paper_literal;
  throw ConfigError("unknown coupling mode '" + std::string(text) +
                    "' (expected consistent or paper-literal)");
}

std::string_view to_string(MemoryRule rule) {
  return rule == MemoryRule::rectangle ? "rectangle" : "trapezoid";
}

MemoryRule parse_memory_rule(std::string_view text) {
  if (text == "rectangle") return MemoryRule::rectangle;
  if (text == "trapezoid") return MemoryRule::trapezoid;
  throw ConfigError("unknown memory rule '" + std::string(text) +
                    "' (expected rectangle or trapezoid)");
}

std::string_view to_string(WorkAccumulation mode) {
  return mode == WorkAccumulation::record ? "record" : "step";
}

WorkAccumulation parse_work_accumulation(std::string_view text) {
  if (text == "record") return WorkAccumulation::record;
  if (text == "step") return WorkAccumulation::step;
  throw ConfigError("unknown work accumulation '" + std::string(text) +
                    "' (expected record or step)");
}

void validate(const SimConfig& config) {
  if (!std::isfinite(config.t_end) || config.t_end <= 0.0) {
    throw ConfigError("t_end must be positive, got " + number(config.t_end));
  }
  if (!(config.safety_factor > 0.0 && config.safety_factor <= 1.0)) {
    throw ConfigError("safety_factor must lie in (0, 1], got " + number(config.safety_factor));
  }
  if (!std::isfinite(config.alpha)) throw ConfigError("alpha must be finite");
  if (config.diagnostics_every == 0) throw ConfigError("diagnostics_every must be at least 1");

  if (config.dt) {
    const double dt = *config.dt;
    if (!std::isfinite(dt) || dt <= 0.0) throw ConfigError("dt must be positive, got " + number(dt));
    const double limit = stable_dt(config);
    if (dt > limit && !config.allow_unstable_dt) {
      throw ConfigError("dt = " + number(dt) + " exceeds stable_dt = " + number(limit) +
                        " (set allow_unstable_dt to override)");
    }
  }

  double previous = -std::numeric_limits<double>::infinity();
  for (double t : config.snapshot_times) {
    if (!(t >= 0.0 && t <= config.t_end)) {
      throw ConfigError("snapshot time " + number(t) + " outside [0, " + number(config.t_end) + "]");
    }
    if (t < previous) throw ConfigError("snapshot times must be sorted ascending");
    previous = t;
  }

  if (config.kernel.horizon() < config.t_end) {
    throw ConfigError("kernel table covers [0, " + number(config.kernel.horizon()) +
                      "] but t_end = " + number(config.t_end));
  }

  // Resolution and table-shape checks live with the profile builder.
  (void)build_initial_state(config.grid, config.initial);
}

StepPlan plan_steps(const SimConfig& config) {
  const double target = config.dt.value_or(stable_dt(config));
  const double ratio = config.t_end / target;
  // Tolerate rounding in t_end / dt so an exact divisor is not bumped up.
  auto steps = static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
  if (steps == 0) steps = 1;
  return {config.t_end / static_cast<double>(steps), steps};
}

SimState build_initial_state(const SimConfig& config) {
  return build_initial_state(config.grid, config.initial);
}

}  // namespace swlw
