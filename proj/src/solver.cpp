#include "swlw/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "swlw/error.hpp"

namespace swlw {

namespace {

constexpr Complex kI{0.0, 1.0};

void resize_like(SimState& s, std::size_t n) {
  s.u.assign(n, Complex{});
  s.v.assign(n, 0.0);
  s.w.assign(n, 0.0);
}

// y + c * k, interior only; boundary rows stay zero.
void axpy_stage(const SimState& y, double c, const Derivative& k, SimState& out) {
  const std::size_t n = y.size();
  out.u[0] = out.u[n - 1] = Complex{};
  out.v[0] = out.v[n - 1] = 0.0;
  out.w[0] = out.w[n - 1] = 0.0;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    out.u[j] = y.u[j] + c * k.du[j];
    out.v[j] = y.v[j] + c * k.dv[j];
    out.w[j] = y.w[j] + c * k.dw[j];
  }
}

std::string blow_up_context(const SimState& s, const Grid& grid, std::size_t step) {
  std::size_t at = 0;
  const char* field = "u";
  double worst = -1.0;
  auto scan = [&](auto&& value, const char* name) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double a = value(j);
      if (!std::isfinite(a)) {
        if (worst != std::numeric_limits<double>::infinity()) {
          worst = std::numeric_limits<double>::infinity();
          at = j;
          field = name;
        }
      } else if (a > worst) {
        worst = a;
        at = j;
        field = name;
      }
    }
  };
  scan([&](std::size_t j) { return std::abs(s.u[j]); }, "u");
  scan([&](std::size_t j) { return std::abs(s.v[j]); }, "v");
  scan([&](std::size_t j) { return std::abs(s.w[j]); }, "w");
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "non-finite solution at step %zu (t = %.6g); first offending field %s at j = %zu, "
                "x = %.6g",
                step, s.t, field, at, grid.x(at));
  return buf;
}

}  // namespace

Derivative Derivative::zeros(std::size_t n) {
  return {ComplexField(n, Complex{}), RealField(n, 0.0), RealField(n, 0.0)};
}

RhsCoefficients make_coefficients(const SimConfig& config, double memory_weight) {
  const double h = config.grid.spacing();
  RhsCoefficients c;
  c.inv_h2 = 1.0 / (h * h);
  c.inv_2h = 0.5 / h;
  c.coupling = config.coupling == CouplingMode::consistent ? c.inv_2h : c.inv_h2;
  c.viscosity = config.viscosity.stencil_coefficient(h);
  c.alpha = config.alpha;
  c.memory_weight = memory_weight;
  return c;
}

void evaluate_rhs(const SimState& state, std::span<const double> memory_offset,
                  const RhsCoefficients& coeffs, const StressModel& stress, Derivative& out,
                  std::vector<double>& scratch) {
  const std::size_t n = state.size();
  if (out.du.size() != n) out = Derivative::zeros(n);
  scratch.resize(2 * n);
  double* sig = scratch.data();
  double* rho = scratch.data() + n;
  const Complex* u = state.u.data();
  const double* v = state.v.data();
  const double* w = state.w.data();

  if (stress.is_cubic()) {
    for (std::size_t j = 0; j < n; ++j) sig[j] = v[j] * v[j] * v[j] + v[j];
  } else {
    for (std::size_t j = 0; j < n; ++j) sig[j] = stress.sigma(v[j]);
  }
  for (std::size_t j = 0; j < n; ++j) rho[j] = std::norm(u[j]);

  const double mw = coeffs.memory_weight;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const Complex lap = u[j + 1] - 2.0 * u[j] + u[j - 1];
    out.du[j] = kI * (coeffs.inv_h2 * lap - (coeffs.alpha * rho[j] + v[j]) * u[j]);
    out.dv[j] = coeffs.inv_2h * (w[j + 1] - w[j - 1]);
    out.dw[j] = coeffs.inv_2h * (sig[j + 1] - sig[j - 1]) +
                coeffs.viscosity * (w[j + 1] - 2.0 * w[j] + w[j - 1]) +
                coeffs.coupling * (rho[j + 1] - rho[j - 1]) + mw * w[j] - memory_offset[j];
  }
  out.du[0] = out.du[n - 1] = Complex{};
  out.dv[0] = out.dv[n - 1] = 0.0;
  out.dw[0] = out.dw[n - 1] = 0.0;
}

Derivative semidiscrete_rhs(const SimState& state, const MemoryAccumulator& memory,
                            const SimConfig& config) {
  RealField offset(state.size(), 0.0);
  memory.frozen_offset(state.w, state.t, offset);
  Derivative out = Derivative::zeros(state.size());
  std::vector<double> scratch;
  evaluate_rhs(state, offset, make_coefficients(config, memory.weight()), config.stress, out,
               scratch);
  return out;
}

double stability_bound(const SimConfig& config) {
  const double h = config.grid.spacing();
  const double schroedinger = 2.0 * std::numbers::sqrt2 * h * h / 4.0;
  const double eps = config.viscosity.effective(h);
  const double parabolic = eps > 0.0 ? h * h / (2.0 * eps) : std::numeric_limits<double>::infinity();
  return std::min(schroedinger, parabolic);
}

double stable_dt(const SimConfig& config) { return config.safety_factor * stability_bound(config); }

Solver::Solver(SimConfig config) : Solver(config, build_initial_state(config)) {}

Solver::Solver(SimConfig config, SimState initial)
    : config_((validate(config), std::move(config))),
      plan_(plan_steps(config_)),
      state_(std::move(initial)),
      memory_(config_.kernel, state_.w, plan_.dt, config_.memory_rule, config_.t_end) {
  if (!state_.matches(config_.grid)) throw StateError("initial state does not match the grid");
  if (!state_.all_finite()) throw StateError("initial state contains non-finite values");
  state_.t = 0.0;
  state_.zero_boundaries();
  memory_.reset(state_.w);
  coeffs_ = make_coefficients(config_, memory_.weight());
  const std::size_t n = state_.size();
  offset_.assign(n, 0.0);
  for (auto& k : k_) k = Derivative::zeros(n);
  resize_like(stage_, n);
  resize_like(next_, n);
}

double Solver::epsilon_effective() const {
  return config_.viscosity.effective(config_.grid.spacing());
}

void Solver::stage_rhs(const SimState& stage, double t, Derivative& k) {
  evaluate_rhs(stage, offset_, coeffs_, config_.stress, k, scratch_);
  if (source_) {
    source_(t, config_.grid, k);
    const std::size_t n = stage.size();
    k.du[0] = k.du[n - 1] = Complex{};
    k.dv[0] = k.dv[n - 1] = 0.0;
    k.dw[0] = k.dw[n - 1] = 0.0;
  }
}

double Solver::stage_power(const SimState& stage) const {
  double sum = 0.0;
  const double mw = coeffs_.memory_weight;
  for (std::size_t j = 1; j + 1 < stage.size(); ++j) {
    sum += (mw * stage.w[j] - offset_[j]) * stage.w[j];
  }
  return config_.grid.spacing() * sum;
}

void Solver::step() {
  const double dt = plan_.dt;
  const double t = state_.t;
  const std::size_t n = state_.size();
  memory_.frozen_offset(state_.w, t, offset_);

  const double eps = epsilon_effective();
  StepWork work;
  auto tally = [&](const SimState& s, std::size_t i) {
    if (!track_work_) return;
    work.memory += dt * rk4::kWeights[i] * stage_power(s);
    work.viscous += dt * rk4::kWeights[i] * viscous_power(config_.grid, s.w, eps);
  };

  stage_rhs(state_, t, k_[0]);
  tally(state_, 0);
  for (std::size_t i = 1; i < 4; ++i) {
    axpy_stage(state_, rk4::kNodes[i] * dt, k_[i - 1], stage_);
    stage_rhs(stage_, t + rk4::kNodes[i] * dt, k_[i]);
    tally(stage_, i);
  }

  const double b0 = dt * rk4::kWeights[0];
  const double b1 = dt * rk4::kWeights[1];
  const double b2 = dt * rk4::kWeights[2];
  const double b3 = dt * rk4::kWeights[3];
  for (std::size_t j = 1; j + 1 < n; ++j) {
    next_.u[j] = state_.u[j] + (b0 * k_[0].du[j] + b1 * k_[1].du[j] + b2 * k_[2].du[j] +
                                b3 * k_[3].du[j]);
    next_.v[j] = state_.v[j] + (b0 * k_[0].dv[j] + b1 * k_[1].dv[j] + b2 * k_[2].dv[j] +
                                b3 * k_[3].dv[j]);
    next_.w[j] = state_.w[j] + (b0 * k_[0].dw[j] + b1 * k_[1].dw[j] + b2 * k_[2].dw[j] +
                                b3 * k_[3].dw[j]);
  }
  next_.zero_boundaries();
  next_.t = static_cast<double>(step_index_ + 1) * dt;

  if (!next_.all_finite()) {
    throw BlowUpError(blow_up_context(next_, config_.grid, step_index_ + 1));
  }

  memory_.advance(state_.w, t);
  std::swap(state_, next_);
  ++step_index_;
  last_work_ = work;
}

RealField Solver::memory_term() const { return memory_.memory_term(state_.w, state_.t); }

SimState rk4_step(const SimState& state, double dt, MemoryAccumulator& memory,
                  const SimConfig& config) {
  if (!state.matches(config.grid)) throw StateError("rk4_step: state does not match the grid");
  const std::size_t n = state.size();
  RealField offset(n, 0.0);
  memory.frozen_offset(state.w, state.t, offset);
  const RhsCoefficients coeffs = make_coefficients(config, memory.weight());
  std::vector<double> scratch;
  std::array<Derivative, 4> k;
  SimState stage;
  resize_like(stage, n);

  evaluate_rhs(state, offset, coeffs, config.stress, k[0], scratch);
  for (std::size_t i = 1; i < 4; ++i) {
    axpy_stage(state, rk4::kNodes[i] * dt, k[i - 1], stage);
    evaluate_rhs(stage, offset, coeffs, config.stress, k[i], scratch);
  }

  SimState out = state;
  for (std::size_t j = 1; j + 1 < n; ++j) {
    Complex du{};
    double dv = 0.0;
    double dw = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      du += dt * rk4::kWeights[i] * k[i].du[j];
      dv += dt * rk4::kWeights[i] * k[i].dv[j];
      dw += dt * rk4::kWeights[i] * k[i].dw[j];
    }
    out.u[j] += du;
    out.v[j] += dv;
    out.w[j] += dw;
  }
  out.zero_boundaries();
  out.t = state.t + dt;
  if (!out.all_finite()) throw BlowUpError("rk4_step: non-finite solution");
  memory.advance(state.w, state.t);
  return out;
}

std::string_view to_string(Termination status) {
  switch (status) {
    case Termination::completed: return "completed";
    case Termination::blow_up: return "blow-up";
    case Termination::user_abort: return "user-abort";
  }
  return "?";
}

RunReport run(const SimConfig& config, const RunObserver& observer) {
  validate(config);
  return run(config, build_initial_state(config), observer);
}

RunReport run(const SimConfig& config, SimState initial, const RunObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  Solver solver(config, std::move(initial));
  RunReport report;
  report.dt = solver.dt();

  double vmax = 0.0;
  for (double a : solver.state().v) vmax = std::max(vmax, std::abs(a));
  const double reach = std::max(2.0, 2.0 * vmax);
  report.hypotheses = check_hypotheses(config.stress, {-reach, reach});
  const auto& hyp = report.hypotheses;
  if (!(hyp.h1_ok && hyp.h2_ok && hyp.h3_ok && hyp.h4_ok)) {
    report.warnings.push_back("stress law '" + config.stress.name() +
                              "' does not satisfy all of H1-H4 on the sampled range");
  }
  const double tail = boundary_tail(config.grid, config.initial);
  if (tail > 1e-6) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "initial profiles reach %.3g (relative to C) at the boundary; zero boundary "
                  "values truncate them",
                  tail);
    report.warnings.emplace_back(buf);
  }

  const std::size_t steps = solver.planned_steps();
  const double dt = solver.dt();
  std::vector<std::size_t> snap_steps;
  for (double t : config.snapshot_times) {
    snap_steps.push_back(std::min(steps, static_cast<std::size_t>(std::llround(t / dt))));
  }
  std::size_t next_snap = 0;
  auto deliver_snapshots = [&](std::size_t k) {
    while (next_snap < snap_steps.size() && snap_steps[next_snap] == k) {
      SnapshotInfo info{config.snapshot_times[next_snap], solver.state().t, k};
      report.snapshots.push_back(info);
      if (observer.on_snapshot) observer.on_snapshot(solver.state(), info);
      ++next_snap;
    }
  };

  const bool per_step = config.work == WorkAccumulation::step;
  solver.track_work(per_step);
  DiagnosticsTracker tracker(config.grid, config.stress, config.alpha, solver.epsilon_effective(),
                             per_step ? DiagnosticsTracker::Mode::step
                                      : DiagnosticsTracker::Mode::record);
  auto record = [&](std::size_t k) {
    const auto& rec = tracker.record(solver.state(), k, solver.memory_term());
    if (observer.on_record) observer.on_record(rec);
  };

  record(0);
  deliver_snapshots(0);
  for (std::size_t k = 1; k <= steps; ++k) {
    if (observer.abort_requested && observer.abort_requested()) {
      report.status = Termination::user_abort;
      report.message = "aborted before step " + std::to_string(k);
      break;
    }
    try {
      solver.step();
    } catch (const BlowUpError& e) {
      report.status = Termination::blow_up;
      report.message = e.what();
      break;
    }
    if (per_step) tracker.add_step_work(solver.last_work().memory, solver.last_work().viscous);
    if (k % config.diagnostics_every == 0 || k == steps) record(k);
    deliver_snapshots(k);
  }
  if (report.status != Termination::completed && tracker.history().back().step != solver.step_index()) {
    record(solver.step_index());
  }

  report.steps = solver.step_index();
  report.records = tracker.history();
  report.last_good = solver.state();
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace swlw
