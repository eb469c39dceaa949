#include "swlw/diagnostics.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <ostream>

#include "swlw/error.hpp"

namespace swlw {

namespace {

double trapezoid_weight(const Grid& grid, std::size_t j) {
  return (j == 0 || j == grid.intervals()) ? 0.5 * grid.spacing() : grid.spacing();
}

}  // namespace

double mass(const SimState& state, const Grid& grid) {
  double sum = 0.0;
  for (std::size_t j = 0; j < state.u.size(); ++j) sum += trapezoid_weight(grid, j) * std::norm(state.u[j]);
  return sum;
}

double energy(const SimState& state, const Grid& grid, const StressModel& model, double alpha) {
  const double h = grid.spacing();
  const std::size_t n = state.u.size();
  double kinetic = 0.0;
  for (std::size_t j = 0; j + 1 < n; ++j) kinetic += std::norm(state.u[j + 1] - state.u[j]);
  kinetic /= h;

  double local = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double rho = std::norm(state.u[j]);
    const double v = state.v[j];
    const double w = state.w[j];
    local += trapezoid_weight(grid, j) *
             (0.5 * alpha * rho * rho + v * rho + 0.5 * w * w + model.stored_energy(v));
  }
  return kinetic + local;
}

double memory_power(const Grid& grid, std::span<const double> memory, std::span<const double> w) {
  double sum = 0.0;
  for (std::size_t j = 1; j + 1 < w.size(); ++j) sum += memory[j] * w[j];
  return grid.spacing() * sum;
}

double viscous_power(const Grid& grid, std::span<const double> w, double eps_eff) {
  double sum = 0.0;
  for (std::size_t j = 0; j + 1 < w.size(); ++j) {
    const double d = w[j + 1] - w[j];
    sum += d * d;
  }
  return eps_eff * sum / grid.spacing();
}

std::vector<double> balance_residual(std::span<const DiagnosticsRecord> history) {
  if (history.size() < 2) throw ConfigError("balance_residual: need at least 2 records");
  std::vector<double> r(history.size());
  const double e0 = history.front().energy;
  for (std::size_t k = 0; k < history.size(); ++k) {
    r[k] = history[k].energy - e0 - history[k].memory_work + history[k].viscous_work;
  }
  return r;
}

void integrate_work(std::span<DiagnosticsRecord> history) {
  if (history.empty()) return;
  history[0].memory_work = 0.0;
  history[0].viscous_work = 0.0;
  for (std::size_t k = 1; k < history.size(); ++k) {
    const double dt = history[k].t - history[k - 1].t;
    history[k].memory_work =
        history[k - 1].memory_work + 0.5 * dt * (history[k - 1].memory_power + history[k].memory_power);
    history[k].viscous_work = history[k - 1].viscous_work +
                              0.5 * dt * (history[k - 1].viscous_power + history[k].viscous_power);
  }
  const double e0 = history[0].energy;
  for (auto& rec : history) rec.balance_residual = rec.energy - e0 - rec.memory_work + rec.viscous_work;
}

DiagnosticsTracker::DiagnosticsTracker(Grid grid, StressModel model, double alpha, double eps_eff,
                                       Mode mode)
    : grid_(grid), model_(std::move(model)), alpha_(alpha), eps_(eps_eff), mode_(mode) {}

void DiagnosticsTracker::add_step_work(double memory, double viscous) {
  step_memory_work_ += memory;
  step_viscous_work_ += viscous;
}

const DiagnosticsRecord& DiagnosticsTracker::record(const SimState& state, std::size_t step,
                                                    std::span<const double> memory) {
  DiagnosticsRecord rec;
  rec.step = step;
  rec.t = state.t;
  rec.mass = mass(state, grid_);
  rec.energy = energy(state, grid_, model_, alpha_);
  rec.memory_power = memory_power(grid_, memory, state.w);
  rec.viscous_power = viscous_power(grid_, state.w, eps_);
  for (const auto& z : state.u) rec.max_u = std::max(rec.max_u, std::abs(z));
  for (double a : state.v) rec.max_v = std::max(rec.max_v, std::abs(a));
  for (double a : state.w) rec.max_w = std::max(rec.max_w, std::abs(a));

  if (mode_ == Mode::step) {
    rec.memory_work = step_memory_work_;
    rec.viscous_work = step_viscous_work_;
  } else if (!history_.empty()) {
    const auto& prev = history_.back();
    const double dt = rec.t - prev.t;
    rec.memory_work = prev.memory_work + 0.5 * dt * (prev.memory_power + rec.memory_power);
    rec.viscous_work = prev.viscous_work + 0.5 * dt * (prev.viscous_power + rec.viscous_power);
  }
  const double e0 = history_.empty() ? rec.energy : history_.front().energy;
  rec.balance_residual = rec.energy - e0 - rec.memory_work + rec.viscous_work;
  history_.push_back(rec);
  return history_.back();
}

void write_diagnostics(std::ostream& out, std::span<const DiagnosticsRecord> history) {
  out << "t,mass,energy,memory_work,viscous_work,balance_residual,max_u,max_v,max_w\n";
  char line[512];
  for (const auto& r : history) {
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.t, r.mass, r.energy, r.memory_work, r.viscous_work, r.balance_residual,
                  r.max_u, r.max_v, r.max_w);
    out << line;
  }
}

std::string_view to_string(FieldId id) {
  switch (id) {
    case FieldId::u: return "u";
    case FieldId::v: return "v";
    case FieldId::w: return "w";
  }
  return "?";
}

FieldId parse_field_id(std::string_view text) {
  if (text == "u") return FieldId::u;
  if (text == "v") return FieldId::v;
  if (text == "w") return FieldId::w;
  throw ConfigError("unknown field '" + std::string(text) + "' (expected u, v or w)");
}

double SpectrumReport::total() const {
  double s = 0.0;
  for (double e : energy) s += e;
  return s;
}

double SpectrumReport::peak() const {
  return energy.empty() ? 0.0 : *std::max_element(energy.begin(), energy.end());
}

namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
struct PlanDestroy {
  void operator()(fftw_plan p) const { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDestroy>;

}  // namespace

SpectrumReport spectrum(const SimState& state, const Grid& grid, FieldId field) {
  if (grid.size() < 16) throw ConfigError("spectrum: need at least 16 grid nodes");
  if (!state.matches(grid)) throw StateError("spectrum: state does not match grid");

  const std::size_t n = grid.intervals();
  const int ni = static_cast<int>(n);
  const double scale = grid.spacing() / static_cast<double>(n);
  const double k0 = 2.0 * std::numbers::pi / grid.length();

  SpectrumReport rep;
  rep.field = field;
  rep.t = state.t;

  std::unique_ptr<fftw_complex, FftwFree> out(fftw_alloc_complex(n));
  if (field == FieldId::u) {
    std::unique_ptr<fftw_complex, FftwFree> in(fftw_alloc_complex(n));
    PlanHandle plan(fftw_plan_dft_1d(ni, in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE));
    for (std::size_t j = 0; j < n; ++j) {
      in.get()[j][0] = state.u[j].real();
      in.get()[j][1] = state.u[j].imag();
    }
    fftw_execute(plan.get());
    for (std::size_t m = 0; m < n; ++m) {
      const long mode = m < (n + 1) / 2 ? static_cast<long>(m) : static_cast<long>(m) - ni;
      const double re = out.get()[m][0];
      const double im = out.get()[m][1];
      rep.modes.push_back(mode);
      rep.wavenumbers.push_back(k0 * static_cast<double>(mode));
      rep.energy.push_back(scale * (re * re + im * im));
    }
    return rep;
  }

  const RealField& f = field == FieldId::v ? state.v : state.w;
  std::unique_ptr<double, FftwFree> in(fftw_alloc_real(n));
  PlanHandle plan(fftw_plan_dft_r2c_1d(ni, in.get(), out.get(), FFTW_ESTIMATE));
  std::copy_n(f.begin(), n, in.get());
  fftw_execute(plan.get());
  for (std::size_t m = 0; m <= n / 2; ++m) {
    const double re = out.get()[m][0];
    const double im = out.get()[m][1];
    const bool paired = m != 0 && !(n % 2 == 0 && m == n / 2);
    rep.modes.push_back(static_cast<long>(m));
    rep.wavenumbers.push_back(k0 * static_cast<double>(m));
    rep.energy.push_back(scale * (paired ? 2.0 : 1.0) * (re * re + im * im));
  }
  return rep;
}

std::vector<long> new_spectral_content(const SpectrumReport& before, const SpectrumReport& after,
                                       double quiet, double loud) {
  if (before.modes != after.modes) throw StateError("spectra describe different grids");
  const double peak_before = before.peak();
  const double peak_after = after.peak();
  std::vector<long> found;
  for (std::size_t m = 0; m < before.energy.size(); ++m) {
    if (before.energy[m] <= quiet * peak_before && after.energy[m] >= loud * peak_after) {
      found.push_back(before.modes[m]);
    }
  }
  return found;
}

}  // namespace swlw
