#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "swlw/grid.hpp"
#include "swlw/stress.hpp"

namespace swlw {

/// Trapezoidal int |u|^2 dx.
double mass(const SimState& state, const Grid& grid);

/// Discrete energy
///   int |u_x|^2 + (alpha/2) int |u|^4 + int v |u|^2 + (1/2) int w^2 + int Sigma(v)
/// with u_x taken as the forward difference on each cell and the remaining
/// terms by the trapezoidal rule. With zero boundary values this is the
/// quantity the semi-discrete scheme balances exactly against the memory and
/// viscous powers below.
double energy(const SimState& state, const Grid& grid, const StressModel& model, double alpha);

/// h sum_j F_j w_j over interior nodes.
double memory_power(const Grid& grid, std::span<const double> memory, std::span<const double> w);

/// eps h sum_j ((w_{j+1} - w_j)/h)^2.
double viscous_power(const Grid& grid, std::span<const double> w, double eps_eff);

struct DiagnosticsRecord {
  std::size_t step = 0;
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double memory_power = 0.0;
  double viscous_power = 0.0;
  double memory_work = 0.0;   // int_0^t int F(w) w dx ds
  double viscous_work = 0.0;  // eps int_0^t int w_x^2 dx ds
  double balance_residual = 0.0;
  double max_u = 0.0;
  double max_v = 0.0;
  double max_w = 0.0;
};

/// R(t) = E(t) - E(0) - memory_work(t) + viscous_work(t) for each record.
/// The scheme satisfies dE/dt = int F(w) w - eps int w_x^2, so R vanishes for
/// the exact semi-discrete flow. Throws ConfigError for fewer than 2 records.
std::vector<double> balance_residual(std::span<const DiagnosticsRecord> history);

/// Fills memory_work/viscous_work by the trapezoidal rule over the record
/// times from the power columns, then recomputes balance_residual.
void integrate_work(std::span<DiagnosticsRecord> history);

/// Builds the record series during a run.
class DiagnosticsTracker {
 public:
  enum class Mode { record, step };

  DiagnosticsTracker(Grid grid, StressModel model, double alpha, double eps_eff, Mode mode);

  /// Per-step work increments (step mode).
  void add_step_work(double memory, double viscous);

  /// `memory` is the memory term evaluated at the state.
  const DiagnosticsRecord& record(const SimState& state, std::size_t step,
                                  std::span<const double> memory);

  const std::vector<DiagnosticsRecord>& history() const { return history_; }

 private:
  Grid grid_;
  StressModel model_;
  double alpha_;
  double eps_;
  Mode mode_;
  double step_memory_work_ = 0.0;
  double step_viscous_work_ = 0.0;
  std::vector<DiagnosticsRecord> history_;
};

/// Header "t,mass,energy,memory_work,viscous_work,balance_residual,max_u,max_v,max_w".
void write_diagnostics(std::ostream& out, std::span<const DiagnosticsRecord> history);

enum class FieldId { u, v, w };
std::string_view to_string(FieldId id);
FieldId parse_field_id(std::string_view text);

/// Modal energies of one field over the periodic extension of nodes
/// 0..J-1 (period L2 - L1). Real fields use the one-sided spectrum
/// (modes 0..J/2), u the two-sided one (modes -J/2..J/2-1 in FFT order).
/// Energies are scaled so that they sum to h sum_j |f_j|^2.
struct SpectrumReport {
  FieldId field = FieldId::w;
  double t = 0.0;
  std::vector<long> modes;
  std::vector<double> wavenumbers;
  std::vector<double> energy;

  double total() const;
  double peak() const;
};

/// Throws ConfigError when J + 1 < 16.
SpectrumReport spectrum(const SimState& state, const Grid& grid, FieldId field);

/// Modes quiet in `before` (energy <= quiet * peak) that carry energy
/// >= loud * peak in `after`. Both reports must describe the same grid.
std::vector<long> new_spectral_content(const SpectrumReport& before, const SpectrumReport& after,
                                       double quiet = 1e-6, double loud = 1e-4);

}  // namespace swlw
