#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swlw/grid.hpp"

namespace swlw {

/// q(t) = amplitude * exp(-rate * t); the resolvent of every kernel of the
/// form k(t) = a exp(-b t) has this shape.
struct ExponentialResolvent {
  double amplitude = 0.0;
  double rate = 0.0;

  double q(double t) const;
  double q_prime(double t) const;
};

/// Memory kernel k(t), t >= 0.
class KernelSpec {
 public:
  enum class Kind { exponential, constant, table };

  /// k(t) = exp(-rate t); rate 1 is the kernel used in the reference runs.
  static KernelSpec exponential(double rate);
  /// k(t) = c; c = 0 switches the memory off.
  static KernelSpec constant(double c);
  /// Uniform samples k(m dt), m = 0..; cubic Hermite interpolation with
  /// centred slopes (C^1). Needs at least 4 samples.
  static KernelSpec table(double dt, std::vector<double> samples);

  Kind kind() const { return kind_; }
  double parameter() const { return parameter_; }
  double operator()(double t) const;

  /// Exact resolvent when one exists in closed form.
  std::optional<ExponentialResolvent> closed_form_resolvent() const;

  /// Last time covered by a table kernel; +inf otherwise.
  double horizon() const;

  /// Compact textual form, accepted back by parse_kernel().
  std::string describe() const;

 private:
  KernelSpec(Kind kind, double parameter) : kind_(kind), parameter_(parameter) {}

  Kind kind_;
  double parameter_;  // rate, constant value, or table step
  std::vector<double> samples_;
};

/// Parses "exp1", "exp:<rate>", "const:<c>", "zero".
KernelSpec parse_kernel(const std::string& text);

/// Resolvent samples on {0, dt_q, ..., M dt_q}.
struct ResolventTable {
  double dt_q = 0.0;
  std::vector<double> q;
  std::vector<double> q_prime;
  std::string provenance;

  double horizon() const { return q.empty() ? 0.0 : dt_q * static_cast<double>(q.size() - 1); }
  /// Cubic Hermite interpolation of (q, q') at any t in [0, horizon].
  double interpolate(double t) const;
};

/// Solves q(t) + int_0^t k(t - s) q(s) ds = k(t) on [0, horizon] with the
/// product trapezoidal rule. The discrete system is lower triangular and is
/// solved by forward substitution; q' comes from central differences of q
/// (one-sided second order at the ends).
ResolventTable solve_resolvent(const KernelSpec& kernel, double dt_q, double horizon);

/// Tabulates a closed-form resolvent on the same time grid.
ResolventTable tabulate_resolvent(const ExponentialResolvent& resolvent, double dt_q,
                                  double horizon);

/// Residual q(t) + (k*q)(t) - k(t), with q interpolated from the table and the
/// convolution computed by adaptive Gauss-Kronrod quadrature.
double resolvent_residual(const KernelSpec& kernel, const ResolventTable& table, double t);

/// Writes "t,q" rows with 17 significant digits.
void write_resolvent(std::ostream& out, const ResolventTable& table);

/// Reference evaluation of the memory functional
///   F(w)(t) = q(0) w(t) - q(t) w0 + int_0^t q'(t - s) w(s) ds
/// nodewise. history[m] holds w at s = m dt_q and must cover [0, t].
///
/// The integral is evaluated by product integration with w linear on each
/// history interval, which makes the weights differences of q:
///   F = q_0 w^n - q_n w0 + sum_m (q_{n-m} - q_{n-m-1}) (w^m + w^{m+1}) / 2.
/// This is second order in dt_q and vanishes identically for w constant in time.
RealField memory_direct(const ResolventTable& table, std::span<const RealField> history,
                        std::span<const double> w0, double t);

enum class MemoryRule {
  rectangle,  // left-endpoint sum, as printed for the reference scheme
  trapezoid,
};

/// Running history integral behind the incremental memory term.
///
/// Kernels with an exponential resolvent q = A exp(-mu t) use the fast path,
///   G^n = sum_{m<n} tau exp(mu t_m) w^m,
///   F(w) = A w - A exp(-mu t) w0 - A mu exp(-mu t) G^n,
/// which for k = exp(-t) is w - e^{-2t} w0 - 2 e^{-2t} G^n. Other kernels keep
/// the full history and delegate to memory_direct().
class MemoryAccumulator {
 public:
  /// `horizon` sizes the resolvent table of the general path; it grows on
  /// demand.
  MemoryAccumulator(const KernelSpec& kernel, RealField w0, double tau,
                    MemoryRule rule = MemoryRule::rectangle, double horizon = 0.0);

  /// Clears the history; F_hist = 0, n = 0.
  void reset(RealField w0);

  /// Absorbs w at t_prev = n tau and increments n. Throws StateError if t_prev
  /// does not match the current step index (double update or skipped step).
  void advance(std::span<const double> w_prev, double t_prev);

  /// Memory functional at t_now = n tau given the current w.
  RealField memory_term(std::span<const double> w_now, double t_now) const;

  /// Writes the part of memory_term() that does not depend on w_now, so
  /// memory_term = weight() * w_now - offset. Used to freeze the history over
  /// the stages of one time step.
  void frozen_offset(std::span<const double> w_now, double t_now, std::span<double> offset) const;

  /// q(0), the coefficient of the instantaneous term.
  double weight() const { return weight_; }

  std::size_t steps() const { return steps_; }
  double tau() const { return tau_; }
  bool fast_path() const { return fast_.has_value(); }
  MemoryRule rule() const { return rule_; }
  const RealField& w0() const { return w0_; }
  /// F_hist (fast path only; empty otherwise).
  const RealField& history_sum() const { return history_sum_; }
  std::string provenance() const;

 private:
  void check_time(double t_now) const;
  void ensure_table(std::size_t steps);

  KernelSpec kernel_;
  double tau_;
  MemoryRule rule_;
  double weight_ = 0.0;
  std::optional<ExponentialResolvent> fast_;
  RealField w0_;
  RealField history_sum_;
  std::vector<RealField> history_;
  std::optional<ResolventTable> table_;
  std::size_t steps_ = 0;
};

}  // namespace swlw
