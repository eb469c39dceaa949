#include "swlw/memory.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "swlw/error.hpp"

namespace swlw {

namespace {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double parse_number(const std::string& text, const std::string& what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
    throw ConfigError("invalid number '" + text + "' for " + what);
  }
  return value;
}

// Cubic Hermite on [t_i, t_{i+1}] from values and slopes.
double hermite(double t0, double step, double y0, double y1, double d0, double d1, double t) {
  const double s = (t - t0) / step;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * step * d0 + (-2 * s3 + 3 * s2) * y1 +
         (s3 - s2) * step * d1;
}

// Central differences, second-order one-sided at the ends.
std::vector<double> differentiate(const std::vector<double>& y, double step) {
  const std::size_t n = y.size();
  std::vector<double> d(n, 0.0);
  if (n < 3) {
    if (n == 2) d[0] = d[1] = (y[1] - y[0]) / step;
    return d;
  }
  d[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * step);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (2.0 * step);
  d[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * step);
  return d;
}

std::size_t table_points(double dt_q, double horizon) {
  if (!(dt_q > 0.0) || !std::isfinite(dt_q)) {
    throw ConfigError("resolvent step must be positive, got " + format_double(dt_q));
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("resolvent horizon must be positive, got " + format_double(horizon));
  }
  const double ratio = horizon / dt_q;
  const auto steps = static_cast<std::size_t>(std::ceil(ratio - 1e-9 * std::max(1.0, ratio)));
  return std::max<std::size_t>(steps, 2) + 1;
}

}  // namespace

double ExponentialResolvent::q(double t) const { return amplitude * std::exp(-rate * t); }

double ExponentialResolvent::q_prime(double t) const {
  return -rate * amplitude * std::exp(-rate * t);
}

KernelSpec KernelSpec::exponential(double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw ConfigError("exponential kernel rate must be positive, got " + format_double(rate));
  }
  return KernelSpec(Kind::exponential, rate);
}

KernelSpec KernelSpec::constant(double c) {
  if (!std::isfinite(c)) throw ConfigError("constant kernel value must be finite");
  return KernelSpec(Kind::constant, c);
}

KernelSpec KernelSpec::table(double dt, std::vector<double> samples) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("kernel table step must be positive");
  if (samples.size() < 4) {
    throw ConfigError("kernel table needs at least 4 samples for C1 interpolation");
  }
  for (double s : samples)
    if (!std::isfinite(s)) throw ConfigError("kernel table contains non-finite samples");
  KernelSpec k(Kind::table, dt);
  k.samples_ = std::move(samples);
  return k;
}

double KernelSpec::horizon() const {
  if (kind_ != Kind::table) return std::numeric_limits<double>::infinity();
  return parameter_ * static_cast<double>(samples_.size() - 1);
}

double KernelSpec::operator()(double t) const {
  switch (kind_) {
    case Kind::exponential: return std::exp(-parameter_ * t);
    case Kind::constant: return parameter_;
    case Kind::table: break;
  }
  const double dt = parameter_;
  const double last = horizon();
  if (t < 0.0 || t > last * (1.0 + 1e-12)) {
    throw ConfigError("kernel table evaluated at t = " + format_double(t) + " outside [0, " +
                      format_double(last) + "]");
  }
  const std::size_t n = samples_.size();
  auto i = static_cast<std::size_t>(t / dt);
  if (i >= n - 1) i = n - 2;
  auto slope = [&](std::size_t m) {
    if (m == 0) return (-3.0 * samples_[0] + 4.0 * samples_[1] - samples_[2]) / (2.0 * dt);
    if (m == n - 1)
      return (3.0 * samples_[n - 1] - 4.0 * samples_[n - 2] + samples_[n - 3]) / (2.0 * dt);
    return (samples_[m + 1] - samples_[m - 1]) / (2.0 * dt);
  };
  return hermite(static_cast<double>(i) * dt, dt, samples_[i], samples_[i + 1], slope(i),
                 slope(i + 1), t);
}

std::optional<ExponentialResolvent> KernelSpec::closed_form_resolvent() const {
  // k = a e^{-bt} has Laplace transform a/(s+b), so Q = K/(1+K) = a/(s+b+a).
  switch (kind_) {
    case Kind::exponential: return ExponentialResolvent{1.0, parameter_ + 1.0};
    case Kind::constant: return ExponentialResolvent{parameter_, parameter_};
    case Kind::table: break;
  }
  return std::nullopt;
}

std::string KernelSpec::describe() const {
  switch (kind_) {
    case Kind::exponential: return "exp:" + format_double(parameter_);
    case Kind::constant: return "const:" + format_double(parameter_);
    case Kind::table:
      return "table(dt=" + format_double(parameter_) + ",n=" + std::to_string(samples_.size()) +
             ")";
  }
  return "?";
}

KernelSpec parse_kernel(const std::string& text) {
  if (text == "exp1") return KernelSpec::exponential(1.0);
  if (text == "zero") return KernelSpec::constant(0.0);
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string head = text.substr(0, colon);
    const std::string tail = text.substr(colon + 1);
    if (head == "exp") return KernelSpec::exponential(parse_number(tail, "kernel rate"));
    if (head == "const") return KernelSpec::constant(parse_number(tail, "kernel constant"));
  }
  throw ConfigError("unknown kernel '" + text + "' (expected exp1, exp:<rate>, const:<c>, zero)");
}

double ResolventTable::interpolate(double t) const {
  if (q.size() < 2) throw StateError("resolvent table is empty");
  if (t < 0.0 || t > horizon() * (1.0 + 1e-12)) {
    throw ConfigError("resolvent table evaluated at t = " + format_double(t) + " beyond horizon " +
                      format_double(horizon()));
  }
  auto i = static_cast<std::size_t>(t / dt_q);
  if (i >= q.size() - 1) i = q.size() - 2;
  return hermite(static_cast<double>(i) * dt_q, dt_q, q[i], q[i + 1], q_prime[i], q_prime[i + 1],
                 t);
}

ResolventTable solve_resolvent(const KernelSpec& kernel, double dt_q, double horizon) {
  const std::size_t n_points = table_points(dt_q, horizon);
  const double last = dt_q * static_cast<double>(n_points - 1);
  if (last > kernel.horizon() * (1.0 + 1e-12)) {
    throw ConfigError("kernel table does not cover the resolvent horizon " + format_double(last));
  }

  std::vector<double> k(n_points);
  for (std::size_t m = 0; m < n_points; ++m) k[m] = kernel(dt_q * static_cast<double>(m));

  const double diagonal = 1.0 + 0.5 * dt_q * k[0];
  if (std::abs(diagonal) < 1e-14) {
    throw NumericalError("resolvent: singular forward substitution, 1 + dt k(0)/2 = 0");
  }

  std::vector<double> q(n_points, 0.0);
  q[0] = k[0];
  for (std::size_t n = 1; n < n_points; ++n) {
    double conv = 0.5 * k[n] * q[0];
    for (std::size_t m = 1; m < n; ++m) conv += k[n - m] * q[m];
    q[n] = (k[n] - dt_q * conv) / diagonal;
  }

  ResolventTable table;
  table.dt_q = dt_q;
  table.q_prime = differentiate(q, dt_q);
  table.q = std::move(q);
  table.provenance = "product-trapezoid Volterra solve, kernel " + kernel.describe() +
                     ", dt_q " + format_double(dt_q);
  return table;
}

ResolventTable tabulate_resolvent(const ExponentialResolvent& resolvent, double dt_q,
                                  double horizon) {
  const std::size_t n_points = table_points(dt_q, horizon);
  ResolventTable table;
  table.dt_q = dt_q;
  table.q.resize(n_points);
  table.q_prime.resize(n_points);
  for (std::size_t m = 0; m < n_points; ++m) {
    const double t = dt_q * static_cast<double>(m);
    table.q[m] = resolvent.q(t);
    table.q_prime[m] = resolvent.q_prime(t);
  }
  table.provenance = "closed form q(t) = " + format_double(resolvent.amplitude) + " exp(-" +
                     format_double(resolvent.rate) + " t), dt_q " + format_double(dt_q);
  return table;
}

double resolvent_residual(const KernelSpec& kernel, const ResolventTable& table, double t) {
  if (t == 0.0) return table.q.at(0) - kernel(0.0);
  auto integrand = [&](double s) { return kernel(t - s) * table.interpolate(s); };
  const double conv =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, t, 12, 1e-13);
  return table.interpolate(t) + conv - kernel(t);
}

void write_resolvent(std::ostream& out, const ResolventTable& table) {
  out << "t,q\n";
  for (std::size_t m = 0; m < table.q.size(); ++m) {
    out << format_double(table.dt_q * static_cast<double>(m)) << ',' << format_double(table.q[m])
        << '\n';
  }
}

RealField memory_direct(const ResolventTable& table, std::span<const RealField> history,
                        std::span<const double> w0, double t) {
  if (!(t >= 0.0)) throw ConfigError("memory_direct: negative time");
  const double ratio = t / table.dt_q;
  const auto n = static_cast<std::size_t>(std::llround(ratio));
  if (std::abs(ratio - static_cast<double>(n)) > 1e-6) {
    throw ConfigError("memory_direct: t = " + format_double(t) +
                      " is not on the history grid of step " + format_double(table.dt_q));
  }
  if (history.size() < n + 1) {
    throw ConfigError("memory_direct: history has " + std::to_string(history.size()) +
                      " levels, need " + std::to_string(n + 1) + " to cover [0, t]");
  }
  if (table.q.size() < n + 1) {
    throw ConfigError("memory_direct: resolvent table does not reach t = " + format_double(t));
  }
  const std::size_t size = w0.size();
  for (std::size_t m = 0; m <= n; ++m) {
    if (history[m].size() != size) throw StateError("memory_direct: field size mismatch");
  }

  const auto& q = table.q;
  RealField result(size);
  for (std::size_t j = 0; j < size; ++j) result[j] = q[0] * history[n][j] - q[n] * w0[j];
  for (std::size_t m = 0; m < n; ++m) {
    const double weight = 0.5 * (q[n - m] - q[n - m - 1]);
    const auto& a = history[m];
    const auto& b = history[m + 1];
    for (std::size_t j = 0; j < size; ++j) result[j] += weight * (a[j] + b[j]);
  }
  return result;
}

MemoryAccumulator::MemoryAccumulator(const KernelSpec& kernel, RealField w0, double tau,
                                     MemoryRule rule, double horizon)
    : kernel_(kernel), tau_(tau), rule_(rule), fast_(kernel.closed_form_resolvent()) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("memory: time step must be positive");
  if (fast_) {
    weight_ = fast_->q(0.0);
  } else {
    weight_ = kernel(0.0);  // q(0) = k(0)
    const auto levels = static_cast<std::size_t>(std::ceil(std::max(horizon, 8.0 * tau) / tau));
    ensure_table(levels);
  }
  reset(std::move(w0));
}

void MemoryAccumulator::reset(RealField w0) {
  w0_ = std::move(w0);
  steps_ = 0;
  history_.clear();
  if (fast_) {
    history_sum_.assign(w0_.size(), 0.0);
  } else {
    history_sum_.clear();
  }
}

void MemoryAccumulator::ensure_table(std::size_t steps) {
  if (table_ && table_->q.size() > steps) return;
  std::size_t target = table_ ? table_->q.size() : 0;
  target = std::max({target * 2, steps + 1, std::size_t{16}});
  table_ = solve_resolvent(kernel_, tau_, tau_ * static_cast<double>(target - 1));
}

void MemoryAccumulator::check_time(double t_now) const {
  const double expected = tau_ * static_cast<double>(steps_);
  if (std::abs(t_now - expected) > 0.5 * tau_) {
    throw StateError("memory: time " + format_double(t_now) + " does not match step " +
                     std::to_string(steps_) + " (t = " + format_double(expected) + ")");
  }
}

void MemoryAccumulator::advance(std::span<const double> w_prev, double t_prev) {
  if (w_prev.size() != w0_.size()) throw StateError("memory: field size mismatch");
  const double expected = tau_ * static_cast<double>(steps_);
  if (std::abs(t_prev - expected) > 0.5 * tau_) {
    if (t_prev < expected) {
      throw StateError("memory: step at t = " + format_double(t_prev) +
                       " was already absorbed (double update)");
    }
    throw StateError("memory: step at t = " + format_double(t_prev) + " skips ahead of step " +
                     std::to_string(steps_));
  }
  if (fast_) {
    double factor = tau_ * std::exp(fast_->rate * expected);
    if (rule_ == MemoryRule::trapezoid && steps_ == 0) factor *= 0.5;
    for (std::size_t j = 0; j < w_prev.size(); ++j) history_sum_[j] += factor * w_prev[j];
  } else {
    history_.emplace_back(w_prev.begin(), w_prev.end());
    ensure_table(steps_ + 1);
  }
  ++steps_;
}

void MemoryAccumulator::frozen_offset(std::span<const double> w_now, double t_now,
                                      std::span<double> offset) const {
  check_time(t_now);
  if (w_now.size() != w0_.size() || offset.size() != w0_.size()) {
    throw StateError("memory: field size mismatch");
  }
  const double t = tau_ * static_cast<double>(steps_);
  if (fast_) {
    const double a = fast_->amplitude;
    const double mu = fast_->rate;
    const double decay = std::exp(-mu * t);
    const double c0 = a * decay;
    const double c1 = a * mu * decay;
    for (std::size_t j = 0; j < offset.size(); ++j) {
      offset[j] = c0 * w0_[j] + c1 * history_sum_[j];
    }
    if (rule_ == MemoryRule::trapezoid && steps_ > 0) {
      // end-point half weight tau/2 e^{mu t} w^n folded with the e^{-mu t} prefactor
      const double c2 = a * mu * 0.5 * tau_;
      for (std::size_t j = 0; j < offset.size(); ++j) offset[j] += c2 * w_now[j];
    }
    return;
  }

  std::vector<RealField> levels;
  levels.reserve(history_.size() + 1);
  for (const auto& h : history_) levels.push_back(h);
  levels.emplace_back(w_now.begin(), w_now.end());
  const RealField f = memory_direct(*table_, levels, w0_, t);
  for (std::size_t j = 0; j < offset.size(); ++j) offset[j] = weight_ * w_now[j] - f[j];
}

RealField MemoryAccumulator::memory_term(std::span<const double> w_now, double t_now) const {
  RealField out(w_now.size());
  frozen_offset(w_now, t_now, out);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = weight_ * w_now[j] - out[j];
  return out;
}

std::string MemoryAccumulator::provenance() const {
  if (fast_) {
    return "closed-form resolvent q(t) = " + format_double(fast_->amplitude) + " exp(-" +
           format_double(fast_->rate) + " t), " +
           (rule_ == MemoryRule::rectangle ? "rectangle" : "trapezoid") + " history sum";
  }
  return table_ ? table_->provenance : std::string("numerical resolvent");
}

}  // namespace swlw
