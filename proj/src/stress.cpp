#include "swlw/stress.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

#include "swlw/error.hpp"

namespace swlw {

namespace {

using boost::math::quadrature::gauss_kronrod;

std::string fmt(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

template <class F>
double integrate(F&& f, double a, double b) {
  if (a == b) return 0.0;
  double error = 0.0;
  const double value = gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13, &error);
  if (!std::isfinite(value)) throw NumericalError("stress: quadrature produced a non-finite value");
  const double scale = std::max(1.0, std::abs(value));
  if (error > 1e-8 * scale) {
    throw NumericalError("stress: adaptive quadrature did not converge on [" + fmt(a) + ", " +
                         fmt(b) + "], error estimate " + fmt(error));
  }
  return value;
}

}  // namespace

StressModel StressModel::cubic() {
  StressModel m;
  m.kind_ = Kind::cubic;
  m.name_ = "cubic";
  m.sigma0_ = 1.0;
  return m;
}

StressModel StressModel::linear() {
  return custom(
      "linear", [](double v) { return v; }, [](double) { return 1.0; },
      [](double) { return 0.0; }, [](double) { return 0.0; }, 1.0);
}

StressModel StressModel::custom(std::string name, ScalarMap sigma, ScalarMap d1, ScalarMap d2,
                                ScalarMap d3, double sigma0, Interval valid) {
  if (!sigma || !d1 || !d2 || !d3) throw ConfigError("custom stress law needs sigma and 3 derivatives");
  if (!(sigma0 > 0.0)) throw ConfigError("stress: sigma0 must be positive");
  if (!(valid.lo < valid.hi)) throw ConfigError("stress: empty valid range");
  StressModel m;
  m.kind_ = Kind::custom;
  m.name_ = std::move(name);
  m.sigma_ = std::move(sigma);
  m.d1_ = std::move(d1);
  m.d2_ = std::move(d2);
  m.d3_ = std::move(d3);
  m.sigma0_ = sigma0;
  m.valid_ = valid;
  return m;
}

double StressModel::stored_energy(double v) const {
  if (kind_ == Kind::cubic) {
    const double v2 = v * v;
    return 0.25 * v2 * v2 + 0.5 * v2;
  }
  return integrate([this](double xi) { return sigma_(xi); }, 0.0, v);
}

StressValues StressModel::evaluate(double v) const {
  return {sigma(v), dsigma(v), d2sigma(v), stored_energy(v)};
}

StressModel parse_stress_model(const std::string& name) {
  if (name == "cubic") return StressModel::cubic();
  if (name == "linear") return StressModel::linear();
  throw ConfigError("unknown stress model '" + name + "' (expected cubic or linear)");
}

// ---------------------------------------------------------------------------
// Hypotheses

namespace {

// Decay exponent p of |g| between |x1| and |x2| = 2|x1|: |g| ~ |x|^{-p}.
// Returns +inf if both values vanish and -inf if |g| grows from zero.
double decay_exponent(double g1, double g2) {
  const double a1 = std::abs(g1);
  const double a2 = std::abs(g2);
  if (a1 == 0.0 && a2 == 0.0) return std::numeric_limits<double>::infinity();
  if (a1 == 0.0) return -std::numeric_limits<double>::infinity();
  if (a2 == 0.0) return std::numeric_limits<double>::infinity();
  return -std::log(a2 / a1) / std::log(2.0);
}

}  // namespace

HypothesisReport check_hypotheses(const StressModel& model, Interval range, std::size_t n_samples) {
  if (!std::isfinite(range.lo) || !std::isfinite(range.hi) || !(range.lo < range.hi)) {
    throw ConfigError("check_hypotheses: degenerate range [" + fmt(range.lo) + ", " +
                      fmt(range.hi) + "]");
  }
  if (n_samples < 100) throw ConfigError("check_hypotheses: need at least 100 samples");

  HypothesisReport rep;
  rep.model = model.name();
  rep.range = range;
  rep.samples = n_samples;

  std::vector<double> vs(n_samples);
  const double width = range.hi - range.lo;
  for (std::size_t i = 0; i < n_samples; ++i) {
    vs[i] = range.lo + width * static_cast<double>(i) / static_cast<double>(n_samples - 1);
  }
  vs.back() = range.hi;

  // H1
  std::size_t imin = 0;
  std::vector<double> d1(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    d1[i] = model.dsigma(vs[i]);
    if (d1[i] < d1[imin] || std::isnan(d1[i])) imin = i;
  }
  {
    const double a = vs[imin == 0 ? 0 : imin - 1];
    const double b = vs[std::min(imin + 1, n_samples - 1)];
    auto [at, value] = boost::math::tools::brent_find_minima(
        [&](double v) { return model.dsigma(v); }, a, b, 52);
    if (value <= d1[imin]) {
      rep.min_dsigma = value;
      rep.min_dsigma_at = at;
    } else {
      rep.min_dsigma = d1[imin];
      rep.min_dsigma_at = vs[imin];
    }
  }
  rep.h1_ok = std::isfinite(rep.min_dsigma) && rep.min_dsigma >= model.sigma0() * (1.0 - 1e-12);

  // H2: exactly one isolated zero of sigma''.
  std::vector<double> d2(n_samples);
  double scale = 0.0;
  for (std::size_t i = 0; i < n_samples; ++i) {
    d2[i] = model.d2sigma(vs[i]);
    scale = std::max(scale, std::abs(d2[i]));
  }
  if (scale > 0.0 && std::isfinite(scale)) {
    const double tol = 1e-12 * scale;
    auto sign = [&](double x) { return std::abs(x) <= tol ? 0 : (x > 0 ? 1 : -1); };
    bool wide_zero = false;
    std::size_t i = 0;
    int last_sign = 0;
    std::size_t last_nonzero = 0;
    while (i < n_samples) {
      const int s = sign(d2[i]);
      if (s == 0) {
        std::size_t j = i;
        while (j < n_samples && sign(d2[j]) == 0) ++j;
        ++rep.d2_zero_events;
        if (j - i > 1) wide_zero = true;
        if (!rep.lambda0) rep.lambda0 = vs[i];
        last_sign = 0;
        i = j;
        continue;
      }
      if (last_sign != 0 && s != last_sign) {
        ++rep.d2_zero_events;
        if (!rep.lambda0) {
          boost::uintmax_t iters = 200;
          auto [a, b] = boost::math::tools::toms748_solve(
              [&](double v) { return model.d2sigma(v); }, vs[last_nonzero], vs[i],
              boost::math::tools::eps_tolerance<double>(52), iters);
          rep.lambda0 = 0.5 * (a + b);
        }
      }
      last_sign = s;
      last_nonzero = i;
      ++i;
    }
    rep.h2_ok = rep.d2_zero_events == 1 && !wide_zero;
  }

  // Endpoints far enough out to read an asymptotic trend from (e, e/2).
  std::vector<double> tails;
  for (double e : {range.lo, range.hi}) {
    if (std::abs(e) >= 1.0 && range.contains(0.5 * e)) tails.push_back(e);
  }

  bool positive = true;
  for (double d : d1) positive = positive && d > 0.0;

  // H3 presupposes the H1 floor; without it the weights (sigma')^{-p} are
  // singular and the quadrature cannot converge.
  if (rep.h1_ok) {
    auto f1 = [&](double v) { return model.d2sigma(v) / std::pow(model.dsigma(v), 1.25); };
    auto f2 = [&](double v) { return model.d3sigma(v) / std::pow(model.dsigma(v), 1.75); };
    auto g1 = [&](double v) { return model.d2sigma(v) / std::pow(model.dsigma(v), 1.5); };
    auto g2 = [&](double v) { return model.d3sigma(v) / std::pow(model.dsigma(v), 3.0); };
    rep.h3_l2_first = integrate([&](double v) { return f1(v) * f1(v); }, range.lo, range.hi);
    rep.h3_l2_second = integrate([&](double v) { return f2(v) * f2(v); }, range.lo, range.hi);
    for (double v : vs) {
      rep.h3_sup_first = std::max(rep.h3_sup_first, std::abs(g1(v)));
      rep.h3_sup_second = std::max(rep.h3_sup_second, std::abs(g2(v)));
    }
    bool ok = std::isfinite(rep.h3_l2_first) && std::isfinite(rep.h3_l2_second) &&
              std::isfinite(rep.h3_sup_first) && std::isfinite(rep.h3_sup_second);
    for (double e : tails) {
      // Square-integrable tails need |f| ~ |v|^{-p} with p > 1/2; bounded
      // tails must not grow.
      ok = ok && decay_exponent(f1(0.5 * e), f1(e)) > 0.5;
      ok = ok && decay_exponent(f2(0.5 * e), f2(e)) > 0.5;
      ok = ok && decay_exponent(g1(0.5 * e), g1(e)) >= -1e-9;
      ok = ok && decay_exponent(g2(0.5 * e), g2(e)) >= -1e-9;
    }
    rep.h3_tails_checked = !tails.empty();
    rep.h3_ok = ok && rep.h3_tails_checked;
  }

  // H4
  auto ratio = [&](double v) {
    const double big_sigma = model.stored_energy(v);
    return big_sigma > 0.0 ? model.sigma(v) / big_sigma : std::numeric_limits<double>::infinity();
  };
  rep.h4_ratio_left = ratio(range.lo);
  rep.h4_ratio_right = ratio(range.hi);
  if (!tails.empty() && positive) {
    double decay = std::numeric_limits<double>::infinity();
    double q_max = std::numeric_limits<double>::infinity();
    for (double e : tails) {
      decay = std::min(decay, decay_exponent(ratio(0.5 * e), ratio(e)));
      const double a = std::log(model.dsigma(e) / model.dsigma(0.5 * e)) / std::log(2.0);
      const double b = std::log((1.0 + model.stored_energy(e)) /
                                (1.0 + model.stored_energy(0.5 * e))) /
                       std::log(2.0);
      if (a > 0.0) q_max = std::min(q_max, b / a);
    }
    rep.h4_ratio_decay = decay;
    rep.h4_q = std::isfinite(q_max) ? std::min(0.75, 0.5 * (0.5 + q_max)) : 0.75;
    for (double v : vs) {
      rep.h4_c = std::max(rep.h4_c, std::pow(model.dsigma(v), rep.h4_q) /
                                        (1.0 + model.stored_energy(v)));
    }
    rep.h4_ok = decay > 0.0 && std::isfinite(rep.h4_ratio_left) &&
                std::isfinite(rep.h4_ratio_right) && q_max > 0.5;
  }

  rep.caveat =
      "H3 and H4 are conditions as |v| -> infinity; on a finite range they are supported by the "
      "endpoint trend, not proved. The standing assumption that v in H^1 implies "
      "int Sigma(v) dx < infinity is not checked.";
  if (tails.empty()) {
    rep.caveat += " The range has no endpoint with |v| >= 1 whose half lies in the range, so "
                  "H3 and H4 could not be supported.";
  }
  return rep;
}

namespace {

const char* yes_no(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string to_text(const HypothesisReport& r) {
  std::ostringstream out;
  out << "stress model " << r.model << " on [" << fmt(r.range.lo) << ", " << fmt(r.range.hi)
      << "], " << r.samples << " samples\n";
  out << "  H1 " << (r.h1_ok ? "supported" : "FAILED") << ": min sigma' = " << fmt(r.min_dsigma)
      << " at v = " << fmt(r.min_dsigma_at) << "\n";
  out << "  H2 " << (r.h2_ok ? "supported" : "FAILED") << ": " << r.d2_zero_events
      << " zero(s) of sigma''";
  if (r.lambda0) out << ", lambda0 = " << fmt(*r.lambda0);
  out << "\n";
  out << "  H3 " << (r.h3_ok ? "supported" : "FAILED")
      << ": L2 integrals " << fmt(r.h3_l2_first) << ", " << fmt(r.h3_l2_second) << "; sups "
      << fmt(r.h3_sup_first) << ", " << fmt(r.h3_sup_second) << "\n";
  out << "  H4 " << (r.h4_ok ? "supported" : "FAILED") << ": sigma/Sigma = "
      << fmt(r.h4_ratio_left) << " (left), " << fmt(r.h4_ratio_right)
      << " (right), decay exponent " << fmt(r.h4_ratio_decay) << "; (sigma')^" << fmt(r.h4_q)
      << " <= " << fmt(r.h4_c) << " (1 + Sigma)\n";
  out << "  caveat: " << r.caveat << "\n";
  return out.str();
}

std::string to_key_value(const HypothesisReport& r) {
  std::ostringstream out;
  out << "model=" << r.model << "\n"
      << "range_lo=" << fmt(r.range.lo) << "\n"
      << "range_hi=" << fmt(r.range.hi) << "\n"
      << "samples=" << r.samples << "\n"
      << "h1_ok=" << yes_no(r.h1_ok) << "\n"
      << "h2_ok=" << yes_no(r.h2_ok) << "\n"
      << "h3_ok=" << yes_no(r.h3_ok) << "\n"
      << "h4_ok=" << yes_no(r.h4_ok) << "\n"
      << "h1_min_dsigma=" << fmt(r.min_dsigma) << "\n"
      << "h1_min_dsigma_at=" << fmt(r.min_dsigma_at) << "\n"
      << "h2_zero_events=" << r.d2_zero_events << "\n"
      << "h2_lambda0=" << (r.lambda0 ? fmt(*r.lambda0) : std::string("none")) << "\n"
      << "h3_l2_first=" << fmt(r.h3_l2_first) << "\n"
      << "h3_l2_second=" << fmt(r.h3_l2_second) << "\n"
      << "h3_sup_first=" << fmt(r.h3_sup_first) << "\n"
      << "h3_sup_second=" << fmt(r.h3_sup_second) << "\n"
      << "h4_ratio_left=" << fmt(r.h4_ratio_left) << "\n"
      << "h4_ratio_right=" << fmt(r.h4_ratio_right) << "\n"
      << "h4_ratio_decay=" << fmt(r.h4_ratio_decay) << "\n"
      << "h4_q=" << fmt(r.h4_q) << "\n"
      << "h4_c=" << fmt(r.h4_c) << "\n"
      << "caveat=" << r.caveat << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// Riemann invariants

double characteristic_primitive(const StressModel& model, double v) {
  if (model.is_cubic()) {
    static const double kRoot3 = std::sqrt(3.0);
    return 0.5 * v * std::sqrt(3.0 * v * v + 1.0) + std::asinh(kRoot3 * v) / (2.0 * kRoot3);
  }
  return integrate(
      [&](double xi) {
        const double d = model.dsigma(xi);
        if (!(d >= 0.0)) throw NumericalError("stress: sigma' < 0 at v = " + fmt(xi));
        return std::sqrt(d);
      },
      0.0, v);
}

RiemannInvariants riemann_forward(const StressModel& model, double v, double w) {
  if (!model.valid_range().contains(v)) {
    throw ConfigError("riemann_forward: v = " + fmt(v) + " outside the valid range of " +
                      model.name());
  }
  const double p = characteristic_primitive(model, v);
  return {w + p, w - p};
}

LongWaveState riemann_inverse(const StressModel& model, double l, double r) {
  const double target = l - r;
  const double tol = 1e-12 * std::max(1.0, std::abs(target));
  auto f = [&](double v) { return 2.0 * characteristic_primitive(model, v) - target; };
  auto df = [&](double v) { return 2.0 * std::sqrt(model.dsigma(v)); };

  const Interval valid = model.valid_range();
  constexpr int kMaxIterations = 200;
  int iterations = 0;

  auto checked = [&](double v) {
    const double value = f(v);
    if (!std::isfinite(value)) {
      throw NumericalError("riemann_inverse: f(v) is not finite at v = " + fmt(v) +
                           " (malformed stress law)");
    }
    return value;
  };

  double v = target / (2.0 * std::sqrt(model.dsigma(0.0)));
  v = std::clamp(v, valid.lo, valid.hi);
  double fv = checked(v);

  // Bracket the root; f is strictly increasing.
  double lo = v, hi = v, flo = fv, fhi = fv;
  double step = std::max(1.0, std::abs(v));
  while (flo > 0.0) {
    if (++iterations > kMaxIterations) break;
    hi = lo;
    fhi = flo;
    lo = std::max(valid.lo, lo - step);
    flo = checked(lo);
    step *= 2.0;
    if (lo == valid.lo && flo > 0.0) break;
  }
  step = std::max(1.0, std::abs(v));
  while (fhi < 0.0) {
    if (++iterations > kMaxIterations) break;
    lo = hi;
    flo = fhi;
    hi = std::min(valid.hi, hi + step);
    fhi = checked(hi);
    step *= 2.0;
    if (hi == valid.hi && fhi < 0.0) break;
  }
  if (flo > 0.0 || fhi < 0.0) {
    throw NumericalError("riemann_inverse: no root of f(v) = " + fmt(target) +
                         " within the valid range");
  }
  if (std::abs(flo) <= tol) return {lo, 0.5 * (l + r)};
  if (std::abs(fhi) <= tol) return {hi, 0.5 * (l + r)};
  if (v < lo || v > hi) v = 0.5 * (lo + hi);
  fv = checked(v);

  while (std::abs(fv) > tol) {
    if (++iterations > kMaxIterations) {
      throw NumericalError("riemann_inverse: no convergence after 200 iterations (l - r = " +
                           fmt(target) + ")");
    }
    if (fv < 0.0) {
      lo = v;
    } else {
      hi = v;
    }
    const double slope = df(v);
    double next = slope > 0.0 ? v - fv / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == v) break;
    v = next;
    fv = checked(v);
  }
  return {v, 0.5 * (l + r)};
}

}  // namespace swlw
