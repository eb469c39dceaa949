#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace swlw {

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double v) const { return v >= lo && v <= hi; }
};

/// sigma, sigma', sigma'' and the stored energy Sigma(v) = int_0^v sigma.
struct StressValues {
  double sigma = 0.0;
  double dsigma = 0.0;
  double d2sigma = 0.0;
  double energy = 0.0;
};

/// Constitutive law sigma(v) with sigma(0) = 0 and sigma' >= sigma0 > 0.
class StressModel {
 public:
  using ScalarMap = std::function<double(double)>;

  /// sigma(v) = v^3 + v; sigma0 = 1.
  static StressModel cubic();
  /// sigma(v) = v; sigma0 = 1.
  static StressModel linear();
  /// User law given by sigma and its first three derivatives. `valid` bounds
  /// the values of v where the hyperbolicity floor is trusted.
  static StressModel custom(std::string name, ScalarMap sigma, ScalarMap d1, ScalarMap d2,
                            ScalarMap d3, double sigma0, Interval valid = {});

  const std::string& name() const { return name_; }
  bool is_cubic() const { return kind_ == Kind::cubic; }
  double sigma0() const { return sigma0_; }
  Interval valid_range() const { return valid_; }

  double sigma(double v) const {
    if (kind_ == Kind::cubic) return v * v * v + v;
    return sigma_(v);
  }
  double dsigma(double v) const {
    if (kind_ == Kind::cubic) return 3.0 * v * v + 1.0;
    return d1_(v);
  }
  double d2sigma(double v) const {
    if (kind_ == Kind::cubic) return 6.0 * v;
    return d2_(v);
  }
  double d3sigma(double v) const {
    if (kind_ == Kind::cubic) return 6.0;
    return d3_(v);
  }

  /// Sigma(v): closed form for the cubic law, adaptive Gauss-Kronrod
  /// quadrature from 0 otherwise (NumericalError on non-convergence).
  double stored_energy(double v) const;

  StressValues evaluate(double v) const;

 private:
  enum class Kind { cubic, custom };
  StressModel() = default;

  Kind kind_ = Kind::cubic;
  std::string name_;
  ScalarMap sigma_, d1_, d2_, d3_;
  double sigma0_ = 1.0;
  Interval valid_;
};

/// Named built-in laws: "cubic", "linear".
StressModel parse_stress_model(const std::string& name);

/// Outcome of sampling H1-H4 on a finite range. H3 and H4 constrain the
/// behaviour as |v| -> infinity; on a finite range they are judged from the
/// trend at the endpoints and can only be supported, not proved.
struct HypothesisReport {
  std::string model;
  Interval range;
  std::size_t samples = 0;

  bool h1_ok = false;
  bool h2_ok = false;
  bool h3_ok = false;
  bool h4_ok = false;

  // H1: min sigma' and where it occurs.
  double min_dsigma = 0.0;
  double min_dsigma_at = 0.0;

  // H2: number of zero crossings of sigma'' and the located zero.
  std::size_t d2_zero_events = 0;
  std::optional<double> lambda0;

  // H3: the two L2 integrals, the two sup norms and the tail decay exponents.
  double h3_l2_first = 0.0;   // int (sigma''/(sigma')^{5/4})^2
  double h3_l2_second = 0.0;  // int (sigma'''/(sigma')^{7/4})^2
  double h3_sup_first = 0.0;  // sup |sigma''/(sigma')^{3/2}|
  double h3_sup_second = 0.0; // sup |sigma'''/(sigma')^3|
  bool h3_tails_checked = false;

  // H4: sigma/Sigma at the endpoints, its decay exponent, and the growth fit
  // (sigma')^q <= c (1 + Sigma).
  double h4_ratio_left = 0.0;
  double h4_ratio_right = 0.0;
  double h4_ratio_decay = 0.0;
  double h4_q = 0.0;
  double h4_c = 0.0;

  std::string caveat;
};

/// Throws ConfigError for a degenerate range or fewer than 100 samples.
HypothesisReport check_hypotheses(const StressModel& model, Interval range,
                                  std::size_t n_samples = 2001);

std::string to_text(const HypothesisReport& report);
std::string to_key_value(const HypothesisReport& report);

struct RiemannInvariants {
  double l = 0.0;
  double r = 0.0;
};

struct LongWaveState {
  double v = 0.0;
  double w = 0.0;
};

/// int_0^v sqrt(sigma'(xi)) d xi. Closed form for the cubic law:
/// (v/2) sqrt(3v^2+1) + asinh(sqrt3 v)/(2 sqrt3).
double characteristic_primitive(const StressModel& model, double v);

/// l = w + int_0^v sqrt(sigma'), r = w - int_0^v sqrt(sigma').
/// Throws ConfigError when v lies outside the model's valid range.
RiemannInvariants riemann_forward(const StressModel& model, double v, double w);

/// Inverts f(v) = l - r by safeguarded Newton to
/// |f(v) - (l - r)| <= 1e-12 max(1, |l - r|); w = (l + r) / 2.
/// Throws NumericalError after 200 iterations.
LongWaveState riemann_inverse(const StressModel& model, double l, double r);

}  // namespace swlw
