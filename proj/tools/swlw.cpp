// Command line driver: run, resolvent, check-stress, convergence.
//
// Exit status: 0 success, 1 usage or configuration error, 2 runtime failure.
// Errors are printed to stderr as "error[<kind>]: <message>".

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "swlw/error.hpp"
#include "swlw/io.hpp"
#include "swlw/memory.hpp"
#include "swlw/stress.hpp"
#include "swlw/version.hpp"

namespace {

int report_error(const char* kind, const std::string& message, int status) {
  std::cerr << "error[" << kind << "]: " << message << "\n";
  return status;
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& out_dir) {
  swlw::ConfigDocument doc = swlw::parse_config(config_path);
  if (out_dir) doc.output_dir = *out_dir;
  const swlw::RunArtifacts art = swlw::run_to_directory(doc);
  const auto& r = art.report;
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::printf("status: %s\nsteps: %zu\ndt: %.17g\nwall_seconds: %.3f\nmanifest: %s\n",
              std::string(swlw::to_string(r.status)).c_str(), r.steps, r.dt, r.wall_seconds,
              art.manifest.string().c_str());
  if (r.status == swlw::Termination::blow_up) {
    return report_error("blow-up", r.message, 2);
  }
  return 0;
}

int cmd_resolvent(const std::string& kernel_text, double horizon, double dt,
                  const std::optional<std::string>& out_path) {
  const swlw::KernelSpec kernel = swlw::parse_kernel(kernel_text);
  const swlw::ResolventTable table = swlw::solve_resolvent(kernel, dt, horizon);
  if (out_path) {
    std::ofstream out(*out_path);
    if (!out) throw swlw::IoError("cannot write '" + *out_path + "'");
    swlw::write_resolvent(out, table);
  } else {
    swlw::write_resolvent(std::cout, table);
  }
  if (const auto exact = kernel.closed_form_resolvent()) {
    double err = 0.0;
    for (std::size_t m = 0; m < table.q.size(); ++m) {
      err = std::max(err, std::abs(table.q[m] - exact->q(table.dt_q * static_cast<double>(m))));
    }
    std::fprintf(stderr, "max |q - q_exact| = %.3e\n", err);
  }
  return 0;
}

int cmd_check_stress(const std::string& model_name, double lo, double hi, std::size_t samples,
                     bool key_value) {
  const swlw::StressModel model = swlw::parse_stress_model(model_name);
  const swlw::HypothesisReport rep = swlw::check_hypotheses(model, {lo, hi}, samples);
  std::cout << (key_value ? swlw::to_key_value(rep) : swlw::to_text(rep));
  return 0;
}

int cmd_convergence(const std::string& config_path) {
  const swlw::ConfigDocument doc = swlw::parse_config(config_path);
  std::cout << swlw::to_text(swlw::self_convergence(doc.sim));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Short-wave/long-wave viscoelastic simulator"};
  app.set_version_flag("--version", std::string(swlw::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  auto* run = app.add_subcommand("run", "Simulate a configuration and write snapshots, "
                                        "diagnostics.csv and manifest.json");
  run->add_option("config", config_path, "Configuration file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides [output] dir)");

  std::string kernel_text;
  double horizon = 0.0;
  double dt = 0.0;
  std::optional<std::string> table_out;
  auto* resolvent = app.add_subcommand("resolvent", "Tabulate the resolvent q of a kernel as t,q");
  resolvent->add_option("kernel", kernel_text, "exp1, exp:<rate>, const:<c> or zero")->required();
  resolvent->add_option("T", horizon, "Horizon")->required();
  resolvent->add_option("dt", dt, "Tabulation step")->required();
  resolvent->add_option("--out", table_out, "Write the table to a file instead of stdout");

  std::string model_name;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t samples = 2001;
  bool key_value = false;
  auto* check = app.add_subcommand("check-stress", "Check H1-H4 for a stress law on [lo, hi]");
  check->add_option("model", model_name, "cubic or linear")->required();
  check->add_option("lo", lo, "Lower end of the range")->required();
  check->add_option("hi", hi, "Upper end of the range")->required();
  check->add_option("--samples", samples, "Number of sample points")->check(CLI::Range(100, 10000000));
  check->add_flag("--key-value", key_value, "Flat key=value output");

  std::string conv_path;
  auto* conv = app.add_subcommand("convergence",
                                  "Three-grid self-convergence report at J, 2J and 4J");
  conv->add_option("config", conv_path, "Configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir);
    if (*resolvent) return cmd_resolvent(kernel_text, horizon, dt, table_out);
    if (*check) return cmd_check_stress(model_name, lo, hi, samples, key_value);
    if (*conv) return cmd_convergence(conv_path);
  } catch (const swlw::ConfigError& e) {
    return report_error(e.kind(), e.what(), 1);
  } catch (const swlw::Error& e) {
    return report_error(e.kind(), e.what(), 2);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 2);
  }
  return 1;
}
