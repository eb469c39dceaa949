#include "swlw/io.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "swlw/error.hpp"
#include "swlw/version.hpp"

namespace swlw {

namespace fs = std::filesystem;

namespace {

std::string fmt(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_double(std::string_view text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

// Section each key belongs to.
const std::map<std::string, std::string>& key_sections() {
  static const std::map<std::string, std::string> table = {
      {"L1", "domain"},
      {"L2", "domain"},
      {"J", "domain"},
      {"h", "domain"},
      {"t_end", "time"},
      {"dt", "time"},
      {"safety_factor", "time"},
      {"allow_unstable_dt", "time"},
      {"snapshot_times", "time"},
      {"alpha", "model"},
      {"stress", "model"},
      {"kernel", "model"},
      {"viscosity", "model"},
      {"coupling", "model"},
      {"memory_rule", "model"},
      {"profile", "initial"},
      {"amplitude", "initial"},
      {"table", "initial"},
      {"allow_underresolved", "initial"},
      {"dir", "output"},
      {"diagnostics_every", "output"},
      {"work_accumulation", "output"},
  };
  return table;
}

// Line numbers of "key = value" entries, keyed by section + '.' + key. The
// property tree does not keep positions, so errors look them up here.
std::map<std::string, int> key_lines(const std::string& text) {
  std::map<std::string, int> lines;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t[0] == ';' || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) continue;
    lines.emplace(section + "." + trim(std::string_view(t).substr(0, eq)), number);
  }
  return lines;
}

class Reader {
 public:
  Reader(std::map<std::string, int> lines) : lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& what) const {
    std::string where;
    const auto it = lines_.find(section + "." + key);
    if (it != lines_.end()) where = "line " + std::to_string(it->second) + ": ";
    const std::string name = section.empty() ? key : section + "." + key;
    throw ConfigError(where + "key '" + name + "': " + what);
  }

  void add(const std::string& section, const std::string& key, const std::string& value) {
    const auto& known = key_sections();
    const auto it = known.find(key);
    if (it == known.end()) fail(section, key, "unknown key");
    if (!section.empty() && it->second != section) {
      fail(section, key, "belongs in section [" + it->second + "]");
    }
    if (!values_.emplace(key, Entry{section, value}).second) fail(section, key, "given twice");
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string text(const std::string& key) const { return trim(values_.at(key).value); }

  double number(const std::string& key) const {
    double v = 0.0;
    if (!parse_double(text(key), v) || !std::isfinite(v)) bad(key, "expected a number");
    return v;
  }

  std::size_t count(const std::string& key) const {
    const std::string t = text(key);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) bad(key, "expected a whole number");
    return v;
  }

  bool flag(const std::string& key) const {
    const std::string t = text(key);
    if (t == "true" || t == "yes" || t == "1") return true;
    if (t == "false" || t == "no" || t == "0") return false;
    bad(key, "expected true or false");
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    std::string t = text(key);
    if (!t.empty() && t.front() == '[' && t.back() == ']') t = t.substr(1, t.size() - 2);
    if (trim(t).empty()) return out;
    std::stringstream ss(t);
    std::string item;
    while (std::getline(ss, item, ',')) {
      double v = 0.0;
      if (!parse_double(item, v)) bad(key, "expected a comma separated list of numbers");
      out.push_back(v);
    }
    return out;
  }

  [[noreturn]] void bad(const std::string& key, const std::string& what) const {
    const auto& e = values_.at(key);
    fail(e.section, key, what + ", got '" + trim(e.value) + "'");
  }

  // Runs `f` and re-throws its ConfigError with the key's position.
  template <class F>
  auto with_context(const std::string& key, F&& f) const {
    try {
      return f();
    } catch (const ConfigError& e) {
      fail(values_.at(key).section, key, e.what());
    }
  }

 private:
  struct Entry {
    std::string section;
    std::string value;
  };
  std::map<std::string, int> lines_;
  std::map<std::string, Entry> values_;
};

}  // namespace

ConfigDocument parse_config_text(const std::string& text, const fs::path& base_dir) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }

  Reader r(key_lines(text));
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      r.add("", name, node.data());
      continue;
    }
    if (name != "domain" && name != "time" && name != "model" && name != "initial" &&
        name != "output") {
      throw ConfigError("unknown section [" + name + "]");
    }
    for (const auto& [key, leaf] : node) r.add(name, key, leaf.data());
  }

  ConfigDocument doc;
  SimConfig& c = doc.sim;

  double left = c.grid.left();
  double right = c.grid.right();
  std::size_t intervals = c.grid.intervals();
  if (r.has("L1")) left = r.number("L1");
  if (r.has("L2")) right = r.number("L2");
  if (r.has("J") && r.has("h")) r.bad("h", "give either J or h, not both");
  if (r.has("J")) intervals = r.count("J");
  if (r.has("h")) {
    const double h = r.number("h");
    if (!(h > 0.0)) r.bad("h", "must be positive");
    const double ratio = (right - left) / h;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * rounded) {
      r.bad("h", "does not divide L2 - L1 into a whole number of cells");
    }
    intervals = static_cast<std::size_t>(rounded);
  }
  c.grid = r.with_context(r.has("J") ? "J" : (r.has("L1") ? "L1" : (r.has("L2") ? "L2" : "J")),
                          [&] { return Grid(left, right, intervals); });

  if (r.has("t_end")) c.t_end = r.number("t_end");
  if (r.has("dt")) {
    if (r.text("dt") == "auto") {
      c.dt.reset();
    } else {
      c.dt = r.number("dt");
    }
  }
  if (r.has("safety_factor")) c.safety_factor = r.number("safety_factor");
  if (r.has("allow_unstable_dt")) c.allow_unstable_dt = r.flag("allow_unstable_dt");
  if (r.has("snapshot_times")) c.snapshot_times = r.list("snapshot_times");

  if (r.has("alpha")) c.alpha = r.number("alpha");
  if (r.has("stress")) {
    c.stress = r.with_context("stress", [&] { return parse_stress_model(r.text("stress")); });
  }
  if (r.has("kernel")) {
    c.kernel = r.with_context("kernel", [&] { return parse_kernel(r.text("kernel")); });
  }
  if (r.has("viscosity")) {
    c.viscosity = r.with_context("viscosity", [&] { return parse_viscosity(r.text("viscosity")); });
  }
  if (r.has("coupling")) {
    c.coupling = r.with_context("coupling", [&] { return parse_coupling(r.text("coupling")); });
  }
  if (r.has("memory_rule")) {
    c.memory_rule =
        r.with_context("memory_rule", [&] { return parse_memory_rule(r.text("memory_rule")); });
  }

  if (r.has("profile")) {
    c.initial.profile =
        r.with_context("profile", [&] { return parse_initial_profile(r.text("profile")); });
  }
  if (r.has("amplitude")) c.initial.amplitude = r.number("amplitude");
  if (r.has("allow_underresolved")) c.initial.allow_underresolved = r.flag("allow_underresolved");
  if (r.has("table")) {
    if (c.initial.profile != InitialProfile::table) r.bad("table", "requires profile = table");
    fs::path p = r.text("table");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    doc.table_path = p;
    const Snapshot snap = r.with_context("table", [&] {
      try {
        return read_snapshot(p);
      } catch (const IoError& e) {
        throw ConfigError(e.what());
      }
    });
    SimState s = snap.state;
    if (!s.matches(c.grid)) {
      r.bad("table", "has " + std::to_string(s.size()) + " rows but the grid has " +
                         std::to_string(c.grid.size()) + " nodes");
    }
    for (std::size_t j = 0; j < snap.x.size(); ++j) {
      if (std::abs(snap.x[j] - c.grid.x(j)) > 1e-12 * c.grid.length()) {
        r.bad("table", "x column does not match the grid at row " + std::to_string(j + 1));
      }
    }
    if (c.initial.amplitude != 1.0) {
      for (auto& z : s.u) z *= c.initial.amplitude;
      for (auto& a : s.v) a *= c.initial.amplitude;
      for (auto& a : s.w) a *= c.initial.amplitude;
    }
    c.initial.table = std::move(s);
  } else if (c.initial.profile == InitialProfile::table) {
    throw ConfigError("key 'initial.table': required when profile = table");
  }

  if (r.has("dir")) {
    fs::path p = r.text("dir");
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    doc.output_dir = p;
  }
  if (r.has("diagnostics_every")) c.diagnostics_every = r.count("diagnostics_every");
  if (r.has("work_accumulation")) {
    c.work = r.with_context("work_accumulation", [&] {
      return parse_work_accumulation(r.text("work_accumulation"));
    });
  }

  validate(c);
  return doc;
}

ConfigDocument parse_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  ConfigDocument doc;
  try {
    doc = parse_config_text(buffer.str(), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  doc.source = path;
  return doc;
}

std::string format_config(const ConfigDocument& doc) {
  const SimConfig& c = doc.sim;
  std::ostringstream out;
  out << "[domain]\n"
      << "L1 = " << fmt(c.grid.left()) << "\n"
      << "L2 = " << fmt(c.grid.right()) << "\n"
      << "J = " << c.grid.intervals() << "\n\n"
      << "[time]\n"
      << "t_end = " << fmt(c.t_end) << "\n"
      << "dt = " << (c.dt ? fmt(*c.dt) : std::string("auto")) << "\n"
      << "safety_factor = " << fmt(c.safety_factor) << "\n"
      << "allow_unstable_dt = " << (c.allow_unstable_dt ? "true" : "false") << "\n"
      << "snapshot_times = ";
  for (std::size_t i = 0; i < c.snapshot_times.size(); ++i) {
    out << (i ? ", " : "") << fmt(c.snapshot_times[i]);
  }
  out << "\n\n[model]\n"
      << "alpha = " << fmt(c.alpha) << "\n"
      << "stress = " << c.stress.name() << "\n"
      << "kernel = " << c.kernel.describe() << "\n"
      << "viscosity = " << c.viscosity.describe() << "\n"
      << "coupling = " << to_string(c.coupling) << "\n"
      << "memory_rule = " << to_string(c.memory_rule) << "\n\n"
      << "[initial]\n"
      << "profile = " << to_string(c.initial.profile) << "\n"
      << "amplitude = " << fmt(c.initial.amplitude) << "\n";
  if (c.initial.profile == InitialProfile::table) out << "table = " << doc.table_path.string() << "\n";
  out << "allow_underresolved = " << (c.initial.allow_underresolved ? "true" : "false") << "\n\n"
      << "[output]\n"
      << "dir = " << doc.output_dir.string() << "\n"
      << "diagnostics_every = " << c.diagnostics_every << "\n"
      << "work_accumulation = " << to_string(c.work) << "\n";
  return out.str();
}

void write_snapshot(std::ostream& out, const SimState& state, const Grid& grid) {
  if (!state.matches(grid)) throw StateError("write_snapshot: state does not match the grid");
  out << "x,re_u,im_u,abs_u,v,w\n";
  char line[256];
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const Complex z = state.u[j];
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", grid.x(j), z.real(),
                  z.imag(), std::abs(z), state.v[j], state.w[j]);
    out << line;
  }
}

void write_snapshot(const fs::path& path, const SimState& state, const Grid& grid) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write snapshot '" + path.string() + "'");
  write_snapshot(out, state, grid);
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

Snapshot read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("snapshot: missing header");
  {
    std::string compact;
    for (char ch : line) {
      if (ch != ' ' && ch != '\r') compact += ch;
    }
    if (compact != "x,re_u,im_u,abs_u,v,w") throw IoError("snapshot: unexpected header '" + line + "'");
  }
  Snapshot snap;
  int number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (trim(line).empty()) continue;
    double cols[6];
    std::size_t n = 0;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (n == 6 || !parse_double(item, cols[n])) {
        throw IoError("snapshot line " + std::to_string(number) + ": malformed row");
      }
      ++n;
    }
    if (n != 6) throw IoError("snapshot line " + std::to_string(number) + ": expected 6 columns");
    snap.x.push_back(cols[0]);
    snap.state.u.emplace_back(cols[1], cols[2]);
    snap.state.v.push_back(cols[4]);
    snap.state.w.push_back(cols[5]);
  }
  if (snap.x.size() < 5) throw IoError("snapshot: need at least 5 rows");
  return snap;
}

Snapshot read_snapshot(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read snapshot '" + path.string() + "'");
  try {
    return read_snapshot(in);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

Grid snapshot_grid(const Snapshot& snapshot) {
  if (snapshot.x.size() < 5) throw IoError("snapshot: need at least 5 rows");
  const Grid grid(snapshot.x.front(), snapshot.x.back(), snapshot.x.size() - 1);
  for (std::size_t j = 0; j < snapshot.x.size(); ++j) {
    if (std::abs(snapshot.x[j] - grid.x(j)) > 1e-12 * grid.length()) {
      throw IoError("snapshot: x column is not uniform at row " + std::to_string(j + 1));
    }
  }
  return grid;
}

std::string manifest_json(const ConfigDocument& doc, const RunReport& report,
                          const std::vector<std::string>& snapshot_files) {
  using nlohmann::ordered_json;
  const SimConfig& c = doc.sim;
  const double h = c.grid.spacing();
  const StepPlan plan = plan_steps(c);

  ordered_json cfg;
  cfg["L1"] = c.grid.left();
  cfg["L2"] = c.grid.right();
  cfg["J"] = c.grid.intervals();
  cfg["h"] = h;
  cfg["t_end"] = c.t_end;
  cfg["dt_requested"] = c.dt ? ordered_json(*c.dt) : ordered_json("auto");
  cfg["dt"] = plan.dt;
  cfg["steps"] = plan.steps;
  cfg["stability_bound"] = stability_bound(c);
  cfg["stable_dt"] = stable_dt(c);
  cfg["safety_factor"] = c.safety_factor;
  cfg["allow_unstable_dt"] = c.allow_unstable_dt;
  cfg["alpha"] = c.alpha;
  cfg["stress"] = c.stress.name();
  cfg["kernel"] = c.kernel.describe();
  cfg["viscosity"] = c.viscosity.describe();
  cfg["epsilon_effective"] = c.viscosity.effective(h);
  cfg["viscosity_stencil"] = c.viscosity.stencil_coefficient(h);
  cfg["coupling"] = std::string(to_string(c.coupling));
  cfg["c_grad"] = c.coupling == CouplingMode::consistent ? 0.5 / h : 1.0 / (h * h);
  cfg["memory_rule"] = std::string(to_string(c.memory_rule));
  cfg["work_accumulation"] = std::string(to_string(c.work));
  cfg["profile"] = std::string(to_string(c.initial.profile));
  cfg["amplitude"] = c.initial.amplitude;
  if (c.initial.profile == InitialProfile::table) cfg["table"] = doc.table_path.string();
  cfg["allow_underresolved"] = c.initial.allow_underresolved;
  cfg["diagnostics_every"] = c.diagnostics_every;
  cfg["snapshot_times"] = c.snapshot_times;

  MemoryAccumulator probe(c.kernel, RealField(1, 0.0), plan.dt, c.memory_rule, 0.0);
  ordered_json kernel;
  kernel["description"] = c.kernel.describe();
  kernel["provenance"] = probe.provenance();
  kernel["q0"] = probe.weight();

  ordered_json snaps = ordered_json::array();
  for (std::size_t i = 0; i < report.snapshots.size(); ++i) {
    const auto& s = report.snapshots[i];
    ordered_json e;
    e["file"] = i < snapshot_files.size() ? snapshot_files[i] : std::string();
    e["requested_time"] = s.requested_time;
    e["time"] = s.actual_time;
    e["step"] = s.step;
    snaps.push_back(e);
  }

  ordered_json hyp;
  hyp["h1"] = report.hypotheses.h1_ok;
  hyp["h2"] = report.hypotheses.h2_ok;
  hyp["h3"] = report.hypotheses.h3_ok;
  hyp["h4"] = report.hypotheses.h4_ok;

  ordered_json m;
  m["version"] = kVersion;
  m["config"] = cfg;
  m["kernel"] = kernel;
  m["hypotheses"] = hyp;
  m["snapshots"] = snaps;
  m["diagnostics"] = "diagnostics.csv";
  m["termination"] = {{"status", std::string(to_string(report.status))},
                      {"message", report.message},
                      {"steps", report.steps}};
  m["warnings"] = report.warnings;
  m["wall_seconds"] = report.wall_seconds;
  return m.dump(2) + "\n";
}

RunArtifacts run_to_directory(const ConfigDocument& doc) {
  std::error_code ec;
  fs::create_directories(doc.output_dir, ec);
  if (ec) throw IoError("cannot create '" + doc.output_dir.string() + "': " + ec.message());

  RunArtifacts art;
  std::vector<std::string> names;
  RunObserver observer;
  observer.on_snapshot = [&](const SimState& state, const SnapshotInfo&) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.csv", names.size());
    const fs::path path = doc.output_dir / name;
    write_snapshot(path, state, doc.sim.grid);
    names.emplace_back(name);
    art.snapshots.push_back(path);
  };

  art.report = run(doc.sim, observer);

  art.diagnostics = doc.output_dir / "diagnostics.csv";
  {
    std::ofstream out(art.diagnostics, std::ios::binary);
    if (!out) throw IoError("cannot write '" + art.diagnostics.string() + "'");
    write_diagnostics(out, art.report.records);
  }
  art.manifest = doc.output_dir / "manifest.json";
  {
    std::ofstream out(art.manifest, std::ios::binary);
    if (!out) throw IoError("cannot write '" + art.manifest.string() + "'");
    out << manifest_json(doc, art.report, names);
  }
  return art;
}

namespace {

double l2_difference(const SimState& coarse, const SimState& fine, std::size_t stride, int field,
                     double h) {
  double sum = 0.0;
  for (std::size_t j = 0; j < coarse.size(); ++j) {
    const std::size_t k = j * stride;
    double d = 0.0;
    if (field == 0) d = std::norm(coarse.u[j] - fine.u[k]);
    if (field == 1) d = (coarse.v[j] - fine.v[k]) * (coarse.v[j] - fine.v[k]);
    if (field == 2) d = (coarse.w[j] - fine.w[k]) * (coarse.w[j] - fine.w[k]);
    sum += d;
  }
  return std::sqrt(h * sum);
}

}  // namespace

ConvergenceReport self_convergence(const SimConfig& config) {
  validate(config);
  ConvergenceReport rep;
  std::vector<SimConfig> levels;
  for (std::size_t f : {1u, 2u, 4u}) {
    SimConfig c = config;
    c.grid = Grid(config.grid.left(), config.grid.right(), config.grid.intervals() * f);
    c.snapshot_times.clear();
    c.diagnostics_every = std::numeric_limits<std::size_t>::max();
    levels.push_back(std::move(c));
  }
  // One time step for all three grids, so the differences isolate the
  // spatial error.
  double dt = plan_steps(levels.back()).dt;
  if (config.dt) dt = std::min(dt, *config.dt);
  std::vector<SimState> finals;
  for (auto& c : levels) {
    c.dt = dt;
    validate(c);
    RunReport r = run(c);
    if (r.status != Termination::completed) {
      throw BlowUpError("convergence run at J = " + std::to_string(c.grid.intervals()) +
                        " did not complete: " + r.message);
    }
    rep.intervals.push_back(c.grid.intervals());
    rep.dt.push_back(r.dt);
    finals.push_back(std::move(r.last_good));
  }
  const double h = config.grid.spacing();
  for (int f = 0; f < 3; ++f) {
    rep.error_coarse[f] = l2_difference(finals[0], finals[1], 2, f, h);
    rep.error_fine[f] = l2_difference(finals[1], finals[2], 2, f, h / 2.0);
    rep.order[f] = rep.error_fine[f] > 0.0 && rep.error_coarse[f] > 0.0
                       ? std::log2(rep.error_coarse[f] / rep.error_fine[f])
                       : std::numeric_limits<double>::quiet_NaN();
  }
  return rep;
}

std::string to_text(const ConvergenceReport& rep) {
  std::ostringstream out;
  out << "grids:";
  for (std::size_t i = 0; i < rep.intervals.size(); ++i) {
    out << " J=" << rep.intervals[i] << " (dt=" << fmt(rep.dt[i]) << ")";
  }
  out << "\nfield,error_J_2J,error_2J_4J,observed_order\n";
  const char* names[3] = {"u", "v", "w"};
  for (int f = 0; f < 3; ++f) {
    out << names[f] << "," << fmt(rep.error_coarse[f]) << "," << fmt(rep.error_fine[f]) << ","
        << fmt(rep.order[f]) << "\n";
  }
  return out.str();
}

}  // namespace swlw
