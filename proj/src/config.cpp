#include "benda/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

namespace benda {

namespace {

std::string trim(std::string_view s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct RawConfig {
  std::string source;
  std::map<std::string, Entry> entries;  // "section.key" -> value

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
  }

  const Entry* find(const std::string& key) const {
    auto it = entries.find(key);
    return it == entries.end() ? nullptr : &it->second;
  }

  bool has(const std::string& key) const { return entries.count(key) != 0; }

  std::string require(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw ConfigError(source + ": missing mandatory key '" + key + "'");
    return e->value;
  }

  double get_double(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw ConfigError(source + ": missing mandatory key '" + key + "'");
    try {
      size_t pos = 0;
      double v = std::stod(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      fail(e->line, "key '" + key + "': cannot parse '" + e->value + "' as a number");
    }
  }

  double get_double_or(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
  }

  long get_long(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw ConfigError(source + ": missing mandatory key '" + key + "'");
    try {
      size_t pos = 0;
      long v = std::stol(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      fail(e->line, "key '" + key + "': cannot parse '" + e->value + "' as an integer");
    }
  }

  long get_long_or(const std::string& key, long fallback) const {
    return has(key) ? get_long(key) : fallback;
  }

  std::uint64_t get_u64(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw ConfigError(source + ": missing mandatory key '" + key + "'");
    try {
      size_t pos = 0;
      std::uint64_t v = std::stoull(e->value, &pos);
      if (pos != e->value.size()) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      fail(e->line, "key '" + key + "': cannot parse '" + e->value + "' as an unsigned integer");
    }
  }

  // enum-ish string with a fixed vocabulary
  int get_choice(const std::string& key, const std::vector<std::string>& options,
                 bool required, int fallback) const {
    const Entry* e = find(key);
    if (!e) {
      if (required) throw ConfigError(source + ": missing mandatory key '" + key + "'");
      return fallback;
    }
    for (size_t k = 0; k < options.size(); ++k)
      if (e->value == options[k]) return static_cast<int>(k);
    std::string all;
    for (const auto& o : options) all += (all.empty() ? "" : " | ") + o;
    fail(e->line, "key '" + key + "': unknown value '" + e->value + "' (expected " + all + ")");
  }
};

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"grid", {"nx", "ny", "Lx", "Ly"}},
    {"solver", {"Ra", "Pr", "dt", "nsteps"}},
    {"observations", {"stride", "time_every", "variables", "hold", "epsilon", "seed"}},
    {"nudging",
     {"mechanism", "interpolant", "preset", "mu_theta", "mu_u", "alpha_theta", "alpha_u"}},
    {"ic",
     {"reference", "assimilated", "shear_amplitude", "shear_band_lo", "shear_band_hi",
      "shear_wavenumber"}},
    {"output", {"name", "snapshot_steps", "fit_t_lo", "fit_t_hi"}},
};

RawConfig tokenize(const std::string& text, const std::string& source) {
  RawConfig raw;
  raw.source = source;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '[') {
      if (body.back() != ']') raw.fail(lineno, "unterminated section header");
      section = trim(body.substr(1, body.size() - 2));
      if (!kKnownKeys.count(section)) raw.fail(lineno, "unknown section [" + section + "]");
      continue;
    }
    auto eq = body.find('=');
    if (eq == std::string::npos) raw.fail(lineno, "expected 'key = value'");
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (section.empty()) raw.fail(lineno, "key '" + key + "' appears before any [section]");
    if (!kKnownKeys.at(section).count(key))
      raw.fail(lineno, "unknown key '" + key + "' in [" + section + "]");
    if (value.empty()) raw.fail(lineno, "key '" + key + "' has no value");
    raw.entries[section + "." + key] = {value, lineno, false};
  }
  return raw;
}

IcKind parse_ic(const RawConfig& raw, const std::string& key) {
  switch (raw.get_choice(key, {"reference", "zero", "shear"}, true, 0)) {
    case 0: return IcKind::Reference;
    case 1: return IcKind::Zero;
    default: return IcKind::Shear;
  }
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& source_name) {
  RawConfig raw = tokenize(text, source_name);
  ScenarioConfig c;

  c.grid.nx = static_cast<int>(raw.get_long_or("grid.nx", 200));
  c.grid.ny = static_cast<int>(raw.get_long_or("grid.ny", 100));
  c.grid.Lx = raw.get_double_or("grid.Lx", 2.0);
  c.grid.Ly = raw.get_double_or("grid.Ly", 1.0);

  c.params.Ra = raw.get_double("solver.Ra");
  c.params.Pr = raw.get_double("solver.Pr");
  c.params.dt = raw.get_double("solver.dt");
  c.nsteps = raw.get_long("solver.nsteps");

  c.policy.stride = static_cast<int>(raw.get_long("observations.stride"));
  c.policy.time_every = raw.get_long("observations.time_every");
  switch (raw.get_choice("observations.variables", {"temperature", "velocity", "both"}, false, 2)) {
    case 0: c.policy.observe_temperature = true; c.policy.observe_velocity = false; break;
    case 1: c.policy.observe_temperature = false; c.policy.observe_velocity = true; break;
    default: c.policy.observe_temperature = true; c.policy.observe_velocity = true; break;
  }
  c.policy.hold = raw.get_choice("observations.hold", {"hold_last", "only_at_arrival"}, false, 0)
                      ? HoldMode::OnlyAtArrival
                      : HoldMode::HoldLast;
  c.noise.epsilon = raw.get_double("observations.epsilon");
  c.noise.seed = raw.get_u64("observations.seed");

  c.nudge.mechanism =
      raw.get_choice("nudging.mechanism", {"cda", "na"}, true, 0) ? Mechanism::NA : Mechanism::CDA;
  switch (raw.get_choice("nudging.interpolant",
                         {"piecewise_constant", "nearest", "linear", "cubic", "spline"}, true, 0)) {
    case 0: c.nudge.interpolant = InterpolantKind::PiecewiseConstant; break;
    case 1: c.nudge.interpolant = InterpolantKind::Nearest; break;
    case 2: c.nudge.interpolant = InterpolantKind::Linear; break;
    case 3: c.nudge.interpolant = InterpolantKind::Cubic; break;
    default: c.nudge.interpolant = InterpolantKind::Spline; break;
  }
  const bool has_preset = raw.has("nudging.preset");
  const bool has_explicit = raw.has("nudging.mu_theta") || raw.has("nudging.mu_u") ||
                            raw.has("nudging.alpha_theta") || raw.has("nudging.alpha_u");
  if (!has_preset && !has_explicit)
    throw ConfigError(source_name +
                      ": [nudging] needs 'preset' or explicit strength keys (mu_*, alpha_*)");
  if (has_preset) {
    switch (raw.get_choice("nudging.preset", {"small", "medium", "large"}, true, 0)) {
      case 0: apply_preset(c.nudge, Preset::Small); break;
      case 1: apply_preset(c.nudge, Preset::Medium); break;
      default: apply_preset(c.nudge, Preset::Large); break;
    }
  }
  c.nudge.mu_theta = raw.get_double_or("nudging.mu_theta", c.nudge.mu_theta);
  c.nudge.mu_u = raw.get_double_or("nudging.mu_u", c.nudge.mu_u);
  c.nudge.alpha_theta = raw.get_double_or("nudging.alpha_theta", c.nudge.alpha_theta);
  c.nudge.alpha_u = raw.get_double_or("nudging.alpha_u", c.nudge.alpha_u);

  c.reference_ic.kind = parse_ic(raw, "ic.reference");
  c.assimilated_ic.kind = parse_ic(raw, "ic.assimilated");
  for (InitialCondition* ic : {&c.reference_ic, &c.assimilated_ic}) {
    ic->shear_amplitude = raw.get_double_or("ic.shear_amplitude", ic->shear_amplitude);
    ic->shear_band_lo = raw.get_double_or("ic.shear_band_lo", ic->shear_band_lo);
    ic->shear_band_hi = raw.get_double_or("ic.shear_band_hi", ic->shear_band_hi);
    ic->shear_wavenumber = raw.get_double_or("ic.shear_wavenumber", ic->shear_wavenumber);
  }

  if (const auto* e = raw.find("output.name")) c.name = e->value;
  c.fit_t_lo = raw.get_double_or("output.fit_t_lo", c.fit_t_lo);
  c.fit_t_hi = raw.get_double_or("output.fit_t_hi", c.fit_t_hi);
  if (const auto* e = raw.find("output.snapshot_steps")) {
    c.snapshot_steps.clear();
    std::string item;
    std::istringstream list(e->value);
    while (std::getline(list, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        size_t pos = 0;
        c.snapshot_steps.push_back(std::stol(item, &pos));
        if (pos != item.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        raw.fail(e->line, "key 'snapshot_steps': cannot parse '" + item + "' as an integer");
      }
    }
  } else {
    c.snapshot_steps = {c.nsteps};
  }

  c.validate();
  return c;
}

ScenarioConfig parse_config(const std::string& path) {
  return parse_config_text(read_text_file(path), path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw IoError("read failed: " + path);
  return ss.str();
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* ic_name(IcKind k) {
  switch (k) {
    case IcKind::Reference: return "reference";
    case IcKind::Zero: return "zero";
    case IcKind::Shear: return "shear";
  }
  return "zero";
}

const char* interpolant_name(InterpolantKind k) {
  switch (k) {
    case InterpolantKind::PiecewiseConstant: return "piecewise_constant";
    case InterpolantKind::Nearest: return "nearest";
    case InterpolantKind::Linear: return "linear";
    case InterpolantKind::Cubic: return "cubic";
    case InterpolantKind::Spline: return "spline";
  }
  return "piecewise_constant";
}

}  // namespace

std::string write_config_text(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "[grid]\n"
      << "nx = " << c.grid.nx << "\nny = " << c.grid.ny << "\nLx = " << fmt_double(c.grid.Lx)
      << "\nLy = " << fmt_double(c.grid.Ly) << "\n\n[solver]\nRa = " << fmt_double(c.params.Ra)
      << "\nPr = " << fmt_double(c.params.Pr) << "\ndt = " << fmt_double(c.params.dt)
      << "\nnsteps = " << c.nsteps << "\n\n[observations]\nstride = " << c.policy.stride
      << "\ntime_every = " << c.policy.time_every << "\nvariables = "
      << (c.policy.observe_temperature ? (c.policy.observe_velocity ? "both" : "temperature")
                                       : "velocity")
      << "\nhold = " << (c.policy.hold == HoldMode::HoldLast ? "hold_last" : "only_at_arrival")
      << "\nepsilon = " << fmt_double(c.noise.epsilon) << "\nseed = " << c.noise.seed
      << "\n\n[nudging]\nmechanism = " << (c.nudge.mechanism == Mechanism::CDA ? "cda" : "na")
      << "\ninterpolant = " << interpolant_name(c.nudge.interpolant)
      << "\nmu_theta = " << fmt_double(c.nudge.mu_theta) << "\nmu_u = " << fmt_double(c.nudge.mu_u)
      << "\nalpha_theta = " << fmt_double(c.nudge.alpha_theta)
      << "\nalpha_u = " << fmt_double(c.nudge.alpha_u)
      << "\n\n[ic]\nreference = " << ic_name(c.reference_ic.kind)
      << "\nassimilated = " << ic_name(c.assimilated_ic.kind)
      << "\nshear_amplitude = " << fmt_double(c.reference_ic.shear_amplitude)
      << "\nshear_band_lo = " << fmt_double(c.reference_ic.shear_band_lo)
      << "\nshear_band_hi = " << fmt_double(c.reference_ic.shear_band_hi)
      << "\nshear_wavenumber = " << fmt_double(c.reference_ic.shear_wavenumber)
      << "\n\n[output]\nname = " << c.name << "\nsnapshot_steps = ";
  for (size_t k = 0; k < c.snapshot_steps.size(); ++k)
    out << (k ? "," : "") << c.snapshot_steps[k];
  out << "\nfit_t_lo = " << fmt_double(c.fit_t_lo) << "\nfit_t_hi = " << fmt_double(c.fit_t_hi)
      << "\n";
  return out.str();
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace benda
