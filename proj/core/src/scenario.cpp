#include "thinfilm/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>

#include "thinfilm/errors.hpp"
#include "thinfilm/version.hpp"

namespace thinfilm {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string to_hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

KeyValueFile KeyValueFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

KeyValueFile KeyValueFile::parse_text(const std::string& text, const std::string& origin) {
  KeyValueFile kv;
  kv.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    }
    kv.entries_[section.empty() ? key : section + "." + key] = value;
  }
  return kv;
}

bool KeyValueFile::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string KeyValueFile::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError(origin_ + ": missing required key '" + key + "'");
  }
  return it->second;
}

std::string KeyValueFile::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double KeyValueFile::get_double(const std::string& key) const {
  const std::string raw = get_string(key);
  char* end = nullptr;
  const double v = std::strtod(raw.c_str(), &end);
  if (end == raw.c_str() || *end != '\0') {
    throw ConfigError(origin_ + ": key '" + key + "' is not a number: '" + raw + "'");
  }
  return v;
}

double KeyValueFile::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

long long KeyValueFile::get_int(const std::string& key) const {
  const std::string raw = get_string(key);
  char* end = nullptr;
  const long long v = std::strtoll(raw.c_str(), &end, 10);
  if (end == raw.c_str() || *end != '\0') {
    throw ConfigError(origin_ + ": key '" + key + "' is not an integer: '" + raw + "'");
  }
  return v;
}

long long KeyValueFile::get_int(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool KeyValueFile::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  std::string v = get_string(key);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError(origin_ + ": key '" + key + "' is not a boolean: '" + v + "'");
}

namespace {

// Per-preset parameter names and defaults; unknown [initial] keys are
// rejected so typos do not silently fall back to a default.
struct PresetParam {
  const char* name;
  double fallback;  // NaN: computed from L below
};

const PresetParam kFlatParams[] = {{"f_height", 0.5}, {"g_height", 0.5}};
const PresetParam kCosineParams[] = {{"f_base", 0.5}, {"f_amp", 0.3}, {"f_mode", 1},
                                     {"g_base", 0.5}, {"g_amp", 0.2}, {"g_mode", 2}};
const double kNaN = std::nan("");
const PresetParam kDropletParams[] = {{"f_base", 0.0},    {"f_amp", 0.8},  {"f_center", kNaN},
                                      {"f_width", kNaN},  {"g_base", 0.1}, {"g_amp", 0.0},
                                      {"g_center", kNaN}, {"g_width", kNaN}};
const PresetParam kRandomParams[] = {{"f_base", 0.5}, {"g_base", 0.5}, {"amp", 0.1},
                                     {"modes_used", 4}};

std::span<const PresetParam> preset_params_for(const std::string& preset) {
  if (preset == "flat") return kFlatParams;
  if (preset == "cosine-bump") return kCosineParams;
  if (preset == "compact-droplet") return kDropletParams;
  if (preset == "random") return kRandomParams;
  return {};
}

double droplet_default(const std::string& name, double L) {
  if (name == "f_center" || name == "g_center") return 0.5 * L;
  return 0.25 * L;  // widths
}

}  // namespace

ScenarioConfig ScenarioConfig::from_kv(const KeyValueFile& kv) {
  ScenarioConfig cfg;
  cfg.params.R = kv.get_double("system.R");
  cfg.params.mu = kv.get_double("system.mu");
  cfg.params.L = kv.get_double("system.L");
  cfg.params.eps = kv.get_double("system.eps");
  cfg.params.validate();

  cfg.modes = static_cast<int>(kv.get_int("discretization.modes"));
  if (cfg.modes < 0) throw ConfigError(kv.origin() + ": discretization.modes must be >= 0");
  cfg.cells = static_cast<int>(kv.get_int("discretization.cells", -1));

  cfg.controls.t_final = kv.get_double("time.t_final");
  cfg.controls.rel_tol = kv.get_double("time.rel_tol", 1e-8);
  cfg.controls.abs_tol = kv.get_double("time.abs_tol", 1e-10);
  cfg.controls.dt_init = kv.get_double("time.dt_init", 1e-6);
  cfg.controls.dt_min = kv.get_double("time.dt_min", 1e-13);
  cfg.controls.energy_slack = kv.get_double("time.energy_slack", -1.0);
  cfg.controls.snapshot_every =
      kv.get_double("time.snapshot_every", cfg.controls.t_final / 10.0);
  cfg.controls.validate();

  cfg.preset = kv.get_string("initial.preset");
  const auto params = preset_params_for(cfg.preset);
  if (params.empty() && cfg.preset != "file") {
    throw ConfigError(kv.origin() + ": unknown initial.preset '" + cfg.preset + "'");
  }
  for (const auto& p : params) {
    const double fb = std::isnan(p.fallback) ? droplet_default(p.name, cfg.params.L) : p.fallback;
    cfg.preset_params[p.name] = kv.get_double(std::string("initial.") + p.name, fb);
  }
  if (cfg.preset == "file") cfg.profile_file = kv.get_string("initial.file");

  cfg.seed = static_cast<std::uint64_t>(kv.get_int("run.seed", 0));
  cfg.output_dir = kv.get_string("output.dir", "");
  const std::string ckpt = kv.get_string("output.checkpoints", "final");
  if (ckpt == "snapshots") {
    cfg.checkpoint_snapshots = true;
  } else if (ckpt != "final") {
    throw ConfigError(kv.origin() + ": output.checkpoints must be 'final' or 'snapshots'");
  }
  return cfg;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path,
                                         const std::optional<std::string>& output_override) {
  ScenarioConfig cfg = from_kv(KeyValueFile::parse_file(path));
  if (output_override) cfg.output_dir = *output_override;
  return cfg;
}

std::string ScenarioConfig::canonical_text() const {
  // Sorted resolved key/value view. The output directory is deliberately
  // excluded: moving a run must not change its identity.
  std::map<std::string, std::string> m;
  m["system.R"] = format_full(params.R);
  m["system.mu"] = format_full(params.mu);
  m["system.L"] = format_full(params.L);
  m["system.eps"] = format_full(params.eps);
  m["discretization.modes"] = std::to_string(modes);
  m["discretization.cells"] = std::to_string(resolved_cells());
  m["time.t_final"] = format_full(controls.t_final);
  m["time.rel_tol"] = format_full(controls.rel_tol);
  m["time.abs_tol"] = format_full(controls.abs_tol);
  m["time.dt_init"] = format_full(controls.dt_init);
  m["time.dt_min"] = format_full(controls.dt_min);
  m["time.energy_slack"] = format_full(controls.energy_slack);
  m["time.snapshot_every"] = format_full(controls.snapshot_every);
  m["initial.preset"] = preset;
  for (const auto& [k, v] : preset_params) m["initial." + k] = format_full(v);
  if (!profile_file.empty()) m["initial.file"] = profile_file;
  m["run.seed"] = std::to_string(seed);
  m["output.checkpoints"] = checkpoint_snapshots ? "snapshots" : "final";
  m["code.version"] = kVersion;

  std::string out;
  for (const auto& [k, v] : m) {
    out += k;
    out += " = ";
    out += v;
    out += "\n";
  }
  return out;
}

std::string ScenarioConfig::manifest_hash() const { return to_hex64(fnv1a64(canonical_text())); }

namespace {

// Nodal sampling of the preset profile, non-negativity validation, then
// projection. Flat and cosine presets map to exact coefficients instead so
// flat states are exact equilibria of the assembled vector field.
GalerkinState project_profile(const std::vector<double>& f_nodal,
                              const std::vector<double>& g_nodal, const SpectralBasis& basis) {
  GalerkinState s;
  s.F = basis.project(f_nodal);
  s.G = basis.project(g_nodal);
  s.t = 0.0;
  return s;
}

void validate_nonneg(const std::vector<double>& nodal, const SpectralBasis& basis,
                     const char* which) {
  for (std::size_t q = 0; q < nodal.size(); ++q) {
    if (nodal[q] < 0.0) throw InitialDataError(which, basis.grid().nodes[q], nodal[q]);
  }
}

double droplet_profile(double x, double base, double amp, double center, double width) {
  const double u = (x - center) / width;
  const double arg = 1.0 - u * u;
  return base + (arg > 0.0 ? amp * arg * arg : 0.0);
}

}  // namespace

GalerkinState initial_state(const ScenarioConfig& cfg, const SpectralBasis& basis) {
  const double L = cfg.params.L;
  const int n = basis.max_mode();
  const auto& pp = cfg.preset_params;
  GalerkinState s;
  s.F.assign(n + 1, 0.0);
  s.G.assign(n + 1, 0.0);
  s.t = 0.0;

  if (cfg.preset == "flat") {
    const double hf = pp.at("f_height"), hg = pp.at("g_height");
    if (hf < 0.0) throw InitialDataError("f", 0.0, hf);
    if (hg < 0.0) throw InitialDataError("g", 0.0, hg);
    s.F[0] = hf * std::sqrt(L);
    s.G[0] = hg * std::sqrt(L);
    return s;
  }

  if (cfg.preset == "cosine-bump") {
    const double fb = pp.at("f_base"), fa = pp.at("f_amp");
    const double gb = pp.at("g_base"), ga = pp.at("g_amp");
    const int fm = static_cast<int>(pp.at("f_mode"));
    const int gm = static_cast<int>(pp.at("g_mode"));
    if (fm < 1 || fm > n || gm < 1 || gm > n) {
      throw ConfigError("cosine-bump mode index out of range for the configured truncation");
    }
    if (fb - std::abs(fa) < 0.0) {
      throw InitialDataError("f", fa > 0.0 ? L / fm : 0.0, fb - std::abs(fa));
    }
    if (gb - std::abs(ga) < 0.0) {
      throw InitialDataError("g", ga > 0.0 ? L / gm : 0.0, gb - std::abs(ga));
    }
    // base + amp cos(m pi x / L) = base sqrt(L) phi_0 + amp sqrt(L/2) phi_m
    s.F[0] = fb * std::sqrt(L);
    s.F[fm] = fa * std::sqrt(L / 2.0);
    s.G[0] = gb * std::sqrt(L);
    s.G[gm] = ga * std::sqrt(L / 2.0);
    return s;
  }

  const auto& nodes = basis.grid().nodes;
  std::vector<double> f_nodal(nodes.size()), g_nodal(nodes.size());

  if (cfg.preset == "compact-droplet") {
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      f_nodal[q] = droplet_profile(nodes[q], pp.at("f_base"), pp.at("f_amp"), pp.at("f_center"),
                                   pp.at("f_width"));
      g_nodal[q] = droplet_profile(nodes[q], pp.at("g_base"), pp.at("g_amp"), pp.at("g_center"),
                                   pp.at("g_width"));
    }
    validate_nonneg(f_nodal, basis, "f");
    validate_nonneg(g_nodal, basis, "g");
    s = project_profile(f_nodal, g_nodal, basis);
    // Projection of compactly supported data onto the cosine span oscillates
    // slightly; clip the negative undershoot and reproject once.
    auto fs = basis.synthesize(s.F, 0);
    auto gs = basis.synthesize(s.G, 0);
    bool clipped = false;
    for (auto& v : fs) {
      if (v < 0.0) {
        v = 0.0;
        clipped = true;
      }
    }
    for (auto& v : gs) {
      if (v < 0.0) {
        v = 0.0;
        clipped = true;
      }
    }
    if (clipped) {
      s.F = basis.project(fs);
      s.G = basis.project(gs);
      fs = basis.synthesize(s.F, 0);
      gs = basis.synthesize(s.G, 0);
      double min_after = 0.0;
      for (double v : fs) min_after = std::min(min_after, v);
      for (double v : gs) min_after = std::min(min_after, v);
      if (min_after < -1e-10) {
        throw InitialDataError("compact-droplet projection", 0.0, min_after);
      }
    }
    return s;
  }

  if (cfg.preset == "random") {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const double amp = pp.at("amp");
    const int used = std::min(static_cast<int>(pp.at("modes_used")), n);
    s.F[0] = pp.at("f_base") * std::sqrt(L);
    for (int k = 1; k <= used; ++k) s.F[k] = amp * uni(rng) / (k * k);
    s.G[0] = pp.at("g_base") * std::sqrt(L);
    for (int k = 1; k <= used; ++k) s.G[k] = amp * uni(rng) / (k * k);
    // Lift each profile so the sampled minimum is non-negative.
    auto fs = basis.synthesize(s.F, 0);
    auto gs = basis.synthesize(s.G, 0);
    const double fmin = *std::min_element(fs.begin(), fs.end());
    const double gmin = *std::min_element(gs.begin(), gs.end());
    if (fmin < 0.0) s.F[0] += -fmin * std::sqrt(L);
    if (gmin < 0.0) s.G[0] += -gmin * std::sqrt(L);
    return s;
  }

  if (cfg.preset == "file") {
    std::ifstream in(cfg.profile_file);
    if (!in) throw ConfigError("cannot read initial profile file '" + cfg.profile_file + "'");
    std::vector<double> xs, fs, gs;
    std::string line;
    std::size_t lineno = 0;
    bool header_skipped = false;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      double x, f, g;
      if (std::sscanf(t.c_str(), "%lf,%lf,%lf", &x, &f, &g) != 3) {
        if (!header_skipped) {
          header_skipped = true;  // tolerate a single x,f,g header line
          continue;
        }
        throw ConfigError(cfg.profile_file + ":" + std::to_string(lineno) +
                          ": expected 'x,f,g' sample");
      }
      xs.push_back(x);
      fs.push_back(f);
      gs.push_back(g);
    }
    if (xs.size() < 2) throw ConfigError(cfg.profile_file + ": need at least two samples");
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double x = nodes[q];
      auto it = std::lower_bound(xs.begin(), xs.end(), x);
      std::size_t hi = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - xs.begin(), 1),
                                             xs.size() - 1);
      const std::size_t lo = hi - 1;
      const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
      f_nodal[q] = (1.0 - w) * fs[lo] + w * fs[hi];
      g_nodal[q] = (1.0 - w) * gs[lo] + w * gs[hi];
    }
    validate_nonneg(f_nodal, basis, "f");
    validate_nonneg(g_nodal, basis, "g");
    return project_profile(f_nodal, g_nodal, basis);
  }

  throw ConfigError("unknown initial.preset '" + cfg.preset + "'");
}

}  // namespace thinfilm
