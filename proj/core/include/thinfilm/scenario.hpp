#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "thinfilm/galerkin_rhs.hpp"
#include "thinfilm/time_integrator.hpp"

namespace thinfilm {

/// Flat `key = value` text with `[section]` headers and `#` comments.
/// Keys are addressed as "section.key".
class KeyValueFile {
public:
  static KeyValueFile parse_file(const std::string& path);
  static KeyValueFile parse_text(const std::string& text, const std::string& origin);

  bool has(const std::string& key) const;
  // Accessors throw ConfigError naming the missing/malformed key.
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }
  const std::string& origin() const { return origin_; }

private:
  std::map<std::string, std::string> entries_;
  std::string origin_;
};

/// A fully resolved run description.
struct ScenarioConfig {
  SystemParams params;
  int modes = 16;
  int cells = -1;  // -1: default 8 * (modes + 1)
  IntegratorControls controls;
  std::string preset = "cosine-bump";
  std::map<std::string, double> preset_params;  // resolved, preset-specific
  std::string profile_file;                     // preset == "file"
  std::uint64_t seed = 0;
  std::string output_dir;
  bool checkpoint_snapshots = false;  // also write a checkpoint per snapshot

  // Missing required keys or invalid values throw ConfigError / ParameterError.
  static ScenarioConfig from_kv(const KeyValueFile& kv);
  static ScenarioConfig from_file(const std::string& path,
                                  const std::optional<std::string>& output_override = {});

  int resolved_cells() const { return cells > 0 ? cells : 8 * (modes + 1); }

  // Canonical resolved text (sorted keys); its FNV-1a hash stamps every
  // output file produced from this configuration.
  std::string canonical_text() const;
  std::string manifest_hash() const;
};

/// Builds the initial coefficients for the configured preset and validates
/// non-negativity of the sampled profiles (InitialDataError on violation).
GalerkinState initial_state(const ScenarioConfig& cfg, const SpectralBasis& basis);

std::uint64_t fnv1a64(const std::string& text);
std::string to_hex64(std::uint64_t v);

/// Shortest-exact decimal rendering helpers (17 significant digits).
std::string format_full(double v);

}  // namespace thinfilm
