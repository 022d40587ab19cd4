#pragma once

#include <string>
#include <vector>

#include "thinfilm/galerkin_rhs.hpp"

namespace thinfilm {

/// Versioned, self-describing text snapshot of a run: header fields followed
/// by one line per coefficient, rendered with 17 significant digits so a
/// round trip reproduces every double bit-exactly. dt_next carries the step
/// controller state, which makes resumed runs follow the original step
/// sequence exactly.
struct CheckpointData {
  int format_version = 1;
  int n = 0;
  double L = 0, eps = 0, R = 0, mu = 0;
  double t = 0;
  double dt_next = -1.0;
  double energy_slack = -1.0;  // resolved slack of the producing run
  std::string manifest;        // hash of the producing config; may be empty
  std::vector<double> F, G;

  GalerkinState state() const { return GalerkinState{F, G, t}; }
};

void save_checkpoint(const std::string& path, const CheckpointData& data);

/// Throws CheckpointError (naming the line) on version mismatch, truncation,
/// or malformed content.
CheckpointData load_checkpoint(const std::string& path);

/// Embedding into a larger span: coefficients above the stored mode count are
/// zero. new_n < stored n is rejected (UsageError).
GalerkinState promote_state(const CheckpointData& data, int new_n);

}  // namespace thinfilm
