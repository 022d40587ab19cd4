#include "thinfilm/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "thinfilm/errors.hpp"
#include "thinfilm/scenario.hpp"

namespace thinfilm {

namespace {

constexpr const char* kMagic = "thinfilm checkpoint v1";

double parse_double(const std::string& raw, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(raw.c_str(), &end);
  if (end == raw.c_str() || *end != '\0') {
    throw CheckpointError("malformed number '" + raw + "'", line);
  }
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const CheckpointData& data) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write checkpoint '" + path + "'");
  out << kMagic << "\n";
  out << "n = " << data.n << "\n";
  out << "L = " << format_full(data.L) << "\n";
  out << "eps = " << format_full(data.eps) << "\n";
  out << "R = " << format_full(data.R) << "\n";
  out << "mu = " << format_full(data.mu) << "\n";
  out << "t = " << format_full(data.t) << "\n";
  out << "dt_next = " << format_full(data.dt_next) << "\n";
  out << "energy_slack = " << format_full(data.energy_slack) << "\n";
  if (!data.manifest.empty()) out << "manifest = " << data.manifest << "\n";
  for (int k = 0; k <= data.n; ++k) out << "F " << k << " " << format_full(data.F[k]) << "\n";
  for (int k = 0; k <= data.n; ++k) out << "G " << k << " " << format_full(data.G[k]) << "\n";
  if (!out) throw ConfigError("failed while writing checkpoint '" + path + "'");
}

CheckpointData load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot read checkpoint '" + path + "'", 0);

  CheckpointData data;
  std::string line;
  std::size_t lineno = 0;

  if (!std::getline(in, line)) throw CheckpointError("empty checkpoint file", 1);
  ++lineno;
  if (line != kMagic) {
    throw CheckpointError("unsupported checkpoint format '" + line + "'", lineno);
  }

  bool have_n = false, have_L = false, have_eps = false, have_R = false, have_mu = false,
       have_t = false;
  int next_f = 0, next_g = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string head;
    ls >> head;
    if (head == "F" || head == "G") {
      int k = -1;
      std::string value;
      if (!(ls >> k >> value)) {
        throw CheckpointError("malformed coefficient line", lineno);
      }
      if (!have_n) throw CheckpointError("coefficient before the 'n' header field", lineno);
      auto& vec = head == "F" ? data.F : data.G;
      int& next = head == "F" ? next_f : next_g;
      if (k != next || k > data.n) {
        throw CheckpointError("coefficient index out of order", lineno);
      }
      vec[k] = parse_double(value, lineno);
      ++next;
      continue;
    }
    std::string eq, value;
    if (!(ls >> eq >> value) || eq != "=") {
      throw CheckpointError("malformed header line '" + line + "'", lineno);
    }
    if (head == "n") {
      data.n = static_cast<int>(parse_double(value, lineno));
      if (data.n < 0) throw CheckpointError("negative mode count", lineno);
      data.F.assign(data.n + 1, 0.0);
      data.G.assign(data.n + 1, 0.0);
      have_n = true;
    } else if (head == "L") {
      data.L = parse_double(value, lineno);
      have_L = true;
    } else if (head == "eps") {
      data.eps = parse_double(value, lineno);
      have_eps = true;
    } else if (head == "R") {
      data.R = parse_double(value, lineno);
      have_R = true;
    } else if (head == "mu") {
      data.mu = parse_double(value, lineno);
      have_mu = true;
    } else if (head == "t") {
      data.t = parse_double(value, lineno);
      have_t = true;
    } else if (head == "dt_next") {
      data.dt_next = parse_double(value, lineno);
    } else if (head == "energy_slack") {
      data.energy_slack = parse_double(value, lineno);
    } else if (head == "manifest") {
      data.manifest = value;
    }
    // unknown header keys are skipped for forward compatibility
  }

  if (!(have_n && have_L && have_eps && have_R && have_mu && have_t)) {
    throw CheckpointError("missing required header field", lineno);
  }
  if (next_f != data.n + 1 || next_g != data.n + 1) {
    throw CheckpointError("truncated coefficient block: have " + std::to_string(next_f) + " F and " +
                              std::to_string(next_g) + " G of " + std::to_string(data.n + 1),
                          lineno);
  }
  return data;
}

GalerkinState promote_state(const CheckpointData& data, int new_n) {
  if (new_n < data.n) {
    throw UsageError("cannot demote a checkpoint to a smaller truncation");
  }
  GalerkinState s;
  s.F.assign(new_n + 1, 0.0);
  s.G.assign(new_n + 1, 0.0);
  for (int k = 0; k <= data.n; ++k) {
    s.F[k] = data.F[k];
    s.G[k] = data.G[k];
  }
  s.t = data.t;
  return s;
}

}  // namespace thinfilm
