#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "benda/experiments.hpp"

namespace benda {

inline constexpr const char* kToolVersion = "0.1.0";

// One row per sample: t,rrmse_theta,rrmse_u,rrmse_v,flags with 17 significant
// digits. flags lists the letters of variables whose reference norm was zero
// (absolute error stored), "-" when none.
void write_rrmse_csv(const std::string& path, const RRMSESeries& series);

// step,variable,i,j,value with native fine-lattice indices.
void write_observation_csv(const std::string& path, const std::vector<ObservationSet>& sets);

// Binary 8-bit graymap of an (nx, m) block, x along the width, y downward
// from the top wall, linearly rescaled to [0, 255]; a text sidecar at
// path + ".txt" records the min/max window so values stay recoverable.
void write_pgm(const std::string& path, const Eigen::Ref<const Eigen::ArrayXXd>& xy);

// <stem>-theta/u/v as CSV + PGM (+ sidecars) under dir; returns the paths.
std::vector<std::string> write_state_snapshot(const std::string& dir, const std::string& stem,
                                              const State& state);

struct ScenarioRecord {
  std::string name;
  std::uint64_t config_hash = 0;
  double seconds = 0.0;
  int error_code = 0;  // 0 ok; otherwise the exit code the failure maps to
  std::string error;
  std::vector<std::string> files;
};

void write_manifest(const std::string& path, const std::vector<ScenarioRecord>& scenarios);

struct SummaryRow {
  std::string name;
  double terminal_theta = 0, terminal_u = 0, terminal_v = 0;
  double decay_theta = 0, decay_u = 0, decay_v = 0;
  double seconds = 0;
};

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);

void ensure_directory(const std::string& dir);

}  // namespace benda
