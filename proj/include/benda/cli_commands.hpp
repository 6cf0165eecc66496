#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "benda/experiments.hpp"

namespace benda {

// Exit codes shared by every command: 0 success, 2 configuration error,
// 3 numerical failure (blow-up or elliptic incompatibility), 4 I/O error.

struct RunOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed_override;
};

// Single twin experiment from a config file; writes rrmse.csv, snapshots,
// config.txt, manifest.json under out_dir.
int cmd_run(const RunOptions& opts, std::ostream& log);

struct SuiteOptions {
  std::string filter = "*";
  std::string out_dir = "out";
  int jobs = 1;
  std::optional<std::uint64_t> seed_override;
};

// Every catalog scenario matching filter, each in out_dir/<name>/, plus a
// combined summary.csv and manifest.json. Scenario failures are recorded in
// the manifest and the worst error code is returned.
int cmd_suite(const SuiteOptions& opts, std::ostream& log);
int cmd_suite(const SuiteOptions& opts, const std::vector<ScenarioConfig>& catalog,
              std::ostream& log);

struct ReferenceOptions {
  std::string config_path;
  std::string out_dir = "out";
};

// Reference trajectory only: observations.csv, snapshots, manifest.json.
int cmd_reference(const ReferenceOptions& opts, std::ostream& log);

int cmd_catalog(std::ostream& out);

// Glob with '*' (any run) and '?' (single character); no character classes.
bool glob_match(std::string_view pattern, std::string_view text);

}  // namespace benda
