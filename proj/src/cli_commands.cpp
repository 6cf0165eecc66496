#include "benda/cli_commands.hpp"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "benda/artifacts.hpp"
#include "benda/config.hpp"
#include "benda/errors.hpp"

namespace benda {

namespace {

// Exit code for the in-flight exception; message lands in msg.
int classify_current_exception(std::string& msg) {
  try {
    throw;
  } catch (const ConfigError& e) {
    msg = e.what();
    return 2;
  } catch (const BlowUpError& e) {
    msg = e.what();
    return 3;
  } catch (const CompatibilityError& e) {
    msg = e.what();
    return 3;
  } catch (const IoError& e) {
    msg = e.what();
    return 4;
  } catch (const std::exception& e) {
    msg = e.what();
    return 1;
  }
}

template <class Fn>
int guarded(std::ostream& log, Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (...) {
    std::string msg;
    int code = classify_current_exception(msg);
    log << "error: " << msg << "\n";
    return code;
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("short write on '" + path + "'");
}

std::string step_tag(long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step%06ld", step);
  return buf;
}

SummaryRow summarize(const ScenarioConfig& cfg, const TwinResult& result) {
  SummaryRow row;
  row.name = cfg.name;
  row.terminal_theta = result.series.terminal_mean(Variable::Theta);
  row.terminal_u = result.series.terminal_mean(Variable::U);
  row.terminal_v = result.series.terminal_mean(Variable::V);
  row.decay_theta = result.fit_theta.rate;
  row.decay_u = result.fit_u.rate;
  row.decay_v = result.fit_v.rate;
  row.seconds = result.seconds;
  return row;
}

// config.txt, rrmse.csv and the requested snapshots for one finished twin
// experiment; returns the relative-to-dir artifact list for the manifest.
std::vector<std::string> write_twin_artifacts(const std::string& dir, const ScenarioConfig& cfg,
                                              const TwinResult& result) {
  ensure_directory(dir);
  std::vector<std::string> files;

  write_text(dir + "/config.txt", write_config_text(cfg));
  files.push_back("config.txt");

  write_rrmse_csv(dir + "/rrmse.csv", result.series);
  files.push_back("rrmse.csv");

  auto strip = [&](std::vector<std::string> paths) {
    for (std::string& p : paths) files.push_back(p.substr(dir.size() + 1));
  };
  for (const Snapshot& snap : result.snapshots) {
    strip(write_state_snapshot(dir, "ref-" + step_tag(snap.step), snap.reference));
    strip(write_state_snapshot(dir, "est-" + step_tag(snap.step), snap.assimilated));
  }
  return files;
}

void log_summary(std::ostream& log, const SummaryRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "%s: terminal rrmse theta=%.3e u=%.3e v=%.3e decay theta=%.3f u=%.3f v=%.3f "
                "(%.1fs)",
                row.name.c_str(), row.terminal_theta, row.terminal_u, row.terminal_v,
                row.decay_theta, row.decay_u, row.decay_v, row.seconds);
  log << buf << "\n";
}

}  // namespace

bool glob_match(std::string_view pattern, std::string_view text) {
  size_t p = 0, t = 0, star = std::string_view::npos, mark = 0;
  while (t < text.size()) {
    if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == text[t])) {
      ++p, ++t;
    } else if (p < pattern.size() && pattern[p] == '*') {
      star = p++;
      mark = t;
    } else if (star != std::string_view::npos) {
      p = star + 1;
      t = ++mark;
    } else {
      return false;
    }
  }
  while (p < pattern.size() && pattern[p] == '*') ++p;
  return p == pattern.size();
}

int cmd_run(const RunOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    ScenarioConfig cfg = parse_config(opts.config_path);
    if (opts.seed_override) cfg.noise.seed = *opts.seed_override;

    TwinResult result = run_twin(cfg);

    ScenarioRecord rec;
    rec.name = cfg.name;
    rec.config_hash = fnv1a64(write_config_text(cfg));
    rec.seconds = result.seconds;
    rec.files = write_twin_artifacts(opts.out_dir, cfg, result);
    write_manifest(opts.out_dir + "/manifest.json", {rec});

    log_summary(log, summarize(cfg, result));
  });
}

int cmd_suite(const SuiteOptions& opts, std::ostream& log) {
  return cmd_suite(opts, scenario_catalog(), log);
}

int cmd_suite(const SuiteOptions& opts, const std::vector<ScenarioConfig>& catalog,
              std::ostream& log) {
  int first_failure = 0;
  int rc = guarded(log, [&] {
    std::vector<ScenarioConfig> selected;
    for (const ScenarioConfig& cfg : catalog)
      if (glob_match(opts.filter, cfg.name)) selected.push_back(cfg);
    if (selected.empty())
      throw ConfigError("filter '" + opts.filter + "' selects no catalog scenario");
    if (opts.jobs < 1) throw ConfigError("jobs must be >= 1");
    if (opts.seed_override)
      for (ScenarioConfig& cfg : selected) cfg.noise.seed = *opts.seed_override;

    ensure_directory(opts.out_dir);

    std::vector<ScenarioRecord> records(selected.size());
    std::vector<SummaryRow> rows(selected.size());
    std::atomic<size_t> next{0};
    std::mutex log_mutex;

    auto worker = [&] {
      for (size_t k = next.fetch_add(1); k < selected.size(); k = next.fetch_add(1)) {
        const ScenarioConfig& cfg = selected[k];
        ScenarioRecord& rec = records[k];
        rec.name = cfg.name;
        rec.config_hash = fnv1a64(write_config_text(cfg));
        rows[k].name = cfg.name;
        try {
          TwinResult result = run_twin(cfg);
          rec.seconds = result.seconds;
          rec.files = write_twin_artifacts(opts.out_dir + "/" + cfg.name, cfg, result);
          rows[k] = summarize(cfg, result);
          std::lock_guard<std::mutex> lock(log_mutex);
          log_summary(log, rows[k]);
        } catch (...) {
          rec.error_code = classify_current_exception(rec.error);
          std::lock_guard<std::mutex> lock(log_mutex);
          log << "error: " << cfg.name << ": " << rec.error << "\n";
        }
      }
    };

    const size_t nworkers = std::min<size_t>(static_cast<size_t>(opts.jobs), selected.size());
    if (nworkers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (size_t w = 0; w < nworkers; ++w) pool.emplace_back(worker);
      for (std::thread& th : pool) th.join();
    }

    write_summary_csv(opts.out_dir + "/summary.csv", rows);
    write_manifest(opts.out_dir + "/manifest.json", records);

    for (const ScenarioRecord& rec : records)
      if (rec.error_code != 0 && first_failure == 0) first_failure = rec.error_code;
  });
  return rc != 0 ? rc : first_failure;
}

int cmd_reference(const ReferenceOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    ScenarioConfig cfg = parse_config(opts.config_path);
    ReferenceRun run = run_reference(cfg);

    ensure_directory(opts.out_dir);
    ScenarioRecord rec;
    rec.name = cfg.name;
    rec.config_hash = fnv1a64(write_config_text(cfg));

    write_text(opts.out_dir + "/config.txt", write_config_text(cfg));
    rec.files.push_back("config.txt");
    write_observation_csv(opts.out_dir + "/observations.csv", run.observations);
    rec.files.push_back("observations.csv");
    for (const auto& [step, state] : run.snapshots)
      for (const std::string& p :
           write_state_snapshot(opts.out_dir, "ref-" + step_tag(step), state))
        rec.files.push_back(p.substr(opts.out_dir.size() + 1));

    write_manifest(opts.out_dir + "/manifest.json", {rec});
    log << cfg.name << ": " << run.observations.size() << " observation sets\n";
  });
}

int cmd_catalog(std::ostream& out) {
  for (const ScenarioConfig& cfg : scenario_catalog()) out << cfg.name << "\n";
  return 0;
}

}  // namespace benda
