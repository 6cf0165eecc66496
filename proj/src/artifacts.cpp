#include "benda/artifacts.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

#include "benda/errors.hpp"

namespace benda {

namespace {

struct FileGuard {
  std::FILE* f = nullptr;
  explicit FileGuard(const std::string& path, const char* mode) : f(std::fopen(path.c_str(), mode)) {
    if (!f) throw IoError("cannot open '" + path + "' for writing");
  }
  ~FileGuard() {
    if (f) std::fclose(f);
  }
  FileGuard(const FileGuard&) = delete;
  FileGuard& operator=(const FileGuard&) = delete;
};

std::string flag_letters(unsigned flags) {
  std::string s;
  if (flags & kFlagTheta) s += 't';
  if (flags & kFlagU) s += 'u';
  if (flags & kFlagV) s += 'v';
  return s.empty() ? "-" : s;
}

}  // namespace

void write_rrmse_csv(const std::string& path, const RRMSESeries& series) {
  FileGuard out(path, "w");
  std::fprintf(out.f, "t,rrmse_theta,rrmse_u,rrmse_v,flags\n");
  for (const RRMSESample& s : series.samples) {
    std::fprintf(out.f, "%.17g,%.17g,%.17g,%.17g,%s\n", s.t, s.theta, s.u, s.v,
                 flag_letters(s.flags).c_str());
  }
}

void write_observation_csv(const std::string& path, const std::vector<ObservationSet>& sets) {
  FileGuard out(path, "w");
  std::fprintf(out.f, "step,variable,i,j,value\n");
  for (const ObservationSet& obs : sets) {
    auto block = [&](const char* name, const Eigen::ArrayXXd& a) {
      for (long b = 0; b < a.cols(); ++b)
        for (long aa = 0; aa < a.rows(); ++aa)
          std::fprintf(out.f, "%ld,%s,%ld,%ld,%.17g\n", obs.step, name, aa * obs.stride,
                       b * obs.stride, a(aa, b));
    };
    if (obs.has_temperature) block("theta", obs.theta);
    if (obs.has_velocity) {
      block("u", obs.u);
      block("v", obs.v);
    }
  }
}

void write_pgm(const std::string& path, const Eigen::Ref<const Eigen::ArrayXXd>& xy) {
  const long nx = xy.rows(), m = xy.cols();
  const double lo = xy.minCoeff(), hi = xy.maxCoeff();
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;

  FileGuard out(path, "wb");
  std::fprintf(out.f, "P5\n%ld %ld\n255\n", nx, m);
  std::vector<unsigned char> row(static_cast<size_t>(nx));
  for (long j = m - 1; j >= 0; --j) {  // top wall first
    for (long i = 0; i < nx; ++i)
      row[static_cast<size_t>(i)] =
          static_cast<unsigned char>(std::lround((xy(i, j) - lo) * scale));
    if (std::fwrite(row.data(), 1, row.size(), out.f) != row.size())
      throw IoError("short write on '" + path + "'");
  }

  FileGuard side(path + ".txt", "w");
  std::fprintf(side.f, "min = %.17g\nmax = %.17g\nwidth = %ld\nheight = %ld\n", lo, hi, nx, m);
}

std::vector<std::string> write_state_snapshot(const std::string& dir, const std::string& stem,
                                              const State& state) {
  std::vector<std::string> files;
  auto emit = [&](const char* var, const Eigen::Ref<const Eigen::ArrayXXd>& xy) {
    const std::string base = dir + "/" + stem + "-" + var;
    write_field_csv(base + ".csv", xy);
    write_pgm(base + ".pgm", xy);
    files.push_back(base + ".csv");
    files.push_back(base + ".pgm");
    files.push_back(base + ".pgm.txt");
  };
  emit("theta", state.theta.interior());
  emit("u", state.u.interior());
  emit("v", state.v.a);
  return files;
}

void write_manifest(const std::string& path, const std::vector<ScenarioRecord>& scenarios) {
  nlohmann::json doc;
  doc["tool_version"] = kToolVersion;
  doc["scenarios"] = nlohmann::json::array();
  for (const ScenarioRecord& rec : scenarios) {
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(rec.config_hash));
    nlohmann::json entry{{"name", rec.name},
                         {"config_hash", hash},
                         {"seconds", rec.seconds},
                         {"files", rec.files}};
    if (rec.error_code != 0) {
      entry["error_code"] = rec.error_code;
      entry["error"] = rec.error;
    }
    doc["scenarios"].push_back(std::move(entry));
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("short write on '" + path + "'");
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  FileGuard out(path, "w");
  std::fprintf(out.f,
               "scenario,terminal_rrmse_theta,terminal_rrmse_u,terminal_rrmse_v,"
               "decay_rate_theta,decay_rate_u,decay_rate_v,seconds\n");
  for (const SummaryRow& r : rows)
    std::fprintf(out.f, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.3f\n", r.name.c_str(),
                 r.terminal_theta, r.terminal_u, r.terminal_v, r.decay_theta, r.decay_u, r.decay_v,
                 r.seconds);
}

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
  if (!std::filesystem::is_directory(dir)) throw IoError("'" + dir + "' is not a directory");
}

}  // namespace benda
