#pragma once

#include <optional>
#include <string>
#include <vector>

#include "benda/assimilation.hpp"
#include "benda/solver.hpp"

namespace benda {

enum class IcKind { Reference, Zero, Shear };

struct InitialCondition {
  IcKind kind = IcKind::Zero;
  // shear profile: u0 = amplitude * sin(wavenumber * y) inside [band_lo, band_hi]
  double shear_amplitude = 0.5;
  double shear_band_lo = 0.4;
  double shear_band_hi = 0.6;
  double shear_wavenumber = 0.3141592653589793;  // 2 pi / 20

  State build(const GridSpec& grid) const;
};

enum class Variable { Theta, U, V };

// Degenerate-denominator flags: when a reference norm is exactly zero the
// stored value is the absolute L2 norm of the difference instead of a ratio.
inline constexpr unsigned kFlagTheta = 1u;
inline constexpr unsigned kFlagU = 2u;
inline constexpr unsigned kFlagV = 4u;

struct RRMSESample {
  double t = 0.0;
  double theta = 0.0;
  double u = 0.0;
  double v = 0.0;
  unsigned flags = 0;

  double value(Variable var) const {
    switch (var) {
      case Variable::Theta: return theta;
      case Variable::U: return u;
      case Variable::V: return v;
    }
    return 0.0;
  }
};

// L2 over native interior points per variable (v includes its wall rows,
// which are zero on both sides). est.t stamps the sample.
RRMSESample rrmse(const State& est, const State& ref);

struct RRMSESeries {
  std::vector<RRMSESample> samples;  // nsteps + 1 entries; samples[0] is t = 0

  // Mean over the last ceil(fraction * nsteps) post-step samples.
  double terminal_mean(Variable var, double fraction = 0.1) const;
};

// Least-squares fit of log(max(value, clip)) against t on [t_lo, t_hi]:
// value ~ exp(intercept - rate * t). rate > 0 means decay.
struct DecayFit {
  double rate = 0.0;
  double intercept = 0.0;
};

DecayFit fit_decay_rate(const RRMSESeries& series, Variable var, double t_lo, double t_hi,
                        double clip = 1e-14);

// Earliest sample time with value(var) < threshold, if any.
std::optional<double> first_time_below(const RRMSESeries& series, Variable var, double threshold);

struct ScenarioConfig {
  std::string name = "scenario";
  GridSpec grid;
  SolverParams params;
  long nsteps = 3000;
  InitialCondition reference_ic{IcKind::Reference};
  InitialCondition assimilated_ic{IcKind::Zero};
  ObservationPolicy policy;
  NudgeSpec nudge;
  NoiseModel noise;
  std::vector<long> snapshot_steps;  // completed-step counts; 0 = initial state
  double fit_t_lo = 2.0;             // decay-fit window, clipped to [0, t_end]
  double fit_t_hi = 20.0;

  double t_end() const { return nsteps * params.dt; }
  void validate() const;
};

struct Snapshot {
  long step = 0;
  State reference;
  State assimilated;
};

struct TwinResult {
  RRMSESeries series;
  DecayFit fit_theta, fit_u, fit_v;
  std::vector<Snapshot> snapshots;
  State final_reference;
  State final_assimilated;
  double max_scaled_divergence = 0.0;  // max over both runs of max|div| / max(1, max|u|, max|v|)
  double seconds = 0.0;
};

// Reference and assimilated model advance in lockstep; observations are
// extracted from the live reference at arrival steps, so memory stays O(grid).
TwinResult run_twin(const ScenarioConfig& config);

struct ReferenceRun {
  std::vector<ObservationSet> observations;  // clean samples at arrival steps
  std::vector<std::pair<long, State>> snapshots;
  State final;
};

ReferenceRun run_reference(const ScenarioConfig& config);

struct ForecastResult {
  double t1 = 0.0;
  double horizon = 0.0;
  RRMSESample at_handoff;  // error when nudging stops
  RRMSESeries series;      // forecast leg, samples at t1 + k dt
  DecayFit fit_theta, fit_u, fit_v;  // fitted on the forecast leg (rate < 0 = growth)
};

// Assimilates on [0, t1], then both runs continue freely to t1 + horizon.
// t1 and horizon must be (near-)integer multiples of dt.
ForecastResult run_forecast(const ScenarioConfig& config, double t1, double horizon);

// Named scenarios reproducing the published experiment matrix: stride and
// strength sweeps for both mechanisms and every observed-variable subset,
// the arrival-frequency quartets, the interpolant quartet, the noisy pair,
// and the shear-start families.
std::vector<ScenarioConfig> scenario_catalog();

}  // namespace benda
