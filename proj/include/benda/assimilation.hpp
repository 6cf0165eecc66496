#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "benda/grid.hpp"
#include "benda/solver.hpp"

namespace benda {

enum class InterpolantKind { PiecewiseConstant, Nearest, Linear, Cubic, Spline };
enum class Mechanism { CDA, NA };

// HoldLast keeps nudging with the latest observation between arrivals;
// OnlyAtArrival nudges solely on steps where data arrives, scaling that
// impulse by the arrival period so both modes integrate the same forcing.
enum class HoldMode { HoldLast, OnlyAtArrival };

struct ObservationPolicy {
  int stride = 20;       // every stride-th native sample per direction
  long time_every = 1;   // arrival period in steps
  bool observe_temperature = true;
  bool observe_velocity = true;
  HoldMode hold = HoldMode::HoldLast;

  void validate(const GridSpec& g) const {
    if (stride < 1) throw ConfigError("observations: stride must be >= 1");
    if (g.nx % stride != 0 || g.ny % stride != 0)
      throw ConfigError("observations: stride " + std::to_string(stride) +
                        " must divide nx = " + std::to_string(g.nx) +
                        " and ny = " + std::to_string(g.ny));
    if (time_every < 1) throw ConfigError("observations: time_every must be >= 1");
    if (!observe_temperature && !observe_velocity)
      throw ConfigError("observations: at least one variable must be observed");
  }
};

// Samples on the coarse sub-lattices. Coarse node (a, b) of theta or u sits
// at fine indices (stride*a, stride*b); for v likewise, and its b range
// includes both wall rows (so it has ny/stride + 1 of them).
struct ObservationSet {
  long step = -1;
  double t = 0.0;
  int stride = 1;
  bool has_temperature = false;
  bool has_velocity = false;
  Eigen::ArrayXXd theta;  // (nx/stride, ny/stride)
  Eigen::ArrayXXd u;      // (nx/stride, ny/stride)
  Eigen::ArrayXXd v;      // (nx/stride, ny/stride + 1)
};

struct NoiseModel {
  double epsilon = 0.0;  // multiplicative amplitude; 0 disables the path entirely
  std::uint64_t seed = 0;

  void validate() const {
    if (!(epsilon >= 0.0) || epsilon >= 1.0)
      throw ConfigError("noise: epsilon must lie in [0, 1)");
  }
};

ObservationSet extract_observations(const State& state, const ObservationPolicy& policy,
                                    const GridSpec& grid, long step = -1);

// Multiplies every observed sample by uniform[1-eps, 1+eps], drawn from the
// counter-based stream keyed by (seed, running sample index), samples
// enumerated theta, u, v, each column-major (x fastest). The gain at a slot
// does not depend on the observation time: it models a fixed relative
// measurement error per sensor. Bit-reproducible.
ObservationSet perturb_observations(ObservationSet obs, const NoiseModel& noise);

// Tensor-product interpolation from coarse samples (node c at fine index
// stride*c per direction) onto every fine index. x is periodic with period
// fine_nx; y clamps to one-sided stencils at the walls and extends the last
// polynomial piece where the fine lattice outruns the last node. All kinds
// are linear in the samples and reproduce them bitwise at the nodes.
// Cubic and Spline require at least 4 nodes per direction.
Eigen::ArrayXXd interpolate_lattice(const Eigen::ArrayXXd& coarse, int stride,
                                    InterpolantKind kind, int fine_nx, int fine_ny);

CenterField interpolate_center(const Eigen::ArrayXXd& samples, int stride, InterpolantKind kind,
                               const GridSpec& grid);
UFaceField interpolate_u(const Eigen::ArrayXXd& samples, int stride, InterpolantKind kind,
                         const GridSpec& grid);
VFaceField interpolate_v(const Eigen::ArrayXXd& samples, int stride, InterpolantKind kind,
                         const GridSpec& grid);

// Paired relaxation strengths (mu drives the interpolant mechanism, alpha the
// point mechanism): Small (0.1, 1.5), Medium (0.5, 2.5), Large (1.0, 3.5).
enum class Preset { Small, Medium, Large };

double preset_mu(Preset p);
double preset_alpha(Preset p);

struct NudgeSpec {
  Mechanism mechanism = Mechanism::CDA;
  InterpolantKind interpolant = InterpolantKind::PiecewiseConstant;
  double mu_theta = 0.0;     // CDA strengths; zero disables that variable
  double mu_u = 0.0;         // applies to both velocity components
  double alpha_theta = 0.0;  // NA strengths
  double alpha_u = 0.0;

  void validate() const {
    if (mu_theta < 0 || mu_u < 0 || alpha_theta < 0 || alpha_u < 0)
      throw ConfigError("nudging: coefficients must be non-negative");
  }
};

void apply_preset(NudgeSpec& spec, Preset p);  // sets all four strengths

// mu_q * (I_h(obs_q) - I_h(model_q sampled)) on the full fine lattice,
// computed as mu_q * I_h(obs_q - sampled model) by linearity. Variables
// without observations or with zero mu contribute nothing.
Tendency cda_tendency(const State& model, const ObservationSet& obs, const NudgeSpec& spec,
                      const GridSpec& grid);

// alpha_q * (obs_q - model_q) at the observed native points only; zero
// elsewhere. No area weighting.
Tendency na_tendency(const State& model, const ObservationSet& obs, const NudgeSpec& spec,
                     const GridSpec& grid);

// Yields observations on demand: called only on arrival steps, may return
// nullopt (no data yet).
using ObservationStream = std::function<std::optional<ObservationSet>(long step)>;

// Turns a policy + mechanism + stream into the per-step nudge tendency.
// Perturbs arrivals when noise is enabled, holds or drops between arrivals
// per the policy, and returns zero before the first arrival.
class NudgeProvider {
 public:
  NudgeProvider(GridSpec grid, ObservationPolicy policy, NudgeSpec spec, NoiseModel noise,
                ObservationStream stream);

  Tendency operator()(long step, const State& model);

 private:
  GridSpec grid_;
  ObservationPolicy policy_;
  NudgeSpec spec_;
  NoiseModel noise_;
  ObservationStream stream_;
  std::optional<ObservationSet> held_;
};

}  // namespace benda
