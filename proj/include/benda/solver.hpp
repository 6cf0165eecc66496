#pragma once

#include <functional>

#include "benda/elliptic.hpp"
#include "benda/grid.hpp"

namespace benda {

// Nondimensional Boussinesq channel flow:
//   du/dt + div(u u) + grad p = (Pr/sqrt(Ra)) Lap u + Pr theta e_y
//   dtheta/dt + div(u theta)  = (1/sqrt(Ra)) Lap theta + v
//   div u = 0
// with no-slip walls, theta = 0 at the walls, everything periodic in x.

struct SolverParams {
  double Ra = 1e4;
  double Pr = 0.71;
  double dt = 0.01;

  double nu() const { return Pr / std::sqrt(Ra); }     // momentum diffusivity
  double kappa() const { return 1.0 / std::sqrt(Ra); }  // thermal diffusivity
  double gamma_momentum() const { return dt * nu(); }
  double gamma_theta() const { return dt * kappa(); }

  void validate() const {
    if (!(Ra > 0.0)) throw ConfigError("solver: Ra must be positive");
    if (!(Pr > 0.0)) throw ConfigError("solver: Pr must be positive");
    if (!(dt > 0.0)) throw ConfigError("solver: dt must be positive");
  }
};

// Additive tendencies on the native lattices: u is (nx, ny), v is (nx, ny+1)
// with zero wall rows, theta is (nx, ny). Used both for the explicit
// right-hand side and for nudging terms.
struct Tendency {
  Eigen::ArrayXXd u;
  Eigen::ArrayXXd v;
  Eigen::ArrayXXd theta;

  static Tendency zeros(const GridSpec& g) {
    return {Eigen::ArrayXXd::Zero(g.nx, g.ny), Eigen::ArrayXXd::Zero(g.nx, g.ny + 1),
            Eigen::ArrayXXd::Zero(g.nx, g.ny)};
  }
};

// Previous explicit tendencies for the two-step Adams-Bashforth update.
// Empty on the first step, which falls back to forward Euler.
struct StepperMemory {
  Tendency prev;
  bool has_prev = false;
};

// Convective terms in divergence form on the staggered lattices, plus the
// buoyancy term Pr * theta averaged to v faces and the source term v
// averaged to centers. Diffusion and pressure are not included here; they
// are treated implicitly / by projection inside step(). Reads ghost values
// only where they multiply a wall v (which is zero), so results do not
// depend on the ghost convention, but ghosts must be finite.
Tendency explicit_tendency(const State& state, const SolverParams& params, const GridSpec& grid);

// One fractional step:
//   1. q* = q + dt * AB2(explicit_tendency) + dt * nudge   (Euler on the first step)
//   2. (I - gamma Lap) q** = q*   per variable (backward Euler diffusion)
//   3. solve Lap p = div(u**)/dt, correct u <- u** - dt grad p
//   4. boundary conditions, t += dt
// Throws BlowUpError (step = -1) if any field goes non-finite after a stage.
void step(State& state, const GridSpec& grid, const SolverParams& params,
          StepperMemory& memory, const Tendency& nudge);

using NudgeProviderFn = std::function<Tendency(long step_index, const State&)>;
using RecorderFn = std::function<void(long step_index, const State&)>;

// Advances `initial` by nsteps. The provider (optional) is evaluated on the
// pre-step state; the recorder (optional) sees the post-step state. Blow-ups
// are rethrown with the offending step index attached.
State simulate(State initial, const GridSpec& grid, const SolverParams& params, long nsteps,
               const NudgeProviderFn& provider = {}, const RecorderFn& recorder = {});

}  // namespace benda
