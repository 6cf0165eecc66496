#include "benda/solver.hpp"

#include <string>
#include <utility>

namespace benda {

namespace {

void check_finite(const char* stage, const State& s) {
  if (s.u.a.allFinite() && s.v.a.allFinite() && s.theta.a.allFinite() && s.p.a.allFinite())
    return;
  throw BlowUpError(stage, -1, std::string("non-finite field after stage '") + stage + "'");
}

}  // namespace

Tendency explicit_tendency(const State& state, const SolverParams& params, const GridSpec& grid) {
  const Eigen::Index nx = grid.nx, ny = grid.ny;
  const double idx = 1.0 / grid.dx(), idy = 1.0 / grid.dy();
  const auto& u = state.u;
  const auto& v = state.v;
  const auto& th = state.theta;

  // Quadratic fluxes at their natural locations. Corner fluxes on the wall
  // rows vanish because v does; the ghost u values they touch are multiplied
  // away.
  Eigen::ArrayXXd uu_c(nx, ny);        // u^2 at cell centers
  Eigen::ArrayXXd vv_c(nx, ny);        // v^2 at cell centers
  Eigen::ArrayXXd uv_f(nx, ny + 1);    // u v at cell corners
  Eigen::ArrayXXd uth_f(nx, ny);       // u theta at u faces
  Eigen::ArrayXXd vth_f(nx, ny + 1);   // v theta at v faces
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i) {
      const double ubar = 0.5 * (u.at(i, j) + u.at(xwrap(i + 1, nx), j));
      const double vbar = 0.5 * (v.at(i, j) + v.at(i, j + 1));
      uu_c(i, j) = ubar * ubar;
      vv_c(i, j) = vbar * vbar;
      uth_f(i, j) = u.at(i, j) * 0.5 * (th.at(xwrap(i - 1, nx), j) + th.at(i, j));
    }
  for (Eigen::Index j = 0; j <= ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i) {
      const double ubar = 0.5 * (u.at(i, j - 1) + u.at(i, j));
      const double vbar = 0.5 * (v.at(xwrap(i - 1, nx), j) + v.at(i, j));
      uv_f(i, j) = ubar * vbar;
      vth_f(i, j) = v.at(i, j) * 0.5 * (th.at(i, j - 1) + th.at(i, j));
    }

  Tendency out = Tendency::zeros(grid);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i) {
      out.u(i, j) = -(uu_c(i, j) - uu_c(xwrap(i - 1, nx), j)) * idx -
                    (uv_f(i, j + 1) - uv_f(i, j)) * idy;
      out.theta(i, j) = -(uth_f(xwrap(i + 1, nx), j) - uth_f(i, j)) * idx -
                        (vth_f(i, j + 1) - vth_f(i, j)) * idy +
                        0.5 * (v.at(i, j) + v.at(i, j + 1));
    }
  for (Eigen::Index j = 1; j < ny; ++j)  // wall rows carry no tendency
    for (Eigen::Index i = 0; i < nx; ++i)
      out.v(i, j) = -(uv_f(xwrap(i + 1, nx), j) - uv_f(i, j)) * idx -
                    (vv_c(i, j) - vv_c(i, j - 1)) * idy +
                    params.Pr * 0.5 * (th.at(i, j - 1) + th.at(i, j));
  return out;
}

void step(State& state, const GridSpec& grid, const SolverParams& params,
          StepperMemory& memory, const Tendency& nudge) {
  params.validate();
  const double dt = params.dt;

  Tendency f = explicit_tendency(state, params, grid);
  if (memory.has_prev) {
    state.u.interior() += dt * (1.5 * f.u - 0.5 * memory.prev.u) + dt * nudge.u;
    state.v.a += dt * (1.5 * f.v - 0.5 * memory.prev.v) + dt * nudge.v;
    state.theta.interior() += dt * (1.5 * f.theta - 0.5 * memory.prev.theta) + dt * nudge.theta;
  } else {
    state.u.interior() += dt * f.u + dt * nudge.u;
    state.v.a += dt * f.v + dt * nudge.v;
    state.theta.interior() += dt * f.theta + dt * nudge.theta;
  }
  memory.prev = std::move(f);
  memory.has_prev = true;
  check_finite("explicit", state);

  state.u = solve_helmholtz(state.u, params.gamma_momentum(), grid);
  state.v = solve_helmholtz(state.v, params.gamma_momentum(), grid);
  state.theta = solve_helmholtz(state.theta, params.gamma_theta(), grid);
  check_finite("diffusion", state);

  CenterField div = divergence(state.u, state.v, grid);
  CenterField rhs = CenterField::zeros(grid);
  rhs.interior() = div.interior() / dt;
  state.p = solve_pressure_poisson(rhs, grid);
  auto [gx, gy] = gradient(state.p, grid);
  state.u.interior() -= dt * gx.interior();
  state.v.a -= dt * gy.a;  // wall rows of the gradient are zero
  check_finite("projection", state);

  apply_boundary_conditions(state, grid);
  check_finite("boundary", state);
  state.t += dt;
}

State simulate(State initial, const GridSpec& grid, const SolverParams& params, long nsteps,
               const NudgeProviderFn& provider, const RecorderFn& recorder) {
  grid.validate();
  params.validate();
  if (nsteps < 0) throw ConfigError("simulate: nsteps must be non-negative");

  State s = std::move(initial);
  apply_boundary_conditions(s, grid);
  StepperMemory memory;
  const Tendency zero = Tendency::zeros(grid);
  for (long n = 0; n < nsteps; ++n) {
    try {
      if (provider) {
        const Tendency nudge = provider(n, s);
        step(s, grid, params, memory, nudge);
      } else {
        step(s, grid, params, memory, zero);
      }
    } catch (const BlowUpError& e) {
      throw BlowUpError(e.stage, n,
                        std::string(e.what()) + " at step " + std::to_string(n) +
                        " (t = " + std::to_string(s.t) + ")");
    }
    if (recorder) recorder(n, s);
  }
  return s;
}

}  // namespace benda
