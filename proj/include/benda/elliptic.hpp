#pragma once

#include "benda/grid.hpp"

namespace benda {

// Direct solvers for the constant-coefficient elliptic problems of one time
// step. Both diagonalize in x with a real FFT (the stencils are
// shift-invariant along the periodic direction) and solve one tridiagonal
// system per x mode in y with the Thomas algorithm.
//
// x symbol of the periodic second difference, mode k in [0, nx/2]:
//   lambda_x(k) = (2/dx^2) (1 - cos(2 pi k / nx))

// Solves  div grad p = rhs  with x-periodic / y-Neumann boundary conditions,
// the exact inverse of apply_poisson_operator on mean-zero data.
// pre:  |mean(rhs)| <= 1e-8 * max|rhs|  (CompatibilityError otherwise);
//       the mean is subtracted before solving.
// post: mean(p) = 0 (the gauge), residual <= 1e-10 * max(1, max|rhs|).
CenterField solve_pressure_poisson(const CenterField& rhs, const GridSpec& grid);

// Solve  (I - gamma Lap) q = rhs  on the lattice of the argument, with the
// boundary conditions that lattice carries in a time step:
//   centers, u faces : Dirichlet 0 at the walls by ghost reflection
//                      (end rows of the y stencil are (-3, 1)/dy^2)
//   v faces          : Dirichlet 0 on the wall rows themselves
// gamma = 0 returns the input unchanged; gamma < 0 is a ConfigError.
// Returned ghosts / wall rows are zero; callers re-apply boundary conditions.
CenterField solve_helmholtz(const CenterField& rhs, double gamma, const GridSpec& grid);
UFaceField solve_helmholtz(const UFaceField& rhs, double gamma, const GridSpec& grid);
VFaceField solve_helmholtz(const VFaceField& rhs, double gamma, const GridSpec& grid);

}  // namespace benda
