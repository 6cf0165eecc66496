#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>

#include "benda/errors.hpp"

namespace benda {

// Staggered (MAC) layout on the channel [0,Lx] x [0,Ly], periodic in x,
// walls at y = 0 and y = Ly:
//
//   theta, p : cell centers      ((i+1/2)dx, (j+1/2)dy), i in [0,nx), j in [0,ny)
//   u        : vertical faces    (i dx,      (j+1/2)dy), i in [0,nx)   (face nx == face 0)
//   v        : horizontal faces  ((i+1/2)dx, j dy),      j in [0,ny]   (rows 0 and ny lie on the walls)
//
// Arrays are column-major with x as the row index, so every column is a
// contiguous x-line (the transform direction). Center and u fields carry one
// ghost column per wall; physical column j lives in storage column j+1.
// v has no ghosts: its wall rows are real unknowns pinned to zero.
//
// Ghost convention after apply_boundary_conditions:
//   theta, u : ghost = -(first interior column)   (Dirichlet 0 at the wall by reflection)
//   p        : ghost =  (first interior column)   (homogeneous Neumann)
//   v        : wall columns exactly 0

struct GridSpec {
  int nx = 200;
  int ny = 100;
  double Lx = 2.0;
  double Ly = 1.0;

  double dx() const { return Lx / nx; }
  double dy() const { return Ly / ny; }

  // sample coordinates
  double xc(int i) const { return (i + 0.5) * dx(); }  // cell center / v
  double yc(int j) const { return (j + 0.5) * dy(); }  // cell center / u
  double xf(int i) const { return i * dx(); }          // u face
  double yf(int j) const { return j * dy(); }          // v face

  void validate() const {
    if (nx < 4 || ny < 4)
      throw ConfigError("grid: nx and ny must be at least 4 (got " +
                        std::to_string(nx) + "x" + std::to_string(ny) + ")");
    if (!(Lx > 0.0) || !(Ly > 0.0))
      throw ConfigError("grid: Lx and Ly must be positive");
  }
};

namespace detail {

// Field with one ghost column beyond each wall. Tag only distinguishes the
// lattice (centers vs u faces); storage and indexing are identical.
template <class Tag>
struct YGhostedField {
  Eigen::ArrayXXd a;  // nx x (ny + 2)

  static YGhostedField zeros(const GridSpec& g) {
    return {Eigen::ArrayXXd::Zero(g.nx, g.ny + 2)};
  }

  Eigen::Index nx() const { return a.rows(); }
  Eigen::Index ny() const { return a.cols() - 2; }

  // physical j in [-1, ny]; -1 and ny are the ghosts
  double& at(Eigen::Index i, Eigen::Index j) { return a(i, j + 1); }
  double at(Eigen::Index i, Eigen::Index j) const { return a(i, j + 1); }

  auto interior() { return a.middleCols(1, ny()); }
  auto interior() const { return a.middleCols(1, ny()); }
};

}  // namespace detail

using CenterField = detail::YGhostedField<struct CenterTag>;
using UFaceField = detail::YGhostedField<struct UFaceTag>;

struct VFaceField {
  Eigen::ArrayXXd a;  // nx x (ny + 1); columns 0 and ny are the wall faces

  static VFaceField zeros(const GridSpec& g) {
    return {Eigen::ArrayXXd::Zero(g.nx, g.ny + 1)};
  }

  Eigen::Index nx() const { return a.rows(); }
  Eigen::Index ny() const { return a.cols() - 1; }

  double& at(Eigen::Index i, Eigen::Index j) { return a(i, j); }
  double at(Eigen::Index i, Eigen::Index j) const { return a(i, j); }

  // faces strictly between the walls
  auto interior() { return a.middleCols(1, ny() - 1); }
  auto interior() const { return a.middleCols(1, ny() - 1); }
};

struct State {
  UFaceField u;
  VFaceField v;
  CenterField theta;
  CenterField p;
  double t = 0.0;

  static State zeros(const GridSpec& g) {
    return {UFaceField::zeros(g), VFaceField::zeros(g), CenterField::zeros(g),
            CenterField::zeros(g), 0.0};
  }
};

// wrap an x index shifted by at most +-nx
inline Eigen::Index xwrap(Eigen::Index i, Eigen::Index nx) {
  if (i >= nx) return i - nx;
  if (i < 0) return i + nx;
  return i;
}

// Fills ghosts (reflection for theta and u, copy for p) and pins the v wall
// columns to zero. Idempotent. Throws ConfigError on a shape mismatch.
void apply_boundary_conditions(State& state, const GridSpec& grid);

// (u_{i+1,j} - u_{i,j})/dx + (v_{i,j+1} - v_{i,j})/dy at cell centers.
// Reads only interior u and native v; output ghosts are zero.
CenterField divergence(const UFaceField& u, const VFaceField& v, const GridSpec& grid);

// Staggered gradient of a center field: x-component on u faces (periodic
// wrap), y-component on v faces with wall rows zero (no flux through walls).
std::pair<UFaceField, VFaceField> gradient(const CenterField& p, const GridSpec& grid);

// Two-point averages of face velocities onto cell centers.
std::pair<CenterField, CenterField> to_cell_centers(const UFaceField& u, const VFaceField& v);

// 5-point Laplacian equal to divergence(gradient(p)) composed exactly:
// periodic in x, homogeneous Neumann in y. Reads only interior p.
CenterField apply_poisson_operator(const CenterField& p, const GridSpec& grid);

// One CSV row per y index (bottom row first), x varying along the row,
// 17 significant digits. `xy` is an (nx, n_y) block, x as the row index.
void write_field_csv(const std::string& path, const Eigen::Ref<const Eigen::ArrayXXd>& xy);

}  // namespace benda
