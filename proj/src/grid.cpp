#include "benda/grid.hpp"

#include <cstdio>
#include <fstream>

namespace benda {

namespace {

void check_shapes(const State& s, const GridSpec& g) {
  const auto nx = static_cast<Eigen::Index>(g.nx);
  const auto ny = static_cast<Eigen::Index>(g.ny);
  const bool ok = s.u.a.rows() == nx && s.u.a.cols() == ny + 2 &&
                  s.v.a.rows() == nx && s.v.a.cols() == ny + 1 &&
                  s.theta.a.rows() == nx && s.theta.a.cols() == ny + 2 &&
                  s.p.a.rows() == nx && s.p.a.cols() == ny + 2;
  if (!ok)
    throw ConfigError("state shape does not match grid " + std::to_string(g.nx) +
                      "x" + std::to_string(g.ny));
}

}  // namespace

void apply_boundary_conditions(State& state, const GridSpec& grid) {
  grid.validate();
  check_shapes(state, grid);
  const Eigen::Index ny = grid.ny;

  // Dirichlet 0 at the walls by reflection (value at the wall, midway
  // between ghost and first interior sample, vanishes).
  state.theta.a.col(0) = -state.theta.a.col(1);
  state.theta.a.col(ny + 1) = -state.theta.a.col(ny);
  state.u.a.col(0) = -state.u.a.col(1);
  state.u.a.col(ny + 1) = -state.u.a.col(ny);

  // Homogeneous Neumann for pressure.
  state.p.a.col(0) = state.p.a.col(1);
  state.p.a.col(ny + 1) = state.p.a.col(ny);

  // No penetration: v lives on the walls.
  state.v.a.col(0).setZero();
  state.v.a.col(ny).setZero();
}

CenterField divergence(const UFaceField& u, const VFaceField& v, const GridSpec& grid) {
  const Eigen::Index nx = grid.nx, ny = grid.ny;
  const double idx = 1.0 / grid.dx(), idy = 1.0 / grid.dy();
  CenterField out = CenterField::zeros(grid);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i)
      out.at(i, j) = (u.at(xwrap(i + 1, nx), j) - u.at(i, j)) * idx +
                     (v.at(i, j + 1) - v.at(i, j)) * idy;
  return out;
}

std::pair<UFaceField, VFaceField> gradient(const CenterField& p, const GridSpec& grid) {
  const Eigen::Index nx = grid.nx, ny = grid.ny;
  const double idx = 1.0 / grid.dx(), idy = 1.0 / grid.dy();
  UFaceField gx = UFaceField::zeros(grid);
  VFaceField gy = VFaceField::zeros(grid);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i)
      gx.at(i, j) = (p.at(i, j) - p.at(xwrap(i - 1, nx), j)) * idx;
  for (Eigen::Index j = 1; j < ny; ++j)  // wall rows stay zero
    for (Eigen::Index i = 0; i < nx; ++i)
      gy.at(i, j) = (p.at(i, j) - p.at(i, j - 1)) * idy;
  return {std::move(gx), std::move(gy)};
}

std::pair<CenterField, CenterField> to_cell_centers(const UFaceField& u, const VFaceField& v) {
  const Eigen::Index nx = u.nx(), ny = u.ny();
  GridSpec g;
  g.nx = static_cast<int>(nx);
  g.ny = static_cast<int>(ny);
  CenterField uc = CenterField::zeros(g);
  CenterField vc = CenterField::zeros(g);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i) {
      uc.at(i, j) = 0.5 * (u.at(i, j) + u.at(xwrap(i + 1, nx), j));
      vc.at(i, j) = 0.5 * (v.at(i, j) + v.at(i, j + 1));
    }
  return {std::move(uc), std::move(vc)};
}

CenterField apply_poisson_operator(const CenterField& p, const GridSpec& grid) {
  const Eigen::Index nx = grid.nx, ny = grid.ny;
  const double idx2 = 1.0 / (grid.dx() * grid.dx());
  const double idy2 = 1.0 / (grid.dy() * grid.dy());
  CenterField out = CenterField::zeros(grid);
  for (Eigen::Index j = 0; j < ny; ++j)
    for (Eigen::Index i = 0; i < nx; ++i) {
      double v = (p.at(xwrap(i - 1, nx), j) - 2.0 * p.at(i, j) + p.at(xwrap(i + 1, nx), j)) * idx2;
      // Neumann walls: the one-sided difference drops the wall flux
      if (j > 0) v += (p.at(i, j - 1) - p.at(i, j)) * idy2;
      if (j < ny - 1) v += (p.at(i, j + 1) - p.at(i, j)) * idy2;
      out.at(i, j) = v;
    }
  return out;
}

void write_field_csv(const std::string& path, const Eigen::Ref<const Eigen::ArrayXXd>& xy) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  char buf[40];
  for (Eigen::Index j = 0; j < xy.cols(); ++j) {
    for (Eigen::Index i = 0; i < xy.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", xy(i, j));
      if (i) f << ',';
      f << buf;
    }
    f << '\n';
  }
  if (!f) throw IoError("write failed: " + path);
}

}  // namespace benda
