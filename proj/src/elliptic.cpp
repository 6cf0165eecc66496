#include "benda/elliptic.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace benda {

namespace {

using cplx = std::complex<double>;

double lambda_x(int k, int nx, double dx) {
  return (2.0 / (dx * dx)) * (1.0 - std::cos(2.0 * std::numbers::pi * k / nx));
}

Eigen::FFT<double> make_fft() {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);  // nx/2+1 bins, conjugate half implied
  return fft;
}

// Thomas elimination with constant sub/super diagonal `off`, diagonal `b`
// (consumed), complex rhs `d` in place. Rows are diagonally dominant for
// every system assembled below.
void thomas(std::vector<double>& b, double off, cplx* d, int n) {
  for (int i = 1; i < n; ++i) {
    const double w = off / b[i - 1];
    b[i] -= w * off;
    d[i] -= w * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (int i = n - 2; i >= 0; --i) d[i] = (d[i] - off * d[i + 1]) / b[i];
}

// Forward-transform m contiguous x-lines starting at src (column stride nx).
Eigen::MatrixXcd fwd_lines(Eigen::FFT<double>& fft, const double* src, int nx, int m) {
  Eigen::MatrixXcd spec(nx / 2 + 1, m);
  for (int j = 0; j < m; ++j)
    fft.fwd(spec.col(j).data(), src + static_cast<std::ptrdiff_t>(j) * nx, nx);
  return spec;
}

void inv_lines(Eigen::FFT<double>& fft, const Eigen::MatrixXcd& spec, double* dst, int nx, int m) {
  for (int j = 0; j < m; ++j)
    fft.inv(dst + static_cast<std::ptrdiff_t>(j) * nx, spec.col(j).data(), nx);
}

}  // namespace

CenterField solve_pressure_poisson(const CenterField& rhs, const GridSpec& grid) {
  grid.validate();
  const int nx = grid.nx, ny = grid.ny, nk = nx / 2 + 1;
  if (rhs.a.rows() != nx || rhs.a.cols() != ny + 2)
    throw ConfigError("poisson: rhs shape does not match grid");

  const double amax = rhs.interior().abs().maxCoeff();
  const double mean = rhs.interior().mean();
  if (std::abs(mean) > 1e-8 * amax)
    throw CompatibilityError("poisson: rhs mean " + std::to_string(mean) +
                             " exceeds compatibility bound for a Neumann problem");

  auto fft = make_fft();
  Eigen::ArrayXXd centered = rhs.interior() - mean;
  Eigen::MatrixXcd spec = fwd_lines(fft, centered.data(), nx, ny);

  const double iy = 1.0 / (grid.dy() * grid.dy());
  std::vector<double> diag(ny);
  std::vector<cplx> d(ny);
  for (int k = 0; k < nk; ++k) {
    const double lx = lambda_x(k, nx, grid.dx());
    for (int j = 0; j < ny; ++j) {
      diag[j] = -2.0 * iy - lx;
      d[j] = spec(k, j);
    }
    diag[0] += iy;  // Neumann ends: wall flux drops out
    diag[ny - 1] += iy;
    if (k == 0) {
      // Mean mode: the Neumann block is singular with a constant nullspace,
      // and the centered rhs sums to zero across it. Pin the first unknown.
      diag[0] = 1.0;
      d[0] = 0.0;
      for (int i = 1; i < ny; ++i) {
        const double w = iy / diag[i - 1];
        diag[i] -= w * (i == 1 ? 0.0 : iy);
        d[i] -= w * d[i - 1];
      }
      d[ny - 1] /= diag[ny - 1];
      for (int i = ny - 2; i >= 1; --i) d[i] = (d[i] - iy * d[i + 1]) / diag[i];
      // d[0] already 0
    } else {
      thomas(diag, iy, d.data(), ny);
    }
    for (int j = 0; j < ny; ++j) spec(k, j) = d[j];
  }

  CenterField out = CenterField::zeros(grid);
  Eigen::ArrayXXd phys(nx, ny);
  inv_lines(fft, spec, phys.data(), nx, ny);
  out.interior() = phys - phys.mean();  // gauge: mean-zero pressure
  return out;
}

namespace {

// Shared body for the lattices with ghost reflection at the walls
// (cell centers and u faces): end rows of -Lap_y are (3, -1)/dy^2.
template <class Field>
Field helmholtz_reflected(const Field& rhs, double gamma, const GridSpec& grid) {
  if (gamma < 0.0) throw ConfigError("helmholtz: gamma must be non-negative");
  if (gamma == 0.0) return rhs;
  grid.validate();
  const int nx = grid.nx, ny = grid.ny, nk = nx / 2 + 1;
  if (rhs.a.rows() != nx || rhs.a.cols() != ny + 2)
    throw ConfigError("helmholtz: rhs shape does not match grid");

  auto fft = make_fft();
  Eigen::MatrixXcd spec = fwd_lines(fft, rhs.a.data() + nx, nx, ny);

  const double g_iy = gamma / (grid.dy() * grid.dy());
  std::vector<double> diag(ny);
  std::vector<cplx> d(ny);
  for (int k = 0; k < nk; ++k) {
    const double base = 1.0 + gamma * lambda_x(k, nx, grid.dx());
    for (int j = 0; j < ny; ++j) {
      diag[j] = base + 2.0 * g_iy;
      d[j] = spec(k, j);
    }
    diag[0] += g_iy;  // reflection ghost folds into the diagonal
    diag[ny - 1] += g_iy;
    thomas(diag, -g_iy, d.data(), ny);
    for (int j = 0; j < ny; ++j) spec(k, j) = d[j];
  }

  Field out = Field::zeros(grid);
  inv_lines(fft, spec, out.a.data() + nx, nx, ny);
  return out;
}

}  // namespace

CenterField solve_helmholtz(const CenterField& rhs, double gamma, const GridSpec& grid) {
  return helmholtz_reflected(rhs, gamma, grid);
}

UFaceField solve_helmholtz(const UFaceField& rhs, double gamma, const GridSpec& grid) {
  return helmholtz_reflected(rhs, gamma, grid);
}

VFaceField solve_helmholtz(const VFaceField& rhs, double gamma, const GridSpec& grid) {
  if (gamma < 0.0) throw ConfigError("helmholtz: gamma must be non-negative");
  if (gamma == 0.0) return rhs;
  grid.validate();
  const int nx = grid.nx, ny = grid.ny, nk = nx / 2 + 1;
  if (rhs.a.rows() != nx || rhs.a.cols() != ny + 1)
    throw ConfigError("helmholtz: rhs shape does not match grid");

  const int m = ny - 1;  // interior faces; wall rows are pinned to zero
  auto fft = make_fft();
  Eigen::MatrixXcd spec = fwd_lines(fft, rhs.a.data() + nx, nx, m);

  const double g_iy = gamma / (grid.dy() * grid.dy());
  std::vector<double> diag(m);
  std::vector<cplx> d(m);
  for (int k = 0; k < nk; ++k) {
    const double base = 1.0 + gamma * lambda_x(k, nx, grid.dx());
    for (int j = 0; j < m; ++j) {
      diag[j] = base + 2.0 * g_iy;  // Dirichlet walls truncate the stencil
      d[j] = spec(k, j);
    }
    thomas(diag, -g_iy, d.data(), m);
    for (int j = 0; j < m; ++j) spec(k, j) = d[j];
  }

  VFaceField out = VFaceField::zeros(grid);
  inv_lines(fft, spec, out.a.data() + nx, nx, m);
  return out;
}

}  // namespace benda
