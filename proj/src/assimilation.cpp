#include "benda/assimilation.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "benda/rng.hpp"

namespace benda {

namespace {

// Real tridiagonal solve with constant off-diagonals, diag consumed.
void thomas_real(std::vector<double>& b, double off, double* d, int n) {
  for (int i = 1; i < n; ++i) {
    const double w = off / b[i - 1];
    b[i] -= w * off;
    d[i] -= w * d[i - 1];
  }
  d[n - 1] /= b[n - 1];
  for (int i = n - 2; i >= 0; --i) d[i] = (d[i] - off * d[i + 1]) / b[i];
}

// Natural cubic spline second derivatives, unit node spacing:
// M[0] = M[n-1] = 0, M[i-1] + 4 M[i] + M[i+1] = 6 (y[i-1] - 2 y[i] + y[i+1]).
void spline_m_natural(const double* y, int n, std::vector<double>& m) {
  m.assign(n, 0.0);
  const int k = n - 2;  // interior unknowns
  if (k < 1) return;
  std::vector<double> diag(k, 4.0), rhs(k);
  for (int i = 0; i < k; ++i) rhs[i] = 6.0 * (y[i] - 2.0 * y[i + 1] + y[i + 2]);
  thomas_real(diag, 1.0, rhs.data(), k);
  for (int i = 0; i < k; ++i) m[i + 1] = rhs[i];
}

// Periodic variant (cyclic system) via Sherman-Morrison; n >= 4.
void spline_m_periodic(const double* y, int n, std::vector<double>& m) {
  std::vector<double> rhs(n);
  for (int i = 0; i < n; ++i) {
    const double ym = y[(i + n - 1) % n], yp = y[(i + 1) % n];
    rhs[i] = 6.0 * (ym - 2.0 * y[i] + yp);
  }
  const double gamma = -4.0;
  std::vector<double> diag(n, 4.0);
  diag[0] -= gamma;
  diag[n - 1] -= 1.0 / gamma;  // alpha * beta / gamma with unit corners
  std::vector<double> db = diag;
  std::vector<double> z(n, 0.0);
  z[0] = gamma;
  z[n - 1] = 1.0;
  thomas_real(diag, 1.0, rhs.data(), n);
  thomas_real(db, 1.0, z.data(), n);
  const double fact = (rhs[0] + rhs[n - 1] / gamma) / (1.0 + z[0] + z[n - 1] / gamma);
  m.assign(n, 0.0);
  for (int i = 0; i < n; ++i) m[i] = rhs[i] - fact * z[i];
}

// One coarse line: n nodes at fine positions stride*c, evaluated at integer
// fine positions. Every kind returns the sample itself on a node.
struct Line {
  const double* y = nullptr;
  int n = 0;
  int s = 1;
  bool periodic = false;
  InterpolantKind kind = InterpolantKind::PiecewiseConstant;
  std::vector<double> aux;  // Cubic: node slopes; Spline: second derivatives

  void prepare() {
    if (kind == InterpolantKind::Cubic) {
      aux.resize(n);
      if (periodic) {
        for (int c = 0; c < n; ++c)
          aux[c] = 0.5 * (y[(c + 1) % n] - y[(c + n - 1) % n]);
      } else {
        aux[0] = y[1] - y[0];
        aux[n - 1] = y[n - 1] - y[n - 2];
        for (int c = 1; c < n - 1; ++c) aux[c] = 0.5 * (y[c + 1] - y[c - 1]);
      }
    } else if (kind == InterpolantKind::Spline) {
      if (periodic)
        spline_m_periodic(y, n, aux);
      else
        spline_m_natural(y, n, aux);
    }
  }

  double node(int c) const { return y[periodic ? c % n : std::min(c, n - 1)]; }

  double eval(int q) const {
    if (q % s == 0) return node(q / s);  // bitwise sample reproduction
    switch (kind) {
      case InterpolantKind::PiecewiseConstant: {
        // index tile of width s centered on each node, upper tie to the right
        int c = (q + s / 2) / s;
        return node(c);
      }
      case InterpolantKind::Nearest: {
        int c = (2 * q + s - 1) / (2 * s);  // ties resolve to the lower node
        return node(c);
      }
      default:
        break;
    }
    // polynomial kinds: left-anchored segment; y clamps so the last piece
    // extends past the final node
    int c = q / s;
    if (!periodic && c > n - 2) c = n - 2;
    const double t = static_cast<double>(q - c * s) / s;
    const double y0 = node(c), y1 = node(c + 1);
    switch (kind) {
      case InterpolantKind::Linear:
        return y0 + t * (y1 - y0);
      case InterpolantKind::Cubic: {
        const double m0 = aux[c], m1 = aux[(c + 1) % n];
        const double b2 = -3.0 * y0 + 3.0 * y1 - 2.0 * m0 - m1;
        const double b3 = 2.0 * y0 - 2.0 * y1 + m0 + m1;
        return y0 + t * (m0 + t * (b2 + t * b3));
      }
      case InterpolantKind::Spline: {
        const double M0 = aux[c], M1 = aux[(c + 1) % n];
        const double b1 = (y1 - y0) - (2.0 * M0 + M1) / 6.0;
        return y0 + t * (b1 + t * (0.5 * M0 + t * (M1 - M0) / 6.0));
      }
      default:
        return y0;  // unreachable
    }
  }
};

}  // namespace

Eigen::ArrayXXd interpolate_lattice(const Eigen::ArrayXXd& coarse, int stride,
                                    InterpolantKind kind, int fine_nx, int fine_ny) {
  const int ncx = static_cast<int>(coarse.rows());
  const int ncy = static_cast<int>(coarse.cols());
  if (stride < 1) throw ConfigError("interpolate: stride must be >= 1");
  if (ncx * stride != fine_nx)
    throw ConfigError("interpolate: coarse x extent does not match fine lattice");
  // either the open lattice (centers, u) or the wall-inclusive one (v)
  const bool ok_y = (fine_ny % stride == 0 && ncy == fine_ny / stride) ||
                    ((fine_ny - 1) % stride == 0 && ncy == (fine_ny - 1) / stride + 1);
  if (!ok_y)
    throw ConfigError("interpolate: coarse y extent does not match fine lattice");
  const bool poly = kind == InterpolantKind::Linear || kind == InterpolantKind::Cubic ||
                    kind == InterpolantKind::Spline;
  if (poly && (ncx < 2 || ncy < 2))
    throw ConfigError("interpolate: this interpolant needs at least 2 nodes per direction");
  if ((kind == InterpolantKind::Cubic || kind == InterpolantKind::Spline) &&
      (ncx < 4 || ncy < 4))
    throw ConfigError("interpolate: this interpolant needs at least 4 nodes per direction");

  // pass 1: along y for each coarse x-column
  Eigen::ArrayXXd tmp(ncx, fine_ny);
  {
    Eigen::ArrayXd col(ncy);
    Line line{nullptr, ncy, stride, false, kind, {}};
    for (int a = 0; a < ncx; ++a) {
      col = coarse.row(a).transpose();
      line.y = col.data();
      line.prepare();
      for (int q = 0; q < fine_ny; ++q) tmp(a, q) = line.eval(q);
    }
  }

  // pass 2: along x (periodic) for each fine row
  Eigen::ArrayXXd out(fine_nx, fine_ny);
  {
    Eigen::ArrayXd row(ncx);
    Line line{nullptr, ncx, stride, true, kind, {}};
    for (int q = 0; q < fine_ny; ++q) {
      row = tmp.col(q);
      line.y = row.data();
      line.prepare();
      for (int i = 0; i < fine_nx; ++i) out(i, q) = line.eval(i);
    }
  }
  return out;
}

CenterField interpolate_center(const Eigen::ArrayXXd& samples, int stride, InterpolantKind kind,
                               const GridSpec& grid) {
  CenterField out = CenterField::zeros(grid);
  out.interior() = interpolate_lattice(samples, stride, kind, grid.nx, grid.ny);
  return out;
}

UFaceField interpolate_u(const Eigen::ArrayXXd& samples, int stride, InterpolantKind kind,
                         const GridSpec& grid) {
  UFaceField out = UFaceField::zeros(grid);
  out.interior() = interpolate_lattice(samples, stride, kind, grid.nx, grid.ny);
  return out;
}

VFaceField interpolate_v(const Eigen::ArrayXXd& samples, int stride, InterpolantKind kind,
                         const GridSpec& grid) {
  VFaceField out = VFaceField::zeros(grid);
  out.a = interpolate_lattice(samples, stride, kind, grid.nx, grid.ny + 1);
  return out;
}

ObservationSet extract_observations(const State& state, const ObservationPolicy& policy,
                                    const GridSpec& grid, long step) {
  policy.validate(grid);
  const int s = policy.stride;
  const int ncx = grid.nx / s;
  const int ncy = grid.ny / s;

  ObservationSet obs;
  obs.step = step;
  obs.t = state.t;
  obs.stride = s;
  if (policy.observe_temperature) {
    obs.has_temperature = true;
    obs.theta.resize(ncx, ncy);
    for (int b = 0; b < ncy; ++b)
      for (int a = 0; a < ncx; ++a) obs.theta(a, b) = state.theta.at(a * s, b * s);
  }
  if (policy.observe_velocity) {
    obs.has_velocity = true;
    obs.u.resize(ncx, ncy);
    obs.v.resize(ncx, ncy + 1);  // both wall rows are nodes
    for (int b = 0; b < ncy; ++b)
      for (int a = 0; a < ncx; ++a) obs.u(a, b) = state.u.at(a * s, b * s);
    for (int b = 0; b <= ncy; ++b)
      for (int a = 0; a < ncx; ++a) obs.v(a, b) = state.v.at(a * s, b * s);
  }
  return obs;
}

ObservationSet perturb_observations(ObservationSet obs, const NoiseModel& noise) {
  noise.validate();
  if (noise.epsilon == 0.0) return obs;
  // Gain error is fixed per sample slot: repeated measurements from the same
  // sensor carry the same relative perturbation, independent of obs.step.
  std::uint64_t counter = 0;
  auto scale = [&](Eigen::ArrayXXd& a) {
    double* p = a.data();
    for (Eigen::Index k = 0; k < a.size(); ++k)
      p[k] *= rng::noise_factor(noise.seed, counter++, noise.epsilon);
  };
  if (obs.has_temperature) scale(obs.theta);
  if (obs.has_velocity) {
    scale(obs.u);
    scale(obs.v);
  }
  return obs;
}

double preset_mu(Preset p) {
  switch (p) {
    case Preset::Small: return 0.1;
    case Preset::Medium: return 0.5;
    case Preset::Large: return 1.0;
  }
  return 0.0;
}

double preset_alpha(Preset p) {
  switch (p) {
    case Preset::Small: return 1.5;
    case Preset::Medium: return 2.5;
    case Preset::Large: return 3.5;
  }
  return 0.0;
}

void apply_preset(NudgeSpec& spec, Preset p) {
  spec.mu_theta = spec.mu_u = preset_mu(p);
  spec.alpha_theta = spec.alpha_u = preset_alpha(p);
}

Tendency cda_tendency(const State& model, const ObservationSet& obs, const NudgeSpec& spec,
                      const GridSpec& grid) {
  spec.validate();
  const int s = obs.stride;
  Tendency out = Tendency::zeros(grid);
  if (obs.has_temperature && spec.mu_theta > 0.0) {
    Eigen::ArrayXXd diff = obs.theta;
    for (Eigen::Index b = 0; b < diff.cols(); ++b)
      for (Eigen::Index a = 0; a < diff.rows(); ++a)
        diff(a, b) -= model.theta.at(a * s, b * s);
    out.theta = spec.mu_theta *
                interpolate_lattice(diff, s, spec.interpolant, grid.nx, grid.ny);
  }
  if (obs.has_velocity && spec.mu_u > 0.0) {
    Eigen::ArrayXXd du = obs.u;
    for (Eigen::Index b = 0; b < du.cols(); ++b)
      for (Eigen::Index a = 0; a < du.rows(); ++a) du(a, b) -= model.u.at(a * s, b * s);
    out.u = spec.mu_u * interpolate_lattice(du, s, spec.interpolant, grid.nx, grid.ny);
    Eigen::ArrayXXd dv = obs.v;
    for (Eigen::Index b = 0; b < dv.cols(); ++b)
      for (Eigen::Index a = 0; a < dv.rows(); ++a) dv(a, b) -= model.v.at(a * s, b * s);
    out.v = spec.mu_u * interpolate_lattice(dv, s, spec.interpolant, grid.nx, grid.ny + 1);
  }
  return out;
}

Tendency na_tendency(const State& model, const ObservationSet& obs, const NudgeSpec& spec,
                     const GridSpec& grid) {
  spec.validate();
  const int s = obs.stride;
  Tendency out = Tendency::zeros(grid);
  if (obs.has_temperature && spec.alpha_theta > 0.0)
    for (Eigen::Index b = 0; b < obs.theta.cols(); ++b)
      for (Eigen::Index a = 0; a < obs.theta.rows(); ++a)
        out.theta(a * s, b * s) = spec.alpha_theta * (obs.theta(a, b) - model.theta.at(a * s, b * s));
  if (obs.has_velocity && spec.alpha_u > 0.0) {
    for (Eigen::Index b = 0; b < obs.u.cols(); ++b)
      for (Eigen::Index a = 0; a < obs.u.rows(); ++a)
        out.u(a * s, b * s) = spec.alpha_u * (obs.u(a, b) - model.u.at(a * s, b * s));
    for (Eigen::Index b = 0; b < obs.v.cols(); ++b)
      for (Eigen::Index a = 0; a < obs.v.rows(); ++a)
        out.v(a * s, b * s) = spec.alpha_u * (obs.v(a, b) - model.v.at(a * s, b * s));
  }
  return out;
}

NudgeProvider::NudgeProvider(GridSpec grid, ObservationPolicy policy, NudgeSpec spec,
                             NoiseModel noise, ObservationStream stream)
    : grid_(grid), policy_(policy), spec_(spec), noise_(noise), stream_(std::move(stream)) {
  policy_.validate(grid_);
  spec_.validate();
  noise_.validate();
}

Tendency NudgeProvider::operator()(long step, const State& model) {
  bool fresh = false;
  if (step % policy_.time_every == 0 && stream_) {
    if (auto o = stream_(step)) {
      held_ = noise_.epsilon > 0.0 ? perturb_observations(std::move(*o), noise_)
                                   : std::move(*o);
      fresh = true;
    }
  }
  if (!held_ || (policy_.hold == HoldMode::OnlyAtArrival && !fresh))
    return Tendency::zeros(grid_);
  Tendency out = spec_.mechanism == Mechanism::CDA ? cda_tendency(model, *held_, spec_, grid_)
                                                   : na_tendency(model, *held_, spec_, grid_);
  if (policy_.hold == HoldMode::OnlyAtArrival && policy_.time_every > 1) {
    // The arrival impulse carries the whole inter-arrival relaxation, so the
    // integrated forcing matches the hold strategy over one arrival period.
    const double gap = static_cast<double>(policy_.time_every);
    out.u *= gap;
    out.v *= gap;
    out.theta *= gap;
  }
  return out;
}

}  // namespace benda
