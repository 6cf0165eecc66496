#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "benda/assimilation.hpp"
#include "benda/errors.hpp"

using namespace benda;

namespace {

GridSpec make_grid(int nx, int ny) {
  GridSpec g;
  g.nx = nx;
  g.ny = ny;
  g.validate();
  return g;
}

State random_state(const GridSpec& grid, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  State s = State::zeros(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      s.theta.at(i, j) = dist(rng);
      s.u.at(i, j) = dist(rng);
    }
  for (int j = 1; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) s.v.at(i, j) = dist(rng);
  apply_boundary_conditions(s, grid);
  return s;
}

Eigen::ArrayXXd random_block(int nx, int m, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::ArrayXXd a(nx, m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < nx; ++i) a(i, j) = dist(rng);
  return a;
}

const InterpolantKind kAllKinds[] = {InterpolantKind::PiecewiseConstant,
                                     InterpolantKind::Nearest, InterpolantKind::Linear,
                                     InterpolantKind::Cubic, InterpolantKind::Spline};

}  // namespace

TEST_CASE("extraction subsamples native locations exactly") {
  GridSpec grid = make_grid(16, 8);
  State s = random_state(grid, 3);
  ObservationPolicy policy;
  policy.stride = 4;
  policy.validate(grid);

  ObservationSet obs = extract_observations(s, policy, grid, 12);
  CHECK(obs.step == 12);
  CHECK(obs.stride == 4);
  REQUIRE(obs.has_temperature);
  REQUIRE(obs.has_velocity);
  REQUIRE(obs.theta.rows() == 4);
  REQUIRE(obs.theta.cols() == 2);
  REQUIRE(obs.u.rows() == 4);
  REQUIRE(obs.u.cols() == 2);
  REQUIRE(obs.v.rows() == 4);
  REQUIRE(obs.v.cols() == 3);  // both wall rows are coarse nodes

  for (int b = 0; b < 2; ++b)
    for (int a = 0; a < 4; ++a) {
      CHECK(obs.theta(a, b) == s.theta.at(4 * a, 4 * b));
      CHECK(obs.u(a, b) == s.u.at(4 * a, 4 * b));
    }
  for (int b = 0; b < 3; ++b)
    for (int a = 0; a < 4; ++a) CHECK(obs.v(a, b) == s.v.at(4 * a, 4 * b));
}

TEST_CASE("stride one is a full copy") {
  GridSpec grid = make_grid(12, 6);
  State s = random_state(grid, 5);
  ObservationPolicy policy;
  policy.stride = 1;
  ObservationSet obs = extract_observations(s, policy, grid);
  CHECK((obs.theta - s.theta.interior()).abs().maxCoeff() == 0.0);
  CHECK((obs.u - s.u.interior()).abs().maxCoeff() == 0.0);
  CHECK((obs.v - s.v.a).abs().maxCoeff() == 0.0);
}

TEST_CASE("variable subsets and policy validation") {
  GridSpec grid = make_grid(16, 8);
  State s = random_state(grid, 7);

  ObservationPolicy policy;
  policy.stride = 2;
  policy.observe_velocity = false;
  ObservationSet obs = extract_observations(s, policy, grid);
  CHECK(obs.has_temperature);
  CHECK(!obs.has_velocity);

  policy.stride = 7;
  CHECK_THROWS_WITH_AS(policy.validate(grid),
                       doctest::Contains("stride"), ConfigError);

  ObservationPolicy empty;
  empty.observe_temperature = false;
  empty.observe_velocity = false;
  CHECK_THROWS_AS(empty.validate(grid), ConfigError);
}

TEST_CASE("noise: disabled epsilon is the identity") {
  GridSpec grid = make_grid(16, 8);
  State s = random_state(grid, 9);
  ObservationPolicy policy;
  policy.stride = 4;
  ObservationSet obs = extract_observations(s, policy, grid, 3);

  NoiseModel off;
  off.epsilon = 0.0;
  off.seed = 1234;
  ObservationSet same = perturb_observations(obs, off);
  CHECK((same.theta - obs.theta).abs().maxCoeff() == 0.0);
  CHECK((same.u - obs.u).abs().maxCoeff() == 0.0);
  CHECK((same.v - obs.v).abs().maxCoeff() == 0.0);
}

TEST_CASE("noise: bounded ratios, determinism, per-sensor gains") {
  GridSpec grid = make_grid(16, 8);
  State s = random_state(grid, 11);
  ObservationPolicy policy;
  policy.stride = 2;
  ObservationSet obs = extract_observations(s, policy, grid, 42);

  NoiseModel noise;
  noise.epsilon = 0.05;
  noise.seed = 99;

  ObservationSet a = perturb_observations(obs, noise);
  ObservationSet b = perturb_observations(obs, noise);
  CHECK((a.theta - b.theta).abs().maxCoeff() == 0.0);  // same seed, same step
  CHECK((a.v - b.v).abs().maxCoeff() == 0.0);

  auto ratios_ok = [](const Eigen::ArrayXXd& out, const Eigen::ArrayXXd& in) {
    for (int j = 0; j < in.cols(); ++j)
      for (int i = 0; i < in.rows(); ++i) {
        if (in(i, j) == 0.0) {
          if (out(i, j) != 0.0) return false;
          continue;
        }
        const double r = out(i, j) / in(i, j);
        if (r < 0.95 || r > 1.05) return false;
      }
    return true;
  };
  CHECK(ratios_ok(a.theta, obs.theta));
  CHECK(ratios_ok(a.u, obs.u));
  CHECK(ratios_ok(a.v, obs.v));
  CHECK((a.theta - obs.theta).abs().maxCoeff() > 0.0);  // noise actually applied

  // A sensor's gain error is a property of the sensor, not of the reading:
  // re-measuring at a later step applies identical multipliers.
  ObservationSet other_step = obs;
  other_step.step = 43;
  ObservationSet c = perturb_observations(other_step, noise);
  CHECK((c.theta - a.theta).abs().maxCoeff() == 0.0);
  CHECK((c.u - a.u).abs().maxCoeff() == 0.0);
  CHECK((c.v - a.v).abs().maxCoeff() == 0.0);

  NoiseModel other_seed = noise;
  other_seed.seed = 100;
  ObservationSet d = perturb_observations(obs, other_seed);
  CHECK((d.theta - a.theta).abs().maxCoeff() > 0.0);

  NoiseModel bad;
  bad.epsilon = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("noise: multiplier sample mean matches the uniform law") {
  const int n = 100000;
  ObservationSet obs;
  obs.step = 5;
  obs.stride = 1;
  obs.has_temperature = true;
  obs.theta = Eigen::ArrayXXd::Ones(500, 200);
  obs.u.resize(0, 0);
  obs.v.resize(0, 0);

  NoiseModel noise;
  noise.epsilon = 0.05;
  noise.seed = 2024;
  ObservationSet out = perturb_observations(obs, noise);

  const double mean = out.theta.mean();
  const double bound = 3.0 * noise.epsilon / std::sqrt(3.0 * n);
  CHECK(std::abs(mean - 1.0) <= bound);
}

TEST_CASE("interpolation reproduces constants bitwise for every kind") {
  for (InterpolantKind kind : kAllKinds) {
    Eigen::ArrayXXd coarse = Eigen::ArrayXXd::Constant(5, 4, 0.8125);
    Eigen::ArrayXXd fine = interpolate_lattice(coarse, 4, kind, 20, 16);
    REQUIRE(fine.rows() == 20);
    REQUIRE(fine.cols() == 16);
    CHECK((fine == 0.8125).all());
  }
}

TEST_CASE("interpolation reproduces the samples at the nodes bitwise") {
  SUBCASE("open lattice (centers and u faces)") {
    Eigen::ArrayXXd coarse = random_block(6, 5, 13);
    for (InterpolantKind kind : kAllKinds) {
      Eigen::ArrayXXd fine = interpolate_lattice(coarse, 3, kind, 18, 15);
      for (int b = 0; b < 5; ++b)
        for (int a = 0; a < 6; ++a) CHECK(fine(3 * a, 3 * b) == coarse(a, b));
    }
  }
  SUBCASE("wall-inclusive lattice (v faces)") {
    Eigen::ArrayXXd coarse = random_block(6, 6, 14);
    for (InterpolantKind kind : kAllKinds) {
      Eigen::ArrayXXd fine = interpolate_lattice(coarse, 3, kind, 18, 16);
      for (int b = 0; b < 6; ++b)
        for (int a = 0; a < 6; ++a) CHECK(fine(3 * a, 3 * b) == coarse(a, b));
    }
  }
}

TEST_CASE("piecewise-constant tiles and nearest tie-breaks") {
  // one coarse x-line is enough to pin the index arithmetic
  Eigen::ArrayXXd coarse(4, 1);
  coarse << 10.0, 20.0, 30.0, 40.0;

  SUBCASE("even stride: tile boundary goes to the upper sample") {
    Eigen::ArrayXXd pc = interpolate_lattice(coarse, 4, InterpolantKind::PiecewiseConstant,
                                             16, 4);
    // tile of sample k covers fine q with |q - 4k| <= 2, boundary up
    CHECK(pc(1, 0) == 10.0);
    CHECK(pc(2, 0) == 20.0);  // distance 2 from both: upper wins
    CHECK(pc(5, 0) == 20.0);
    CHECK(pc(6, 0) == 30.0);
    CHECK(pc(13, 0) == 40.0);
    CHECK(pc(14, 0) == 10.0);  // equidistant to node 12 and wrapped node 16: up
    CHECK(pc(15, 0) == 10.0);

    Eigen::ArrayXXd nn = interpolate_lattice(coarse, 4, InterpolantKind::Nearest, 16, 4);
    CHECK(nn(2, 0) == 10.0);  // same distance: nearest keeps the lower sample
    CHECK(nn(6, 0) == 20.0);
    CHECK(nn(14, 0) == 40.0);
    CHECK(nn(15, 0) == 10.0);
    CHECK((pc != nn).any());
  }

  SUBCASE("odd stride: both rules agree") {
    Eigen::ArrayXXd pc = interpolate_lattice(coarse, 5, InterpolantKind::PiecewiseConstant,
                                             20, 5);
    Eigen::ArrayXXd nn = interpolate_lattice(coarse, 5, InterpolantKind::Nearest, 20, 5);
    CHECK((pc == nn).all());
    CHECK(pc(2, 0) == 10.0);
    CHECK(pc(3, 0) == 20.0);
    CHECK(pc(17, 0) == 40.0);
    CHECK(pc(18, 0) == 10.0);
  }
}

TEST_CASE("linear interpolation reproduces affine index functions") {
  const int stride = 4, ncx = 5, ncy = 4;
  const int fine_nx = stride * ncx, fine_ny = stride * ncy;
  Eigen::ArrayXXd coarse(ncx, ncy);
  auto f = [](double qx, double qy) { return 0.75 - 0.125 * qx + 0.5 * qy; };
  for (int b = 0; b < ncy; ++b)
    for (int a = 0; a < ncx; ++a) coarse(a, b) = f(stride * a, stride * b);

  Eigen::ArrayXXd fine =
      interpolate_lattice(coarse, stride, InterpolantKind::Linear, fine_nx, fine_ny);
  // skip the x wrap segment, where an affine (non-periodic) function cannot
  // be reproduced; every y row is exact because extrapolation is linear too
  for (int q = 0; q < fine_ny; ++q)
    for (int p = 0; p <= (ncx - 1) * stride; ++p)
      CHECK(std::abs(fine(p, q) - f(p, q)) <= 1e-12);
}

TEST_CASE("cubic interpolation reproduces quadratics away from the ends") {
  const int stride = 3, ncx = 7, ncy = 6;
  const int fine_nx = stride * ncx, fine_ny = stride * ncy;
  auto qx = [](double p) { return 2.0 + 0.3 * p - 0.01 * p * p; };
  auto qy = [](double q) { return -1.0 + 0.2 * q + 0.05 * q * q; };
  Eigen::ArrayXXd coarse(ncx, ncy);
  for (int b = 0; b < ncy; ++b)
    for (int a = 0; a < ncx; ++a) coarse(a, b) = qx(stride * a) * qy(stride * b);

  Eigen::ArrayXXd fine =
      interpolate_lattice(coarse, stride, InterpolantKind::Cubic, fine_nx, fine_ny);
  // interior boxes only: the centered slopes are exact for quadratics, the
  // one-sided end slopes and the x wrap are not
  for (int q = stride; q <= (ncy - 2) * stride; ++q)
    for (int p = stride; p <= (ncx - 2) * stride; ++p)
      CHECK(std::abs(fine(p, q) - qx(p) * qy(q)) <= 1e-11);
}

TEST_CASE("spline interpolation: linear data in y, accuracy on smooth data") {
  const int stride = 4, ncy = 5;
  SUBCASE("linear-in-y data is reproduced everywhere") {
    Eigen::ArrayXXd coarse(4, ncy);
    for (int b = 0; b < ncy; ++b)
      for (int a = 0; a < 4; ++a) coarse(a, b) = 1.0 + 0.25 * (stride * b);
    Eigen::ArrayXXd fine =
        interpolate_lattice(coarse, stride, InterpolantKind::Spline, 16, stride * ncy);
    for (int q = 0; q < stride * ncy; ++q)
      for (int p = 0; p < 16; ++p) CHECK(std::abs(fine(p, q) - (1.0 + 0.25 * q)) <= 1e-12);
  }

  SUBCASE("beats linear interpolation on a smooth periodic profile") {
    const double pi = std::numbers::pi;
    const int ncx = 8, s = 8, fine_nx = 64, fine_ny = 32;
    // constant in y so both kinds are exact there; the contest is in x
    Eigen::ArrayXXd coarse(ncx, 4);
    for (int b = 0; b < 4; ++b)
      for (int a = 0; a < ncx; ++a) coarse(a, b) = std::sin(2.0 * pi * (s * a) / fine_nx);
    auto err = [&](InterpolantKind kind) {
      Eigen::ArrayXXd fine = interpolate_lattice(coarse, s, kind, fine_nx, fine_ny);
      double worst = 0.0;
      for (int q = 0; q < fine_ny; ++q)
        for (int p = 0; p < fine_nx; ++p)
          worst = std::max(worst, std::abs(fine(p, q) - std::sin(2.0 * pi * p / fine_nx)));
      return worst;
    };
    CHECK(err(InterpolantKind::Spline) < 0.2 * err(InterpolantKind::Linear));
  }
}

TEST_CASE("interpolation is linear in the samples") {
  Eigen::ArrayXXd f = random_block(5, 4, 31);
  Eigen::ArrayXXd g = random_block(5, 4, 32);
  const double a = 1.75, b = -0.5;
  for (InterpolantKind kind : kAllKinds) {
    Eigen::ArrayXXd mix = interpolate_lattice(a * f + b * g, 4, kind, 20, 16);
    Eigen::ArrayXXd split = a * interpolate_lattice(f, 4, kind, 20, 16) +
                            b * interpolate_lattice(g, 4, kind, 20, 16);
    CHECK((mix - split).abs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("interpolation geometry and minimum node counts are enforced") {
  Eigen::ArrayXXd coarse = random_block(3, 3, 41);
  // 3 nodes per direction cannot support the four-point kinds
  CHECK_THROWS_AS(interpolate_lattice(coarse, 2, InterpolantKind::Cubic, 6, 6), ConfigError);
  CHECK_THROWS_AS(interpolate_lattice(coarse, 2, InterpolantKind::Spline, 6, 6), ConfigError);
  CHECK_NOTHROW(interpolate_lattice(coarse, 2, InterpolantKind::Linear, 6, 6));
  // x extent mismatch
  CHECK_THROWS_AS(interpolate_lattice(coarse, 2, InterpolantKind::Linear, 8, 6), ConfigError);
  // y extent matching neither lattice geometry
  CHECK_THROWS_AS(interpolate_lattice(coarse, 2, InterpolantKind::Linear, 6, 9), ConfigError);
}

TEST_CASE("typed interpolation wrappers produce native layouts") {
  GridSpec grid = make_grid(12, 6);
  const int s = 3;
  Eigen::ArrayXXd tc = random_block(4, 2, 51);
  Eigen::ArrayXXd vc = random_block(4, 3, 52);  // wall rows included

  CenterField th = interpolate_center(tc, s, InterpolantKind::Linear, grid);
  CHECK(th.interior().rows() == 12);
  CHECK(th.interior().cols() == 6);

  VFaceField v = interpolate_v(vc, s, InterpolantKind::Linear, grid);
  CHECK(v.a.rows() == 12);
  CHECK(v.a.cols() == 7);
  for (int a = 0; a < 4; ++a) {
    CHECK(v.at(3 * a, 0) == vc(a, 0));
    CHECK(v.at(3 * a, 6) == vc(a, 2));
  }
}

TEST_CASE("cda tendency vanishes on perfect observations for every kind") {
  GridSpec grid = make_grid(16, 8);
  State s = random_state(grid, 61);
  ObservationPolicy policy;
  policy.stride = 2;  // leaves 4 y nodes, enough for the four-point kinds
  ObservationSet obs = extract_observations(s, policy, grid);

  NudgeSpec spec;
  spec.mechanism = Mechanism::CDA;
  spec.mu_theta = 0.7;
  spec.mu_u = 0.9;
  for (InterpolantKind kind : kAllKinds) {
    spec.interpolant = kind;
    Tendency t = cda_tendency(s, obs, spec, grid);
    CHECK(t.u.abs().maxCoeff() == 0.0);
    CHECK(t.v.abs().maxCoeff() == 0.0);
    CHECK(t.theta.abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("cda tendency hand case: constant offset spreads everywhere") {
  GridSpec grid = make_grid(8, 4);
  State model = State::zeros(grid);

  ObservationSet obs;
  obs.stride = 2;
  obs.has_temperature = true;
  obs.has_velocity = true;
  obs.theta = Eigen::ArrayXXd::Ones(4, 2);
  obs.u = Eigen::ArrayXXd::Ones(4, 2);
  obs.v = Eigen::ArrayXXd::Ones(4, 3);

  NudgeSpec spec;
  spec.mechanism = Mechanism::CDA;
  spec.interpolant = InterpolantKind::PiecewiseConstant;
  spec.mu_theta = 0.5;
  spec.mu_u = 0.5;

  Tendency t = cda_tendency(model, obs, spec, grid);
  CHECK((t.theta == 0.5).all());
  CHECK((t.u == 0.5).all());
  CHECK((t.v == 0.5).all());

  SUBCASE("zero strengths disable the mechanism") {
    spec.mu_theta = 0.0;
    spec.mu_u = 0.0;
    Tendency off = cda_tendency(model, obs, spec, grid);
    CHECK(off.theta.abs().maxCoeff() == 0.0);
    CHECK(off.u.abs().maxCoeff() == 0.0);
    CHECK(off.v.abs().maxCoeff() == 0.0);
  }

  SUBCASE("unobserved velocity contributes nothing") {
    obs.has_velocity = false;
    Tendency t2 = cda_tendency(model, obs, spec, grid);
    CHECK((t2.theta == 0.5).all());
    CHECK(t2.u.abs().maxCoeff() == 0.0);
    CHECK(t2.v.abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("na tendency acts exactly on the observed index set") {
  GridSpec grid = make_grid(8, 4);
  State model = State::zeros(grid);

  ObservationSet obs;
  obs.stride = 2;
  obs.has_temperature = true;
  obs.has_velocity = false;
  obs.theta = Eigen::ArrayXXd::Ones(4, 2);

  NudgeSpec spec;
  spec.mechanism = Mechanism::NA;
  spec.alpha_theta = 1.5;
  spec.alpha_u = 1.5;

  Tendency t = na_tendency(model, obs, spec, grid);
  int nonzero = 0;
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 8; ++i) {
      if (i % 2 == 0 && j % 2 == 0) {
        CHECK(t.theta(i, j) == 1.5);
        ++nonzero;
      } else {
        CHECK(t.theta(i, j) == 0.0);
      }
    }
  CHECK(nonzero == 8);
  CHECK(t.u.abs().maxCoeff() == 0.0);
  CHECK(t.v.abs().maxCoeff() == 0.0);

  SUBCASE("matching observations produce no forcing") {
    GridSpec g2 = make_grid(16, 8);
    State s = random_state(g2, 71);
    ObservationPolicy policy;
    policy.stride = 2;
    ObservationSet perfect = extract_observations(s, policy, g2);
    Tendency zero = na_tendency(s, perfect, spec, g2);
    CHECK(zero.theta.abs().maxCoeff() == 0.0);
    CHECK(zero.u.abs().maxCoeff() == 0.0);
    CHECK(zero.v.abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("presets carry the published strength pairs") {
  CHECK(preset_mu(Preset::Small) == 0.1);
  CHECK(preset_alpha(Preset::Small) == 1.5);
  CHECK(preset_mu(Preset::Medium) == 0.5);
  CHECK(preset_alpha(Preset::Medium) == 2.5);
  CHECK(preset_mu(Preset::Large) == 1.0);
  CHECK(preset_alpha(Preset::Large) == 3.5);

  NudgeSpec spec;
  apply_preset(spec, Preset::Medium);
  CHECK(spec.mu_theta == 0.5);
  CHECK(spec.mu_u == 0.5);
  CHECK(spec.alpha_theta == 2.5);
  CHECK(spec.alpha_u == 2.5);
}

TEST_CASE("nudge provider: arrival, hold, and drop semantics") {
  GridSpec grid = make_grid(8, 4);
  State model = State::zeros(grid);
  State truth = random_state(grid, 81);

  ObservationPolicy policy;
  policy.stride = 2;
  policy.time_every = 10;

  NudgeSpec spec;
  spec.mechanism = Mechanism::CDA;
  spec.interpolant = InterpolantKind::PiecewiseConstant;
  spec.mu_theta = 1.0;
  spec.mu_u = 1.0;

  ObservationStream stream = [&](long step) -> std::optional<ObservationSet> {
    return extract_observations(truth, policy, grid, step);
  };

  SUBCASE("only-at-arrival nudges on every tenth step") {
    policy.hold = HoldMode::OnlyAtArrival;
    NudgeProvider provider(grid, policy, spec, NoiseModel{}, stream);
    for (long step = 0; step < 25; ++step) {
      Tendency t = provider(step, model);
      const double mag = t.theta.abs().maxCoeff();
      if (step % 10 == 0)
        CHECK(mag > 0.0);
      else
        CHECK(mag == 0.0);
    }
  }

  SUBCASE("arrival impulse carries the whole inter-arrival forcing") {
    policy.hold = HoldMode::HoldLast;
    NudgeProvider hold(grid, policy, spec, NoiseModel{}, stream);
    Tendency per_step = hold(0, model);

    policy.hold = HoldMode::OnlyAtArrival;
    NudgeProvider impulse(grid, policy, spec, NoiseModel{}, stream);
    Tendency at_arrival = impulse(0, model);

    const double k = static_cast<double>(policy.time_every);
    CHECK((at_arrival.theta - k * per_step.theta).abs().maxCoeff() == 0.0);
    CHECK((at_arrival.u - k * per_step.u).abs().maxCoeff() == 0.0);
    CHECK((at_arrival.v - k * per_step.v).abs().maxCoeff() == 0.0);
  }

  SUBCASE("hold-last keeps nudging between arrivals") {
    policy.hold = HoldMode::HoldLast;
    NudgeProvider provider(grid, policy, spec, NoiseModel{}, stream);
    Tendency at0 = provider(0, model);
    Tendency at7 = provider(7, model);
    CHECK(at0.theta.abs().maxCoeff() > 0.0);
    CHECK((at7.theta - at0.theta).abs().maxCoeff() == 0.0);  // same held data
  }

  SUBCASE("silent stream means zero tendency") {
    policy.hold = HoldMode::HoldLast;
    ObservationStream quiet = [&](long step) -> std::optional<ObservationSet> {
      if (step < 20) return std::nullopt;
      return extract_observations(truth, policy, grid, step);
    };
    NudgeProvider provider(grid, policy, spec, NoiseModel{}, quiet);
    for (long step = 0; step < 20; ++step) {
      Tendency t = provider(step, model);
      CHECK(t.theta.abs().maxCoeff() == 0.0);
    }
    Tendency t20 = provider(20, model);
    CHECK(t20.theta.abs().maxCoeff() > 0.0);
  }

  SUBCASE("noise perturbs arrivals deterministically") {
    policy.hold = HoldMode::HoldLast;
    NoiseModel noise;
    noise.epsilon = 0.05;
    noise.seed = 7;
    NudgeProvider p1(grid, policy, spec, noise, stream);
    NudgeProvider p2(grid, policy, spec, noise, stream);
    Tendency a = p1(0, model);
    Tendency b = p2(0, model);
    CHECK((a.theta - b.theta).abs().maxCoeff() == 0.0);

    NudgeProvider clean(grid, policy, spec, NoiseModel{}, stream);
    Tendency c = clean(0, model);
    CHECK((a.theta - c.theta).abs().maxCoeff() > 0.0);
  }
}
