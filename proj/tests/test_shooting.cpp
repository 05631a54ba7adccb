#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "cstraj/shooting.hpp"
#include "test_support.hpp"

using namespace cstraj;
namespace {
constexpr double kPi = std::numbers::pi;

const ModelParams harmonic(1.0, 1.0, 1.0, 0.0);
const PropagatorLabels sym_labels({0.0, 1.0}, {0.0, 1.0}, kPi);
}  // namespace

TEST_CASE("initial conditions from a guess satisfy the initial boundary") {
  SUBCASE("unit widths") {
    ModelParams m(1.0, 1.0, 1.0, 0.0);
    PropagatorLabels lab({0.0, 1.0}, {0.0, 0.0}, 1.0);
    const ComplexPhasePoint pt =
        initial_conditions_from_guess(0.3, 0.8, lab, m);
    CHECK(pt.x1 == 0.3);
    CHECK(pt.p1 == 0.8);
    CHECK(pt.x2 == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(pt.p2 == doctest::Approx(0.2).epsilon(1e-15));
  }
  SUBCASE("real slice when guessing the labels themselves") {
    ModelParams m(1.0, 1.3, 1.0, 0.0);
    PropagatorLabels lab({0.7, -0.4}, {0.0, 0.0}, 1.0);
    const ComplexPhasePoint pt =
        initial_conditions_from_guess(0.7, -0.4, lab, m);
    CHECK(pt.x2 == 0.0);
    CHECK(pt.p2 == 0.0);
  }
  SUBCASE("widths b = 2, c = 1/2") {
    ModelParams m(1.0, 2.0, 1.0, 0.0);
    PropagatorLabels lab({1.0, 0.0}, {0.0, 0.0}, 1.0);
    const ComplexPhasePoint pt = initial_conditions_from_guess(2.0, 1.0, lab, m);
    CHECK(pt.x2 == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(pt.p2 == doctest::Approx(-4.0).epsilon(1e-15));
  }
  SUBCASE("u(0) = z' holds exactly for any guess") {
    ModelParams m(1.0, 0.8, 1.0, 0.1);
    SmoothedHamiltonian model(m);
    PropagatorLabels lab({0.4, -1.2}, {1.0, 0.5}, 2.0);
    for (double x : {-1.0, 0.4, 2.7}) {
      const ComplexPhasePoint pt = initial_conditions_from_guess(x, 0.9, lab, m);
      CHECK(std::abs(model.u_of(pt) - lab.u_initial(m)) < 1e-15);
    }
  }
}

TEST_CASE("endpoint distance") {
  SUBCASE("plain arithmetic") {
    ModelParams m(1.0, 1.0, 1.0, 0.0);
    PropagatorLabels lab({0.0, 0.0}, {0.0, 0.0}, 1.0);
    Trajectory traj;
    traj.points.push_back({1.0, {1.0, 2.0, 0.0, 0.0}});
    CHECK(endpoint_distance(traj, lab, m) ==
          doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
  }
  SUBCASE("harmonic closed-form root gives a near-zero distance") {
    const double D = distance_from_guess(0.0, 0.0, sym_labels, harmonic, {});
    CHECK(D < 1e-8);
  }
  SUBCASE("exactly satisfied final conditions give zero") {
    ModelParams m(1.0, 2.0, 1.0, 0.0);
    PropagatorLabels lab({0.0, 0.0}, {1.5, -0.5}, 1.0);
    Trajectory traj;
    // x1 + (b/c) x2 = q'' and p1 - (c/b) p2 = p'' by construction
    traj.points.push_back({1.0, {1.0, 0.0, 0.125, 2.0}});
    CHECK(endpoint_distance(traj, lab, m) == 0.0);
  }
}

TEST_CASE("gradient of D matches the analytic harmonic map") {
  // Residual (R1, R2) = sqrt(2) (Re dv, -Im dv) with
  // dv = v(0) e^{i w T} - z''* and v(0) = [(2 x1 - q') + i (p' - 2 p1)]/sqrt 2,
  // so the Jacobian is 2 [[cos T, sin T], [-sin T, cos T]].
  ShootingConfig cfg;
  const double T = 1.3;
  PropagatorLabels lab({0.0, 1.0}, {0.2, 0.7}, T);
  const double x = 0.31, p = 0.84;
  const auto grad = gradient_of_D(x, p, lab, harmonic, cfg);

  const Complex v0 = Complex(2.0 * x - 0.0, 1.0 - 2.0 * p) / std::sqrt(2.0);
  const Complex dv = v0 * std::exp(Complex(0.0, T)) - lab.v_final(harmonic);
  const double r1 = std::sqrt(2.0) * dv.real();
  const double r2 = -std::sqrt(2.0) * dv.imag();
  const double D = std::hypot(r1, r2);
  const double c = std::cos(T), s = std::sin(T);
  const double gx = (r1 * 2.0 * c + r2 * -2.0 * s) / D;
  const double gp = (r1 * 2.0 * s + r2 * 2.0 * c) / D;
  CHECK(std::abs(grad[0] - gx) < 1e-5);
  CHECK(std::abs(grad[1] - gp) < 1e-5);
}

TEST_CASE("gradient at an exact root collapses to finite-difference scale") {
  ShootingConfig cfg;
  const auto grad = gradient_of_D(0.0, 0.0, sym_labels, harmonic, cfg);
  CHECK(std::hypot(grad[0], grad[1]) < cfg.fd_step);
}

TEST_CASE("distance respects the parity of the symmetric configuration") {
  ShootingConfig cfg;
  for (double x : {0.1, 0.45}) {
    for (double p : {0.3, 0.9}) {
      const double dplus = distance_from_guess(x, p, sym_labels, harmonic, cfg);
      const double dminus =
          distance_from_guess(-x, p, sym_labels, harmonic, cfg);
      CHECK(dplus == doctest::Approx(dminus).epsilon(1e-10));
    }
  }
  const auto g = gradient_of_D(0.25, 0.8, sym_labels, harmonic, cfg);
  const auto gm = gradient_of_D(-0.25, 0.8, sym_labels, harmonic, cfg);
  CHECK(std::abs(g[0] + gm[0]) < 1e-6);
  CHECK(std::abs(g[1] - gm[1]) < 1e-6);
}

TEST_CASE("descend finds the harmonic root") {
  ShootingConfig cfg;
  const RootResult root = descend(0.2, 0.9, sym_labels, harmonic, cfg);
  CHECK(std::abs(root.x1_0) < 1e-6);
  CHECK(std::abs(root.p1_0) < 1e-6);
  CHECK(root.D_final <= cfg.delta);
  CHECK(root.iters >= 1);

  SUBCASE("determinism: re-integrating the root reproduces D_final") {
    const double D =
        distance_from_guess(root.x1_0, root.p1_0, sym_labels, harmonic, cfg);
    CHECK(std::abs(D - root.D_final) < 1e-14);
  }
  SUBCASE("stored trajectory starts at the derived initial conditions") {
    const ComplexPhasePoint expect = initial_conditions_from_guess(
        root.x1_0, root.p1_0, sym_labels, harmonic);
    CHECK(root.trajectory.start().x1 == expect.x1);
    CHECK(root.trajectory.start().p1 == expect.p1);
    CHECK(root.trajectory.start().x2 == expect.x2);
    CHECK(root.trajectory.start().p2 == expect.p2);
  }
  SUBCASE("boundary conditions: initial exact, final within delta * sqrt 2") {
    SmoothedHamiltonian model(harmonic);
    CHECK(std::abs(model.u_of(root.trajectory.start()) -
                   sym_labels.u_initial(harmonic)) < 1e-15);
    CHECK(std::abs(model.v_of(root.trajectory.end()) -
                   sym_labels.v_final(harmonic)) <= cfg.delta * std::sqrt(2.0));
  }
  SUBCASE("trajectory matches the closed-form reconstruction pointwise") {
    double worst = 0.0;
    for (std::size_t k = 0; k < root.trajectory.points.size(); k += 100) {
      const auto& tp = root.trajectory.points[k];
      const ComplexPhasePoint ref =
          testsup::harmonic_point(sym_labels, harmonic, tp.t);
      worst = std::max(worst, std::abs(tp.state.q() - ref.q()));
      worst = std::max(worst, std::abs(tp.state.p() - ref.p()));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("T = 0 is solved directly") {
  ShootingConfig cfg;
  SUBCASE("coinciding labels give the real point") {
    PropagatorLabels lab({0.7, -0.3}, {0.7, -0.3}, 0.0);
    const RootResult root = descend(5.0, 5.0, lab, harmonic, cfg);
    CHECK(root.x1_0 == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(root.p1_0 == doctest::Approx(-0.3).epsilon(1e-15));
    CHECK(root.D_final <= 1e-14);
    CHECK(root.iters == 0);
    CHECK(root.trajectory.points.size() == 1);
  }
  SUBCASE("general labels average the endpoints") {
    PropagatorLabels lab({1.0, 2.0}, {3.0, -4.0}, 0.0);
    const RootResult root = descend(0.0, 0.0, lab, harmonic, cfg);
    CHECK(root.x1_0 == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(root.p1_0 == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(root.D_final <= 1e-14);
  }
}

TEST_CASE("real root exists exactly when the real trajectory connects") {
  ShootingConfig cfg;
  // Harmonic motion from (1, 0) reaches (0, -1) at T = pi/2.
  PropagatorLabels reachable({1.0, 0.0}, {0.0, -1.0}, kPi / 2);
  const RootResult root = descend(1.0, 0.0, reachable, harmonic, cfg);
  CHECK(std::abs(root.x1_0 - 1.0) < 1e-7);
  CHECK(std::abs(root.p1_0 - 0.0) < 1e-7);
  CHECK(std::abs(root.trajectory.start().x2) < 1e-7);
  CHECK(std::abs(root.trajectory.start().p2) < 1e-7);

  // Unreachable labels force genuinely complex initial conditions.
  PropagatorLabels unreachable({1.0, 0.0}, {3.0, 0.0}, kPi / 2);
  const RootResult croot = descend(1.0, 0.0, unreachable, harmonic, cfg);
  CHECK((std::abs(croot.trajectory.start().x2) > 1e-3 ||
         std::abs(croot.trajectory.start().p2) > 1e-3));
  CHECK(croot.D_final <= cfg.delta);
}

TEST_CASE("descend reports failures honestly") {
  ShootingConfig cfg;
  cfg.max_iters = 3;
  PropagatorLabels lab({0.0, 1.0}, {2.0, -1.0}, 2.0);
  CHECK_THROWS_AS(descend(0.0, 1.0, lab, harmonic, cfg), NoConvergenceError);
  try {
    descend(0.0, 1.0, lab, harmonic, cfg);
  } catch (const NoConvergenceError& e) {
    CHECK(e.best_distance() > 0.0);
    CHECK(e.iterations() <= 3);
  }
}

TEST_CASE("continuation sweep tracks the closed-form harmonic root curve") {
  ShootingConfig cfg;
  cfg.n_steps = 1000;
  std::vector<double> grid;
  for (int k = 0; k < 200; ++k) grid.push_back(10.0 * k / 199.0);
  const ContinuationResult res =
      continuation_sweep(sym_labels, grid, harmonic, cfg);
  REQUIRE(!res.truncated);
  REQUIRE(res.roots.size() == grid.size());
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto ref = testsup::harmonic_root(
        PropagatorLabels(sym_labels.initial, sym_labels.final, grid[k]),
        harmonic);
    worst = std::max(worst, std::hypot(res.roots[k].x1_0 - ref.x1_0,
                                       res.roots[k].p1_0 - ref.p1_0));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("continuation reports partial results on failure") {
  ShootingConfig cfg;
  cfg.max_iters = 40;  // enough for small T only
  cfg.n_steps = 500;
  ModelParams quartic(1.0, 1.0, 0.0, 0.2);
  PropagatorLabels lab({8.0, 15.0}, {6.0, 15.0}, 0.0);
  std::vector<double> grid = {0.5, 1.0, 3.2, 3.3, 3.4};
  const ContinuationResult res = continuation_sweep(lab, grid, quartic, cfg);
  CHECK(res.truncated);
  CHECK(res.completed < grid.size());
  CHECK(res.roots.size() == res.completed);
  CHECK(!res.truncation_reason.empty());
}

TEST_CASE("multi_start deduplicates and drops failures") {
  ShootingConfig cfg;
  cfg.n_steps = 1000;
  SUBCASE("harmonic seeds collapse to the single root") {
    const std::array<double, 2> seeds[] = {
        {0.2, 0.9}, {-0.3, 1.2}, {0.0, 0.5}};
    const MultiStartResult res =
        multi_start(sym_labels, harmonic, cfg, seeds);
    CHECK(res.roots.size() == 1);
    CHECK(res.n_failed == 0);
    CHECK(res.n_duplicates == 2);
    CHECK(std::abs(res.roots[0].x1_0) < 1e-6);
  }
  SUBCASE("a seed set of the exact root is idempotent") {
    const std::array<double, 2> seeds[] = {{0.0, 0.0}};
    const MultiStartResult res =
        multi_start(sym_labels, harmonic, cfg, seeds);
    REQUIRE(res.roots.size() == 1);
    CHECK(res.roots[0].D_final <= cfg.delta);
  }
}

TEST_CASE("config validation") {
  ShootingConfig cfg;
  cfg.delta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgumentError);
  cfg = {};
  cfg.max_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgumentError);
}
