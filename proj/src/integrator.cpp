#include "cstraj/integrator.hpp"

#include <algorithm>
#include <cmath>

namespace cstraj {

namespace {

inline ComplexPhasePoint rk4_step(const SmoothedHamiltonian& model,
                                  const ComplexPhasePoint& y, double h) {
  const FlowDerivative k1 = model.flow(y);
  ComplexPhasePoint y2{y.x1 + 0.5 * h * k1.x1_dot, y.p1 + 0.5 * h * k1.p1_dot,
                       y.x2 + 0.5 * h * k1.x2_dot, y.p2 + 0.5 * h * k1.p2_dot};
  const FlowDerivative k2 = model.flow(y2);
  ComplexPhasePoint y3{y.x1 + 0.5 * h * k2.x1_dot, y.p1 + 0.5 * h * k2.p1_dot,
                       y.x2 + 0.5 * h * k2.x2_dot, y.p2 + 0.5 * h * k2.p2_dot};
  const FlowDerivative k3 = model.flow(y3);
  ComplexPhasePoint y4{y.x1 + h * k3.x1_dot, y.p1 + h * k3.p1_dot,
                       y.x2 + h * k3.x2_dot, y.p2 + h * k3.p2_dot};
  const FlowDerivative k4 = model.flow(y4);
  const double s = h / 6.0;
  return {y.x1 + s * (k1.x1_dot + 2.0 * (k2.x1_dot + k3.x1_dot) + k4.x1_dot),
          y.p1 + s * (k1.p1_dot + 2.0 * (k2.p1_dot + k3.p1_dot) + k4.p1_dot),
          y.x2 + s * (k1.x2_dot + 2.0 * (k2.x2_dot + k3.x2_dot) + k4.x2_dot),
          y.p2 + s * (k1.p2_dot + 2.0 * (k2.p2_dot + k3.p2_dot) + k4.p2_dot)};
}

}  // namespace

Trajectory integrate(const SmoothedHamiltonian& model,
                     const ComplexPhasePoint& start, double T,
                     std::size_t n_steps) {
  if (n_steps < 1) throw InvalidArgumentError("integrate: n_steps must be >= 1");
  if (!(T >= 0.0)) throw InvalidArgumentError("integrate: T must be >= 0");
  if (!start.finite()) throw NonFiniteError("integrate: non-finite start", 0);

  Trajectory traj;
  traj.energy0 = model.value(start);

  if (T == 0.0) {
    traj.points.push_back({0.0, start});
    return traj;
  }

  traj.points.reserve(n_steps + 1);
  traj.points.push_back({0.0, start});
  const double h = T / static_cast<double>(n_steps);
  const double energy_scale = std::max(1.0, std::abs(traj.energy0));

  ComplexPhasePoint y = start;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    y = rk4_step(model, y, h);
    if (!y.finite())
      throw NonFiniteError("integrate: trajectory escaped", k);
    const double t = T * static_cast<double>(k) / static_cast<double>(n_steps);
    traj.points.push_back({t, y});
    const double drift = std::abs(model.value(y) - traj.energy0) / energy_scale;
    traj.max_energy_drift = std::max(traj.max_energy_drift, drift);
  }
  traj.energy_warning = traj.max_energy_drift > kEnergyDriftTolerance;
  return traj;
}

ComplexPhasePoint integrate_endpoint(const SmoothedHamiltonian& model,
                                     const ComplexPhasePoint& start, double T,
                                     std::size_t n_steps) {
  if (n_steps < 1)
    throw InvalidArgumentError("integrate_endpoint: n_steps must be >= 1");
  if (!(T >= 0.0))
    throw InvalidArgumentError("integrate_endpoint: T must be >= 0");
  if (!start.finite())
    throw NonFiniteError("integrate_endpoint: non-finite start", 0);
  if (T == 0.0) return start;

  const double h = T / static_cast<double>(n_steps);
  ComplexPhasePoint y = start;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    y = rk4_step(model, y, h);
    if (!y.finite())
      throw NonFiniteError("integrate_endpoint: trajectory escaped", k);
  }
  return y;
}

std::optional<double> period_estimate(const Trajectory& traj) {
  const std::size_t n = traj.points.size();
  if (n < 4) return std::nullopt;

  const double x0 = traj.points[0].state.x1;
  const double p0 = traj.points[0].state.p1;

  // Trajectory diameter in the (x1, p1) projection.
  double xmin = x0, xmax = x0, pmin = p0, pmax = p0;
  for (const auto& tp : traj.points) {
    xmin = std::min(xmin, tp.state.x1);
    xmax = std::max(xmax, tp.state.x1);
    pmin = std::min(pmin, tp.state.p1);
    pmax = std::max(pmax, tp.state.p1);
  }
  const double diameter = std::hypot(xmax - xmin, pmax - pmin);
  if (diameter == 0.0) return std::nullopt;  // fixed point
  const double eps = 1e-3 * diameter;

  // Reference direction of motion at t = 0, taken from the first discrete
  // step so it is well defined even when p1(0) = 0.
  const double dx0 = traj.points[1].state.x1 - traj.points[0].state.x1;
  const double dp0 = traj.points[1].state.p1 - traj.points[0].state.p1;
  if (dx0 == 0.0 && dp0 == 0.0) return std::nullopt;

  auto dist2 = [&](std::size_t k) {
    const double dx = traj.points[k].state.x1 - x0;
    const double dp = traj.points[k].state.p1 - p0;
    return dx * dx + dp * dp;
  };

  // Find local minima of the distance to the start, skipping the stretch
  // before the trajectory first leaves the ball, and refine each minimum by a
  // parabolic fit in t (the grid spacing can exceed the ball radius).
  std::vector<double> hits;
  bool left_ball = false;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double d2 = dist2(k);
    if (!left_ball) {
      if (d2 > eps * eps) left_ball = true;
      continue;
    }
    const double dm = dist2(k - 1), dp = dist2(k + 1);
    if (d2 <= dm && d2 < dp) {
      const double denom = dm - 2.0 * d2 + dp;
      double shift = 0.0, dmin2 = d2;
      if (denom > 0.0) {
        shift = 0.5 * (dm - dp) / denom;
        dmin2 = d2 - 0.125 * (dm - dp) * (dm - dp) / denom;
      }
      if (dmin2 < eps * eps) {
        const double dxk = traj.points[k + 1].state.x1 - traj.points[k - 1].state.x1;
        const double dpk = traj.points[k + 1].state.p1 - traj.points[k - 1].state.p1;
        if (dxk * dx0 + dpk * dp0 > 0.0) {  // same direction of motion
          const double dt = traj.points[1].t - traj.points[0].t;
          hits.push_back(traj.points[k].t + shift * dt);
          left_ball = false;  // wait until it leaves the ball again
        }
      }
    }
  }

  if (hits.empty()) return std::nullopt;
  // The start itself is the zeroth hit: gaps are hits[0], hits[1]-hits[0], ...
  double sum = hits[0];
  for (std::size_t i = 1; i < hits.size(); ++i) sum += hits[i] - hits[i - 1];
  return sum / static_cast<double>(hits.size());
}

}  // namespace cstraj
