#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "cstraj/model.hpp"

namespace cstraj {

struct TrajectoryPoint {
  double t;
  ComplexPhasePoint state;
};

// Stored fixed-step trajectory of the complex flow over [0, T].
// energy0 is Htilde at t = 0; Htilde is a constant of motion, so
// max_energy_drift records the worst relative drift along the points as an
// integration-quality diagnostic (warning, not an error).
struct Trajectory {
  std::vector<TrajectoryPoint> points;
  Complex energy0;
  double max_energy_drift = 0.0;
  bool energy_warning = false;

  double T() const { return points.empty() ? 0.0 : points.back().t; }
  const ComplexPhasePoint& start() const { return points.front().state; }
  const ComplexPhasePoint& end() const { return points.back().state; }
};

// Conservation drift above this relative level sets Trajectory::energy_warning.
inline constexpr double kEnergyDriftTolerance = 1e-8;

// Classical fixed-step RK4 over [0, T] with n_steps steps, storing every
// point. T = 0 yields the single-point trajectory. Throws NonFiniteError when
// a coordinate escapes to inf/nan.
Trajectory integrate(const SmoothedHamiltonian& model,
                     const ComplexPhasePoint& start, double T,
                     std::size_t n_steps);

// Same grid as integrate() but keeps only the final point. The root search
// differentiates this map with respect to the start, so the step grid must be
// identical to integrate()'s.
ComplexPhasePoint integrate_endpoint(const SmoothedHamiltonian& model,
                                     const ComplexPhasePoint& start, double T,
                                     std::size_t n_steps);

// Primitive period of the (x1, p1) projection, estimated from the times where
// the trajectory re-enters a small ball around the initial point moving in
// the initial direction. Returns nullopt when no full turn fits in [0, T].
std::optional<double> period_estimate(const Trajectory& traj);

}  // namespace cstraj
