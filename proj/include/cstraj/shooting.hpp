#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cstraj/integrator.hpp"
#include "cstraj/model.hpp"

namespace cstraj {

// Parameters of the gradient-descent root search.
struct ShootingConfig {
  double delta = 1e-12;     // convergence threshold on the distance D
  double eps0 = 0.1;        // cap on the descent step factor
  double eps_scale = 0.5;   // step factor = eps_scale * D, clamped to [1e-12, eps0]
  double fd_step = 1e-6;    // base finite-difference step for grad D
  int max_iters = 20000;    // iteration cap
  std::size_t n_steps = 3000;  // integrator resolution per trajectory

  void validate() const;
};

// Counters for the search internals; line_search_events flags uses of the
// step-halving fallback.
struct DescentDiagnostics {
  int gradient_evaluations = 0;
  int distance_evaluations = 0;
  int line_search_events = 0;
};

// A converged complex root: initial guess, residual, and the trajectory it
// generates.
struct RootResult {
  double x1_0 = 0.0;
  double p1_0 = 0.0;
  double D_final = 0.0;
  int iters = 0;
  Trajectory trajectory;
  PropagatorLabels labels;
  DescentDiagnostics diagnostics;
};

struct ContinuationResult {
  std::vector<RootResult> roots;
  bool truncated = false;
  std::string truncation_reason;
  // Index into the requested T grid where the sweep stopped (== grid size
  // when the sweep completed).
  std::size_t completed = 0;
};

struct MultiStartResult {
  std::vector<RootResult> roots;
  int n_failed = 0;
  int n_duplicates = 0;
};

// Completes the guessed (x1(0), p1(0)) to the full four initial coordinates:
// x2(0) = (c/b)(x1(0) - q') and p2(0) = (b/c)(p' - p1(0)), which enforces
// u(0) = z' identically.
ComplexPhasePoint initial_conditions_from_guess(double x1_0, double p1_0,
                                                const PropagatorLabels& labels,
                                                const ModelParams& params);

// Euclidean violation of the final boundary conditions:
// D = hypot(x1(T) + (b/c) x2(T) - q'', p1(T) - (c/b) p2(T) - p'').
double endpoint_distance(const Trajectory& traj, const PropagatorLabels& labels,
                         const ModelParams& params);

// D evaluated directly from a guess (endpoint-only integration).
// Returns +inf when the trajectory escapes.
double distance_from_guess(double x1_0, double p1_0,
                           const PropagatorLabels& labels,
                           const ModelParams& params,
                           const ShootingConfig& config);

// Central-difference gradient of D with step fd_step * max(1, |guess|).
// Each evaluation re-derives the initial conditions and re-integrates.
std::array<double, 2> gradient_of_D(double x1_0, double p1_0,
                                    const PropagatorLabels& labels,
                                    const ModelParams& params,
                                    const ShootingConfig& config);

// Gradient-descent search for a root starting from (x1_0, p1_0). The guess is
// updated by -eps * grad D with eps proportional to D; the gradient is
// recomputed only when D failed to decrease, and a step-halving fallback (up
// to 20 halvings) guards against limit cycles. Near the conical minimum the
// finite-difference step is shrunk with D, otherwise the gradient magnitude
// collapses and the iteration stalls above delta.
// T = 0 is solved directly as a linear system.
// Throws NoConvergenceError (with best-so-far data) or NonFiniteError.
RootResult descend(double x1_0, double p1_0, const PropagatorLabels& labels,
                   const ModelParams& params, const ShootingConfig& config);

// Solves each T of an ascending grid in order, seeding every search with the
// previous converged guess; the first point is seeded with (q', p').
// Stops at the first failure and reports the partial result.
ContinuationResult continuation_sweep(const PropagatorLabels& labels_base,
                                      std::span<const double> T_grid,
                                      const ModelParams& params,
                                      const ShootingConfig& config);

// Runs descend from every seed and deduplicates converged roots whose
// (x1_0, p1_0) differ by less than 1e-6. Failed seeds are only counted.
MultiStartResult multi_start(const PropagatorLabels& labels,
                             const ModelParams& params,
                             const ShootingConfig& config,
                             std::span<const std::array<double, 2>> seeds);

}  // namespace cstraj
