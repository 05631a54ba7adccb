#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cstraj/action.hpp"
#include "cstraj/phase.hpp"
#include "cstraj/shooting.hpp"

namespace cstraj {

// One root's contribution to the propagator at a fixed time.
// sigma is the half-phase actually used for sqrt(1/Delta): the square root is
// composed as |Delta|^{-1/2} exp(i sigma), so squaring the used branch
// recovers 1/Delta exactly. term = sqrt(1/Delta) * exp(i S / hbar).
struct RootTerm {
  std::size_t root_id = 0;
  Complex S;
  Complex delta;
  double sigma = 0.0;
  Complex term;
};

// Semiclassical propagator value at one time, with its per-root breakdown:
// K = gaussian * sum of terms, recomputable bit-for-bit.
struct PropagatorSample {
  double T = 0.0;
  Complex K;
  double gaussian = 0.0;  // exp(-|z'|^2/2 - |z''|^2/2)
  std::vector<RootTerm> breakdown;
};

// Input bundle for one root at one time.
struct RootContribution {
  std::size_t root_id = 0;
  ActionResult action;
  PrefactorResult prefactor;
  double sigma = 0.0;  // tracked half-phase of 1/Delta
};

struct SweepResult {
  std::vector<PropagatorSample> samples;
  std::vector<RootResult> roots;        // primary continuation family
  std::vector<PhaseState> phase_states; // d2S bookkeeping along that family
  bool truncated = false;
  std::string truncation_reason;
};

// Combines converged roots into K = gaussian * sum_k sqrt(1/Delta_k)
// exp(i S_k / hbar). The branch of each square root is the tracked half-phase
// sigma_k supplied by the caller; it replaces the principal branch entirely.
// Roots whose exp(i S / hbar) underflows are dropped.
PropagatorSample assemble(std::span<const RootContribution> roots,
                          const PropagatorLabels& labels,
                          const ModelParams& params);

// Single-time convenience without sweep context: the half-phase of 1/Delta is
// taken on the principal branch (valid near the free limit).
PropagatorSample assemble_principal(const RootResult& root,
                                    const ModelParams& params,
                                    const ShootingConfig& config);

// Full pipeline over an ascending T grid: continuation roots, action and
// prefactor per point, 1/Delta half-phase tracked continuously from the free
// limit, then assembly. Extra seeds start additional continuation families
// whose distinct roots are summed into the samples (families that fail drop
// out); the primary family failing truncates the sweep.
SweepResult propagate_sweep(const PropagatorLabels& labels_base,
                            std::span<const double> T_grid,
                            const ModelParams& params,
                            const ShootingConfig& config,
                            std::span<const std::array<double, 2>> extra_seeds = {});

}  // namespace cstraj
