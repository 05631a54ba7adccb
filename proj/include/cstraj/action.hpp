#pragma once

#include "cstraj/integrator.hpp"
#include "cstraj/model.hpp"
#include "cstraj/shooting.hpp"

namespace cstraj {

// Complex action S = I_s + f of a root trajectory, where
//   I_s = integral of (i hbar / 2)(v udot - u vdot) - Htilde over [0, T]
//   f   = -(i hbar / 2)(v'' u(T) + v(0) u')
// with u' and v'' the fixed labels. components_check_error is the difference
// between I_s computed in the u,v form and an independent evaluation in the
// four real coordinates; it should sit at quadrature-error level.
struct ActionResult {
  Complex I_s;
  Complex f;
  Complex S;
  double components_check_error = 0.0;
};

// Prefactor ingredients: d2S = d^2 S / du' dv'', the time integral of
// d^2 Htilde / du dv along the trajectory, and the assembled amplitude
// Delta = -i hbar (d2S)^{-1} exp(-(i/hbar) phase_integral).
struct PrefactorResult {
  Complex d2S;
  Complex phase_integral;
  Complex delta;
};

// Action of a converged root trajectory by composite trapezoid on the stored
// grid.
ActionResult action(const Trajectory& traj, const PropagatorLabels& labels,
                    const ModelParams& params);

// d^2 S / du' dv'' = hbar [ (b/c) dp1''/dq' - (c/b) dx1''/dp'
//                           - i (dx1''/dq' + dp1''/dp') ],
// with each partial obtained by re-converging the root for labels perturbed
// by +-h in q' and p' (central differences) and differencing the final
// (x1, p1). Each re-convergence is seeded with the unperturbed root.
Complex d2s_mixed(const RootResult& root, const ModelParams& params,
                  const ShootingConfig& config, double h = 1e-5);

// Trapezoid quadrature of d^2 Htilde / du dv along the trajectory.
Complex phase_integral(const Trajectory& traj, const SmoothedHamiltonian& model);

// Delta from its two ingredients. Throws CausticError for |d2S| below
// 1e-12 * hbar.
Complex amplitude_delta(Complex d2S, Complex phase_int,
                        const ModelParams& params);

// Convenience: all three prefactor pieces for a converged root.
PrefactorResult prefactor(const RootResult& root, const ModelParams& params,
                          const ShootingConfig& config, double h = 1e-5);

}  // namespace cstraj
