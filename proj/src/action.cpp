#include "cstraj/action.hpp"

#include <cmath>
#include <vector>

namespace cstraj {

namespace {

// Composite trapezoid of already-sampled values on a uniform grid.
Complex trapezoid(const std::vector<Complex>& f, double h) {
  if (f.size() < 2) return {0.0, 0.0};
  Complex sum = 0.5 * (f.front() + f.back());
  for (std::size_t k = 1; k + 1 < f.size(); ++k) sum += f[k];
  return sum * h;
}

}  // namespace

ActionResult action(const Trajectory& traj, const PropagatorLabels& labels,
                    const ModelParams& params) {
  const SmoothedHamiltonian model(params);
  const double hbar = params.hbar;
  const Complex ih2(0.0, 0.5 * hbar);

  ActionResult out;
  const std::size_t n = traj.points.size();

  if (n >= 2) {
    const double h = traj.points[1].t - traj.points[0].t;
    std::vector<Complex> integrand(n);
    std::vector<Complex> comp_bracket(n);
    for (std::size_t k = 0; k < n; ++k) {
      const ComplexPhasePoint& pt = traj.points[k].state;
      const Complex q = pt.q(), p = pt.p();
      const FlowDerivative d = model.flow(pt);
      const Complex qdot(d.x1_dot, d.p2_dot);
      const Complex pdot(d.p1_dot, d.x2_dot);
      const Complex u = model.u_of(pt), v = model.v_of(pt);
      const Complex udot =
          (qdot / params.b + Complex(0, 1) * pdot / params.c()) / std::sqrt(2.0);
      const Complex vdot =
          (qdot / params.b - Complex(0, 1) * pdot / params.c()) / std::sqrt(2.0);
      integrand[k] = ih2 * (v * udot - u * vdot) - model.value(q, p);

      // Same integrand written in the four real coordinates:
      // (p qdot - q pdot)/2 = 1/2 [p1 x1dot + p2 x2dot - x1 p1dot - x2 p2dot]
      //                 + i/2 [x2 x1dot + p1 p2dot - x1 x2dot - p2 p1dot].
      comp_bracket[k] =
          Complex(0.5 * (pt.p1 * d.x1_dot + pt.p2 * d.x2_dot -
                         pt.x1 * d.p1_dot - pt.x2 * d.p2_dot),
                  0.5 * (pt.x2 * d.x1_dot + pt.p1 * d.p2_dot -
                         pt.x1 * d.x2_dot - pt.p2 * d.p1_dot));
    }
    out.I_s = trapezoid(integrand, h);

    // Cross-check: bracket integrals minus (H1 + i H2) T, using the conserved
    // initial energy.
    const Complex is_components =
        trapezoid(comp_bracket, h) - traj.energy0 * traj.T();
    out.components_check_error = std::abs(out.I_s - is_components);
  } else {
    out.I_s = {0.0, 0.0};
  }

  const Complex u_end = model.u_of(traj.end());
  const Complex v_start = model.v_of(traj.start());
  out.f = -ih2 * (labels.v_final(params) * u_end +
                  v_start * labels.u_initial(params));
  out.S = out.I_s + out.f;
  return out;
}

Complex d2s_mixed(const RootResult& root, const ModelParams& params,
                  const ShootingConfig& config, double h) {
  const double b = params.b, c = params.c();

  // Final (x1, p1) of the root re-converged for perturbed labels, seeded with
  // the unperturbed root.
  auto endpoint_for = [&](double dq, double dp) {
    CoherentLabel initial{root.labels.initial.q + dq,
                          root.labels.initial.p + dp};
    PropagatorLabels labels(initial, root.labels.final, root.labels.T);
    RootResult r;
    try {
      r = descend(root.x1_0, root.p1_0, labels, params, config);
    } catch (const NoConvergenceError& e) {
      throw NoConvergenceError(
          std::string("d2s_mixed: perturbed root did not converge (") +
              e.what() + "); retry with smaller h",
          e.best_x1(), e.best_p1(), e.best_distance(), e.iterations());
    }
    const ComplexPhasePoint& end = r.trajectory.end();
    return std::array<double, 2>{end.x1, end.p1};
  };

  const auto qp = endpoint_for(h, 0.0), qm = endpoint_for(-h, 0.0);
  const auto pp = endpoint_for(0.0, h), pm = endpoint_for(0.0, -h);

  const double dx1_dq = (qp[0] - qm[0]) / (2.0 * h);
  const double dp1_dq = (qp[1] - qm[1]) / (2.0 * h);
  const double dx1_dp = (pp[0] - pm[0]) / (2.0 * h);
  const double dp1_dp = (pp[1] - pm[1]) / (2.0 * h);

  return params.hbar * Complex((b / c) * dp1_dq - (c / b) * dx1_dp,
                               -(dx1_dq + dp1_dp));
}

Complex phase_integral(const Trajectory& traj,
                       const SmoothedHamiltonian& model) {
  const std::size_t n = traj.points.size();
  if (n < 2) return {0.0, 0.0};
  const double h = traj.points[1].t - traj.points[0].t;
  std::vector<Complex> f(n);
  for (std::size_t k = 0; k < n; ++k)
    f[k] = model.mixed_second_derivative(traj.points[k].state);
  return trapezoid(f, h);
}

Complex amplitude_delta(Complex d2S, Complex phase_int,
                        const ModelParams& params) {
  const double hbar = params.hbar;
  if (std::abs(d2S) < 1e-12 * hbar)
    throw CausticError("amplitude_delta: d2S vanishes (caustic)");
  const Complex mihbar(0.0, -hbar);
  return mihbar / d2S * std::exp(Complex(0.0, -1.0 / hbar) * phase_int);
}

PrefactorResult prefactor(const RootResult& root, const ModelParams& params,
                          const ShootingConfig& config, double h) {
  const SmoothedHamiltonian model(params);
  PrefactorResult out;
  out.d2S = d2s_mixed(root, params, config, h);
  out.phase_integral = phase_integral(root.trajectory, model);
  out.delta = amplitude_delta(out.d2S, out.phase_integral, params);
  return out;
}

}  // namespace cstraj
