#include "cstraj/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cstraj {

namespace {
constexpr double kEpsFloor = 1e-12;
constexpr int kMaxHalvings = 20;
constexpr double kRootDedupTol = 1e-6;
}  // namespace

void ShootingConfig::validate() const {
  if (!(delta > 0.0)) throw InvalidArgumentError("shooting: delta must be > 0");
  if (!(eps0 > 0.0)) throw InvalidArgumentError("shooting: eps0 must be > 0");
  if (!(eps_scale > 0.0))
    throw InvalidArgumentError("shooting: eps_scale must be > 0");
  if (!(fd_step > 0.0))
    throw InvalidArgumentError("shooting: fd_step must be > 0");
  if (max_iters < 1)
    throw InvalidArgumentError("shooting: max_iters must be >= 1");
  if (n_steps < 1)
    throw InvalidArgumentError("shooting: n_steps must be >= 1");
}

ComplexPhasePoint initial_conditions_from_guess(double x1_0, double p1_0,
                                                const PropagatorLabels& labels,
                                                const ModelParams& params) {
  const double b = params.b, c = params.c();
  ComplexPhasePoint pt;
  pt.x1 = x1_0;
  pt.p1 = p1_0;
  pt.x2 = (c / b) * (x1_0 - labels.initial.q);
  pt.p2 = (b / c) * (labels.initial.p - p1_0);
  return pt;
}

namespace {

// Residual vector of the final boundary conditions.
inline std::array<double, 2> final_residual(const ComplexPhasePoint& end,
                                            const PropagatorLabels& labels,
                                            const ModelParams& params) {
  const double b = params.b, c = params.c();
  return {end.x1 + (b / c) * end.x2 - labels.final.q,
          end.p1 - (c / b) * end.p2 - labels.final.p};
}

inline double distance_of_end(const ComplexPhasePoint& end,
                              const PropagatorLabels& labels,
                              const ModelParams& params) {
  const auto r = final_residual(end, labels, params);
  return std::hypot(r[0], r[1]);
}

}  // namespace

double endpoint_distance(const Trajectory& traj, const PropagatorLabels& labels,
                         const ModelParams& params) {
  return distance_of_end(traj.end(), labels, params);
}

double distance_from_guess(double x1_0, double p1_0,
                           const PropagatorLabels& labels,
                           const ModelParams& params,
                           const ShootingConfig& config) {
  const SmoothedHamiltonian model(params);
  const ComplexPhasePoint start =
      initial_conditions_from_guess(x1_0, p1_0, labels, params);
  try {
    const ComplexPhasePoint end =
        integrate_endpoint(model, start, labels.T, config.n_steps);
    return distance_of_end(end, labels, params);
  } catch (const NonFiniteError&) {
    return std::numeric_limits<double>::infinity();
  }
}

namespace {

// Gradient of D by central differences with an explicit step h.
std::array<double, 2> gradient_with_step(double x1_0, double p1_0, double h,
                                         const PropagatorLabels& labels,
                                         const ModelParams& params,
                                         const ShootingConfig& config) {
  const double dxp = distance_from_guess(x1_0 + h, p1_0, labels, params, config);
  const double dxm = distance_from_guess(x1_0 - h, p1_0, labels, params, config);
  const double dpp = distance_from_guess(x1_0, p1_0 + h, labels, params, config);
  const double dpm = distance_from_guess(x1_0, p1_0 - h, labels, params, config);
  if (!std::isfinite(dxp) || !std::isfinite(dxm) || !std::isfinite(dpp) ||
      !std::isfinite(dpm))
    throw NonFiniteError("gradient_of_D: trajectory escaped near guess", 0);
  return {(dxp - dxm) / (2.0 * h), (dpp - dpm) / (2.0 * h)};
}

// Direct solution of the T = 0 boundary problem: u(0) = z' and v(0) = z''
// conjugate together force x1(0) = (q' + q'')/2, p1(0) = (p' + p'')/2.
RootResult solve_time_zero(const PropagatorLabels& labels,
                           const ModelParams& params,
                           const ShootingConfig& config) {
  const SmoothedHamiltonian model(params);
  RootResult res;
  res.labels = labels;
  res.x1_0 = 0.5 * (labels.initial.q + labels.final.q);
  res.p1_0 = 0.5 * (labels.initial.p + labels.final.p);
  const ComplexPhasePoint start =
      initial_conditions_from_guess(res.x1_0, res.p1_0, labels, params);
  res.trajectory = integrate(model, start, 0.0, config.n_steps);
  res.D_final = endpoint_distance(res.trajectory, labels, params);
  res.iters = 0;
  return res;
}

}  // namespace

std::array<double, 2> gradient_of_D(double x1_0, double p1_0,
                                    const PropagatorLabels& labels,
                                    const ModelParams& params,
                                    const ShootingConfig& config) {
  const double h = config.fd_step * std::max(1.0, std::hypot(x1_0, p1_0));
  return gradient_with_step(x1_0, p1_0, h, labels, params, config);
}

RootResult descend(double x1_0, double p1_0, const PropagatorLabels& labels,
                   const ModelParams& params, const ShootingConfig& config) {
  config.validate();
  if (labels.T == 0.0) return solve_time_zero(labels, params, config);

  const SmoothedHamiltonian model(params);
  DescentDiagnostics diag;

  auto eval = [&](double x, double p) {
    ++diag.distance_evaluations;
    return distance_from_guess(x, p, labels, params, config);
  };

  double gx = x1_0, gp = p1_0;
  double D = eval(gx, gp);
  if (!std::isfinite(D))
    throw NonFiniteError("descend: initial guess escaped", 0);

  // Finite-difference step: capped by fd_step * scale far from the root and
  // shrunk proportionally to D near it, where a fixed step would average the
  // conical minimum away and freeze the iteration.
  auto fd_h = [&]() {
    const double scale = std::max(1.0, std::hypot(gx, gp));
    return std::clamp(0.1 * D, 1e-12 * scale, config.fd_step * scale);
  };
  auto grad_here = [&]() {
    ++diag.gradient_evaluations;
    diag.distance_evaluations += 4;
    return gradient_with_step(gx, gp, fd_h(), labels, params, config);
  };

  std::array<double, 2> grad{0.0, 0.0};
  bool grad_fresh = false;
  int iters = 0;

  // Improvements below 1e-3 relative do not count as progress. A step that
  // lands near-symmetrically across the minimum (|1 - eps_scale * |grad|^2|
  // close to 1) changes D only marginally, and a stale-gradient zigzag on an
  // anisotropic valley crawls; rejecting both routes them into the
  // gradient-refresh and step-halving branch, which breaks the symmetry and
  // restores a useful step.
  auto improved = [](double Dt, double D) { return Dt < D * (1.0 - 1e-3); };

  if (D > config.delta) {
    grad = grad_here();
    grad_fresh = true;
  }

  while (iters < config.max_iters && D > config.delta) {
    ++iters;
    double eps = std::clamp(config.eps_scale * D, kEpsFloor, config.eps0);
    double tx = gx - eps * grad[0];
    double tp = gp - eps * grad[1];
    double Dt = eval(tx, tp);
    if (improved(Dt, D)) {  // keep the gradient while D decreases
      gx = tx; gp = tp; D = Dt;
      grad_fresh = false;
      continue;
    }
    // D failed to decrease: recompute the gradient, then fall back to step
    // halving.
    if (!grad_fresh) {
      grad = grad_here();
      grad_fresh = true;
      tx = gx - eps * grad[0];
      tp = gp - eps * grad[1];
      Dt = eval(tx, tp);
      if (improved(Dt, D)) {
        gx = tx; gp = tp; D = Dt;
        grad_fresh = false;
        continue;
      }
    }
    ++diag.line_search_events;
    int halvings = 0;
    while (!improved(Dt, D) && halvings < kMaxHalvings) {
      eps *= 0.5;
      ++halvings;
      tx = gx - eps * grad[0];
      tp = gp - eps * grad[1];
      Dt = eval(tx, tp);
    }
    if (improved(Dt, D)) {
      gx = tx; gp = tp; D = Dt;
      grad_fresh = false;
    } else {
      throw NoConvergenceError(
          "descend: stalled at D = " + std::to_string(D), gx, gp, D, iters);
    }
  }

  if (D > config.delta)
    throw NoConvergenceError("descend: iteration cap reached at D = " +
                                 std::to_string(D),
                             gx, gp, D, iters);

  RootResult res;
  res.labels = labels;
  res.x1_0 = gx;
  res.p1_0 = gp;
  res.iters = iters;
  res.diagnostics = diag;
  const ComplexPhasePoint start =
      initial_conditions_from_guess(gx, gp, labels, params);
  res.trajectory = integrate(model, start, labels.T, config.n_steps);
  res.D_final = endpoint_distance(res.trajectory, labels, params);
  return res;
}

ContinuationResult continuation_sweep(const PropagatorLabels& labels_base,
                                      std::span<const double> T_grid,
                                      const ModelParams& params,
                                      const ShootingConfig& config) {
  for (std::size_t i = 1; i < T_grid.size(); ++i)
    if (!(T_grid[i] > T_grid[i - 1]))
      throw InvalidArgumentError("continuation_sweep: T grid must ascend");

  ContinuationResult out;
  out.roots.reserve(T_grid.size());
  double seed_x = labels_base.initial.q;
  double seed_p = labels_base.initial.p;
  for (double T : T_grid) {
    PropagatorLabels labels(labels_base.initial, labels_base.final, T);
    try {
      RootResult root = descend(seed_x, seed_p, labels, params, config);
      seed_x = root.x1_0;
      seed_p = root.p1_0;
      out.roots.push_back(std::move(root));
      ++out.completed;
    } catch (const Error& e) {
      out.truncated = true;
      out.truncation_reason =
          "T = " + std::to_string(T) + ": " + e.what();
      break;
    }
  }
  return out;
}

MultiStartResult multi_start(const PropagatorLabels& labels,
                             const ModelParams& params,
                             const ShootingConfig& config,
                             std::span<const std::array<double, 2>> seeds) {
  MultiStartResult out;
  for (const auto& seed : seeds) {
    try {
      RootResult root = descend(seed[0], seed[1], labels, params, config);
      const bool dup = std::any_of(
          out.roots.begin(), out.roots.end(), [&](const RootResult& r) {
            return std::hypot(r.x1_0 - root.x1_0, r.p1_0 - root.p1_0) <
                   kRootDedupTol;
          });
      if (dup)
        ++out.n_duplicates;
      else
        out.roots.push_back(std::move(root));
    } catch (const Error&) {
      ++out.n_failed;
    }
  }
  return out;
}

}  // namespace cstraj
