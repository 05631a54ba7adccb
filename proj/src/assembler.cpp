#include "cstraj/assembler.hpp"

#include <cmath>
#include <numbers>
#include <utility>

namespace cstraj {

namespace {

// Unwraps as far as the grid allows; returns the number of points whose
// branch is certain (the full size when no jump exceeds pi/2).
std::vector<double> unwrap_args_prefix(std::span<const Complex> values,
                                       std::size_t& n_good) {
  std::vector<double> args;
  args.reserve(values.size());
  n_good = 0;
  if (values.empty()) return args;
  if (std::abs(values[0]) == 0.0) return args;
  args.push_back(std::arg(values[0]));
  n_good = 1;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (std::abs(values[k]) == 0.0) break;
    const double step = std::arg(values[k] / values[k - 1]);
    if (std::abs(step) > 0.5 * std::numbers::pi) break;
    args.push_back(args.back() + step);
    ++n_good;
  }
  return args;
}

}  // namespace

PropagatorSample assemble(std::span<const RootContribution> roots,
                          const PropagatorLabels& labels,
                          const ModelParams& params) {
  PropagatorSample out;
  out.T = labels.T;
  const double zi2 = std::norm(labels.initial.z(params));
  const double zf2 = std::norm(labels.final.z(params));
  out.gaussian = std::exp(-0.5 * zi2 - 0.5 * zf2);

  Complex sum = 0.0;
  for (const auto& rc : roots) {
    const Complex iS_over_hbar = Complex(0.0, 1.0) * rc.action.S / params.hbar;
    if (iS_over_hbar.real() < -690.0) continue;  // exp underflows: negligible root
    const double mod = 1.0 / std::sqrt(std::abs(rc.prefactor.delta));
    const Complex root_of_inv_delta = std::polar(mod, rc.sigma);
    RootTerm term;
    term.root_id = rc.root_id;
    term.S = rc.action.S;
    term.delta = rc.prefactor.delta;
    term.sigma = rc.sigma;
    term.term = root_of_inv_delta * std::exp(iS_over_hbar);
    sum += term.term;
    out.breakdown.push_back(term);
  }
  out.K = out.gaussian * sum;
  return out;
}

PropagatorSample assemble_principal(const RootResult& root,
                                    const ModelParams& params,
                                    const ShootingConfig& config) {
  RootContribution rc;
  rc.root_id = 0;
  rc.action = action(root.trajectory, root.labels, params);
  rc.prefactor = prefactor(root, params, config);
  rc.sigma = 0.5 * std::arg(1.0 / rc.prefactor.delta);
  const RootContribution rcs[1] = {rc};
  return assemble(rcs, root.labels, params);
}

namespace {

// One continuation family: roots plus per-point action/prefactor and the
// tracked half-phase of 1/Delta.
struct Family {
  std::vector<RootResult> roots;
  std::vector<ActionResult> actions;
  std::vector<PrefactorResult> prefactors;
  std::vector<double> sigma;   // half-phase of 1/Delta
  std::size_t completed = 0;   // usable points
  std::string stop_reason;
};

Family run_family(const PropagatorLabels& labels_base,
                  std::span<const double> T_grid, const ModelParams& params,
                  const ShootingConfig& config, double seed_x, double seed_p) {
  Family fam;
  double sx = seed_x, sp = seed_p;
  for (double T : T_grid) {
    PropagatorLabels labels(labels_base.initial, labels_base.final, T);
    try {
      RootResult root = descend(sx, sp, labels, params, config);
      sx = root.x1_0;
      sp = root.p1_0;
      fam.actions.push_back(action(root.trajectory, labels, params));
      fam.prefactors.push_back(prefactor(root, params, config));
      fam.roots.push_back(std::move(root));
    } catch (const Error& e) {
      fam.stop_reason = "T = " + std::to_string(T) + ": " + e.what();
      break;
    }
  }

  std::vector<Complex> inv_delta(fam.roots.size());
  for (std::size_t k = 0; k < fam.roots.size(); ++k)
    inv_delta[k] = 1.0 / fam.prefactors[k].delta;
  std::size_t n_good = 0;
  fam.sigma = unwrap_args_prefix(inv_delta, n_good);
  for (double& s : fam.sigma) s *= 0.5;
  if (n_good < fam.roots.size() && fam.stop_reason.empty())
    fam.stop_reason = "phase tracking lost the branch at T = " +
                      std::to_string(T_grid[n_good]);
  fam.completed = n_good;
  return fam;
}

}  // namespace

SweepResult propagate_sweep(const PropagatorLabels& labels_base,
                            std::span<const double> T_grid,
                            const ModelParams& params,
                            const ShootingConfig& config,
                            std::span<const std::array<double, 2>> extra_seeds) {
  for (std::size_t i = 1; i < T_grid.size(); ++i)
    if (!(T_grid[i] > T_grid[i - 1]))
      throw InvalidArgumentError("propagate_sweep: T grid must ascend");

  SweepResult out;
  Family primary = run_family(labels_base, T_grid, params, config,
                              labels_base.initial.q, labels_base.initial.p);
  if (primary.completed < T_grid.size()) {
    out.truncated = true;
    out.truncation_reason = primary.stop_reason;
  }

  std::vector<Family> extras;
  for (const auto& seed : extra_seeds)
    extras.push_back(
        run_family(labels_base, T_grid, params, config, seed[0], seed[1]));

  // d2S phase bookkeeping along the primary family.
  try {
    out.phase_states = track_sigma(
        std::span<const PrefactorResult>(primary.prefactors.data(),
                                         primary.completed));
  } catch (const Error& e) {
    out.truncated = true;
    if (out.truncation_reason.empty())
      out.truncation_reason = std::string("d2S phase tracking: ") + e.what();
  }

  for (std::size_t k = 0; k < primary.completed; ++k) {
    std::vector<RootContribution> contribs;
    RootContribution rc;
    rc.root_id = 0;
    rc.action = primary.actions[k];
    rc.prefactor = primary.prefactors[k];
    rc.sigma = primary.sigma[k];
    contribs.push_back(rc);

    for (std::size_t f = 0; f < extras.size(); ++f) {
      if (k >= extras[f].completed) continue;
      const RootResult& er = extras[f].roots[k];
      const bool dup_primary =
          std::hypot(er.x1_0 - primary.roots[k].x1_0,
                     er.p1_0 - primary.roots[k].p1_0) < 1e-6;
      bool dup_extra = false;
      for (const auto& c : contribs) {
        if (c.root_id == 0 || c.root_id > f) continue;
        const RootResult& other = extras[c.root_id - 1].roots[k];
        if (std::hypot(er.x1_0 - other.x1_0, er.p1_0 - other.p1_0) < 1e-6)
          dup_extra = true;
      }
      if (dup_primary || dup_extra) continue;
      RootContribution ec;
      ec.root_id = f + 1;
      ec.action = extras[f].actions[k];
      ec.prefactor = extras[f].prefactors[k];
      ec.sigma = extras[f].sigma[k];
      contribs.push_back(ec);
    }

    PropagatorLabels labels(labels_base.initial, labels_base.final, T_grid[k]);
    out.samples.push_back(assemble(contribs, labels, params));
  }

  out.roots = std::move(primary.roots);
  out.roots.resize(primary.completed);
  return out;
}

}  // namespace cstraj
