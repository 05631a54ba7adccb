#include "cstraj.h"

#include <new>
#include <string>

#include "cstraj/assembler.hpp"
#include "cstraj/oracle.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

cstraj_status classify(const std::exception& e) {
  set_error(e.what());
  if (dynamic_cast<const cstraj::NoConvergenceError*>(&e))
    return CSTRAJ_ERR_NO_CONVERGENCE;
  if (dynamic_cast<const cstraj::NonFiniteError*>(&e))
    return CSTRAJ_ERR_NON_FINITE;
  if (dynamic_cast<const cstraj::CausticError*>(&e)) return CSTRAJ_ERR_CAUSTIC;
  if (dynamic_cast<const cstraj::DiscontinuityError*>(&e))
    return CSTRAJ_ERR_DISCONTINUITY;
  if (dynamic_cast<const cstraj::WidthMismatchError*>(&e))
    return CSTRAJ_ERR_WIDTH_MISMATCH;
  if (dynamic_cast<const cstraj::DegenerateInputError*>(&e) ||
      dynamic_cast<const cstraj::InvalidArgumentError*>(&e))
    return CSTRAJ_ERR_INVALID_ARGUMENT;
  return CSTRAJ_ERR_INTERNAL;
}

cstraj::PropagatorLabels to_labels(const cstraj_labels& l) {
  return cstraj::PropagatorLabels({l.q_i, l.p_i}, {l.q_f, l.p_f}, l.T);
}

cstraj::ShootingConfig to_config(const cstraj_shooting_config& c) {
  cstraj::ShootingConfig cfg;
  cfg.delta = c.delta;
  cfg.eps0 = c.eps0;
  cfg.eps_scale = c.eps_scale;
  cfg.fd_step = c.fd_step;
  cfg.max_iters = c.max_iters;
  cfg.n_steps = static_cast<std::size_t>(c.n_steps);
  return cfg;
}

template <typename F>
cstraj_status guarded(F&& f) {
  try {
    f();
    return CSTRAJ_OK;
  } catch (const std::bad_alloc&) {
    set_error("out of memory");
    return CSTRAJ_ERR_INTERNAL;
  } catch (const std::exception& e) {
    return classify(e);
  } catch (...) {
    set_error("unknown error");
    return CSTRAJ_ERR_INTERNAL;
  }
}

}  // namespace

struct cstraj_model {
  cstraj::ModelParams params;
};

struct cstraj_root {
  cstraj::RootResult result;
};

struct cstraj_root_set {
  std::vector<cstraj_root> roots;
};

struct cstraj_sweep {
  cstraj::SweepResult result;
};

struct cstraj_oracle {
  cstraj::SpectralOracle oracle;
  cstraj::ModelParams params;
};

extern "C" {

const char* cstraj_version(void) { return "0.1.0"; }

const char* cstraj_last_error(void) { return g_last_error.c_str(); }

void cstraj_shooting_defaults(cstraj_shooting_config* cfg) {
  const cstraj::ShootingConfig d;
  cfg->delta = d.delta;
  cfg->eps0 = d.eps0;
  cfg->eps_scale = d.eps_scale;
  cfg->fd_step = d.fd_step;
  cfg->max_iters = d.max_iters;
  cfg->n_steps = static_cast<int>(d.n_steps);
}

cstraj_status cstraj_model_create(double hbar, double b, double lambda,
                                  double beta, cstraj_model** out) {
  *out = nullptr;
  return guarded([&] {
    *out = new cstraj_model{cstraj::ModelParams(hbar, b, lambda, beta)};
  });
}

void cstraj_model_destroy(cstraj_model* m) { delete m; }

double cstraj_model_momentum_width(const cstraj_model* m) {
  return m->params.c();
}

double cstraj_model_lambda_eff(const cstraj_model* m) {
  return cstraj::SmoothedHamiltonian(m->params).lambda_eff();
}

double cstraj_model_zero_point(const cstraj_model* m) {
  return cstraj::SmoothedHamiltonian(m->params).zero_point();
}

cstraj_status cstraj_find_root(const cstraj_model* m,
                               const cstraj_labels* labels,
                               const cstraj_shooting_config* cfg,
                               double seed_x1, double seed_p1,
                               cstraj_root** out) {
  *out = nullptr;
  return guarded([&] {
    *out = new cstraj_root{cstraj::descend(seed_x1, seed_p1, to_labels(*labels),
                                           m->params, to_config(*cfg))};
  });
}

cstraj_status cstraj_find_root_continuation(
    const cstraj_model* m, const cstraj_labels* labels,
    const cstraj_shooting_config* cfg, const double* T_grid, size_t n_t,
    cstraj_root_set** out, size_t* truncated_at) {
  *out = nullptr;
  return guarded([&] {
    cstraj::ContinuationResult res = cstraj::continuation_sweep(
        to_labels(*labels), std::span<const double>(T_grid, n_t), m->params,
        to_config(*cfg));
    auto* set = new cstraj_root_set;
    set->roots.reserve(res.roots.size());
    for (auto& r : res.roots) set->roots.push_back({std::move(r)});
    if (truncated_at) *truncated_at = res.completed;
    if (res.truncated) set_error(res.truncation_reason);
    *out = set;
  });
}

cstraj_status cstraj_multi_start(const cstraj_model* m,
                                 const cstraj_labels* labels,
                                 const cstraj_shooting_config* cfg,
                                 const double* seeds, size_t n_seeds,
                                 cstraj_root_set** out, int* n_failed) {
  *out = nullptr;
  return guarded([&] {
    std::vector<std::array<double, 2>> s(n_seeds);
    for (size_t i = 0; i < n_seeds; ++i)
      s[i] = {seeds[2 * i], seeds[2 * i + 1]};
    cstraj::MultiStartResult res =
        cstraj::multi_start(to_labels(*labels), m->params, to_config(*cfg), s);
    auto* set = new cstraj_root_set;
    set->roots.reserve(res.roots.size());
    for (auto& r : res.roots) set->roots.push_back({std::move(r)});
    if (n_failed) *n_failed = res.n_failed;
    *out = set;
  });
}

void cstraj_root_destroy(cstraj_root* r) { delete r; }

double cstraj_root_x1(const cstraj_root* r) { return r->result.x1_0; }
double cstraj_root_p1(const cstraj_root* r) { return r->result.p1_0; }
double cstraj_root_distance(const cstraj_root* r) { return r->result.D_final; }
int cstraj_root_iterations(const cstraj_root* r) { return r->result.iters; }

size_t cstraj_root_point_count(const cstraj_root* r) {
  return r->result.trajectory.points.size();
}

void cstraj_root_point(const cstraj_root* r, size_t i, double* t, double* x1,
                       double* p1, double* x2, double* p2) {
  const auto& pt = r->result.trajectory.points.at(i);
  if (t) *t = pt.t;
  if (x1) *x1 = pt.state.x1;
  if (p1) *p1 = pt.state.p1;
  if (x2) *x2 = pt.state.x2;
  if (p2) *p2 = pt.state.p2;
}

void cstraj_root_period(const cstraj_root* r, double* period, int* has_period) {
  const auto est = cstraj::period_estimate(r->result.trajectory);
  if (has_period) *has_period = est.has_value() ? 1 : 0;
  if (period) *period = est.value_or(0.0);
}

void cstraj_root_set_destroy(cstraj_root_set* s) { delete s; }

size_t cstraj_root_set_size(const cstraj_root_set* s) {
  return s->roots.size();
}

const cstraj_root* cstraj_root_set_get(const cstraj_root_set* s, size_t i) {
  return &s->roots.at(i);
}

cstraj_status cstraj_scsp_sweep(const cstraj_model* m,
                                const cstraj_labels* labels, double t_max,
                                size_t n_t, const cstraj_shooting_config* cfg,
                                const double* seeds, size_t n_seeds,
                                cstraj_sweep** out) {
  *out = nullptr;
  return guarded([&] {
    if (n_t < 1)
      throw cstraj::InvalidArgumentError("scsp_sweep: n_t must be >= 1");
    if (n_t == 1 && t_max != 0.0)
      throw cstraj::InvalidArgumentError(
          "scsp_sweep: n_t = 1 requires t_max = 0");
    std::vector<double> grid(n_t);
    for (size_t k = 0; k < n_t; ++k)
      grid[k] = n_t == 1 ? 0.0
                         : t_max * static_cast<double>(k) /
                               static_cast<double>(n_t - 1);
    std::vector<std::array<double, 2>> s(n_seeds);
    for (size_t i = 0; i < n_seeds; ++i)
      s[i] = {seeds[2 * i], seeds[2 * i + 1]};
    auto* sweep = new cstraj_sweep{cstraj::propagate_sweep(
        to_labels(*labels), grid, m->params, to_config(*cfg), s)};
    *out = sweep;
  });
}

void cstraj_sweep_destroy(cstraj_sweep* s) { delete s; }

size_t cstraj_sweep_size(const cstraj_sweep* s) {
  return s->result.samples.size();
}

void cstraj_sweep_sample(const cstraj_sweep* s, size_t i, double* T, double* re,
                         double* im) {
  const auto& sample = s->result.samples.at(i);
  if (T) *T = sample.T;
  if (re) *re = sample.K.real();
  if (im) *im = sample.K.imag();
}

int cstraj_sweep_truncated(const cstraj_sweep* s) {
  return s->result.truncated ? 1 : 0;
}

const char* cstraj_sweep_truncation_reason(const cstraj_sweep* s) {
  return s->result.truncation_reason.c_str();
}

cstraj_status cstraj_oracle_create(const cstraj_model* m, size_t N,
                                   int check_convergence, cstraj_oracle** out) {
  *out = nullptr;
  return guarded([&] {
    *out = new cstraj_oracle{
        cstraj::SpectralOracle(m->params, N, check_convergence != 0),
        m->params};
  });
}

void cstraj_oracle_destroy(cstraj_oracle* o) { delete o; }

size_t cstraj_oracle_levels(const cstraj_oracle* o) {
  return o->oracle.converged_levels();
}

double cstraj_oracle_energy(const cstraj_oracle* o, size_t n) {
  return o->oracle.energy(n);
}

cstraj_status cstraj_oracle_csp(const cstraj_oracle* o,
                                const cstraj_labels* labels, size_t n_levels,
                                double* re, double* im,
                                int* truncation_warning) {
  return guarded([&] {
    const cstraj::Overlap k = o->oracle.csp(to_labels(*labels), n_levels);
    if (re) *re = k.value.real();
    if (im) *im = k.value.imag();
    if (truncation_warning) *truncation_warning = k.truncation_warning ? 1 : 0;
  });
}

cstraj_status cstraj_harmonic_csp(const cstraj_model* m,
                                  const cstraj_labels* labels, double* re,
                                  double* im) {
  return guarded([&] {
    const cstraj::Complex k =
        cstraj::harmonic_closed_form(to_labels(*labels), m->params);
    if (re) *re = k.real();
    if (im) *im = k.imag();
  });
}

}  // extern "C"
