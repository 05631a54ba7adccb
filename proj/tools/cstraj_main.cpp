// Command-line driver: root searches, semiclassical sweeps, exact-propagator
// comparisons. All numerics go through the C API (cstraj.h); this file only
// parses configuration and writes CSV/JSON artifacts.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cstraj.h"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumerical = 2;
constexpr int kExitConfig = 3;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- configuration ---------------------------------------------------------

json default_config() {
  return json{
      {"model", {{"hbar", 1.0}, {"b", 1.0}, {"lambda", 1.0}, {"beta", 0.0}}},
      {"labels", {{"q_i", 0.0}, {"p_i", 0.0}, {"q_f", 0.0}, {"p_f", 0.0}}},
      {"sweep", {{"t_max", 1.0}, {"n_t", 100}}},
      {"shooting",
       {{"delta", 1e-12},
        {"n_steps", 3000},
        {"eps0", 0.1},
        {"eps_scale", 0.5},
        {"fd_step", 1e-6},
        {"max_iters", 20000}}},
      {"oracle", {{"basis_size", 200}, {"n_levels", 0}}},
      {"mode", ""},
      {"seeds", json::array()},
      {"output", ""},
  };
}

// Every key of `user` must exist in `schema`; nested objects are checked
// recursively so typos fail loudly with their full path.
void reject_unknown_keys(const json& user, const json& schema,
                         const std::string& path) {
  for (const auto& [key, value] : user.items()) {
    const std::string here = path.empty() ? key : path + "." + key;
    if (!schema.contains(key))
      throw ConfigError("unknown config key: " + here);
    if (value.is_object()) {
      if (!schema.at(key).is_object())
        throw ConfigError("config key " + here + " must not be an object");
      reject_unknown_keys(value, schema.at(key), here);
    }
  }
}

void merge_into(json& base, const json& user) {
  for (const auto& [key, value] : user.items()) {
    if (value.is_object() && base.contains(key) && base.at(key).is_object())
      merge_into(base.at(key), value);
    else
      base[key] = value;
  }
}

double require_number(const json& cfg, const std::string& section,
                      const std::string& key) {
  const json& v = cfg.at(section).at(key);
  if (!v.is_number())
    throw ConfigError("config key " + section + "." + key +
                      " must be a number");
  return v.get<double>();
}

long require_integer(const json& cfg, const std::string& section,
                     const std::string& key) {
  const json& v = cfg.at(section).at(key);
  if (!v.is_number_integer())
    throw ConfigError("config key " + section + "." + key +
                      " must be an integer");
  return v.get<long>();
}

void check(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

struct RunConfig {
  double hbar, b, lambda, beta;
  cstraj_labels labels{};
  double t_max;
  long n_t;
  cstraj_shooting_config shooting{};
  long basis_size;
  long n_levels;  // 0 = auto
  std::string mode;
  std::vector<double> seeds;  // flattened (x1, p1) pairs
  std::string output;
};

RunConfig parse_config(const json& merged) {
  RunConfig rc;
  rc.hbar = require_number(merged, "model", "hbar");
  rc.b = require_number(merged, "model", "b");
  rc.lambda = require_number(merged, "model", "lambda");
  rc.beta = require_number(merged, "model", "beta");
  check(rc.hbar > 0.0, "model.hbar must be > 0");
  check(rc.b > 0.0, "model.b must be > 0");
  check(rc.beta >= 0.0, "model.beta must be >= 0");

  rc.labels.q_i = require_number(merged, "labels", "q_i");
  rc.labels.p_i = require_number(merged, "labels", "p_i");
  rc.labels.q_f = require_number(merged, "labels", "q_f");
  rc.labels.p_f = require_number(merged, "labels", "p_f");

  rc.t_max = require_number(merged, "sweep", "t_max");
  rc.n_t = require_integer(merged, "sweep", "n_t");
  check(rc.t_max >= 0.0, "sweep.t_max must be >= 0");
  check(rc.n_t >= 1, "sweep.n_t must be >= 1");
  check(rc.n_t >= 2 || rc.t_max == 0.0,
        "sweep.n_t must be >= 2 when t_max > 0");
  rc.labels.T = rc.t_max;

  rc.shooting.delta = require_number(merged, "shooting", "delta");
  rc.shooting.n_steps =
      static_cast<int>(require_integer(merged, "shooting", "n_steps"));
  rc.shooting.eps0 = require_number(merged, "shooting", "eps0");
  rc.shooting.eps_scale = require_number(merged, "shooting", "eps_scale");
  rc.shooting.fd_step = require_number(merged, "shooting", "fd_step");
  rc.shooting.max_iters =
      static_cast<int>(require_integer(merged, "shooting", "max_iters"));
  check(rc.shooting.delta > 0.0, "shooting.delta must be > 0");
  check(rc.shooting.n_steps >= 1, "shooting.n_steps must be >= 1");
  check(rc.shooting.eps0 > 0.0, "shooting.eps0 must be > 0");
  check(rc.shooting.eps_scale > 0.0, "shooting.eps_scale must be > 0");
  check(rc.shooting.fd_step > 0.0, "shooting.fd_step must be > 0");
  check(rc.shooting.max_iters >= 1, "shooting.max_iters must be >= 1");

  rc.basis_size = require_integer(merged, "oracle", "basis_size");
  rc.n_levels = require_integer(merged, "oracle", "n_levels");
  check(rc.basis_size >= 2, "oracle.basis_size must be >= 2");
  check(rc.n_levels >= 0, "oracle.n_levels must be >= 0");
  check(rc.n_levels <= rc.basis_size,
        "oracle.n_levels must be <= oracle.basis_size");

  const json& mode = merged.at("mode");
  if (!mode.is_string()) throw ConfigError("config key mode must be a string");
  rc.mode = mode.get<std::string>();

  const json& seeds = merged.at("seeds");
  if (!seeds.is_array()) throw ConfigError("config key seeds must be an array");
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const json& s = seeds[i];
    if (!s.is_array() || s.size() != 2 || !s[0].is_number() ||
        !s[1].is_number())
      throw ConfigError("seeds[" + std::to_string(i) +
                        "] must be a pair of numbers");
    rc.seeds.push_back(s[0].get<double>());
    rc.seeds.push_back(s[1].get<double>());
  }

  const json& output = merged.at("output");
  if (!output.is_string())
    throw ConfigError("config key output must be a string");
  rc.output = output.get<std::string>();
  return rc;
}

// ---- helpers ----------------------------------------------------------------

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void api_check(cstraj_status st) {
  if (st == CSTRAJ_OK) return;
  if (st == CSTRAJ_ERR_INVALID_ARGUMENT)
    throw ConfigError(cstraj_last_error());
  throw NumericalError(cstraj_last_error());
}

struct ModelHandle {
  cstraj_model* m = nullptr;
  ~ModelHandle() { cstraj_model_destroy(m); }
};

struct RootHandle {
  cstraj_root* r = nullptr;
  ~RootHandle() { cstraj_root_destroy(r); }
};

struct RootSetHandle {
  cstraj_root_set* s = nullptr;
  ~RootSetHandle() { cstraj_root_set_destroy(s); }
};

struct SweepHandle {
  cstraj_sweep* s = nullptr;
  ~SweepHandle() { cstraj_sweep_destroy(s); }
};

struct OracleHandle {
  cstraj_oracle* o = nullptr;
  ~OracleHandle() { cstraj_oracle_destroy(o); }
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  return out;
}

// ---- modes ------------------------------------------------------------------

int run_trajectory(const RunConfig& rc) {
  ModelHandle model;
  api_check(cstraj_model_create(rc.hbar, rc.b, rc.lambda, rc.beta, &model.m));

  RootHandle root;
  if (!rc.seeds.empty()) {
    RootSetHandle set;
    int n_failed = 0;
    api_check(cstraj_multi_start(model.m, &rc.labels, &rc.shooting,
                                 rc.seeds.data(), rc.seeds.size() / 2, &set.s,
                                 &n_failed));
    const size_t n = cstraj_root_set_size(set.s);
    if (n == 0)
      throw NumericalError("no seed converged (" +
                           std::to_string(n_failed) + " failed)");
    // best root: lowest distance, ties by (x1, p1)
    size_t best = 0;
    for (size_t i = 1; i < n; ++i) {
      const cstraj_root* a = cstraj_root_set_get(set.s, i);
      const cstraj_root* b = cstraj_root_set_get(set.s, best);
      const double da = cstraj_root_distance(a), db = cstraj_root_distance(b);
      if (da < db ||
          (da == db && (cstraj_root_x1(a) < cstraj_root_x1(b) ||
                        (cstraj_root_x1(a) == cstraj_root_x1(b) &&
                         cstraj_root_p1(a) < cstraj_root_p1(b)))))
        best = i;
    }
    const cstraj_root* chosen = cstraj_root_set_get(set.s, best);
    api_check(cstraj_find_root(model.m, &rc.labels, &rc.shooting,
                               cstraj_root_x1(chosen), cstraj_root_p1(chosen),
                               &root.r));
  } else {
    api_check(cstraj_find_root(model.m, &rc.labels, &rc.shooting,
                               rc.labels.q_i, rc.labels.p_i, &root.r));
  }

  if (!rc.output.empty()) {
    std::ofstream csv = open_output(rc.output);
    csv << "t,x1,p1,x2,p2\n";
    const size_t n = cstraj_root_point_count(root.r);
    for (size_t i = 0; i < n; ++i) {
      double t, x1, p1, x2, p2;
      cstraj_root_point(root.r, i, &t, &x1, &p1, &x2, &p2);
      csv << fmt17(t) << ',' << fmt17(x1) << ',' << fmt17(p1) << ','
          << fmt17(x2) << ',' << fmt17(p2) << '\n';
    }
  }

  double period = 0.0;
  int has_period = 0;
  cstraj_root_period(root.r, &period, &has_period);

  json report{{"x1_0", cstraj_root_x1(root.r)},
              {"p1_0", cstraj_root_p1(root.r)},
              {"D_final", cstraj_root_distance(root.r)},
              {"iters", cstraj_root_iterations(root.r)}};
  report["period_estimate"] = has_period ? json(period) : json(nullptr);
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

int run_sweep_modes(const RunConfig& rc) {
  const bool want_scsp = rc.mode == "propagate" || rc.mode == "compare";
  const bool want_exact = rc.mode == "exact" || rc.mode == "compare";

  ModelHandle model;
  api_check(cstraj_model_create(rc.hbar, rc.b, rc.lambda, rc.beta, &model.m));

  SweepHandle sweep;
  if (want_scsp)
    api_check(cstraj_scsp_sweep(model.m, &rc.labels, rc.t_max,
                                static_cast<size_t>(rc.n_t), &rc.shooting,
                                rc.seeds.data(), rc.seeds.size() / 2,
                                &sweep.s));

  OracleHandle oracle;
  if (want_exact)
    api_check(cstraj_oracle_create(model.m, static_cast<size_t>(rc.basis_size),
                                   rc.n_levels == 0 ? 1 : 0, &oracle.o));

  const size_t n_rows = want_scsp ? cstraj_sweep_size(sweep.s)
                                  : static_cast<size_t>(rc.n_t);
  const bool truncated = want_scsp && cstraj_sweep_truncated(sweep.s) != 0;

  std::optional<std::ofstream> csv;
  if (!rc.output.empty()) csv = open_output(rc.output);
  if (csv) {
    if (rc.mode == "compare")
      *csv << "T,re_exact,im_exact,re_scsp,im_scsp,abs_err\n";
    else if (rc.mode == "propagate")
      *csv << "T,re_scsp,im_scsp\n";
    else
      *csv << "T,re_exact,im_exact\n";
  }

  double max_abs_err = 0.0, l2_num = 0.0, l2_den = 0.0;
  int any_truncation_warning = 0;
  for (size_t i = 0; i < n_rows; ++i) {
    double T = rc.n_t == 1 ? 0.0
                           : rc.t_max * static_cast<double>(i) /
                                 static_cast<double>(rc.n_t - 1);
    double re_s = 0.0, im_s = 0.0, re_e = 0.0, im_e = 0.0;
    if (want_scsp) cstraj_sweep_sample(sweep.s, i, &T, &re_s, &im_s);
    if (want_exact) {
      cstraj_labels l = rc.labels;
      l.T = T;
      int warn = 0;
      api_check(cstraj_oracle_csp(oracle.o, &l,
                                  static_cast<size_t>(rc.n_levels), &re_e,
                                  &im_e, &warn));
      any_truncation_warning |= warn;
    }
    if (rc.mode == "compare") {
      const double err = std::hypot(re_e - re_s, im_e - im_s);
      max_abs_err = std::max(max_abs_err, err);
      l2_num += err * err;
      l2_den += re_e * re_e + im_e * im_e;
      if (csv)
        *csv << fmt17(T) << ',' << fmt17(re_e) << ',' << fmt17(im_e) << ','
             << fmt17(re_s) << ',' << fmt17(im_s) << ',' << fmt17(err) << '\n';
    } else if (rc.mode == "propagate") {
      if (csv) *csv << fmt17(T) << ',' << fmt17(re_s) << ',' << fmt17(im_s) << '\n';
    } else {
      if (csv) *csv << fmt17(T) << ',' << fmt17(re_e) << ',' << fmt17(im_e) << '\n';
    }
  }

  json summary{{"mode", rc.mode}, {"rows", n_rows}, {"truncated", truncated}};
  if (want_scsp && truncated)
    summary["truncation_reason"] = cstraj_sweep_truncation_reason(sweep.s);
  if (rc.mode == "compare") {
    summary["max_abs_err"] = max_abs_err;
    summary["l2_rel_err"] = l2_den > 0.0 ? std::sqrt(l2_num / l2_den) : 0.0;
  }
  if (want_exact) {
    summary["basis_size"] = rc.basis_size;
    summary["n_levels_used"] =
        rc.n_levels == 0 ? cstraj_oracle_levels(oracle.o)
                         : static_cast<size_t>(rc.n_levels);
    summary["truncation_warning"] = any_truncation_warning != 0;
  }
  std::cout << summary.dump(2) << '\n';

  if (truncated) {
    std::cerr << "sweep truncated: " << cstraj_sweep_truncation_reason(sweep.s)
              << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

json parse_set_value(const std::string& text) {
  const json parsed = json::parse(text, nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  return json(text);  // bare strings allowed without quotes
}

void apply_set(json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set expects key=value, got: " + assignment);
  const std::string path = assignment.substr(0, eq);
  const json value = parse_set_value(assignment.substr(eq + 1));
  json* node = &cfg;
  std::stringstream ss(path);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw ConfigError("--set: empty key");
  json patch = value;
  for (auto it = parts.rbegin(); it != parts.rend(); ++it)
    patch = json{{*it, patch}};
  (void)node;
  merge_into(cfg, patch);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semiclassical coherent-state propagator toolkit"};
  app.set_version_flag("--version", cstraj_version());

  std::string mode;
  std::string config_path;
  std::vector<std::string> sets;
  std::string output_flag;
  app.add_option("mode", mode, "trajectory | propagate | exact | compare")
      ->required();
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--set", sets, "override a config key, e.g. model.beta=0.1");
  app.add_option("--output", output_flag, "output data file (CSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    json merged = default_config();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError("cannot read config file: " + config_path);
      json user;
      try {
        user = json::parse(in);
      } catch (const json::parse_error& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
      }
      reject_unknown_keys(user, merged, "");
      merge_into(merged, user);
    }
    for (const auto& assignment : sets) {
      json patch = json::object();
      apply_set(patch, assignment);
      reject_unknown_keys(patch, merged, "");
      merge_into(merged, patch);
    }

    RunConfig rc = parse_config(merged);
    if (!mode.empty()) rc.mode = mode;
    if (!output_flag.empty()) rc.output = output_flag;
    if (rc.mode != "trajectory" && rc.mode != "propagate" &&
        rc.mode != "exact" && rc.mode != "compare")
      throw ConfigError("mode must be trajectory|propagate|exact|compare");

    if (rc.mode == "trajectory") return run_trajectory(rc);
    return run_sweep_modes(rc);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}
