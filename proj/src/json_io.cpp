#include "normground/json_io.hpp"

#include <cstdint>
#include <set>
#include <stdexcept>

namespace normground {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument(where + ": unknown key '" + it.key() + "'");
}

double need_num(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw std::invalid_argument(where + ": missing key '" + key + "'");
  if (!j.at(key).is_number()) throw std::invalid_argument(where + ": '" + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

ProblemParams params_from_json(const json& j) {
  require_keys(j, {"N", "p", "q", "r1", "r2", "mu1", "mu2", "beta", "a1", "a2"}, "params");
  ProblemParams p;
  p.N = static_cast<int>(need_num(j, "N", "params"));
  p.p = need_num(j, "p", "params");
  p.q = need_num(j, "q", "params");
  p.r1 = need_num(j, "r1", "params");
  p.r2 = need_num(j, "r2", "params");
  p.mu1 = need_num(j, "mu1", "params");
  p.mu2 = need_num(j, "mu2", "params");
  p.beta = need_num(j, "beta", "params");
  p.a1 = need_num(j, "a1", "params");
  p.a2 = need_num(j, "a2", "params");
  p.validate();
  return p;
}

json params_to_json(const ProblemParams& p) {
  return json{{"N", p.N},     {"p", p.p},     {"q", p.q},       {"r1", p.r1}, {"r2", p.r2},
              {"mu1", p.mu1}, {"mu2", p.mu2}, {"beta", p.beta}, {"a1", p.a1}, {"a2", p.a2}};
}

RunConfig run_config_from_json(const json& j) {
  require_keys(j, {"params", "grid", "solver"}, "config");
  if (!j.contains("params")) throw std::invalid_argument("config: missing 'params'");
  RunConfig cfg;
  cfg.params = params_from_json(j.at("params"));
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    require_keys(g, {"R_max", "n"}, "grid");
    if (g.contains("R_max")) cfg.grid.R_max = need_num(g, "R_max", "grid");
    if (g.contains("n")) cfg.grid.n = static_cast<int>(need_num(g, "n", "grid"));
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    require_keys(s,
                 {"tau0", "tau_max", "max_iter", "tol_grad", "tol_P", "init_width_u",
                  "init_width_v", "init_kinetic_fraction", "seed", "verbose"},
                 "solver");
    if (s.contains("tau0")) cfg.solver.tau0 = need_num(s, "tau0", "solver");
    if (s.contains("tau_max")) cfg.solver.tau_max = need_num(s, "tau_max", "solver");
    if (s.contains("max_iter"))
      cfg.solver.max_iter = static_cast<int>(need_num(s, "max_iter", "solver"));
    if (s.contains("tol_grad")) cfg.solver.tol_grad = need_num(s, "tol_grad", "solver");
    if (s.contains("tol_P")) cfg.solver.tol_P = need_num(s, "tol_P", "solver");
    if (s.contains("init_width_u"))
      cfg.solver.init_width_u = need_num(s, "init_width_u", "solver");
    if (s.contains("init_width_v"))
      cfg.solver.init_width_v = need_num(s, "init_width_v", "solver");
    if (s.contains("init_kinetic_fraction"))
      cfg.solver.init_kinetic_fraction = need_num(s, "init_kinetic_fraction", "solver");
    if (s.contains("seed"))
      cfg.solver.seed = static_cast<std::uint64_t>(need_num(s, "seed", "solver"));
    if (s.contains("verbose")) cfg.solver.verbose = s.at("verbose").get<bool>();
  }
  if (!(cfg.solver.tol_grad > 0.0 && cfg.solver.tol_P > 0.0))
    throw std::invalid_argument("solver: tolerances must be positive");
  return cfg;
}

json fiber_report_to_json(const FiberReport& rep) {
  json j;
  j["classification"] = fiber_class_name(rep.classification);
  j["roots"] = rep.roots;
  j["zeros"] = rep.zeros;
  j["phi_at_crit"] = rep.phi_at_crit;
  j["second_derivs"] = rep.second_derivs;
  if (rep.s_minus) j["s_minus"] = *rep.s_minus;
  if (rep.t_max) j["t_max"] = *rep.t_max;
  return j;
}

json result_to_json(const GroundStateResult& res, const ProblemParams& params,
                    const GridConfig& grid, const SolverConfig& solver,
                    const std::string& profile_csv) {
  json j;
  j["params"] = params_to_json(params);
  j["grid"] = {{"R_max", grid.R_max}, {"n", grid.n}};
  j["solver"] = {{"tau0", solver.tau0},
                 {"max_iter", solver.max_iter},
                 {"tol_grad", solver.tol_grad},
                 {"tol_P", solver.tol_P},
                 {"init_width_u", solver.init_width_u},
                 {"init_width_v", solver.init_width_v},
                 {"init_kinetic_fraction", solver.init_kinetic_fraction},
                 {"seed", solver.seed}};
  j["lambda1"] = res.lambda1;
  j["lambda2"] = res.lambda2;
  j["energy"] = res.energy;
  j["pohozaev_residual"] = res.pohozaev_residual;
  j["gradient_residual"] = res.gradient_residual;
  j["kinetic_u"] = res.kinetic_u;
  j["kinetic_v"] = res.kinetic_v;
  j["mass_u"] = mass(res.pair.u);
  j["mass_v"] = mass(res.pair.v);
  j["marginal_m_a1_0"] = res.marginal_u;
  j["marginal_m_0_a2"] = res.marginal_v;
  j["sobolev_critical_marginal"] = res.sobolev_critical_marginal;
  j["fiber"] = fiber_report_to_json(res.fiber);
  j["checks"] = {{"positivity", res.checks.positivity},
                 {"multiplier_signs", res.checks.multiplier_signs},
                 {"energy_ordering", res.checks.energy_ordering},
                 {"pohozaev", res.checks.pohozaev},
                 {"fiber_class", res.checks.fiber_class}};
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  j["unique_fiber_max_all_iterates"] = res.unique_fiber_max_all_iterates;
  j["profile_csv"] = profile_csv;
  return j;
}

json sweep_table_to_json(const SweepTable& table) {
  json rows = json::array();
  for (const SweepRow& r : table.rows) {
    json row;
    row["x"] = r.x;
    row["ok"] = r.ok;
    if (r.ok) {
      row["energy"] = r.energy;
      row["lambda1"] = r.lambda1;
      row["lambda2"] = r.lambda2;
      row["pohozaev_residual"] = r.pohozaev_residual;
      row["gradient_residual"] = r.gradient_residual;
      row["marginal_m_a1_0"] = r.marginal_u;
      row["marginal_m_0_a2"] = r.marginal_v;
    } else {
      row["error"] = r.error;
    }
    rows.push_back(row);
  }
  return json{{"axis", table.axis == SweepAxis::Beta ? "beta" : "mass_scale"},
              {"rows", rows},
              {"monotone_energy", table.monotone_energy}};
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace normground
