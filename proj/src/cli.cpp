#include "normground/cli.hpp"

#include "normground/json_io.hpp"
#include "normground/landscape.hpp"
#include "normground/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace normground::cli {

namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig load_config(const std::string& path, std::string* raw_out) {
  const std::string raw = slurp(path);
  if (raw_out) *raw_out = raw;
  json j;
  try {
    j = json::parse(raw);
  } catch (const std::exception& ex) {
    throw std::invalid_argument(std::string("config parse error: ") + ex.what());
  }
  return run_config_from_json(j);
}

struct Record {
  std::string subcommand;
  std::string config_hash;
  json params_echo;
  std::vector<std::string> outputs;
  bool pass = true;
  json summary;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  int emit() {
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json j{{"subcommand", subcommand}, {"config_hash", config_hash},
           {"params", params_echo},    {"outputs", outputs},
           {"wall_time_s", wall},      {"pass", pass},
           {"summary", summary}};
    std::cout << j.dump(2) << "\n";
    return pass ? 0 : 1;
  }
};

std::string out_path(const std::string& dir, const std::string& name) {
  return dir.empty() || dir == "." ? name : dir + "/" + name;
}

std::string resolve_out_dir(std::string out_dir) {
  if (const char* env = std::getenv("NORMGROUND_OUT"); env && *env) return env;
  return out_dir;
}

int cmd_scalar(CLI::App& app, Record& rec) {
  int N = 3, n = 4096;
  double p = 4.0, mu = 1.0, a = 0.0, R_max = 40.0;
  std::string out_dir = ".";
  app.add_option("--N", N);
  app.add_option("--p", p)->required();
  app.add_option("--mu", mu);
  app.add_option("--a", a);  // 0: use |w|_2 (lambda = 1)
  app.add_option("--Rmax", R_max);
  app.add_option("--n", n);
  app.add_option("--out", out_dir);
  app.callback([&] {
    out_dir = resolve_out_dir(out_dir);
    auto grid = RadialGrid::make(N, R_max, n);
    const ScalarGroundState gs = solve_unit_scalar(N, p, grid);
    const double mass_a = (a > 0.0) ? a : gs.w_mass;
    const NormalizedScalarSolution sol = normalized_scalar(gs, mu, mass_a);

    const std::string csv = out_path(out_dir, "scalar_profile.csv");
    write_profile_csv(csv, sol.u);
    json rj{{"N", N},
            {"p", p},
            {"mu", mu},
            {"a", mass_a},
            {"lambda", sol.lambda},
            {"energy", sol.energy},
            {"C_Np", gs.C_Np},
            {"w0", gs.w0},
            {"w_mass", gs.w_mass},
            {"closed_form_level", scalar_level(gs, mu, mass_a)},
            {"residuals",
             {{"pohozaev", gs.pohozaev_residual}, {"gn_equality", gs.gn_residual}}}};
    const std::string jpath = out_path(out_dir, "scalar_result.json");
    std::ofstream(jpath) << rj.dump(2) << "\n";
    rec.outputs = {csv, jpath};
    rec.params_echo = {{"N", N}, {"p", p}, {"mu", mu}, {"a", mass_a}};
    rec.summary = rj;
    rec.pass = gs.pohozaev_residual < 1e-4 && gs.gn_residual < 1e-4;
  });
  return 0;
}

int cmd_system(CLI::App& app, Record& rec) {
  std::string config_path, out_dir = ".";
  app.add_option("--config", config_path)->required();
  app.add_option("--out", out_dir);
  app.callback([&] {
    out_dir = resolve_out_dir(out_dir);
    std::string raw;
    const RunConfig cfg = load_config(config_path, &raw);
    rec.config_hash = content_hash(raw);
    rec.params_echo = params_to_json(cfg.params);

    const RegimeData reg = derive_regime(cfg.params);
    if (reg.regime == Regime::Other)
      throw std::invalid_argument(
          "system: regime Other is not supported by the solver; need "
          "2 < p < pbar < q <= 2* (mixed) or pbar < p, q, r < 2* (supercritical)");
    auto grid = RadialGrid::make(cfg.params.N, cfg.grid.R_max, cfg.grid.n);
    const GroundStateResult res = (reg.regime == Regime::MixedSubSuper)
                                      ? solve_mixed(cfg.params, grid, cfg.solver)
                                      : solve_supercritical(cfg.params, grid, cfg.solver);

    const std::string csv = out_path(out_dir, "system_profile.csv");
    write_profile_csv(csv, res.pair.u, &res.pair.v);
    const json rj = result_to_json(res, cfg.params, cfg.grid, cfg.solver, csv);
    const std::string jpath = out_path(out_dir, "system_result.json");
    std::ofstream(jpath) << rj.dump(2) << "\n";
    rec.outputs = {csv, jpath};
    rec.summary = {{"regime", regime_name(reg.regime)},
                   {"energy", res.energy},
                   {"lambda1", res.lambda1},
                   {"lambda2", res.lambda2},
                   {"converged", res.converged},
                   {"iterations", res.iterations},
                   {"checks", rj.at("checks")}};
    rec.pass = res.converged && res.checks.all();
  });
  return 0;
}

int cmd_fiber(CLI::App& app, Record& rec) {
  std::string config_path, profile_path, out_dir = ".";
  double s_lo = -5.0, s_hi = 5.0, wu = 1.0, wv = 1.0;
  int samples = 401;
  app.add_option("--config", config_path)->required();
  app.add_option("--profile", profile_path);
  app.add_option("--s-lo", s_lo);
  app.add_option("--s-hi", s_hi);
  app.add_option("--samples", samples);
  app.add_option("--wu", wu);
  app.add_option("--wv", wv);
  app.add_option("--out", out_dir);
  app.callback([&] {
    out_dir = resolve_out_dir(out_dir);
    std::string raw;
    const RunConfig cfg = load_config(config_path, &raw);
    rec.config_hash = content_hash(raw);
    rec.params_echo = params_to_json(cfg.params);

    GridPtr grid;
    Eigen::ArrayXd uvals, vvals;
    if (!profile_path.empty()) {
      const ProfileData pd = read_profile_csv(profile_path);
      if (!pd.v) throw std::invalid_argument("fiber: profile must carry both columns u and v");
      grid = RadialGrid::make(cfg.params.N, pd.r[pd.r.size() - 1],
                              static_cast<int>(pd.r.size()));
      uvals = pd.u;
      vvals = *pd.v;
    } else {
      grid = RadialGrid::make(cfg.params.N, cfg.grid.R_max, cfg.grid.n);
      uvals = (-grid->r.square() / (2.0 * wu * wu)).exp();
      vvals = (-grid->r.square() / (2.0 * wv * wv)).exp();
    }
    StatePair pair(normalize_mass(RadialField(grid, uvals), cfg.params.a1),
                   normalize_mass(RadialField(grid, vvals), cfg.params.a2));

    const auto curve = fiber_profile(pair, cfg.params, s_lo, s_hi, samples);
    const std::string csv = out_path(out_dir, "fiber_curve.csv");
    {
      std::FILE* fp = std::fopen(csv.c_str(), "w");
      if (!fp) throw std::runtime_error("cannot open " + csv);
      std::fprintf(fp, "s,phi,dphi\n");
      for (const FiberSample& smp : curve)
        std::fprintf(fp, "%.17g,%.17g,%.17g\n", smp.s, smp.phi, smp.dphi);
      std::fclose(fp);
    }
    const FiberReport rep = locate_critical_points(pair, cfg.params);
    const json rj = fiber_report_to_json(rep);
    const std::string jpath = out_path(out_dir, "fiber_report.json");
    std::ofstream(jpath) << rj.dump(2) << "\n";
    rec.outputs = {csv, jpath};
    rec.summary = rj;
    rec.pass = rep.classification != FiberClass::Degenerate;
  });
  return 0;
}

int cmd_hfun(CLI::App& app, Record& rec) {
  std::string config_path, out_dir = ".";
  int samples = 2001;
  app.add_option("--config", config_path)->required();
  app.add_option("--samples", samples);
  app.add_option("--out", out_dir);
  app.callback([&] {
    out_dir = resolve_out_dir(out_dir);
    std::string raw;
    const RunConfig cfg = load_config(config_path, &raw);
    rec.config_hash = content_hash(raw);
    rec.params_echo = params_to_json(cfg.params);

    const ScalarMarginals marg = scalar_marginals(cfg.params);
    const ThresholdData thr = compute_thresholds(cfg.params, marg.gn);
    const LandscapeCoeffs hc = h_coeffs(cfg.params, thr);
    const LandscapeReport rep = analyze(hc);

    const std::string csv = out_path(out_dir, "hfun_curve.csv");
    {
      std::FILE* fp = std::fopen(csv.c_str(), "w");
      if (!fp) throw std::runtime_error("cannot open " + csv);
      std::fprintf(fp, "t,h\n");
      const double t_hi = rep.t_scan > 0.0 ? rep.t_scan : 1.0;
      for (int i = 1; i <= samples; ++i) {
        const double t = t_hi * i / samples;
        std::fprintf(fp, "%.17g,%.17g\n", t, hc.value(t));
      }
      std::fclose(fp);
    }
    json rj;
    rj["coeffs"] = {{"a", hc.a}, {"b", hc.b}, {"c", hc.c}, {"d", hc.d},
                    {"er", hc.er}, {"ep", hc.ep}, {"eq", hc.eq}};
    rj["thresholds"] = {{"D1", thr.D1}, {"D2", thr.D2}, {"D3", thr.D3}, {"T", thr.T}};
    rj["gn_constants"] = {{"C_Np", marg.gn.C_Np}, {"C_Nq", marg.gn.C_Nq}, {"C_Nr", marg.gn.C_Nr}};
    rj["structure_ok"] = rep.structure_ok;
    json crit = json::array();
    for (const auto& cp : rep.critical_points)
      crit.push_back({{"t", cp.t}, {"value", cp.value}, {"kind", cp.is_min ? "min" : "max"}});
    rj["critical_points"] = crit;
    rj["zeros"] = rep.zeros;
    const std::string jpath = out_path(out_dir, "hfun_report.json");
    std::ofstream(jpath) << rj.dump(2) << "\n";
    rec.outputs = {csv, jpath};
    rec.summary = rj;
    rec.pass = rep.structure_ok;
  });
  return 0;
}

int cmd_sweep(CLI::App& app, Record& rec) {
  std::string config_path, axis = "beta", out_dir = ".";
  std::vector<double> values;
  app.add_option("--config", config_path)->required();
  app.add_option("--axis", axis)->check(CLI::IsMember({"beta", "mass_scale"}));
  app.add_option("--values", values)->required()->delimiter(',');
  app.add_option("--out", out_dir);
  app.callback([&] {
    out_dir = resolve_out_dir(out_dir);
    std::string raw;
    const RunConfig cfg = load_config(config_path, &raw);
    rec.config_hash = content_hash(raw);
    rec.params_echo = params_to_json(cfg.params);

    auto grid = RadialGrid::make(cfg.params.N, cfg.grid.R_max, cfg.grid.n);
    const SweepAxis ax = (axis == "beta") ? SweepAxis::Beta : SweepAxis::MassScale;
    const SweepTable table = sweep(cfg.params, ax, values, grid, cfg.solver);

    const std::string csv = out_path(out_dir, "sweep_table.csv");
    {
      std::FILE* fp = std::fopen(csv.c_str(), "w");
      if (!fp) throw std::runtime_error("cannot open " + csv);
      std::fprintf(fp, "x,ok,energy,lambda1,lambda2,pohozaev_residual,gradient_residual,"
                       "marginal_m_a1_0,marginal_m_0_a2,error\n");
      for (const SweepRow& r : table.rows)
        std::fprintf(fp, "%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", r.x,
                     r.ok ? 1 : 0, r.energy, r.lambda1, r.lambda2, r.pohozaev_residual,
                     r.gradient_residual, r.marginal_u, r.marginal_v, r.error.c_str());
      std::fclose(fp);
    }
    const json rj = sweep_table_to_json(table);
    const std::string jpath = out_path(out_dir, "sweep_table.json");
    std::ofstream(jpath) << rj.dump(2) << "\n";
    rec.outputs = {csv, jpath};
    rec.summary = rj;
    bool all_ok = true;
    for (const SweepRow& r : table.rows) all_ok = all_ok && r.ok;
    rec.pass = all_ok && (ax != SweepAxis::Beta || table.monotone_energy);
  });
  return 0;
}

int cmd_verify(CLI::App& app, Record& rec) {
  std::string result_path;
  app.add_option("--result", result_path)->required();
  app.callback([&] {
    const std::string raw = slurp(result_path);
    rec.config_hash = content_hash(raw);
    json rj;
    try {
      rj = json::parse(raw);
    } catch (const std::exception& ex) {
      throw std::invalid_argument(std::string("result parse error: ") + ex.what());
    }
    const ProblemParams params = params_from_json(rj.at("params"));
    rec.params_echo = params_to_json(params);
    const double tol_P = rj.at("solver").at("tol_P").get<double>();

    const ProfileData pd = read_profile_csv(rj.at("profile_csv").get<std::string>());
    if (!pd.v) throw std::invalid_argument("verify: profile lacks the v column");
    auto grid = RadialGrid::make(params.N, pd.r[pd.r.size() - 1],
                                 static_cast<int>(pd.r.size()));
    StatePair pair(RadialField(grid, pd.u), RadialField(grid, *pd.v));

    json checks;
    auto rel_close = [](double x, double y, double tol) {
      return std::abs(x - y) <= tol * std::max({1.0, std::abs(x), std::abs(y)});
    };
    const double mu = mass(pair.u), mv = mass(pair.v);
    checks["mass_u"] = rel_close(mu, params.a1, 1e-9);
    checks["mass_v"] = rel_close(mv, params.a2, 1e-9);

    const double I = energy(pair, params);
    checks["energy_match"] = rel_close(I, rj.at("energy").get<double>(), 1e-9);

    const double K = kinetic(pair.u) + kinetic(pair.v);
    const double P = pohozaev(pair, params);
    checks["pohozaev"] = K > 0.0 && std::abs(P) / K < tol_P;

    const auto [l1, l2] = extract_multipliers(pair, params);
    checks["multiplier_signs"] = l1 > 0.0 && l2 > 0.0;

    auto positive_in_bulk = [&](const RadialField& f) {
      const double peak2 = f.values().square().maxCoeff();
      if (!(peak2 > 0.0)) return false;
      for (int i = 1; i < grid->n - 1; ++i)
        if (f[i] * f[i] > 1e-12 * peak2 && !(f[i] > 0.0)) return false;
      return true;
    };
    checks["positivity"] = positive_in_bulk(pair.u) && positive_in_bulk(pair.v);

    const ScalarMarginals marg = scalar_marginals(params);
    checks["energy_ordering"] = I < std::min(marg.m_a1_0, marg.m_0_a2);

    const RegimeData reg = derive_regime(params);
    bool fiber_ok = false;
    try {
      const FiberReport rep = locate_critical_points(pair, params);
      fiber_ok = (reg.regime == Regime::MixedSubSuper)
                     ? rep.classification == FiberClass::PlusMinus &&
                           fiber_coeffs(pair, params).ddphi(0.0) > 0.0
                     : rep.classification == FiberClass::UniqueMax;
    } catch (const std::exception&) {
      fiber_ok = false;
    }
    checks["fiber_class"] = fiber_ok;

    bool pass = true;
    for (const auto& [k, v] : checks.items()) pass = pass && v.get<bool>();
    rec.summary = {{"checks", checks},
                   {"recomputed",
                    {{"energy", I},
                     {"pohozaev", P},
                     {"lambda1", l1},
                     {"lambda2", l2},
                     {"mass_u", mu},
                     {"mass_v", mv},
                     {"marginal_m_a1_0", marg.m_a1_0},
                     {"marginal_m_0_a2", marg.m_0_a2}}}};
    rec.pass = pass;
  });
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"normground: normalized ground states of coupled two-component "
               "elliptic systems with mass constraints"};
  app.require_subcommand(1);

  Record rec;
  auto* scalar = app.add_subcommand("scalar", "unit scalar ground state and scaling family");
  auto* system = app.add_subcommand("system", "coupled normalized ground state solve");
  auto* fiber = app.add_subcommand("fiber", "fiber map profile and critical points");
  auto* hfun = app.add_subcommand("hfun", "landscape function analysis");
  auto* sweepc = app.add_subcommand("sweep", "parameter sweeps of the system solver");
  auto* verify = app.add_subcommand("verify", "recheck a stored result from its files");
  cmd_scalar(*scalar, rec);
  cmd_system(*system, rec);
  cmd_fiber(*fiber, rec);
  cmd_hfun(*hfun, rec);
  cmd_sweep(*sweepc, rec);
  cmd_verify(*verify, rec);

  std::vector<const char*> argv;
  argv.push_back("normground");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "normground: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "normground: " << e.what() << "\n";
    return 1;
  }
  for (auto* sc : app.get_subcommands()) rec.subcommand = sc->get_name();
  return rec.emit();
}

}  // namespace normground::cli
