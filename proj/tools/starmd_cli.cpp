#include "starmd/acceptance.hpp"
#include "starmd/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace starmd;

namespace {

Json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  return Json::parse(f);
}

void write_json(const Json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << j.dump(2) << '\n';
}

struct RunFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> T;
  std::optional<std::string> mode;
  std::optional<std::string> problem;
  std::optional<double> p;
  std::optional<double> alpha;
  std::optional<double> B;
  std::optional<Index> dim;
};

ExperimentConfig build_config(const RunFlags& f) {
  ExperimentConfig c;
  if (!f.config.empty()) c = config_from_json(read_json_file(f.config));
  if (!f.out.empty()) c.out = f.out;
  if (f.seed) c.seed = *f.seed;
  if (f.T) c.T = *f.T;
  if (f.mode) c.mode = parse_mode(*f.mode);
  if (f.problem) c.problem = *f.problem;
  if (f.p) c.norm = NormSpec::pnorm(*f.p);
  if (f.alpha) c.alpha = *f.alpha;
  if (f.B) c.B = *f.B;
  if (f.dim) c.dim = *f.dim;
  return c;
}

int cmd_run(const RunFlags& f) {
  const ExperimentConfig c = build_config(f);
  const ExperimentResult res = run_experiment(c);
  Json j = summarize(res.run);
  j["config"] = to_json(c);
  j["seconds"] = res.seconds;
  bool ok = j["telescoping_ok"].get<bool>();
  if (j.contains("max_probe_excess")) ok = ok && j["max_probe_excess"].get<int>() <= 2;
  if (c.mode == Mode::General && res.run.rows.size() > 0 && res.problem.minimizer) {
    const RadiusCheck rc =
        radius_bound_check(res.run.rows, res.problem.L, Geometry(res.problem.norm).q(),
                           res.problem.kappa);
    j["radius_check"] = rc.pass;
    ok = ok && rc.pass;
  }
  j["pass"] = ok;
  std::cout << j.dump(2) << '\n';
  return ok ? 0 : 1;
}

int cmd_fit(const std::string& trace, std::optional<double> horizon, bool effective) {
  std::ifstream f(trace);
  if (!f) throw std::runtime_error("cannot open '" + trace + "'");
  const GapSeries s = read_gap_series(f);
  if (effective && !horizon) {
    for (std::size_t i = s.t.size(); i-- > 0;) {
      if (s.gap[i] > 0.0) {
        horizon = s.t[i];
        break;
      }
    }
  }
  const RateFit fit = fit_rate(s, horizon);
  if (fit.clamped > 0) {
    std::cerr << "warning: " << fit.clamped << " zero gaps clamped to 1e-300\n";
  }
  std::cout << Json{{"slope", fit.slope},
                    {"intercept", fit.intercept},
                    {"window", {fit.t_lo, fit.t_hi}},
                    {"residual", fit.residual},
                    {"points", fit.points},
                    {"clamped", fit.clamped}}
                   .dump(2)
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated mirror descent with binary search for star-convex objectives"};
  app.require_subcommand(1);

  RunFlags rf;
  auto* run = app.add_subcommand("run", "Run the solver on a catalog problem and write the trace");
  run->add_option("--config", rf.config, "JSON experiment config")->check(CLI::ExistingFile);
  run->add_option("--out", rf.out, "CSV trace path");
  run->add_option("--seed", rf.seed);
  run->add_option("--T", rf.T, "Iterations");
  run->add_option("--mode", rf.mode, "general or smooth");
  run->add_option("--problem", rf.problem, "Catalog id, e.g. quad or pnormpow:p=1.5,k=1.5");
  run->add_option("--p", rf.p, "Run in the l_p geometry");
  run->add_option("--alpha", rf.alpha);
  run->add_option("--B", rf.B, "Radius bound used to derive alpha");
  run->add_option("--dim", rf.dim);

  std::string trace;
  std::optional<double> horizon;
  bool effective = false;
  auto* fit = app.add_subcommand("fit", "Fit the log-log rate of a trace's gap over its second half");
  fit->add_option("trace", trace, "CSV trace")->required()->check(CLI::ExistingFile);
  fit->add_option("--horizon", horizon, "Fit over [H/2, H] instead of the full run");
  fit->add_flag("--effective", effective, "Use the last t with a positive gap as the horizon");

  double C = 1.0, eps = 1e-3, Lstar = 1e6;
  int N = 8;
  std::string strategy = "bisection", adv_out;
  auto* adv = app.add_subcommand("adversary", "Play the lower-bound game and verify the counterexample");
  adv->add_option("--C", C);
  adv->add_option("--eps", eps);
  adv->add_option("--Lstar", Lstar);
  adv->add_option("--N", N);
  adv->add_option("--strategy", strategy)->check(CLI::IsMember({"bisection", "grid"}));
  adv->add_option("--out", adv_out, "JSON transcript path");

  std::string cert_problem = "quad";
  Index cert_dim = 50;
  std::uint64_t cert_seed = 1, samples = 10000;
  std::optional<double> cert_tau, cert_L, cert_kappa;
  double radius = 1.0;
  auto* cert = app.add_subcommand("certify", "Check declared star-convexity and smoothness by sampling");
  cert->add_option("--problem", cert_problem);
  cert->add_option("--dim", cert_dim);
  cert->add_option("--seed", cert_seed);
  cert->add_option("--samples", samples);
  cert->add_option("--tau", cert_tau);
  cert->add_option("--L", cert_L);
  cert->add_option("--kappa", cert_kappa);
  cert->add_option("--radius", radius);

  AcceptanceOptions acc;
  std::string suite_out;
  auto* suite = app.add_subcommand("suite", "Run the acceptance battery");
  suite->add_option("--T", acc.T);
  suite->add_option("--seed", acc.seed);
  suite->add_option("--only", acc.only, "Criterion ids")->delimiter(',');
  suite->add_option("--out", suite_out, "JSON verdict path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(rf);
    if (*fit) return cmd_fit(trace, horizon, effective);
    if (*adv) {
      const GameReport g = run_adversary_game(C, eps, Lstar, parse_strategy(strategy), N);
      const Json j = to_json(g);
      if (!adv_out.empty()) write_json(j, adv_out);
      std::cout << "phi " << g.state.phi_history.front() << " -> " << g.state.phi_history.back()
                << ", budget " << g.query_budget << ", verdict " << g.verdict.detail << '\n';
      return g.verdict.pass && g.phi_growth_ok ? 0 : 1;
    }
    if (*cert) {
      const CatalogEntry e = make_problem(cert_problem, cert_dim, cert_seed);
      const Problem& p = e.problem;
      const double tau = cert_tau.value_or(p.tau);
      const double L = cert_L.value_or(p.L);
      const double kappa = cert_kappa.value_or(p.kappa);
      const auto star = certify_star_convexity(p, tau, samples, radius, cert_seed);
      const auto smooth = certify_weak_smoothness(p, L, kappa, samples, cert_seed, radius);
      std::cout << Json{{"problem", p.id},
                        {"tau", tau},
                        {"L", L},
                        {"kappa", kappa},
                        {"star_convex", {{"pass", star.pass}, {"worst", star.worst}}},
                        {"weakly_smooth", {{"pass", smooth.pass}, {"worst", smooth.worst}}},
                        {"samples", samples},
                        {"seed", cert_seed}}
                       .dump(2)
                << '\n';
      return star.pass && smooth.pass ? 0 : 1;
    }
    if (*suite) {
      const auto results = run_acceptance(acc);
      for (const auto& r : results) std::cout << format_line(r) << '\n';
      const Json j = to_json(results);
      if (!suite_out.empty()) write_json(j, suite_out);
      return j["pass"].get<bool>() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
