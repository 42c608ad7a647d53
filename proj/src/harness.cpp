#include "starmd/harness.hpp"

#include "starmd/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace starmd {

Json to_json(const NormSpec& spec) {
  if (spec.is_pnorm()) return Json{{"p", spec.as_pnorm().p}};
  const auto& c = spec.as_composite();
  return Json{{"composite",
               {{"left", to_json(*c.left)},
                {"right", to_json(*c.right)},
                {"lambda", c.lambda},
                {"split", c.split}}}};
}

NormSpec norm_from_json(const Json& j) {
  if (j.is_number()) return NormSpec::pnorm(j.get<double>());
  if (!j.is_object()) throw std::invalid_argument("norm must be a number or an object");
  if (j.contains("p")) return NormSpec::pnorm(j.at("p").get<double>());
  if (j.contains("composite")) {
    const Json& c = j.at("composite");
    return NormSpec::composite(norm_from_json(c.at("left")),
                               norm_from_json(c.at("right")),
                               c.at("lambda").get<double>(),
                               c.at("split").get<Index>());
  }
  throw std::invalid_argument("norm object needs 'p' or 'composite'");
}

Json to_json(const ExperimentConfig& c) {
  Json j{{"problem", c.problem},
         {"dim", c.dim},
         {"mode", to_string(c.mode)},
         {"T", c.T},
         {"seed", c.seed}};
  if (c.norm) j["norm"] = to_json(*c.norm);
  if (c.alpha) j["alpha"] = *c.alpha;
  if (c.B) j["B"] = *c.B;
  if (c.l1_s) j["l1_s"] = *c.l1_s;
  if (!c.out.empty()) j["out"] = c.out;
  return j;
}

ExperimentConfig config_from_json(const Json& j, ExperimentConfig c) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const char* known[] = {"problem", "dim", "norm", "mode", "T", "alpha",
                                "B", "seed", "l1_s", "out"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  if (j.contains("problem")) c.problem = j.at("problem").get<std::string>();
  if (j.contains("dim")) c.dim = j.at("dim").get<Index>();
  if (j.contains("norm")) c.norm = norm_from_json(j.at("norm"));
  if (j.contains("mode")) c.mode = parse_mode(j.at("mode").get<std::string>());
  if (j.contains("T")) c.T = j.at("T").get<int>();
  if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
  if (j.contains("B")) c.B = j.at("B").get<double>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("l1_s")) c.l1_s = j.at("l1_s").get<double>();
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  return c;
}

PreparedExperiment prepare(const ExperimentConfig& c) {
  if (c.T < 0) throw std::invalid_argument("T must be >= 0");
  CatalogEntry entry = make_problem(c.problem, c.dim, c.seed);
  NormSpec norm = c.norm ? *c.norm : entry.problem.norm;
  if (c.l1_s) {
    L1Reduction red = l1_reduction(entry.problem.dim, *c.l1_s, entry.problem.kappa);
    norm = red.geometry.norm();
    entry.problem.L *= red.inflation;
  }
  entry.problem.norm = norm;
  Geometry geom(norm);
  const double q = geom.q();
  const double kappa = entry.problem.kappa;
  if (c.mode == Mode::Smooth && !(q == 2.0 && kappa == 2.0)) {
    throw std::invalid_argument("smooth mode needs q = kappa = 2, got q = " +
                                std::to_string(q) + ", kappa = " + std::to_string(kappa));
  }
  if (c.mode == Mode::General && !(kappa > 1.0 && kappa < q)) {
    throw std::invalid_argument("general mode needs 1 < kappa < q, got q = " +
                                std::to_string(q) + ", kappa = " + std::to_string(kappa));
  }
  SolverOptions opts;
  opts.mode = c.mode;
  opts.T = c.T;
  opts.alpha = c.alpha;
  opts.B = c.B;
  return {std::move(entry), std::move(geom), opts};
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
  PreparedExperiment prep = prepare(c);
  const auto t0 = std::chrono::steady_clock::now();
  RunResult run = starmd::run(prep.entry.problem, prep.geometry,
                              prep.entry.start, prep.options);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!c.out.empty()) write_trace_csv(c.out, run.rows);
  return {std::move(prep.entry.problem), std::move(run), secs};
}

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

void put(std::ostream& out, const std::optional<double>& v) {
  if (v) put(out, *v);
}

}  // namespace

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << kTraceHeader << '\n';
  for (const auto& r : rows) {
    out << r.t << ',';
    put(out, r.lambda);
    out << ',' << r.probes << ',' << r.value_calls << ',' << r.grad_calls << ',';
    put(out, r.gap);
    out << ',';
    put(out, r.R);
    out << ',';
    put(out, r.C_t);
    out << ',';
    put(out, r.eps_t);
    out << ',';
    put(out, r.eta_t);
    out << ',';
    put(out, r.alpha_t);
    out << '\n';
  }
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_trace_csv(f, rows);
  if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

GapSeries read_gap_series(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty trace");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
  }
  const auto t_col = std::find(cols.begin(), cols.end(), "t") - cols.begin();
  const auto g_col = std::find(cols.begin(), cols.end(), "gap") - cols.begin();
  if (t_col == std::ssize(cols) || g_col == std::ssize(cols)) {
    throw std::invalid_argument("trace header lacks 't' or 'gap'");
  }
  GapSeries s;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) f.push_back(c);
    if (line.back() == ',') f.emplace_back();
    if (std::ssize(f) != std::ssize(cols)) {
      throw std::invalid_argument("trace line " + std::to_string(lineno) +
                                  " has " + std::to_string(f.size()) + " fields");
    }
    if (f[g_col].empty()) continue;
    s.t.push_back(std::stod(f[t_col]));
    s.gap.push_back(std::stod(f[g_col]));
  }
  return s;
}

GapSeries gap_series(const std::vector<TraceRow>& rows) {
  GapSeries s;
  for (const auto& r : rows) {
    if (!r.gap) continue;
    s.t.push_back(r.t);
    s.gap.push_back(*r.gap);
  }
  return s;
}

RateFit fit_rate(const GapSeries& s, std::optional<double> horizon) {
  if (s.t.size() != s.gap.size()) throw DimensionMismatch("t and gap differ in length");
  if (s.t.size() < 64) {
    throw std::invalid_argument("rate fit needs at least 64 points, got " +
                                std::to_string(s.t.size()));
  }
  const double H = horizon ? *horizon : *std::max_element(s.t.begin(), s.t.end());
  RateFit fit;
  fit.t_lo = H / 2.0;
  fit.t_hi = H;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < s.t.size(); ++i) {
    if (s.t[i] < fit.t_lo || s.t[i] > fit.t_hi) continue;
    double g = s.gap[i];
    if (!(g > 0.0)) {
      g = 1e-300;
      ++fit.clamped;
    }
    xs.push_back(std::log(s.t[i]));
    ys.push_back(std::log(g));
  }
  const std::size_t n = xs.size();
  if (n < 2) throw std::invalid_argument("rate fit window holds fewer than 2 points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= double(n);
  my /= double(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("rate fit window has a single t");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - fit.intercept - fit.slope * xs[i];
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / double(n));
  fit.points = int(n);
  return fit;
}

RateFit fit_rate(const std::vector<TraceRow>& rows, std::optional<double> horizon) {
  return fit_rate(gap_series(rows), horizon);
}

int last_positive_gap(const std::vector<TraceRow>& rows) {
  for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
    if (it->gap && *it->gap > 0.0) return it->t;
  }
  return 0;
}

L1Reduction l1_reduction(Index d, double s, double kappa) {
  if (d < 1) throw std::invalid_argument("l1 reduction needs d >= 1");
  if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("l1 reduction needs s > 0");
  if (!(kappa > 1.0 && kappa <= 2.0)) throw std::invalid_argument("kappa must lie in (1, 2]");
  return {Geometry(NormSpec::pnorm(1.0 + s)),
          std::pow(double(d), kappa * s / (s + 1.0))};
}

RunResult baseline_mirror_descent(const Problem& problem, const Geometry& geom,
                                  VectorRef x1, int T, std::optional<double> eta) {
  if (T < 0) throw std::invalid_argument("T must be >= 0");
  if (x1.size() != problem.dim) throw DimensionMismatch("start point dimension differs from problem");
  require_finite(x1, "start point");
  const double step = eta ? *eta : geom.mu() / problem.L;
  if (!(step > 0.0)) throw std::invalid_argument("step size must be positive");

  Oracle oracle(problem);
  RunResult out;
  out.alpha = step;
  if (problem.f_star) out.initial_gap = oracle.peek_value(x1) - *problem.f_star;
  Vector x = x1;
  for (int t = 1; t <= T; ++t) {
    const Vector g = oracle.gradient(x);
    x = mirror_step(geom, x, g, step);
    TraceRow row;
    row.t = t;
    row.eta_t = step;
    row.value_calls = oracle.counter().value_calls;
    row.grad_calls = oracle.counter().grad_calls;
    if (problem.f_star) row.gap = oracle.peek_value(x) - *problem.f_star;
    if (problem.minimizer) row.R = norm(geom.norm(), x - *problem.minimizer);
    out.rows.push_back(row);
  }
  out.x = x;
  out.x_ag = x;
  out.calls = oracle.counter();
  out.diagnostic_calls = oracle.diagnostic_calls();
  return out;
}

Json summarize(const RunResult& run) {
  int max_over = std::numeric_limits<int>::min();
  int max_probes = 0;
  bool telescope = true;
  for (const auto& r : run.rows) {
    max_over = std::max(max_over, r.probes - r.probe_bound);
    max_probes = std::max(max_probes, r.probes);
    if (r.telescope_ok && !*r.telescope_ok) telescope = false;
  }
  Json j{{"mode", to_string(run.mode)},
         {"alpha", run.alpha},
         {"T", run.rows.size()},
         {"value_calls", run.calls.value_calls},
         {"grad_calls", run.calls.grad_calls},
         {"max_probes", max_probes},
         {"telescoping_ok", telescope}};
  if (!run.rows.empty()) j["max_probe_excess"] = max_over;
  if (run.initial_gap) j["initial_gap"] = *run.initial_gap;
  if (!run.rows.empty() && run.rows.back().gap) j["final_gap"] = *run.rows.back().gap;
  return j;
}

namespace {

Json to_json(const PiecewiseDerivative& g) {
  if (g.knots().empty()) return nullptr;
  return Json{{"knots", g.knots()},
              {"derivatives", g.derivs()},
              {"value_at_first", g.value_at_first()}};
}

}  // namespace

Json to_json(const GameReport& game) {
  Json queries = Json::array();
  for (const auto& q : game.state.queries) {
    queries.push_back({{"lambda", q.lambda}, {"g", q.g}, {"g_prime", q.g_prime}, {"live", q.live}});
  }
  const auto& v = game.verdict;
  return Json{{"C", game.C},
              {"eps", game.eps},
              {"Lstar", game.Lstar},
              {"strategy", to_string(game.strategy)},
              {"N", game.N},
              {"query_budget", game.query_budget},
              {"interval", {game.state.a, game.state.b}},
              {"phi", game.state.phi_history},
              {"phi_growth_ok", game.phi_growth_ok},
              {"queries", queries},
              {"constructed", game.constructed},
              {"g1", to_json(game.g1)},
              {"g2", to_json(game.g2)},
              {"verdict",
               {{"pass", v.pass},
                {"interpolates", v.interpolates},
                {"smooth", v.smooth},
                {"g1_fails_left", v.g1_fails_left},
                {"g2_fails_right", v.g2_fails_right},
                {"disjoint", v.disjoint},
                {"max_interp_error", v.max_interp_error},
                {"max_slope", v.max_slope},
                {"g1_left_min", v.g1_left_min},
                {"g2_right_min", v.g2_right_min},
                {"detail", v.detail}}}};
}

}  // namespace starmd
