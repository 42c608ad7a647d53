#include "starmd/acceptance.hpp"

#include "starmd/errors.hpp"
#include "starmd/geometry.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>
#include <sstream>

namespace starmd {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Rand {
  std::mt19937_64 gen;
  explicit Rand(std::uint64_t seed) : gen(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  // Gaussian direction with a log-uniform scale in [1e-3, 1e3].
  Vector vec(Index d) {
    std::normal_distribution<double> n;
    Vector v(d);
    for (Index i = 0; i < d; ++i) v[i] = n(gen);
    return v * std::pow(10.0, uniform(-3.0, 3.0));
  }
  Vector unit_vec(Index d) {
    std::normal_distribution<double> n;
    Vector v(d);
    for (Index i = 0; i < d; ++i) v[i] = n(gen);
    return v / v.norm() * uniform(0.1, 2.0);
  }
};

struct NamedNorm {
  std::string name;
  NormSpec spec;
  Index dim;
};

std::vector<NamedNorm> test_norms() {
  std::vector<NamedNorm> out;
  for (double p : {1.5, 2.0, 3.0, 7.0}) out.push_back({"l" + fmt("%g", p), NormSpec::pnorm(p), 12});
  out.push_back({"l2 o l1.5", NormSpec::composite(NormSpec::pnorm(2.0), NormSpec::pnorm(1.5), 0.3, 5), 12});
  return out;
}

class Battery {
 public:
  explicit Battery(const AcceptanceOptions& o) : opt_(o) {}

  CriterionResult run(int id) {
    CriterionResult r;
    r.id = id;
    run_seconds_ = 0.0;
    const auto t0 = Clock::now();
    try {
      switch (id) {
        case 1: geometry_identities(r); break;
        case 2: mirror_prox(r); break;
        case 3: smooth_rate(r); break;
        case 4: weak_rate(r); break;
        case 5: star_instance(r); break;
        case 6: search_complexity(r); break;
        case 7: telescoping(r); break;
        case 8: iterate_growth(r); break;
        case 9: adversary(r); break;
        case 10: inequalities(r); break;
        case 11: l1(r); break;
        default: throw std::invalid_argument("no criterion " + std::to_string(id));
      }
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("error: ") + e.what();
    }
    // A run shared with an earlier criterion still counts toward this one.
    r.seconds = std::max(since(t0), run_seconds_);
    if (r.time_limit > 0.0 && r.seconds >= r.time_limit) {
      r.pass = false;
      r.detail += " over time limit";
    }
    r.metrics["seconds"] = r.seconds;
    return r;
  }

 private:
  struct Cached {
    ExperimentResult result;
    double seconds;
  };

  const Cached& experiment(const std::string& key) {
    auto it = runs_.find(key);
    if (it != runs_.end()) {
      run_seconds_ = std::max(run_seconds_, it->second.seconds);
      return it->second;
    }
    ExperimentConfig c;
    c.T = opt_.T;
    c.seed = opt_.seed;
    if (key == "quad") {
      c.problem = "quad";
      c.dim = 50;
      c.mode = Mode::Smooth;
    } else if (key == "weak") {
      c.problem = "pnormpow:p=1.5,k=1.5,cond=1e10";
      c.dim = 50;
      c.mode = Mode::General;
    } else if (key == "radial") {
      c.problem = "radialstar:a=0.5,k=3";
      c.dim = 2;
      c.mode = Mode::Smooth;
    } else {
      c.problem = "pnormpow:p=1.5,k=1.5,cond=1e10";
      c.dim = 100;
      c.mode = Mode::General;
      c.l1_s = 0.5;
    }
    const auto t0 = Clock::now();
    ExperimentResult res = run_experiment(c);
    const double secs = since(t0);
    run_seconds_ = std::max(run_seconds_, secs);
    return runs_.emplace(key, Cached{std::move(res), secs}).first->second;
  }

  void geometry_identities(CriterionResult& r) {
    r.name = "geometry identities";
    r.time_limit = 1.0;
    Rand rng(opt_.seed);
    double worst = 0.0;
    for (const auto& n : test_norms()) {
      for (int i = 0; i < 1000; ++i) {
        const Vector x = rng.vec(n.dim);
        const double nx = norm(n.spec, x);
        const Vector phi = grad_norm_power(n.spec, 2.0, x);
        worst = std::max(worst, std::abs(phi.dot(x) - nx * nx) / (nx * nx));
        worst = std::max(worst, std::abs(dual_norm(n.spec, phi) - nx) / nx);
        for (double s : {1.5, 3.0}) {
          const Vector ps = grad_norm_power(n.spec, s, x);
          const double ns = std::pow(nx, s);
          worst = std::max(worst, std::abs(ps.dot(x) - ns) / ns);
          const double dn = dual_norm(n.spec, ps);
          for (double a : {1.0, 2.0}) {
            const double want = std::pow(nx, a * (s - 1.0));
            worst = std::max(worst, std::abs(std::pow(dn, a) - want) / want);
          }
        }
      }
    }
    r.pass = worst <= 1e-9;
    r.metrics["worst_relative"] = worst;
    r.detail = "worst relative error " + fmt("%.2e", worst) + " (<= 1e-9)";
  }

  void mirror_prox(CriterionResult& r) {
    r.name = "mirror and prox correctness";
    r.time_limit = 5.0;
    Rand rng(opt_.seed + 1);
    double round_trip = 0.0, prox = 0.0, mirror = 0.0;
    for (const auto& n : test_norms()) {
      const Geometry geom(n.spec);
      for (int i = 0; i < 100; ++i) {
        const Vector x = rng.unit_vec(n.dim);
        const Vector back = geom.grad_psi_inverse(geom.grad_psi(x));
        round_trip = std::max(round_trip, norm(n.spec, back - x) / norm(n.spec, x));

        const Vector g = rng.unit_vec(n.dim);
        const double alpha = rng.uniform(0.01, 1.0);
        const Vector u = prox_step(geom, x, g, alpha);
        const Vector res = alpha * g + geom.mu() * grad_norm_power(n.spec, geom.q(), u - x);
        prox = std::max(prox, dual_norm(n.spec, res) / (alpha * dual_norm(n.spec, g)));

        const Vector xn = mirror_step(geom, x, g, alpha);
        const Vector mres = geom.grad_psi(xn) - geom.grad_psi(x) + alpha * g;
        mirror = std::max(mirror, dual_norm(n.spec, mres) / (alpha * dual_norm(n.spec, g)));
      }
    }
    r.pass = round_trip <= 1e-8 && prox <= 1e-8 && mirror <= 1e-8;
    r.metrics["round_trip"] = round_trip;
    r.metrics["prox_stationarity"] = prox;
    r.metrics["mirror_stationarity"] = mirror;
    r.detail = "round trip " + fmt("%.2e", round_trip) + ", prox " + fmt("%.2e", prox) +
               ", mirror " + fmt("%.2e", mirror) + " (<= 1e-8)";
  }

  void smooth_rate(CriterionResult& r) {
    r.name = "smooth Euclidean rate";
    r.time_limit = 30.0;
    const auto& c = experiment("quad");
    const RateFit fit = fit_rate(c.result.run.rows);
    r.pass = fit.slope <= -1.8;
    r.metrics["slope"] = fit.slope;
    r.metrics["run_seconds"] = c.seconds;
    r.detail = "slope " + fmt("%.3f", fit.slope) + " (<= -1.8), run " + fmt("%.2f s", c.seconds);
  }

  void weak_rate(CriterionResult& r) {
    r.name = "weakly smooth l1.5 rate";
    r.time_limit = 60.0;
    const auto& c = experiment("weak");
    const RateFit fit = fit_rate(c.result.run.rows);
    r.pass = fit.slope >= -1.6 && fit.slope <= -1.0;
    r.metrics["slope"] = fit.slope;
    r.metrics["theory"] = -1.25;
    r.detail = "slope " + fmt("%.3f", fit.slope) + " in [-1.6, -1.0], theory -1.25, run " +
               fmt("%.2f s", c.seconds);
  }

  void star_instance(CriterionResult& r) {
    r.name = "star-convex radial instance";
    r.time_limit = 60.0;
    const auto& c = experiment("radial");
    const Problem& p = c.result.problem;
    const auto star = certify_star_convexity(p, p.tau, 10000, 1.0, opt_.seed);
    const auto& rows = c.result.run.rows;
    const double g0 = *c.result.run.initial_gap;
    const double gT = *rows.back().gap;
    const int horizon = last_positive_gap(rows);
    bool ok = star.pass && p.tau <= 2.0 && gT <= 1e-6 * g0;
    double slope = 0.0;
    if (horizon >= 64) {
      slope = fit_rate(rows, horizon).slope;
      ok = ok && slope <= -1.5;
    } else {
      ok = false;
    }
    r.pass = ok;
    r.metrics["tau"] = p.tau;
    r.metrics["L"] = p.L;
    r.metrics["gap_ratio"] = gT / g0;
    r.metrics["fit_horizon"] = horizon;
    r.metrics["slope"] = slope;
    r.detail = "tau " + fmt("%g", p.tau) + " certified, gap ratio " + fmt("%.1e", gT / g0) +
               ", slope " + fmt("%.3f", slope) + " over [" + std::to_string(horizon / 2) + ", " +
               std::to_string(horizon) + "], run " + fmt("%.2f s", c.seconds);
  }

  void search_complexity(CriterionResult& r) {
    r.name = "binary search complexity";
    int worst_excess = std::numeric_limits<int>::min();
    double worst_calls = 0.0;
    for (const char* key : {"quad", "weak", "radial", "l1"}) {
      const RunResult& run = experiment(key).result.run;
      for (const auto& row : run.rows) worst_excess = std::max(worst_excess, row.probes - row.probe_bound);
      const double budget = 4.0 * double(run.rows.size()) * run.rows.back().probe_bound;
      worst_calls = std::max(worst_calls, double(run.calls.total()) / budget);
    }
    r.pass = worst_excess <= 2 && worst_calls <= 1.0;
    r.metrics["max_probe_excess"] = worst_excess;
    r.metrics["calls_over_budget"] = worst_calls;
    r.detail = "max probes - bound = " + std::to_string(worst_excess) +
               " (<= 2), calls / (4 T bound) = " + fmt("%.3f", worst_calls) + " (<= 1)";
  }

  void telescoping(CriterionResult& r) {
    r.name = "telescoping inequality";
    std::uint64_t checked = 0, failed = 0;
    for (const char* key : {"quad", "weak", "radial"}) {
      for (const auto& row : experiment(key).result.run.rows) {
        if (!row.telescope_ok) continue;
        ++checked;
        if (!*row.telescope_ok) ++failed;
      }
    }
    r.pass = checked > 0 && failed == 0;
    r.metrics["checked"] = checked;
    r.metrics["failed"] = failed;
    r.detail = std::to_string(failed) + " of " + std::to_string(checked) + " iterations violate";
  }

  void iterate_growth(CriterionResult& r) {
    r.name = "iterate growth";
    const auto& c = experiment("weak");
    const Problem& p = c.result.problem;
    const double q = Geometry(p.norm).q();
    const RadiusCheck rc = radius_bound_check(c.result.run.rows, p.L, q, p.kappa);
    r.pass = rc.pass;
    r.metrics["worst_ratio"] = rc.worst_ratio;
    r.metrics["exponent"] = rc.exponent;
    r.detail = "worst R_t / bound " + fmt("%.3g", rc.worst_ratio) + ", exponent " +
               fmt("%.3g", rc.exponent);
  }

  void adversary(CriterionResult& r) {
    r.name = "adversary lower bound";
    r.time_limit = 1.0;
    const GameReport game = run_adversary_game(1.0, 1e-3, 1e6, QueryStrategy::Bisection, 8);
    r.pass = game.N < game.query_budget && game.phi_growth_ok && game.verdict.pass;
    r.metrics["query_budget"] = game.query_budget;
    r.metrics["phi_final"] = game.state.phi_history.back();
    r.detail = "N = 8 < budget " + fmt("%.2f", game.query_budget) + ", Phi " +
               fmt("%.2e", game.state.phi_history.front()) + " -> " +
               fmt("%.2e", game.state.phi_history.back()) + ", verifier " + game.verdict.detail;
  }

  void inequalities(CriterionResult& r) {
    r.name = "inequality suite";
    r.time_limit = 5.0;
    Rand rng(opt_.seed + 2);
    constexpr int kSamples = 10000;

    double young = -1e300;
    for (int i = 0; i < kSamples; ++i) {
      const double p = rng.uniform(1.05, 6.0);
      const double q = conjugate_exponent(p);
      const double a = rng.uniform(0.0, 3.0), b = rng.uniform(0.0, 3.0);
      young = std::max(young, a * b - (std::pow(a, p) / p + std::pow(b, q) / q));
    }

    double split = -1e300;
    const std::pair<double, double> qk[] = {{2.0, 1.5}, {3.0, 2.0}, {7.0, 1.5}, {2.0, 1.1}};
    for (int i = 0; i < kSamples; ++i) {
      const auto [q, kappa] = qk[i % 4];
      const ScheduleConstants sc = schedule_constants(q, kappa);
      const Vector x = rng.unit_vec(6), y = rng.unit_vec(6);
      const double d = (x - y).norm();
      const double delta = std::pow(10.0, rng.uniform(-6.0, 1.0));
      const double rhs = sc.M / (q * std::pow(delta, sc.r)) * std::pow(d, q) + delta;
      split = std::max(split, std::pow(d, kappa) / kappa - rhs);
    }

    double bregman_radius = -1e300, three_points = 0.0;
    const std::vector<NamedNorm> norms = test_norms();
    for (int i = 0; i < kSamples; ++i) {
      const NamedNorm& n = norms[std::size_t(i) % norms.size()];
      const Geometry geom(n.spec);
      const Vector x = rng.unit_vec(n.dim), y = rng.unit_vec(n.dim), u = rng.unit_vec(n.dim);
      if (n.spec.is_pnorm()) {
        const double m = std::max(std::pow(norm(n.spec, x), geom.q()),
                                  std::pow(norm(n.spec, y), geom.q()));
        bregman_radius = std::max(bregman_radius, geom.bregman(x, y) - 2.0 * m);
      }
      const double lhs = (geom.grad_psi(x) - geom.grad_psi(y)).dot(u - x);
      const double rhs = geom.bregman(u, y) - geom.bregman(u, x) - geom.bregman(x, y);
      three_points = std::max(three_points, std::abs(lhs - rhs));
    }

    const bool ok_young = young <= 1e-12, ok_split = split <= 1e-12;
    const bool ok_h = bregman_radius <= 1e-12, ok_three = three_points <= 1e-10;
    r.pass = ok_young && ok_split && ok_h && ok_three;
    r.metrics["young_excess"] = young;
    r.metrics["split_excess"] = split;
    r.metrics["bregman_radius_excess"] = bregman_radius;
    r.metrics["three_points_error"] = three_points;
    r.detail = "Young " + fmt("%.1e", young) + ", split " + fmt("%.1e", split) +
               ", Bregman radius " + fmt("%.1e", bregman_radius) + ", three points " +
               fmt("%.1e", three_points);
  }

  void l1(CriterionResult& r) {
    r.name = "l1 reduction";
    r.time_limit = 60.0;
    const auto& c = experiment("l1");
    const RateFit fit = fit_rate(c.result.run.rows);
    const L1Reduction red = l1_reduction(100, 0.5, 1.5);
    r.pass = fit.slope <= -1.0;
    r.metrics["slope"] = fit.slope;
    r.metrics["inflation"] = red.inflation;
    r.detail = "inflation " + fmt("%g", red.inflation) + ", slope " + fmt("%.3f", fit.slope) +
               " (<= -1.0), run " + fmt("%.2f s", c.seconds);
  }

  AcceptanceOptions opt_;
  double run_seconds_ = 0.0;
  std::map<std::string, Cached> runs_;
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<int> ids = options.only;
  if (ids.empty()) {
    for (int i = 1; i <= 11; ++i) ids.push_back(i);
  }
  Battery battery(options);
  std::vector<CriterionResult> out;
  for (int id : ids) out.push_back(battery.run(id));
  return out;
}

std::string format_line(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "%s %2d  %-30s", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str());
  return std::string(head) + "  " + r.detail + "  (" + fmt("%.2f", r.seconds) + " s)";
}

Json to_json(const std::vector<CriterionResult>& results) {
  Json arr = Json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    arr.push_back({{"id", r.id},
                   {"name", r.name},
                   {"pass", r.pass},
                   {"seconds", r.seconds},
                   {"time_limit", r.time_limit},
                   {"detail", r.detail},
                   {"metrics", r.metrics}});
  }
  return Json{{"pass", all}, {"criteria", arr}};
}

}  // namespace starmd
