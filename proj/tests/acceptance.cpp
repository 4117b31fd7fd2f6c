// Acceptance gate. `acceptance N` checks one criterion, `acceptance` all of them.
// Prints one PASS/FAIL line per criterion; exit status 1 if any failed.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "rkhawkes/evaluate.hpp"
#include "rkhawkes/kernel_math.hpp"
#include "rkhawkes/objective.hpp"
#include "rkhawkes/util.hpp"

using namespace rkhawkes;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(4);
  s << x;
  return s.str();
}

unsigned pool() { return std::max(1u, std::thread::hardware_concurrency()); }

double rel_err(double computed, double reference) {
  if (computed == reference) return 0.0;
  return std::abs(computed - reference) / std::abs(reference);
}

// 1. Closed-form integrals against adaptive quadrature.
Outcome closed_forms() {
  rkhawkes::Rng rng(1001);
  double worst = 0.0;
  int failures = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const double gamma = std::array{1.0, 10.0, 100.0}[rng.below(3)];
    const double A = rng.uniform() < 0.5 ? 1.0 : 5.0;
    const double T = 5.0 + 10.0 * rng.uniform();
    const auto ev = oracle::random_events(rng, 1, T, 10);
    const auto t = ev.times(0);
    const KernelConfig cfg{gamma, A};
    const double x = T * rng.uniform(), lag = A * rng.uniform();
    const double e1 = rel_err(int_s(x, T, t, cfg), oracle::int_s_quad(x, T, t, gamma, A));
    const double e2 = rel_err(double_int_s(T, t, cfg), oracle::double_int_s_quad(T, t, gamma, A));
    const double e3 = rel_err(r_ell_at(lag, T, t, cfg), oracle::r_quad(lag, T, t, gamma, A));
    const double e = std::max({e1, e2, e3});
    worst = std::max(worst, e);
    if (!(e <= 1e-6)) ++failures;
  }
  return {failures == 0, "200 instances, max relative error " + fmt(worst) + " (tol 1e-6)"};
}

struct Instance {
  std::shared_ptr<const EventData> events;
  KernelConfig cfg;
  std::size_t m;
  PrecomputedMatrices mats;
  RkhsParams theta;
};

Instance random_instance(rkhawkes::Rng& rng) {
  Instance in;
  const std::size_t d = 1 + rng.below(3);
  in.events = std::make_shared<const EventData>(oracle::random_events(rng, d, 4.0 + 8.0 * rng.uniform(), 12));
  in.cfg = KernelConfig{std::array{1.0, 10.0, 100.0}[rng.below(3)], rng.uniform() < 0.5 ? 1.0 : 3.0};
  in.m = 2 + rng.below(49);
  in.mats = build_matrices(*in.events, in.cfg, in.m);
  in.theta = oracle::random_params(rng, in.events, in.cfg);
  return in;
}

// 2. Matrix-form objective against the direct double sum.
Outcome objective_equivalence() {
  rkhawkes::Rng rng(1002);
  double worst = 0.0;
  int failures = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const Instance in = random_instance(rng);
    const double eta = std::pow(10.0, 2.0 * rng.uniform() - 1.0);
    const double omega = std::array{1.0, 10.0, 100.0}[rng.below(3)];
    for (auto c : {Criterion::mle, Criterion::ls}) {
      const double direct = oracle::objective_direct(in.theta, in.m, eta, omega, c == Criterion::mle);
      const double matrix = objective_value(in.theta, {LinkSpec{omega, c}, eta, &in.mats, 0.0});
      const double e = rel_err(matrix, direct);
      worst = std::max(worst, e);
      if (!(e <= 1e-8)) ++failures;
    }
  }
  return {failures == 0, "100 instances x 2 criteria, max relative error " + fmt(worst) + " (tol 1e-8)"};
}

// 3. Analytic gradient against central differences.
Outcome gradient_check() {
  rkhawkes::Rng rng(1003);
  double worst = 0.0;
  int failures = 0;
  for (auto c : {Criterion::mle, Criterion::ls})
    for (int rep = 0; rep < 10; ++rep) {
      const Instance in = random_instance(rng);
      const ObjectiveConfig cfg{LinkSpec{100.0, c}, 0.5, &in.mats, 0.0};
      Eigen::VectorXd g_all, fd_all;
      for (std::size_t j = 0; j < in.events->dims(); ++j) {
        const DimensionObjective f(cfg, j);
        const Eigen::VectorXd x = f.pack(in.theta);
        Eigen::VectorXd g;
        f.value_and_gradient(x, g);
        Eigen::VectorXd fd(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
          Eigen::VectorXd xp = x, xm = x;
          xp[i] += h;
          xm[i] -= h;
          fd[i] = (f.value(xp) - f.value(xm)) / (2 * h);
        }
        g_all.conservativeResize(g_all.size() + g.size());
        g_all.tail(g.size()) = g;
        fd_all.conservativeResize(fd_all.size() + fd.size());
        fd_all.tail(fd.size()) = fd;
      }
      const double e = (g_all - fd_all).norm() / std::max(fd_all.norm(), 1e-300);
      worst = std::max(worst, e);
      if (!(e <= 1e-5)) ++failures;
    }
  return {failures == 0, "10 parameter draws per criterion, max relative error " + fmt(worst) + " (tol 1e-5)"};
}

// 4. 0 <= softplus - relu <= log 2 / omega, equality at 0.
Outcome softplus_bound() {
  bool ok = true;
  std::size_t points = 0;
  for (double w : {1.0, 10.0, 100.0}) {
    const double bound = std::log(2.0) / w;
    const long n = 2'000'000;
    for (long k = 0; k <= n; ++k) {
      const double x = -50.0 + 100.0 * static_cast<double>(k) / static_cast<double>(n);
      const double gap = softplus(x, w) - std::max(0.0, x);
      if (!(gap >= 0.0 && gap <= bound)) ok = false;
      ++points;
    }
    if (!(softplus(0.0, w) == bound)) ok = false;
  }
  return {ok, std::to_string(points) + " grid points on [-50, 50], omega in {1, 10, 100}"};
}

// 5. Simulator: Poisson counts and time-rescaling KS on the 3-d benchmark.
Outcome simulator() {
  const auto poisson = builtin_kernels("poisson");
  double total = 0.0;
  for (std::uint64_t s = 0; s < 20; ++s)
    total += static_cast<double>(simulate_thinning(poisson, SimulationOptions{1000.0, -1.0, s}).total_count());
  const double expected = 2.0 * 1000.0 * 20;
  const double z = (total - expected) / std::sqrt(expected);
  const bool counts_ok = std::abs(z) <= 2.576;

  const auto truth = builtin_kernels("paper3d");
  int ks_pass = 0;
  std::vector<double> pvals(10);
  parallel_for(10, pool(), [&](std::size_t s) {
    const EventData ev = simulate_thinning(truth, SimulationOptions{2000.0, -1.0, 500 + s});
    std::vector<double> pooled;
    for (const auto& r : time_rescaling_residuals(ev, truth)) pooled.insert(pooled.end(), r.begin(), r.end());
    pvals[s] = ks_test_exponential(pooled).p_value;
  });
  std::string ps;
  for (double p : pvals) {
    if (p > 0.01) ++ks_pass;
    ps += (ps.empty() ? "" : " ") + fmt(p);
  }
  return {counts_ok && ks_pass >= 8, "pooled Poisson z = " + fmt(z) + " (|z| <= 2.576); KS p-values [" + ps +
                                         "], " + std::to_string(ks_pass) + "/10 above 0.01 (need 8)"};
}

// 6. (omega, M) sweep on the 3-d benchmark at T = 500.
Outcome approximation_trend() {
  SweepOptions o;
  o.omegas = {1.0, 100.0};
  o.ms = {100, 1000};
  o.horizon = 500.0;
  o.replications = 3;
  o.seed = 0;
  const auto rows = approximation_sweep(builtin_kernels("paper3d"), o, pool());
  std::map<std::pair<double, std::size_t>, std::vector<double>> cells;
  for (const auto& r : rows) cells[{r.omega, r.m}].push_back(r.l1_min);
  auto mean = [&](double w, std::size_t m) { return mean_ci(cells.at({w, m})).first; };
  const double a = mean(1, 100), b = mean(1, 1000), c = mean(100, 100), d = mean(100, 1000);
  const bool corner = d < a;
  const bool mono = b <= a && d <= c && c <= a && d <= b;
  return {corner && mono, "seed-mean min L1: (1,100) " + fmt(a) + ", (1,1000) " + fmt(b) + ", (100,100) " + fmt(c) +
                              ", (100,1000) " + fmt(d)};
}

BenchResult run_bench(std::vector<Method> methods, std::vector<double> horizons) {
  BenchOptions o;
  o.methods = std::move(methods);
  o.horizons = std::move(horizons);
  o.replications = 3;
  o.seed = 0;
  return horizon_study(builtin_kernels("paper3d"), o, pool());
}

const BenchStat& stat(const BenchResult& r, Method m, double T) {
  for (const auto& s : r.stats)
    if (s.method == m && s.horizon == T) return s;
  throw std::logic_error("missing stat");
}

// 7. Method ordering at T = 1000.
Outcome benchmark_ordering() {
  const BenchResult r = run_bench(all_methods(), {1000.0});
  const BenchStat& k = stat(r, Method::rkhs, 1000.0);
  bool l1_ok = k.n == 3, ll_ok = k.n == 3;
  std::string detail;
  for (Method m : all_methods()) {
    const BenchStat& s = stat(r, m, 1000.0);
    detail += to_string(m) + " L1 " + fmt(s.l1_mean) + " LL " + fmt(s.test_mean) + " (n=" + std::to_string(s.n) + "); ";
    if (m == Method::rkhs) continue;
    if (!(k.l1_mean < s.l1_mean)) l1_ok = false;
    if (!(k.test_mean > s.test_mean)) ll_ok = false;
  }
  std::size_t floored = 0;
  for (const auto& row : r.rows)
    if (row.method == Method::rkhs) floored += row.test_floored;
  detail += "rkhs L1 lowest: " + std::string(l1_ok ? "yes" : "no") + ", rkhs test LL highest: " +
            (ll_ok ? "yes" : "no") + ", rkhs floored test events: " + std::to_string(floored);
  return {l1_ok && ll_ok, detail};
}

// 8. rkhs L1 decreases from T = 250 to T = 2000.
Outcome consistency_trend() {
  const BenchResult r = run_bench({Method::rkhs}, {250.0, 2000.0});
  const BenchStat& a = stat(r, Method::rkhs, 250.0);
  const BenchStat& b = stat(r, Method::rkhs, 2000.0);
  return {a.n == 3 && b.n == 3 && b.l1_mean < a.l1_mean,
          "rkhs seed-mean L1 at T=250 " + fmt(a.l1_mean) + ", at T=2000 " + fmt(b.l1_mean)};
}

// 9. CLI determinism, including --jobs 4.
int cli(const std::string& args) {
  const std::string cmd = std::string(RKHAWKES_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::map<std::string, std::string> dir_contents(const fs::path& dir, bool with_manifest) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto name = fs::relative(e.path(), dir).string();
    if (!with_manifest && e.path().filename() == "manifest.json") continue;
    out[name] = read_text_file(e.path());
  }
  return out;
}

Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "rkhawkes_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string r = root.string();
  const std::string grid = " --gammas 1,10 --etas 1,10 --m 300 --max-iters 100";
  struct Case {
    std::string name, args;
    bool parallel;
  };
  // Data used by fit/score/eval-l1 first.
  if (cli("simulate --model paper3d --horizon 150 --seed 11 --out " + r + "/data") != 0)
    return {false, "simulate failed"};
  const std::string data = r + "/data";
  const std::vector<Case> cases = {
      {"simulate", "simulate --model paper3d --horizon 150 --seed 11", false},
      {"fit", "fit --events " + data + "/train.csv --val " + data + "/val.csv --test " + data +
                  "/test.csv --horizon 150 --truth paper3d" + grid,
       true},
      {"score", "score --model " + r + "/fit_a/model.json --events " + data + "/test.csv --horizon 150", false},
      {"eval-l1", "eval-l1 --model " + r + "/fit_a/model.json --truth paper3d", false},
      {"sweep", "sweep --model paper3d --horizon 100 --omegas 10,100 --ms 100,300 --replications 2 --seed 5 --gammas 1,10 "
                "--etas 1,10 --max-iters 100",
       true},
      {"bench", "bench --model paper3d --horizons 60,120 --methods rkhs,exponential,gaussian_basis,bernstein "
                "--replications 2 --seed 5 --gammas 1,10 --etas 1,10 --m 300 --max-iters 100",
       true},
  };
  std::string detail;
  bool ok = true;
  for (const auto& c : cases) {
    // Same invocation twice into the same directory; the manifest echoes --out and --jobs.
    const std::string a = r + "/" + c.name + "_a", first = r + "/" + c.name + "_first";
    const int ca = cli(c.args + " --out " + a);
    const auto ref = ca == 0 ? dir_contents(a, true) : std::map<std::string, std::string>{};
    fs::rename(a, first);
    const int cb = cli(c.args + " --out " + a);
    bool same = ca == 0 && cb == 0 && !ref.empty() && dir_contents(a, true) == ref;
    if (c.parallel) {
      fs::remove_all(a);
      same = same && cli(c.args + " --jobs 4 --out " + a) == 0 && dir_contents(a, false) == dir_contents(first, false);
    }
    ok = ok && same;
    detail += c.name + (same ? " ok" : " DIFF") + (c.parallel ? " (incl. --jobs 4)" : "") + "; ";
  }
  fs::remove_all(root);
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form integrals vs quadrature", closed_forms},
      {"matrix objective vs direct sum", objective_equivalence},
      {"gradient vs finite differences", gradient_check},
      {"softplus approximation bound", softplus_bound},
      {"simulator counts and time rescaling", simulator},
      {"approximation sweep monotonicity", approximation_trend},
      {"benchmark ordering at T=1000", benchmark_ordering},
      {"consistency trend T=250 -> T=2000", consistency_trend},
      {"CLI determinism", cli_determinism},
  };
  std::vector<std::size_t> which;
  if (argc > 1) {
    const int n = std::atoi(argv[1]);
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::cerr << "usage: acceptance [1-" << criteria.size() << "]\n";
      return 2;
    }
    which.push_back(static_cast<std::size_t>(n - 1));
  } else {
    for (std::size_t i = 0; i < criteria.size(); ++i) which.push_back(i);
  }
  bool all = true;
  for (std::size_t i : which) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << "criterion " << i + 1 << " " << (o.pass ? "PASS" : "FAIL") << " [" << criteria[i].first << "] "
              << o.detail << " (" << fmt(secs) << " s)" << std::endl;
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
