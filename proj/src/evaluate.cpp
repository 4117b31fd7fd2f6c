#include "rkhawkes/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "rkhawkes/errors.hpp"
#include "rkhawkes/precompute.hpp"
#include "rkhawkes/util.hpp"

namespace rkhawkes {

Method parse_method(const std::string& name) {
  if (name == "rkhs") return Method::rkhs;
  if (name == "exponential") return Method::exponential;
  if (name == "gaussian_basis" || name == "gaussian") return Method::gaussian_basis;
  if (name == "bernstein") return Method::bernstein;
  throw ConfigError("unknown method '" + name + "' (expected rkhs, exponential, gaussian_basis or bernstein)");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::rkhs: return "rkhs";
    case Method::exponential: return "exponential";
    case Method::gaussian_basis: return "gaussian_basis";
    case Method::bernstein: return "bernstein";
  }
  return "unknown";
}

std::vector<Method> all_methods() {
  return {Method::rkhs, Method::exponential, Method::gaussian_basis, Method::bernstein};
}

void GridSpec::validate() const {
  if (gammas.empty() || etas.empty()) throw ConfigError("gamma and eta grids must be nonempty");
  for (double g : gammas)
    if (!(g > 0.0) || !std::isfinite(g)) throw ConfigError("gamma values must be > 0");
  for (double e : etas)
    if (!(e > 0.0) || !std::isfinite(e)) throw ConfigError("eta values must be > 0");
  LinkSpec{omega, criterion}.validate();
  if (m == 1) throw ConfigError("grid size M must be >= 2");
  if (!(support > 0.0)) throw ConfigError("support must be > 0");
  if (basis_size < 1) throw ConfigError("basis size must be >= 1");
  if (l1_points < 2) throw ConfigError("L1 grid needs at least 2 points");
}

nlohmann::json grid_spec_to_json(const GridSpec& spec) {
  nlohmann::json j;
  j["gammas"] = spec.gammas;
  j["etas"] = spec.etas;
  j["omega"] = spec.omega;
  j["m"] = spec.m;
  j["criterion"] = to_string(spec.criterion);
  j["support"] = spec.support;
  j["basis_size"] = spec.basis_size;
  j["m_score"] = spec.m_score;
  j["l1_points"] = spec.l1_points;
  j["max_iters"] = spec.optim.max_iters;
  j["grad_tol"] = spec.optim.grad_tol;
  j["f_tol"] = spec.optim.f_tol;
  j["history"] = spec.optim.history;
  return j;
}

namespace {

// Lag tables for scoring fitted rkhs curves; exact evaluation sums thousands
// of Gaussian bumps per lag.
constexpr std::size_t kScoreTablePoints = 2001;

std::size_t score_grid(const EventData& events, std::size_t requested) {
  if (requested) return requested;
  // Step at most 0.01 so narrow fitted bumps are resolved by the Riemann sum.
  const auto fine = static_cast<std::size_t>(std::ceil(events.horizon() * 100.0));
  return std::max(default_score_grid(events), fine);
}

std::shared_ptr<const HawkesModel> scoring_view(const FittedModel& fitted) {
  if (fitted.method == Method::rkhs) return std::make_shared<TabulatedModel>(*fitted.model, kScoreTablePoints);
  return fitted.model;
}

}  // namespace

FittedModel fit_method(Method method, std::shared_ptr<const EventData> train, double gamma, double eta,
                       const GridSpec& spec, const PrecomputedMatrices* matrices) {
  FittedModel out;
  out.method = method;
  out.gamma = gamma;
  out.eta = eta;
  const LinkSpec link{spec.omega, spec.criterion};
  if (method == Method::rkhs) {
    FitOptions opts;
    opts.kernel = KernelConfig{gamma, spec.support};
    opts.link = link;
    opts.eta = eta;
    opts.m = spec.m;
    opts.optim = spec.optim;
    RkhsFit fit = matrices ? fit_rkhs(train, *matrices, opts) : fit_rkhs(train, opts);
    out.json = rkhs_model_to_json(fit.params);
    out.objective = fit.objective;
    out.iterations = fit.diagnostics.iterations;
    out.terminations = fit.diagnostics.terminations;
    out.model = std::make_shared<RkhsModel>(std::move(fit.params));
    return out;
  }
  BasisFitOptions opts;
  opts.kind = method == Method::exponential      ? BasisKind::exponential
              : method == Method::gaussian_basis ? BasisKind::gaussian_basis
                                                 : BasisKind::bernstein;
  opts.u = spec.basis_size;
  opts.gamma = gamma;
  opts.eta = eta;
  opts.support = spec.support;
  opts.link = link;
  opts.m = spec.m;
  opts.optim = spec.optim;
  BasisFit fit = fit_basis(*train, opts);
  out.json = basis_model_to_json(fit.model);
  out.objective = fit.objective;
  out.iterations = fit.iterations;
  out.terminations = fit.terminations;
  out.model = std::make_shared<FeatureBasisModel>(std::move(fit.model));
  return out;
}

FittedModel load_fitted_model(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("kind") || !doc["kind"].is_string())
    throw FormatError("model file has no kind");
  const std::string kind = doc["kind"].get<std::string>();
  FittedModel out;
  out.json = json_text;
  if (kind == "rkhs") {
    RkhsParams p = rkhs_model_from_json(json_text);
    out.method = Method::rkhs;
    out.gamma = p.cfg.gamma;
    out.eta = p.eta;
    out.model = std::make_shared<RkhsModel>(std::move(p));
    return out;
  }
  FeatureBasisModel m = basis_model_from_json(json_text);
  out.method = parse_method(kind);
  out.gamma = m.gamma;
  out.eta = m.eta;
  out.model = std::make_shared<FeatureBasisModel>(std::move(m));
  return out;
}

Score score_model(const FittedModel& fitted, const EventData& events, std::size_t m_score) {
  const auto view = scoring_view(fitted);
  const LikelihoodScore s = exact_neg_log_likelihood(*view, events, score_grid(events, m_score));
  return {-s.neg_log_likelihood, s.floored};
}

double l1_error(const HawkesModel& truth, const HawkesModel& fitted, std::size_t j, std::size_t l,
                std::size_t points) {
  if (points < 2) throw ConfigError("L1 grid needs at least 2 points");
  const double A = truth.support();
  if (std::abs(fitted.support() - A) > 1e-12 * std::max(1.0, A))
    throw ConfigError("L1 error needs models with the same support");
  const double h = A / static_cast<double>(points - 1);
  double sum = 0.0;
  for (std::size_t k = 0; k < points; ++k) {
    const double t = k + 1 == points ? A : static_cast<double>(k) * h;
    const double v = std::abs(truth.interaction(j, l, t) - fitted.interaction(j, l, t));
    sum += (k == 0 || k + 1 == points) ? 0.5 * v : v;
  }
  return sum * h;
}

Eigen::MatrixXd l1_error_matrix(const HawkesModel& truth, const HawkesModel& fitted, std::size_t points) {
  const std::size_t d = truth.dims();
  if (fitted.dims() != d) throw ShapeError("models have different dims");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t l = 0; l < d; ++l)
      out(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = l1_error(truth, fitted, j, l, points);
  return out;
}

std::size_t select_best(const std::vector<GridRow>& rows) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const GridRow& r = rows[i];
    if (!r.ok) continue;
    if (!best) {
      best = i;
      continue;
    }
    const GridRow& b = rows[*best];
    if (r.val_loglik != b.val_loglik) {
      if (r.val_loglik > b.val_loglik) best = i;
    } else if (r.eta != b.eta) {
      if (r.eta < b.eta) best = i;
    } else if (r.gamma < b.gamma) {
      best = i;
    }
  }
  if (!best) throw SearchError("every grid cell failed");
  return *best;
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, jobs), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

SeedTriple replication_seeds(std::uint64_t root, std::size_t r) {
  const std::uint64_t base = root + 100u * static_cast<std::uint64_t>(r);
  return {base, base + 1, base + 2};
}

namespace {

// All eta cells of one gamma on one training set; matrices are shared.
struct GammaSweep {
  std::vector<GridRow> rows;
  std::optional<FittedModel> best;  // best among this gamma's rows
  double seconds = 0.0;
};

GammaSweep sweep_etas(Method method, const std::shared_ptr<const EventData>& train, const EventData& val,
                      double gamma, const GridSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  std::optional<PrecomputedMatrices> matrices;
  if (method == Method::rkhs) {
    const std::size_t m = spec.m ? spec.m : default_grid_size(*train);
    matrices = build_matrices(*train, KernelConfig{gamma, spec.support}, m);
  }
  GammaSweep out;
  std::vector<std::optional<FittedModel>> fits;
  for (double eta : spec.etas) {
    GridRow row;
    row.gamma = gamma;
    row.eta = eta;
    std::optional<FittedModel> kept;
    try {
      FittedModel fitted = fit_method(method, train, gamma, eta, spec, matrices ? &*matrices : nullptr);
      const Score s = score_model(fitted, val, spec.m_score);
      row.ok = std::isfinite(s.log_likelihood);
      if (!row.ok) row.error = "non-finite validation score";
      row.objective = fitted.objective;
      row.val_loglik = s.log_likelihood;
      row.val_floored = s.floored;
      row.iterations = fitted.iterations;
      if (row.ok) kept = std::move(fitted);
    } catch (const NumericalError& e) {
      row.ok = false;
      row.error = e.what();
    }
    out.rows.push_back(row);
    fits.push_back(std::move(kept));
  }
  if (std::any_of(out.rows.begin(), out.rows.end(), [](const GridRow& r) { return r.ok; }))
    out.best = std::move(fits[select_best(out.rows)]);
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace

GridResult grid_search(Method method, std::shared_ptr<const EventData> train, const EventData& val,
                       const GridSpec& spec, unsigned jobs) {
  spec.validate();
  if (train->dims() != val.dims()) throw ShapeError("train and validation data have different dims");
  std::vector<GammaSweep> sweeps(spec.gammas.size());
  parallel_for(sweeps.size(), jobs,
               [&](std::size_t g) { sweeps[g] = sweep_etas(method, train, val, spec.gammas[g], spec); });
  GridResult out;
  double seconds = 0.0;
  for (const auto& s : sweeps) {
    out.table.insert(out.table.end(), s.rows.begin(), s.rows.end());
    seconds += s.seconds;
  }
  const GridRow& best = out.table[select_best(out.table)];
  for (auto& s : sweeps)
    if (s.best && s.best->gamma == best.gamma) out.best.fitted = std::move(*s.best);
  out.best.val_loglik = best.val_loglik;
  out.best.seconds = seconds;
  return out;
}

std::vector<BenchStat> bench_statistics(const std::vector<BenchRow>& rows, const std::vector<Method>& methods,
                                        const std::vector<double>& horizons) {
  std::vector<BenchStat> out;
  for (Method m : methods)
    for (double T : horizons) {
      BenchStat st;
      st.method = m;
      st.horizon = T;
      std::vector<double> l1, test;
      for (const BenchRow& row : rows) {
        if (!row.ok || row.method != m || row.horizon != T) continue;
        l1.push_back(row.l1_sum);
        test.push_back(row.test_loglik);
      }
      st.n = l1.size();
      std::tie(st.l1_mean, st.l1_half_width) = mean_ci(l1);
      std::tie(st.test_mean, st.test_half_width) = mean_ci(test);
      out.push_back(st);
    }
  return out;
}

std::pair<double, double> mean_ci(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * sd / std::sqrt(n)};
}

namespace {

struct Trajectories {
  std::shared_ptr<const EventData> train;
  std::shared_ptr<const EventData> val;
  std::shared_ptr<const EventData> test;
};

Trajectories simulate_replication(const GroundTruthModel& truth, double horizon, double burn_in, std::uint64_t root,
                                  std::size_t r) {
  const SeedTriple seeds = replication_seeds(root, r);
  auto run = [&](std::uint64_t seed) {
    return std::make_shared<const EventData>(simulate_thinning(truth, SimulationOptions{horizon, burn_in, seed}));
  };
  return {run(seeds.train), run(seeds.val), run(seeds.test)};
}

std::shared_ptr<const EventData> prefix(const std::shared_ptr<const EventData>& ev, double horizon) {
  if (horizon == ev->horizon()) return ev;
  return std::make_shared<const EventData>(restrict_window(*ev, 0.0, horizon));
}

}  // namespace

std::vector<SweepRow> approximation_sweep(const GroundTruthModel& truth, const SweepOptions& options,
                                          unsigned jobs) {
  options.grid.validate();
  if (options.omegas.empty() || options.ms.empty()) throw ConfigError("omega and M lists must be nonempty");
  for (double w : options.omegas) LinkSpec{w, options.grid.criterion}.validate();
  for (std::size_t m : options.ms)
    if (m < 2) throw ConfigError("grid size M must be >= 2");
  if (options.replications < 1) throw ConfigError("replications must be >= 1");
  if (std::abs(truth.support() - options.grid.support) > 1e-12)
    throw ConfigError("grid support differs from the ground-truth support");

  std::vector<Trajectories> data(options.replications);
  parallel_for(data.size(), jobs, [&](std::size_t r) {
    data[r] = simulate_replication(truth, options.horizon, options.burn_in, options.seed, options.first_replication + r);
  });

  const std::size_t nw = options.omegas.size(), nm = options.ms.size(), ng = options.grid.gammas.size(),
                    ne = options.grid.etas.size();
  struct Cell {
    bool ok = false;
    double l1 = 0.0;
    double val = 0.0;
  };
  // Task (r, M, gamma) fills cells [omega][eta].
  std::vector<std::vector<Cell>> cells(options.replications * nm * ng);
  parallel_for(cells.size(), jobs, [&](std::size_t task) {
    const std::size_t r = task / (nm * ng), mi = (task / ng) % nm, gi = task % ng;
    const double gamma = options.grid.gammas[gi];
    const PrecomputedMatrices matrices =
        build_matrices(*data[r].train, KernelConfig{gamma, options.grid.support}, options.ms[mi]);
    std::vector<Cell> out(nw * ne);
    for (std::size_t wi = 0; wi < nw; ++wi) {
      GridSpec spec = options.grid;
      spec.omega = options.omegas[wi];
      spec.m = options.ms[mi];
      for (std::size_t ei = 0; ei < ne; ++ei) {
        Cell& c = out[wi * ne + ei];
        try {
          const FittedModel fitted = fit_method(Method::rkhs, data[r].train, gamma, options.grid.etas[ei], spec, &matrices);
          const TabulatedModel table(*fitted.model, kScoreTablePoints);
          c.l1 = l1_error_matrix(truth, table, options.grid.l1_points).sum();
          const LikelihoodScore s =
              exact_neg_log_likelihood(table, *data[r].val, score_grid(*data[r].val, options.grid.m_score));
          c.val = -s.neg_log_likelihood;
          c.ok = std::isfinite(c.val) && std::isfinite(c.l1);
        } catch (const NumericalError&) {
          c.ok = false;
        }
      }
    }
    cells[task] = std::move(out);
  });

  std::vector<SweepRow> rows;
  for (std::size_t wi = 0; wi < nw; ++wi)
    for (std::size_t mi = 0; mi < nm; ++mi)
      for (std::size_t r = 0; r < options.replications; ++r) {
        SweepRow row;
        row.omega = options.omegas[wi];
        row.m = options.ms[mi];
        row.replication = options.first_replication + r;
        row.seed = replication_seeds(options.seed, row.replication).train;
        std::vector<GridRow> grid;
        std::vector<double> l1s;
        for (std::size_t gi = 0; gi < ng; ++gi)
          for (std::size_t ei = 0; ei < ne; ++ei) {
            const Cell& c = cells[(r * nm + mi) * ng + gi][wi * ne + ei];
            GridRow g;
            g.gamma = options.grid.gammas[gi];
            g.eta = options.grid.etas[ei];
            g.ok = c.ok;
            g.val_loglik = c.val;
            grid.push_back(g);
            l1s.push_back(c.l1);
            if (!c.ok) ++row.failed;
          }
        const std::size_t sel = select_best(grid);
        row.l1_selected = l1s[sel];
        bool first = true;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          if (!grid[i].ok) continue;
          if (first || l1s[i] < row.l1_min) {
            row.l1_min = l1s[i];
            row.gamma_min = grid[i].gamma;
            row.eta_min = grid[i].eta;
            first = false;
          }
        }
        rows.push_back(row);
      }
  return rows;
}

BenchResult horizon_study(const GroundTruthModel& truth, const BenchOptions& options, unsigned jobs) {
  options.grid.validate();
  if (options.horizons.empty() || options.methods.empty()) throw ConfigError("horizons and methods must be nonempty");
  for (double T : options.horizons)
    if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("horizons must be > 0");
  if (options.replications < 1) throw ConfigError("replications must be >= 1");
  if (std::abs(truth.support() - options.grid.support) > 1e-12)
    throw ConfigError("grid support differs from the ground-truth support");
  const double t_max = *std::max_element(options.horizons.begin(), options.horizons.end());

  std::vector<Trajectories> data(options.replications);
  parallel_for(data.size(), jobs, [&](std::size_t r) {
    data[r] = simulate_replication(truth, t_max, options.burn_in, options.seed, options.first_replication + r);
  });

  const std::size_t nm = options.methods.size(), nh = options.horizons.size(), nr = options.replications,
                    ng = options.grid.gammas.size();
  // Groups are (method, horizon, replication) in output order; tasks add gamma.
  std::vector<GammaSweep> sweeps(nm * nh * nr * ng);
  std::vector<std::string> setup_errors(nm * nh * nr);
  parallel_for(sweeps.size(), jobs, [&](std::size_t task) {
    const std::size_t group = task / ng, gi = task % ng;
    const std::size_t mi = group / (nh * nr), hi = (group / nr) % nh, r = group % nr;
    const double T = options.horizons[hi];
    sweeps[task] = sweep_etas(options.methods[mi], prefix(data[r].train, T), *prefix(data[r].val, T),
                              options.grid.gammas[gi], options.grid);
  });

  BenchResult out;
  out.rows.resize(nm * nh * nr);
  parallel_for(out.rows.size(), jobs, [&](std::size_t group) {
    const std::size_t mi = group / (nh * nr), hi = (group / nr) % nh, r = group % nr;
    BenchRow& row = out.rows[group];
    row.method = options.methods[mi];
    row.horizon = options.horizons[hi];
    row.replication = options.first_replication + r;
    row.seed = replication_seeds(options.seed, row.replication).train;
    std::vector<GridRow> table;
    for (std::size_t gi = 0; gi < ng; ++gi) {
      const auto& rows = sweeps[group * ng + gi].rows;
      table.insert(table.end(), rows.begin(), rows.end());
    }
    try {
      const GridRow& best = table[select_best(table)];
      const FittedModel* fitted = nullptr;
      for (std::size_t gi = 0; gi < ng; ++gi) {
        const auto& b = sweeps[group * ng + gi].best;
        if (b && b->gamma == best.gamma) fitted = &*b;
      }
      const auto view = scoring_view(*fitted);
      const auto test = prefix(data[r].test, row.horizon);
      const LikelihoodScore s = exact_neg_log_likelihood(*view, *test, score_grid(*test, options.grid.m_score));
      row.gamma = best.gamma;
      row.eta = best.eta;
      row.val_loglik = best.val_loglik;
      row.test_loglik = -s.neg_log_likelihood;
      row.test_floored = s.floored;
      row.l1_sum = l1_error_matrix(truth, *view, options.grid.l1_points).sum();
      row.ok = true;
    } catch (const SearchError& e) {
      row.ok = false;
      row.error = e.what();
    }
  });
  for (auto& s : sweeps) s.best.reset();

  out.stats = bench_statistics(out.rows, options.methods, options.horizons);
  return out;
}

namespace {

std::string clean_field(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::vector<std::vector<std::string>> split_csv(const std::string& text, const std::string& header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) throw FormatError("unexpected table header");
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  const auto width = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',') + 1);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != width) throw ParseError("wrong number of columns", line_no);
    rows.push_back(std::move(fields));
  }
  return rows;
}

double to_double(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw FormatError("bad number '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("bad number '" + s + "'");
  }
}

std::uint64_t to_u64(const std::string& s) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw FormatError("bad integer '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw FormatError("bad integer '" + s + "'");
  }
}

bool to_bool(const std::string& s) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw FormatError("bad flag '" + s + "'");
}

constexpr const char* kGridHeader = "gamma,eta,ok,objective,val_loglik,val_floored,iterations,error";
constexpr const char* kSweepHeader = "omega,m,replication,seed,l1_min,gamma_min,eta_min,l1_selected,failed";
constexpr const char* kBenchHeader =
    "method,horizon,replication,seed,ok,gamma,eta,val_loglik,test_loglik,test_floored,l1_sum,error";
constexpr const char* kStatsHeader = "method,horizon,n,l1_mean,l1_ci95,test_loglik_mean,test_loglik_ci95";

}  // namespace

std::string grid_table_csv(const std::vector<GridRow>& rows) {
  std::string out = std::string(kGridHeader) + "\n";
  for (const auto& r : rows)
    out += format_double(r.gamma) + "," + format_double(r.eta) + "," + (r.ok ? "1" : "0") + "," +
           format_double(r.objective) + "," + format_double(r.val_loglik) + "," + std::to_string(r.val_floored) +
           "," + std::to_string(r.iterations) + "," + clean_field(r.error) + "\n";
  return out;
}

std::vector<GridRow> parse_grid_table_csv(const std::string& text) {
  std::vector<GridRow> out;
  for (const auto& f : split_csv(text, kGridHeader)) {
    GridRow r;
    r.gamma = to_double(f[0]);
    r.eta = to_double(f[1]);
    r.ok = to_bool(f[2]);
    r.objective = to_double(f[3]);
    r.val_loglik = to_double(f[4]);
    r.val_floored = to_u64(f[5]);
    r.iterations = to_u64(f[6]);
    r.error = f[7];
    out.push_back(r);
  }
  return out;
}

std::string sweep_table_csv(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kSweepHeader) + "\n";
  for (const auto& r : rows)
    out += format_double(r.omega) + "," + std::to_string(r.m) + "," + std::to_string(r.replication) + "," +
           std::to_string(r.seed) + "," + format_double(r.l1_min) + "," + format_double(r.gamma_min) + "," +
           format_double(r.eta_min) + "," + format_double(r.l1_selected) + "," + std::to_string(r.failed) + "\n";
  return out;
}

std::vector<SweepRow> parse_sweep_table_csv(const std::string& text) {
  std::vector<SweepRow> out;
  for (const auto& f : split_csv(text, kSweepHeader)) {
    SweepRow r;
    r.omega = to_double(f[0]);
    r.m = to_u64(f[1]);
    r.replication = to_u64(f[2]);
    r.seed = to_u64(f[3]);
    r.l1_min = to_double(f[4]);
    r.gamma_min = to_double(f[5]);
    r.eta_min = to_double(f[6]);
    r.l1_selected = to_double(f[7]);
    r.failed = to_u64(f[8]);
    out.push_back(r);
  }
  return out;
}

std::string bench_table_csv(const std::vector<BenchRow>& rows) {
  std::string out = std::string(kBenchHeader) + "\n";
  for (const auto& r : rows)
    out += to_string(r.method) + "," + format_double(r.horizon) + "," + std::to_string(r.replication) + "," +
           std::to_string(r.seed) + "," + (r.ok ? "1" : "0") + "," + format_double(r.gamma) + "," +
           format_double(r.eta) + "," + format_double(r.val_loglik) + "," + format_double(r.test_loglik) + "," +
           std::to_string(r.test_floored) + "," + format_double(r.l1_sum) + "," + clean_field(r.error) + "\n";
  return out;
}

std::vector<BenchRow> parse_bench_table_csv(const std::string& text) {
  std::vector<BenchRow> out;
  for (const auto& f : split_csv(text, kBenchHeader)) {
    BenchRow r;
    r.method = parse_method(f[0]);
    r.horizon = to_double(f[1]);
    r.replication = to_u64(f[2]);
    r.seed = to_u64(f[3]);
    r.ok = to_bool(f[4]);
    r.gamma = to_double(f[5]);
    r.eta = to_double(f[6]);
    r.val_loglik = to_double(f[7]);
    r.test_loglik = to_double(f[8]);
    r.test_floored = to_u64(f[9]);
    r.l1_sum = to_double(f[10]);
    r.error = f[11];
    out.push_back(r);
  }
  return out;
}

std::string bench_stats_csv(const std::vector<BenchStat>& stats) {
  std::string out = std::string(kStatsHeader) + "\n";
  for (const auto& s : stats)
    out += to_string(s.method) + "," + format_double(s.horizon) + "," + std::to_string(s.n) + "," +
           format_double(s.l1_mean) + "," + format_double(s.l1_half_width) + "," + format_double(s.test_mean) + "," +
           format_double(s.test_half_width) + "\n";
  return out;
}

}  // namespace rkhawkes
