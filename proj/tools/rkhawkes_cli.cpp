#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rkhawkes/errors.hpp"
#include "rkhawkes/evaluate.hpp"
#include "rkhawkes/events.hpp"
#include "rkhawkes/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rkhawkes;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitIo = 4;

template <class T>
struct is_vector : std::false_type {};
template <class T>
struct is_vector<std::vector<T>> : std::true_type {};

// Options of one command. Each option has a JSON default; the effective
// config is defaults, then the config file, then flags given on the command line.
class Params {
 public:
  explicit Params(CLI::App* app) : app_(app) {}

  template <class T>
  void add(const std::string& name, T def, const std::string& help) {
    auto store = std::make_shared<T>(def);
    CLI::Option* opt = app_->add_option("--" + name, *store, help)->capture_default_str();
    if constexpr (is_vector<T>::value) opt->delimiter(',');
    defaults_[name] = def;
    setters_.push_back([opt, store, name](json& j) {
      if (opt->count()) j[name] = *store;
    });
    keep_.push_back(store);
  }

  /// No default; the key is null unless given.
  template <class T>
  void add_optional(const std::string& name, const std::string& help) {
    auto store = std::make_shared<T>();
    CLI::Option* opt = app_->add_option("--" + name, *store, help);
    defaults_[name] = nullptr;
    setters_.push_back([opt, store, name](json& j) {
      if (opt->count()) j[name] = *store;
    });
    keep_.push_back(store);
  }

  void flag(const std::string& name, const std::string& help) {
    auto store = std::make_shared<bool>(false);
    CLI::Option* opt = app_->add_flag("--" + name, *store, help);
    defaults_[name] = false;
    setters_.push_back([opt, store, name](json& j) {
      if (opt->count()) j[name] = *store;
    });
    keep_.push_back(store);
  }

  json resolve(const json& file_cfg, const std::string& command) const {
    json eff = defaults_;
    auto merge = [&](const json& section) {
      for (const auto& [key, value] : section.items()) {
        if (!eff.contains(key)) throw ConfigError("unknown config key '" + key + "' for " + command);
        eff[key] = value;
      }
    };
    json top = json::object();
    for (const auto& [key, value] : file_cfg.items())
      if (!value.is_object()) top[key] = value;
    merge(top);
    if (file_cfg.contains(command)) merge(file_cfg.at(command));
    for (const auto& s : setters_) s(eff);
    return eff;
  }

 private:
  CLI::App* app_;
  json defaults_ = json::object();
  std::vector<std::function<void(json&)>> setters_;
  std::vector<std::shared_ptr<void>> keep_;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  json cfg;
  try {
    cfg = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config file: ") + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config file must hold a JSON object");
  return cfg;
}

struct Context {
  json cfg;
  bool verbose = false;
  fs::path out;

  template <class T>
  T get(const std::string& key) const {
    return cfg.at(key).get<T>();
  }
  bool has(const std::string& key) const { return cfg.contains(key) && !cfg.at(key).is_null(); }
  unsigned jobs() const {
    const auto n = get<unsigned>("jobs");
    return n ? n : std::max(1u, std::thread::hardware_concurrency());
  }
  void log(const std::string& msg) const {
    if (verbose) std::cerr << msg << "\n";
  }
};

void write_json(const fs::path& path, const json& doc) { write_text_file(path, doc.dump(2) + "\n"); }

void write_manifest(const Context& ctx, const std::string& command, const std::string& status, json extra) {
  json m = {{"command", command}, {"status", status}, {"config", ctx.cfg}};
  for (auto& [k, v] : extra.items()) m[k] = v;
  write_json(ctx.out / "manifest.json", m);
}

void add_common(Params& p) {
  p.add<std::string>("out", "out", "output directory");
  p.add<std::uint64_t>("seed", 0, "root seed (train = seed, val = seed + 1, test = seed + 2, replication r adds 100 r)");
  p.add<unsigned>("jobs", 1, "worker threads for grid cells and replications (0 = all cores)");
}

void add_grid(Params& p, bool lists) {
  if (lists) {
    p.add<std::vector<double>>("gammas", {1.0, 10.0, 100.0}, "kernel widths / basis rates searched");
    p.add<std::vector<double>>("etas", {0.1, 1.0, 10.0, 100.0}, "penalty weights searched");
  }
  p.add<double>("omega", 100.0, "softplus sharpness");
  p.add<std::size_t>("m", 0, "Riemann grid size (0 = max(1000, 2 max_j N_j))");
  p.add<std::string>("criterion", "mle", "fitting criterion: mle or ls");
  p.add<double>("support", 5.0, "interaction support A");
  p.add<std::size_t>("basis-size", 10, "basis size U for gaussian_basis and bernstein");
  p.add<std::size_t>("m-score", 0, "compensator grid for scoring (0 = max(1000, 2 max_j N_j, 100 T))");
  p.add<std::size_t>("l1-points", 2001, "trapezoid nodes for L1 errors");
  p.add<std::size_t>("max-iters", 500, "optimizer iteration cap per dimension");
  p.add<double>("grad-tol", 1e-6, "optimizer projected-gradient tolerance");
}

GridSpec grid_from(const Context& c) {
  GridSpec s;
  if (c.cfg.contains("gammas")) s.gammas = c.get<std::vector<double>>("gammas");
  if (c.cfg.contains("etas")) s.etas = c.get<std::vector<double>>("etas");
  s.omega = c.get<double>("omega");
  s.m = c.get<std::size_t>("m");
  s.criterion = parse_criterion(c.get<std::string>("criterion"));
  s.support = c.get<double>("support");
  s.basis_size = c.get<std::size_t>("basis-size");
  s.m_score = c.get<std::size_t>("m-score");
  s.l1_points = c.get<std::size_t>("l1-points");
  s.optim.max_iters = c.get<std::size_t>("max-iters");
  s.optim.grad_tol = c.get<double>("grad-tol");
  s.validate();
  return s;
}

void add_event_input(Params& p, const std::string& name, const std::string& help, bool required) {
  if (required)
    p.add<std::string>(name, "", help);
  else
    p.add_optional<std::string>(name, help);
}

void add_event_format(Params& p) {
  p.add<std::string>("format", "auto", "event file format: csv, json or auto (by extension)");
  p.add_optional<double>("horizon", "observation horizon of CSV event files (default: largest time)");
  p.add_optional<std::size_t>("dims", "number of dimensions (default: inferred)");
  p.flag("header", "CSV event files have a header line");
}

std::shared_ptr<const EventData> read_events(const Context& c, const std::string& key) {
  const auto path = c.get<std::string>(key);
  if (path.empty()) throw ConfigError("--" + key + " is required");
  const auto fmt_name = c.get<std::string>("format");
  const EventFormat fmt = fmt_name == "auto" ? event_format_from_path(path) : parse_event_format(fmt_name);
  LoadOptions opt;
  if (c.has("horizon")) opt.horizon = c.get<double>("horizon");
  if (c.has("dims")) opt.dims = c.get<std::size_t>("dims");
  opt.header = c.get<bool>("header");
  return std::make_shared<const EventData>(load_events(path, fmt, opt));
}

json counts_json(const EventData& ev) {
  std::vector<std::size_t> counts;
  for (std::size_t j = 0; j < ev.dims(); ++j) counts.push_back(ev.count(j));
  return {{"dims", ev.dims()}, {"horizon", ev.horizon()}, {"counts", counts}, {"total", ev.total_count()}};
}

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index k = 0; k < m.cols(); ++k) row[static_cast<std::size_t>(k)] = m(i, k);
    out.push_back(row);
  }
  return out;
}

// ---- simulate

int cmd_simulate(const Context& c) {
  const GroundTruthModel truth = resolve_ground_truth(c.get<std::string>("model"));
  const auto fmt = parse_event_format(c.get<std::string>("format"));
  const std::string ext = fmt == EventFormat::csv ? ".csv" : ".json";
  const SeedTriple seeds = replication_seeds(c.get<std::uint64_t>("seed"), 0);
  write_manifest(c, "simulate", "incomplete", {});
  json outputs = json::object();
  for (const auto& [name, seed] : {std::pair<std::string, std::uint64_t>{"train", seeds.train},
                                   {"val", seeds.val},
                                   {"test", seeds.test}}) {
    SimulationOptions o;
    o.horizon = c.get<double>("horizon");
    o.burn_in = c.get<double>("burn-in");
    o.seed = seed;
    const EventData ev = simulate_thinning(truth, o);
    const std::string file = name + ext;
    save_events(ev, c.out / file, fmt);
    json info = counts_json(ev);
    info["path"] = file;
    info["seed"] = seed;
    outputs[name] = info;
    c.log(name + ": " + std::to_string(ev.total_count()) + " events");
  }
  write_json(c.out / "ground_truth.json", truth.to_json());
  write_manifest(c, "simulate", "complete", {{"outputs", outputs}, {"ground_truth", "ground_truth.json"}});
  return kExitOk;
}

// ---- fit

int cmd_fit(const Context& c) {
  const auto train = read_events(c, "events");
  const Method method = parse_method(c.get<std::string>("method"));
  GridSpec spec = grid_from(c);
  const unsigned jobs = c.jobs();
  write_manifest(c, "fit", "incomplete", {});

  json report = {{"method", to_string(method)},
                 {"criterion", to_string(spec.criterion)},
                 {"omega", spec.omega},
                 {"train", counts_json(*train)}};
  FitReport best;
  if (c.has("val")) {
    const auto val = read_events(c, "val");
    c.log("grid search over " + std::to_string(spec.gammas.size() * spec.etas.size()) + " cells");
    GridResult g = grid_search(method, train, *val, spec, jobs);
    write_text_file(c.out / "grid.csv", grid_table_csv(g.table));
    best = std::move(g.best);
    report["grid"] = "grid.csv";
    report["val_loglik"] = best.val_loglik;
  } else {
    try {
      best.fitted = fit_method(method, train, c.get<double>("gamma"), c.get<double>("eta"), spec);
    } catch (const NumericalError& e) {
      write_json(c.out / "failure.json", {{"error", e.what()}, {"iterate", e.iterate()}});
      throw;
    }
  }
  const FittedModel& f = best.fitted;
  write_text_file(c.out / "model.json", f.json);
  report["gamma"] = f.gamma;
  report["eta"] = f.eta;
  report["objective"] = f.objective;
  report["iterations"] = f.iterations;
  report["terminations"] = f.terminations;
  if (c.has("test")) {
    const auto test = read_events(c, "test");
    const Score s = score_model(f, *test, spec.m_score);
    report["test_loglik"] = s.log_likelihood;
    report["test_floored"] = s.floored;
  }
  if (c.has("truth")) {
    const GroundTruthModel truth = resolve_ground_truth(c.get<std::string>("truth"));
    const Eigen::MatrixXd l1 = l1_error_matrix(truth, *f.model, spec.l1_points);
    report["l1"] = matrix_json(l1);
    report["l1_sum"] = l1.sum();
  }
  report["model"] = "model.json";
  write_json(c.out / "report.json", report);
  write_manifest(c, "fit", "complete", {{"outputs", {"model.json", "report.json"}}});
  return kExitOk;
}

// ---- score / eval-l1

int cmd_score(const Context& c) {
  const FittedModel f = load_fitted_model(read_text_file(c.get<std::string>("model")));
  const auto ev = read_events(c, "events");
  if (ev->dims() != f.model->dims())
    throw ShapeError("model has " + std::to_string(f.model->dims()) + " dims, events have " +
                     std::to_string(ev->dims()));
  const Score s = score_model(f, *ev, c.get<std::size_t>("m-score"));
  write_json(c.out / "score.json", {{"method", to_string(f.method)},
                                    {"log_likelihood", s.log_likelihood},
                                    {"floored", s.floored},
                                    {"events", counts_json(*ev)}});
  write_manifest(c, "score", "complete", {{"outputs", {"score.json"}}});
  return kExitOk;
}

int cmd_eval_l1(const Context& c) {
  const FittedModel f = load_fitted_model(read_text_file(c.get<std::string>("model")));
  const GroundTruthModel truth = resolve_ground_truth(c.get<std::string>("truth"));
  const Eigen::MatrixXd l1 = l1_error_matrix(truth, *f.model, c.get<std::size_t>("l1-points"));
  write_json(c.out / "l1.json", {{"method", to_string(f.method)}, {"l1", matrix_json(l1)}, {"l1_sum", l1.sum()}});
  write_manifest(c, "eval-l1", "complete", {{"outputs", {"l1.json"}}});
  return kExitOk;
}

// ---- sweep / bench: one replication at a time so an interrupted run keeps its rows

template <class Row>
std::vector<Row> interleave(const std::vector<std::vector<Row>>& per_rep) {
  std::vector<Row> out;
  if (per_rep.empty()) return out;
  for (std::size_t i = 0; i < per_rep.front().size(); ++i)
    for (const auto& rows : per_rep) out.push_back(rows[i]);
  return out;
}

int cmd_sweep(const Context& c) {
  const GroundTruthModel truth = resolve_ground_truth(c.get<std::string>("model"));
  SweepOptions o;
  o.omegas = c.get<std::vector<double>>("omegas");
  o.ms = c.get<std::vector<std::size_t>>("ms");
  o.horizon = c.get<double>("horizon");
  o.burn_in = c.get<double>("burn-in");
  o.seed = c.get<std::uint64_t>("seed");
  o.grid = grid_from(c);
  const auto reps = c.get<std::size_t>("replications");
  if (reps < 1) throw ConfigError("replications must be >= 1");
  o.replications = 1;

  std::vector<std::vector<SweepRow>> per_rep;
  std::vector<SweepRow> partial;
  write_manifest(c, "sweep", "incomplete", {{"rows_written", 0}});
  for (std::size_t r = 0; r < reps; ++r) {
    o.first_replication = r;
    per_rep.push_back(approximation_sweep(truth, o, c.jobs()));
    partial.insert(partial.end(), per_rep.back().begin(), per_rep.back().end());
    write_text_file(c.out / "sweep.csv", sweep_table_csv(partial));
    write_manifest(c, "sweep", "incomplete", {{"rows_written", partial.size()}, {"replications_done", r + 1}});
    c.log("replication " + std::to_string(r + 1) + "/" + std::to_string(reps) + " done");
  }
  const std::vector<SweepRow> rows = interleave(per_rep);
  write_text_file(c.out / "sweep.csv", sweep_table_csv(rows));

  json cells = json::array();
  for (double w : o.omegas)
    for (std::size_t m : o.ms) {
      std::vector<double> mins, sel;
      for (const auto& row : rows)
        if (row.omega == w && row.m == m) {
          mins.push_back(row.l1_min);
          sel.push_back(row.l1_selected);
        }
      const auto [mm, mh] = mean_ci(mins);
      const auto [sm, sh] = mean_ci(sel);
      cells.push_back({{"omega", w}, {"m", m}, {"l1_min_mean", mm}, {"l1_min_ci95", mh},
                       {"l1_selected_mean", sm}, {"l1_selected_ci95", sh}});
    }
  write_json(c.out / "summary.json", {{"cells", cells}});
  write_manifest(c, "sweep", "complete",
                 {{"rows_written", rows.size()}, {"replications_done", reps}, {"outputs", {"sweep.csv", "summary.json"}}});
  return kExitOk;
}

int cmd_bench(const Context& c) {
  const GroundTruthModel truth = resolve_ground_truth(c.get<std::string>("model"));
  BenchOptions o;
  o.horizons = c.get<std::vector<double>>("horizons");
  o.methods.clear();
  for (const auto& name : c.get<std::vector<std::string>>("methods")) o.methods.push_back(parse_method(name));
  o.burn_in = c.get<double>("burn-in");
  o.seed = c.get<std::uint64_t>("seed");
  o.grid = grid_from(c);
  const auto reps = c.get<std::size_t>("replications");
  if (reps < 1) throw ConfigError("replications must be >= 1");
  o.replications = 1;

  std::vector<std::vector<BenchRow>> per_rep;
  std::vector<BenchRow> partial;
  write_manifest(c, "bench", "incomplete", {{"rows_written", 0}});
  for (std::size_t r = 0; r < reps; ++r) {
    o.first_replication = r;
    per_rep.push_back(horizon_study(truth, o, c.jobs()).rows);
    partial.insert(partial.end(), per_rep.back().begin(), per_rep.back().end());
    write_text_file(c.out / "bench.csv", bench_table_csv(partial));
    write_manifest(c, "bench", "incomplete", {{"rows_written", partial.size()}, {"replications_done", r + 1}});
    c.log("replication " + std::to_string(r + 1) + "/" + std::to_string(reps) + " done");
  }
  const std::vector<BenchRow> rows = interleave(per_rep);
  const std::vector<BenchStat> stats = bench_statistics(rows, o.methods, o.horizons);
  write_text_file(c.out / "bench.csv", bench_table_csv(rows));
  write_text_file(c.out / "bench_stats.csv", bench_stats_csv(stats));

  json summary = json::array();
  for (const auto& s : stats)
    summary.push_back({{"method", to_string(s.method)}, {"horizon", s.horizon}, {"n", s.n},
                       {"l1_mean", s.l1_mean}, {"l1_ci95", s.l1_half_width},
                       {"test_loglik_mean", s.test_mean}, {"test_loglik_ci95", s.test_half_width}});
  write_json(c.out / "summary.json", {{"stats", summary}});
  write_manifest(c, "bench", "complete",
                 {{"rows_written", rows.size()},
                  {"replications_done", reps},
                  {"outputs", {"bench.csv", "bench_stats.csv", "summary.json"}}});
  return kExitOk;
}

int report(const std::string& kind, const std::exception& e, int code) {
  std::cerr << "rkhawkes: " << kind << ": " << e.what() << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonparametric estimation of ReLU Hawkes processes with Gaussian-kernel RKHS interactions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rkhawkes 0.1.0");
  std::string config_path;
  bool verbose = false;

  struct Command {
    CLI::App* app;
    std::unique_ptr<Params> params;
    std::function<int(const Context&)> run;
  };
  std::vector<Command> commands;
  auto make = [&](const std::string& name, const std::string& help, std::function<int(const Context&)> run) -> Params& {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file (flags override it)");
    sub->add_flag("-v,--verbose", verbose, "progress on stderr");
    commands.push_back({sub, std::make_unique<Params>(sub), std::move(run)});
    add_common(*commands.back().params);
    return *commands.back().params;
  };

  {
    Params& p = make("simulate", "simulate train/val/test trajectories of a ground-truth model", cmd_simulate);
    p.add<std::string>("model", "paper3d", "builtin model (paper3d, poisson, inhibited) or JSON model file");
    p.add<double>("horizon", 1000.0, "observation horizon T");
    p.add<double>("burn-in", -1.0, "burn-in before time 0 (negative = 10 x support)");
    p.add<std::string>("format", "csv", "output format: csv or json");
  }
  {
    Params& p = make("fit", "fit one method, or grid-search it when --val is given", cmd_fit);
    add_event_input(p, "events", "training events file", true);
    add_event_input(p, "val", "validation events file; enables the (gamma, eta) grid search", false);
    add_event_input(p, "test", "test events file to score the fitted model on", false);
    p.add_optional<std::string>("truth", "ground-truth model for L1 errors");
    add_event_format(p);
    p.add<std::string>("method", "rkhs", "rkhs, exponential, gaussian_basis or bernstein");
    p.add<double>("gamma", 1.0, "kernel width (or basis rate) without --val");
    p.add<double>("eta", 1.0, "penalty weight without --val");
    add_grid(p, true);
  }
  {
    Params& p = make("score", "test log-likelihood of a fitted model (higher is better)", cmd_score);
    p.add<std::string>("model", "", "model file written by fit");
    add_event_input(p, "events", "events file", true);
    add_event_format(p);
    p.add<std::size_t>("m-score", 0, "compensator grid (0 = max(1000, 2 max_j N_j, 100 T))");
  }
  {
    Params& p = make("eval-l1", "L1 errors between a fitted model and a ground truth", cmd_eval_l1);
    p.add<std::string>("model", "", "model file written by fit");
    p.add<std::string>("truth", "paper3d", "builtin model or JSON model file");
    p.add<std::size_t>("l1-points", 2001, "trapezoid nodes");
  }
  {
    Params& p = make("sweep", "(omega, M) approximation sweep of the rkhs estimator", cmd_sweep);
    p.add<std::string>("model", "paper3d", "ground-truth model");
    p.add<std::vector<double>>("omegas", {1.0, 10.0, 100.0}, "softplus sharpness values");
    p.add<std::vector<std::size_t>>("ms", {100, 1000}, "Riemann grid sizes");
    p.add<double>("horizon", 500.0, "training horizon T");
    p.add<double>("burn-in", -1.0, "burn-in before time 0 (negative = 10 x support)");
    p.add<std::size_t>("replications", 1, "independent replications");
    add_grid(p, true);
  }
  {
    Params& p = make("bench", "horizon study comparing the methods", cmd_bench);
    p.add<std::string>("model", "paper3d", "ground-truth model");
    p.add<std::vector<double>>("horizons", {250.0, 500.0, 1000.0, 2000.0}, "training horizons");
    p.add<std::vector<std::string>>("methods", {"rkhs", "exponential", "gaussian_basis", "bernstein"}, "methods");
    p.add<double>("burn-in", -1.0, "burn-in before time 0 (negative = 10 x support)");
    p.add<std::size_t>("replications", 10, "independent replications");
    add_grid(p, true);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  for (auto& cmd : commands) {
    if (!cmd.app->parsed()) continue;
    const std::string name = cmd.app->get_name();
    try {
      Context ctx;
      ctx.verbose = verbose;
      ctx.cfg = cmd.params->resolve(load_config(config_path), name);
      ctx.out = ctx.get<std::string>("out");
      fs::create_directories(ctx.out);
      return cmd.run(ctx);
    } catch (const NumericalError& e) {
      return report("numerical failure", e, kExitNumerical);
    } catch (const SimulationError& e) {
      return report("simulation failure", e, kExitNumerical);
    } catch (const SearchError& e) {
      return report("numerical failure", e, kExitNumerical);
    } catch (const IoError& e) {
      return report("I/O error", e, kExitIo);
    } catch (const fs::filesystem_error& e) {
      return report("I/O error", e, kExitIo);
    } catch (const Error& e) {
      return report("error", e, kExitConfig);
    } catch (const json::exception& e) {
      return report("config error", e, kExitConfig);
    }
  }
  return kExitConfig;
}
