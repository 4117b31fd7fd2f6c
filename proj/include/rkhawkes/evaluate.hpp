#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "rkhawkes/baselines.hpp"
#include "rkhawkes/events.hpp"
#include "rkhawkes/fit.hpp"
#include "rkhawkes/hawkes_model.hpp"
#include "rkhawkes/model.hpp"
#include "rkhawkes/simulate.hpp"

namespace rkhawkes {

enum class Method { rkhs, exponential, gaussian_basis, bernstein };

Method parse_method(const std::string& name);
std::string to_string(Method m);
std::vector<Method> all_methods();

/// Validation grid and the fixed fitting settings shared by every cell.
struct GridSpec {
  std::vector<double> gammas{1.0, 10.0, 100.0};
  std::vector<double> etas{0.1, 1.0, 10.0, 100.0};
  double omega = 100.0;
  /// Riemann grid size; 0 selects max(1000, 2 max_j N_T^{(j)}) of the training data.
  std::size_t m = 0;
  Criterion criterion = Criterion::mle;
  double support = 5.0;
  std::size_t basis_size = 10;  ///< U for gaussian_basis and bernstein
  /// Compensator grid for scoring; 0 selects max(1000, 2 max_j N_T^{(j)}) of the scored data.
  std::size_t m_score = 0;
  std::size_t l1_points = 2001;
  OptimOptions optim;

  void validate() const;
};

/// A fitted model of any method, with its serialized form.
struct FittedModel {
  Method method = Method::rkhs;
  double gamma = 0.0;
  double eta = 0.0;
  std::shared_ptr<const HawkesModel> model;
  std::string json;
  double objective = 0.0;
  std::size_t iterations = 0;
  std::vector<std::string> terminations;
};

/// Fits one method at one (gamma, eta). For rkhs, `matrices` may carry the
/// already assembled matrices of `train` for this gamma and grid size.
FittedModel fit_method(Method method, std::shared_ptr<const EventData> train, double gamma, double eta,
                       const GridSpec& spec, const PrecomputedMatrices* matrices = nullptr);

/// Loads any model file written by this library ("kind" discriminates).
FittedModel load_fitted_model(const std::string& json_text);

/// Higher is better; exact ReLU likelihood with the log floor.
struct Score {
  double log_likelihood = 0.0;
  std::size_t floored = 0;
};
Score score_model(const FittedModel& fitted, const EventData& events, std::size_t m_score = 0);

/// Trapezoid rule for int_0^A |g_truth - g_fit| on `points` uniform nodes.
double l1_error(const HawkesModel& truth, const HawkesModel& fitted, std::size_t j, std::size_t l,
                std::size_t points = 2001);
Eigen::MatrixXd l1_error_matrix(const HawkesModel& truth, const HawkesModel& fitted, std::size_t points = 2001);

struct GridRow {
  double gamma = 0.0;
  double eta = 0.0;
  bool ok = false;
  std::string error;
  double objective = 0.0;
  double val_loglik = 0.0;
  std::size_t val_floored = 0;
  std::size_t iterations = 0;
};

struct FitReport {
  FittedModel fitted;
  double val_loglik = 0.0;
  std::optional<double> test_loglik;
  std::size_t test_floored = 0;
  std::optional<Eigen::MatrixXd> l1;  ///< d x d, present when the truth is known
  double l1_sum() const { return l1 ? l1->sum() : 0.0; }
  double seconds = 0.0;
};

struct GridResult {
  FitReport best;
  std::vector<GridRow> table;  ///< gamma-major, then eta, in spec order
};

/// Index of the best row: largest val log-likelihood, ties to smaller eta,
/// then smaller gamma. Throws SearchError when no row succeeded.
std::size_t select_best(const std::vector<GridRow>& rows);

/// Fits every (gamma, eta) cell on `train`, scores on `val`, keeps the best.
/// Failed cells are recorded in the table; all failing throws SearchError.
GridResult grid_search(Method method, std::shared_ptr<const EventData> train, const EventData& val,
                       const GridSpec& spec, unsigned jobs = 1);

/// Runs fn(0..n-1) on `jobs` threads. Results must be written by index so the
/// outcome does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

/// Seeds used for replication r: train, val, test.
struct SeedTriple {
  std::uint64_t train, val, test;
};
SeedTriple replication_seeds(std::uint64_t root, std::size_t r);

struct SweepRow {
  double omega = 0.0;
  std::size_t m = 0;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  double l1_min = 0.0;       ///< smallest summed L1 over the (gamma, eta) grid
  double gamma_min = 0.0;
  double eta_min = 0.0;
  double l1_selected = 0.0;  ///< summed L1 of the validation-selected cell
  std::size_t failed = 0;
};

struct SweepOptions {
  std::vector<double> omegas{1.0, 10.0, 100.0};
  std::vector<std::size_t> ms{100, 1000};
  double horizon = 500.0;
  std::size_t replications = 1;
  std::size_t first_replication = 0;  ///< runs replications first.. first + replications - 1
  std::uint64_t seed = 0;
  double burn_in = -1.0;
  GridSpec grid;  ///< omega and m are overridden per row
};

/// Factorial (omega, M) sweep of the rkhs estimator on simulated data.
std::vector<SweepRow> approximation_sweep(const GroundTruthModel& truth, const SweepOptions& options,
                                          unsigned jobs = 1);

struct BenchRow {
  Method method = Method::rkhs;
  double horizon = 0.0;
  std::size_t replication = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double gamma = 0.0;
  double eta = 0.0;
  double val_loglik = 0.0;
  double test_loglik = 0.0;
  std::size_t test_floored = 0;
  double l1_sum = 0.0;
};

struct BenchStat {
  Method method = Method::rkhs;
  double horizon = 0.0;
  std::size_t n = 0;
  double l1_mean = 0.0, l1_half_width = 0.0;
  double test_mean = 0.0, test_half_width = 0.0;
};

struct BenchOptions {
  std::vector<double> horizons{250.0, 500.0, 1000.0, 2000.0};
  std::vector<Method> methods{Method::rkhs, Method::exponential, Method::gaussian_basis, Method::bernstein};
  std::size_t replications = 10;
  std::size_t first_replication = 0;
  std::uint64_t seed = 0;
  double burn_in = -1.0;
  GridSpec grid;
};

struct BenchResult {
  std::vector<BenchRow> rows;    ///< method-major, then horizon, then replication
  std::vector<BenchStat> stats;  ///< method-major, then horizon
};

/// For each replication: simulate train/val/test at the largest horizon
/// (shorter horizons are prefixes), grid-search every method and record the
/// test log-likelihood and summed L1 of the selected model.
BenchResult horizon_study(const GroundTruthModel& truth, const BenchOptions& options, unsigned jobs = 1);

/// Per (method, horizon) aggregates over the successful rows, in option order.
std::vector<BenchStat> bench_statistics(const std::vector<BenchRow>& rows, const std::vector<Method>& methods,
                                        const std::vector<double>& horizons);

/// mean and 1.96 sd / sqrt(n) (sample sd; 0 when n < 2).
std::pair<double, double> mean_ci(const std::vector<double>& values);

// Table serialization. Every table has a fixed header row.
std::string grid_table_csv(const std::vector<GridRow>& rows);
std::string sweep_table_csv(const std::vector<SweepRow>& rows);
std::string bench_table_csv(const std::vector<BenchRow>& rows);
std::string bench_stats_csv(const std::vector<BenchStat>& stats);
std::vector<GridRow> parse_grid_table_csv(const std::string& text);
std::vector<SweepRow> parse_sweep_table_csv(const std::string& text);
std::vector<BenchRow> parse_bench_table_csv(const std::string& text);

nlohmann::json grid_spec_to_json(const GridSpec& spec);

}  // namespace rkhawkes
