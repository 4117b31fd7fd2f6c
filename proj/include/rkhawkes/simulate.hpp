#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rkhawkes/events.hpp"
#include "rkhawkes/hawkes_model.hpp"

namespace rkhawkes {

/// A real function of the lag t built from named primitives.
///
/// JSON forms (all fields numeric unless noted):
///   {"type": "const", "value": c}                         c
///   {"type": "poly", "coeffs": [c0, c1, ...]}             sum_k c_k t^k
///   {"type": "exp", "scale": a, "rate": r, "shift": s}    a exp(-r (t - s))
///   {"type": "gauss", "scale": a, "center": c, "width": w} a exp(-w (t - c)^2)
///   {"type": "cos_damped", "scale": a, "offset": o, "freq": f, "rate": r}
///                                                         a (o + cos(f t)) exp(-r t)
///   {"type": "sum", "terms": [expr, ...]}
///   {"type": "shift", "by": s, "body": expr}              body(t - s)
///   {"type": "window", "lo": a, "hi": b, "body": expr}    body(t) 1{a < t <= b}
/// Missing window bounds are infinite; missing shift/offset default to 0.
class Curve {
 public:
  virtual ~Curve() = default;
  virtual double operator()(double t) const = 0;
  virtual nlohmann::json to_json() const = 0;
};

using CurvePtr = std::shared_ptr<const Curve>;

/// Throws ConfigError on unknown types or missing fields.
CurvePtr curve_from_json(const nlohmann::json& spec);

/// Simulation-side model with known interaction curves.
class GroundTruthModel final : public HawkesModel {
 public:
  /// kernels[j][l] is g_{jl}. Optional `declared_sup[j][l]` bounds are checked
  /// against a 10,000-point grid; otherwise 1.05 x the grid maximum is used.
  GroundTruthModel(std::vector<double> mu, std::vector<std::vector<CurvePtr>> kernels, double support,
                   std::vector<std::vector<double>> declared_sup = {});

  std::size_t dims() const override { return mu_.size(); }
  double support() const override { return support_; }
  double baseline(std::size_t j) const override { return mu_.at(j); }
  double interaction(std::size_t j, std::size_t l, double lag) const override;

  /// Upper bound of max(0, g_{jl}) on [0, support].
  double sup_bound(std::size_t j, std::size_t l) const { return sup_.at(j).at(l); }

  nlohmann::json to_json() const;

 private:
  std::vector<double> mu_;
  std::vector<std::vector<CurvePtr>> kernels_;
  std::vector<std::vector<double>> sup_;
  double support_;
};

/// Names accepted by builtin_kernels.
std::vector<std::string> builtin_model_names();

/// "paper3d": the 3-variate refractory/excitation/inhibition benchmark model
/// (mu = 0.05, A = 5). Also "poisson" (d = 1, mu = 2, g = 0) and
/// "inhibited" (d = 1, mu = 1, g = -5 on [0, 1]). Throws ConfigError otherwise.
GroundTruthModel builtin_kernels(const std::string& name);

GroundTruthModel ground_truth_from_json(const nlohmann::json& spec);
GroundTruthModel load_ground_truth(const std::filesystem::path& path);

/// Builtin name or path to a JSON model file.
GroundTruthModel resolve_ground_truth(const std::string& name_or_path);

struct SimulationOptions {
  double horizon = 1000.0;
  /// Negative means the default of 10 x support.
  double burn_in = -1.0;
  std::uint64_t seed = 0;
};

/// Ogata thinning on [-burn_in, horizon]; only events in (0, horizon] are
/// returned. Throws SimulationError if a candidate's intensity exceeds the
/// majorant.
EventData simulate_thinning(const GroundTruthModel& model, const SimulationOptions& options);

/// Compensator increments Lambda_j(T_n) - Lambda_j(T_{n-1}) (T_0 = 0) for
/// each dimension, integrated with the midpoint rule at step <= max_step.
std::vector<std::vector<double>> time_rescaling_residuals(const EventData& events, const HawkesModel& model,
                                                         double max_step = 0.005);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against Exp(1).
KsResult ks_test_exponential(std::vector<double> sample);

/// Kolmogorov survival function Q(x) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 x^2).
double kolmogorov_survival(double x);

}  // namespace rkhawkes
