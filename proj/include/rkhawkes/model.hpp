#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rkhawkes/events.hpp"
#include "rkhawkes/hawkes_model.hpp"
#include "rkhawkes/kernel_math.hpp"

namespace rkhawkes {

enum class Criterion { mle, ls };

Criterion parse_criterion(const std::string& name);
std::string to_string(Criterion c);

/// Smoothing of the ReLU link used by the fitting objective.
struct LinkSpec {
  double omega = 100.0;
  Criterion criterion = Criterion::mle;
  void validate() const;
};

/// log(1 + exp(omega x)) / omega, evaluated without overflow.
double softplus(double x, double omega);
/// Logistic sigma(omega x), the derivative of softplus.
double softplus_prime(double x, double omega);
/// log(softplus(x, omega)), finite for every finite x.
double log_softplus(double x, double omega);

/// Representer-form parameters of a fitted nonlinear Hawkes model.
///
/// h_{jl} = alpha^{(jl)}_0 r_l + sum_u alpha^{(jl)}_u q_{ujl}, where r_l and
/// q_{ujl} are built from `anchor`; g_{jl} = (h_{jl} + b_{jl}) on [0, A].
struct RkhsParams {
  std::vector<double> mu;
  std::vector<std::vector<Eigen::VectorXd>> alpha;  ///< [j][l], length N_j + 1
  Eigen::MatrixXd b;                                ///< d x d
  KernelConfig cfg;
  std::shared_ptr<const EventData> anchor;
  // Fit metadata, recorded in the model file.
  LinkSpec link;
  double eta = 1.0;

  std::size_t dims() const noexcept { return mu.size(); }
  /// All-zero parameters shaped for `anchor`.
  static RkhsParams zeros(std::shared_ptr<const EventData> anchor, const KernelConfig& cfg);
  /// Throws ShapeError when alpha/b/mu disagree with the anchor events.
  void check_shape() const;
};

/// Exact evaluator of the interaction functions of an RkhsParams.
class RkhsModel final : public HawkesModel {
 public:
  explicit RkhsModel(RkhsParams params);

  std::size_t dims() const override { return params_.dims(); }
  double support() const override { return params_.cfg.support; }
  double baseline(std::size_t j) const override { return params_.mu.at(j); }
  double interaction(std::size_t j, std::size_t l, double lag) const override;
  /// h_{jl}(lag) without the offset b_{jl}.
  double functional_part(std::size_t j, std::size_t l, double lag) const;

  const RkhsParams& params() const noexcept { return params_; }

 private:
  struct Pair {
    double alpha0 = 0.0;
    std::vector<double> centers;  // ascending
    std::vector<double> weights;
  };
  RkhsParams params_;
  std::vector<RFunction> r_;
  std::vector<Pair> pairs_;  // [j * d + l]
  double cutoff_ = 0.0;
};

/// Argument of the link at time t (strict past of `events` only).
double pre_intensity(const RkhsParams& theta, const EventData& events, std::size_t j, double t);
double intensity(const RkhsParams& theta, const EventData& events, std::size_t j, double t);
/// g_{jl}(t); throws DomainError unless 0 <= t <= A.
double interaction_at(const RkhsParams& theta, std::size_t j, std::size_t l, double t);

void save_model(const RkhsParams& theta, const std::filesystem::path& path);
RkhsParams load_model(const std::filesystem::path& path);
std::string rkhs_model_to_json(const RkhsParams& theta);
RkhsParams rkhs_model_from_json(const std::string& text);

}  // namespace rkhawkes
