#pragma once

#include <cstddef>
#include <vector>

#include "rkhawkes/events.hpp"

namespace rkhawkes {

/// Any ReLU Hawkes model: baselines plus interaction curves on [0, support].
///
/// Implemented by the ground truth, the fitted RKHS model and the baseline
/// feature models, so scoring and L1 comparison treat them uniformly.
class HawkesModel {
 public:
  virtual ~HawkesModel() = default;
  virtual std::size_t dims() const = 0;
  virtual double support() const = 0;
  virtual double baseline(std::size_t j) const = 0;
  /// g_{jl}(lag); callers only pass lag in [0, support].
  virtual double interaction(std::size_t j, std::size_t l, double lag) const = 0;
};

/// mu_j + sum_l sum_i g_{jl}(t - T_i^{(l)}) 1{0 < t - T_i^{(l)} <= A}.
double model_pre_intensity(const HawkesModel& model, const EventData& history, std::size_t j, double t);

/// ReLU of model_pre_intensity.
double model_intensity(const HawkesModel& model, const EventData& history, std::size_t j, double t);

/// Interaction curves sampled on a uniform lag grid with linear interpolation.
///
/// Used to score models whose exact curves are expensive to evaluate.
class TabulatedModel final : public HawkesModel {
 public:
  TabulatedModel(const HawkesModel& source, std::size_t points);

  std::size_t dims() const override { return mu_.size(); }
  double support() const override { return support_; }
  double baseline(std::size_t j) const override { return mu_.at(j); }
  double interaction(std::size_t j, std::size_t l, double lag) const override;

 private:
  double support_;
  double step_;
  std::vector<double> mu_;
  std::vector<std::vector<double>> table_;  // [j * d + l]
};

}  // namespace rkhawkes
