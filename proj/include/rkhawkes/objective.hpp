#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "rkhawkes/hawkes_model.hpp"
#include "rkhawkes/model.hpp"
#include "rkhawkes/precompute.hpp"

namespace rkhawkes {

/// The (phi1, phi2) pair of the approximated objective and their derivatives.
///
/// mle: phi1 = softplus, phi2 = log o softplus.
/// ls:  phi1 = softplus^2, phi2 = 2 softplus.
struct LinkPair {
  LinkSpec spec;

  double phi1(double x) const;
  double phi2(double x) const;
  double dphi1(double x) const;
  double dphi2(double x) const;
};

LinkPair link_pair(const LinkSpec& link);

struct ObjectiveConfig {
  LinkSpec link;
  double eta = 1.0;
  const PrecomputedMatrices* matrices = nullptr;
  /// Ridge added to each Gram block inside the penalty, relative to
  /// trace(K) / dim(K). Zero disables it.
  double jitter_scale = 1e-10;

  void validate() const;
};

/// Gradient with the same shape as the free parameters of RkhsParams.
struct RkhsGradient {
  std::vector<double> mu;
  std::vector<std::vector<Eigen::VectorXd>> alpha;
  Eigen::MatrixXd b;
};

/// Smoothed, discretized, penalized objective for one target dimension j.
///
/// Packed parameter layout: [mu_j, alpha^{(j1)}, ..., alpha^{(jd)}, b_{j1}, ..., b_{jd}].
/// The full objective is the sum of these terms over j, so each dimension can
/// be minimized on its own.
class DimensionObjective {
 public:
  DimensionObjective(const ObjectiveConfig& cfg, std::size_t j);

  std::size_t size() const noexcept { return size_; }
  std::size_t alpha_offset(std::size_t l) const noexcept { return 1 + l * block_; }
  std::size_t b_offset() const noexcept { return 1 + dims_ * block_; }

  double value(const Eigen::VectorXd& x) const;
  /// Returns the value and writes the gradient into `grad` (resized as needed).
  double value_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const;

  Eigen::VectorXd pack(const RkhsParams& theta) const;
  void unpack(const Eigen::VectorXd& x, RkhsParams& theta) const;

 private:
  const PrecomputedMatrices* mats_;
  LinkPair link_;
  double eta_;
  std::size_t j_;
  std::size_t dims_;
  std::size_t block_;
  std::size_t size_;
  std::vector<Eigen::MatrixXd> penalty_;  // Kfull[j][l] + jitter I
};

/// Sum over j of the dimension objectives. Throws ShapeError on mismatch.
double objective_value(const RkhsParams& theta, const ObjectiveConfig& cfg);
RkhsGradient objective_gradient(const RkhsParams& theta, const ObjectiveConfig& cfg);

struct LikelihoodScore {
  double neg_log_likelihood = 0.0;
  std::size_t floored = 0;  ///< event intensities raised to the log floor
};

/// Intensities below this value are replaced by it inside logarithms.
inline constexpr double kLogFloor = 1e-10;

/// max(1000, 2 max_j N_T^{(j)}).
std::size_t default_score_grid(const EventData& events);

/// Negative log-likelihood of `events` under the ReLU model, compensator by a
/// left Riemann sum on `m_score` points.
LikelihoodScore exact_neg_log_likelihood(const HawkesModel& model, const EventData& events,
                                         std::size_t m_score);
LikelihoodScore exact_neg_log_likelihood(const RkhsParams& theta, const EventData& events,
                                         std::size_t m_score);

}  // namespace rkhawkes
