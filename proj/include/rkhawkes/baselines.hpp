#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rkhawkes/events.hpp"
#include "rkhawkes/hawkes_model.hpp"
#include "rkhawkes/model.hpp"
#include "rkhawkes/optimizer.hpp"

namespace rkhawkes {

/// Competitor interaction families fitted with the same smoothed objective.
///
///   exponential:    g_{jl}(t) = a_{jl} exp(-beta_{jl} t), beta fitted per pair
///   gaussian_basis: g_{jl}(t) = sum_u a_u exp(-gamma (t - t_u)^2), a_u >= 0,
///                   t_u on a regular grid of [0, A]
///   bernstein:      g_{jl}(t) = sum_u a_u exp(-gamma u t)
/// All curves are truncated to (0, A].
enum class BasisKind { exponential, gaussian_basis, bernstein };

BasisKind parse_basis_kind(const std::string& name);
std::string to_string(BasisKind kind);

struct FeatureBasisModel final : public HawkesModel {
  BasisKind kind = BasisKind::bernstein;
  std::size_t u = 10;
  double gamma = 1.0;
  double support_bound = 5.0;
  std::vector<double> mu;
  std::vector<std::vector<Eigen::VectorXd>> coeffs;  ///< [j][l], length u (1 for exponential)
  Eigen::MatrixXd beta;                              ///< exponential rates, d x d
  LinkSpec link;
  double eta = 1.0;

  std::size_t dims() const override { return mu.size(); }
  double support() const override { return support_bound; }
  double baseline(std::size_t j) const override { return mu.at(j); }
  double interaction(std::size_t j, std::size_t l, double lag) const override;

  /// Value of basis function k (0-based) at lag t for the pair (j, l).
  double basis(std::size_t j, std::size_t l, std::size_t k, double t) const;
  bool nonneg() const noexcept { return kind == BasisKind::gaussian_basis; }
  void check_shape() const;
};

struct BasisFitOptions {
  BasisKind kind = BasisKind::bernstein;
  std::size_t u = 10;
  double gamma = 1.0;  ///< basis rate/width; initial beta for exponential
  double eta = 1.0;
  double support = 5.0;
  LinkSpec link;
  std::size_t m = 0;  ///< 0 selects max(1000, 2 max_j N_T^{(j)})
  OptimOptions optim;
};

struct BasisFit {
  FeatureBasisModel model;
  double objective = 0.0;
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  std::vector<std::string> terminations;
};

BasisFit fit_basis(const EventData& events, const BasisFitOptions& options);

/// sum_u a_u phi_u(t); throws DomainError unless 0 <= t <= A.
double basis_interaction_at(const FeatureBasisModel& model, std::size_t j, std::size_t l, double t);

std::string basis_model_to_json(const FeatureBasisModel& model);
FeatureBasisModel basis_model_from_json(const std::string& text);

}  // namespace rkhawkes
