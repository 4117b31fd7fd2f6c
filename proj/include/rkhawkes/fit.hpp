#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rkhawkes/model.hpp"
#include "rkhawkes/objective.hpp"
#include "rkhawkes/optimizer.hpp"

namespace rkhawkes {

struct FitOptions {
  KernelConfig kernel;
  LinkSpec link;
  double eta = 1.0;
  /// Riemann grid size; 0 selects max(1000, 2 max_j N_T^{(j)}).
  std::size_t m = 0;
  double jitter_scale = 1e-10;
  OptimOptions optim;
};

/// Optimizer outcome summed over the independent per-dimension problems.
struct FitDiagnostics {
  std::size_t iterations = 0;
  std::size_t evaluations = 0;
  double projected_grad_norm = 0.0;       ///< worst dimension
  std::vector<std::string> terminations;  ///< one per dimension
};

struct RkhsFit {
  RkhsParams params;
  double objective = 0.0;
  FitDiagnostics diagnostics;
};

/// mu_j = N_j / T (1 / T for empty dimensions), alpha = 0, b = 0.
RkhsParams initial_params(std::shared_ptr<const EventData> events, const KernelConfig& cfg);

/// Minimizes the penalized smoothed objective, one dimension at a time,
/// with mu_j >= 0. Throws NumericalError from the optimizer.
RkhsFit fit_rkhs(std::shared_ptr<const EventData> events, const FitOptions& options);

/// Same, reusing already assembled matrices (which must match `events`).
RkhsFit fit_rkhs(std::shared_ptr<const EventData> events, const PrecomputedMatrices& matrices,
                 const FitOptions& options);

}  // namespace rkhawkes
