#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "rkhawkes/events.hpp"
#include "rkhawkes/kernel_math.hpp"

namespace rkhawkes {

/// Design matrices of the representer-form objective for one training set.
///
/// For each target dimension j the free parameters are laid out as
/// alpha^{(j)} = [alpha^{(j1)}; ...; alpha^{(jd)}], each block of length
/// N_j + 1 (entry 0 multiplies r_l, entry u multiplies q_{ujl}).
struct PrecomputedMatrices {
  KernelConfig cfg;
  double horizon = 0.0;
  std::size_t m = 0;
  std::vector<std::size_t> counts;  ///< N_T^{(j)}

  Eigen::VectorXd grid;                         ///< tau_n = n T / M, n = 0..M-1
  std::vector<Eigen::MatrixXd> Q;               ///< [j]: M x d(N_j + 1)
  std::vector<std::vector<Eigen::MatrixXd>> Kfull;  ///< [j][l]: (N_j + 1)^2 Gram blocks
  std::vector<Eigen::MatrixXd> K;               ///< [j]: N_j x d(N_j + 1), rows 1.. of Kfull
  Eigen::MatrixXd B;                            ///< M x d active counts at grid points
  std::vector<Eigen::MatrixXd> E;               ///< [j]: N_j x d active counts at events of j

  std::size_t dims() const noexcept { return counts.size(); }
  std::size_t block_size(std::size_t j) const { return counts.at(j) + 1; }
};

/// Assembles every matrix once. Requires m >= 2 and a validated kernel config.
PrecomputedMatrices build_matrices(const EventData& events, const KernelConfig& cfg, std::size_t m);

/// K + jitter I.
Eigen::MatrixXd spectral_floor(const Eigen::MatrixXd& K, double jitter);

/// 1e-10 trace(K) / dim(K), zero for an empty matrix.
double default_jitter(const Eigen::MatrixXd& K);

/// Riemann grid size used for fitting: max(1000, 2 max_j N_T^{(j)}).
std::size_t default_grid_size(const EventData& events);

}  // namespace rkhawkes
