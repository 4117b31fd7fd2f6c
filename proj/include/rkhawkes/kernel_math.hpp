#pragma once

#include <span>
#include <vector>

namespace rkhawkes {

/// Gaussian kernel width and interaction support.
struct KernelConfig {
  double gamma = 1.0;    ///< k(x, y) = exp(-gamma (x - y)^2)
  double support = 5.0;  ///< interactions live on (0, support]

  /// Throws ConfigError unless both fields are finite and positive.
  void validate() const;
};

double gauss_kernel(double x, double y, const KernelConfig& cfg);

/// gamma^{-1/2} erf(gamma^{1/2} x); derivative is (2/sqrt(pi)) exp(-gamma x^2).
double erf_gamma(double x, double gamma);

/// Antiderivative of erf_gamma vanishing at 0 (even in x).
double G_gamma(double x, double gamma);

/// s(x, y) = sum_{i,v} k(x - T_i, y - T_v) 1{0 < x - T_i <= A} 1{0 < y - T_v <= A}.
double s_ell(double x, double y, std::span<const double> events, const KernelConfig& cfg);

/// Integral over t in [0, horizon] of s(x, t), closed form.
double int_s(double x, double horizon, std::span<const double> events, const KernelConfig& cfg);

/// Double integral of s over [0, horizon]^2, closed form.
double double_int_s(double horizon, std::span<const double> events, const KernelConfig& cfg);

/// r(x) = sum_v integral of k(x, u) over u in (0, min(horizon - T_v, A)].
double r_ell_at(double x, double horizon, std::span<const double> events, const KernelConfig& cfg);

/// q(x) = sum_v k(x, t_u - T_v) 1{0 < t_u - T_v <= A}.
double q_ujl_at(double x, double t_u, std::span<const double> events, const KernelConfig& cfg);

/// Precomputed evaluator for r_ell over one event sequence.
///
/// Events whose truncated window min(horizon - T_v, A) equals A share a single
/// term, so evaluation costs O(1 + #events within A of the horizon).
class RFunction {
 public:
  RFunction(double horizon, std::span<const double> events, const KernelConfig& cfg);
  double operator()(double x) const;
  /// <r, r> in the RKHS, i.e. the double integral of s over [0, horizon]^2.
  double squared_norm() const;

 private:
  KernelConfig cfg_;
  double n_total_ = 0.0;
  double n_full_ = 0.0;
  std::vector<double> tail_;  // truncated window lengths, all < A
};

}  // namespace rkhawkes
