#include "rkhawkes/kernel_math.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rkhawkes/errors.hpp"
#include "rkhawkes/util.hpp"

namespace rkhawkes {

namespace {
constexpr double kHalfSqrtPi = 0.5 * 1.7724538509055160272981674833411;  // sqrt(pi)/2
}

void KernelConfig::validate() const {
  if (!(std::isfinite(gamma) && gamma > 0.0)) throw ConfigError("kernel gamma must be > 0");
  if (!(std::isfinite(support) && support > 0.0)) throw ConfigError("kernel support must be > 0");
}

double gauss_kernel(double x, double y, const KernelConfig& cfg) {
  const double d = x - y;
  return std::exp(-cfg.gamma * d * d);
}

double erf_gamma(double x, double gamma) {
  const double s = std::sqrt(gamma);
  return std::erf(s * x) / s;
}

double G_gamma(double x, double gamma) {
  return x * erf_gamma(x, gamma) +
         std::expm1(-gamma * x * x) * std::numbers::inv_sqrtpi_v<double> / gamma;
}

double s_ell(double x, double y, std::span<const double> events, const KernelConfig& cfg) {
  const IndexRange rx = active_range(events, x, cfg.support);
  const IndexRange ry = active_range(events, y, cfg.support);
  double sum = 0.0;
  for (std::size_t i = rx.first; i < rx.last; ++i) {
    const double a = x - events[i];
    for (std::size_t v = ry.first; v < ry.last; ++v) {
      const double d = a - (y - events[v]);
      sum += std::exp(-cfg.gamma * d * d);
    }
  }
  return sum;
}

RFunction::RFunction(double horizon, std::span<const double> events, const KernelConfig& cfg)
    : cfg_(cfg), n_total_(static_cast<double>(events.size())) {
  for (double t : events) {
    const double c = std::max(0.0, std::min(horizon - t, cfg.support));
    if (c == cfg.support)
      n_full_ += 1.0;
    else
      tail_.push_back(c);
  }
}

double RFunction::operator()(double x) const {
  if (n_total_ == 0.0) return 0.0;
  const double g = cfg_.gamma;
  double sum = n_total_ * erf_gamma(x, g);
  if (n_full_ > 0.0) sum += n_full_ * erf_gamma(cfg_.support - x, g);
  for (double c : tail_) sum += erf_gamma(c - x, g);
  return kHalfSqrtPi * sum;
}

double RFunction::squared_norm() const {
  // sum_{i,v} [2 G(c_v) - G(c_v - c_i)], grouped by full/truncated windows.
  const double g = cfg_.gamma;
  const double a = cfg_.support;
  double sum_g = n_full_ * G_gamma(a, g);
  for (double c : tail_) sum_g += G_gamma(c, g);
  double cross = 0.0;
  for (double c : tail_) cross += 2.0 * n_full_ * G_gamma(a - c, g);
  for (double ci : tail_)
    for (double cv : tail_) cross += G_gamma(cv - ci, g);
  return kHalfSqrtPi * (2.0 * n_total_ * sum_g - cross);
}

double int_s(double x, double horizon, std::span<const double> events, const KernelConfig& cfg) {
  const IndexRange rx = active_range(events, x, cfg.support);
  if (rx.empty()) return 0.0;
  const RFunction r(horizon, events, cfg);
  double sum = 0.0;
  for (std::size_t i = rx.first; i < rx.last; ++i) sum += r(x - events[i]);
  return sum;
}

double double_int_s(double horizon, std::span<const double> events, const KernelConfig& cfg) {
  return RFunction(horizon, events, cfg).squared_norm();
}

double r_ell_at(double x, double horizon, std::span<const double> events, const KernelConfig& cfg) {
  return RFunction(horizon, events, cfg)(x);
}

double q_ujl_at(double x, double t_u, std::span<const double> events, const KernelConfig& cfg) {
  const IndexRange r = active_range(events, t_u, cfg.support);
  double sum = 0.0;
  for (std::size_t v = r.first; v < r.last; ++v) {
    const double d = x - (t_u - events[v]);
    sum += std::exp(-cfg.gamma * d * d);
  }
  return sum;
}

}  // namespace rkhawkes
