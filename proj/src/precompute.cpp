#include "rkhawkes/precompute.hpp"

#include <algorithm>
#include <cmath>

#include "rkhawkes/errors.hpp"
#include "rkhawkes/util.hpp"

namespace rkhawkes {

namespace {

double pair_sum(std::span<const double> a, std::span<const double> b, double gamma) {
  double sum = 0.0;
  for (double x : a)
    for (double y : b) {
      const double d = x - y;
      sum += std::exp(-gamma * d * d);
    }
  return sum;
}

double r_sum(const RFunction& r, std::span<const double> lags) {
  double sum = 0.0;
  for (double x : lags) sum += r(x);
  return sum;
}

}  // namespace

PrecomputedMatrices build_matrices(const EventData& events, const KernelConfig& cfg, std::size_t m) {
  cfg.validate();
  if (m < 2) throw ConfigError("grid size M must be >= 2");
  const std::size_t d = events.dims();
  const double T = events.horizon();

  PrecomputedMatrices out;
  out.cfg = cfg;
  out.horizon = T;
  out.m = m;
  out.counts.resize(d);
  for (std::size_t j = 0; j < d; ++j) out.counts[j] = events.count(j);

  out.grid.resize(static_cast<Eigen::Index>(m));
  for (std::size_t n = 0; n < m; ++n)
    out.grid[static_cast<Eigen::Index>(n)] = static_cast<double>(n) * T / static_cast<double>(m);
  const std::span<const double> grid(out.grid.data(), m);

  // Per source dimension l: active lags at grid points and at every event time of every j.
  std::vector<ActiveLagTable> grid_lags;
  std::vector<std::vector<ActiveLagTable>> event_lags(d);  // [l][j]
  std::vector<RFunction> rfun;
  grid_lags.reserve(d);
  rfun.reserve(d);
  for (std::size_t l = 0; l < d; ++l) {
    grid_lags.emplace_back(grid, events.times(l), cfg.support);
    rfun.emplace_back(T, events.times(l), cfg);
    event_lags[l].reserve(d);
    for (std::size_t j = 0; j < d; ++j) event_lags[l].emplace_back(events.times(j), events.times(l), cfg.support);
  }

  out.B.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d));
  std::vector<Eigen::VectorXd> grid_r(d);  // column u = 0 of Q^{(jl)}, shared over j
  for (std::size_t l = 0; l < d; ++l) {
    grid_r[l].resize(static_cast<Eigen::Index>(m));
    for (std::size_t n = 0; n < m; ++n) {
      const auto lags = grid_lags[l].at(n);
      out.B(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l)) = static_cast<double>(lags.size());
      grid_r[l][static_cast<Eigen::Index>(n)] = r_sum(rfun[l], lags);
    }
  }

  out.Q.resize(d);
  out.K.resize(d);
  out.E.resize(d);
  out.Kfull.assign(d, std::vector<Eigen::MatrixXd>(d));
  for (std::size_t j = 0; j < d; ++j) {
    const auto nj = static_cast<Eigen::Index>(events.count(j));
    const Eigen::Index bs = nj + 1;
    auto& Q = out.Q[j];
    auto& E = out.E[j];
    Q.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(d) * bs);
    E.resize(nj, static_cast<Eigen::Index>(d));
    for (std::size_t l = 0; l < d; ++l) {
      const Eigen::Index col0 = static_cast<Eigen::Index>(l) * bs;
      const ActiveLagTable& at_events = event_lags[l][j];

      Q.col(col0) = grid_r[l];
      for (Eigen::Index u = 1; u <= nj; ++u) {
        const auto lu = at_events.at(static_cast<std::size_t>(u - 1));
        for (std::size_t n = 0; n < m; ++n)
          Q(static_cast<Eigen::Index>(n), col0 + u) = lu.empty() ? 0.0 : pair_sum(grid_lags[l].at(n), lu, cfg.gamma);
      }

      auto& Kf = out.Kfull[j][l];
      Kf.resize(bs, bs);
      Kf(0, 0) = rfun[l].squared_norm();
      for (Eigen::Index u = 1; u <= nj; ++u) {
        const auto lu = at_events.at(static_cast<std::size_t>(u - 1));
        const double v = r_sum(rfun[l], lu);
        Kf(0, u) = v;
        Kf(u, 0) = v;
        E(u - 1, static_cast<Eigen::Index>(l)) = static_cast<double>(lu.size());
        for (Eigen::Index n = u; n <= nj; ++n) {
          const double s = pair_sum(at_events.at(static_cast<std::size_t>(n - 1)), lu, cfg.gamma);
          Kf(n, u) = s;
          Kf(u, n) = s;
        }
      }
    }
    auto& K = out.K[j];
    K.resize(nj, static_cast<Eigen::Index>(d) * bs);
    for (std::size_t l = 0; l < d; ++l)
      K.middleCols(static_cast<Eigen::Index>(l) * bs, bs) = out.Kfull[j][l].bottomRows(nj);
  }
  return out;
}

Eigen::MatrixXd spectral_floor(const Eigen::MatrixXd& K, double jitter) {
  Eigen::MatrixXd out = K;
  out.diagonal().array() += jitter;
  return out;
}

double default_jitter(const Eigen::MatrixXd& K) {
  if (K.rows() == 0) return 0.0;
  return 1e-10 * K.trace() / static_cast<double>(K.rows());
}

std::size_t default_grid_size(const EventData& events) {
  return std::max<std::size_t>(1000, 2 * events.max_count());
}

}  // namespace rkhawkes
