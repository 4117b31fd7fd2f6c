#include "rkhawkes/objective.hpp"

#include <algorithm>
#include <cmath>

#include "rkhawkes/errors.hpp"

namespace rkhawkes {

double LinkPair::phi1(double x) const {
  const double s = softplus(x, spec.omega);
  return spec.criterion == Criterion::mle ? s : s * s;
}

double LinkPair::phi2(double x) const {
  return spec.criterion == Criterion::mle ? log_softplus(x, spec.omega) : 2.0 * softplus(x, spec.omega);
}

double LinkPair::dphi1(double x) const {
  const double sig = softplus_prime(x, spec.omega);
  return spec.criterion == Criterion::mle ? sig : 2.0 * softplus(x, spec.omega) * sig;
}

double LinkPair::dphi2(double x) const {
  const double w = spec.omega;
  if (spec.criterion == Criterion::ls) return 2.0 * softplus_prime(x, w);
  // sigma(wx) / softplus(x) tends to w as wx -> -inf.
  if (w * x < -700.0) return w;
  return softplus_prime(x, w) / softplus(x, w);
}

LinkPair link_pair(const LinkSpec& link) {
  link.validate();
  return LinkPair{link};
}

void ObjectiveConfig::validate() const {
  link.validate();
  if (!(std::isfinite(eta) && eta > 0.0)) throw ConfigError("eta must be > 0");
  if (matrices == nullptr) throw ConfigError("objective has no precomputed matrices");
  if (matrices->m < 2) throw ConfigError("grid size M must be >= 2");
}

DimensionObjective::DimensionObjective(const ObjectiveConfig& cfg, std::size_t j)
    : mats_(cfg.matrices), link_(link_pair(cfg.link)), eta_(cfg.eta), j_(j) {
  cfg.validate();
  dims_ = mats_->dims();
  if (j >= dims_) throw ShapeError("dimension index out of range");
  block_ = mats_->block_size(j);
  size_ = 1 + dims_ * block_ + dims_;
  penalty_.reserve(dims_);
  for (std::size_t l = 0; l < dims_; ++l) {
    const auto& K = mats_->Kfull[j][l];
    penalty_.push_back(cfg.jitter_scale > 0.0 ? spectral_floor(K, cfg.jitter_scale * K.trace() / static_cast<double>(K.rows()))
                                              : K);
  }
}

double DimensionObjective::value(const Eigen::VectorXd& x) const {
  Eigen::VectorXd unused;
  return value_and_gradient(x, unused);
}

double DimensionObjective::value_and_gradient(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
  if (static_cast<std::size_t>(x.size()) != size_) throw ShapeError("parameter vector has wrong length");
  const auto& M = *mats_;
  const auto nalpha = static_cast<Eigen::Index>(dims_ * block_);
  const auto d = static_cast<Eigen::Index>(dims_);
  const double mu = x[0];
  const auto alpha = x.segment(1, nalpha);
  const auto b = x.segment(1 + nalpha, d);
  const double step = M.horizon / static_cast<double>(M.m);

  Eigen::VectorXd xg = M.Q[j_] * alpha + M.B * b;
  xg.array() += mu;
  Eigen::VectorXd xe = M.K[j_] * alpha + M.E[j_] * b;
  xe.array() += mu;

  double measure = 0.0;
  Eigen::VectorXd g1(xg.size());
  for (Eigen::Index n = 0; n < xg.size(); ++n) {
    measure += link_.phi1(xg[n]);
    g1[n] = step * link_.dphi1(xg[n]);
  }
  double data = 0.0;
  Eigen::VectorXd g2(xe.size());
  for (Eigen::Index n = 0; n < xe.size(); ++n) {
    data += link_.phi2(xe[n]);
    g2[n] = link_.dphi2(xe[n]);
  }

  double penalty = 0.0;
  grad.resize(static_cast<Eigen::Index>(size_));
  const auto bs = static_cast<Eigen::Index>(block_);
  for (std::size_t l = 0; l < dims_; ++l) {
    const auto off = static_cast<Eigen::Index>(l) * bs;
    const Eigen::VectorXd Ka = penalty_[l] * alpha.segment(off, bs);
    penalty += alpha.segment(off, bs).dot(Ka);
    grad.segment(1 + off, bs) = eta_ * Ka;
  }

  grad[0] = g1.sum() - g2.sum();
  grad.segment(1, nalpha) += M.Q[j_].transpose() * g1 - M.K[j_].transpose() * g2;
  grad.segment(1 + nalpha, d) = M.B.transpose() * g1 - M.E[j_].transpose() * g2;

  return step * measure - data + 0.5 * eta_ * penalty;
}

Eigen::VectorXd DimensionObjective::pack(const RkhsParams& theta) const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(size_));
  x[0] = theta.mu.at(j_);
  const auto bs = static_cast<Eigen::Index>(block_);
  for (std::size_t l = 0; l < dims_; ++l) {
    const auto& a = theta.alpha.at(j_).at(l);
    if (a.size() != bs) throw ShapeError("alpha block length does not match matrices");
    x.segment(static_cast<Eigen::Index>(alpha_offset(l)), bs) = a;
  }
  for (std::size_t l = 0; l < dims_; ++l)
    x[static_cast<Eigen::Index>(b_offset() + l)] = theta.b(static_cast<Eigen::Index>(j_), static_cast<Eigen::Index>(l));
  return x;
}

void DimensionObjective::unpack(const Eigen::VectorXd& x, RkhsParams& theta) const {
  theta.mu.at(j_) = x[0];
  const auto bs = static_cast<Eigen::Index>(block_);
  for (std::size_t l = 0; l < dims_; ++l)
    theta.alpha.at(j_).at(l) = x.segment(static_cast<Eigen::Index>(alpha_offset(l)), bs);
  for (std::size_t l = 0; l < dims_; ++l)
    theta.b(static_cast<Eigen::Index>(j_), static_cast<Eigen::Index>(l)) = x[static_cast<Eigen::Index>(b_offset() + l)];
}

namespace {

void check_matches(const RkhsParams& theta, const ObjectiveConfig& cfg) {
  cfg.validate();
  theta.check_shape();
  const auto& M = *cfg.matrices;
  if (theta.dims() != M.dims()) throw ShapeError("parameter dims differ from matrices");
  for (std::size_t j = 0; j < M.dims(); ++j)
    if (theta.anchor->count(j) != M.counts[j]) throw ShapeError("anchor event counts differ from matrices");
}

}  // namespace

double objective_value(const RkhsParams& theta, const ObjectiveConfig& cfg) {
  check_matches(theta, cfg);
  double total = 0.0;
  for (std::size_t j = 0; j < theta.dims(); ++j) {
    DimensionObjective f(cfg, j);
    total += f.value(f.pack(theta));
  }
  return total;
}

RkhsGradient objective_gradient(const RkhsParams& theta, const ObjectiveConfig& cfg) {
  check_matches(theta, cfg);
  const std::size_t d = theta.dims();
  RkhsGradient g;
  g.mu.resize(d);
  g.alpha.resize(d);
  g.b.resize(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  for (std::size_t j = 0; j < d; ++j) {
    DimensionObjective f(cfg, j);
    Eigen::VectorXd grad;
    f.value_and_gradient(f.pack(theta), grad);
    g.mu[j] = grad[0];
    const auto bs = static_cast<Eigen::Index>(cfg.matrices->block_size(j));
    for (std::size_t l = 0; l < d; ++l)
      g.alpha[j].push_back(grad.segment(static_cast<Eigen::Index>(f.alpha_offset(l)), bs));
    for (std::size_t l = 0; l < d; ++l)
      g.b(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = grad[static_cast<Eigen::Index>(f.b_offset() + l)];
  }
  return g;
}

std::size_t default_score_grid(const EventData& events) {
  return std::max<std::size_t>(1000, 2 * events.max_count());
}

LikelihoodScore exact_neg_log_likelihood(const HawkesModel& model, const EventData& events,
                                         std::size_t m_score) {
  if (model.dims() != events.dims()) throw ShapeError("model and events have different dims");
  if (m_score < 1) throw ConfigError("score grid must have at least one point");
  const double T = events.horizon();
  const double step = T / static_cast<double>(m_score);
  LikelihoodScore out;
  for (std::size_t j = 0; j < events.dims(); ++j) {
    double compensator = 0.0;
    for (std::size_t n = 0; n < m_score; ++n)
      compensator += model_intensity(model, events, j, static_cast<double>(n) * T / static_cast<double>(m_score));
    double logs = 0.0;
    for (double t : events.times(j)) {
      double lambda = model_intensity(model, events, j, t);
      if (lambda < kLogFloor) {
        lambda = kLogFloor;
        ++out.floored;
      }
      logs += std::log(lambda);
    }
    out.neg_log_likelihood += step * compensator - logs;
  }
  return out;
}

LikelihoodScore exact_neg_log_likelihood(const RkhsParams& theta, const EventData& events,
                                         std::size_t m_score) {
  return exact_neg_log_likelihood(RkhsModel(theta), events, m_score);
}

}  // namespace rkhawkes
