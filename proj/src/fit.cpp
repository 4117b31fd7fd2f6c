#include "rkhawkes/fit.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/Cholesky>

#include "rkhawkes/errors.hpp"
#include "rkhawkes/precompute.hpp"

namespace rkhawkes {

namespace {

// Lower Cholesky factor of the penalty Gram matrix, so that alpha = L^{-T} beta
// turns the penalty into |beta|^2. The raw Gram matrices are too badly
// conditioned for quasi-Newton steps in alpha.
Eigen::MatrixXd penalty_factor(const Eigen::MatrixXd& K, double jitter_scale) {
  const auto n = K.rows();
  const double scale = K.trace() / static_cast<double>(n);
  if (!(scale > 0.0)) return Eigen::MatrixXd::Identity(n, n);
  double jitter = jitter_scale * scale;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(spectral_floor(K, jitter));
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd L = llt.matrixL();
      if (L.diagonal().minCoeff() > 0.0) return L;
    }
    jitter = std::max(jitter * 10.0, 1e-12 * scale);
  }
  return Eigen::MatrixXd::Identity(n, n);
}

class WhitenedObjective {
 public:
  WhitenedObjective(const DimensionObjective& f, const PrecomputedMatrices& mats, std::size_t j, double jitter_scale)
      : f_(f), dims_(mats.dims()), block_(static_cast<Eigen::Index>(mats.block_size(j))) {
    for (std::size_t l = 0; l < dims_; ++l) factors_.push_back(penalty_factor(mats.Kfull[j][l], jitter_scale));
  }

  Eigen::VectorXd to_alpha(const Eigen::VectorXd& y) const {
    Eigen::VectorXd x = y;
    for (std::size_t l = 0; l < dims_; ++l) {
      auto seg = x.segment(static_cast<Eigen::Index>(f_.alpha_offset(l)), block_);
      factors_[l].transpose().triangularView<Eigen::Upper>().solveInPlace(seg);
    }
    return x;
  }

  Eigen::VectorXd from_alpha(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = x;
    for (std::size_t l = 0; l < dims_; ++l) {
      const auto off = static_cast<Eigen::Index>(f_.alpha_offset(l));
      y.segment(off, block_) = factors_[l].transpose().triangularView<Eigen::Upper>() * x.segment(off, block_);
    }
    return y;
  }

  double operator()(const Eigen::VectorXd& y, Eigen::VectorXd& grad) const {
    const double v = f_.value_and_gradient(to_alpha(y), grad);
    for (std::size_t l = 0; l < dims_; ++l) {
      auto seg = grad.segment(static_cast<Eigen::Index>(f_.alpha_offset(l)), block_);
      factors_[l].triangularView<Eigen::Lower>().solveInPlace(seg);
    }
    return v;
  }

 private:
  const DimensionObjective& f_;
  std::size_t dims_;
  Eigen::Index block_;
  std::vector<Eigen::MatrixXd> factors_;
};

}  // namespace

RkhsParams initial_params(std::shared_ptr<const EventData> events, const KernelConfig& cfg) {
  RkhsParams p = RkhsParams::zeros(events, cfg);
  const double T = events->horizon();
  for (std::size_t j = 0; j < p.dims(); ++j) {
    const auto n = events->count(j);
    p.mu[j] = n > 0 ? static_cast<double>(n) / T : 1.0 / T;
  }
  return p;
}

RkhsFit fit_rkhs(std::shared_ptr<const EventData> events, const FitOptions& options) {
  options.kernel.validate();
  const std::size_t m = options.m ? options.m : default_grid_size(*events);
  const PrecomputedMatrices mats = build_matrices(*events, options.kernel, m);
  return fit_rkhs(std::move(events), mats, options);
}

RkhsFit fit_rkhs(std::shared_ptr<const EventData> events, const PrecomputedMatrices& matrices,
                 const FitOptions& options) {
  ObjectiveConfig cfg{options.link, options.eta, &matrices, options.jitter_scale};
  cfg.validate();
  if (matrices.dims() != events->dims()) throw ShapeError("matrices were built for other events");

  RkhsFit out;
  out.params = initial_params(events, matrices.cfg);
  out.params.link = options.link;
  out.params.eta = options.eta;
  for (std::size_t j = 0; j < events->dims(); ++j) {
    DimensionObjective f(cfg, j);
    const WhitenedObjective w(f, matrices, j, options.jitter_scale);
    const Eigen::VectorXd y0 = w.from_alpha(f.pack(out.params));
    OptimOptions opts = options.optim;
    opts.lower_bounds = Eigen::VectorXd::Constant(y0.size(), -std::numeric_limits<double>::infinity());
    opts.lower_bounds[0] = 0.0;
    const OptimResult r = minimize([&w](const Eigen::VectorXd& y, Eigen::VectorXd& g) { return w(y, g); }, y0, opts);
    f.unpack(w.to_alpha(r.x), out.params);
    out.objective += r.value;
    out.diagnostics.iterations += r.iterations;
    out.diagnostics.evaluations += r.evaluations;
    out.diagnostics.projected_grad_norm = std::max(out.diagnostics.projected_grad_norm, r.projected_grad_norm);
    out.diagnostics.terminations.push_back(to_string(r.reason));
  }
  return out;
}

}  // namespace rkhawkes
