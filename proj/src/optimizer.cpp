#include "rkhawkes/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "rkhawkes/errors.hpp"

namespace rkhawkes {

void OptimOptions::validate(std::size_t n) const {
  if (!(grad_tol > 0.0) || !(f_tol > 0.0)) throw ConfigError("optimizer tolerances must be > 0");
  if (history < 1) throw ConfigError("optimizer history must be >= 1");
  if (lower_bounds.size() != 0 && static_cast<std::size_t>(lower_bounds.size()) != n)
    throw ConfigError("lower_bounds length differs from parameter count");
}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::gradient: return "gradient";
    case Termination::f_tol: return "f_tol";
    case Termination::max_iters: return "max_iters";
    case Termination::line_search: return "line_search";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kArmijo = 1e-4;
constexpr double kCurvature = 0.9;

std::vector<double> to_std(const Eigen::VectorXd& x) { return {x.data(), x.data() + x.size()}; }

struct Point {
  Eigen::VectorXd x;
  Eigen::VectorXd g;
  double f = 0.0;
};

class Minimizer {
 public:
  Minimizer(const ValueAndGradient& f, const OptimOptions& opts, Eigen::Index n)
      : f_(f), opts_(opts), lower_(opts.lower_bounds.size() ? opts.lower_bounds : Eigen::VectorXd::Constant(n, -kInf)) {}

  double eval(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    ++evaluations_;
    return f_(x, g);
  }

  bool finite(double f, const Eigen::VectorXd& g) const { return std::isfinite(f) && g.allFinite(); }

  // Components fixed at a lower bound with the gradient pointing outward.
  Eigen::Array<bool, Eigen::Dynamic, 1> fixed_mask(const Point& p) const {
    return (p.x.array() <= lower_.array()) && (p.g.array() > 0.0);
  }

  double projected_grad_norm(const Point& p) const {
    double m = 0.0;
    for (Eigen::Index i = 0; i < p.x.size(); ++i) {
      const double step = std::max(lower_[i], p.x[i] - p.g[i]) - p.x[i];
      m = std::max(m, std::abs(step));
    }
    return m;
  }

  Eigen::VectorXd project(Eigen::VectorXd x) const { return x.cwiseMax(lower_); }

  Eigen::VectorXd direction(const Point& p, const Eigen::Array<bool, Eigen::Dynamic, 1>& fixed) const {
    auto mask = [&](Eigen::VectorXd v) {
      for (Eigen::Index i = 0; i < v.size(); ++i)
        if (fixed[i]) v[i] = 0.0;
      return v;
    };
    Eigen::VectorXd q = mask(p.g);
    const std::size_t k = s_.size();
    std::vector<double> a(k);
    std::vector<Eigen::VectorXd> sm(k), ym(k);
    std::vector<double> rho(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      sm[i] = mask(s_[i]);
      ym[i] = mask(y_[i]);
      const double sy = sm[i].dot(ym[i]);
      rho[i] = sy > 1e-12 * ym[i].squaredNorm() && sy > 0.0 ? 1.0 / sy : 0.0;
    }
    for (std::size_t i = k; i-- > 0;) {
      a[i] = rho[i] * sm[i].dot(q);
      q -= a[i] * ym[i];
    }
    double scale = 1.0;
    for (std::size_t i = k; i-- > 0;)
      if (rho[i] > 0.0) {
        scale = 1.0 / (rho[i] * ym[i].squaredNorm());
        break;
      }
    q *= scale;
    for (std::size_t i = 0; i < k; ++i) {
      const double beta = rho[i] * ym[i].dot(q);
      q += (a[i] - beta) * sm[i];
    }
    return -mask(q);
  }

  // Wolfe search on phi(t) = f(x + t d) for t in (0, t_max].
  bool wolfe(const Point& p, const Eigen::VectorXd& d, double t0, double t_max, Point& out) {
    const double dphi0 = p.g.dot(d);
    double t_prev = 0.0, f_prev = p.f, dphi_prev = dphi0;
    double t = std::min(t0, t_max);
    Point trial;
    bool have_armijo = false;
    Point best;
    for (int it = 0; it < 40; ++it) {
      trial.x = project(p.x + t * d);
      trial.f = eval(trial.x, trial.g);
      const bool ok = finite(trial.f, trial.g);
      const double dphi = ok ? trial.g.dot(d) : 0.0;
      if (!ok || trial.f > p.f + kArmijo * t * dphi0 || (it > 0 && trial.f >= f_prev))
        return zoom(p, d, dphi0, t_prev, f_prev, dphi_prev, t, ok ? trial.f : kInf, out, have_armijo ? &best : nullptr);
      have_armijo = true;
      best = trial;
      if (std::abs(dphi) <= -kCurvature * dphi0) {
        out = std::move(trial);
        return true;
      }
      if (dphi >= 0.0) return zoom(p, d, dphi0, t, trial.f, dphi, t_prev, f_prev, out, &best);
      if (t >= t_max) {
        out = std::move(trial);
        return true;
      }
      t_prev = t;
      f_prev = trial.f;
      dphi_prev = dphi;
      t = std::min(2.0 * t, t_max);
    }
    if (have_armijo) {
      out = best;
      return true;
    }
    return false;
  }

  static double cubic_min(double a, double fa, double da, double b, double fb, double db) {
    const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
    const double disc = d1 * d1 - da * db;
    if (!(disc >= 0.0) || !std::isfinite(fb)) return 0.5 * (a + b);
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    return b - (b - a) * (db + d2 - d1) / (db - da + 2.0 * d2);
  }

  bool zoom(const Point& p, const Eigen::VectorXd& d, double dphi0, double lo, double f_lo, double d_lo, double hi,
            double f_hi, Point& out, const Point* fallback) {
    Point trial;
    Point best_pt;
    bool have = fallback != nullptr;
    if (have) best_pt = *fallback;
    double d_hi = std::numeric_limits<double>::quiet_NaN();
    for (int it = 0; it < 30; ++it) {
      const double width = hi - lo;
      double t = std::isfinite(d_hi) ? cubic_min(lo, f_lo, d_lo, hi, f_hi, d_hi) : 0.5 * (lo + hi);
      const double a = std::min(lo, hi), b = std::max(lo, hi);
      const double margin = 0.1 * (b - a);
      if (!(t > a + margin && t < b - margin)) t = 0.5 * (lo + hi);
      if (std::abs(width) < 1e-16 * std::max(1.0, std::abs(lo))) break;
      trial.x = project(p.x + t * d);
      trial.f = eval(trial.x, trial.g);
      const bool ok = finite(trial.f, trial.g);
      const double dphi = ok ? trial.g.dot(d) : 0.0;
      if (!ok || trial.f > p.f + kArmijo * t * dphi0 || trial.f >= f_lo) {
        hi = t;
        f_hi = ok ? trial.f : kInf;
        d_hi = ok ? dphi : std::numeric_limits<double>::quiet_NaN();
        continue;
      }
      if (!have || trial.f < best_pt.f) {
        best_pt = trial;
        have = true;
      }
      if (std::abs(dphi) <= -kCurvature * dphi0) {
        out = std::move(trial);
        return true;
      }
      if (dphi * (hi - lo) >= 0.0) {
        hi = lo;
        f_hi = f_lo;
        d_hi = d_lo;
      }
      lo = t;
      f_lo = trial.f;
      d_lo = dphi;
    }
    if (have && best_pt.f < p.f) {
      out = best_pt;
      return true;
    }
    return false;
  }

  // Armijo backtracking along the projection arc P(x + t d).
  bool projected_backtrack(const Point& p, const Eigen::VectorXd& d, double t, Point& out) {
    for (int it = 0; it < 60; ++it) {
      out.x = project(p.x + t * d);
      out.f = eval(out.x, out.g);
      if (finite(out.f, out.g) && out.f <= p.f + kArmijo * p.g.dot(out.x - p.x)) return true;
      t *= 0.5;
    }
    return false;
  }

  void remember(const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
    if (s.dot(y) <= 1e-12 * y.squaredNorm()) return;
    s_.push_back(s);
    y_.push_back(y);
    if (s_.size() > opts_.history) {
      s_.pop_front();
      y_.pop_front();
    }
  }

  void reset() {
    s_.clear();
    y_.clear();
  }

  const ValueAndGradient& f_;
  const OptimOptions& opts_;
  Eigen::VectorXd lower_;
  std::deque<Eigen::VectorXd> s_, y_;
  std::size_t evaluations_ = 0;
};

}  // namespace

OptimResult minimize(const ValueAndGradient& f, const Eigen::VectorXd& x0, const OptimOptions& opts) {
  opts.validate(static_cast<std::size_t>(x0.size()));
  Minimizer mz(f, opts, x0.size());
  if ((x0.array() < mz.lower_.array()).any()) throw ConfigError("x0 violates lower bounds");

  Point cur;
  cur.x = x0;
  cur.f = mz.eval(cur.x, cur.g);
  if (!mz.finite(cur.f, cur.g)) throw NumericalError("non-finite objective at the starting point", to_std(cur.x));

  OptimResult res;
  res.trace.push_back(cur.f);
  res.reason = Termination::max_iters;
  for (std::size_t iter = 0;; ++iter) {
    res.projected_grad_norm = mz.projected_grad_norm(cur);
    if (res.projected_grad_norm <= opts.grad_tol) {
      res.reason = Termination::gradient;
      break;
    }
    if (iter >= opts.max_iters) {
      res.reason = Termination::max_iters;
      break;
    }
    const auto fixed = mz.fixed_mask(cur);
    Eigen::VectorXd d = mz.direction(cur, fixed);
    double slope = cur.g.dot(d);
    if (!(slope < 0.0)) {
      mz.reset();
      d = -cur.g;
      for (Eigen::Index i = 0; i < d.size(); ++i)
        if (fixed[i]) d[i] = 0.0;
      slope = cur.g.dot(d);
    }

    // Largest step keeping every variable feasible.
    double t_max = kInf;
    for (Eigen::Index i = 0; i < d.size(); ++i)
      if (d[i] < 0.0 && std::isfinite(mz.lower_[i])) t_max = std::min(t_max, (mz.lower_[i] - cur.x[i]) / d[i]);
    const double t0 = mz.s_.empty() ? std::min(1.0, 1.0 / d.norm()) : 1.0;

    Point next;
    bool ok = false;
    if (t_max >= t0)
      ok = mz.wolfe(cur, d, t0, t_max, next);
    else
      ok = mz.projected_backtrack(cur, d, t0, next);
    if (!ok || !(next.f <= cur.f)) {
      if (!mz.s_.empty()) {
        mz.reset();
        continue;
      }
      res.reason = Termination::line_search;
      break;
    }
    if (!mz.finite(next.f, next.g)) throw NumericalError("non-finite objective at an accepted iterate", to_std(next.x));

    mz.remember(next.x - cur.x, next.g - cur.g);
    const double decrease = cur.f - next.f;
    cur = std::move(next);
    res.trace.push_back(cur.f);
    ++res.iterations;
    if (decrease <= opts.f_tol * std::max({std::abs(cur.f), std::abs(res.trace[res.trace.size() - 2]), 1.0})) {
      res.projected_grad_norm = mz.projected_grad_norm(cur);
      res.reason = res.projected_grad_norm <= opts.grad_tol ? Termination::gradient : Termination::f_tol;
      break;
    }
  }
  res.x = std::move(cur.x);
  res.value = cur.f;
  res.evaluations = mz.evaluations_;
  return res;
}

}  // namespace rkhawkes
