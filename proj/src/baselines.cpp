#include "rkhawkes/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "rkhawkes/errors.hpp"
#include "rkhawkes/objective.hpp"
#include "rkhawkes/precompute.hpp"
#include "rkhawkes/util.hpp"

namespace rkhawkes {

BasisKind parse_basis_kind(const std::string& name) {
  if (name == "exponential") return BasisKind::exponential;
  if (name == "gaussian_basis" || name == "gaussian") return BasisKind::gaussian_basis;
  if (name == "bernstein") return BasisKind::bernstein;
  throw ConfigError("unknown basis kind '" + name + "' (expected exponential, gaussian_basis or bernstein)");
}

std::string to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::exponential: return "exponential";
    case BasisKind::gaussian_basis: return "gaussian_basis";
    case BasisKind::bernstein: return "bernstein";
  }
  return "unknown";
}

namespace {

double fixed_basis(BasisKind kind, std::size_t u, double gamma, double support, std::size_t k, double t) {
  if (kind == BasisKind::bernstein) return std::exp(-gamma * static_cast<double>(k + 1) * t);
  const double center = u > 1 ? static_cast<double>(k) * support / static_cast<double>(u - 1) : 0.0;
  const double d = t - center;
  return std::exp(-gamma * d * d);
}

}  // namespace

double FeatureBasisModel::basis(std::size_t j, std::size_t l, std::size_t k, double t) const {
  if (kind == BasisKind::exponential) return std::exp(-beta(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) * t);
  return fixed_basis(kind, u, gamma, support_bound, k, t);
}

double FeatureBasisModel::interaction(std::size_t j, std::size_t l, double lag) const {
  const Eigen::VectorXd& a = coeffs.at(j).at(l);
  double v = 0.0;
  for (Eigen::Index k = 0; k < a.size(); ++k)
    if (a[k] != 0.0) v += a[k] * basis(j, l, static_cast<std::size_t>(k), lag);
  return v;
}

void FeatureBasisModel::check_shape() const {
  const std::size_t d = mu.size();
  const std::size_t width = kind == BasisKind::exponential ? 1 : u;
  if (coeffs.size() != d) throw ShapeError("coeffs has wrong number of rows");
  for (const auto& row : coeffs) {
    if (row.size() != d) throw ShapeError("coeffs row has wrong length");
    for (const auto& a : row)
      if (a.size() != static_cast<Eigen::Index>(width)) throw ShapeError("coeff block has wrong length");
  }
  if (kind == BasisKind::exponential &&
      (beta.rows() != static_cast<Eigen::Index>(d) || beta.cols() != static_cast<Eigen::Index>(d)))
    throw ShapeError("beta must be d x d");
}

double basis_interaction_at(const FeatureBasisModel& model, std::size_t j, std::size_t l, double t) {
  if (!(t >= 0.0 && t <= model.support_bound)) throw DomainError("lag " + format_double(t) + " outside [0, A]");
  return model.interaction(j, l, t);
}

namespace {

// Penalized smoothed objective for a fixed linear basis, one target dimension.
// x = [mu_j, a^{(j1)}, ..., a^{(jd)}].
class LinearBasisObjective {
 public:
  LinearBasisObjective(const Eigen::MatrixXd& grid_design, Eigen::MatrixXd event_design, double step,
                       const LinkPair& link, double eta)
      : Xg_(grid_design), Xe_(std::move(event_design)), step_(step), link_(link), eta_(eta) {}

  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
    const Eigen::Index p = Xg_.cols();
    const auto a = x.segment(1, p);
    Eigen::VectorXd xg = Xg_ * a;
    xg.array() += x[0];
    Eigen::VectorXd xe = Xe_ * a;
    xe.array() += x[0];
    double measure = 0.0, data = 0.0;
    Eigen::VectorXd g1(xg.size()), g2(xe.size());
    for (Eigen::Index n = 0; n < xg.size(); ++n) {
      measure += link_.phi1(xg[n]);
      g1[n] = step_ * link_.dphi1(xg[n]);
    }
    for (Eigen::Index n = 0; n < xe.size(); ++n) {
      data += link_.phi2(xe[n]);
      g2[n] = link_.dphi2(xe[n]);
    }
    grad.resize(x.size());
    grad[0] = g1.sum() - g2.sum();
    grad.segment(1, p) = Xg_.transpose() * g1 - Xe_.transpose() * g2 + eta_ * a;
    return step_ * measure - data + 0.5 * eta_ * a.squaredNorm();
  }

 private:
  const Eigen::MatrixXd& Xg_;
  Eigen::MatrixXd Xe_;
  double step_;
  LinkPair link_;
  double eta_;
};

// Exponential kernels with per-pair rates, one target dimension.
// x = [mu_j, a_{j1..jd}, beta_{j1..jd}].
class ExponentialObjective {
 public:
  ExponentialObjective(const std::vector<ActiveLagTable>& grid_lags, const std::vector<ActiveLagTable>& event_lags,
                       double step, const LinkPair& link, double eta)
      : grid_(grid_lags), events_(event_lags), step_(step), link_(link), eta_(eta) {}

  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const {
    const std::size_t d = grid_.size();
    const auto D = static_cast<Eigen::Index>(d);
    grad = Eigen::VectorXd::Zero(x.size());
    double value = 0.0;
    // sign +1 with phi1 on the grid, -1 with phi2 at the events.
    auto accumulate = [&](const std::vector<ActiveLagTable>& tables, bool on_grid) {
      const std::size_t points = tables.front().points();
      std::vector<double> f(d), df(d);
      for (std::size_t n = 0; n < points; ++n) {
        double pre = x[0];
        for (std::size_t l = 0; l < d; ++l) {
          const double b = x[1 + D + static_cast<Eigen::Index>(l)];
          double s = 0.0, ds = 0.0;
          for (double lag : tables[l].at(n)) {
            const double e = std::exp(-b * lag);
            s += e;
            ds -= lag * e;
          }
          f[l] = s;
          df[l] = ds;
          pre += x[1 + static_cast<Eigen::Index>(l)] * s;
        }
        double w = 0.0;
        if (on_grid) {
          value += step_ * link_.phi1(pre);
          w = step_ * link_.dphi1(pre);
        } else {
          value -= link_.phi2(pre);
          w = -link_.dphi2(pre);
        }
        grad[0] += w;
        for (std::size_t l = 0; l < d; ++l) {
          const auto k = static_cast<Eigen::Index>(l);
          grad[1 + k] += w * f[l];
          grad[1 + D + k] += w * x[1 + k] * df[l];
        }
      }
    };
    accumulate(grid_, true);
    if (events_.front().points() > 0) accumulate(events_, false);
    const auto a = x.segment(1, D);
    grad.segment(1, D) += eta_ * a;
    return value + 0.5 * eta_ * a.squaredNorm();
  }

 private:
  const std::vector<ActiveLagTable>& grid_;
  const std::vector<ActiveLagTable>& events_;
  double step_;
  LinkPair link_;
  double eta_;
};

}  // namespace

BasisFit fit_basis(const EventData& events, const BasisFitOptions& options) {
  if (!(options.gamma > 0.0)) throw ConfigError("basis gamma must be > 0");
  if (!(options.eta > 0.0)) throw ConfigError("eta must be > 0");
  if (!(options.support > 0.0)) throw ConfigError("support must be > 0");
  if (options.kind != BasisKind::exponential && options.u < 1) throw ConfigError("basis size must be >= 1");
  const LinkPair link = link_pair(options.link);
  const std::size_t d = events.dims();
  const std::size_t m = options.m ? options.m : default_grid_size(events);
  if (m < 2) throw ConfigError("grid size M must be >= 2");
  const double T = events.horizon();
  const double step = T / static_cast<double>(m);
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> grid(m);
  for (std::size_t n = 0; n < m; ++n) grid[n] = static_cast<double>(n) * T / static_cast<double>(m);

  BasisFit out;
  FeatureBasisModel& model = out.model;
  model.kind = options.kind;
  model.u = options.kind == BasisKind::exponential ? 1 : options.u;
  model.gamma = options.gamma;
  model.support_bound = options.support;
  model.link = options.link;
  model.eta = options.eta;
  model.mu.assign(d, 0.0);
  model.coeffs.assign(d, std::vector<Eigen::VectorXd>(d, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.u))));
  model.beta = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d),
                                         options.kind == BasisKind::exponential ? options.gamma : 0.0);

  std::vector<ActiveLagTable> grid_lags;
  for (std::size_t l = 0; l < d; ++l) grid_lags.emplace_back(grid, events.times(l), options.support);

  auto start_mu = [&](std::size_t j) {
    const auto n = events.count(j);
    return n > 0 ? static_cast<double>(n) / T : 1.0 / T;
  };
  auto record = [&](const OptimResult& r) {
    out.objective += r.value;
    out.iterations += r.iterations;
    out.evaluations += r.evaluations;
    out.terminations.push_back(to_string(r.reason));
  };

  if (options.kind == BasisKind::exponential) {
    const auto D = static_cast<Eigen::Index>(d);
    for (std::size_t j = 0; j < d; ++j) {
      std::vector<ActiveLagTable> event_lags;
      for (std::size_t l = 0; l < d; ++l) event_lags.emplace_back(events.times(j), events.times(l), options.support);
      ExponentialObjective f(grid_lags, event_lags, step, link, options.eta);
      Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1 + 2 * D);
      x0[0] = start_mu(j);
      x0.tail(D).setConstant(options.gamma);
      OptimOptions opts = options.optim;
      opts.lower_bounds = Eigen::VectorXd::Constant(x0.size(), -kInf);
      opts.lower_bounds[0] = 0.0;
      opts.lower_bounds.tail(D).setZero();
      const OptimResult r = minimize([&f](const Eigen::VectorXd& x, Eigen::VectorXd& g) { return f(x, g); }, x0, opts);
      model.mu[j] = r.x[0];
      for (std::size_t l = 0; l < d; ++l) {
        model.coeffs[j][l][0] = r.x[1 + static_cast<Eigen::Index>(l)];
        model.beta(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = r.x[1 + D + static_cast<Eigen::Index>(l)];
      }
      record(r);
    }
    return out;
  }

  const auto U = static_cast<Eigen::Index>(model.u);
  const auto P = static_cast<Eigen::Index>(d) * U;
  auto design = [&](const std::vector<ActiveLagTable>& tables, std::size_t points) {
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(points), P);
    for (std::size_t l = 0; l < d; ++l)
      for (std::size_t n = 0; n < points; ++n)
        for (double lag : tables[l].at(n))
          for (Eigen::Index k = 0; k < U; ++k)
            X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(l) * U + k) +=
                fixed_basis(options.kind, model.u, options.gamma, options.support, static_cast<std::size_t>(k), lag);
    return X;
  };
  const Eigen::MatrixXd Xg = design(grid_lags, m);
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<ActiveLagTable> event_lags;
    for (std::size_t l = 0; l < d; ++l) event_lags.emplace_back(events.times(j), events.times(l), options.support);
    LinearBasisObjective f(Xg, design(event_lags, events.count(j)), step, link, options.eta);
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1 + P);
    x0[0] = start_mu(j);
    OptimOptions opts = options.optim;
    opts.lower_bounds = Eigen::VectorXd::Constant(x0.size(), model.nonneg() ? 0.0 : -kInf);
    opts.lower_bounds[0] = 0.0;
    const OptimResult r = minimize([&f](const Eigen::VectorXd& x, Eigen::VectorXd& g) { return f(x, g); }, x0, opts);
    model.mu[j] = r.x[0];
    for (std::size_t l = 0; l < d; ++l) model.coeffs[j][l] = r.x.segment(1 + static_cast<Eigen::Index>(l) * U, U);
    record(r);
  }
  return out;
}

namespace {
constexpr const char* kFormatName = "rkhawkes-model";
constexpr int kFormatVersion = 1;
}  // namespace

std::string basis_model_to_json(const FeatureBasisModel& model) {
  model.check_shape();
  using nlohmann::json;
  const std::size_t d = model.dims();
  json doc;
  doc["format"] = kFormatName;
  doc["version"] = kFormatVersion;
  doc["kind"] = to_string(model.kind);
  doc["dims"] = d;
  doc["u"] = model.u;
  doc["gamma"] = model.gamma;
  doc["support"] = model.support_bound;
  doc["omega"] = model.link.omega;
  doc["criterion"] = to_string(model.link.criterion);
  doc["eta"] = model.eta;
  doc["mu"] = model.mu;
  json coeffs = json::array();
  json beta = json::array();
  for (std::size_t j = 0; j < d; ++j) {
    json row = json::array();
    json brow = json::array();
    for (std::size_t l = 0; l < d; ++l) {
      const auto& a = model.coeffs[j][l];
      row.push_back(std::vector<double>(a.data(), a.data() + a.size()));
      if (model.kind == BasisKind::exponential)
        brow.push_back(model.beta(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)));
    }
    coeffs.push_back(row);
    beta.push_back(brow);
  }
  doc["coeffs"] = coeffs;
  if (model.kind == BasisKind::exponential) doc["beta"] = beta;
  return doc.dump() + "\n";
}

FeatureBasisModel basis_model_from_json(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormatName) throw FormatError("not an rkhawkes model file");
    const int version = doc.at("version").get<int>();
    if (version != kFormatVersion) throw FormatError("unsupported model version " + std::to_string(version));
    FeatureBasisModel m;
    m.kind = parse_basis_kind(doc.at("kind").get<std::string>());
    m.u = doc.at("u").get<std::size_t>();
    m.gamma = doc.at("gamma").get<double>();
    m.support_bound = doc.at("support").get<double>();
    m.link.omega = doc.at("omega").get<double>();
    m.link.criterion = parse_criterion(doc.at("criterion").get<std::string>());
    m.eta = doc.at("eta").get<double>();
    m.mu = doc.at("mu").get<std::vector<double>>();
    const std::size_t d = doc.at("dims").get<std::size_t>();
    if (m.mu.size() != d) throw FormatError("mu length differs from dims");
    const auto& coeffs = doc.at("coeffs");
    if (coeffs.size() != d) throw FormatError("coeffs row count differs from dims");
    m.coeffs.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
      if (coeffs[j].size() != d) throw FormatError("coeffs column count differs from dims");
      for (std::size_t l = 0; l < d; ++l) {
        const auto a = coeffs[j][l].get<std::vector<double>>();
        m.coeffs[j].push_back(Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size())));
      }
    }
    m.beta = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    if (m.kind == BasisKind::exponential) {
      const auto beta = doc.at("beta").get<std::vector<std::vector<double>>>();
      if (beta.size() != d) throw FormatError("beta row count differs from dims");
      for (std::size_t j = 0; j < d; ++j) {
        if (beta[j].size() != d) throw FormatError("beta column count differs from dims");
        for (std::size_t l = 0; l < d; ++l) m.beta(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = beta[j][l];
      }
    }
    m.check_shape();
    return m;
  } catch (const json::exception& e) {
    throw FormatError(std::string("model file: ") + e.what());
  } catch (const ShapeError& e) {
    throw FormatError(std::string("model file: ") + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
}

}  // namespace rkhawkes
