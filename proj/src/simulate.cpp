#include "rkhawkes/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rkhawkes/errors.hpp"
#include "rkhawkes/rng.hpp"
#include "rkhawkes/util.hpp"

namespace rkhawkes {

namespace {

using nlohmann::json;
constexpr double kInf = std::numeric_limits<double>::infinity();

double field(const json& spec, const char* name) {
  if (!spec.contains(name)) throw ConfigError(std::string("curve: missing field '") + name + "'");
  return spec.at(name).get<double>();
}

double field_or(const json& spec, const char* name, double fallback) {
  return spec.contains(name) ? spec.at(name).get<double>() : fallback;
}

class ConstCurve final : public Curve {
 public:
  explicit ConstCurve(double c) : c_(c) {}
  double operator()(double) const override { return c_; }
  json to_json() const override { return {{"type", "const"}, {"value", c_}}; }

 private:
  double c_;
};

class PolyCurve final : public Curve {
 public:
  explicit PolyCurve(std::vector<double> coeffs) : c_(std::move(coeffs)) {}
  double operator()(double t) const override {
    double v = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) v = v * t + *it;
    return v;
  }
  json to_json() const override { return {{"type", "poly"}, {"coeffs", c_}}; }

 private:
  std::vector<double> c_;
};

class ExpCurve final : public Curve {
 public:
  ExpCurve(double scale, double rate, double shift) : a_(scale), r_(rate), s_(shift) {}
  double operator()(double t) const override { return a_ * std::exp(-r_ * (t - s_)); }
  json to_json() const override { return {{"type", "exp"}, {"scale", a_}, {"rate", r_}, {"shift", s_}}; }

 private:
  double a_, r_, s_;
};

class GaussCurve final : public Curve {
 public:
  GaussCurve(double scale, double center, double width) : a_(scale), c_(center), w_(width) {}
  double operator()(double t) const override {
    const double d = t - c_;
    return a_ * std::exp(-w_ * d * d);
  }
  json to_json() const override { return {{"type", "gauss"}, {"scale", a_}, {"center", c_}, {"width", w_}}; }

 private:
  double a_, c_, w_;
};

class CosDampedCurve final : public Curve {
 public:
  CosDampedCurve(double scale, double offset, double freq, double rate) : a_(scale), o_(offset), f_(freq), r_(rate) {}
  double operator()(double t) const override { return a_ * (o_ + std::cos(f_ * t)) * std::exp(-r_ * t); }
  json to_json() const override {
    return {{"type", "cos_damped"}, {"scale", a_}, {"offset", o_}, {"freq", f_}, {"rate", r_}};
  }

 private:
  double a_, o_, f_, r_;
};

class SumCurve final : public Curve {
 public:
  explicit SumCurve(std::vector<CurvePtr> terms) : terms_(std::move(terms)) {}
  double operator()(double t) const override {
    double v = 0.0;
    for (const auto& c : terms_) v += (*c)(t);
    return v;
  }
  json to_json() const override {
    json terms = json::array();
    for (const auto& c : terms_) terms.push_back(c->to_json());
    return {{"type", "sum"}, {"terms", terms}};
  }

 private:
  std::vector<CurvePtr> terms_;
};

class ShiftCurve final : public Curve {
 public:
  ShiftCurve(double by, CurvePtr body) : by_(by), body_(std::move(body)) {}
  double operator()(double t) const override { return (*body_)(t - by_); }
  json to_json() const override { return {{"type", "shift"}, {"by", by_}, {"body", body_->to_json()}}; }

 private:
  double by_;
  CurvePtr body_;
};

class WindowCurve final : public Curve {
 public:
  WindowCurve(double lo, double hi, CurvePtr body) : lo_(lo), hi_(hi), body_(std::move(body)) {}
  double operator()(double t) const override { return (t > lo_ && t <= hi_) ? (*body_)(t) : 0.0; }
  json to_json() const override {
    json j = {{"type", "window"}, {"body", body_->to_json()}};
    if (std::isfinite(lo_)) j["lo"] = lo_;
    if (std::isfinite(hi_)) j["hi"] = hi_;
    return j;
  }

 private:
  double lo_, hi_;
  CurvePtr body_;
};

CurvePtr constant(double c) { return std::make_shared<ConstCurve>(c); }
CurvePtr poly(std::vector<double> c) { return std::make_shared<PolyCurve>(std::move(c)); }
CurvePtr expo(double a, double r, double s = 0.0) { return std::make_shared<ExpCurve>(a, r, s); }
CurvePtr gauss(double a, double c, double w) { return std::make_shared<GaussCurve>(a, c, w); }
CurvePtr sum(std::vector<CurvePtr> t) { return std::make_shared<SumCurve>(std::move(t)); }
CurvePtr window(double lo, double hi, CurvePtr body) { return std::make_shared<WindowCurve>(lo, hi, std::move(body)); }

// (8t^2 - 1) on t <= 0.5, exp(-rate (t - 0.5)) after.
CurvePtr refractory(double rate) {
  return sum({window(-kInf, 0.5, poly({-1.0, 0.0, 8.0})), window(0.5, kInf, expo(1.0, rate, 0.5))});
}

}  // namespace

CurvePtr curve_from_json(const json& spec) {
  try {
    const std::string type = spec.at("type").get<std::string>();
    if (type == "const") return constant(field(spec, "value"));
    if (type == "poly") return poly(spec.at("coeffs").get<std::vector<double>>());
    if (type == "exp") return expo(field(spec, "scale"), field(spec, "rate"), field_or(spec, "shift", 0.0));
    if (type == "gauss") return gauss(field(spec, "scale"), field(spec, "center"), field(spec, "width"));
    if (type == "cos_damped")
      return std::make_shared<CosDampedCurve>(field(spec, "scale"), field_or(spec, "offset", 0.0),
                                              field(spec, "freq"), field_or(spec, "rate", 0.0));
    if (type == "sum") {
      std::vector<CurvePtr> terms;
      for (const auto& t : spec.at("terms")) terms.push_back(curve_from_json(t));
      return sum(std::move(terms));
    }
    if (type == "shift") return std::make_shared<ShiftCurve>(field(spec, "by"), curve_from_json(spec.at("body")));
    if (type == "window")
      return window(field_or(spec, "lo", -kInf), field_or(spec, "hi", kInf), curve_from_json(spec.at("body")));
    throw ConfigError("unknown curve type '" + type + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("curve spec: ") + e.what());
  }
}

GroundTruthModel::GroundTruthModel(std::vector<double> mu, std::vector<std::vector<CurvePtr>> kernels,
                                   double support, std::vector<std::vector<double>> declared_sup)
    : mu_(std::move(mu)), kernels_(std::move(kernels)), support_(support) {
  const std::size_t d = mu_.size();
  if (d == 0) throw ConfigError("ground truth needs at least one dimension");
  if (!(std::isfinite(support_) && support_ > 0.0)) throw ConfigError("support must be > 0");
  if (kernels_.size() != d) throw ConfigError("kernel matrix must be d x d");
  for (double m : mu_)
    if (!(std::isfinite(m) && m >= 0.0)) throw ConfigError("baselines must be finite and >= 0");
  if (!declared_sup.empty() && declared_sup.size() != d) throw ConfigError("sup matrix must be d x d");
  constexpr std::size_t kGrid = 10000;
  sup_.assign(d, std::vector<double>(d, 0.0));
  for (std::size_t j = 0; j < d; ++j) {
    if (kernels_[j].size() != d) throw ConfigError("kernel matrix must be d x d");
    for (std::size_t l = 0; l < d; ++l) {
      if (!kernels_[j][l]) throw ConfigError("missing kernel");
      double grid_max = 0.0;
      for (std::size_t k = 0; k < kGrid; ++k) {
        const double t = support_ * static_cast<double>(k) / static_cast<double>(kGrid - 1);
        grid_max = std::max(grid_max, (*kernels_[j][l])(t));
      }
      if (!declared_sup.empty()) {
        if (declared_sup[j].size() != d) throw ConfigError("sup matrix must be d x d");
        const double declared = declared_sup[j][l];
        if (!(declared >= grid_max))
          throw ConfigError("declared sup bound for g_" + std::to_string(j) + std::to_string(l) +
                            " is below the sampled maximum " + format_double(grid_max));
        sup_[j][l] = declared;
      } else {
        sup_[j][l] = 1.05 * grid_max;
      }
    }
  }
}

double GroundTruthModel::interaction(std::size_t j, std::size_t l, double lag) const {
  return (*kernels_.at(j).at(l))(lag);
}

json GroundTruthModel::to_json() const {
  json kernels = json::array();
  for (const auto& row : kernels_) {
    json r = json::array();
    for (const auto& c : row) r.push_back(c->to_json());
    kernels.push_back(r);
  }
  return {{"dims", dims()}, {"support", support_}, {"mu", mu_}, {"kernels", kernels}, {"sup", sup_}};
}

std::vector<std::string> builtin_model_names() { return {"paper3d", "poisson", "inhibited"}; }

GroundTruthModel builtin_kernels(const std::string& name) {
  if (name == "paper3d") {
    const double ln2 = std::numbers::ln2;
    const double pi = std::numbers::pi;
    std::vector<std::vector<CurvePtr>> g = {
        {refractory(2.5), gauss(1.0, 1.0, 10.0), sum({gauss(-0.6, 0.0, 3.0), gauss(-0.4, 1.0, 3.0)})},
        {expo(1.0, 5.0 * ln2), refractory(1.0), gauss(-1.0, 3.0, 2.0)},
        {gauss(-1.0, 2.0, 5.0), std::make_shared<CosDampedCurve>(0.5, 1.0, pi, 1.0), refractory(1.0)},
    };
    return GroundTruthModel({0.05, 0.05, 0.05}, std::move(g), 5.0);
  }
  if (name == "poisson") return GroundTruthModel({2.0}, {{constant(0.0)}}, 1.0);
  if (name == "inhibited") return GroundTruthModel({1.0}, {{constant(-5.0)}}, 1.0);
  std::string valid;
  for (const auto& n : builtin_model_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown model '" + name + "' (valid: " + valid + ", or a JSON model file)");
}

GroundTruthModel ground_truth_from_json(const json& spec) {
  try {
    const auto mu = spec.at("mu").get<std::vector<double>>();
    std::vector<std::vector<CurvePtr>> kernels;
    for (const auto& row : spec.at("kernels")) {
      std::vector<CurvePtr> r;
      for (const auto& c : row) r.push_back(curve_from_json(c));
      kernels.push_back(std::move(r));
    }
    std::vector<std::vector<double>> sup;
    if (spec.contains("sup")) sup = spec.at("sup").get<std::vector<std::vector<double>>>();
    return GroundTruthModel(mu, std::move(kernels), spec.at("support").get<double>(), std::move(sup));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("ground truth spec: ") + e.what());
  }
}

GroundTruthModel load_ground_truth(const std::filesystem::path& path) {
  json spec;
  try {
    spec = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("ground truth file: ") + e.what());
  }
  return ground_truth_from_json(spec);
}

GroundTruthModel resolve_ground_truth(const std::string& name_or_path) {
  const auto names = builtin_model_names();
  if (std::find(names.begin(), names.end(), name_or_path) == names.end() &&
      std::filesystem::exists(name_or_path))
    return load_ground_truth(name_or_path);
  return builtin_kernels(name_or_path);
}

EventData simulate_thinning(const GroundTruthModel& model, const SimulationOptions& options) {
  if (!(std::isfinite(options.horizon) && options.horizon > 0.0)) throw ConfigError("horizon must be > 0");
  const double A = model.support();
  const double burn = options.burn_in < 0.0 ? 10.0 * A : options.burn_in;
  const double end = burn + options.horizon;
  const std::size_t d = model.dims();

  Rng rng(options.seed);
  std::vector<std::vector<double>> hist(d);
  std::vector<std::size_t> first_live(d, 0);  // events before this index are older than A
  std::vector<double> lambda(d);

  double t = 0.0;
  for (;;) {
    // Events in (t - A, t] may be active at any time after t.
    double bound = 0.0;
    for (std::size_t l = 0; l < d; ++l)
      while (first_live[l] < hist[l].size() && !(t - hist[l][first_live[l]] < A)) ++first_live[l];
    for (std::size_t j = 0; j < d; ++j) {
      double x = model.baseline(j);
      for (std::size_t l = 0; l < d; ++l)
        x += static_cast<double>(hist[l].size() - first_live[l]) * model.sup_bound(j, l);
      bound += std::max(0.0, x);
    }
    // sup bounds are nonnegative, so a zero bound means no event can ever occur again.
    if (bound <= 0.0) break;
    t += rng.exponential(bound);
    if (t > end) break;

    double total = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double x = model.baseline(j);
      for (std::size_t l = 0; l < d; ++l)
        for (std::size_t i = first_live[l]; i < hist[l].size(); ++i) {
          const double lag = t - hist[l][i];
          if (lag > 0.0 && lag <= A) x += model.interaction(j, l, lag);
        }
      lambda[j] = std::max(0.0, x);
      total += lambda[j];
    }
    if (total > bound)
      throw SimulationError("thinning majorant violated at t = " + format_double(t - burn) + " (intensity " +
                            format_double(total) + " > bound " + format_double(bound) + ")");
    const double u = rng.uniform() * bound;
    if (u < total) {
      double acc = 0.0;
      std::size_t pick = d - 1;
      for (std::size_t j = 0; j < d; ++j) {
        acc += lambda[j];
        if (u < acc) {
          pick = j;
          break;
        }
      }
      if (hist[pick].empty() || hist[pick].back() < t) hist[pick].push_back(t);
    }
  }

  std::vector<std::vector<double>> out(d);
  for (std::size_t j = 0; j < d; ++j)
    for (double s : hist[j]) {
      const double shifted = s - burn;
      if (shifted > 0.0 && shifted <= options.horizon && (out[j].empty() || out[j].back() < shifted))
        out[j].push_back(shifted);
    }
  return EventData(options.horizon, std::move(out));
}

std::vector<std::vector<double>> time_rescaling_residuals(const EventData& events, const HawkesModel& model,
                                                         double max_step) {
  if (model.dims() != events.dims()) throw ShapeError("model and events have different dims");
  if (!(max_step > 0.0)) throw ConfigError("max_step must be > 0");
  std::vector<std::vector<double>> out(events.dims());
  for (std::size_t j = 0; j < events.dims(); ++j) {
    double prev = 0.0;
    for (double t : events.times(j)) {
      const double len = t - prev;
      const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(len / max_step)));
      const double h = len / static_cast<double>(steps);
      double acc = 0.0;
      for (std::size_t k = 0; k < steps; ++k)
        acc += model_intensity(model, events, j, prev + (static_cast<double>(k) + 0.5) * h);
      out[j].push_back(acc * h);
      prev = t;
    }
  }
  return out;
}

double kolmogorov_survival(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;  // series converges poorly; Q is 1 to double precision here
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_exponential(std::vector<double> sample) {
  if (sample.empty()) return {};
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double dmax = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = -std::expm1(-std::max(0.0, sample[i]));
    dmax = std::max({dmax, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  return {dmax, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * dmax)};
}

}  // namespace rkhawkes
