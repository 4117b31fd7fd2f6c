#include "rkhawkes/model.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "rkhawkes/errors.hpp"
#include "rkhawkes/util.hpp"

namespace rkhawkes {

Criterion parse_criterion(const std::string& name) {
  if (name == "mle") return Criterion::mle;
  if (name == "ls") return Criterion::ls;
  throw ConfigError("unknown criterion '" + name + "' (expected mle or ls)");
}

std::string to_string(Criterion c) { return c == Criterion::mle ? "mle" : "ls"; }

void LinkSpec::validate() const {
  if (!(std::isfinite(omega) && omega > 0.0)) throw ConfigError("omega must be > 0");
}

double softplus(double x, double omega) {
  const double z = omega * x;
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(z))) / omega;
}

double softplus_prime(double x, double omega) {
  const double z = omega * x;
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double log_softplus(double x, double omega) {
  const double z = omega * x;
  // softplus ~ exp(z) / omega once exp(z) underflows.
  if (z < -700.0) return z - std::log(omega);
  return std::log(softplus(x, omega));
}

RkhsParams RkhsParams::zeros(std::shared_ptr<const EventData> anchor, const KernelConfig& cfg) {
  RkhsParams p;
  const std::size_t d = anchor->dims();
  p.mu.assign(d, 0.0);
  p.alpha.resize(d);
  for (std::size_t j = 0; j < d; ++j)
    p.alpha[j].assign(d, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(anchor->count(j) + 1)));
  p.b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  p.cfg = cfg;
  p.anchor = std::move(anchor);
  return p;
}

void RkhsParams::check_shape() const {
  if (!anchor) throw ShapeError("model has no anchor events");
  const std::size_t d = anchor->dims();
  if (mu.size() != d) throw ShapeError("mu has wrong length");
  if (alpha.size() != d) throw ShapeError("alpha has wrong number of rows");
  if (b.rows() != static_cast<Eigen::Index>(d) || b.cols() != static_cast<Eigen::Index>(d))
    throw ShapeError("b has wrong shape");
  for (std::size_t j = 0; j < d; ++j) {
    if (alpha[j].size() != d) throw ShapeError("alpha row has wrong length");
    for (const auto& a : alpha[j])
      if (a.size() != static_cast<Eigen::Index>(anchor->count(j) + 1))
        throw ShapeError("alpha block length differs from N_j + 1");
  }
}

RkhsModel::RkhsModel(RkhsParams params) : params_(std::move(params)) {
  params_.check_shape();
  const auto& ev = *params_.anchor;
  const std::size_t d = ev.dims();
  const double gamma = params_.cfg.gamma;
  // exp(-gamma d^2) underflows to zero beyond this distance.
  cutoff_ = std::sqrt(746.0 / gamma);
  r_.reserve(d);
  for (std::size_t l = 0; l < d; ++l) r_.emplace_back(ev.horizon(), ev.times(l), params_.cfg);
  pairs_.resize(d * d);
  for (std::size_t j = 0; j < d; ++j) {
    const auto tj = ev.times(j);
    for (std::size_t l = 0; l < d; ++l) {
      const auto tl = ev.times(l);
      const Eigen::VectorXd& a = params_.alpha[j][l];
      Pair& p = pairs_[j * d + l];
      p.alpha0 = a[0];
      std::vector<std::pair<double, double>> cw;
      for (std::size_t u = 0; u < tj.size(); ++u) {
        const double w = a[static_cast<Eigen::Index>(u + 1)];
        if (w == 0.0) continue;
        const IndexRange r = active_range(tl, tj[u], params_.cfg.support);
        for (std::size_t v = r.first; v < r.last; ++v) cw.emplace_back(tj[u] - tl[v], w);
      }
      std::sort(cw.begin(), cw.end());
      p.centers.reserve(cw.size());
      p.weights.reserve(cw.size());
      for (const auto& [c, w] : cw) {
        p.centers.push_back(c);
        p.weights.push_back(w);
      }
    }
  }
}

double RkhsModel::functional_part(std::size_t j, std::size_t l, double lag) const {
  const std::size_t d = dims();
  const Pair& p = pairs_.at(j * d + l);
  double h = p.alpha0 == 0.0 ? 0.0 : p.alpha0 * r_[l](lag);
  const auto lo = std::lower_bound(p.centers.begin(), p.centers.end(), lag - cutoff_);
  const auto hi = std::upper_bound(lo, p.centers.end(), lag + cutoff_);
  const double gamma = params_.cfg.gamma;
  for (auto it = lo; it != hi; ++it) {
    const double diff = lag - *it;
    h += p.weights[static_cast<std::size_t>(it - p.centers.begin())] * std::exp(-gamma * diff * diff);
  }
  return h;
}

double RkhsModel::interaction(std::size_t j, std::size_t l, double lag) const {
  return functional_part(j, l, lag) + params_.b(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l));
}

double pre_intensity(const RkhsParams& theta, const EventData& events, std::size_t j, double t) {
  return model_pre_intensity(RkhsModel(theta), events, j, t);
}

double intensity(const RkhsParams& theta, const EventData& events, std::size_t j, double t) {
  return std::max(0.0, pre_intensity(theta, events, j, t));
}

double interaction_at(const RkhsParams& theta, std::size_t j, std::size_t l, double t) {
  if (!(t >= 0.0 && t <= theta.cfg.support))
    throw DomainError("lag " + format_double(t) + " outside [0, A]");
  return RkhsModel(theta).interaction(j, l, t);
}

namespace {
constexpr const char* kFormatName = "rkhawkes-model";
constexpr int kFormatVersion = 1;
}  // namespace

std::string rkhs_model_to_json(const RkhsParams& theta) {
  theta.check_shape();
  using nlohmann::json;
  const std::size_t d = theta.dims();
  json doc;
  doc["format"] = kFormatName;
  doc["version"] = kFormatVersion;
  doc["kind"] = "rkhs";
  doc["dims"] = d;
  doc["gamma"] = theta.cfg.gamma;
  doc["support"] = theta.cfg.support;
  doc["omega"] = theta.link.omega;
  doc["criterion"] = to_string(theta.link.criterion);
  doc["eta"] = theta.eta;
  doc["mu"] = theta.mu;
  json b = json::array();
  json alpha = json::array();
  for (std::size_t j = 0; j < d; ++j) {
    json brow = json::array();
    json arow = json::array();
    for (std::size_t l = 0; l < d; ++l) {
      brow.push_back(theta.b(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)));
      const auto& a = theta.alpha[j][l];
      arow.push_back(std::vector<double>(a.data(), a.data() + a.size()));
    }
    b.push_back(brow);
    alpha.push_back(arow);
  }
  doc["b"] = b;
  doc["alpha"] = alpha;
  doc["anchor"] = {{"horizon", theta.anchor->horizon()}, {"times", theta.anchor->all_times()}};
  return doc.dump() + "\n";
}

RkhsParams rkhs_model_from_json(const std::string& text) {
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
    if (version != kFormatVersion)
      throw FormatError("unsupported model version " + std::to_string(version));
    if (doc.at("kind").get<std::string>() != "rkhs") throw FormatError("model kind is not rkhs");
    const auto& anchor = doc.at("anchor");
    auto events = std::make_shared<const EventData>(
        anchor.at("horizon").get<double>(), anchor.at("times").get<std::vector<std::vector<double>>>());
    KernelConfig cfg{doc.at("gamma").get<double>(), doc.at("support").get<double>()};
    RkhsParams p = RkhsParams::zeros(events, cfg);
    p.link.omega = doc.at("omega").get<double>();
    p.link.criterion = parse_criterion(doc.at("criterion").get<std::string>());
    p.eta = doc.at("eta").get<double>();
    p.mu = doc.at("mu").get<std::vector<double>>();
    const std::size_t d = events->dims();
    if (doc.at("dims").get<std::size_t>() != d) throw FormatError("dims disagrees with anchor events");
    const auto& b = doc.at("b");
    const auto& alpha = doc.at("alpha");
    if (b.size() != d || alpha.size() != d) throw FormatError("b/alpha row count differs from dims");
    for (std::size_t j = 0; j < d; ++j) {
      if (b[j].size() != d || alpha[j].size() != d) throw FormatError("b/alpha column count differs from dims");
      for (std::size_t l = 0; l < d; ++l) {
        p.b(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) = b[j][l].get<double>();
        const auto a = alpha[j][l].get<std::vector<double>>();
        if (a.size() != events->count(j) + 1) throw FormatError("alpha block length differs from N_j + 1");
        p.alpha[j][l] = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
      }
    }
    p.check_shape();
    return p;
  } catch (const json::exception& e) {
    throw FormatError(std::string("model file: ") + e.what());
  } catch (const ShapeError& e) {
    throw FormatError(std::string("model file: ") + e.what());
  } catch (const ValidationError& e) {
    throw FormatError(std::string("model file anchor events: ") + e.what());
  }
}

void save_model(const RkhsParams& theta, const std::filesystem::path& path) {
  write_text_file(path, rkhs_model_to_json(theta));
}

RkhsParams load_model(const std::filesystem::path& path) {
  return rkhs_model_from_json(read_text_file(path));
}

}  // namespace rkhawkes
