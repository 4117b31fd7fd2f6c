#include "rkhawkes/hawkes_model.hpp"

#include <algorithm>
#include <cmath>

#include "rkhawkes/errors.hpp"
#include "rkhawkes/util.hpp"

namespace rkhawkes {

double model_pre_intensity(const HawkesModel& model, const EventData& history, std::size_t j, double t) {
  double x = model.baseline(j);
  const double a = model.support();
  for (std::size_t l = 0; l < history.dims(); ++l) {
    const auto times = history.times(l);
    const IndexRange r = active_range(times, t, a);
    for (std::size_t i = r.first; i < r.last; ++i) x += model.interaction(j, l, t - times[i]);
  }
  return x;
}

double model_intensity(const HawkesModel& model, const EventData& history, std::size_t j, double t) {
  return std::max(0.0, model_pre_intensity(model, history, j, t));
}

TabulatedModel::TabulatedModel(const HawkesModel& source, std::size_t points)
    : support_(source.support()) {
  if (points < 2) throw ConfigError("tabulation needs at least 2 points");
  const std::size_t d = source.dims();
  step_ = support_ / static_cast<double>(points - 1);
  mu_.resize(d);
  table_.resize(d * d);
  for (std::size_t j = 0; j < d; ++j) {
    mu_[j] = source.baseline(j);
    for (std::size_t l = 0; l < d; ++l) {
      auto& row = table_[j * d + l];
      row.resize(points);
      for (std::size_t k = 0; k < points; ++k) {
        const double lag = k + 1 == points ? support_ : static_cast<double>(k) * step_;
        row[k] = source.interaction(j, l, lag);
      }
    }
  }
}

double TabulatedModel::interaction(std::size_t j, std::size_t l, double lag) const {
  const auto& row = table_[j * mu_.size() + l];
  const double pos = std::clamp(lag / step_, 0.0, static_cast<double>(row.size() - 1));
  const auto k = std::min(static_cast<std::size_t>(pos), row.size() - 2);
  const double w = pos - static_cast<double>(k);
  return row[k] + w * (row[k + 1] - row[k]);
}

}  // namespace rkhawkes
