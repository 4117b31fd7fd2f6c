#include "rkhawkes/events.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rkhawkes/errors.hpp"
#include "rkhawkes/rng.hpp"
#include "rkhawkes/util.hpp"

namespace rkhawkes {

EventData::EventData(double horizon, std::vector<std::vector<double>> times)
    : horizon_(horizon), times_(std::move(times)) {
  if (!(std::isfinite(horizon_) && horizon_ > 0.0))
    throw ValidationError("horizon must be finite and positive");
  for (std::size_t j = 0; j < times_.size(); ++j) {
    const auto& seq = times_[j];
    for (std::size_t n = 0; n < seq.size(); ++n) {
      const double t = seq[n];
      if (!(t > 0.0 && t <= horizon_))
        throw ValidationError("dimension " + std::to_string(j) + ": time " + format_double(t) +
                              " outside (0, " + format_double(horizon_) + "]");
      if (n > 0 && !(seq[n - 1] < t))
        throw ValidationError("dimension " + std::to_string(j) +
                              ": times not strictly ascending at index " + std::to_string(n));
    }
  }
}

EventData EventData::empty(std::size_t dims, double horizon) {
  return EventData(horizon, std::vector<std::vector<double>>(dims));
}

std::size_t EventData::total_count() const noexcept {
  std::size_t total = 0;
  for (const auto& seq : times_) total += seq.size();
  return total;
}

std::size_t EventData::max_count() const noexcept {
  std::size_t m = 0;
  for (const auto& seq : times_) m = std::max(m, seq.size());
  return m;
}

EventFormat parse_event_format(const std::string& name) {
  if (name == "csv") return EventFormat::csv;
  if (name == "json") return EventFormat::json;
  throw ConfigError("unknown event format '" + name + "' (expected csv or json)");
}

EventFormat event_format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? EventFormat::json : EventFormat::csv;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

EventData finish(std::vector<std::vector<double>> times, const LoadOptions& options,
                 std::optional<double> file_horizon) {
  if (options.dims) {
    if (times.size() > *options.dims)
      throw ValidationError("dimension index exceeds declared dims " +
                            std::to_string(*options.dims));
    times.resize(*options.dims);
  }
  double horizon = 0.0;
  if (options.horizon) {
    horizon = *options.horizon;
  } else if (file_horizon) {
    horizon = *file_horizon;
  } else {
    for (const auto& seq : times)
      for (double t : seq) horizon = std::max(horizon, t);
  }
  if (horizon <= 0.0) throw ValidationError("horizon could not be determined (no events, none declared)");
  return EventData(horizon, std::move(times));
}

}  // namespace

EventData parse_events_csv(const std::string& text, const LoadOptions& options) {
  std::vector<std::vector<double>> times;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (line_no == 1 && options.header) continue;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) throw ParseError("expected 'dim_index,time'", line_no);
    const auto dim_text = trim(line.substr(0, comma));
    const auto time_text = trim(line.substr(comma + 1));
    long long dim = -1;
    auto [p1, e1] = std::from_chars(dim_text.data(), dim_text.data() + dim_text.size(), dim);
    if (e1 != std::errc() || p1 != dim_text.data() + dim_text.size() || dim < 0)
      throw ParseError("invalid dim_index '" + std::string(dim_text) + "'", line_no);
    double t = 0.0;
    auto [p2, e2] = std::from_chars(time_text.data(), time_text.data() + time_text.size(), t);
    if (e2 != std::errc() || p2 != time_text.data() + time_text.size())
      throw ParseError("invalid time '" + std::string(time_text) + "'", line_no);
    if (static_cast<std::size_t>(dim) >= times.size()) times.resize(static_cast<std::size_t>(dim) + 1);
    times[static_cast<std::size_t>(dim)].push_back(t);
  }
  return finish(std::move(times), options, std::nullopt);
}

EventData parse_events_json(const std::string& text, const LoadOptions& options) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what(), 0);
  }
  try {
    std::vector<std::vector<double>> times = doc.at("times").get<std::vector<std::vector<double>>>();
    std::optional<double> horizon;
    if (doc.contains("horizon")) horizon = doc.at("horizon").get<double>();
    LoadOptions opts = options;
    if (!opts.dims && doc.contains("dims")) opts.dims = doc.at("dims").get<std::size_t>();
    return finish(std::move(times), opts, horizon);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("events json: ") + e.what(), 0);
  }
}

EventData load_events(const std::filesystem::path& path, EventFormat format,
                      const LoadOptions& options) {
  const std::string text = read_text_file(path);
  return format == EventFormat::csv ? parse_events_csv(text, options)
                                    : parse_events_json(text, options);
}

std::string events_to_csv(const EventData& events) {
  // Rows ordered by time, ties broken by dimension.
  std::vector<std::pair<double, std::size_t>> rows;
  rows.reserve(events.total_count());
  for (std::size_t j = 0; j < events.dims(); ++j)
    for (double t : events.times(j)) rows.emplace_back(t, j);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string out;
  for (const auto& [t, j] : rows) {
    out += std::to_string(j);
    out += ',';
    out += format_double(t);
    out += '\n';
  }
  return out;
}

std::string events_to_json(const EventData& events) {
  nlohmann::json doc;
  doc["dims"] = events.dims();
  doc["horizon"] = events.horizon();
  doc["times"] = events.all_times();
  return doc.dump() + "\n";
}

void save_events(const EventData& events, const std::filesystem::path& path, EventFormat format) {
  write_text_file(path, format == EventFormat::csv ? events_to_csv(events) : events_to_json(events));
}

EventData concat_recordings(const std::vector<EventData>& recordings,
                            std::optional<std::uint64_t> shuffle_seed) {
  if (recordings.empty()) throw ValidationError("concat_recordings: no recordings");
  const std::size_t d = recordings.front().dims();
  for (const auto& r : recordings)
    if (r.dims() != d) throw ValidationError("concat_recordings: recordings have different dims");

  std::vector<std::size_t> order(recordings.size());
  std::iota(order.begin(), order.end(), 0);
  if (shuffle_seed) {
    Rng rng(*shuffle_seed);
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.below(i)]);
  }

  std::vector<std::vector<double>> times(d);
  double offset = 0.0;
  for (std::size_t k : order) {
    const auto& r = recordings[k];
    for (std::size_t j = 0; j < d; ++j)
      for (double t : r.times(j)) times[j].push_back(t + offset);
    offset += r.horizon();
  }
  return EventData(offset, std::move(times));
}

EventData restrict_window(const EventData& events, double a, double b) {
  if (!(a < b)) throw ValidationError("restrict_window: need a < b");
  if (a < 0.0 || b > events.horizon())
    throw ValidationError("restrict_window: window must lie within [0, horizon]");
  std::vector<std::vector<double>> times(events.dims());
  for (std::size_t j = 0; j < events.dims(); ++j)
    for (double t : events.times(j))
      if (t > a && t <= b) times[j].push_back(t - a);
  return EventData(b - a, std::move(times));
}

}  // namespace rkhawkes
