#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rkhawkes {

/// A realization of a d-variate point process observed on [0, horizon].
///
/// Each dimension holds strictly ascending times in (0, horizon]. Ties across
/// dimensions are allowed; ties within a dimension are rejected. Instances
/// are immutable once constructed.
class EventData {
 public:
  EventData() = default;
  /// Throws ValidationError if any invariant is violated.
  EventData(double horizon, std::vector<std::vector<double>> times);

  /// `dims` empty sequences.
  static EventData empty(std::size_t dims, double horizon);

  std::size_t dims() const noexcept { return times_.size(); }
  double horizon() const noexcept { return horizon_; }
  std::span<const double> times(std::size_t j) const { return times_.at(j); }
  const std::vector<std::vector<double>>& all_times() const noexcept { return times_; }
  std::size_t count(std::size_t j) const { return times_.at(j).size(); }
  std::size_t total_count() const noexcept;
  std::size_t max_count() const noexcept;

  bool operator==(const EventData&) const = default;

 private:
  double horizon_ = 0.0;
  std::vector<std::vector<double>> times_;
};

enum class EventFormat { csv, json };

/// Parses "csv"/"json"; throws ConfigError otherwise.
EventFormat parse_event_format(const std::string& name);
/// Guesses from the file extension, defaulting to csv.
EventFormat event_format_from_path(const std::filesystem::path& path);

struct LoadOptions {
  /// Required meaning for CSV: observation horizon. When absent the largest
  /// time in the file is used. For JSON the file's own horizon wins unless
  /// this is set.
  std::optional<double> horizon;
  /// Declared number of dimensions; inferred as max dim_index + 1 when absent.
  std::optional<std::size_t> dims;
  /// Skip the first CSV line.
  bool header = false;
};

EventData load_events(const std::filesystem::path& path, EventFormat format,
                      const LoadOptions& options = {});
EventData parse_events_csv(const std::string& text, const LoadOptions& options = {});
EventData parse_events_json(const std::string& text, const LoadOptions& options = {});

void save_events(const EventData& events, const std::filesystem::path& path,
                 EventFormat format);
std::string events_to_csv(const EventData& events);
std::string events_to_json(const EventData& events);

/// Lays recordings end to end with cumulative time offsets. With a seed, the
/// recordings are permuted first (deterministically for a given seed).
EventData concat_recordings(const std::vector<EventData>& recordings,
                            std::optional<std::uint64_t> shuffle_seed = std::nullopt);

/// Keeps times in (a, b], shifted by -a; the result has horizon b - a.
EventData restrict_window(const EventData& events, double a, double b);

}  // namespace rkhawkes
