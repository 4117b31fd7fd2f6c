#include "rkhawkes/util.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "rkhawkes/errors.hpp"

namespace rkhawkes {

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

IndexRange active_range(std::span<const double> sorted, double x, double width) {
  // x - t is nonincreasing in t, so both predicates partition the sequence.
  const auto too_old = std::partition_point(sorted.begin(), sorted.end(),
                                            [&](double t) { return x - t > width; });
  const auto not_past = std::partition_point(too_old, sorted.end(),
                                             [&](double t) { return x - t > 0.0; });
  return {static_cast<std::size_t>(too_old - sorted.begin()),
          static_cast<std::size_t>(not_past - sorted.begin())};
}

ActiveLagTable::ActiveLagTable(std::span<const double> points, std::span<const double> events, double width) {
  offset_.reserve(points.size() + 1);
  offset_.push_back(0);
  for (double x : points) {
    const IndexRange r = active_range(events, x, width);
    for (std::size_t i = r.first; i < r.last; ++i) lags_.push_back(x - events[i]);
    offset_.push_back(lags_.size());
  }
}

}  // namespace rkhawkes
