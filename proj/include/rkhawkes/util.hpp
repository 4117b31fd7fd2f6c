#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rkhawkes {

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double x);

/// Throws IoError when the file cannot be read/written.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Index range [first, last) of `sorted` whose elements t satisfy
/// 0 < x - t <= width, evaluated with exactly that floating-point predicate.
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t size() const noexcept { return last - first; }
  bool empty() const noexcept { return first == last; }
};
IndexRange active_range(std::span<const double> sorted, double x, double width);

/// For each query point x, the lags x - t of the events active at x.
class ActiveLagTable {
 public:
  ActiveLagTable(std::span<const double> points, std::span<const double> events, double width);
  std::span<const double> at(std::size_t p) const {
    return {lags_.data() + offset_[p], offset_[p + 1] - offset_[p]};
  }
  std::size_t points() const noexcept { return offset_.size() - 1; }

 private:
  std::vector<std::size_t> offset_;
  std::vector<double> lags_;
};

}  // namespace rkhawkes
