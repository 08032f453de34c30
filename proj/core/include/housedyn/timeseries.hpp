#pragma once

#include <chrono>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace housedyn {

using Date = std::chrono::year_month_day;

enum class Frequency { kDaily, kMonthly, kQuarterly };

[[nodiscard]] std::string_view to_string(Frequency f);
[[nodiscard]] Frequency parse_frequency(std::string_view s);

/// Parses a strict ISO-8601 calendar date (YYYY-MM-DD).
[[nodiscard]] Date parse_date(std::string_view s);
[[nodiscard]] std::string format_date(const Date& d);

/// Ordinal of the period containing `d`: days since 1970-01-01, months since
/// year 0, or quarters since year 0.
[[nodiscard]] long period_index(const Date& d, Frequency f);

/// Last calendar day of the period containing `d`.
[[nodiscard]] Date period_end(const Date& d, Frequency f);

struct Observation {
  Date date;
  double value;

  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Dated observations at a declared frequency. Immutable once built; the
/// constructor rejects unsorted or duplicate dates, two points in one period
/// and non-finite values.
class TimeSeries {
 public:
  TimeSeries(std::string name, Frequency frequency, std::vector<Observation> points);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] Frequency frequency() const noexcept { return frequency_; }
  [[nodiscard]] std::span<const Observation> points() const noexcept { return points_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] bool empty() const noexcept { return points_.empty(); }

  [[nodiscard]] std::vector<Date> dates() const;
  [[nodiscard]] std::vector<double> values() const;

  /// Points with from <= date <= to.
  [[nodiscard]] TimeSeries slice(const Date& from, const Date& to) const;

  [[nodiscard]] TimeSeries renamed(std::string name) const;

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::string name_;
  Frequency frequency_;
  std::vector<Observation> points_;
};

/// Reads a two-column `date,value` CSV. Rows may appear in any order; the
/// result is sorted. The series is named after the file stem unless `name`
/// is given.
[[nodiscard]] TimeSeries load_csv(const std::filesystem::path& path, Frequency frequency,
                                  std::string name = {});
[[nodiscard]] TimeSeries parse_csv(std::string_view text, Frequency frequency, std::string name);

void write_csv(const TimeSeries& series, const std::filesystem::path& path);
[[nodiscard]] std::string to_csv(const TimeSeries& series);

enum class ResampleMethod { kMean, kLast };

[[nodiscard]] ResampleMethod parse_resample_method(std::string_view s);

/// Aggregates onto a coarser (or equal) frequency, one point per period that
/// holds at least one source point, stamped at the period end. Empty periods
/// are absent from the output.
[[nodiscard]] TimeSeries resample(const TimeSeries& series, Frequency target, ResampleMethod method);

struct FrameColumn {
  std::string name;
  std::vector<double> values;

  friend bool operator==(const FrameColumn&, const FrameColumn&) = default;
};

/// Series restricted to their common dates. Column order follows the input.
struct AlignedFrame {
  Frequency frequency = Frequency::kQuarterly;
  std::vector<Date> dates;
  std::vector<FrameColumn> columns;

  [[nodiscard]] const FrameColumn& column(std::string_view name) const;
  [[nodiscard]] bool has_column(std::string_view name) const;
  [[nodiscard]] std::vector<TimeSeries> to_series() const;

  friend bool operator==(const AlignedFrame&, const AlignedFrame&) = default;
};

[[nodiscard]] AlignedFrame align(std::span<const TimeSeries> series);

/// Rows with date < cut and date >= cut respectively.
[[nodiscard]] std::pair<AlignedFrame, AlignedFrame> split_at(const AlignedFrame& frame, const Date& cut);

/// Writes `date,col1,col2,...`.
void write_csv(const AlignedFrame& frame, const std::filesystem::path& path);

/// Shortest decimal representation that parses back to the same double.
[[nodiscard]] std::string format_double(double v);

}  // namespace housedyn
