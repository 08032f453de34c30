#include "housedyn/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "housedyn/error.hpp"

namespace housedyn {

namespace {

using std::chrono::day;
using std::chrono::month;
using std::chrono::year;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_real(std::string_view s, double& out) {
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

int frequency_rank(Frequency f) {
  switch (f) {
    case Frequency::kDaily: return 0;
    case Frequency::kMonthly: return 1;
    case Frequency::kQuarterly: return 2;
  }
  return 0;
}

}  // namespace

std::string_view to_string(Frequency f) {
  switch (f) {
    case Frequency::kDaily: return "daily";
    case Frequency::kMonthly: return "monthly";
    case Frequency::kQuarterly: return "quarterly";
  }
  return "unknown";
}

Frequency parse_frequency(std::string_view s) {
  if (s == "daily") return Frequency::kDaily;
  if (s == "monthly") return Frequency::kMonthly;
  if (s == "quarterly") return Frequency::kQuarterly;
  fail(ErrorKind::kParse, "unknown frequency '" + std::string(s) + "'");
}

ResampleMethod parse_resample_method(std::string_view s) {
  if (s == "mean") return ResampleMethod::kMean;
  if (s == "last") return ResampleMethod::kLast;
  fail(ErrorKind::kParse, "unknown resample method '" + std::string(s) + "'");
}

Date parse_date(std::string_view s) {
  s = trim(s);
  int y = 0;
  unsigned m = 0, d = 0;
  if (s.size() != 10 || s[4] != '-' || s[7] != '-' || !parse_int(s.substr(0, 4), y) ||
      !parse_int(s.substr(5, 2), m) || !parse_int(s.substr(8, 2), d)) {
    fail(ErrorKind::kParse, "malformed date '" + std::string(s) + "' (expected YYYY-MM-DD)");
  }
  Date date{year{y}, month{m}, day{d}};
  if (!date.ok()) fail(ErrorKind::kParse, "invalid calendar date '" + std::string(s) + "'");
  return date;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

long period_index(const Date& d, Frequency f) {
  const long y = static_cast<int>(d.year());
  const long m = static_cast<unsigned>(d.month()) - 1;
  switch (f) {
    case Frequency::kDaily: return std::chrono::sys_days(d).time_since_epoch().count();
    case Frequency::kMonthly: return y * 12 + m;
    case Frequency::kQuarterly: return y * 4 + m / 3;
  }
  return 0;
}

Date period_end(const Date& d, Frequency f) {
  switch (f) {
    case Frequency::kDaily: return d;
    case Frequency::kMonthly:
      return Date{std::chrono::year_month_day_last{d.year(), std::chrono::month_day_last{d.month()}}};
    case Frequency::kQuarterly: {
      const unsigned m = static_cast<unsigned>(d.month());
      const unsigned q_end = ((m - 1) / 3) * 3 + 3;
      return Date{std::chrono::year_month_day_last{d.year(), std::chrono::month_day_last{month{q_end}}}};
    }
  }
  return d;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

TimeSeries::TimeSeries(std::string name, Frequency frequency, std::vector<Observation> points)
    : name_(std::move(name)), frequency_(frequency), points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!p.date.ok()) fail(ErrorKind::kValidation, name_ + ": invalid date at position " + std::to_string(i));
    if (!std::isfinite(p.value)) {
      fail(ErrorKind::kValidation, name_ + ": non-finite value at " + format_date(p.date));
    }
    if (i == 0) continue;
    const auto& prev = points_[i - 1];
    if (p.date == prev.date) fail(ErrorKind::kValidation, name_ + ": duplicate date " + format_date(p.date));
    if (p.date < prev.date) fail(ErrorKind::kValidation, name_ + ": dates not increasing at " + format_date(p.date));
    if (period_index(p.date, frequency_) == period_index(prev.date, frequency_)) {
      fail(ErrorKind::kValidation, name_ + ": " + format_date(prev.date) + " and " + format_date(p.date) +
                                       " fall in the same " + std::string(to_string(frequency_)) + " period");
    }
  }
}

std::vector<Date> TimeSeries::dates() const {
  std::vector<Date> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.date);
  return out;
}

std::vector<double> TimeSeries::values() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.value);
  return out;
}

TimeSeries TimeSeries::slice(const Date& from, const Date& to) const {
  std::vector<Observation> kept;
  for (const auto& p : points_) {
    if (p.date >= from && p.date <= to) kept.push_back(p);
  }
  return TimeSeries(name_, frequency_, std::move(kept));
}

TimeSeries TimeSeries::renamed(std::string name) const { return TimeSeries(std::move(name), frequency_, points_); }

TimeSeries parse_csv(std::string_view text, Frequency frequency, std::string name) {
  std::vector<Observation> points;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos) {
      fail(ErrorKind::kParse, name + ": row " + std::to_string(line_no) + ": expected two columns");
    }
    const auto first = trim(line.substr(0, comma));
    const auto second = trim(line.substr(comma + 1));
    if (!header_seen) {
      if (first != "date" || second != "value") {
        fail(ErrorKind::kParse, name + ": row " + std::to_string(line_no) + ": expected header 'date,value'");
      }
      header_seen = true;
      continue;
    }
    Observation obs{};
    try {
      obs.date = parse_date(first);
    } catch (const Error& e) {
      fail(ErrorKind::kParse, name + ": row " + std::to_string(line_no) + ": " + e.what());
    }
    if (!parse_real(second, obs.value) || !std::isfinite(obs.value)) {
      fail(ErrorKind::kParse,
           name + ": row " + std::to_string(line_no) + ": malformed value '" + std::string(second) + "'");
    }
    points.push_back(obs);
  }
  if (!header_seen) fail(ErrorKind::kParse, name + ": missing header 'date,value'");
  if (points.empty()) fail(ErrorKind::kValidation, name + ": no observations");
  std::stable_sort(points.begin(), points.end(),
                   [](const Observation& a, const Observation& b) { return a.date < b.date; });
  return TimeSeries(std::move(name), frequency, std::move(points));
}

TimeSeries load_csv(const std::filesystem::path& path, Frequency frequency, std::string name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kValidation, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (name.empty()) name = path.stem().string();
  return parse_csv(buf.str(), frequency, std::move(name));
}

std::string to_csv(const TimeSeries& series) {
  std::string out = "date,value\n";
  for (const auto& p : series.points()) {
    out += format_date(p.date);
    out += ',';
    out += format_double(p.value);
    out += '\n';
  }
  return out;
}

void write_csv(const TimeSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kValidation, "cannot write " + path.string());
  out << to_csv(series);
}

TimeSeries resample(const TimeSeries& series, Frequency target, ResampleMethod method) {
  if (frequency_rank(target) < frequency_rank(series.frequency())) {
    fail(ErrorKind::kDomain, "cannot resample " + std::string(to_string(series.frequency())) + " series '" +
                                 series.name() + "' to finer " + std::string(to_string(target)) + " frequency");
  }
  std::vector<Observation> out;
  const auto pts = series.points();
  std::size_t i = 0;
  while (i < pts.size()) {
    const long period = period_index(pts[i].date, target);
    std::size_t j = i;
    double sum = 0.0;
    while (j < pts.size() && period_index(pts[j].date, target) == period) sum += pts[j++].value;
    const double value = method == ResampleMethod::kMean ? sum / static_cast<double>(j - i) : pts[j - 1].value;
    out.push_back({period_end(pts[i].date, target), value});
    i = j;
  }
  return TimeSeries(series.name(), target, std::move(out));
}

const FrameColumn& AlignedFrame::column(std::string_view name) const {
  for (const auto& c : columns) {
    if (c.name == name) return c;
  }
  fail(ErrorKind::kValidation, "frame has no column '" + std::string(name) + "'");
}

bool AlignedFrame::has_column(std::string_view name) const {
  return std::any_of(columns.begin(), columns.end(), [&](const FrameColumn& c) { return c.name == name; });
}

std::vector<TimeSeries> AlignedFrame::to_series() const {
  std::vector<TimeSeries> out;
  out.reserve(columns.size());
  for (const auto& c : columns) {
    std::vector<Observation> pts(dates.size());
    for (std::size_t i = 0; i < dates.size(); ++i) pts[i] = {dates[i], c.values[i]};
    out.emplace_back(c.name, frequency, std::move(pts));
  }
  return out;
}

AlignedFrame align(std::span<const TimeSeries> series) {
  if (series.empty()) fail(ErrorKind::kDomain, "align: no series given");
  const Frequency freq = series.front().frequency();
  std::set<std::string> names;
  for (const auto& s : series) {
    if (s.frequency() != freq) {
      fail(ErrorKind::kDomain, "align: series '" + s.name() + "' is " + std::string(to_string(s.frequency())) +
                                   ", expected " + std::string(to_string(freq)));
    }
    if (!names.insert(s.name()).second) fail(ErrorKind::kDomain, "align: duplicate series name '" + s.name() + "'");
  }

  std::vector<Date> common = series.front().dates();
  for (std::size_t k = 1; k < series.size(); ++k) {
    const auto other = series[k].dates();
    std::vector<Date> next;
    std::set_intersection(common.begin(), common.end(), other.begin(), other.end(), std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty()) fail(ErrorKind::kValidation, "no overlapping dates");

  AlignedFrame frame;
  frame.frequency = freq;
  frame.dates = common;
  for (const auto& s : series) {
    FrameColumn col{s.name(), {}};
    col.values.reserve(common.size());
    auto it = s.points().begin();
    for (const auto& d : common) {
      while (it->date < d) ++it;
      col.values.push_back(it->value);
    }
    frame.columns.push_back(std::move(col));
  }
  return frame;
}

std::pair<AlignedFrame, AlignedFrame> split_at(const AlignedFrame& frame, const Date& cut) {
  AlignedFrame before{frame.frequency, {}, {}};
  AlignedFrame after{frame.frequency, {}, {}};
  for (const auto& c : frame.columns) {
    before.columns.push_back({c.name, {}});
    after.columns.push_back({c.name, {}});
  }
  for (std::size_t i = 0; i < frame.dates.size(); ++i) {
    auto& side = frame.dates[i] < cut ? before : after;
    side.dates.push_back(frame.dates[i]);
    for (std::size_t k = 0; k < frame.columns.size(); ++k) side.columns[k].values.push_back(frame.columns[k].values[i]);
  }
  return {std::move(before), std::move(after)};
}

void write_csv(const AlignedFrame& frame, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kValidation, "cannot write " + path.string());
  out << "date";
  for (const auto& c : frame.columns) out << ',' << c.name;
  out << '\n';
  for (std::size_t i = 0; i < frame.dates.size(); ++i) {
    out << format_date(frame.dates[i]);
    for (const auto& c : frame.columns) out << ',' << format_double(c.values[i]);
    out << '\n';
  }
}

}  // namespace housedyn
