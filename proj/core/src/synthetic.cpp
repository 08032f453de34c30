#include "housedyn/synthetic.hpp"

#include <chrono>

#include "housedyn/error.hpp"
#include "housedyn/optimize.hpp"

namespace housedyn {

BlockMaxima sample_blocks(const GevCoefficients& c, std::span<const Block> layout, std::uint64_t seed) {
  UniformStream rng(seed, 0x9e3779b97f4a7c15ULL);
  BlockMaxima out;
  out.blocks.reserve(layout.size());
  for (const auto& b : layout) {
    const double sigma = c.scale(b.cpi);
    if (!(sigma > 0.0)) fail(ErrorKind::kDomain, "sample_blocks: non-positive scale at block covariates");
    Block drawn = b;
    drawn.max_value = gev_quantile(rng.next_open(), c.location(b.rate, b.cpi), sigma, c.xi);
    out.blocks.push_back(drawn);
  }
  return out;
}

TimeSeries daily_path_with_maxima(const BlockMaxima& data, double spread, std::uint64_t seed, std::string name) {
  using namespace std::chrono;
  UniformStream rng(seed, 0xd1b54a32d192ed03ULL);
  std::vector<Observation> points;
  for (const auto& b : data.blocks) {
    std::vector<Date> trading;
    for (sys_days d{b.period / day{1}}; year_month_day{d}.month() == b.period.month(); d += days{1}) {
      const weekday wd{d};
      if (wd != Saturday && wd != Sunday) trading.emplace_back(d);
    }
    const auto peak = static_cast<std::size_t>(rng.next() * static_cast<double>(trading.size()));
    for (std::size_t i = 0; i < trading.size(); ++i) {
      const double below = i == peak ? 0.0 : spread * (0.05 + 0.95 * rng.next());
      points.push_back({trading[i], b.max_value - below});
    }
  }
  return TimeSeries(std::move(name), Frequency::kDaily, std::move(points));
}

}  // namespace housedyn
