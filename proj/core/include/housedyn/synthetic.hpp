#pragma once

#include <cstdint>
#include <span>

#include "housedyn/evt.hpp"
#include "housedyn/timeseries.hpp"

namespace housedyn {

/// Block maxima drawn from the nonstationary GEV at each block's covariates.
/// Periods, covariates and n_obs are copied from `layout`.
[[nodiscard]] BlockMaxima sample_blocks(const GevCoefficients& c, std::span<const Block> layout, std::uint64_t seed);

/// Weekday series whose monthly maxima are exactly the block maxima; other
/// days sit below the maximum by a random fraction of `spread`.
[[nodiscard]] TimeSeries daily_path_with_maxima(const BlockMaxima& data, double spread, std::uint64_t seed,
                                                std::string name = "price");

}  // namespace housedyn
