#include "mfp/array_geom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mfp/error.hpp"

namespace mfp {

void SensorArray::require_within(double waveguide_depth_m) const {
  for (std::size_t n = 0; n < depths_m_.size(); ++n) {
    if (!(depths_m_[n] > 0.0 && depths_m_[n] < waveguide_depth_m)) {
      throw Error(Errc::kInvalidArgument, "sensor " + std::to_string(n) + " at depth " +
                                              std::to_string(depths_m_[n]) +
                                              " m is outside the waveguide");
    }
  }
}

SensorArray fixed_vla(std::vector<double> depths_m, std::optional<std::vector<double>> range_offsets_m) {
  if (depths_m.empty()) {
    throw Error(Errc::kInvalidArgument, "sensor array needs at least one depth");
  }
  std::vector<double> offsets =
      range_offsets_m ? std::move(*range_offsets_m) : std::vector<double>(depths_m.size(), 0.0);
  if (offsets.size() != depths_m.size()) {
    throw Error(Errc::kDimensionMismatch, "offsets and depths differ in length");
  }
  for (std::size_t n = 0; n < depths_m.size(); ++n) {
    if (!std::isfinite(depths_m[n]) || depths_m[n] <= 0.0) {
      throw Error(Errc::kInvalidArgument, "sensor " + std::to_string(n) + " depth must be positive");
    }
    if (n > 0 && !(depths_m[n] > depths_m[n - 1])) {
      throw Error(Errc::kInvalidArgument, "sensor depths must be strictly increasing (sensor " +
                                              std::to_string(n) + ")");
    }
    if (!std::isfinite(offsets[n]) || std::abs(offsets[n]) >= SensorArray::kMaxRangeOffsetM) {
      throw Error(Errc::kInvalidArgument, "sensor " + std::to_string(n) + " range offset out of bounds");
    }
  }
  return SensorArray(std::move(depths_m), std::move(offsets));
}

SensorArray random_vla(std::size_t n_sensors, std::size_t grid_count, double grid_spacing_m, Rng& rng) {
  if (n_sensors < 2) {
    throw Error(Errc::kInvalidArgument, "random array needs at least two sensors");
  }
  if (n_sensors > grid_count) {
    throw Error(Errc::kInvalidArgument, "cannot place " + std::to_string(n_sensors) +
                                            " sensors on " + std::to_string(grid_count) + " grid points");
  }
  if (!(grid_spacing_m > 0.0) || !std::isfinite(grid_spacing_m)) {
    throw Error(Errc::kInvalidArgument, "grid spacing must be positive");
  }

  // Partial Fisher-Yates over grid slots 1..grid_count.
  std::vector<std::size_t> slots(grid_count);
  std::iota(slots.begin(), slots.end(), std::size_t{1});
  for (std::size_t i = 0; i < n_sensors; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, grid_count - 1);
    std::swap(slots[i], slots[pick(rng)]);
  }
  slots.resize(n_sensors);
  std::sort(slots.begin(), slots.end());

  std::vector<double> depths(n_sensors);
  std::transform(slots.begin(), slots.end(), depths.begin(),
                 [&](std::size_t s) { return static_cast<double>(s) * grid_spacing_m; });
  return fixed_vla(std::move(depths));
}

SensorArray random_vla(std::size_t n_sensors, std::size_t grid_count, double grid_spacing_m,
                       std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  return random_vla(n_sensors, grid_count, grid_spacing_m, rng);
}

}  // namespace mfp
