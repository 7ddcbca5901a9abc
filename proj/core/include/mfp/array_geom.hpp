#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "mfp/rng.hpp"

namespace mfp {

/// Receivers in the range-depth plane of a nearly vertical line array.
/// Depths are strictly increasing and positive; range offsets are measured
/// toward the source and stay below kMaxRangeOffsetM in magnitude.
class SensorArray {
 public:
  static constexpr double kMaxRangeOffsetM = 100.0;

  SensorArray() = default;

  const std::vector<double>& depths_m() const noexcept { return depths_m_; }
  const std::vector<double>& range_offsets_m() const noexcept { return offsets_m_; }
  std::size_t size() const noexcept { return depths_m_.size(); }

  /// Throws kInvalidArgument unless every sensor lies strictly inside (0, waveguide_depth_m).
  void require_within(double waveguide_depth_m) const;

  friend bool operator==(const SensorArray&, const SensorArray&) = default;

 private:
  friend SensorArray fixed_vla(std::vector<double>, std::optional<std::vector<double>>);
  SensorArray(std::vector<double> depths, std::vector<double> offsets)
      : depths_m_(std::move(depths)), offsets_m_(std::move(offsets)) {}

  std::vector<double> depths_m_;
  std::vector<double> offsets_m_;
};

/// Explicit geometry. Offsets default to zero.
SensorArray fixed_vla(std::vector<double> depths_m,
                      std::optional<std::vector<double>> range_offsets_m = std::nullopt);

/// Draws n_sensors distinct depths uniformly without replacement from the
/// grid {s, 2s, ..., grid_count*s} (s = grid_spacing_m). The grid starts one
/// step below the surface because a receiver at z = 0 sits on the
/// pressure-release null.
SensorArray random_vla(std::size_t n_sensors, std::size_t grid_count, double grid_spacing_m, Rng& rng);
SensorArray random_vla(std::size_t n_sensors, std::size_t grid_count, double grid_spacing_m,
                       std::uint64_t rng_seed);

}  // namespace mfp
