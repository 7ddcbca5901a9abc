#include "mfp/waveguide.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mfp/error.hpp"

namespace mfp {
namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

// exp(i kr r) / sqrt(kr r). Shared by greens() and replica_grid() so both
// paths produce bitwise-identical terms.
std::complex<double> range_factor(double kr, double r) {
  const double phase = kr * r;
  return std::polar(1.0 / std::sqrt(phase), phase);
}

std::complex<double> modal_sum(std::span<const double> sin_source, std::span<const double> sin_receiver,
                               std::span<const std::complex<double>> range_factors) {
  std::complex<double> g{0.0, 0.0};
  for (std::size_t m = 0; m < sin_source.size(); ++m) {
    g += (sin_source[m] * sin_receiver[m]) * range_factors[m];
  }
  return g;
}

void require_strictly_increasing(std::span<const double> axis, const char* name) {
  if (axis.empty()) {
    throw Error(Errc::kInvalidArgument, std::string(name) + " axis is empty");
  }
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!std::isfinite(axis[i])) {
      throw Error(Errc::kInvalidArgument, std::string(name) + " axis has a non-finite value");
    }
    if (i > 0 && !(axis[i] > axis[i - 1])) {
      throw Error(Errc::kInvalidArgument, std::string(name) + " axis must be strictly increasing");
    }
  }
}

}  // namespace

void Environment::validate() const {
  if (!positive_finite(depth_m)) throw Error(Errc::kInvalidArgument, "depth_m must be positive");
  if (!positive_finite(sound_speed_mps)) throw Error(Errc::kInvalidArgument, "sound_speed_mps must be positive");
  if (!positive_finite(frequency_hz)) throw Error(Errc::kInvalidArgument, "frequency_hz must be positive");
  if (!positive_finite(density)) throw Error(Errc::kInvalidArgument, "density must be positive");
  if (!positive_finite(wavenumber())) throw Error(Errc::kInvalidArgument, "wavenumber is not finite");
}

double Environment::wavenumber() const {
  return 2.0 * std::numbers::pi * frequency_hz / sound_speed_mps;
}

ReplicaVector ReplicaVector::from_pressures(SourceLocation location, CVector pressures) {
  const double norm = pressures.norm();
  return ReplicaVector{location, std::move(pressures), norm};
}

ReplicaGrid::ReplicaGrid(std::vector<double> ranges_m, std::vector<double> depths_m, SensorArray array,
                         std::vector<ReplicaVector> replicas)
    : ranges_m_(std::move(ranges_m)),
      depths_m_(std::move(depths_m)),
      array_(std::move(array)),
      replicas_(std::move(replicas)) {
  if (replicas_.size() != ranges_m_.size() * depths_m_.size()) {
    throw Error(Errc::kDimensionMismatch, "replica table size does not match the axes");
  }
  for (const auto& r : replicas_) {
    if (static_cast<std::size_t>(r.pressures.size()) != array_.size()) {
      throw Error(Errc::kDimensionMismatch, "replica length does not match the sensor count");
    }
  }
}

const ReplicaVector& ReplicaGrid::at(std::size_t range_index, std::size_t depth_index) const {
  if (range_index >= ranges_m_.size() || depth_index >= depths_m_.size()) {
    throw Error(Errc::kInvalidArgument, "grid index out of range");
  }
  return replicas_[range_index * depths_m_.size() + depth_index];
}

ModeSet solve_modes(const Environment& env) {
  env.validate();
  const double k = env.wavenumber();
  const double k2 = k * k;
  ModeSet modes;
  for (std::size_t m = 1;; ++m) {
    const double gamma = (static_cast<double>(m) - 0.5) * std::numbers::pi / env.depth_m;
    if (!(gamma < k)) {
      break;
    }
    modes.vertical_wavenumbers.push_back(gamma);
    modes.horizontal_wavenumbers.push_back(std::sqrt(k2 - gamma * gamma));
  }
  if (modes.mode_count() == 0) {
    throw Error(Errc::kNoPropagatingModes,
                "frequency " + std::to_string(env.frequency_hz) + " Hz is below the first modal cutoff " +
                    std::to_string(env.sound_speed_mps / (4.0 * env.depth_m)) + " Hz");
  }
  return modes;
}

std::complex<double> greens(const ModeSet& modes, const Environment& env, const SourceLocation& source,
                            double receiver_depth_m, double receiver_range_offset_m) {
  const double r = source.range_m - receiver_range_offset_m;
  if (!(r >= env.far_field_floor_m())) {
    throw Error(Errc::kNearFieldRange, "horizontal range " + std::to_string(r) +
                                           " m is below the far-field floor of " +
                                           std::to_string(env.far_field_floor_m()) + " m");
  }
  if (!(receiver_depth_m >= 0.0 && receiver_depth_m <= env.depth_m)) {
    throw Error(Errc::kInvalidArgument, "receiver depth outside the waveguide");
  }
  const std::size_t count = modes.mode_count();
  std::vector<double> sin_source(count);
  std::vector<double> sin_receiver(count);
  std::vector<std::complex<double>> factors(count);
  for (std::size_t m = 0; m < count; ++m) {
    const double gamma = modes.vertical_wavenumbers[m];
    sin_source[m] = std::sin(gamma * source.depth_m);
    sin_receiver[m] = std::sin(gamma * receiver_depth_m);
    factors[m] = range_factor(modes.horizontal_wavenumbers[m], r);
  }
  return modal_sum(sin_source, sin_receiver, factors);
}

ReplicaVector replica_vector(const ModeSet& modes, const Environment& env, const SourceLocation& source,
                             const SensorArray& array) {
  array.require_within(env.depth_m);
  CVector pressures(static_cast<Eigen::Index>(array.size()));
  for (std::size_t n = 0; n < array.size(); ++n) {
    try {
      pressures[static_cast<Eigen::Index>(n)] =
          greens(modes, env, source, array.depths_m()[n], array.range_offsets_m()[n]);
    } catch (const Error& e) {
      throw Error(e.code(), "sensor " + std::to_string(n) + ": " + e.what());
    }
  }
  return ReplicaVector::from_pressures(source, std::move(pressures));
}

ReplicaGrid replica_grid(const ModeSet& modes, const Environment& env, std::span<const double> ranges_m,
                         std::span<const double> depths_m, const SensorArray& array,
                         const ParallelOptions& parallel) {
  require_strictly_increasing(ranges_m, "range");
  require_strictly_increasing(depths_m, "depth");
  if (!(depths_m.front() > 0.0 && depths_m.back() < env.depth_m)) {
    throw Error(Errc::kInvalidArgument, "search depths must lie strictly inside (0, D)");
  }
  array.require_within(env.depth_m);

  const std::size_t n_modes = modes.mode_count();
  const std::size_t n_sensors = array.size();
  const std::size_t n_depths = depths_m.size();

  std::vector<double> sin_sensor(n_sensors * n_modes);
  for (std::size_t n = 0; n < n_sensors; ++n) {
    for (std::size_t m = 0; m < n_modes; ++m) {
      sin_sensor[n * n_modes + m] = std::sin(modes.vertical_wavenumbers[m] * array.depths_m()[n]);
    }
  }
  std::vector<double> sin_candidate(n_depths * n_modes);
  for (std::size_t j = 0; j < n_depths; ++j) {
    for (std::size_t m = 0; m < n_modes; ++m) {
      sin_candidate[j * n_modes + m] = std::sin(modes.vertical_wavenumbers[m] * depths_m[j]);
    }
  }

  const double floor_m = env.far_field_floor_m();
  std::vector<ReplicaVector> replicas(ranges_m.size() * n_depths);
  parallel_for(ranges_m.size(), parallel, [&](std::size_t i) {
    std::vector<std::complex<double>> factors(n_sensors * n_modes);
    for (std::size_t n = 0; n < n_sensors; ++n) {
      const double r = ranges_m[i] - array.range_offsets_m()[n];
      if (!(r >= floor_m)) {
        throw Error(Errc::kNearFieldRange, "grid range index " + std::to_string(i) + " (" +
                                               std::to_string(ranges_m[i]) + " m), sensor " +
                                               std::to_string(n) + ": horizontal range below " +
                                               std::to_string(floor_m) + " m");
      }
      for (std::size_t m = 0; m < n_modes; ++m) {
        factors[n * n_modes + m] = range_factor(modes.horizontal_wavenumbers[m], r);
      }
    }
    for (std::size_t j = 0; j < n_depths; ++j) {
      CVector pressures(static_cast<Eigen::Index>(n_sensors));
      const std::span<const double> source_row(sin_candidate.data() + j * n_modes, n_modes);
      for (std::size_t n = 0; n < n_sensors; ++n) {
        pressures[static_cast<Eigen::Index>(n)] =
            modal_sum(source_row, std::span<const double>(sin_sensor.data() + n * n_modes, n_modes),
                      std::span<const std::complex<double>>(factors.data() + n * n_modes, n_modes));
      }
      replicas[i * n_depths + j] =
          ReplicaVector::from_pressures(SourceLocation{ranges_m[i], depths_m[j]}, std::move(pressures));
    }
  });

  return ReplicaGrid(std::vector<double>(ranges_m.begin(), ranges_m.end()),
                     std::vector<double>(depths_m.begin(), depths_m.end()), array, std::move(replicas));
}

std::vector<double> linspace(double first, double last, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = first;
    return out;
  }
  const double step = (last - first) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = first + static_cast<double>(i) * step;
  }
  if (n > 1) {
    out.back() = last;
  }
  return out;
}

std::vector<double> inset_depths(double waveguide_depth_m, std::size_t n) {
  std::vector<double> out(n);
  const double step = waveguide_depth_m / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = (static_cast<double>(j) + 0.5) * step;
  }
  return out;
}

}  // namespace mfp
