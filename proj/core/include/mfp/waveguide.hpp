#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mfp/array_geom.hpp"
#include "mfp/parallel.hpp"

namespace mfp {

using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Ideal isovelocity waveguide: pressure-release surface at z = 0, rigid
/// bottom at z = depth_m, constant sound speed and density.
struct Environment {
  double depth_m = 100.0;
  double sound_speed_mps = 1500.0;
  double frequency_hz = 200.0;
  double density = 1000.0;

  /// Throws kInvalidArgument on a non-positive or non-finite parameter.
  void validate() const;
  double wavenumber() const;  // 2*pi*f/c, rad/m
  double wavelength_m() const { return sound_speed_mps / frequency_hz; }
  /// Minimum horizontal source-receiver range for the asymptotic modal sum.
  double far_field_floor_m() const { return 10.0 * wavelength_m(); }
};

/// Propagating normal modes, ordered by mode number m = 1..M.
struct ModeSet {
  std::vector<double> vertical_wavenumbers;    // gamma_m = (m - 1/2) pi / D
  std::vector<double> horizontal_wavenumbers;  // k_rm = sqrt(k^2 - gamma_m^2), strictly decreasing

  std::size_t mode_count() const noexcept { return vertical_wavenumbers.size(); }
};

struct SourceLocation {
  double range_m = 0.0;
  double depth_m = 0.0;

  friend bool operator==(const SourceLocation&, const SourceLocation&) = default;
};

/// Green's-function field at each sensor of an array for one candidate source.
struct ReplicaVector {
  SourceLocation location;
  CVector pressures;
  double norm = 0.0;  // l2 norm of pressures

  static ReplicaVector from_pressures(SourceLocation location, CVector pressures);
};

/// Dense dictionary of replicas over a range x depth search grid. Cells are
/// stored range-major: cell (i, j) sits at index i * depths.size() + j.
class ReplicaGrid {
 public:
  ReplicaGrid() = default;
  ReplicaGrid(std::vector<double> ranges_m, std::vector<double> depths_m, SensorArray array,
              std::vector<ReplicaVector> replicas);

  const std::vector<double>& ranges_m() const noexcept { return ranges_m_; }
  const std::vector<double>& depths_m() const noexcept { return depths_m_; }
  const SensorArray& array() const noexcept { return array_; }
  std::size_t n_sensors() const noexcept { return array_.size(); }
  std::size_t cell_count() const noexcept { return replicas_.size(); }

  const ReplicaVector& at(std::size_t range_index, std::size_t depth_index) const;
  const std::vector<ReplicaVector>& replicas() const noexcept { return replicas_; }

 private:
  std::vector<double> ranges_m_;
  std::vector<double> depths_m_;
  SensorArray array_;
  std::vector<ReplicaVector> replicas_;
};

/// Throws kNoPropagatingModes when the frequency is below the first cutoff c/(4D).
ModeSet solve_modes(const Environment& env);

/// Far-field modal sum with unit source strength:
///   g = sum_m sin(gamma_m z_s) sin(gamma_m z) exp(i k_rm r) / sqrt(k_rm r),
/// with r = source.range_m - receiver_range_offset_m. Throws kNearFieldRange
/// when r is under ten wavelengths.
std::complex<double> greens(const ModeSet& modes, const Environment& env, const SourceLocation& source,
                            double receiver_depth_m, double receiver_range_offset_m);

ReplicaVector replica_vector(const ModeSet& modes, const Environment& env, const SourceLocation& source,
                             const SensorArray& array);

/// Evaluates every (range, depth) cell. Axes must be non-empty and strictly
/// increasing; depths must lie strictly inside the waveguide. Output is
/// bitwise identical to per-cell replica_vector() calls for any thread count.
ReplicaGrid replica_grid(const ModeSet& modes, const Environment& env, std::span<const double> ranges_m,
                         std::span<const double> depths_m, const SensorArray& array,
                         const ParallelOptions& parallel = {});

/// n evenly spaced values from first to last inclusive (n = 1 gives {first}).
std::vector<double> linspace(double first, double last, std::size_t n);

/// n cell-centred depths covering (0, D): (j + 1/2) * D / n. Keeps the
/// surface and bottom out of the search grid.
std::vector<double> inset_depths(double waveguide_depth_m, std::size_t n);

}  // namespace mfp
