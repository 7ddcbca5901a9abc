#pragma once

#include <filesystem>
#include <iosfwd>

#include "mfp/waveguide.hpp"

namespace mfp {

// Replica file format, version 1. Plain text, one record per line, fields
// separated by single spaces; numbers use the shortest decimal form that
// round-trips the binary double exactly.
//
//   mfp-replicas
//   format_version 1
//   n_sensors <N>
//   n_ranges <R>
//   n_depths <Z>
//   ranges_m <R values>
//   depths_m <Z values>
//   sensor_depths_m <N values>
//   sensor_offsets_m <N values>
//   cells
//   <re_1 im_1 ... re_N im_N>        (R*Z rows, range-major: cell (i, j) is row i*Z + j)
//
// Lines starting with '#' are ignored on import.

inline constexpr int kReplicaFormatVersion = 1;

void export_replicas(std::ostream& out, const ReplicaGrid& grid);
void export_replicas(const std::filesystem::path& path, const ReplicaGrid& grid);

/// Errors: kMalformedFile (syntax), kDimensionMismatch (counts disagree with
/// the header), kNonFiniteValue (names the offending cell).
ReplicaGrid import_replicas(std::istream& in);
ReplicaGrid import_replicas(const std::filesystem::path& path);

}  // namespace mfp
