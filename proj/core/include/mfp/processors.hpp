#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "mfp/parallel.hpp"
#include "mfp/waveguide.hpp"

namespace mfp {

/// Measured array snapshot p_bar = p + n. All entries finite.
struct MeasuredField {
  CVector pressures;

  /// Throws kNonFiniteValue on NaN/inf entries.
  static MeasuredField from(CVector pressures);
  std::size_t size() const noexcept { return static_cast<std::size_t>(pressures.size()); }
};

/// Sample covariance, Hermitian and positive semidefinite.
struct CovarianceMatrix {
  CMatrix entries;
};

/// Graph shift for one candidate location. Nonzeros sit on the directed
/// nearest-neighbour cycle 0 -> 1 -> ... -> N-1 -> 0 (both directions) with
/// A(i, j) = g_i / (2 g_j).
struct AdjacencyMatrix {
  CMatrix entries;
  SourceLocation source_location;
};

/// Spectral decomposition A = T diag(lambda) F with F = T^-1.
struct GftBasis {
  std::vector<double> eigenvalues;  // graph frequencies, cos(2 pi k / N) for k = 0..N-1
  CMatrix forward;                  // F
  CMatrix inverse;                  // T, unit-norm eigenvector columns
  std::size_t unit_index = 0;       // column of T with eigenvalue 1
};

enum class ProcessorKind { kBartlett, kGraph };

std::string_view to_string(ProcessorKind kind);
ProcessorKind parse_processor_kind(std::string_view text);

struct AmbiguitySurface {
  std::vector<double> ranges_m;
  std::vector<double> depths_m;
  std::vector<double> values;     // range-major, >= 0
  std::vector<double> values_db;  // 10 log10(values / max(values))
  std::vector<bool> flagged;      // degenerate cells, value forced to 0

  std::size_t index(std::size_t range_index, std::size_t depth_index) const {
    return range_index * depths_m.size() + depth_index;
  }
  double value(std::size_t range_index, std::size_t depth_index) const {
    return values[index(range_index, depth_index)];
  }
  std::size_t flagged_count() const;
};

struct Estimate {
  double range_m = 0.0;
  double depth_m = 0.0;
  double peak_db = 0.0;
  std::size_t range_index = 0;
  std::size_t depth_index = 0;
};

/// Entries with |g_i| <= kRatioFloor * max_j |g_j| make a replica unusable
/// for the graph processor.
inline constexpr double kRatioFloor = 1e-12;
/// Default regularizer of the graph cost, relative to ||p_bar||^2.
inline constexpr double kDefaultEpsilonRel = 1e-12;

/// Single-snapshot covariance p_bar p_bar^H.
CovarianceMatrix covariance(const MeasuredField& field);
/// Snapshot-averaged covariance (1/K) sum_k p_k p_k^H. Not used by the
/// single-snapshot experiments.
CovarianceMatrix covariance(std::span<const MeasuredField> snapshots);

/// w^H Omega w with w = g / ||g||. Throws kZeroReplica when ||g|| = 0.
double bartlett(const CovarianceMatrix& omega, const ReplicaVector& replica);

/// True when the replica has no entry at or below the ratio floor and N >= 3.
bool graph_usable(const ReplicaVector& replica);

/// Throws kInvalidArgument for N < 3 and kDegenerateReplica when a replica
/// entry is below the ratio floor.
AdjacencyMatrix adjacency(const ReplicaVector& replica);

/// ||A f - f|| / ||f||. Throws kInvalidArgument on a zero field or size mismatch.
double shift_identity_residual(const AdjacencyMatrix& a, const CVector& field);

enum class BasisCheck {
  kFull,  // verify F T = I, T Lambda F = A and unit columns (O(N^3))
  kNone,
};

/// Canonical eigenbasis. A = D C D^-1 with D = diag(d) and C half the cycle
/// adjacency, so the eigenvectors are D u_k with the Fourier vectors
/// u_k[n] = exp(2 pi i k n / N) / sqrt(N), eigenvalue cos(2 pi k / N). The
/// generator d is recovered from the subdiagonal of A. Columns are ordered
/// k = 0..N-1, so unit_index is 0. Throws kReconstructionFailure when a check
/// fails at tolerance 1e-10.
GftBasis gft_basis(const AdjacencyMatrix& a, BasisCheck check = BasisCheck::kFull);

/// 1 / (||[F p_bar]_-||^2 + epsilon), where [.]_- drops the entry of largest
/// modulus (lowest index on ties).
double graph_cost(const GftBasis& basis, const MeasuredField& field, double epsilon);

/// kDefaultEpsilonRel * ||p_bar||^2, or the smallest positive double for a zero field.
double default_epsilon(const MeasuredField& field);

/// Evaluates the chosen processor over every grid cell. Graph cells whose
/// replica is degenerate get value 0 and are flagged. Throws kEmptySurface on
/// an empty grid and kDimensionMismatch when the field length differs from
/// the grid's sensor count.
AmbiguitySurface ambiguity_surface(ProcessorKind kind, const ReplicaGrid& grid, const MeasuredField& field,
                                   double epsilon, const ParallelOptions& parallel = {});

/// Fills values_db from values (max maps to exactly 0 dB).
void normalize_db(AmbiguitySurface& surface);

/// Maximum of the unflagged cells; ties go to the lowest range index, then
/// the lowest depth index. Throws kEmptySurface when every cell is flagged.
Estimate locate(const AmbiguitySurface& surface);

/// CSV: header "range_m,depth_m,value,value_db,flagged", one row per cell in
/// range-major order.
void write_surface_csv(std::ostream& out, const AmbiguitySurface& surface);

}  // namespace mfp
