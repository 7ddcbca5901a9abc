#include "mfp/processors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "mfp/error.hpp"
#include "mfp/format.hpp"

namespace mfp {
namespace {

constexpr double kBasisTolerance = 1e-10;
constexpr double kUnitEigenTolerance = 1e-9;

// exp(2 pi i j / N) for j = 0..N-1; the Fourier vector entry u_k[n] is
// roots[(k n) mod N] / sqrt(N).
std::vector<std::complex<double>> unit_roots(std::size_t n) {
  std::vector<std::complex<double>> roots(n);
  for (std::size_t j = 0; j < n; ++j) {
    roots[j] = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n));
  }
  return roots;
}

double max_abs(const CVector& v) {
  double m = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
  return m;
}

}  // namespace

std::string_view to_string(ProcessorKind kind) {
  return kind == ProcessorKind::kBartlett ? "bartlett" : "graph";
}

ProcessorKind parse_processor_kind(std::string_view text) {
  if (text == "bartlett") return ProcessorKind::kBartlett;
  if (text == "graph") return ProcessorKind::kGraph;
  throw Error(Errc::kInvalidArgument, "unknown processor '" + std::string(text) + "'");
}

std::size_t AmbiguitySurface::flagged_count() const {
  return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), true));
}

MeasuredField MeasuredField::from(CVector pressures) {
  for (Eigen::Index i = 0; i < pressures.size(); ++i) {
    if (!std::isfinite(pressures[i].real()) || !std::isfinite(pressures[i].imag())) {
      throw Error(Errc::kNonFiniteValue, "measured field entry " + std::to_string(i) + " is not finite");
    }
  }
  return MeasuredField{std::move(pressures)};
}

CovarianceMatrix covariance(const MeasuredField& field) {
  return CovarianceMatrix{field.pressures * field.pressures.adjoint()};
}

CovarianceMatrix covariance(std::span<const MeasuredField> snapshots) {
  if (snapshots.empty()) {
    throw Error(Errc::kInvalidArgument, "covariance needs at least one snapshot");
  }
  const Eigen::Index n = snapshots.front().pressures.size();
  CMatrix sum = CMatrix::Zero(n, n);
  for (const auto& s : snapshots) {
    if (s.pressures.size() != n) {
      throw Error(Errc::kDimensionMismatch, "snapshots differ in length");
    }
    sum.noalias() += s.pressures * s.pressures.adjoint();
  }
  return CovarianceMatrix{sum / static_cast<double>(snapshots.size())};
}

double bartlett(const CovarianceMatrix& omega, const ReplicaVector& replica) {
  if (omega.entries.rows() != replica.pressures.size() || omega.entries.cols() != replica.pressures.size()) {
    throw Error(Errc::kDimensionMismatch, "covariance and replica sizes differ");
  }
  if (!(replica.norm > 0.0)) {
    throw Error(Errc::kZeroReplica, "replica has zero norm");
  }
  const CVector w = replica.pressures / replica.norm;
  const double value = w.dot(omega.entries * w).real();
  return std::max(0.0, value);
}

bool graph_usable(const ReplicaVector& replica) {
  if (replica.pressures.size() < 3) return false;
  const double floor = kRatioFloor * max_abs(replica.pressures);
  for (Eigen::Index i = 0; i < replica.pressures.size(); ++i) {
    const double mag = std::abs(replica.pressures[i]);
    if (!(mag > floor) || !std::isfinite(mag)) return false;
  }
  return true;
}

AdjacencyMatrix adjacency(const ReplicaVector& replica) {
  const Eigen::Index n = replica.pressures.size();
  if (n < 3) {
    throw Error(Errc::kInvalidArgument, "graph processor needs at least 3 sensors, got " + std::to_string(n));
  }
  const CVector& g = replica.pressures;
  const double floor = kRatioFloor * max_abs(g);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(std::abs(g[i]) > floor)) {
      throw Error(Errc::kDegenerateReplica, "replica entry " + std::to_string(i) + " is at or below the ratio floor");
    }
  }
  CMatrix a = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index next = (i + 1) % n;
    const Eigen::Index prev = (i + n - 1) % n;
    a(i, next) = 0.5 * (g[i] / g[next]);
    a(i, prev) = 0.5 * (g[i] / g[prev]);
  }
  return AdjacencyMatrix{std::move(a), replica.location};
}

double shift_identity_residual(const AdjacencyMatrix& a, const CVector& field) {
  if (a.entries.rows() != field.size()) {
    throw Error(Errc::kDimensionMismatch, "adjacency and field sizes differ");
  }
  const double norm = field.norm();
  if (!(norm > 0.0)) {
    throw Error(Errc::kInvalidArgument, "shift identity residual of a zero field");
  }
  return (a.entries * field - field).norm() / norm;
}

GftBasis gft_basis(const AdjacencyMatrix& a, BasisCheck check) {
  const Eigen::Index n = a.entries.rows();
  if (n < 3 || a.entries.cols() != n) {
    throw Error(Errc::kInvalidArgument, "adjacency must be square with N >= 3");
  }
  const auto un = static_cast<std::size_t>(n);

  // Generator d up to scale: A(i, i-1) = d_i / (2 d_{i-1}).
  CVector d(n);
  d[0] = 1.0;
  for (Eigen::Index i = 1; i < n; ++i) {
    d[i] = 2.0 * a.entries(i, i - 1) * d[i - 1];
  }
  const double d_norm = d.norm();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(std::abs(d[i]) > 0.0) || !std::isfinite(std::abs(d[i]))) {
      throw Error(Errc::kReconstructionFailure, "adjacency subdiagonal does not define a usable generator");
    }
  }
  if (!std::isfinite(d_norm)) {
    throw Error(Errc::kReconstructionFailure, "generator norm overflow");
  }

  const auto roots = unit_roots(un);
  GftBasis basis;
  basis.eigenvalues.resize(un);
  basis.inverse.resize(n, n);
  basis.forward.resize(n, n);
  const double forward_scale = d_norm / static_cast<double>(n);
  for (std::size_t k = 0; k < un; ++k) {
    basis.eigenvalues[k] = std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    for (std::size_t m = 0; m < un; ++m) {
      const std::complex<double> w = roots[(k * m) % un];
      const auto ki = static_cast<Eigen::Index>(k);
      const auto mi = static_cast<Eigen::Index>(m);
      basis.inverse(mi, ki) = d[mi] * w / d_norm;
      basis.forward(ki, mi) = forward_scale * std::conj(w) / d[mi];
    }
  }
  basis.unit_index = 0;

  if (check == BasisCheck::kFull) {
    std::size_t unit_count = 0;
    for (double lambda : basis.eigenvalues) {
      if (std::abs(lambda - 1.0) <= kUnitEigenTolerance) ++unit_count;
    }
    if (unit_count != 1) {
      throw Error(Errc::kReconstructionFailure, "unit eigenvalue is not simple at N = " + std::to_string(n));
    }
    const CMatrix identity_err = basis.forward * basis.inverse - CMatrix::Identity(n, n);
    if (!(identity_err.cwiseAbs().maxCoeff() <= kBasisTolerance)) {
      throw Error(Errc::kReconstructionFailure, "F T deviates from identity");
    }
    Eigen::VectorXd lambda(n);
    for (Eigen::Index k = 0; k < n; ++k) lambda[k] = basis.eigenvalues[static_cast<std::size_t>(k)];
    const CMatrix rebuilt = basis.inverse * lambda.cast<std::complex<double>>().asDiagonal() * basis.forward;
    if (!((rebuilt - a.entries).norm() <= kBasisTolerance * a.entries.norm())) {
      throw Error(Errc::kReconstructionFailure, "T diag(lambda) F does not reproduce A");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!(std::abs(basis.inverse.col(k).norm() - 1.0) <= kBasisTolerance)) {
        throw Error(Errc::kReconstructionFailure, "eigenvector column is not unit norm");
      }
    }
  }
  return basis;
}

double graph_cost(const GftBasis& basis, const MeasuredField& field, double epsilon) {
  if (basis.forward.cols() != field.pressures.size()) {
    throw Error(Errc::kDimensionMismatch, "basis and field sizes differ");
  }
  if (!(epsilon > 0.0)) {
    throw Error(Errc::kInvalidArgument, "epsilon must be positive");
  }
  const CVector spectrum = basis.forward * field.pressures;
  const Eigen::VectorXd energy = spectrum.cwiseAbs2();
  Eigen::Index largest = 0;
  for (Eigen::Index k = 1; k < energy.size(); ++k) {
    if (energy[k] > energy[largest]) largest = k;
  }
  double remainder = 0.0;
  for (Eigen::Index k = 0; k < energy.size(); ++k) {
    if (k != largest) remainder += energy[k];
  }
  return 1.0 / (remainder + epsilon);
}

double default_epsilon(const MeasuredField& field) {
  const double e = kDefaultEpsilonRel * field.pressures.squaredNorm();
  return e > 0.0 ? e : std::numeric_limits<double>::min();
}

AmbiguitySurface ambiguity_surface(ProcessorKind kind, const ReplicaGrid& grid, const MeasuredField& field,
                                   double epsilon, const ParallelOptions& parallel) {
  if (grid.cell_count() == 0) {
    throw Error(Errc::kEmptySurface, "replica grid has no cells");
  }
  if (grid.n_sensors() != field.size()) {
    throw Error(Errc::kDimensionMismatch, "grid has " + std::to_string(grid.n_sensors()) +
                                              " sensors but the field has " + std::to_string(field.size()));
  }
  if (kind == ProcessorKind::kGraph && field.size() < 3) {
    throw Error(Errc::kInvalidArgument, "graph processor needs at least 3 sensors");
  }
  if (kind == ProcessorKind::kGraph && !(epsilon > 0.0)) {
    throw Error(Errc::kInvalidArgument, "epsilon must be positive");
  }

  AmbiguitySurface surface;
  surface.ranges_m = grid.ranges_m();
  surface.depths_m = grid.depths_m();
  const std::size_t n_ranges = surface.ranges_m.size();
  const std::size_t n_depths = surface.depths_m.size();
  surface.values.assign(grid.cell_count(), 0.0);
  // vector<bool> packs bits, so each worker writes to its own byte buffer.
  std::vector<unsigned char> flags(grid.cell_count(), 0);

  const CovarianceMatrix omega = kind == ProcessorKind::kBartlett ? covariance(field) : CovarianceMatrix{};

  parallel_for(n_ranges, parallel, [&](std::size_t i) {
    for (std::size_t j = 0; j < n_depths; ++j) {
      const std::size_t idx = i * n_depths + j;
      const ReplicaVector& replica = grid.replicas()[idx];
      if (kind == ProcessorKind::kBartlett) {
        if (!(replica.norm > 0.0)) {
          flags[idx] = 1;
          continue;
        }
        surface.values[idx] = bartlett(omega, replica);
      } else {
        if (!graph_usable(replica)) {
          flags[idx] = 1;
          continue;
        }
        const GftBasis basis = gft_basis(adjacency(replica), BasisCheck::kNone);
        surface.values[idx] = graph_cost(basis, field, epsilon);
      }
    }
  });

  surface.flagged.assign(flags.begin(), flags.end());
  normalize_db(surface);
  return surface;
}

void normalize_db(AmbiguitySurface& surface) {
  const double peak = surface.values.empty() ? 0.0 : *std::max_element(surface.values.begin(), surface.values.end());
  surface.values_db.resize(surface.values.size());
  for (std::size_t k = 0; k < surface.values.size(); ++k) {
    if (!(peak > 0.0)) {
      surface.values_db[k] = 0.0;
    } else if (surface.values[k] == peak) {
      surface.values_db[k] = 0.0;
    } else {
      surface.values_db[k] = 10.0 * std::log10(surface.values[k] / peak);
    }
  }
}

Estimate locate(const AmbiguitySurface& surface) {
  if (surface.values.empty()) {
    throw Error(Errc::kEmptySurface, "surface has no cells");
  }
  std::size_t best = surface.values.size();
  for (std::size_t k = 0; k < surface.values.size(); ++k) {
    if (!surface.flagged.empty() && surface.flagged[k]) continue;
    if (best == surface.values.size() || surface.values[k] > surface.values[best]) best = k;
  }
  if (best == surface.values.size()) {
    throw Error(Errc::kEmptySurface, "every surface cell is flagged");
  }
  const std::size_t n_depths = surface.depths_m.size();
  Estimate e;
  e.range_index = best / n_depths;
  e.depth_index = best % n_depths;
  e.range_m = surface.ranges_m[e.range_index];
  e.depth_m = surface.depths_m[e.depth_index];
  e.peak_db = surface.values_db.empty() ? 0.0 : surface.values_db[best];
  return e;
}

void write_surface_csv(std::ostream& out, const AmbiguitySurface& surface) {
  out << "range_m,depth_m,value,value_db,flagged\n";
  for (std::size_t i = 0; i < surface.ranges_m.size(); ++i) {
    for (std::size_t j = 0; j < surface.depths_m.size(); ++j) {
      const std::size_t k = surface.index(i, j);
      out << format_double(surface.ranges_m[i]) << ',' << format_double(surface.depths_m[j]) << ','
          << format_double(surface.values[k]) << ',' << format_double(surface.values_db[k]) << ','
          << (surface.flagged.empty() || !surface.flagged[k] ? 0 : 1) << '\n';
    }
  }
}

}  // namespace mfp
