#include "mfp/replica_io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mfp/error.hpp"
#include "mfp/format.hpp"

namespace mfp {
namespace {

void write_row(std::ostream& out, const char* key, const std::vector<double>& values) {
  out << key;
  for (double v : values) {
    out << ' ' << format_double(v);
  }
  out << '\n';
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-comment, non-blank line split into tokens.
  std::vector<std::string> next(const char* what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      for (std::string tok; ss >> tok;) tokens.push_back(std::move(tok));
      if (!tokens.empty()) return tokens;
    }
    throw Error(Errc::kMalformedFile, std::string("unexpected end of file, expected ") + what);
  }

  bool at_end() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") != std::string::npos && line.front() != '#') return false;
    }
    return true;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

double to_number(const std::string& token, std::size_t line_no) {
  auto v = parse_double(token);
  if (!v) {
    throw Error(Errc::kMalformedFile, "line " + std::to_string(line_no) + ": '" + token + "' is not a number");
  }
  return *v;
}

std::size_t keyed_count(LineReader& reader, const char* key) {
  auto tokens = reader.next(key);
  if (tokens.size() != 2 || tokens[0] != key) {
    throw Error(Errc::kMalformedFile, "line " + std::to_string(reader.line_no()) + ": expected '" + key + " <n>'");
  }
  const double v = to_number(tokens[1], reader.line_no());
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e9) {
    throw Error(Errc::kMalformedFile, std::string(key) + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

std::vector<double> keyed_values(LineReader& reader, const char* key, std::size_t expected) {
  auto tokens = reader.next(key);
  if (tokens.empty() || tokens[0] != key) {
    throw Error(Errc::kMalformedFile, "line " + std::to_string(reader.line_no()) + ": expected '" + key + "'");
  }
  if (tokens.size() - 1 != expected) {
    throw Error(Errc::kDimensionMismatch, std::string(key) + " has " + std::to_string(tokens.size() - 1) +
                                              " values, header says " + std::to_string(expected));
  }
  std::vector<double> values;
  values.reserve(expected);
  for (std::size_t k = 1; k < tokens.size(); ++k) {
    const double v = to_number(tokens[k], reader.line_no());
    if (!std::isfinite(v)) {
      throw Error(Errc::kNonFiniteValue, std::string(key) + " entry " + std::to_string(k - 1) + " is not finite");
    }
    values.push_back(v);
  }
  return values;
}

}  // namespace

void export_replicas(std::ostream& out, const ReplicaGrid& grid) {
  out << "mfp-replicas\n";
  out << "format_version " << kReplicaFormatVersion << '\n';
  out << "n_sensors " << grid.n_sensors() << '\n';
  out << "n_ranges " << grid.ranges_m().size() << '\n';
  out << "n_depths " << grid.depths_m().size() << '\n';
  write_row(out, "ranges_m", grid.ranges_m());
  write_row(out, "depths_m", grid.depths_m());
  write_row(out, "sensor_depths_m", grid.array().depths_m());
  write_row(out, "sensor_offsets_m", grid.array().range_offsets_m());
  out << "cells\n";
  for (const auto& replica : grid.replicas()) {
    for (Eigen::Index n = 0; n < replica.pressures.size(); ++n) {
      if (n > 0) out << ' ';
      out << format_double(replica.pressures[n].real()) << ' ' << format_double(replica.pressures[n].imag());
    }
    out << '\n';
  }
  if (!out) {
    throw Error(Errc::kIo, "failed writing replica grid");
  }
}

void export_replicas(const std::filesystem::path& path, const ReplicaGrid& grid) {
  std::ofstream out(path);
  if (!out) {
    throw Error(Errc::kIo, "cannot open '" + path.string() + "' for writing");
  }
  export_replicas(out, grid);
  out.close();
  if (!out) {
    throw Error(Errc::kIo, "failed writing '" + path.string() + "'");
  }
}

ReplicaGrid import_replicas(std::istream& in) {
  LineReader reader(in);

  auto magic = reader.next("magic line");
  if (magic.size() != 1 || magic[0] != "mfp-replicas") {
    throw Error(Errc::kMalformedFile, "missing 'mfp-replicas' magic line");
  }
  const std::size_t version = keyed_count(reader, "format_version");
  if (version != static_cast<std::size_t>(kReplicaFormatVersion)) {
    throw Error(Errc::kMalformedFile, "unsupported format_version " + std::to_string(version));
  }
  const std::size_t n_sensors = keyed_count(reader, "n_sensors");
  const std::size_t n_ranges = keyed_count(reader, "n_ranges");
  const std::size_t n_depths = keyed_count(reader, "n_depths");
  if (n_sensors == 0 || n_ranges == 0 || n_depths == 0) {
    throw Error(Errc::kMalformedFile, "header counts must be positive");
  }

  auto ranges = keyed_values(reader, "ranges_m", n_ranges);
  auto depths = keyed_values(reader, "depths_m", n_depths);
  auto sensor_depths = keyed_values(reader, "sensor_depths_m", n_sensors);
  auto sensor_offsets = keyed_values(reader, "sensor_offsets_m", n_sensors);
  for (std::size_t i = 1; i < ranges.size(); ++i) {
    if (!(ranges[i] > ranges[i - 1])) throw Error(Errc::kMalformedFile, "ranges_m must be strictly increasing");
  }
  for (std::size_t j = 1; j < depths.size(); ++j) {
    if (!(depths[j] > depths[j - 1])) throw Error(Errc::kMalformedFile, "depths_m must be strictly increasing");
  }
  SensorArray array = fixed_vla(std::move(sensor_depths), std::move(sensor_offsets));

  auto marker = reader.next("cells");
  if (marker.size() != 1 || marker[0] != "cells") {
    throw Error(Errc::kMalformedFile, "line " + std::to_string(reader.line_no()) + ": expected 'cells'");
  }

  std::vector<ReplicaVector> replicas;
  replicas.reserve(n_ranges * n_depths);
  for (std::size_t i = 0; i < n_ranges; ++i) {
    for (std::size_t j = 0; j < n_depths; ++j) {
      const std::string cell = "cell (range " + std::to_string(i) + ", depth " + std::to_string(j) + ")";
      auto tokens = reader.next("cell row");
      if (tokens.size() != 2 * n_sensors) {
        throw Error(Errc::kDimensionMismatch, cell + " has " + std::to_string(tokens.size()) +
                                                  " values, expected 2 x n_sensors = " +
                                                  std::to_string(2 * n_sensors));
      }
      CVector pressures(static_cast<Eigen::Index>(n_sensors));
      for (std::size_t n = 0; n < n_sensors; ++n) {
        const double re = to_number(tokens[2 * n], reader.line_no());
        const double im = to_number(tokens[2 * n + 1], reader.line_no());
        if (!std::isfinite(re) || !std::isfinite(im)) {
          throw Error(Errc::kNonFiniteValue, cell + ", sensor " + std::to_string(n) + " is not finite");
        }
        pressures[static_cast<Eigen::Index>(n)] = {re, im};
      }
      replicas.push_back(ReplicaVector::from_pressures(SourceLocation{ranges[i], depths[j]}, std::move(pressures)));
    }
  }
  if (!reader.at_end()) {
    throw Error(Errc::kDimensionMismatch, "more cell rows than n_ranges x n_depths");
  }
  return ReplicaGrid(std::move(ranges), std::move(depths), std::move(array), std::move(replicas));
}

ReplicaGrid import_replicas(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::kIo, "cannot open '" + path.string() + "'");
  }
  return import_replicas(in);
}

}  // namespace mfp
