#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfp/montecarlo.hpp"
#include "mfp/processors.hpp"

namespace mfploc {

/// Parsed configuration file plus command-line overrides. Every key is
/// optional; omitted keys take the defaults of mfp::Scenario.
struct RunConfig {
  mfp::Scenario scenario;
  std::vector<mfp::ProcessorKind> processors{mfp::ProcessorKind::kGraph};
  std::size_t surface_trial_index = 0;
  std::vector<std::size_t> sweep_sensor_counts{4, 6, 8, 10, 15, 20, 30, 40};
  std::size_t sweep_trials = 100;
  std::string replicas_file = "replicas.txt";
  unsigned threads = 1;
  std::filesystem::path out_dir = ".";
  bool out_dir_given = false;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::string> processor;
  std::optional<std::size_t> trials;
  std::optional<std::vector<std::size_t>> sensors;
  std::optional<unsigned> threads;
};

/// Structural parse. Unknown keys and wrong types throw
/// mfp::Error(kInvalidArgument). Domain invariants are checked later by
/// mfp::Scenario::validate().
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

void apply_overrides(RunConfig& config, const Overrides& overrides);

/// "bartlett", "graph" or "both".
std::vector<mfp::ProcessorKind> parse_processor_selection(const std::string& text);

}  // namespace mfploc
