#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mfp/array_geom.hpp"
#include "mfp/parallel.hpp"
#include "mfp/processors.hpp"
#include "mfp/rng.hpp"
#include "mfp/waveguide.hpp"

namespace mfp {

/// Closed range x depth box inside which an estimate counts as correct.
struct CorrectnessWindow {
  double range_min_m = 4950.0;
  double range_max_m = 5050.0;
  double depth_min_m = 45.0;
  double depth_max_m = 55.0;

  bool contains(double range_m, double depth_m) const;
};

enum class ArrayRedraw { kPerTrial, kFixed };

std::string_view to_string(ArrayRedraw mode);
ArrayRedraw parse_array_redraw(std::string_view text);

/// Everything a trial needs. Defaults reproduce the 100 m / 200 Hz
/// sensor-count experiment: source at 5 km / 50 m, 4-6 km x full-depth
/// search, 41-point sensor grid at 2 m spacing, 20 dB SNR.
struct Scenario {
  Environment environment;
  SourceLocation source{5000.0, 50.0};
  std::vector<double> search_ranges_m = linspace(4000.0, 6000.0, 101);
  std::vector<double> search_depths_m = inset_depths(100.0, 49);
  std::size_t sensor_grid_count = 41;
  double sensor_grid_spacing_m = 2.0;
  std::size_t n_sensors = 10;
  ArrayRedraw redraw = ArrayRedraw::kPerTrial;
  /// Explicit geometry; when set it replaces the random draw for every trial.
  std::optional<SensorArray> fixed_array;
  double snr_db = 20.0;  // +inf for noiseless runs
  double epsilon_rel = kDefaultEpsilonRel;
  CorrectnessWindow window;
  std::uint64_t master_seed = 20211229;

  /// Throws kInvalidArgument on any violated invariant (including a source
  /// outside the search box or a window not containing the source).
  void validate() const;
};

nlohmann::json to_json(const Scenario& scenario);

/// Total per-entry noise variance for the given clean field:
/// sigma^2 = ||g||^2 / (N 10^(snr/10)). Zero for snr = +inf.
double noise_variance(const ReplicaVector& clean, double snr_db);

/// p_bar = p + n with n_i circular complex Gaussian, real and imaginary parts
/// each N(0, sigma^2 / 2). Throws kZeroReplica on a zero clean field.
MeasuredField inject_noise(const ReplicaVector& clean, double snr_db, Rng& rng);

bool is_correct(double range_m, double depth_m, const CorrectnessWindow& window);
bool is_correct(const Estimate& estimate, const CorrectnessWindow& window);

struct ProcessorOutcome {
  bool correct = false;
  bool failed = false;  // no estimate could be produced
  std::optional<Estimate> estimate;
  std::string failure;
};

struct TrialResult {
  SensorArray array;
  ProcessorOutcome bartlett;
  ProcessorOutcome graph;
};

/// Array of a trial, from its own substream of the master seed.
SensorArray trial_array(const Scenario& scenario, std::size_t n_sensors, std::size_t trial_index);
/// Noisy measurement of the true source for a trial, from the noise substream.
MeasuredField trial_field(const Scenario& scenario, const ModeSet& modes, const SensorArray& array,
                          std::size_t n_sensors, std::size_t trial_index);

/// One realization: draws geometry and noise, builds both surfaces and
/// scores them. Degenerate cases become recorded failures, not exceptions.
TrialResult run_trial(const Scenario& scenario, std::size_t n_sensors, std::size_t trial_index);

struct SweepResult {
  std::vector<std::size_t> sensor_counts;
  std::vector<double> p_correct_bartlett;
  std::vector<double> p_correct_graph;
  std::vector<std::size_t> failures_bartlett;
  std::vector<std::size_t> failures_graph;
  std::size_t trials_per_point = 0;
  std::uint64_t master_seed = 0;

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

/// trials x |sensor_counts| independent trials; identical for any thread count.
SweepResult probability_sweep(const Scenario& scenario, std::span<const std::size_t> sensor_counts,
                              std::size_t trials, const ParallelOptions& parallel = {});

/// CSV: "n_sensors,p_bartlett,p_graph,trials,failures_bartlett,failures_graph".
void write_sweep_csv(std::ostream& out, const SweepResult& result);
nlohmann::json sweep_json(const SweepResult& result, const Scenario& scenario);

}  // namespace mfp
