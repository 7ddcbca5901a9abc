#include "mfp/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "mfp/error.hpp"
#include "mfp/format.hpp"

namespace mfp {
namespace {

// Substream tags; a trial's geometry and noise never share generator state.
constexpr std::uint64_t kArrayStream = 1;
constexpr std::uint64_t kNoiseStream = 2;

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(Errc::kInvalidArgument, message);
}

bool is_recordable_failure(Errc code) {
  return code == Errc::kDegenerateReplica || code == Errc::kZeroReplica || code == Errc::kEmptySurface ||
         code == Errc::kReconstructionFailure;
}

bool increasing(const std::vector<double>& axis) {
  for (std::size_t i = 0; i < axis.size(); ++i) {
    if (!std::isfinite(axis[i])) return false;
    if (i > 0 && !(axis[i] > axis[i - 1])) return false;
  }
  return !axis.empty();
}

nlohmann::json snr_to_json(double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return "inf";
  return snr_db;
}

}  // namespace

bool CorrectnessWindow::contains(double range_m, double depth_m) const {
  return range_m >= range_min_m && range_m <= range_max_m && depth_m >= depth_min_m && depth_m <= depth_max_m;
}

std::string_view to_string(ArrayRedraw mode) {
  return mode == ArrayRedraw::kPerTrial ? "per_trial" : "fixed";
}

ArrayRedraw parse_array_redraw(std::string_view text) {
  if (text == "per_trial") return ArrayRedraw::kPerTrial;
  if (text == "fixed") return ArrayRedraw::kFixed;
  throw Error(Errc::kInvalidArgument, "redraw must be 'per_trial' or 'fixed', got '" + std::string(text) + "'");
}

void Scenario::validate() const {
  environment.validate();
  const double depth = environment.depth_m;
  const double floor = environment.far_field_floor_m();

  require(std::isfinite(source.depth_m) && source.depth_m > 0.0 && source.depth_m < depth,
          "source depth must lie strictly inside the waveguide");
  require(std::isfinite(source.range_m) && source.range_m > 0.0, "source range must be positive");

  require(increasing(search_ranges_m), "search ranges must be non-empty and strictly increasing");
  require(increasing(search_depths_m), "search depths must be non-empty and strictly increasing");
  require(search_depths_m.front() > 0.0 && search_depths_m.back() < depth,
          "search depths must lie strictly inside (0, D)");
  require(source.range_m >= search_ranges_m.front() && source.range_m <= search_ranges_m.back() &&
              source.depth_m >= search_depths_m.front() && source.depth_m <= search_depths_m.back(),
          "source lies outside the search grid");

  double max_offset = 0.0;
  if (fixed_array) {
    require(fixed_array->size() == n_sensors, "n_sensors must equal the length of the explicit array");
    fixed_array->require_within(depth);
    for (double o : fixed_array->range_offsets_m()) max_offset = std::max(max_offset, o);
  } else {
    require(sensor_grid_count >= 2, "sensor grid needs at least two points");
    require(std::isfinite(sensor_grid_spacing_m) && sensor_grid_spacing_m > 0.0, "sensor grid spacing must be positive");
    require(static_cast<double>(sensor_grid_count) * sensor_grid_spacing_m < depth,
            "sensor grid extends to or below the bottom");
    require(n_sensors >= 2 && n_sensors <= sensor_grid_count,
            "n_sensors must be between 2 and the sensor grid count");
  }
  require(search_ranges_m.front() - max_offset >= floor && source.range_m - max_offset >= floor,
          "search ranges must stay beyond the far-field floor of " + std::to_string(floor) + " m");

  require(!std::isnan(snr_db) && !(std::isinf(snr_db) && snr_db < 0), "snr_db must be a number or +inf");
  require(std::isfinite(epsilon_rel) && epsilon_rel > 0.0, "epsilon_rel must be positive");
  require(window.range_min_m <= window.range_max_m && window.depth_min_m <= window.depth_max_m,
          "correctness window bounds are inverted");
  require(window.contains(source.range_m, source.depth_m), "correctness window must contain the source");
}

nlohmann::json to_json(const Scenario& s) {
  nlohmann::json j;
  j["environment"] = {{"depth_m", s.environment.depth_m},
                      {"sound_speed_mps", s.environment.sound_speed_mps},
                      {"frequency_hz", s.environment.frequency_hz},
                      {"density", s.environment.density}};
  j["source"] = {{"range_m", s.source.range_m}, {"depth_m", s.source.depth_m}};
  j["search"] = {{"ranges_m", s.search_ranges_m}, {"depths_m", s.search_depths_m}};
  nlohmann::json array = {{"n_sensors", s.n_sensors},
                          {"grid_count", s.sensor_grid_count},
                          {"grid_spacing_m", s.sensor_grid_spacing_m},
                          {"redraw", std::string(to_string(s.redraw))}};
  if (s.fixed_array) {
    array["depths_m"] = s.fixed_array->depths_m();
    array["offsets_m"] = s.fixed_array->range_offsets_m();
  }
  j["array"] = std::move(array);
  j["snr_db"] = snr_to_json(s.snr_db);
  j["epsilon_rel"] = s.epsilon_rel;
  j["window"] = {{"range_min_m", s.window.range_min_m},
                 {"range_max_m", s.window.range_max_m},
                 {"depth_min_m", s.window.depth_min_m},
                 {"depth_max_m", s.window.depth_max_m}};
  j["master_seed"] = s.master_seed;
  return j;
}

double noise_variance(const ReplicaVector& clean, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return 0.0;
  const auto n = static_cast<double>(clean.pressures.size());
  return clean.norm * clean.norm / (n * std::pow(10.0, snr_db / 10.0));
}

MeasuredField inject_noise(const ReplicaVector& clean, double snr_db, Rng& rng) {
  if (!(clean.norm > 0.0)) {
    throw Error(Errc::kZeroReplica, "cannot set an SNR relative to a zero field");
  }
  const double variance = noise_variance(clean, snr_db);
  CVector noisy = clean.pressures;
  if (variance > 0.0) {
    std::normal_distribution<double> component(0.0, std::sqrt(variance / 2.0));
    for (Eigen::Index i = 0; i < noisy.size(); ++i) {
      const double re = component(rng);
      const double im = component(rng);
      noisy[i] += std::complex<double>(re, im);
    }
  }
  return MeasuredField::from(std::move(noisy));
}

bool is_correct(double range_m, double depth_m, const CorrectnessWindow& window) {
  return window.contains(range_m, depth_m);
}

bool is_correct(const Estimate& estimate, const CorrectnessWindow& window) {
  return window.contains(estimate.range_m, estimate.depth_m);
}

SensorArray trial_array(const Scenario& scenario, std::size_t n_sensors, std::size_t trial_index) {
  if (scenario.fixed_array) {
    return *scenario.fixed_array;
  }
  const std::uint64_t draw = scenario.redraw == ArrayRedraw::kPerTrial ? trial_index : 0;
  Rng rng = make_substream(scenario.master_seed, {kArrayStream, n_sensors, draw});
  return random_vla(n_sensors, scenario.sensor_grid_count, scenario.sensor_grid_spacing_m, rng);
}

MeasuredField trial_field(const Scenario& scenario, const ModeSet& modes, const SensorArray& array,
                          std::size_t n_sensors, std::size_t trial_index) {
  const ReplicaVector clean = replica_vector(modes, scenario.environment, scenario.source, array);
  Rng rng = make_substream(scenario.master_seed, {kNoiseStream, n_sensors, trial_index});
  return inject_noise(clean, scenario.snr_db, rng);
}

TrialResult run_trial(const Scenario& scenario, std::size_t n_sensors, std::size_t trial_index) {
  TrialResult result;
  const ModeSet modes = solve_modes(scenario.environment);
  result.array = trial_array(scenario, n_sensors, trial_index);

  auto fail_both = [&](const std::string& why) {
    result.bartlett.failed = result.graph.failed = true;
    result.bartlett.failure = result.graph.failure = why;
    return result;
  };

  const ReplicaVector clean = replica_vector(modes, scenario.environment, scenario.source, result.array);
  if (!(clean.norm > 0.0)) {
    return fail_both("true-point replica is zero");
  }
  if (!graph_usable(clean)) {
    return fail_both("true-point replica is degenerate");
  }
  MeasuredField field = trial_field(scenario, modes, result.array, n_sensors, trial_index);
  const ReplicaGrid grid =
      replica_grid(modes, scenario.environment, scenario.search_ranges_m, scenario.search_depths_m, result.array);
  const double epsilon = std::max(scenario.epsilon_rel * field.pressures.squaredNorm(),
                                  std::numeric_limits<double>::min());

  auto score = [&](ProcessorKind kind, ProcessorOutcome& outcome) {
    try {
      const AmbiguitySurface surface = ambiguity_surface(kind, grid, field, epsilon);
      outcome.estimate = locate(surface);
      outcome.correct = is_correct(*outcome.estimate, scenario.window);
    } catch (const Error& e) {
      if (!is_recordable_failure(e.code())) throw;
      outcome.failed = true;
      outcome.failure = e.what();
    }
  };
  score(ProcessorKind::kBartlett, result.bartlett);
  score(ProcessorKind::kGraph, result.graph);
  return result;
}

SweepResult probability_sweep(const Scenario& scenario, std::span<const std::size_t> sensor_counts,
                              std::size_t trials, const ParallelOptions& parallel) {
  if (trials < 1) {
    throw Error(Errc::kInvalidArgument, "trials must be at least 1");
  }
  if (sensor_counts.empty()) {
    throw Error(Errc::kInvalidArgument, "sensor count list is empty");
  }
  for (std::size_t count : sensor_counts) {
    Scenario probe = scenario;
    probe.n_sensors = count;
    probe.validate();
  }

  struct Cell {
    unsigned char bartlett_correct = 0, graph_correct = 0, bartlett_failed = 0, graph_failed = 0;
  };
  const std::size_t total = sensor_counts.size() * trials;
  std::vector<Cell> cells(total);
  parallel_for(total, parallel, [&](std::size_t task) {
    const std::size_t point = task / trials;
    const std::size_t trial = task % trials;
    const TrialResult r = run_trial(scenario, sensor_counts[point], trial);
    cells[task] = Cell{r.bartlett.correct, r.graph.correct, r.bartlett.failed, r.graph.failed};
  });

  SweepResult out;
  out.sensor_counts.assign(sensor_counts.begin(), sensor_counts.end());
  out.trials_per_point = trials;
  out.master_seed = scenario.master_seed;
  for (std::size_t p = 0; p < sensor_counts.size(); ++p) {
    std::size_t bc = 0, gc = 0, bf = 0, gf = 0;
    for (std::size_t t = 0; t < trials; ++t) {
      const Cell& c = cells[p * trials + t];
      bc += c.bartlett_correct;
      gc += c.graph_correct;
      bf += c.bartlett_failed;
      gf += c.graph_failed;
    }
    out.p_correct_bartlett.push_back(static_cast<double>(bc) / static_cast<double>(trials));
    out.p_correct_graph.push_back(static_cast<double>(gc) / static_cast<double>(trials));
    out.failures_bartlett.push_back(bf);
    out.failures_graph.push_back(gf);
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const SweepResult& r) {
  out << "n_sensors,p_bartlett,p_graph,trials,failures_bartlett,failures_graph\n";
  for (std::size_t p = 0; p < r.sensor_counts.size(); ++p) {
    out << r.sensor_counts[p] << ',' << format_double(r.p_correct_bartlett[p]) << ','
        << format_double(r.p_correct_graph[p]) << ',' << r.trials_per_point << ',' << r.failures_bartlett[p] << ','
        << r.failures_graph[p] << '\n';
  }
}

nlohmann::json sweep_json(const SweepResult& r, const Scenario& scenario) {
  nlohmann::json j;
  j["sensor_counts"] = r.sensor_counts;
  j["p_correct_bartlett"] = r.p_correct_bartlett;
  j["p_correct_graph"] = r.p_correct_graph;
  j["failures_bartlett"] = r.failures_bartlett;
  j["failures_graph"] = r.failures_graph;
  j["trials_per_point"] = r.trials_per_point;
  j["master_seed"] = r.master_seed;
  j["scenario"] = to_json(scenario);
  return j;
}

}  // namespace mfp
