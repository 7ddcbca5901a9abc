#include "mfploc/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <string_view>

#include "mfp/error.hpp"

namespace mfploc {
namespace {

using nlohmann::json;
using mfp::Errc;
using mfp::Error;

[[noreturn]] void fail(const std::string& message) { throw Error(Errc::kInvalidArgument, message); }

const json& require_object(const json& node, const std::string& where) {
  if (!node.is_object()) fail(where + " must be an object");
  return node;
}

void only_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) fail("unknown key '" + where + key + "'");
  }
}

double number(const json& obj, const char* key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + key + " must be a number");
  return v.get<double>();
}

std::uint64_t unsigned_int(const json& obj, const char* key, const std::string& where, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned()) fail(where + key + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

std::string text(const json& obj, const char* key, const std::string& where, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(where + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> number_list(const json& v, const std::string& what) {
  if (!v.is_array()) fail(what + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) fail(what + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::size_t> count_list(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) fail(what + " must be a non-empty array of integers");
  std::vector<std::size_t> out;
  for (const auto& e : v) {
    if (!e.is_number_unsigned()) fail(what + " must be a non-empty array of integers");
    out.push_back(e.get<std::size_t>());
  }
  return out;
}

double parse_snr(const json& v) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && v.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
  fail("snr_db must be a number or the string \"inf\"");
}

}  // namespace

std::vector<mfp::ProcessorKind> parse_processor_selection(const std::string& value) {
  if (value == "both") return {mfp::ProcessorKind::kBartlett, mfp::ProcessorKind::kGraph};
  if (value == "bartlett" || value == "graph") return {mfp::parse_processor_kind(value)};
  fail("processor must be bartlett, graph or both (got '" + value + "')");
}

RunConfig parse_config(const json& doc) {
  require_object(doc, "config");
  only_keys(doc, {"environment", "source", "search", "array", "window", "snr_db", "epsilon_rel", "master_seed",
                  "threads", "surface", "sweep", "replicas"},
            "");
  RunConfig cfg;
  mfp::Scenario& s = cfg.scenario;

  if (doc.contains("environment")) {
    const json& e = require_object(doc.at("environment"), "environment");
    only_keys(e, {"depth_m", "sound_speed_mps", "frequency_hz", "density"}, "environment.");
    s.environment.depth_m = number(e, "depth_m", "environment.", s.environment.depth_m);
    s.environment.sound_speed_mps = number(e, "sound_speed_mps", "environment.", s.environment.sound_speed_mps);
    s.environment.frequency_hz = number(e, "frequency_hz", "environment.", s.environment.frequency_hz);
    s.environment.density = number(e, "density", "environment.", s.environment.density);
  }

  if (doc.contains("source")) {
    const json& src = require_object(doc.at("source"), "source");
    only_keys(src, {"range_m", "depth_m"}, "source.");
    s.source.range_m = number(src, "range_m", "source.", s.source.range_m);
    s.source.depth_m = number(src, "depth_m", "source.", s.source.depth_m);
  }

  {
    const json empty = json::object();
    const json& sr = doc.contains("search") ? require_object(doc.at("search"), "search") : empty;
    only_keys(sr, {"range_min_m", "range_max_m", "n_ranges", "n_depths", "ranges_m", "depths_m"}, "search.");
    if (sr.contains("ranges_m")) {
      if (sr.contains("range_min_m") || sr.contains("range_max_m") || sr.contains("n_ranges")) {
        fail("search.ranges_m cannot be combined with range_min_m/range_max_m/n_ranges");
      }
      s.search_ranges_m = number_list(sr.at("ranges_m"), "search.ranges_m");
    } else {
      const std::uint64_t n = unsigned_int(sr, "n_ranges", "search.", 101);
      if (n == 0) fail("search.n_ranges must be positive");
      s.search_ranges_m = mfp::linspace(number(sr, "range_min_m", "search.", 4000.0),
                                        number(sr, "range_max_m", "search.", 6000.0), n);
    }
    if (sr.contains("depths_m")) {
      if (sr.contains("n_depths")) fail("search.depths_m cannot be combined with n_depths");
      s.search_depths_m = number_list(sr.at("depths_m"), "search.depths_m");
    } else {
      const std::uint64_t n = unsigned_int(sr, "n_depths", "search.", 49);
      if (n == 0) fail("search.n_depths must be positive");
      s.search_depths_m = mfp::inset_depths(s.environment.depth_m, n);
    }
  }

  if (doc.contains("array")) {
    const json& a = require_object(doc.at("array"), "array");
    only_keys(a, {"n_sensors", "grid_count", "grid_spacing_m", "redraw", "depths_m", "offsets_m"}, "array.");
    s.sensor_grid_count = unsigned_int(a, "grid_count", "array.", s.sensor_grid_count);
    s.sensor_grid_spacing_m = number(a, "grid_spacing_m", "array.", s.sensor_grid_spacing_m);
    s.redraw = mfp::parse_array_redraw(text(a, "redraw", "array.", "per_trial"));
    if (a.contains("depths_m")) {
      std::optional<std::vector<double>> offsets;
      if (a.contains("offsets_m")) offsets = number_list(a.at("offsets_m"), "array.offsets_m");
      s.fixed_array = mfp::fixed_vla(number_list(a.at("depths_m"), "array.depths_m"), std::move(offsets));
      s.n_sensors = unsigned_int(a, "n_sensors", "array.", s.fixed_array->size());
    } else {
      if (a.contains("offsets_m")) fail("array.offsets_m requires array.depths_m");
      s.n_sensors = unsigned_int(a, "n_sensors", "array.", s.n_sensors);
    }
  }

  if (doc.contains("window")) {
    const json& w = require_object(doc.at("window"), "window");
    only_keys(w, {"range_min_m", "range_max_m", "depth_min_m", "depth_max_m"}, "window.");
    s.window.range_min_m = number(w, "range_min_m", "window.", s.window.range_min_m);
    s.window.range_max_m = number(w, "range_max_m", "window.", s.window.range_max_m);
    s.window.depth_min_m = number(w, "depth_min_m", "window.", s.window.depth_min_m);
    s.window.depth_max_m = number(w, "depth_max_m", "window.", s.window.depth_max_m);
  }

  if (doc.contains("snr_db")) s.snr_db = parse_snr(doc.at("snr_db"));
  s.epsilon_rel = number(doc, "epsilon_rel", "", s.epsilon_rel);
  s.master_seed = unsigned_int(doc, "master_seed", "", s.master_seed);
  cfg.threads = static_cast<unsigned>(unsigned_int(doc, "threads", "", cfg.threads));

  if (doc.contains("surface")) {
    const json& sf = require_object(doc.at("surface"), "surface");
    only_keys(sf, {"processor", "trial_index"}, "surface.");
    cfg.processors = parse_processor_selection(text(sf, "processor", "surface.", "graph"));
    cfg.surface_trial_index = unsigned_int(sf, "trial_index", "surface.", 0);
  }

  if (doc.contains("sweep")) {
    const json& sw = require_object(doc.at("sweep"), "sweep");
    only_keys(sw, {"sensor_counts", "trials"}, "sweep.");
    if (sw.contains("sensor_counts")) cfg.sweep_sensor_counts = count_list(sw.at("sensor_counts"), "sweep.sensor_counts");
    cfg.sweep_trials = unsigned_int(sw, "trials", "sweep.", cfg.sweep_trials);
  }

  if (doc.contains("replicas")) {
    const json& r = require_object(doc.at("replicas"), "replicas");
    only_keys(r, {"file"}, "replicas.");
    cfg.replicas_file = text(r, "file", "replicas.", cfg.replicas_file);
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    fail("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

void apply_overrides(RunConfig& config, const Overrides& o) {
  if (o.seed) config.scenario.master_seed = *o.seed;
  if (o.out_dir) {
    config.out_dir = *o.out_dir;
    config.out_dir_given = true;
  }
  if (o.processor) config.processors = parse_processor_selection(*o.processor);
  if (o.trials) config.sweep_trials = *o.trials;
  if (o.sensors) {
    if (o.sensors->empty()) fail("--sensors list is empty");
    config.sweep_sensor_counts = *o.sensors;
  }
  if (o.threads) config.threads = *o.threads;
}

}  // namespace mfploc
