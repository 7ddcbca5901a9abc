#include "mfploc/commands.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "mfp/error.hpp"
#include "mfp/format.hpp"
#include "mfp/replica_io.hpp"

namespace mfploc {
namespace {

using nlohmann::json;

// Environment first so that a below-cutoff frequency reports exit 2 even when
// the far-field floor would also reject the search grid.
mfp::ModeSet validated_modes(const RunConfig& config) {
  config.scenario.environment.validate();
  mfp::ModeSet modes = mfp::solve_modes(config.scenario.environment);
  config.scenario.validate();
  return modes;
}

std::filesystem::path prepare_out_dir(const RunConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec || !std::filesystem::is_directory(config.out_dir)) {
    throw mfp::Error(mfp::Errc::kIo, "cannot create output directory '" + config.out_dir.string() + "'");
  }
  return config.out_dir;
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw mfp::Error(mfp::Errc::kIo, "cannot open '" + path.string() + "' for writing");
  }
  body(file);
  file.close();
  if (!file) {
    throw mfp::Error(mfp::Errc::kIo, "failed writing '" + path.string() + "'");
  }
}

json estimate_json(const mfp::Estimate& e, const mfp::CorrectnessWindow& window) {
  return {{"range_m", e.range_m},
          {"depth_m", e.depth_m},
          {"peak_db", e.peak_db},
          {"range_index", e.range_index},
          {"depth_index", e.depth_index},
          {"in_window", mfp::is_correct(e, window)}};
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const mfp::Error& e) {
    err << "mfploc: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "mfploc: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace

int exit_code_for(const mfp::Error& error) {
  switch (error.code()) {
    case mfp::Errc::kNoPropagatingModes:
      return kExitNoModes;
    case mfp::Errc::kZeroReplica:
    case mfp::Errc::kDegenerateReplica:
    case mfp::Errc::kReconstructionFailure:
    case mfp::Errc::kEmptySurface:
      return kExitDegenerate;
    case mfp::Errc::kIo:
      return kExitIo;
    default:
      return kExitConfig;
  }
}

int cmd_modes(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    config.scenario.environment.validate();
    const mfp::ModeSet modes = mfp::solve_modes(config.scenario.environment);
    std::ostringstream table;
    table << "m,gamma_rad_per_m,kr_rad_per_m\n";
    for (std::size_t m = 0; m < modes.mode_count(); ++m) {
      table << (m + 1) << ',' << mfp::format_double(modes.vertical_wavenumbers[m]) << ','
            << mfp::format_double(modes.horizontal_wavenumbers[m]) << '\n';
    }
    out << table.str();
    if (config.out_dir_given) {
      const auto dir = prepare_out_dir(config);
      write_file(dir / "modes.csv", [&](std::ostream& f) { f << table.str(); });
    }
    return kExitOk;
  });
}

int cmd_surface(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const mfp::ModeSet modes = validated_modes(config);
    const mfp::Scenario& s = config.scenario;
    const std::size_t n = s.n_sensors;
    const std::size_t trial = config.surface_trial_index;
    const mfp::ParallelOptions parallel{config.threads};

    const mfp::SensorArray array = mfp::trial_array(s, n, trial);
    const mfp::ReplicaVector clean = mfp::replica_vector(modes, s.environment, s.source, array);
    const mfp::MeasuredField field = mfp::trial_field(s, modes, array, n, trial);
    const mfp::ReplicaGrid grid =
        mfp::replica_grid(modes, s.environment, s.search_ranges_m, s.search_depths_m, array, parallel);
    const double epsilon = std::max(s.epsilon_rel * field.pressures.squaredNorm(), std::numeric_limits<double>::min());

    const auto dir = prepare_out_dir(config);
    json summary;
    summary["scenario"] = mfp::to_json(s);
    summary["trial_index"] = trial;
    summary["array"] = {{"depths_m", array.depths_m()}, {"offsets_m", array.range_offsets_m()}};
    summary["epsilon"] = epsilon;
    for (mfp::ProcessorKind kind : config.processors) {
      if (kind == mfp::ProcessorKind::kGraph) {
        // Fails loudly rather than reporting a surface whose true cell is unusable.
        (void)mfp::adjacency(clean);
      }
      const mfp::AmbiguitySurface surface = mfp::ambiguity_surface(kind, grid, field, epsilon, parallel);
      const mfp::Estimate estimate = mfp::locate(surface);
      const std::string name = "surface_" + std::string(mfp::to_string(kind)) + ".csv";
      write_file(dir / name, [&](std::ostream& f) { mfp::write_surface_csv(f, surface); });
      json entry = estimate_json(estimate, s.window);
      entry["csv"] = name;
      entry["flagged_cells"] = surface.flagged_count();
      summary["results"][std::string(mfp::to_string(kind))] = entry;
      out << mfp::to_string(kind) << ": peak at range " << mfp::format_double(estimate.range_m) << " m, depth "
          << mfp::format_double(estimate.depth_m) << " m ("
          << (mfp::is_correct(estimate, s.window) ? "inside" : "outside") << " window)\n";
    }
    write_file(dir / "surface_summary.json", [&](std::ostream& f) { f << summary.dump(2) << '\n'; });
    return kExitOk;
  });
}

int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    validated_modes(config);
    const mfp::SweepResult result = mfp::probability_sweep(config.scenario, config.sweep_sensor_counts,
                                                           config.sweep_trials, mfp::ParallelOptions{config.threads});
    const auto dir = prepare_out_dir(config);
    write_file(dir / "sweep.csv", [&](std::ostream& f) { mfp::write_sweep_csv(f, result); });
    write_file(dir / "sweep.json",
               [&](std::ostream& f) { f << mfp::sweep_json(result, config.scenario).dump(2) << '\n'; });
    mfp::write_sweep_csv(out, result);
    return kExitOk;
  });
}

int cmd_replicas(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const mfp::ModeSet modes = validated_modes(config);
    const mfp::Scenario& s = config.scenario;
    const mfp::SensorArray array = mfp::trial_array(s, s.n_sensors, config.surface_trial_index);
    const mfp::ReplicaGrid grid = mfp::replica_grid(modes, s.environment, s.search_ranges_m, s.search_depths_m,
                                                    array, mfp::ParallelOptions{config.threads});
    const auto dir = prepare_out_dir(config);
    const auto path = dir / config.replicas_file;
    mfp::export_replicas(path, grid);
    out << "wrote " << grid.cell_count() << " replicas to " << path.string() << '\n';
    return kExitOk;
  });
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matched-field source localization: Bartlett and graph processors"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides overrides;
  std::vector<std::size_t> sensors;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Scenario configuration (JSON)")->required();
    sub->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { overrides.seed = v; },
                                            "Override master_seed");
    sub->add_option_function<std::string>("--out", [&](const std::string& v) { overrides.out_dir = v; },
                                          "Output directory");
    sub->add_option_function<unsigned>("--threads", [&](const unsigned& v) { overrides.threads = v; },
                                       "Worker threads (0 = all cores)");
  };

  CLI::App* modes = app.add_subcommand("modes", "Print the propagating mode table");
  CLI::App* surface = app.add_subcommand("surface", "Compute ambiguity surfaces for one realization");
  CLI::App* sweep = app.add_subcommand("sweep", "Probability of correct localization versus sensor count");
  CLI::App* replicas = app.add_subcommand("replicas", "Export the replica grid");
  for (CLI::App* sub : {modes, surface, sweep, replicas}) add_common(sub);

  surface->add_option_function<std::string>("--processor", [&](const std::string& v) { overrides.processor = v; },
                                            "bartlett, graph or both")
      ->check(CLI::IsMember({"bartlett", "graph", "both"}));
  sweep->add_option_function<std::size_t>("--trials", [&](const std::size_t& v) { overrides.trials = v; },
                                          "Trials per sensor count");
  sweep->add_option("--sensors", sensors, "Comma-separated sensor counts")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "mfploc: " << e.what() << '\n';
    return kExitConfig;
  }
  if (!sensors.empty()) overrides.sensors = sensors;

  RunConfig config;
  const int load_status = guarded(err, [&] {
    config = load_config(config_path);
    apply_overrides(config, overrides);
    return kExitOk;
  });
  if (load_status != kExitOk) return load_status;

  if (modes->parsed()) return cmd_modes(config, out, err);
  if (surface->parsed()) return cmd_surface(config, out, err);
  if (sweep->parsed()) return cmd_sweep(config, out, err);
  return cmd_replicas(config, out, err);
}

}  // namespace mfploc
