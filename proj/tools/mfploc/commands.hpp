#pragma once

#include <iosfwd>

#include "mfp/error.hpp"
#include "mfploc/config.hpp"

namespace mfploc {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitNoModes = 2,
  kExitDegenerate = 3,
  kExitIo = 4,
};

/// Maps a library error to the process exit code.
int exit_code_for(const mfp::Error& error);

// Each command validates its configuration before computing. Errors are
// reported on `err` and turned into an exit code; nothing throws out.
int cmd_modes(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_surface(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_replicas(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Full command line: `mfploc <modes|surface|sweep|replicas> --config <path> [flags]`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mfploc
