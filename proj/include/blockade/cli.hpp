#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blockade::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntimeError = 1,    // I/O failure or an unexpected internal error
  kConfigError = 2,     // bad flags, unknown keys, malformed config or sweep ranges
  kParameterError = 3,  // a module rejected a physical parameter
  kCapHit = 4,          // output written, but some trials hit the step cap
};

inline constexpr int kSchemaVersion = 1;
// Output files named by --output are placed in this directory instead of the
// directory given on the command line, when set.
inline constexpr const char* kOutputDirEnv = "BLOCKADE_OUTPUT_DIR";
inline constexpr std::size_t kDefaultMaxGridPoints = 10000;

// Runs one command line (without the program name). Results go to `out`
// unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blockade::cli
