#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace floquet_sep::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitContract = 2,
  kExitNumerical = 3,
};

/// Runs one command line (without the program name). Artifacts go to the
/// output directory; `out` gets the human-readable summary, `err` errors.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

/// Worker count: FLOQUET_SEP_THREADS if set to a positive integer, else the
/// hardware concurrency.
int worker_count();

/// Calls fn(i) for i in [0, count) on up to worker_count() threads.
/// The first exception is rethrown after all workers stop.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace floquet_sep::cli
