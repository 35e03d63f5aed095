#include "commands.hpp"

namespace qhosc::cli {

Output dispatch_64(const RunConfig& cfg) { return run_command<long double>(cfg); }

}  // namespace qhosc::cli
