#include "commands.hpp"

namespace qhosc::cli {

Output dispatch_512(const RunConfig& cfg) { return run_command<BinFloat<512>>(cfg); }

}  // namespace qhosc::cli
