#include "commands.hpp"

namespace qhosc::cli {

Output dispatch_256(const RunConfig& cfg) { return run_command<BinFloat<256>>(cfg); }

}  // namespace qhosc::cli
