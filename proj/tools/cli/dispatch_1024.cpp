#include "commands.hpp"

namespace qhosc::cli {

Output dispatch_1024(const RunConfig& cfg) { return run_command<BinFloat<1024>>(cfg); }

}  // namespace qhosc::cli
