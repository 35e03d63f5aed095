#include "commands.hpp"

namespace qhosc::cli {

Output dispatch_128(const RunConfig& cfg) { return run_command<BinFloat<128>>(cfg); }

}  // namespace qhosc::cli
