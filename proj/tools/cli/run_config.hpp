#pragma once
// Command-line configuration and output model shared by the front end and
// the per-precision command instantiations.

#include "json.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qhosc::cli {

inline constexpr int schema_version = 1;

enum ExitCode { exit_ok = 0, exit_verify_failed = 1, exit_usage = 2, exit_numeric = 3 };

struct RunConfig {
    std::string command;
    std::string q = "0.5";
    /// Instantiated precision (64, 128, 256, 512 or 1024).
    int precision_bits = 256;
    /// Value given on the command line or in QH_PRECISION_BITS.
    int requested_bits = 256;
    std::optional<std::string> tol;
    std::string format;  ///< csv | json
    std::optional<std::string> out;

    // poly
    std::string n = "0";
    std::string x = "0";
    std::string kind = "both";
    bool exact = false;

    // verify, table, measure
    std::string suite;
    std::string what;
    std::string type;
    int n_max = -1;
    int dim = 16;
    std::string bound = "1000";
    int K = 60;
    int M = 120;

    // cs
    std::string z = "1";
    int trunc = 60;
    std::optional<std::string> cs_x;
};

/// Rows plus run metadata; rendered as CSV (header + rows) or one JSON object.
struct Output {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    nlohmann::ordered_json meta = nlohmann::ordered_json::object();
    /// Replaces the row table in JSON output when set (verify reports).
    std::optional<nlohmann::ordered_json> body;
    int exit_code = exit_ok;
};

/// Supported instantiations; requests are rounded up.
std::optional<int> round_precision(int bits);

void render(const RunConfig& cfg, const Output& out, std::ostream& os);

/// Entry point used by main() and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

Output dispatch_64(const RunConfig& cfg);
Output dispatch_128(const RunConfig& cfg);
Output dispatch_256(const RunConfig& cfg);
Output dispatch_512(const RunConfig& cfg);
Output dispatch_1024(const RunConfig& cfg);

/// Thrown for invalid flag values detected after parsing.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A library error tagged with the suite or stage it came from.
struct StageError : std::runtime_error {
    StageError(std::string kind_, std::string stage_, const std::string& message)
        : std::runtime_error(message), kind(std::move(kind_)), stage(std::move(stage_)) {}
    std::string kind;
    std::string stage;
};

}  // namespace qhosc::cli
