#include "run_config.hpp"

#include "qhosc/numeric.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::initializer_list<const char*> args) {
    std::vector<const char*> argv{"qhosc"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::ostringstream out, err;
    int code = qhosc::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

qhosc::Real value(const std::string& s) { return qhosc::parse_number<qhosc::Real>(s); }

using Json = nlohmann::ordered_json;

}  // namespace

TEST(Poly, Examples) {
    auto r = run({"poly", "--n", "2", "--q", "1/2", "--x", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto t = csv(r.out);
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t[0], (std::vector<std::string>{"n", "x", "h", "psi"}));
    EXPECT_EQ(value(t[1][2]), 0);

    auto r0 = run({"poly", "--n", "0", "--q", "0.7", "--x", "3.2"});
    EXPECT_EQ(value(csv(r0.out)[1][2]), 1);

    auto r1 = run({"poly", "--n", "1", "--q", "1/2", "--x", "2", "--kind", "psi"});
    auto t1 = csv(r1.out);
    EXPECT_EQ(t1[0], (std::vector<std::string>{"n", "x", "psi"}));
    EXPECT_EQ(value(t1[1][2]), 2);
}

TEST(Poly, RangeAndExact) {
    auto r = run({"poly", "--n", "0:3", "--q", "1/2", "--x", "1,2", "--exact", "--kind", "h"});
    ASSERT_EQ(r.code, 0);
    auto t = csv(r.out);
    ASSERT_EQ(t.size(), 9u);
    EXPECT_EQ(t[7], (std::vector<std::string>{"3", "1", "-6"}));
    EXPECT_EQ(t[8], (std::vector<std::string>{"3", "2", "-6"}));
}

TEST(Table, SpectrumBnMoments) {
    auto s = csv(run({"table", "--what", "spectrum", "--q", "0.5", "--n-max", "2"}).out);
    ASSERT_EQ(s.size(), 4u);
    EXPECT_EQ(value(s[1][1]), 1);
    EXPECT_EQ(value(s[2][1]), 7);
    EXPECT_EQ(value(s[3][1]), 34);

    auto b = csv(run({"table", "--what", "bn", "--q", "0.5", "--n-max", "1"}).out);
    EXPECT_EQ(value(b[1][1]), 1);
    EXPECT_EQ(value(b[2][1]), qhosc::sqrt_value(qhosc::Real(6)));

    auto m = csv(run({"table", "--what", "moments", "--q", "0.5", "--n-max", "2"}).out);
    EXPECT_EQ(m[0], (std::vector<std::string>{"n", "value", "lattice_value", "rel_deviation"}));
    EXPECT_EQ(value(m[3][1]), 6);
    EXPECT_LT(value(m[3][3]), value("1e-8"));
}

TEST(Verify, ExitCodes) {
    EXPECT_EQ(run({"verify", "--suite", "commutators", "--q", "0.5", "--dim", "16"}).code, 0);
    EXPECT_EQ(run({"verify", "--suite", "moments", "--q", "0.5", "--n-max", "8"}).code, 0);
    EXPECT_EQ(run({"verify", "--suite", "qdiff", "--q", "1/2"}).code, 0);
    EXPECT_EQ(run({"verify", "--suite", "moments", "--n-max", "2", "--tol", "1e-300"}).code, 1);
}

TEST(Verify, JsonReport) {
    auto r = run({"verify", "--suite", "qdiff", "--q", "1/2", "--n-max", "1"});
    auto j = Json::parse(r.out);
    EXPECT_EQ(j["schema_version"], 1);
    EXPECT_EQ(j["command"], "verify");
    EXPECT_EQ(j["q"], "0.5");
    EXPECT_EQ(j["precision_bits"], 256);
    EXPECT_TRUE(j["pass"].get<bool>());
    const auto& checks = j["reports"][0]["checks"];
    ASSERT_EQ(checks.size(), 2u);
    EXPECT_EQ(checks[1]["detail"], "(0.5)i + (1)i x^2 + (0.5) x^3");
    EXPECT_TRUE(j["discrepancy_ledger"].is_array());
    auto keys = std::vector<std::string>{};
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    EXPECT_EQ(keys.front(), "schema_version");
    EXPECT_EQ(keys.back(), "discrepancy_ledger");
}

TEST(Json, NumbersAreStringsAndRoundTrip) {
    auto r = run({"table", "--what", "rho", "--q", "0.3", "--n-max", "4", "--format", "json"});
    ASSERT_EQ(r.code, 0);
    auto j = Json::parse(r.out);
    ASSERT_EQ(j["rows"].size(), 5u);
    for (const auto& row : j["rows"]) {
        EXPECT_TRUE(row["n"].is_number_integer());
        ASSERT_TRUE(row["value"].is_string());
        auto v = value(row["value"].get<std::string>());
        EXPECT_EQ(qhosc::to_decimal(v), row["value"].get<std::string>());
    }
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(run({"poly", "--q", "1.5"}).code, 2);
    EXPECT_EQ(run({"poly", "--bogus"}).code, 2);
    EXPECT_EQ(run({"table", "--what", "nope"}).code, 2);
    EXPECT_EQ(run({"table", "--what", "bn", "--precision-bits", "5000"}).code, 2);
    EXPECT_EQ(run({"verify", "--suite", "nope"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, NumericErrorIsJson) {
    auto r = run({"table", "--what", "rho", "--n-max", "300", "--precision-bits", "64"});
    EXPECT_EQ(r.code, 3);
    auto j = Json::parse(r.out);
    EXPECT_EQ(j["error"]["kind"], "OverflowError");
    EXPECT_EQ(j["precision_bits"], 64);
}

TEST(Cli, PrecisionRounding) {
    auto j = Json::parse(run({"table", "--what", "bn", "--precision-bits", "100", "--format", "json"}).out);
    EXPECT_EQ(j["precision_bits"], 128);
    setenv("QH_PRECISION_BITS", "300", 1);
    auto e = Json::parse(run({"table", "--what", "bn", "--format", "json"}).out);
    unsetenv("QH_PRECISION_BITS");
    EXPECT_EQ(e["precision_bits"], 512);
    EXPECT_EQ(qhosc::cli::round_precision(0), std::nullopt);
    EXPECT_EQ(qhosc::cli::round_precision(64), 64);
    EXPECT_EQ(qhosc::cli::round_precision(1024), 1024);
}

TEST(Cli, Deterministic) {
    auto a = run({"cs", "--q", "0.3", "--z", "0.4,0.2", "--trunc", "12", "--x", "0.5"});
    auto b = run({"cs", "--q", "0.3", "--z", "0.4,0.2", "--trunc", "12", "--x", "0.5"});
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, OutFile) {
    std::string path = std::string(QHOSC_TEST_TMPDIR) + "/spectrum.csv";
    auto r = run({"table", "--what", "spectrum", "--n-max", "3", "--out", path.c_str()});
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    EXPECT_EQ(ss.str(), run({"table", "--what", "spectrum", "--n-max", "3"}).out);
}

TEST(Measure, ExtremalAndLattice) {
    auto r = run({"measure", "--type", "extremal", "--q", "0.5", "--bound", "100"});
    ASSERT_EQ(r.code, 0);
    auto t = csv(r.out);
    EXPECT_EQ(t[0], (std::vector<std::string>{"x", "loading", "christoffel", "error_estimate"}));
    EXPECT_EQ(t.size(), 9u);
    auto y = Json::parse(run({"measure", "--type", "y", "--format", "json"}).out);
    EXPECT_TRUE(y["all_positive"].get<bool>());
    EXPECT_TRUE(y["rows"][0]["exponent"].is_number_integer());
}
