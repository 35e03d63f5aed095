#include "run_config.hpp"

#include "qhosc/numeric.hpp"
#include "qhosc/verify.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace qhosc::cli {

using Json = nlohmann::ordered_json;

std::optional<int> round_precision(int bits) {
    for (int b : {64, 128, 256, 512, 1024})
        if (bits >= 1 && bits <= b) return b;
    return std::nullopt;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string r = "\"";
    for (char c : s) {
        if (c == '"') r += '"';
        r += c;
    }
    return r + "\"";
}

// q as a decimal when it terminates ("1/2" -> "0.5"), otherwise as given.
std::string canonical_q(const std::string& q) {
    try {
        return exact_to_decimal(parse_rational(q));
    } catch (const Error&) {
        return q;
    }
}

Json envelope(const RunConfig& cfg) {
    return Json{{"schema_version", schema_version},
                {"command", cfg.command},
                {"q", canonical_q(cfg.q)},
                {"precision_bits", cfg.precision_bits}};
}

void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--q", cfg.q, "deformation parameter in (0,1); decimal or ratio such as 1/2")
        ->capture_default_str();
    sub->add_option("--precision-bits", cfg.requested_bits,
                    "working precision in bits, rounded up to 64/128/256/512/1024")
        ->envname("QH_PRECISION_BITS")
        ->capture_default_str();
    sub->add_option("--tol", cfg.tol, "check tolerance override (verify)");
    sub->add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out, "output path (default: standard output)");
}

Output dispatch(const RunConfig& cfg) {
    switch (cfg.precision_bits) {
        case 64: return dispatch_64(cfg);
        case 128: return dispatch_128(cfg);
        case 256: return dispatch_256(cfg);
        case 512: return dispatch_512(cfg);
        default: return dispatch_1024(cfg);
    }
}

void write_error(const RunConfig& cfg, const std::string& kind, const std::string& stage, const std::string& message,
                 std::ostream& out) {
    Json j = envelope(cfg);
    Json e{{"kind", kind}, {"message", message}};
    if (!stage.empty()) e["stage"] = stage;
    j["error"] = e;
    out << j.dump(2) << "\n";
}

}  // namespace

void render(const RunConfig& cfg, const Output& o, std::ostream& os) {
    if (cfg.format == "csv") {
        for (std::size_t i = 0; i < o.header.size(); ++i) os << (i ? "," : "") << csv_field(o.header[i]);
        os << "\n";
        for (const auto& row : o.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
            os << "\n";
        }
        return;
    }
    Json j = envelope(cfg);
    for (const auto& [k, v] : o.meta.items()) j[k] = v;
    if (o.body) {
        for (const auto& [k, v] : o.body->items()) j[k] = v;
    } else {
        Json rows = Json::array();
        for (const auto& row : o.rows) {
            Json r = Json::object();
            for (std::size_t i = 0; i < row.size(); ++i) {
                // Index columns stay integers; every other number is a decimal string.
                const auto& h = o.header[i];
                if (h == "n" || h == "m" || h == "exponent")
                    r[h] = std::stoi(row[i]);
                else
                    r[h] = row[i];
            }
            rows.push_back(r);
        }
        j["rows"] = rows;
    }
    j["discrepancy_ledger"] = discrepancy_ledger();
    os << j.dump(2) << "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"q-oscillator toolkit: tables, verification suites, measures and coherent states", "qhosc"};
    app.require_subcommand(1);

    auto* poly = app.add_subcommand("poly", "h_n(x) and Psi_n(x) rows");
    add_common(poly, cfg);
    poly->add_option("--n", cfg.n, "degree N or range A:B")->capture_default_str();
    poly->add_option("--x", cfg.x, "comma-separated evaluation points")->capture_default_str();
    poly->add_option("--kind", cfg.kind, "h, psi or both")->check(CLI::IsMember({"h", "psi", "both"}));
    poly->add_flag("--exact", cfg.exact, "evaluate h_n exactly in rational arithmetic");

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    add_common(verify, cfg);
    std::vector<std::string> suites = suite_names();
    suites.push_back("all");
    verify->add_option("--suite", cfg.suite, "suite name or 'all'")->required()->check(CLI::IsMember(suites));
    verify->add_option("--n-max", cfg.n_max, "largest index (suite default when omitted)");
    verify->add_option("--dim", cfg.dim, "truncation dimension (commutators)")->capture_default_str();
    verify->add_option("--bound", cfg.bound, "root search bound (orthonormality)")->capture_default_str();
    verify->add_option("--K", cfg.K, "upward lattice depth")->capture_default_str();
    verify->add_option("--M", cfg.M, "downward lattice depth")->capture_default_str();

    auto* table = app.add_subcommand("table", "tabulate spectrum, bn, rho, moments or weight");
    add_common(table, cfg);
    table->add_option("--what", cfg.what, "spectrum, bn, rho, moments or weight")->required();
    table->add_option("--n-max", cfg.n_max, "largest index (default 10)");
    table->add_option("--K", cfg.K, "upward lattice depth")->capture_default_str();
    table->add_option("--M", cfg.M, "downward lattice depth")->capture_default_str();

    auto* measure = app.add_subcommand("measure", "export a discrete measure");
    add_common(measure, cfg);
    measure->add_option("--type", cfg.type, "y, x, z or extremal")->required();
    measure->add_option("--bound", cfg.bound, "root search bound (extremal)")->capture_default_str();
    measure->add_option("--K", cfg.K, "upward lattice depth")->capture_default_str();
    measure->add_option("--M", cfg.M, "downward lattice depth")->capture_default_str();

    auto* cs = app.add_subcommand("cs", "coherent-state coefficients and diagnostics");
    add_common(cs, cfg);
    cs->add_option("--z", cfg.z, "label re or re,im")->capture_default_str();
    cs->add_option("--trunc", cfg.trunc, "truncation order")->capture_default_str();
    cs->add_option("--x", cfg.cs_x, "also compare <x|z> with its closed form at this x");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }
    for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
    if (cfg.format.empty()) cfg.format = (cfg.command == "verify" || cfg.command == "cs") ? "json" : "csv";

    auto bits = round_precision(cfg.requested_bits);
    if (!bits) {
        err << "error: --precision-bits must be in [1, 1024], got " << cfg.requested_bits << "\n";
        return exit_usage;
    }
    cfg.precision_bits = *bits;

    Output result;
    try {
        result = dispatch(cfg);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const StageError& e) {
        write_error(cfg, e.kind, e.stage, e.what(), out);
        return exit_numeric;
    } catch (const Error& e) {
        write_error(cfg, e.kind(), "", e.what(), out);
        return exit_numeric;
    }

    if (cfg.out) {
        std::ofstream f(*cfg.out, std::ios::binary);
        if (!f) {
            err << "error: cannot open " << *cfg.out << " for writing\n";
            return exit_usage;
        }
        render(cfg, result, f);
    } else {
        render(cfg, result, out);
    }
    return result.exit_code;
}

}  // namespace qhosc::cli
