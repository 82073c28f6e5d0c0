// wigcov: command-line front end. Exit codes: 0 ok, 1 flagged discrepancies, 2 bad config or
// usage, 3 other errors.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "wigcov/config.hpp"
#include "wigcov/runner.hpp"

using namespace wigcov;

namespace {

struct Common {
    std::string config;
    std::string out;
    std::string csv;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
}

void add_common(CLI::App* sub, Common& c, bool needs_config) {
    auto* opt = sub->add_option("--config", c.config, "experiment config (JSON)");
    if (needs_config) opt->required();
    sub->add_option("--out", c.out, "write the JSON report here (default: stdout)");
    sub->add_option("--csv", c.csv, "write the CSV table here");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&c](const std::uint64_t& s) { c.seed = s, c.seed_set = true; }, "override the config seed");
}

int emit(const ExperimentConfig& cfg, const RunResult& r, const Common& c) {
    const std::string out = !c.out.empty() ? c.out : cfg.out_json;
    const std::string csv = !c.csv.empty() ? c.csv : cfg.out_csv;
    if (out.empty()) {
        std::cout << r.report.dump(2) << '\n';
    } else {
        write_text(out, r.report.dump(2) + "\n");
        std::cout << cfg.task << ": " << r.report["records"].size() << " records, " << r.flagged << " flagged -> " << out << '\n';
    }
    if (!csv.empty()) write_text(csv, r.csv);
    return r.exit_code();
}

int run_task(const std::string& task, const Common& c, const std::string& dump_path) {
    json doc = load_json(c.config);
    if (!doc.is_object()) throw ConfigError("", "expected an object");
    doc["task"] = task;
    if (c.seed_set) doc["seed"] = c.seed;
    const ExperimentConfig cfg = parse_config(doc);
    std::ostringstream dump;
    bool header = false;
    auto on_partitions = [&](const std::string& label, const std::string& table) {
        std::istringstream lines(table);
        std::string line;
        bool first = true;
        while (std::getline(lines, line)) {
            if (first) {
                first = false;
                if (!header) dump << "pair," << line << '\n';
                header = true;
                continue;
            }
            dump << '"' << label << "\"," << line << '\n';
        }
    };
    RunResult r = dump_path.empty() ? run(cfg) : run(cfg, on_partitions);
    if (!dump_path.empty()) write_text(dump_path, dump.str());
    return emit(cfg, r, c);
}

int run_pairings(const Common& c, int m, int n) {
    json doc = c.config.empty() ? json::object() : load_json(c.config);
    if (!doc.is_object()) throw ConfigError("", "expected an object");
    doc["task"] = "pairings";
    if (m > 0) doc["m"] = m;
    if (n > 0) doc["n"] = n;
    const ExperimentConfig cfg = parse_config(doc);
    return emit(cfg, run(cfg), c);
}

int run_report(const std::string& in, const std::string& csv) {
    const json rep = load_json(in);
    if (!rep.contains("schema_version") || !rep.contains("config") || !rep.contains("records"))
        throw ConfigError("", "not a wigcov report");
    if (rep["schema_version"].get<int>() != kSchemaVersion) throw ConfigError("/schema_version", "unsupported schema version");
    const std::string hash = config_hash(rep["config"]);
    const bool hash_ok = rep.value("config_hash", "") == hash;
    std::cout << "task " << rep.value("task", "") << ", config " << hash << (hash_ok ? "" : " (MISMATCH with stored hash)") << '\n';
    std::ostringstream table;
    table << "p,q,N,theory,mc,mc_se,oracle,flagged\n";
    int flagged = 0;
    for (const auto& r : rep["records"]) {
        if (r.value("kind", "") != "covariance") continue;
        auto val = [&](const char* key, const char* sub) -> std::string {
            if (!r.contains(key) || r[key].is_null()) return "";
            const cplx z = from_json_cplx(r[key][sub]);
            std::ostringstream os;
            os << std::setprecision(10) << z.real();
            if (z.imag() != 0.0) os << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
            return os.str();
        };
        bool any = false;
        for (const auto& [k, v] : r["flags"].items()) any = any || v.get<bool>();
        flagged += any;
        table << '"' << r["p"].get<std::string>() << "\",\"" << r["q"].get<std::string>() << "\"," << r["N"].get<int>() << ','
              << val("theory", "total") << ',' << val("mc", "value") << ','
              << (r.contains("mc") ? std::to_string(r["mc"]["std_error"].get<double>()) : "") << ',' << val("oracle", "value")
              << ',' << (any ? 1 : 0) << '\n';
    }
    std::cout << table.str();
    if (!csv.empty()) write_text(csv, table.str());
    std::cout << flagged << " flagged\n";
    return hash_ok && flagged == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Covariance of traces of Wigner/deterministic matrix polynomials: theory, Monte Carlo, exact oracle"};
    app.require_subcommand(1);

    Common pc;
    int m = 0, n = 0;
    auto* pairings = app.add_subcommand("pairings", "list non-crossing annular pairings of an (m, n) annulus");
    add_common(pairings, pc, false);
    pairings->add_option("--m", m, "points on the outer circle");
    pairings->add_option("--n", n, "points on the inner circle");

    Common tc, mc, oc, cc;
    auto* theory = app.add_subcommand("theory", "limit covariance phi2 with its four terms");
    add_common(theory, tc, true);
    auto* mcs = app.add_subcommand("mc", "Monte Carlo covariance estimates");
    add_common(mcs, mc, true);
    std::string dump_path;
    auto* oracle = app.add_subcommand("oracle", "exact finite-N covariance by partition sums");
    add_common(oracle, oc, true);
    oracle->add_option("--dump-partitions", dump_path, "per-partition diagnostics CSV");
    auto* compare = app.add_subcommand("compare", "theory vs Monte Carlo (and oracle when within caps)");
    add_common(compare, cc, true);

    std::string report_in, report_csv;
    auto* report = app.add_subcommand("report", "summarize a stored report and check its config hash");
    report->add_option("--in", report_in, "report JSON")->required();
    report->add_option("--csv", report_csv, "write the summary table here");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*pairings) return run_pairings(pc, m, n);
        if (*theory) return run_task("theory", tc, "");
        if (*mcs) return run_task("mc", mc, "");
        if (*oracle) return run_task("oracle", oc, dump_path);
        if (*compare) return run_task("compare", cc, "");
        if (*report) return run_report(report_in, report_csv);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
