#pragma once

// Experiment configs: strict JSON parsing with JSON-pointer errors, resolution of ensembles,
// deterministic families and monomials, and a stable config hash.

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "covariance.hpp"
#include "ensembles.hpp"
#include "error.hpp"
#include "families.hpp"
#include "graph.hpp"
#include "monte_carlo.hpp"
#include "nc_annulus.hpp"
#include "numeric.hpp"
#include "words.hpp"

namespace wigcov {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

inline const std::set<std::string>& known_tasks() {
    static const std::set<std::string> tasks{"pairings", "theory", "mc", "oracle", "compare"};
    return tasks;
}

struct Caps {
    int pairing = kDefaultPairingCap;
    int partition = kDefaultPartitionCap;
    int moment = kDefaultMomentCap;
};

struct ExperimentConfig {
    std::string task;
    std::map<int, Ensemble> ensembles;
    json family; // array of letter specs; letter a_k is entry k
    std::vector<std::string> monomial_text;
    std::vector<Monomial> monomials;
    std::vector<std::pair<int, int>> pairs;
    std::vector<int> dims;
    int replicates = 1000;
    std::uint64_t seed = 1;
    Caps caps;
    double slack_c = 8.0;
    int m = 0, n = 0; // pairings task
    std::string out_json, out_csv;
    json resolved; // full config with defaults filled in
};

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Hash of the canonical dump: object keys are sorted, so key order in the file is irrelevant.
inline std::string config_hash(const json& resolved) {
    std::ostringstream os;
    os << "fnv1a64:" << std::hex;
    os.width(16);
    os.fill('0');
    os << fnv1a(resolved.dump());
    return os.str();
}

namespace detail {

inline std::string escape_pointer(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out += c;
    }
    return out;
}

inline std::string child(const std::string& ptr, const std::string& key) { return ptr + "/" + escape_pointer(key); }
inline std::string child(const std::string& ptr, std::size_t i) { return ptr + "/" + std::to_string(i); }

inline void check_object(const json& j, const std::string& ptr, const std::set<std::string>& allowed,
                         const std::set<std::string>& required = {}) {
    if (!j.is_object()) throw ConfigError(ptr, "expected an object");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError(child(ptr, k), "unknown key");
    for (const auto& k : required)
        if (!j.contains(k)) throw ConfigError(child(ptr, k), "missing required field");
}

inline double get_number(const json& j, const std::string& ptr) {
    if (!j.is_number()) throw ConfigError(ptr, "expected a number");
    return j.get<double>();
}

inline int get_int(const json& j, const std::string& ptr) {
    if (!j.is_number_integer()) throw ConfigError(ptr, "expected an integer");
    return j.get<int>();
}

inline std::string get_string(const json& j, const std::string& ptr) {
    if (!j.is_string()) throw ConfigError(ptr, "expected a string");
    return j.get<std::string>();
}

/// A complex number is a number or a [re, im] pair.
inline cplx get_complex(const json& j, const std::string& ptr) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError(ptr, "expected a number or a [re, im] pair");
}

inline std::vector<cplx> get_complex_list(const json& j, const std::string& ptr) {
    if (!j.is_array() || j.empty()) throw ConfigError(ptr, "expected a non-empty array");
    std::vector<cplx> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_complex(j[i], child(ptr, i)));
    return out;
}

inline std::string kind_of(const json& j, const std::string& ptr) {
    if (!j.is_object()) throw ConfigError(ptr, "expected an object");
    if (!j.contains("kind")) throw ConfigError(child(ptr, "kind"), "missing required field");
    return get_string(j["kind"], child(ptr, "kind"));
}

template <typename F>
auto rethrow_at(const std::string& ptr, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(ptr, e.what());
    }
}

inline EntryLaw parse_law(const json& j, const std::string& ptr) {
    const std::string kind = kind_of(j, ptr);
    if (kind == "gaussian_complex" || kind == "gaussian_real" || kind == "rademacher_real" || kind == "rademacher_complex") {
        check_object(j, ptr, {"kind"});
        if (kind == "gaussian_complex") return laws::gaussian_complex();
        if (kind == "gaussian_real") return laws::gaussian_real();
        if (kind == "rademacher_real") return laws::rademacher_real();
        return laws::rademacher_complex();
    }
    if (kind == "two_point_mix") {
        check_object(j, ptr, {"kind", "theta", "kurtosis"}, {"theta", "kurtosis"});
        const double t = get_number(j["theta"], child(ptr, "theta")), k = get_number(j["kurtosis"], child(ptr, "kurtosis"));
        return rethrow_at(ptr, [&] { return laws::two_point_mix(t, k); });
    }
    if (kind == "solve") {
        check_object(j, ptr, {"kind", "theta", "k4"}, {"theta", "k4"});
        const double t = get_number(j["theta"], child(ptr, "theta")), k = get_number(j["k4"], child(ptr, "k4"));
        return rethrow_at(ptr, [&] { return solve_law(t, k); });
    }
    if (kind == "custom_discrete") {
        check_object(j, ptr, {"kind", "support", "weights"}, {"support", "weights"});
        const auto support = get_complex_list(j["support"], child(ptr, "support"));
        std::vector<double> weights;
        const auto& w = j["weights"];
        if (!w.is_array()) throw ConfigError(child(ptr, "weights"), "expected an array");
        for (std::size_t i = 0; i < w.size(); ++i) weights.push_back(get_number(w[i], child(child(ptr, "weights"), i)));
        return rethrow_at(ptr, [&] { return laws::custom_discrete(support, weights); });
    }
    throw ConfigError(child(ptr, "kind"), "unknown entry law '" + kind + "'");
}

inline DiagonalLaw parse_diagonal(const json& j, const std::string& ptr) {
    const std::string kind = kind_of(j, ptr);
    if (kind == "zero") {
        check_object(j, ptr, {"kind"});
        return laws::diag_zero();
    }
    check_object(j, ptr, {"kind", "eta"}, {"eta"});
    const double eta = get_number(j["eta"], child(ptr, "eta"));
    if (eta < 0.0) throw ConfigError(child(ptr, "eta"), "eta must be non-negative");
    if (kind == "gaussian") return laws::diag_gaussian(eta);
    if (kind == "rademacher") return laws::diag_rademacher(eta);
    throw ConfigError(child(ptr, "kind"), "unknown diagonal law '" + kind + "'");
}

inline Ensemble parse_ensemble(const json& j, const std::string& ptr) {
    if (j.is_object() && j.contains("preset")) {
        check_object(j, ptr, {"preset"});
        const std::string name = get_string(j["preset"], child(ptr, "preset"));
        if (name == "gue") return presets::gue();
        if (name == "goe") return presets::goe();
        if (name == "rademacher") return presets::rademacher();
        throw ConfigError(child(ptr, "preset"), "unknown ensemble preset '" + name + "'");
    }
    check_object(j, ptr, {"name", "law", "diagonal"}, {"law", "diagonal"});
    Ensemble e;
    e.name = j.contains("name") ? get_string(j["name"], child(ptr, "name")) : "custom";
    e.law = parse_law(j["law"], child(ptr, "law"));
    e.diagonal = parse_diagonal(j["diagonal"], child(ptr, "diagonal"));
    rethrow_at(ptr, [&] {
        validate_law(e.law, e.diagonal);
        return 0;
    });
    return e;
}

inline void check_letter_spec(const json& j, const std::string& ptr) {
    const std::string kind = kind_of(j, ptr);
    if (kind == "identity" || kind == "shift") {
        check_object(j, ptr, {"kind"});
    } else if (kind == "diagonal_pattern") {
        check_object(j, ptr, {"kind", "values"}, {"values"});
        get_complex_list(j["values"], child(ptr, "values"));
    } else if (kind == "circulant") {
        check_object(j, ptr, {"kind", "first_row"}, {"first_row"});
        get_complex_list(j["first_row"], child(ptr, "first_row"));
    } else if (kind == "projection") {
        check_object(j, ptr, {"kind", "fraction"}, {"fraction"});
        const double f = get_number(j["fraction"], child(ptr, "fraction"));
        if (f < 0.0 || f > 1.0) throw ConfigError(child(ptr, "fraction"), "must lie in [0, 1]");
    } else if (kind == "random_fixed") {
        check_object(j, ptr, {"kind", "seed", "norm_cap"}, {"seed", "norm_cap"});
        get_int(j["seed"], child(ptr, "seed"));
        if (get_number(j["norm_cap"], child(ptr, "norm_cap")) <= 0.0) throw ConfigError(child(ptr, "norm_cap"), "must be positive");
    } else {
        throw ConfigError(child(ptr, "kind"), "unknown family kind '" + kind + "'");
    }
}

inline Matrix build_letter(const json& j, int n, const std::string& ptr) {
    const std::string kind = j["kind"].get<std::string>();
    return rethrow_at(ptr, [&]() -> Matrix {
        if (kind == "identity") return families::identity(n);
        if (kind == "shift") return families::circulant(n, n > 1 ? std::vector<cplx>{0.0, 1.0} : std::vector<cplx>{1.0});
        if (kind == "diagonal_pattern") return families::diagonal_pattern(n, get_complex_list(j["values"], ptr));
        if (kind == "circulant") return families::circulant(n, get_complex_list(j["first_row"], ptr));
        if (kind == "projection") return families::projection(n, j["fraction"].get<double>());
        return families::random_fixed(n, j["seed"].get<std::uint64_t>(), j["norm_cap"].get<double>());
    });
}

} // namespace detail

/// The deterministic family of a config at dimension n.
inline DetFamily build_family(const json& family, int n) {
    std::vector<Matrix> ms;
    for (std::size_t k = 0; k < family.size(); ++k) ms.push_back(detail::build_letter(family[k], n, detail::child("/family", k)));
    return DetFamily(n, std::move(ms));
}

inline ExperimentConfig parse_config(const json& doc) {
    using namespace detail;
    check_object(doc, "", {"task", "ensembles", "family", "monomials", "pairs", "N", "R", "seed", "caps", "slack_c", "m", "n", "output"},
                 {"task"});
    ExperimentConfig c;
    c.task = get_string(doc["task"], "/task");
    if (!known_tasks().count(c.task)) throw ConfigError("/task", "unknown task '" + c.task + "'");

    if (doc.contains("caps")) {
        check_object(doc["caps"], "/caps", {"pairing", "partition", "moment"});
        const auto& caps = doc["caps"];
        if (caps.contains("pairing")) c.caps.pairing = get_int(caps["pairing"], "/caps/pairing");
        if (caps.contains("partition")) c.caps.partition = get_int(caps["partition"], "/caps/partition");
        if (caps.contains("moment")) c.caps.moment = get_int(caps["moment"], "/caps/moment");
    }
    json resolved;
    resolved["task"] = c.task;
    resolved["caps"] = {{"pairing", c.caps.pairing}, {"partition", c.caps.partition}, {"moment", c.caps.moment}};

    if (doc.contains("seed")) {
        const auto& s = doc["seed"];
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            throw ConfigError("/seed", "expected a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }
    resolved["seed"] = c.seed;

    if (doc.contains("output")) {
        check_object(doc["output"], "/output", {"json", "csv"});
        if (doc["output"].contains("json")) c.out_json = get_string(doc["output"]["json"], "/output/json");
        if (doc["output"].contains("csv")) c.out_csv = get_string(doc["output"]["csv"], "/output/csv");
    }

    if (c.task == "pairings") {
        for (const char* k : {"m", "n"})
            if (!doc.contains(k)) throw ConfigError(child("", k), "missing required field");
        c.m = get_int(doc["m"], "/m");
        c.n = get_int(doc["n"], "/n");
        if (c.m < 1 || c.n < 1) throw ConfigError(c.m < 1 ? "/m" : "/n", "must be at least 1");
        resolved["m"] = c.m;
        resolved["n"] = c.n;
        c.resolved = resolved;
        return c;
    }

    for (const char* k : {"ensembles", "monomials", "N"})
        if (!doc.contains(k)) throw ConfigError(child("", k), "missing required field");

    const auto& ens = doc["ensembles"];
    if (!ens.is_object() || ens.empty()) throw ConfigError("/ensembles", "expected a non-empty object keyed by Wigner id");
    for (const auto& [key, spec] : ens.items()) {
        const std::string ptr = child("/ensembles", key);
        int id = 0;
        try {
            std::size_t used = 0;
            id = std::stoi(key, &used);
            if (used != key.size() || id < 1) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw ConfigError(ptr, "ensemble keys must be positive integers (Wigner ids)");
        }
        c.ensembles[id] = parse_ensemble(spec, ptr);
    }
    resolved["ensembles"] = ens;

    c.family = doc.contains("family") ? doc["family"] : json::array({json{{"kind", "identity"}}});
    if (!c.family.is_array() || c.family.empty()) throw ConfigError("/family", "expected a non-empty array of letter specs");
    for (std::size_t k = 0; k < c.family.size(); ++k) check_letter_spec(c.family[k], child("/family", k));
    resolved["family"] = c.family;

    const auto& monos = doc["monomials"];
    if (!monos.is_array() || monos.empty()) throw ConfigError("/monomials", "expected a non-empty array of strings");
    for (std::size_t i = 0; i < monos.size(); ++i) {
        const std::string ptr = child("/monomials", i);
        const std::string text = get_string(monos[i], ptr);
        Monomial p = rethrow_at(ptr, [&] { return parse_monomial(text); });
        for (int id : p.wigner)
            if (!c.ensembles.count(id)) throw ConfigError(ptr, "unknown Wigner id x" + std::to_string(id));
        auto check_word = [&](const DetWord& w) {
            for (const auto& l : w)
                if (l.base < 0 || l.base >= static_cast<int>(c.family.size()))
                    throw ConfigError(ptr, "letter a" + std::to_string(l.base) + " has no family entry");
        };
        for (const auto& w : p.det) check_word(w);
        check_word(p.constant);
        c.monomial_text.push_back(text);
        c.monomials.push_back(std::move(p));
    }
    json canon = json::array();
    for (const auto& p : c.monomials) canon.push_back(p.to_string());
    resolved["monomials"] = canon;

    if (doc.contains("pairs")) {
        const auto& pairs = doc["pairs"];
        if (!pairs.is_array() || pairs.empty()) throw ConfigError("/pairs", "expected a non-empty array of [i, j] index pairs");
        for (std::size_t k = 0; k < pairs.size(); ++k) {
            const std::string ptr = child("/pairs", k);
            if (!pairs[k].is_array() || pairs[k].size() != 2) throw ConfigError(ptr, "expected an [i, j] pair");
            const int i = get_int(pairs[k][0], child(ptr, 0)), j = get_int(pairs[k][1], child(ptr, 1));
            const int count = static_cast<int>(c.monomials.size());
            if (i < 0 || i >= count || j < 0 || j >= count) throw ConfigError(ptr, "monomial index out of range");
            c.pairs.emplace_back(i, j);
        }
    } else {
        for (int i = 0; i < static_cast<int>(c.monomials.size()); ++i)
            for (int j = i; j < static_cast<int>(c.monomials.size()); ++j) c.pairs.emplace_back(i, j);
    }
    json pairs = json::array();
    for (auto [i, j] : c.pairs) pairs.push_back({i, j});
    resolved["pairs"] = pairs;

    const auto& dims = doc["N"];
    if (dims.is_number_integer()) {
        c.dims.push_back(get_int(dims, "/N"));
    } else if (dims.is_array() && !dims.empty()) {
        for (std::size_t k = 0; k < dims.size(); ++k) c.dims.push_back(get_int(dims[k], child("/N", k)));
    } else {
        throw ConfigError("/N", "expected an integer or a non-empty array of integers");
    }
    for (std::size_t k = 0; k < c.dims.size(); ++k)
        if (c.dims[k] < 1 || c.dims[k] > kMaxMcDim) throw ConfigError(child("/N", k), "dimension out of range");
    resolved["N"] = c.dims;

    if (doc.contains("R")) c.replicates = get_int(doc["R"], "/R");
    if ((c.task == "mc" || c.task == "compare") && c.replicates < 2) throw ConfigError("/R", "need at least 2 replicates");
    resolved["R"] = c.replicates;

    if (doc.contains("slack_c")) c.slack_c = get_number(doc["slack_c"], "/slack_c");
    if (c.slack_c < 0.0) throw ConfigError("/slack_c", "must be non-negative");
    resolved["slack_c"] = c.slack_c;

    // Families must build at every requested dimension.
    for (int n : c.dims) build_family(c.family, n);
    c.resolved = resolved;
    return c;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(doc);
}

} // namespace wigcov
