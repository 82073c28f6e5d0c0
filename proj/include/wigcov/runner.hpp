#pragma once

// Runs a parsed experiment config: theory, Monte Carlo, exact oracle and their cross-checks.
// Produces a versioned JSON report and a plot-ready CSV table.

#include <chrono>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "covariance.hpp"
#include "monte_carlo.hpp"
#include "oracle.hpp"
#include "states.hpp"

namespace wigcov {

struct RunResult {
    json report;
    std::string csv;
    int flagged = 0; // records with at least one flag set

    int exit_code() const { return flagged == 0 ? 0 : 1; }
};

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx from_json_cplx(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

inline ParamsMap params_map(const ExperimentConfig& c) {
    ParamsMap out;
    for (const auto& [id, e] : c.ensembles) out[id] = e.params();
    return out;
}

/// Vertex count of the pair's cycle graph, the size of the oracle's partition sum.
inline int oracle_vertices(const Monomial& p, const Monomial& q) { return 2 * (p.degree() + q.degree()); }

} // namespace detail

/// Per-partition diagnostics of the second-order partition sum for (p, q), as CSV rows.
inline std::string dump_partitions(const Monomial& p, const Monomial& q, const DetFamily& family, const EnsembleMap& ens,
                                   const OracleOptions& opt) {
    std::ostringstream os;
    os << "partition_id,blocks,q1,q2,q2p,q,classification,beta_x_re,beta_x_im,beta_a_re,beta_a_im\n";
    if (p.degree() == 0 || q.degree() == 0) return os.str();
    const auto cg = build_cycle_graph({p, q});
    long id = 0;
    partition_sum({p, q}, family, ens, 2, opt, [&](const PartitionTerm& t) {
        const auto rep = classify(*t.quotient);
        std::string q1, q2, q2p, cls;
        for (std::size_t i = 0; i < rep.components.size(); ++i) {
            const auto& c = rep.components[i];
            const std::string sep = i ? ";" : "";
            q1 += sep + detail::fmt(c.q1);
            q2 += sep + detail::fmt(c.q2);
            q2p += sep + detail::fmt(c.q2p);
            std::string name = to_string(c.type);
            if (c.twins != CycleTwins::None) name += "/" + to_string(c.twins);
            cls += sep + name;
        }
        os << id++ << ',' << detail::csv_field(t.pi->to_string(cg.graph.names)) << ',' << q1 << ',' << q2 << ',' << q2p << ','
           << detail::fmt(rep.q) << ',' << cls << ',' << detail::fmt(t.beta_x.real()) << ',' << detail::fmt(t.beta_x.imag()) << ','
           << detail::fmt(t.beta_a.real()) << ',' << detail::fmt(t.beta_a.imag()) << '\n';
    });
    return os.str();
}

inline json pairings_records(int m, int n, int cap) {
    json records = json::array();
    for (const auto& s : enumerate_nc2(m, n, cap)) {
        records.push_back({{"pairing", s.as_permutation().to_string()},
                           {"through", s.through_count()},
                           {"kreweras", kreweras(s).to_string()}});
    }
    return records;
}

/// Executes the config. `on_partitions`, when set, receives the per-partition CSV of each oracle pair.
inline RunResult run(const ExperimentConfig& c,
                     const std::function<void(const std::string& label, const std::string& csv)>& on_partitions = {}) {
    const auto start = std::chrono::steady_clock::now();
    RunResult out;
    json& rep = out.report;
    rep["schema_version"] = kSchemaVersion;
    rep["task"] = c.task;
    rep["config"] = c.resolved;
    rep["config_hash"] = config_hash(c.resolved);
    json records = json::array();
    std::ostringstream csv;

    if (c.task == "pairings") {
        records = pairings_records(c.m, c.n, c.caps.pairing);
        csv << "index,pairing,through,kreweras\n";
        for (std::size_t k = 0; k < records.size(); ++k)
            csv << k << ',' << detail::csv_field(records[k]["pairing"]) << ',' << records[k]["through"].get<int>() << ','
                << detail::csv_field(records[k]["kreweras"]) << '\n';
        rep["count"] = records.size();
    } else {
        const bool want_theory = c.task == "theory" || c.task == "compare";
        const bool want_mc = c.task == "mc" || c.task == "compare";
        const bool want_oracle = c.task == "oracle" || c.task == "compare";
        const ParamsMap params = detail::params_map(c);
        OracleOptions opt;
        opt.partition_cap = c.caps.partition;
        opt.moment_cap = c.caps.moment;

        csv << "p,q,N,theory_re,theory_im,s1_re,s2_re,s3_re,s4_re,mc_re,mc_im,mc_se,oracle_re,oracle_im,discrepancy\n";
        for (int n : c.dims) {
            const DetFamily fam = build_family(c.family, n);
            const FiniteNState st(fam);
            TraceSamples samples;
            if (want_mc) samples = run_traces(c.monomials, n, c.replicates, c.ensembles, fam, c.seed);

            if (want_mc && c.replicates >= kMinCumulantSamples) {
                for (std::size_t k = 0; k < c.monomials.size(); ++k) {
                    json cum = json::array();
                    for (const auto& cu : empirical_cumulants(samples.values[k], 4))
                        cum.push_back({{"order", cu.order}, {"value", to_json(cu.value)}, {"std_error", cu.std_error}});
                    records.push_back({{"kind", "cumulants"}, {"monomial", c.monomials[k].to_string()}, {"N", n}, {"cumulants", cum}});
                }
            }

            for (auto [i, j] : c.pairs) {
                const Monomial& p = c.monomials[i];
                const Monomial& q = c.monomials[j];
                json r{{"kind", "covariance"}, {"p", p.to_string()}, {"q", q.to_string()}, {"N", n}};
                json flags = json::object();
                cplx theory = 0.0, oracle = 0.0;
                Estimate mc{};
                bool have_oracle = false;
                if (want_theory) {
                    const auto t = phi2(p, q, params, st, c.caps.pairing);
                    theory = t.total;
                    r["theory"] = {{"s1", to_json(t.s1)}, {"s2", to_json(t.s2)}, {"s3", to_json(t.s3)}, {"s4", to_json(t.s4)},
                                   {"total", to_json(t.total)}};
                }
                if (want_mc) {
                    mc = empirical_cov(samples, i, j);
                    r["mc"] = {{"value", to_json(mc.value)}, {"std_error", mc.std_error}, {"replicates", c.replicates}};
                }
                if (want_oracle) {
                    const bool fits = n <= kMaxOracleDim && detail::oracle_vertices(p, q) <= c.caps.partition;
                    if (!fits && c.task == "oracle")
                        throw CapExceeded("oracle: pair (" + p.to_string() + ", " + q.to_string() + ") at N = " + std::to_string(n) +
                                          " exceeds the oracle caps");
                    if (fits) {
                        oracle = exact_tau2(p, q, fam, c.ensembles, opt);
                        const cplx direct = exact_tau2_direct(p, q, fam, c.ensembles, opt);
                        have_oracle = true;
                        r["oracle"] = {{"value", to_json(oracle)}, {"second_order_sum", to_json(direct)}};
                        flags["oracle_routes_disagree"] = std::abs(oracle - direct) > 1e-8 * std::max(1.0, std::abs(oracle));
                        if (on_partitions)
                            on_partitions(p.to_string() + " | " + q.to_string() + " | N=" + std::to_string(n),
                                          dump_partitions(p, q, fam, c.ensembles, opt));
                    } else {
                        r["oracle"] = nullptr;
                    }
                }
                if (want_theory && want_mc) {
                    const double tol = 4.0 * mc.std_error + c.slack_c / n;
                    r["tolerance"] = tol;
                    flags["discrepancy"] = std::abs(mc.value - theory) > tol;
                }
                if (want_mc && have_oracle) flags["mc_vs_oracle"] = std::abs(mc.value - oracle) > 4.0 * mc.std_error;
                r["flags"] = flags;
                bool any = false;
                for (const auto& [k, v] : flags.items()) any = any || v.get<bool>();
                out.flagged += any;
                records.push_back(r);

                auto num = [](double v) { return detail::fmt(v); };
                csv << detail::csv_field(p.to_string()) << ',' << detail::csv_field(q.to_string()) << ',' << n << ','
                    << (want_theory ? num(theory.real()) : "") << ',' << (want_theory ? num(theory.imag()) : "") << ',';
                for (const char* s : {"s1", "s2", "s3", "s4"})
                    csv << (want_theory ? num(from_json_cplx(r["theory"][s]).real()) : "") << ',';
                csv << (want_mc ? num(mc.value.real()) : "") << ',' << (want_mc ? num(mc.value.imag()) : "") << ','
                    << (want_mc ? num(mc.std_error) : "") << ',' << (have_oracle ? num(oracle.real()) : "") << ','
                    << (have_oracle ? num(oracle.imag()) : "") << ',' << (any ? 1 : 0) << '\n';
            }
        }
    }
    rep["records"] = records;
    rep["flagged"] = out.flagged;
    rep["timing"] = {{"seconds", std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()}};
    out.csv = csv.str();
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << text;
}

/// Report without the timing block, for byte-level reproducibility checks.
inline std::string reproducible_dump(json report) {
    report.erase("timing");
    return report.dump(2);
}

} // namespace wigcov
