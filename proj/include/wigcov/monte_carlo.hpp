#pragma once

// Monte Carlo traces Tr p(X, A) over independent replicates, and covariance / cumulant estimators
// with batch-means standard errors.

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "covariance.hpp"
#include "ensembles.hpp"
#include "error.hpp"
#include "families.hpp"
#include "numeric.hpp"
#include "states.hpp"
#include "words.hpp"

namespace wigcov {

inline constexpr int kMaxMcDim = 4096;
inline constexpr int kMaxEnsembles = 16;
inline constexpr int kDefaultBatches = 40;

struct TraceSamples {
    std::vector<std::string> names;
    std::vector<std::vector<cplx>> values; // values[monomial][replicate]
    int dim = 0;
    int replicates = 0;
    std::uint64_t seed = 0;

    int index_of(const std::string& name) const {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw Error("trace samples: no monomial '" + name + "'");
        return static_cast<int>(it - names.begin());
    }
};

/// Thread count from WIGCOV_THREADS (default 1). Results do not depend on it.
inline int mc_threads() {
    if (const char* s = std::getenv("WIGCOV_THREADS")) {
        const int t = std::atoi(s);
        if (t >= 1) return std::min(t, 256);
    }
    return 1;
}

namespace detail {

/// Evaluates every monomial on one replicate's matrices, reusing shared partial products.
class ReplicateEvaluator {
public:
    ReplicateEvaluator(const std::map<int, Matrix>& xs, const DetFamily& family) : xs_(xs), family_(family) {}

    cplx trace(const Monomial& p) {
        const int m = p.degree();
        const int half = (m + 1) / 2;
        const Matrix& left = prefix(p, 0, half);
        if (half == m) return left.trace();
        const Matrix& right = prefix(p, half, m);
        return (left.array() * right.transpose().array()).sum();
    }

private:
    // X_{w_from} A_from ... X_{w_{to-1}} A_{to-1}
    const Matrix& prefix(const Monomial& p, int from, int to) {
        std::string key;
        for (int k = from; k < to; ++k) key += "x" + std::to_string(p.wigner[k]) + " " + to_string(p.det[k]) + " ";
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        Matrix acc;
        for (int k = from; k < to; ++k) {
            const Matrix& x = xs_.at(p.wigner[k]);
            Matrix unit = p.det[k].empty() ? x : family_.word(p.det[k]).left_multiply(x);
            acc = k == from ? std::move(unit) : Matrix(acc * unit);
        }
        return cache_.emplace(key, std::move(acc)).first->second;
    }

    const std::map<int, Matrix>& xs_;
    const DetFamily& family_;
    std::map<std::string, Matrix> cache_;
};

} // namespace detail

/// One matrix per Wigner id per replicate, shared by all monomials of that replicate.
inline TraceSamples run_traces(const std::vector<Monomial>& monomials, int n, int replicates,
                               const std::map<int, Ensemble>& ensembles, const DetFamily& family, std::uint64_t seed,
                               int threads = mc_threads()) {
    if (n < 1 || n > kMaxMcDim) throw CapExceeded("run_traces: N outside [1, " + std::to_string(kMaxMcDim) + "]");
    if (replicates < 2) throw Error("run_traces: need at least 2 replicates");
    if (family.dim() != n) throw Error("run_traces: family dimension differs from N");
    std::vector<int> ids;
    for (const auto& p : monomials)
        for (int id : p.wigner) {
            if (!ensembles.count(id)) throw Error("run_traces: unknown Wigner id x" + std::to_string(id));
            if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
        }
    if (static_cast<int>(ids.size()) > kMaxEnsembles) throw CapExceeded("run_traces: too many distinct ensembles");
    for (const auto& [id, e] : ensembles) validate_law(e.law, e.diagonal);

    TraceSamples out;
    out.dim = n;
    out.replicates = replicates;
    out.seed = seed;
    out.values.assign(monomials.size(), std::vector<cplx>(static_cast<std::size_t>(replicates)));
    for (const auto& p : monomials) out.names.push_back(p.to_string());

    // Degree-0 traces are deterministic.
    std::vector<cplx> constants(monomials.size());
    for (std::size_t k = 0; k < monomials.size(); ++k)
        if (monomials[k].degree() == 0) {
            FiniteNState st(family);
            constants[k] = st.phi(monomials[k].constant) * static_cast<double>(n);
        }

    auto work = [&](int begin, int end) {
        for (int r = begin; r < end; ++r) {
            std::map<int, Matrix> xs;
            for (int id : ids)
                xs.emplace(id, sample(n, ensembles.at(id), seed,
                                      CounterRng::key({static_cast<std::uint64_t>(r), static_cast<std::uint64_t>(id)})));
            detail::ReplicateEvaluator ev(xs, family);
            for (std::size_t k = 0; k < monomials.size(); ++k)
                out.values[k][r] = monomials[k].degree() == 0 ? constants[k] : ev.trace(monomials[k]);
        }
    };
    threads = std::clamp(threads, 1, replicates);
    if (threads == 1) {
        work(0, replicates);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(work, static_cast<int>(static_cast<long>(replicates) * t / threads),
                              static_cast<int>(static_cast<long>(replicates) * (t + 1) / threads));
        for (auto& th : pool) th.join();
    }
    return out;
}

struct Estimate {
    cplx value;
    double std_error = 0.0;
};

namespace detail {

inline cplx mean(const cplx* a, std::size_t n) {
    CompensatedSum<cplx> s;
    for (std::size_t r = 0; r < n; ++r) s += a[r];
    return s.value() / static_cast<double>(n);
}

inline cplx sample_cov(const cplx* a, const cplx* b, std::size_t n) {
    const cplx ma = mean(a, n), mb = mean(b, n);
    CompensatedSum<cplx> s;
    for (std::size_t r = 0; r < n; ++r) s += (a[r] - ma) * (b[r] - mb);
    return s.value() / static_cast<double>(n - 1);
}

// k-statistics k3 and k4 (no conjugation).
inline cplx kstat3(const cplx* a, std::size_t n) {
    const cplx ma = mean(a, n);
    CompensatedSum<cplx> m3;
    for (std::size_t r = 0; r < n; ++r) m3 += std::pow(a[r] - ma, 3);
    const double dn = static_cast<double>(n);
    return dn / ((dn - 1) * (dn - 2)) * m3.value();
}

inline cplx kstat4(const cplx* a, std::size_t n) {
    const cplx ma = mean(a, n);
    CompensatedSum<cplx> s2, s4;
    for (std::size_t r = 0; r < n; ++r) {
        const cplx d = a[r] - ma, d2 = d * d;
        s2 += d2;
        s4 += d2 * d2;
    }
    const double dn = static_cast<double>(n);
    const cplx m2 = s2.value() / dn, m4 = s4.value() / dn;
    return dn * dn * ((dn + 1) * m4 - 3 * (dn - 1) * m2 * m2) / ((dn - 1) * (dn - 2) * (dn - 3));
}

// Unbiased joint cumulant k(a, a, b).
inline cplx kstat112(const cplx* a, const cplx* b, std::size_t n) {
    const cplx ma = mean(a, n), mb = mean(b, n);
    CompensatedSum<cplx> s;
    for (std::size_t r = 0; r < n; ++r) s += (a[r] - ma) * (a[r] - ma) * (b[r] - mb);
    const double dn = static_cast<double>(n);
    return dn / ((dn - 1) * (dn - 2)) * s.value();
}

/// Full-sample statistic plus the batch-means standard error of the same statistic.
template <typename Stat>
Estimate with_batches(std::size_t n, int batches, std::size_t min_batch, Stat&& stat) {
    Estimate e{stat(0, n), 0.0};
    std::size_t b = static_cast<std::size_t>(std::max(2, batches));
    while (b > 2 && n / b < min_batch) --b;
    const std::size_t len = n / b;
    if (len < min_batch) return e;
    std::vector<cplx> vals;
    for (std::size_t k = 0; k < b; ++k) vals.push_back(stat(k * len, len));
    const cplx avg = mean(vals.data(), vals.size());
    CompensatedSum<double> ss;
    for (const auto& v : vals) ss += std::norm(v - avg);
    e.std_error = std::sqrt(ss.value() / static_cast<double>(b - 1) / static_cast<double>(b));
    return e;
}

} // namespace detail

/// (1/(R-1)) sum (T_p - mean_p)(T_q - mean_q), without conjugation.
inline Estimate empirical_cov(const std::vector<cplx>& a, const std::vector<cplx>& b, int batches = kDefaultBatches) {
    if (a.size() != b.size()) throw Error("empirical_cov: sample sizes differ");
    if (a.size() < 2) throw Error("empirical_cov: need at least 2 samples");
    return detail::with_batches(a.size(), batches, 2, [&](std::size_t off, std::size_t len) {
        return detail::sample_cov(a.data() + off, b.data() + off, len);
    });
}

inline Estimate empirical_cov(const TraceSamples& s, int p, int q, int batches = kDefaultBatches) {
    return empirical_cov(s.values.at(p), s.values.at(q), batches);
}

inline Estimate empirical_mean(const std::vector<cplx>& a, int batches = kDefaultBatches) {
    if (a.empty()) throw Error("empirical_mean: no samples");
    return detail::with_batches(a.size(), batches, 1,
                                [&](std::size_t off, std::size_t len) { return detail::mean(a.data() + off, len); });
}

struct Cumulant {
    int order = 0;
    cplx value;
    double std_error = 0.0;
};

inline constexpr int kMinCumulantSamples = 100;

/// k-statistics of orders 1..max_order (at most 4); order 2 is empirical_cov(a, a).
inline std::vector<Cumulant> empirical_cumulants(const std::vector<cplx>& a, int max_order = 4, int batches = kDefaultBatches) {
    if (max_order < 1 || max_order > 4) throw Error("empirical_cumulants: order must be in 1..4");
    if (max_order >= 3 && static_cast<int>(a.size()) < kMinCumulantSamples)
        throw Error("empirical_cumulants: need at least 100 samples for orders 3 and 4");
    if (a.size() < 2) throw Error("empirical_cumulants: need at least 2 samples");
    std::vector<Cumulant> out;
    const auto m = empirical_mean(a, batches);
    out.push_back({1, m.value, m.std_error});
    if (max_order >= 2) {
        const auto c = empirical_cov(a, a, batches);
        out.push_back({2, c.value, c.std_error});
    }
    if (max_order >= 3) {
        const auto k3 = detail::with_batches(a.size(), batches, 4, [&](std::size_t off, std::size_t len) {
            return detail::kstat3(a.data() + off, len);
        });
        out.push_back({3, k3.value, k3.std_error});
    }
    if (max_order >= 4) {
        const auto k4 = detail::with_batches(a.size(), batches, 5, [&](std::size_t off, std::size_t len) {
            return detail::kstat4(a.data() + off, len);
        });
        out.push_back({4, k4.value, k4.std_error});
    }
    return out;
}

/// Joint third cumulant k(Z_a, Z_a, Z_b).
inline Estimate empirical_mixed_k3(const std::vector<cplx>& a, const std::vector<cplx>& b, int batches = kDefaultBatches) {
    if (a.size() != b.size()) throw Error("empirical_mixed_k3: sample sizes differ");
    if (static_cast<int>(a.size()) < kMinCumulantSamples) throw Error("empirical_mixed_k3: need at least 100 samples");
    return detail::with_batches(a.size(), batches, 4, [&](std::size_t off, std::size_t len) {
        return detail::kstat112(a.data() + off, b.data() + off, len);
    });
}

/// |k3| and |k4| both within `sigmas` standard errors of zero.
inline bool looks_gaussian(const std::vector<Cumulant>& cs, double sigmas = 5.0) {
    for (const auto& c : cs)
        if (c.order >= 3 && std::abs(c.value) > sigmas * c.std_error) return false;
    return true;
}

struct SweepRow {
    int dim = 0;
    cplx estimate;
    double std_error = 0.0;
    cplx theory;
    double abs_error = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    bool monotone = false; // informational: |estimate - theory| non-increasing in N
};

/// MC covariance of (p, q) against phi2 for each N. `family_at` builds the deterministic family at N.
inline SweepResult convergence_sweep(const Monomial& p, const Monomial& q, const std::vector<int>& dims, int replicates,
                                     const std::map<int, Ensemble>& ensembles,
                                     const std::function<DetFamily(int)>& family_at, std::uint64_t seed) {
    ParamsMap params;
    for (const auto& [id, e] : ensembles) params[id] = e.params();
    SweepResult out;
    for (int n : dims) {
        const DetFamily fam = family_at(n);
        const auto samples = run_traces({p, q}, n, replicates, ensembles, fam, seed);
        const auto est = empirical_cov(samples, 0, 1);
        const cplx th = phi2(p, q, params, FiniteNState(fam)).total;
        out.rows.push_back({n, est.value, est.std_error, th, std::abs(est.value - th)});
    }
    out.monotone = true;
    for (std::size_t k = 1; k < out.rows.size(); ++k)
        out.monotone = out.monotone && out.rows[k].abs_error <= out.rows[k - 1].abs_error;
    return out;
}

} // namespace wigcov
