#pragma once

// Exact finite-N expectations of trace products by summing over vertex partitions of the cycle
// graph: weights of the Wigner entries times injective traces of the deterministic part.

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ensembles.hpp"
#include "error.hpp"
#include "families.hpp"
#include "graph.hpp"
#include "numeric.hpp"
#include "words.hpp"

namespace wigcov {

inline constexpr int kMaxOracleDim = 16;
inline constexpr double kMaxDirectAssignments = 5e7;

using EnsembleMap = std::map<int, Ensemble>;

/// An edge of a graph of deterministic matrices: contributes M(psi(trg), psi(src)).
struct MatrixEdge {
    int src = 0;
    int trg = 0;
    const Matrix* matrix = nullptr;
};

struct MatrixGraph {
    int num_vertices = 0;
    std::vector<MatrixEdge> edges;
};

namespace detail {

struct Tensor {
    std::vector<int> vars; // sorted
    std::vector<cplx> data;
};

inline std::size_t ipow(int n, std::size_t k) {
    std::size_t r = 1;
    for (std::size_t t = 0; t < k; ++t) r *= static_cast<std::size_t>(n);
    return r;
}

} // namespace detail

/// Sum over all vertex labelings of the product of edge entries, by variable elimination.
inline cplx graph_trace(const MatrixGraph& g, int n) {
    using detail::Tensor;
    std::vector<Tensor> factors;
    for (const auto& e : g.edges) {
        Tensor t;
        const Matrix& m = *e.matrix;
        if (e.src == e.trg) {
            t.vars = {e.src};
            for (int i = 0; i < n; ++i) t.data.push_back(m(i, i));
        } else {
            t.vars = {std::min(e.src, e.trg), std::max(e.src, e.trg)};
            t.data.resize(static_cast<std::size_t>(n) * n);
            for (int b = 0; b < n; ++b)
                for (int a = 0; a < n; ++a) {
                    const int va = a, vb = b; // value of vars[0], vars[1]
                    const int trg = e.trg == t.vars[0] ? va : vb, src = e.src == t.vars[0] ? va : vb;
                    t.data[static_cast<std::size_t>(a) + static_cast<std::size_t>(b) * n] = m(trg, src);
                }
        }
        factors.push_back(std::move(t));
    }

    auto index_of = [n](const Tensor& t, const std::vector<int>& val) {
        std::size_t idx = 0, stride = 1;
        for (int v : t.vars) {
            idx += static_cast<std::size_t>(val[v]) * stride;
            stride *= static_cast<std::size_t>(n);
        }
        return idx;
    };

    cplx scalar = 1.0;
    std::vector<bool> eliminated(g.num_vertices, false);
    for (int step = 0; step < g.num_vertices; ++step) {
        // Vertex whose elimination creates the smallest tensor.
        int best = -1;
        std::vector<int> best_union;
        for (int v = 0; v < g.num_vertices; ++v) {
            if (eliminated[v]) continue;
            std::vector<int> u;
            for (const auto& f : factors)
                if (std::binary_search(f.vars.begin(), f.vars.end(), v)) u.insert(u.end(), f.vars.begin(), f.vars.end());
            std::sort(u.begin(), u.end());
            u.erase(std::unique(u.begin(), u.end()), u.end());
            if (best < 0 || u.size() < best_union.size()) {
                best = v;
                best_union = std::move(u);
            }
        }
        eliminated[best] = true;
        std::vector<Tensor> touching, rest;
        for (auto& f : factors)
            (std::binary_search(f.vars.begin(), f.vars.end(), best) ? touching : rest).push_back(std::move(f));
        if (touching.empty()) {
            scalar *= static_cast<double>(n);
            factors = std::move(rest);
            continue;
        }
        Tensor out;
        for (int v : best_union)
            if (v != best) out.vars.push_back(v);
        out.data.assign(detail::ipow(n, out.vars.size()), 0.0);
        std::vector<int> val(g.num_vertices, 0);
        const std::size_t total = detail::ipow(n, best_union.size());
        for (std::size_t code = 0; code < total; ++code) {
            std::size_t c = code;
            for (int v : best_union) {
                val[v] = static_cast<int>(c % static_cast<std::size_t>(n));
                c /= static_cast<std::size_t>(n);
            }
            cplx prod = 1.0;
            for (const auto& f : touching) prod *= f.data[index_of(f, val)];
            out.data[index_of(out, val)] += prod;
        }
        if (out.vars.empty())
            scalar *= out.data[0];
        else
            rest.push_back(std::move(out));
        factors = std::move(rest);
    }
    return scalar;
}

inline MatrixGraph quotient(const MatrixGraph& g, const Partition& pi) {
    MatrixGraph q;
    q.num_vertices = pi.num_blocks;
    for (auto e : g.edges) {
        e.src = pi.block[e.src];
        e.trg = pi.block[e.trg];
        q.edges.push_back(e);
    }
    return q;
}

/// Injective trace via Moebius inversion over coarsenings: sum_pi mu(0, pi) Tr[S^pi].
inline cplx injective_trace_mobius(const MatrixGraph& g, int n, int cap = kDefaultPartitionCap) {
    if (g.num_vertices > n) return 0.0;
    CompensatedSum<cplx> sum;
    for_each_partition(
        g.num_vertices,
        [&](const Partition& pi) {
            double mu = 1.0;
            for (const auto& b : pi.blocks())
                for (std::size_t k = 1; k < b.size(); ++k) mu *= -static_cast<double>(k);
            sum += mu * graph_trace(quotient(g, pi), n);
        },
        cap);
    return sum.value();
}

/// Injective trace by enumerating the injective labelings directly.
inline cplx injective_trace_direct(const MatrixGraph& g, int n) {
    const int v = g.num_vertices;
    if (v > n) return 0.0;
    double count = 1.0;
    for (int k = 0; k < v; ++k) count *= n - k;
    if (count > kMaxDirectAssignments) throw CapExceeded("injective_trace_direct: too many injective labelings");
    std::vector<int> psi(v, -1);
    std::vector<bool> used(n, false);
    CompensatedSum<cplx> sum;
    std::function<void(int)> rec = [&](int k) {
        if (k == v) {
            cplx prod = 1.0;
            for (const auto& e : g.edges) prod *= (*e.matrix)(psi[e.trg], psi[e.src]);
            sum += prod;
            return;
        }
        for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            used[i] = true;
            psi[k] = i;
            rec(k + 1);
            used[i] = false;
        }
    };
    rec(0);
    return sum.value();
}

/// The deterministic part of a quotient of a cycle graph.
inline MatrixGraph a_subgraph(const LabeledGraph& tq, const std::vector<Matrix>& letter_matrices) {
    MatrixGraph g;
    g.num_vertices = tq.num_vertices;
    for (const auto& e : tq.edges)
        if (!e.is_x) g.edges.push_back({e.src, e.trg, &letter_matrices.at(e.letter - 1)});
    return g;
}

inline const Ensemble& ensemble_for(const EnsembleMap& ens, int id) {
    auto it = ens.find(id);
    if (it == ens.end()) throw Error("unknown Wigner id x" + std::to_string(id));
    return it->second;
}

/// Expectation of the product of unnormalized entries over the X-edges of the given cycles.
/// Edges are grouped by (unordered vertex pair, Wigner id); entry x_{ij} with i < j counts as x,
/// x_{ji} as its conjugate, loops use the diagonal law.
inline cplx entry_product_moment(const LabeledGraph& tq, const std::vector<int>& wigner, const EnsembleMap& ens,
                                 const std::vector<bool>& cycles, int cap = kDefaultMomentCap) {
    struct Count {
        int forward = 0, backward = 0;
    };
    std::map<std::tuple<int, int, int>, Count> groups;
    for (const auto& e : tq.edges) {
        if (!e.is_x || !cycles[e.cycle]) continue;
        const int lo = std::min(e.src, e.trg), hi = std::max(e.src, e.trg);
        auto& c = groups[{lo, hi, wigner.at(e.letter - 1)}];
        (e.trg == lo ? c.forward : c.backward) += 1;
    }
    cplx prod = 1.0;
    for (const auto& [key, c] : groups) {
        const auto& [lo, hi, id] = key;
        const Ensemble& en = ensemble_for(ens, id);
        if (lo == hi)
            prod *= diagonal_moments(en.diagonal, c.forward + c.backward, cap);
        else
            prod *= entry_moments(en.law, c.forward, c.backward, cap);
        if (prod == 0.0) return 0.0;
    }
    return prod;
}

/// omega_X of order 1 (joint moment) or 2 (alternating sum over subsets of cycles).
inline cplx omega_x(const LabeledGraph& tq, const std::vector<int>& wigner, int num_cycles, const EnsembleMap& ens,
                    int order, int cap = kDefaultMomentCap) {
    require(order == 1 || order == 2, "omega_x: order must be 1 or 2");
    std::vector<bool> all(num_cycles, true);
    if (order == 1) return entry_product_moment(tq, wigner, ens, all, cap);
    std::vector<cplx> single(num_cycles);
    for (int j = 0; j < num_cycles; ++j) {
        std::vector<bool> only(num_cycles, false);
        only[j] = true;
        single[j] = entry_product_moment(tq, wigner, ens, only, cap);
    }
    CompensatedSum<cplx> sum;
    for (unsigned mask = 0; mask < (1u << num_cycles); ++mask) {
        std::vector<bool> in(num_cycles);
        int size = 0;
        for (int j = 0; j < num_cycles; ++j) size += (in[j] = (mask >> j) & 1u);
        cplx term = ((num_cycles - size) % 2 ? -1.0 : 1.0);
        term *= size == 0 ? 1.0 : entry_product_moment(tq, wigner, ens, in, cap);
        for (int j = 0; j < num_cycles; ++j)
            if (!in[j]) term *= single[j];
        sum += term;
    }
    return sum.value();
}

struct PartitionTerm {
    const Partition* pi = nullptr;
    const LabeledGraph* quotient = nullptr;
    cplx beta_x = 0.0;
    cplx beta_a = 0.0;
};

struct OracleOptions {
    int partition_cap = kDefaultPartitionCap;
    int moment_cap = kDefaultMomentCap;
    bool direct_trace = false; // injective traces by direct enumeration instead of Moebius inversion
};

/// sum_pi beta_X(pi) beta_A(pi) over all partitions of the cycle graph of positive-degree
/// monomials. `visit`, when set, sees every partition (including zero terms).
inline cplx partition_sum(const std::vector<Monomial>& monomials, const DetFamily& family, const EnsembleMap& ens, int order,
                          const OracleOptions& opt = {}, const std::function<void(const PartitionTerm&)>& visit = {}) {
    const int n = family.dim();
    if (n > kMaxOracleDim) throw CapExceeded("oracle: N = " + std::to_string(n) + " exceeds the cap " + std::to_string(kMaxOracleDim));
    for (const auto& p : monomials) require(p.degree() > 0, "partition_sum: monomials must have positive degree");
    const CycleGraph cg = build_cycle_graph(monomials);
    for (int id : cg.wigner) ensemble_for(ens, id);
    std::vector<Matrix> letters;
    for (const auto& w : cg.det) letters.push_back(family.word_matrix(w));
    const int num_cycles = static_cast<int>(monomials.size());
    const double scale = std::pow(static_cast<double>(n), -0.5 * cg.graph.count_x());

    CompensatedSum<cplx> sum;
    for_each_partition(
        cg.graph.num_vertices,
        [&](const Partition& pi) {
            const LabeledGraph tq = quotient(cg.graph, pi);
            PartitionTerm term{&pi, &tq, 0.0, 0.0};
            const cplx w = omega_x(tq, cg.wigner, num_cycles, ens, order, opt.moment_cap);
            if (w != 0.0) {
                term.beta_x = scale * w;
                const MatrixGraph a = a_subgraph(tq, letters);
                term.beta_a = opt.direct_trace ? injective_trace_direct(a, n) : injective_trace_mobius(a, n, opt.partition_cap);
                sum += term.beta_x * term.beta_a;
            }
            if (visit) visit(term);
        },
        opt.partition_cap);
    return sum.value();
}

/// E[prod_j Tr M_j] at the family's dimension. Degree-0 monomials contribute their deterministic trace.
inline cplx exact_moment(const std::vector<Monomial>& monomials, const DetFamily& family, const EnsembleMap& ens,
                         const OracleOptions& opt = {}) {
    cplx constant = 1.0;
    std::vector<Monomial> random;
    for (const auto& p : monomials) {
        if (p.degree() == 0)
            constant *= p.constant.empty() ? cplx(family.dim()) : family.word_matrix(p.constant).trace();
        else
            random.push_back(p);
    }
    if (random.empty()) return constant;
    return constant * partition_sum(random, family, ens, 1, opt);
}

/// Cov(Tr p, Tr q) = E[Tr p Tr q] - E[Tr p] E[Tr q], from three exact moments.
inline cplx exact_tau2(const Monomial& p, const Monomial& q, const DetFamily& family, const EnsembleMap& ens,
                       const OracleOptions& opt = {}) {
    if (p.degree() == 0 || q.degree() == 0) return 0.0;
    return exact_moment({p, q}, family, ens, opt) - exact_moment({p}, family, ens, opt) * exact_moment({q}, family, ens, opt);
}

/// The same covariance as one partition sum with the second-order entry weights.
inline cplx exact_tau2_direct(const Monomial& p, const Monomial& q, const DetFamily& family, const EnsembleMap& ens,
                              const OracleOptions& opt = {}) {
    if (p.degree() == 0 || q.degree() == 0) return 0.0;
    return partition_sum({p, q}, family, ens, 2, opt);
}

} // namespace wigcov
