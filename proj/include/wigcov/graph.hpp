#pragma once

// Labeled test graphs of trace products, vertex partitions and quotients, and the topological
// data of a quotient: two-edge-connected forests, the graph of deterministic components, pruning
// and the (q1, q2, q2') classification.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "error.hpp"
#include "words.hpp"

namespace wigcov {

inline std::pair<int, int> unordered_pair(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

struct GraphEdge {
    int src = 0;
    int trg = 0;
    bool is_x = false;
    int letter = 0; // global letter index k (1-based) over all monomials
    int cycle = 0;  // index of the monomial the edge comes from
};

/// Directed multigraph with X/A edge classes. Vertex v is named `names[v]`.
struct LabeledGraph {
    int num_vertices = 0;
    std::vector<GraphEdge> edges;
    std::vector<std::string> names;

    std::vector<const GraphEdge*> x_edges() const {
        std::vector<const GraphEdge*> out;
        for (const auto& e : edges)
            if (e.is_x) out.push_back(&e);
        return out;
    }
    int count_x() const {
        return static_cast<int>(std::count_if(edges.begin(), edges.end(), [](const GraphEdge& e) { return e.is_x; }));
    }
};

/// The cycle graph of monomials: for letter k (global, 1-based) vertices k and k', the X-edge
/// k' -> k and the A-edge (k+1) -> k', where k+1 wraps to the first letter of the same monomial.
/// Vertex 2(k-1) is k and vertex 2(k-1)+1 is k'. Degree-0 monomials contribute nothing.
struct CycleGraph {
    LabeledGraph graph;
    std::vector<int> wigner;            // wigner[k-1]
    std::vector<DetWord> det;           // det[k-1]
    std::vector<std::vector<int>> cycle_vertices;
    std::vector<int> vertex_cycle;
};

inline CycleGraph build_cycle_graph(const std::vector<Monomial>& monomials) {
    CycleGraph cg;
    int k0 = 0;
    for (std::size_t j = 0; j < monomials.size(); ++j) {
        const auto& p = monomials[j];
        const int deg = p.degree();
        cg.cycle_vertices.emplace_back();
        for (int t = 0; t < deg; ++t) {
            const int k = k0 + t + 1;
            const int v = 2 * (k - 1), vp = v + 1;
            cg.graph.names.push_back(std::to_string(k));
            cg.graph.names.push_back(std::to_string(k) + "'");
            cg.vertex_cycle.push_back(static_cast<int>(j));
            cg.vertex_cycle.push_back(static_cast<int>(j));
            cg.cycle_vertices.back().push_back(v);
            cg.cycle_vertices.back().push_back(vp);
            const int next = 2 * (k0 + (t + 1) % deg);
            cg.graph.edges.push_back({vp, v, true, k, static_cast<int>(j)});
            cg.graph.edges.push_back({next, vp, false, k, static_cast<int>(j)});
            cg.wigner.push_back(p.wigner[t]);
            cg.det.push_back(p.det[t]);
        }
        k0 += deg;
    }
    cg.graph.num_vertices = 2 * k0;
    return cg;
}

/// A set partition as block ids in restricted-growth form: block[v] <= 1 + max(block[0..v-1]).
struct Partition {
    std::vector<int> block;
    int num_blocks = 0;

    static Partition singletons(int n) {
        Partition p;
        p.block.resize(n);
        std::iota(p.block.begin(), p.block.end(), 0);
        p.num_blocks = n;
        return p;
    }

    /// From explicit blocks; vertices not mentioned become singletons.
    static Partition from_blocks(int n, const std::vector<std::vector<int>>& blocks) {
        std::vector<int> raw(n, -1);
        int b = 0;
        for (const auto& bl : blocks) {
            for (int v : bl) {
                require(v >= 0 && v < n && raw[v] < 0, "partition: blocks overlap or out of range");
                raw[v] = b;
            }
            ++b;
        }
        for (int v = 0; v < n; ++v)
            if (raw[v] < 0) raw[v] = b++;
        return normalize(raw);
    }

    static Partition normalize(const std::vector<int>& raw) {
        Partition p;
        std::map<int, int> ids;
        for (int r : raw) {
            auto [it, fresh] = ids.emplace(r, static_cast<int>(ids.size()));
            p.block.push_back(it->second);
        }
        p.num_blocks = static_cast<int>(ids.size());
        return p;
    }

    std::vector<std::vector<int>> blocks() const {
        std::vector<std::vector<int>> out(num_blocks);
        for (int v = 0; v < static_cast<int>(block.size()); ++v) out[block[v]].push_back(v);
        return out;
    }

    std::string to_string(const std::vector<std::string>& names = {}) const {
        std::string s = "{";
        bool first_block = true;
        for (const auto& b : blocks()) {
            s += first_block ? "{" : ", {";
            first_block = false;
            for (std::size_t t = 0; t < b.size(); ++t)
                s += (t ? "," : "") + (names.empty() ? std::to_string(b[t]) : names[b[t]]);
            s += "}";
        }
        return s + "}";
    }
};

inline constexpr int kDefaultPartitionCap = 10;

/// Visits every set partition of [n] in restricted-growth order.
inline void for_each_partition(int n, const std::function<void(const Partition&)>& visit, int cap = kDefaultPartitionCap) {
    if (n < 0) throw Error("for_each_partition: negative size");
    if (n > cap) throw CapExceeded("for_each_partition: " + std::to_string(n) + " vertices exceed the partition cap");
    Partition p;
    p.block.assign(n, 0);
    if (n == 0) {
        visit(p);
        return;
    }
    std::function<void(int, int)> rec = [&](int v, int used) {
        if (v == n) {
            p.num_blocks = used;
            visit(p);
            return;
        }
        for (int b = 0; b <= used; ++b) {
            p.block[v] = b;
            rec(v + 1, std::max(used, b + 1));
        }
    };
    p.block[0] = 0;
    rec(1, 1);
}

inline std::uint64_t bell_number(int n) {
    std::vector<std::uint64_t> row{1};
    for (int i = 0; i < n; ++i) {
        std::vector<std::uint64_t> next{row.back()};
        for (auto v : row) next.push_back(next.back() + v);
        row = std::move(next);
    }
    return row.front();
}

/// Identifies the vertices within each block; edges keep labels and classes.
inline LabeledGraph quotient(const LabeledGraph& g, const Partition& pi) {
    require(static_cast<int>(pi.block.size()) == g.num_vertices, "quotient: partition size differs from vertex count");
    LabeledGraph q;
    q.num_vertices = pi.num_blocks;
    q.names.assign(pi.num_blocks, "");
    for (int v = 0; v < g.num_vertices; ++v) {
        auto& nm = q.names[pi.block[v]];
        nm += (nm.empty() ? "" : "~") + (g.names.empty() ? std::to_string(v) : g.names[v]);
    }
    for (auto e : g.edges) {
        e.src = pi.block[e.src];
        e.trg = pi.block[e.trg];
        q.edges.push_back(e);
    }
    return q;
}

/// Subgraph with only the A-edges (or only the X-edges); all vertices kept.
inline LabeledGraph edge_class(const LabeledGraph& g, bool x) {
    LabeledGraph s;
    s.num_vertices = g.num_vertices;
    s.names = g.names;
    for (const auto& e : g.edges)
        if (e.is_x == x) s.edges.push_back(e);
    return s;
}

/// Undirected multigraph view used by the topological routines.
struct UGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;

    static UGraph of(const LabeledGraph& g) {
        UGraph u;
        u.n = g.num_vertices;
        for (const auto& e : g.edges) u.edges.emplace_back(e.src, e.trg);
        return u;
    }
};

/// Connected component id of each vertex; returns the number of components.
inline int connected_components(const UGraph& g, std::vector<int>& comp) {
    std::vector<int> parent(g.n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
    for (auto [a, b] : g.edges) parent[find(a)] = find(b);
    comp.assign(g.n, -1);
    std::map<int, int> ids;
    for (int v = 0; v < g.n; ++v) comp[v] = ids.emplace(find(v), static_cast<int>(ids.size())).first->second;
    return static_cast<int>(ids.size());
}

/// Ids of the cutting edges (bridges). Parallel edges and loops are never bridges.
inline std::vector<int> bridges(const UGraph& g) {
    std::vector<std::vector<std::pair<int, int>>> adj(g.n);
    for (int id = 0; id < static_cast<int>(g.edges.size()); ++id) {
        auto [a, b] = g.edges[id];
        if (a == b) continue;
        adj[a].emplace_back(b, id);
        adj[b].emplace_back(a, id);
    }
    std::vector<int> tin(g.n, -1), low(g.n, 0), out;
    int timer = 0;
    std::function<void(int, int)> dfs = [&](int v, int parent_edge) {
        tin[v] = low[v] = timer++;
        for (auto [w, id] : adj[v]) {
            if (id == parent_edge) continue;
            if (tin[w] >= 0) {
                low[v] = std::min(low[v], tin[w]);
            } else {
                dfs(w, id);
                low[v] = std::min(low[v], low[w]);
                if (low[w] > tin[v]) out.push_back(id);
            }
        }
    };
    for (int v = 0; v < g.n; ++v)
        if (tin[v] < 0) dfs(v, -1);
    std::sort(out.begin(), out.end());
    return out;
}

/// Forest of two-edge-connected components: `tecc[v]` is the component of vertex v; forest edges
/// are the bridges between components.
struct TeccForest {
    std::vector<int> tecc;
    int num_nodes = 0;
    std::vector<std::pair<int, int>> edges;
};

inline TeccForest tecc_forest(const UGraph& g) {
    const auto br = bridges(g);
    std::set<int> bset(br.begin(), br.end());
    UGraph reduced;
    reduced.n = g.n;
    for (int id = 0; id < static_cast<int>(g.edges.size()); ++id)
        if (!bset.count(id)) reduced.edges.push_back(g.edges[id]);
    TeccForest f;
    f.num_nodes = connected_components(reduced, f.tecc);
    for (int id : br) f.edges.emplace_back(f.tecc[g.edges[id].first], f.tecc[g.edges[id].second]);
    return f;
}

/// Number of leaves of the forest of two-edge-connected components; a tree with a single node
/// (including an isolated vertex) counts as two leaves.
inline int leaves_count(const UGraph& g) {
    const auto f = tecc_forest(g);
    UGraph fg;
    fg.n = f.num_nodes;
    fg.edges = f.edges;
    std::vector<int> comp;
    const int trees = connected_components(fg, comp);
    std::vector<int> deg(f.num_nodes, 0), size(trees, 0), leaves(trees, 0);
    for (auto [a, b] : f.edges) {
        ++deg[a];
        ++deg[b];
    }
    for (int v = 0; v < f.num_nodes; ++v) {
        ++size[comp[v]];
        if (deg[v] == 1) ++leaves[comp[v]];
    }
    int total = 0;
    for (int t = 0; t < trees; ++t) total += size[t] == 1 ? 2 : leaves[t];
    return total;
}

inline int leaves_count(const LabeledGraph& g) { return leaves_count(UGraph::of(g)); }

/// True iff the graph is connected and acyclic (loops and parallel edges are cycles).
inline bool is_tree(const UGraph& g) {
    if (g.n == 0) return false;
    std::vector<int> parent(g.n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };
    for (auto [a, b] : g.edges) {
        const int ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent[ra] = rb;
    }
    std::vector<int> comp;
    return connected_components(g, comp) == 1;
}

/// Graph of deterministic components of a quotient, with X-edge multiplicity forgotten: vertices
/// 0..|V|-1 are the quotient's vertices, |V|..|V|+|C_A|-1 the components of its A-subgraph.
struct Gdc {
    UGraph graph;
    int num_plain = 0;
    std::vector<int> a_component; // A-component id of each quotient vertex
    int num_a_components = 0;
};

inline Gdc gdc(const LabeledGraph& tq) {
    Gdc out;
    out.num_plain = tq.num_vertices;
    out.num_a_components = connected_components(UGraph::of(edge_class(tq, false)), out.a_component);
    out.graph.n = tq.num_vertices + out.num_a_components;
    std::set<std::pair<int, int>> seen;
    for (const auto& e : tq.edges) {
        if (!e.is_x) continue;
        const auto key = unordered_pair(e.src, e.trg);
        if (seen.insert(key).second) out.graph.edges.push_back(key);
    }
    for (int v = 0; v < tq.num_vertices; ++v) out.graph.edges.emplace_back(v, tq.num_vertices + out.a_component[v]);
    return out;
}

/// Repeatedly deletes every vertex of degree <= 1 (all current leaves at once) until none is
/// left. Returns the surviving vertex mask; a tree prunes to nothing.
inline std::vector<bool> prune(const UGraph& g) {
    std::vector<bool> alive(g.n, true);
    for (;;) {
        std::vector<int> deg(g.n, 0);
        for (auto [a, b] : g.edges)
            if (alive[a] && alive[b]) {
                ++deg[a];
                ++deg[b];
            }
        bool changed = false;
        for (int v = 0; v < g.n; ++v)
            if (alive[v] && deg[v] <= 1) {
                alive[v] = false;
                changed = true;
            }
        if (!changed) return alive;
    }
}

enum class QuotientType { DoubleTree, DoubleUnicyclic, TwoFourTree, Other };

inline std::string to_string(QuotientType t) {
    switch (t) {
    case QuotientType::DoubleTree: return "double_tree";
    case QuotientType::DoubleUnicyclic: return "double_unicyclic";
    case QuotientType::TwoFourTree: return "two_four_tree";
    default: return "other";
    }
}

/// Orientation of the twin X-edges left on the cycle of a double unicyclic component.
enum class CycleTwins { None, Opposite, Parallel, Loop, Mixed };

inline std::string to_string(CycleTwins t) {
    switch (t) {
    case CycleTwins::Opposite: return "opposite";
    case CycleTwins::Parallel: return "parallel";
    case CycleTwins::Loop: return "loop";
    case CycleTwins::Mixed: return "mixed";
    default: return "";
    }
}

struct ComponentReport {
    std::vector<int> vertices;
    double q1 = 0, q2 = 0, q2p = 0;
    int leaves = 0;                 // f of the A-subgraph restricted to the component
    int a_components = 0;
    std::vector<int> multiplicities; // sorted X multiplicities by unordered vertex pair
    bool gdc_tree = false;
    QuotientType type = QuotientType::Other;
    CycleTwins twins = CycleTwins::None;
    bool has_single_x_edge = false;
};

struct TopoReport {
    std::vector<ComponentReport> components;
    double q = 0;
    int leaves = 0;
    int x_edges = 0;

    bool valid() const {
        return !components.empty() && std::all_of(components.begin(), components.end(), [](const ComponentReport& c) {
            return c.type == QuotientType::DoubleUnicyclic || c.type == QuotientType::TwoFourTree;
        });
    }
};

/// Per-component (q1, q2, q2'), multiplicities and type of a quotient of a cycle graph.
inline TopoReport classify(const LabeledGraph& tq) {
    TopoReport rep;
    std::vector<int> comp;
    const int nc = connected_components(UGraph::of(tq), comp);
    const Gdc g = gdc(tq);
    const LabeledGraph ta = edge_class(tq, false);
    rep.x_edges = tq.count_x();
    rep.components.resize(nc);
    for (int v = 0; v < tq.num_vertices; ++v) rep.components[comp[v]].vertices.push_back(v);

    std::vector<std::map<std::pair<int, int>, int>> groups(nc);
    std::vector<int> xcount(nc, 0);
    for (const auto& e : tq.edges)
        if (e.is_x) {
            ++groups[comp[e.src]][unordered_pair(e.src, e.trg)];
            ++xcount[comp[e.src]];
        }

    for (int i = 0; i < nc; ++i) {
        auto& c = rep.components[i];
        std::set<int> acomps;
        for (int v : c.vertices) acomps.insert(g.a_component[v]);
        c.a_components = static_cast<int>(acomps.size());
        for (const auto& [k, mult] : groups[i]) c.multiplicities.push_back(mult);
        std::sort(c.multiplicities.begin(), c.multiplicities.end());
        c.has_single_x_edge = !c.multiplicities.empty() && c.multiplicities.front() == 1;
        const int distinct = static_cast<int>(groups[i].size());
        c.q1 = distinct - xcount[i] / 2.0;
        c.q2 = static_cast<double>(c.a_components) - distinct;

        // Restrict the A-subgraph and the GDC to this component.
        std::map<int, int> local;
        for (int v : c.vertices) local.emplace(v, static_cast<int>(local.size()));
        UGraph a_local;
        a_local.n = static_cast<int>(local.size());
        for (const auto& e : ta.edges)
            if (comp[e.src] == i) a_local.edges.emplace_back(local.at(e.src), local.at(e.trg));
        c.leaves = leaves_count(a_local);
        c.q2p = c.leaves / 2.0 - c.a_components;

        std::map<int, int> glocal;
        for (int v : c.vertices) glocal.emplace(v, static_cast<int>(glocal.size()));
        for (int a : acomps) glocal.emplace(g.num_plain + a, static_cast<int>(glocal.size()));
        UGraph gl;
        gl.n = static_cast<int>(glocal.size());
        for (auto [a, b] : g.graph.edges)
            if (glocal.count(a)) gl.edges.emplace_back(glocal.at(a), glocal.at(b));
        c.gdc_tree = is_tree(gl);

        const bool all_two = std::all_of(c.multiplicities.begin(), c.multiplicities.end(), [](int m) { return m == 2; });
        const int fours = static_cast<int>(std::count(c.multiplicities.begin(), c.multiplicities.end(), 4));
        const int twos = static_cast<int>(std::count(c.multiplicities.begin(), c.multiplicities.end(), 2));
        if (c.q1 == 0 && c.q2 == 1 && all_two)
            c.type = QuotientType::DoubleTree;
        else if (c.q1 == 0 && c.q2 == 0 && all_two)
            c.type = QuotientType::DoubleUnicyclic;
        else if (c.q1 == -1 && c.q2 == 1 && fours == 1 && twos + 1 == static_cast<int>(c.multiplicities.size()))
            c.type = QuotientType::TwoFourTree;

        if (c.type == QuotientType::DoubleUnicyclic) {
            const auto alive = prune(gl);
            bool opp = false, par = false, loop = false;
            for (const auto& [key, mult] : groups[i]) {
                if (!alive[glocal.at(key.first)] || !alive[glocal.at(key.second)]) continue;
                if (key.first == key.second) {
                    loop = true;
                    continue;
                }
                std::vector<int> dirs;
                for (const auto& e : tq.edges)
                    if (e.is_x && unordered_pair(e.src, e.trg) == key) dirs.push_back(e.src == key.first);
                (dirs[0] == dirs[1] ? par : opp) = true;
            }
            c.twins = loop ? (opp || par ? CycleTwins::Mixed : CycleTwins::Loop)
                           : (opp && par ? CycleTwins::Mixed : opp ? CycleTwins::Opposite : CycleTwins::Parallel);
        }

        rep.q += c.q1 + c.q2 + c.q2p;
        rep.leaves += c.leaves;
    }
    return rep;
}

/// Pairing of the X-edges (by letter index) induced by a quotient: twin edges are paired, and a
/// multiplicity-4 group is split into the two cross-cycle pairs of opposite orientation. Empty if
/// the quotient has other multiplicities or the split is not unique.
inline std::vector<int> twin_pairing(const LabeledGraph& tq) {
    std::map<std::pair<int, int>, std::vector<const GraphEdge*>> groups;
    int max_letter = 0;
    for (const auto& e : tq.edges)
        if (e.is_x) {
            groups[unordered_pair(e.src, e.trg)].push_back(&e);
            max_letter = std::max(max_letter, e.letter);
        }
    std::vector<int> match(max_letter, 0);
    auto pair_up = [&](const GraphEdge* a, const GraphEdge* b) {
        match[a->letter - 1] = b->letter;
        match[b->letter - 1] = a->letter;
    };
    for (const auto& [key, es] : groups) {
        if (es.size() == 2) {
            pair_up(es[0], es[1]);
        } else if (es.size() == 4) {
            const GraphEdge* first = es[0];
            std::vector<const GraphEdge*> candidates;
            for (const auto* e : es)
                if (e != first && e->cycle != first->cycle && e->src == first->trg && e->trg == first->src) candidates.push_back(e);
            if (candidates.size() != 1 || key.first == key.second) return {};
            std::vector<const GraphEdge*> rest;
            for (const auto* e : es)
                if (e != first && e != candidates[0]) rest.push_back(e);
            if (rest[0]->cycle == rest[1]->cycle || rest[0]->src != rest[1]->trg) return {};
            pair_up(first, candidates[0]);
            pair_up(rest[0], rest[1]);
        } else {
            return {};
        }
    }
    return match;
}

} // namespace wigcov
