#pragma once

// The functionals phi, phi_o (Hadamard) and phi_t (transpose) on deterministic words, and the
// products phi_K / phi~_K over the cycles of a Kreweras complement.

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "families.hpp"
#include "nc_annulus.hpp"
#include "numeric.hpp"
#include "words.hpp"

namespace wigcov {

class LimitState {
public:
    virtual ~LimitState() = default;

    /// phi(w)
    virtual cplx phi(const DetWord& w) const = 0;
    /// phi(p o q)
    virtual cplx phi_hadamard(const DetWord& p, const DetWord& q) const = 0;
    /// phi(p q^t)
    virtual cplx phi_transpose(const DetWord& p, const DetWord& q) const { return phi(concat(p, transpose(q))); }
};

/// Normalized traces of a concrete family at its dimension N.
class FiniteNState final : public LimitState {
public:
    explicit FiniteNState(DetFamily family) : family_(std::move(family)), cache_(std::make_shared<Cache>()) {}

    const DetFamily& family() const noexcept { return family_; }
    int dim() const noexcept { return family_.dim(); }

    Matrix eval_word(const DetWord& w) const { return family_.word_matrix(w); }

    cplx phi(const DetWord& w) const override {
        if (w.empty()) return 1.0;
        const std::string key = to_string(w);
        {
            std::lock_guard lock(cache_->mutex);
            if (auto it = cache_->phi.find(key); it != cache_->phi.end()) return it->second;
        }
        const cplx v = trace_of_product(w) / static_cast<double>(dim());
        std::lock_guard lock(cache_->mutex);
        cache_->phi.emplace(key, v);
        return v;
    }

    cplx phi_hadamard(const DetWord& p, const DetWord& q) const override {
        const Matrix pm = product(p), qm = product(q);
        return (pm.diagonal().array() * qm.diagonal().array()).sum() / static_cast<double>(dim());
    }

    cplx phi_transpose(const DetWord& p, const DetWord& q) const override {
        const Matrix pm = product(p), qm = product(q);
        return (pm.array() * qm.array()).sum() / static_cast<double>(dim());
    }

private:
    struct Cache {
        std::mutex mutex;
        std::map<std::string, cplx> phi;
    };

    Matrix product(const DetWord& w) const {
        Matrix m = Matrix::Identity(dim(), dim());
        for (const auto& l : w) m = family_.word({l}).left_multiply(m);
        return m;
    }

    // Tr(L1 ... Lk) with the last factor folded into an entry-wise sum.
    cplx trace_of_product(const DetWord& w) const {
        if (w.size() == 1) return family_.word(w).dense.trace();
        const DetWord head(w.begin(), w.end() - 1);
        const Matrix pm = product(head);
        const Matrix& last = family_.word({w.back()}).dense;
        return (pm.array() * last.transpose().array()).sum();
    }

    DetFamily family_;
    std::shared_ptr<Cache> cache_;
};

/// User-supplied tables. phi keys are invariant under cyclic rotation and transposition;
/// phi_o keys under swapping the arguments and transposing either one. A missing entry throws.
class SymbolicState final : public LimitState {
public:
    static std::string phi_key(const DetWord& w) {
        std::string best;
        bool first = true;
        for (const DetWord& v : {w, transpose(w)}) {
            for (std::size_t r = 0; r < v.size(); ++r) {
                DetWord rot = v;
                std::rotate(rot.begin(), rot.begin() + static_cast<std::ptrdiff_t>(r), rot.end());
                std::string s = to_string(rot);
                if (first || s < best) best = std::move(s);
                first = false;
            }
        }
        return first ? to_string(w) : best;
    }

    static std::string hadamard_key(const DetWord& p, const DetWord& q) {
        auto norm = [](const DetWord& w) { return std::min(to_string(w), to_string(transpose(w))); };
        std::string a = norm(p), b = norm(q);
        if (b < a) std::swap(a, b);
        return a + " | " + b;
    }

    void set_phi(const DetWord& w, cplx v) { phi_[phi_key(w)] = v; }
    void set_hadamard(const DetWord& p, const DetWord& q, cplx v) { hadamard_[hadamard_key(p, q)] = v; }

    cplx phi(const DetWord& w) const override {
        if (w.empty()) return 1.0;
        auto it = phi_.find(phi_key(w));
        if (it == phi_.end()) throw Error("symbolic state: no value for phi(" + to_string(w) + ")");
        return it->second;
    }

    cplx phi_hadamard(const DetWord& p, const DetWord& q) const override {
        if (p.empty()) return phi(q);
        if (q.empty()) return phi(p);
        auto it = hadamard_.find(hadamard_key(p, q));
        if (it == hadamard_.end())
            throw Error("symbolic state: no value for phi_o(" + to_string(p) + ", " + to_string(q) + ")");
        return it->second;
    }

private:
    std::map<std::string, cplx> phi_;
    std::map<std::string, cplx> hadamard_;
};

/// One factor of phi_K or phi~_K. `first`/`second` list the annulus positions whose letters are
/// multiplied, in cycle order; `second` is used only by Hadamard factors.
struct Factor {
    enum class Kind { Phi, Hadamard };
    Kind kind = Kind::Phi;
    std::vector<int> first;
    std::vector<int> second;

    std::string to_string() const {
        auto list = [](const std::vector<int>& v) {
            std::string s;
            for (std::size_t k = 0; k < v.size(); ++k) s += (k ? " " : "") + ("a" + std::to_string(v[k]));
            return s;
        };
        if (kind == Kind::Phi) return "phi(" + list(first) + ")";
        return "phi_o(" + list(first) + ", " + list(second) + ")";
    }
};

inline std::vector<Factor> phi_K_factors(const CyclePermutation& k) {
    std::vector<Factor> out;
    for (const auto& c : k.cycles()) out.push_back({Factor::Kind::Phi, c, {}});
    return out;
}

/// Through cycles of K(s) become phi_o(outer segment, inner segment); needs 1 or 2 through strings.
inline std::vector<Factor> phi_tilde_K_factors(const AnnularPairing& s) {
    const int l = s.through_count();
    if (l != 1 && l != 2) throw Error("phi_tilde_K: pairing must have one or two through strings");
    const CyclePermutation k = kreweras(s);
    std::vector<Factor> out;
    for (const auto& c : k.cycles()) {
        const bool outer = std::any_of(c.begin(), c.end(), [&](int v) { return v <= s.m(); });
        const bool inner = std::any_of(c.begin(), c.end(), [&](int v) { return v > s.m(); });
        if (!(outer && inner)) out.push_back({Factor::Kind::Phi, c, {}});
    }
    for (auto& tc : through_cycles(k, s.m(), s.n())) out.push_back({Factor::Kind::Hadamard, tc.outer, tc.inner});
    return out;
}

inline DetWord gather(const std::vector<int>& positions, const std::vector<DetWord>& letters) {
    DetWord w;
    for (int p : positions) w.insert(w.end(), letters.at(p - 1).begin(), letters.at(p - 1).end());
    return w;
}

inline cplx eval_factors(const std::vector<Factor>& factors, const std::vector<DetWord>& letters, const LimitState& st) {
    cplx v = 1.0;
    for (const auto& f : factors) {
        if (f.kind == Factor::Kind::Phi)
            v *= st.phi(gather(f.first, letters));
        else
            v *= st.phi_hadamard(gather(f.first, letters), gather(f.second, letters));
    }
    return v;
}

inline cplx eval_phi_K(const CyclePermutation& k, const std::vector<DetWord>& letters, const LimitState& st) {
    require(static_cast<int>(letters.size()) == k.size(), "eval_phi_K: letters length must match the permutation");
    return eval_factors(phi_K_factors(k), letters, st);
}

inline cplx eval_phi_K(const AnnularPairing& s, const std::vector<DetWord>& letters, const LimitState& st) {
    return eval_phi_K(kreweras(s), letters, st);
}

inline cplx eval_phi_tilde_K(const AnnularPairing& s, const std::vector<DetWord>& letters, const LimitState& st) {
    require(static_cast<int>(letters.size()) == s.size(), "eval_phi_tilde_K: letters length must be m+n");
    return eval_factors(phi_tilde_K_factors(s), letters, st);
}

} // namespace wigcov
