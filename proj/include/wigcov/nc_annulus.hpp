#pragma once

// Annular non-crossing pairings NC2(m,n), the Kreweras complement K(s) = s o gamma_{m,n},
// and the disc pairings NC2(k) used for first-order moments.
//
// Positions are 1-based everywhere: 1..m on the outer circle, m+1..m+n on the inner one.

#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace wigcov {

/// A permutation of [size] held both as a point map and as its cycle decomposition.
class CyclePermutation {
public:
    CyclePermutation() = default;

    /// `image[i-1]` is the image of point i.
    static CyclePermutation from_map(std::vector<int> image) {
        const int size = static_cast<int>(image.size());
        std::vector<char> seen(image.size(), 0);
        for (int v : image) {
            require(v >= 1 && v <= size && !seen[v - 1], "CyclePermutation: map is not a bijection");
            seen[v - 1] = 1;
        }
        CyclePermutation p;
        p.map_ = std::move(image);
        std::fill(seen.begin(), seen.end(), 0);
        for (int start = 1; start <= size; ++start) {
            if (seen[start - 1]) continue;
            std::vector<int> cycle;
            for (int i = start; !seen[i - 1]; i = p.map_[i - 1]) {
                seen[i - 1] = 1;
                cycle.push_back(i);
            }
            p.cycles_.push_back(std::move(cycle));
        }
        return p;
    }

    static CyclePermutation from_cycles(int size, const std::vector<std::vector<int>>& cycles) {
        std::vector<int> image(size, 0);
        for (const auto& c : cycles) {
            for (std::size_t k = 0; k < c.size(); ++k) {
                const int from = c[k];
                require(from >= 1 && from <= size && image[from - 1] == 0,
                        "CyclePermutation: cycles do not partition [size]");
                image[from - 1] = c[(k + 1) % c.size()];
            }
        }
        for (int i = 0; i < size; ++i)
            if (image[i] == 0) image[i] = i + 1;
        return from_map(std::move(image));
    }

    int size() const noexcept { return static_cast<int>(map_.size()); }
    int operator()(int i) const { return map_[i - 1]; }
    const std::vector<int>& map() const noexcept { return map_; }
    const std::vector<std::vector<int>>& cycles() const noexcept { return cycles_; }
    int num_cycles() const noexcept { return static_cast<int>(cycles_.size()); }

    /// Cycles rotated to start at their minimum, sorted by that minimum.
    std::vector<std::vector<int>> canonical_cycles() const {
        auto out = cycles_;
        for (auto& c : out) std::rotate(c.begin(), std::min_element(c.begin(), c.end()), c.end());
        std::sort(out.begin(), out.end());
        return out;
    }

    friend bool operator==(const CyclePermutation& a, const CyclePermutation& b) { return a.map_ == b.map_; }

    std::string to_string() const {
        std::ostringstream os;
        for (const auto& c : cycles_) {
            os << '(';
            for (std::size_t k = 0; k < c.size(); ++k) os << (k ? "," : "") << c[k];
            os << ')';
        }
        return os.str();
    }

private:
    std::vector<int> map_;
    std::vector<std::vector<int>> cycles_;
};

/// (a o b)(i) = a(b(i)).
inline CyclePermutation compose(const CyclePermutation& a, const CyclePermutation& b) {
    require(a.size() == b.size(), "compose: size mismatch");
    std::vector<int> image(a.size());
    for (int i = 1; i <= a.size(); ++i) image[i - 1] = a(b(i));
    return CyclePermutation::from_map(std::move(image));
}

/// gamma_{m,n} = (1,...,m)(m+1,...,m+n).
inline CyclePermutation gamma(int m, int n) {
    if (m < 1 || n < 1) throw Error("gamma: m and n must be positive");
    std::vector<int> image(m + n);
    for (int i = 1; i <= m; ++i) image[i - 1] = i == m ? 1 : i + 1;
    for (int i = m + 1; i <= m + n; ++i) image[i - 1] = i == m + n ? m + 1 : i + 1;
    return CyclePermutation::from_map(std::move(image));
}

/// The single-cycle gamma_k = (1,...,k) of the disc.
inline CyclePermutation gamma_disc(int k) {
    std::vector<int> image(k);
    for (int i = 1; i <= k; ++i) image[i - 1] = i == k ? 1 : i + 1;
    return CyclePermutation::from_map(std::move(image));
}

namespace detail {

inline void check_candidate(const std::vector<int>& match, int m, int n) {
    if (m < 1 || n < 1) throw Error("annular pairing: m and n must be positive");
    if (static_cast<int>(match.size()) != m + n) throw Error("annular pairing: match must have length m+n");
    int through = 0;
    for (int i = 1; i <= m + n; ++i) {
        const int j = match[i - 1];
        if (j < 1 || j > m + n || j == i || match[j - 1] != i)
            throw Error("annular pairing: not a fixed-point-free involution");
        if (i <= m && j > m) ++through;
    }
    if (through == 0) throw Error("annular pairing: no through string");
}

inline int count_cycles_of_involution_times_gamma(const std::vector<int>& match, const CyclePermutation& g) {
    std::vector<int> image(match.size());
    for (int i = 1; i <= static_cast<int>(match.size()); ++i) image[i - 1] = match[g(i) - 1];
    return CyclePermutation::from_map(std::move(image)).num_cycles();
}

} // namespace detail

/// Non-crossing test by successive removal of adjacent same-circle pairs down to a spoke diagram.
/// Throws for candidates that are not fixed-point-free involutions with a through string.
inline bool is_annular_noncrossing(const std::vector<int>& match, int m, int n) {
    detail::check_candidate(match, m, n);
    std::vector<int> outer(m), inner(n);
    std::iota(outer.begin(), outer.end(), 1);
    std::iota(inner.begin(), inner.end(), m + 1);

    auto remove_adjacent = [&](std::vector<int>& circle) {
        const std::size_t s = circle.size();
        if (s < 2) return false;
        for (std::size_t t = 0; t < s; ++t) {
            const int a = circle[t];
            const int b = circle[(t + 1) % s];
            if (match[a - 1] == b) {
                circle.erase(std::remove_if(circle.begin(), circle.end(), [&](int v) { return v == a || v == b; }),
                             circle.end());
                return true;
            }
        }
        return false;
    };

    for (;;) {
        const bool all_through = std::all_of(outer.begin(), outer.end(), [&](int v) { return match[v - 1] > m; }) &&
                                 std::all_of(inner.begin(), inner.end(), [&](int v) { return match[v - 1] <= m; });
        if (all_through) break;
        if (!remove_adjacent(outer) && !remove_adjacent(inner)) return false;
    }
    // Every remaining outer point carries a through string, so the inner circle has the same size.
    const int k = static_cast<int>(outer.size());
    if (static_cast<int>(inner.size()) != k) return false;
    auto inner_index = [&](int pos) {
        return static_cast<int>(std::find(inner.begin(), inner.end(), pos) - inner.begin());
    };
    const int offset = inner_index(match[outer[0] - 1]);
    for (int j = 0; j < k; ++j) {
        if (inner_index(match[outer[j] - 1]) != ((offset - j) % k + k) % k) return false;
    }
    return true;
}

/// Independent route: #cycles(s) + #cycles(s o gamma) == m + n.
inline bool satisfies_annular_cycle_count(const std::vector<int>& match, int m, int n) {
    detail::check_candidate(match, m, n);
    const int pairs = (m + n) / 2;
    return pairs + detail::count_cycles_of_involution_times_gamma(match, gamma(m, n)) == m + n;
}

/// A non-crossing pairing of an (m,n)-annulus with at least one through string.
class AnnularPairing {
public:
    AnnularPairing(int m, int n, std::vector<int> match) : m_(m), n_(n), match_(std::move(match)) {
        if (!is_annular_noncrossing(match_, m_, n_)) throw Error("annular pairing: crossing pairing");
    }

    static AnnularPairing from_pairs(int m, int n, const std::vector<std::pair<int, int>>& pairs) {
        std::vector<int> match(static_cast<std::size_t>(m + n), 0);
        for (auto [a, b] : pairs) {
            require(a >= 1 && b >= 1 && a <= m + n && b <= m + n, "annular pairing: position out of range");
            require(match[a - 1] == 0 && match[b - 1] == 0, "annular pairing: position paired twice");
            match[a - 1] = b;
            match[b - 1] = a;
        }
        return AnnularPairing(m, n, std::move(match));
    }

    int m() const noexcept { return m_; }
    int n() const noexcept { return n_; }
    int size() const noexcept { return m_ + n_; }
    int partner(int i) const { return match_[i - 1]; }
    const std::vector<int>& match() const noexcept { return match_; }
    bool is_outer(int i) const noexcept { return i <= m_; }

    CyclePermutation as_permutation() const { return CyclePermutation::from_map(match_); }

    /// Pairs {i,j} with i <= m < j, ordered by i.
    std::vector<std::pair<int, int>> through_strings() const {
        std::vector<std::pair<int, int>> out;
        for (int i = 1; i <= m_; ++i)
            if (match_[i - 1] > m_) out.emplace_back(i, match_[i - 1]);
        return out;
    }

    int through_count() const { return static_cast<int>(through_strings().size()); }

    std::string to_string() const {
        std::ostringstream os;
        for (int i = 1; i <= size(); ++i)
            if (i < match_[i - 1]) os << '(' << i << ',' << match_[i - 1] << ')';
        return os.str();
    }

    friend bool operator==(const AnnularPairing& a, const AnnularPairing& b) {
        return a.m_ == b.m_ && a.n_ == b.n_ && a.match_ == b.match_;
    }

private:
    int m_, n_;
    std::vector<int> match_;
};

inline constexpr int kDefaultPairingCap = 16;

namespace detail {

// Visits every perfect matching of [size] (1-based match arrays) in lexicographic order.
template <typename Visit>
void for_each_matching(int size, Visit&& visit) {
    std::vector<int> match(static_cast<std::size_t>(size), 0);
    auto rec = [&](auto&& self) -> void {
        int first = 0;
        for (int i = 1; i <= size; ++i)
            if (match[i - 1] == 0) {
                first = i;
                break;
            }
        if (first == 0) {
            visit(match);
            return;
        }
        for (int j = first + 1; j <= size; ++j) {
            if (match[j - 1] != 0) continue;
            match[first - 1] = j;
            match[j - 1] = first;
            self(self);
            match[first - 1] = 0;
            match[j - 1] = 0;
        }
    };
    rec(rec);
}

} // namespace detail

/// NC2(m,n) in lexicographic order of match arrays. Empty when m+n is odd.
inline std::vector<AnnularPairing> enumerate_nc2(int m, int n, int cap = kDefaultPairingCap) {
    if (m < 1 || n < 1) throw Error("enumerate_nc2: m and n must be positive");
    if (m + n > cap) throw CapExceeded("enumerate_nc2: m+n exceeds the configured limit");
    std::vector<AnnularPairing> out;
    if ((m + n) % 2 != 0) return out;
    detail::for_each_matching(m + n, [&](const std::vector<int>& match) {
        bool through = false;
        for (int i = 1; i <= m && !through; ++i) through = match[i - 1] > m;
        if (through && satisfies_annular_cycle_count(match, m, n)) out.emplace_back(m, n, match);
    });
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.match() < b.match(); });
    return out;
}

/// NC2^{(l)}(m,n) selected from a list.
inline std::vector<AnnularPairing> filter_by_through(const std::vector<AnnularPairing>& all, int through) {
    std::vector<AnnularPairing> out;
    std::copy_if(all.begin(), all.end(), std::back_inserter(out),
                 [&](const AnnularPairing& p) { return p.through_count() == through; });
    return out;
}

/// K(s) = s o gamma_{m,n}.
inline CyclePermutation kreweras(const AnnularPairing& p) {
    return compose(p.as_permutation(), gamma(p.m(), p.n()));
}

struct ThroughCycle {
    std::vector<int> outer; // positions in [m], in cycle order
    std::vector<int> inner; // positions in [m+1, m+n], in cycle order
};

/// Cycles of K(s) meeting both circles, rotated so the outer segment comes first.
/// Throws if a through cycle alternates between the circles more than once.
inline std::vector<ThroughCycle> through_cycles(const CyclePermutation& k, int m, int n) {
    require(k.size() == m + n, "through_cycles: size mismatch");
    std::vector<ThroughCycle> out;
    for (const auto& c : k.cycles()) {
        const std::size_t len = c.size();
        std::size_t outer_count = 0;
        for (int v : c) outer_count += v <= m ? 1 : 0;
        if (outer_count == 0 || outer_count == len) continue;
        std::size_t start = 0;
        for (std::size_t t = 0; t < len; ++t) {
            if (c[t] <= m && c[(t + len - 1) % len] > m) {
                start = t;
                break;
            }
        }
        ThroughCycle tc;
        std::size_t t = 0;
        for (; t < len && c[(start + t) % len] <= m; ++t) tc.outer.push_back(c[(start + t) % len]);
        for (; t < len; ++t) {
            const int v = c[(start + t) % len];
            if (v <= m) throw Error("through_cycles: cycle crosses between circles more than twice");
            tc.inner.push_back(v);
        }
        out.push_back(std::move(tc));
    }
    return out;
}

/// labels[i-1] is the Wigner id at position i. With `strict_through_same`, every position on a
/// through string must also carry one common label.
template <typename Label>
bool is_non_mixing(const AnnularPairing& p, const std::vector<Label>& labels, bool strict_through_same) {
    require(static_cast<int>(labels.size()) == p.size(), "is_non_mixing: labels length must be m+n");
    for (int i = 1; i <= p.size(); ++i)
        if (!(labels[i - 1] == labels[p.partner(i) - 1])) return false;
    if (strict_through_same) {
        const auto ts = p.through_strings();
        for (const auto& [a, b] : ts)
            if (!(labels[a - 1] == labels[ts.front().first - 1]) || !(labels[b - 1] == labels[ts.front().first - 1]))
                return false;
    }
    return true;
}

inline constexpr int kDefaultDiscCap = 20;

/// Non-crossing pairings of a single k-cycle, as 1-based match arrays in lexicographic order.
inline std::vector<std::vector<int>> enumerate_nc2_disc(int k, int cap = kDefaultDiscCap) {
    if (k < 0) throw Error("enumerate_nc2_disc: k must be non-negative");
    if (k > cap) throw CapExceeded("enumerate_nc2_disc: k exceeds the configured limit");
    std::vector<std::vector<int>> out;
    if (k % 2 != 0) return out;
    if (k == 0) {
        out.emplace_back();
        return out;
    }
    detail::for_each_matching(k, [&](const std::vector<int>& match) {
        for (int a = 1; a <= k; ++a) {
            const int c = match[a - 1];
            if (c < a) continue;
            for (int b = a + 1; b < c; ++b)
                if (match[b - 1] < a || match[b - 1] > c) return;
        }
        out.push_back(match);
    });
    return out;
}

/// Kreweras complement of a disc pairing, s o gamma_k.
inline CyclePermutation kreweras_disc(const std::vector<int>& match) {
    const int k = static_cast<int>(match.size());
    const auto g = gamma_disc(k);
    std::vector<int> image(match.size());
    for (int i = 1; i <= k; ++i) image[i - 1] = match[g(i) - 1];
    return CyclePermutation::from_map(std::move(image));
}

} // namespace wigcov
