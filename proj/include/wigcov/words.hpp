#pragma once

// Words in Wigner letters x_k and deterministic letters a_j (with adjoint / transpose flags),
// their canonical alternating form x_{w1} A_1 ... x_{wm} A_m, and polynomials over them.

#include <algorithm>
#include <cctype>
#include <complex>
#include <map>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "error.hpp"
#include "numeric.hpp"

namespace wigcov {

/// A deterministic letter a_base with optional adjoint and transpose flags.
/// Both flags together denote the entry-wise conjugate, so (a*)^t == (a^t)*.
struct DetLetter {
    int base = 0;
    bool star = false;
    bool transpose = false;

    friend auto operator<=>(const DetLetter&, const DetLetter&) = default;
};

/// A product of deterministic letters; the empty word is the identity.
using DetWord = std::vector<DetLetter>;

inline DetWord transpose(const DetWord& w) {
    DetWord out(w.rbegin(), w.rend());
    for (auto& l : out) l.transpose = !l.transpose;
    return out;
}

inline DetWord adjoint(const DetWord& w) {
    DetWord out(w.rbegin(), w.rend());
    for (auto& l : out) l.star = !l.star;
    return out;
}

inline DetWord concat(const DetWord& a, const DetWord& b) {
    DetWord out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

inline std::string to_string(const DetLetter& l) {
    std::string s = "a" + std::to_string(l.base);
    if (l.star) s += "*";
    if (l.transpose) s += "^t";
    return s;
}

inline std::string to_string(const DetWord& w) {
    if (w.empty()) return "1";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + to_string(w[i]);
    return s;
}

/// Canonical monomial x_{w1} A_1 ... x_{wm} A_m, with each A_k a (possibly empty) fused word.
/// Degree 0 monomials carry their whole deterministic word in `constant`.
struct Monomial {
    std::vector<int> wigner;
    std::vector<DetWord> det;
    DetWord constant;

    int degree() const noexcept { return static_cast<int>(wigner.size()); }

    friend bool operator==(const Monomial&, const Monomial&) = default;

    std::string to_string() const {
        if (wigner.empty()) return wigcov::to_string(constant);
        std::string s;
        for (std::size_t k = 0; k < wigner.size(); ++k) {
            if (k) s += ' ';
            s += "x" + std::to_string(wigner[k]) + " " + wigcov::to_string(det[k]);
        }
        return s;
    }
};

/// A raw letter before canonicalization.
struct WignerToken {
    int id = 1;
    bool star = false;
};
struct IdentityToken {};
using RawLetter = std::variant<WignerToken, DetLetter, IdentityToken>;

/// Parses whitespace-separated tokens: x<id>[*], a<idx>[*][^t], 1 / I (identity).
/// A bare `x` means x1.
inline std::vector<RawLetter> parse_letters(const std::string& text) {
    std::istringstream is(text);
    std::vector<RawLetter> out;
    std::string tok;
    auto parse_int = [&](const std::string& digits) {
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }))
            throw Error("monomial: bad index in token '" + tok + "'");
        return std::stoi(digits);
    };
    while (is >> tok) {
        if (tok == "1" || tok == "I") {
            out.emplace_back(IdentityToken{});
            continue;
        }
        std::string body = tok.substr(1);
        bool star = false, tr = false;
        for (;;) {
            if (body.size() >= 2 && (body.ends_with("^t") || body.ends_with("^T"))) {
                tr = !tr;
                body.resize(body.size() - 2);
            } else if (!body.empty() && body.back() == '*') {
                star = !star;
                body.pop_back();
            } else {
                break;
            }
        }
        if (tok[0] == 'x') {
            if (tr) throw Error("monomial: Wigner letters take no transpose flag ('" + tok + "')");
            out.emplace_back(WignerToken{body.empty() ? 1 : parse_int(body), star});
        } else if (tok[0] == 'a') {
            out.emplace_back(DetLetter{parse_int(body), star, tr});
        } else {
            throw Error("monomial: unknown token '" + tok + "'");
        }
    }
    return out;
}

/// Hermitian Wigner letters drop their adjoint; deterministic runs are fused; the word is rotated
/// cyclically to start with a Wigner letter (valid under a trace).
inline Monomial canonicalize(const std::vector<RawLetter>& raw) {
    std::vector<RawLetter> letters;
    for (const auto& l : raw)
        if (!std::holds_alternative<IdentityToken>(l)) letters.push_back(l);

    Monomial mono;
    auto first = std::find_if(letters.begin(), letters.end(),
                              [](const RawLetter& l) { return std::holds_alternative<WignerToken>(l); });
    if (first == letters.end()) {
        for (const auto& l : letters) mono.constant.push_back(std::get<DetLetter>(l));
        return mono;
    }
    std::rotate(letters.begin(), first, letters.end());
    for (const auto& l : letters) {
        if (const auto* w = std::get_if<WignerToken>(&l)) {
            mono.wigner.push_back(w->id);
            mono.det.emplace_back();
        } else {
            mono.det.back().push_back(std::get<DetLetter>(l));
        }
    }
    return mono;
}

inline Monomial parse_monomial(const std::string& text) { return canonicalize(parse_letters(text)); }

/// s(x1 a1 ... xn an) = xn a_{n-1}^t x_{n-1} ... a1^t x1 an^t.
inline Monomial s_transform(const Monomial& m) {
    const int n = m.degree();
    if (n == 0) throw Error("s_transform: degree-0 monomial");
    Monomial out;
    for (int j = 0; j < n; ++j) {
        out.wigner.push_back(m.wigner[n - 1 - j]);
        out.det.push_back(transpose(m.det[((n - 2 - j) % n + n) % n]));
    }
    return out;
}

/// The adjoint monomial, rotated back into canonical form.
inline Monomial adjoint(const Monomial& m) {
    const int n = m.degree();
    Monomial out;
    if (n == 0) {
        out.constant = adjoint(m.constant);
        return out;
    }
    for (int j = 0; j < n; ++j) {
        out.wigner.push_back(m.wigner[n - 1 - j]);
        out.det.push_back(adjoint(m.det[((n - 2 - j) % n + n) % n]));
    }
    return out;
}

struct Term {
    cplx coeff;
    Monomial mono;
};

/// Linear combination of canonical monomials without repeated monomials.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(const Monomial& m) : terms_{{cplx{1.0}, m}} {} // NOLINT: implicit by intent

    static Polynomial from_terms(const std::vector<Term>& terms) {
        Polynomial p;
        for (const auto& t : terms) p.add(t.coeff, t.mono);
        return p;
    }

    void add(cplx coeff, const Monomial& m) {
        const std::string key = m.to_string();
        for (auto& t : terms_) {
            if (t.mono.to_string() == key) {
                t.coeff += coeff;
                return;
            }
        }
        terms_.push_back({coeff, m});
    }

    const std::vector<Term>& terms() const noexcept { return terms_; }

    Polynomial operator+(const Polynomial& o) const {
        Polynomial r = *this;
        for (const auto& t : o.terms_) r.add(t.coeff, t.mono);
        return r;
    }

    friend Polynomial operator*(cplx c, const Polynomial& p) {
        Polynomial r;
        for (const auto& t : p.terms_) r.add(c * t.coeff, t.mono);
        return r;
    }

    Polynomial adjoint() const {
        Polynomial r;
        for (const auto& t : terms_) r.add(std::conj(t.coeff), wigcov::adjoint(t.mono));
        return r;
    }

private:
    std::vector<Term> terms_;
};

} // namespace wigcov
