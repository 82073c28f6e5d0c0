#pragma once

// First-order limit moments and the second-order covariance phi2(p, q) of centered traces.

#include <map>
#include <string>
#include <vector>

#include "error.hpp"
#include "nc_annulus.hpp"
#include "numeric.hpp"
#include "states.hpp"
#include "words.hpp"

namespace wigcov {

/// (theta, eta, k4) of one Wigner ensemble: pseudo-variance, diagonal variance, fourth cumulant.
struct WignerParams {
    cplx theta = 0.0;
    double eta = 1.0;
    double k4 = 0.0;

    void validate() const {
        if (std::abs(theta) > 1.0 + 1e-12) throw Error("Wigner parameters: |theta| must be at most 1");
        if (eta < 0.0) throw Error("Wigner parameters: eta must be non-negative");
        if (k4 < -1.0 - std::norm(theta) - 1e-12) throw Error("Wigner parameters: k4 must be at least -1 - |theta|^2");
    }

    static WignerParams gue() { return {0.0, 1.0, 0.0}; }
    static WignerParams goe() { return {1.0, 2.0, 0.0}; }
};

using ParamsMap = std::map<int, WignerParams>;

inline const WignerParams& params_for(const ParamsMap& params, int id) {
    auto it = params.find(id);
    if (it == params.end()) throw Error("unknown Wigner id x" + std::to_string(id));
    return it->second;
}

namespace detail {
inline void check_ids(const Monomial& p, const ParamsMap& params) {
    for (int id : p.wigner) params_for(params, id).validate();
}
} // namespace detail

/// Limit of E[(1/N) Tr p]: sum over non-mixing non-crossing pairings of the disc of phi_K.
inline cplx first_order(const Monomial& p, const ParamsMap& params, const LimitState& st, int cap = kDefaultDiscCap) {
    detail::check_ids(p, params);
    if (p.degree() == 0) return st.phi(p.constant);
    CompensatedSum<cplx> sum;
    for (const auto& match : enumerate_nc2_disc(p.degree(), cap)) {
        bool ok = true;
        for (int i = 0; i < p.degree() && ok; ++i) ok = p.wigner[i] == p.wigner[match[i] - 1];
        if (ok) sum += eval_phi_K(kreweras_disc(match), p.det, st);
    }
    return sum.value();
}

struct CovarianceTerms {
    cplx s1, s2, s3, s4, total;
};

/// The four sums of phi2(p, q): plain Kreweras term, transpose term (via s(q)), k4 term on two
/// through strings, diagonal-variance correction on one through string.
inline CovarianceTerms phi2(const Monomial& p, const Monomial& q, const ParamsMap& params, const LimitState& st,
                            int cap = kDefaultPairingCap) {
    detail::check_ids(p, params);
    detail::check_ids(q, params);
    const int m = p.degree(), n = q.degree();
    CovarianceTerms out{};
    if (m == 0 || n == 0 || (m + n) % 2 != 0) return out;

    std::vector<int> labels = p.wigner;
    labels.insert(labels.end(), q.wigner.begin(), q.wigner.end());
    std::vector<DetWord> letters = p.det;
    letters.insert(letters.end(), q.det.begin(), q.det.end());

    const Monomial sq = s_transform(q);
    std::vector<int> labels_s = p.wigner;
    labels_s.insert(labels_s.end(), sq.wigner.begin(), sq.wigner.end());
    std::vector<DetWord> letters_s = p.det;
    letters_s.insert(letters_s.end(), sq.det.begin(), sq.det.end());

    CompensatedSum<cplx> s1, s2, s3, s4;
    for (const auto& sigma : enumerate_nc2(m, n, cap)) {
        const int l = sigma.through_count();
        if (is_non_mixing(sigma, labels, false)) {
            s1 += eval_phi_K(sigma, letters, st);
            if (l == 2 && is_non_mixing(sigma, labels, true)) {
                const double k4 = params_for(params, labels[sigma.through_strings().front().first - 1]).k4;
                if (k4 != 0.0) s3 += k4 * eval_phi_tilde_K(sigma, letters, st);
            }
            if (l == 1) {
                const auto& w = params_for(params, labels[sigma.through_strings().front().first - 1]);
                const cplx c = w.eta - 1.0 - w.theta;
                if (c != 0.0) s4 += c * eval_phi_tilde_K(sigma, letters, st);
            }
        }
        if (is_non_mixing(sigma, labels_s, false)) {
            cplx theta = 1.0;
            for (const auto& [a, b] : sigma.through_strings()) theta *= params_for(params, labels_s[a - 1]).theta;
            if (theta != 0.0) s2 += theta * eval_phi_K(sigma, letters_s, st);
        }
    }
    out.s1 = s1.value();
    out.s2 = s2.value();
    out.s3 = s3.value();
    out.s4 = s4.value();
    out.total = out.s1 + out.s2 + out.s3 + out.s4;
    return out;
}

/// The reduced formula valid for vanishing pseudo-variance and unit diagonal variance:
/// Kreweras term plus the k4 term. Throws if some involved ensemble has other parameters.
inline cplx phi2_zero_pseudo_variance(const Monomial& p, const Monomial& q, const ParamsMap& params, const LimitState& st,
                      int cap = kDefaultPairingCap) {
    for (const Monomial* mono : {&p, &q})
        for (int id : mono->wigner) {
            const auto& w = params_for(params, id);
            w.validate();
            if (w.theta != 0.0 || w.eta != 1.0) throw Error("phi2_zero_pseudo_variance: needs theta = 0 and eta = 1");
        }
    const int m = p.degree(), n = q.degree();
    if (m == 0 || n == 0 || (m + n) % 2 != 0) return 0.0;
    std::vector<int> labels = p.wigner;
    labels.insert(labels.end(), q.wigner.begin(), q.wigner.end());
    std::vector<DetWord> letters = p.det;
    letters.insert(letters.end(), q.det.begin(), q.det.end());

    CompensatedSum<cplx> plain, quartic;
    for (const auto& sigma : enumerate_nc2(m, n, cap)) {
        if (!is_non_mixing(sigma, labels, false)) continue;
        plain += eval_phi_K(kreweras(sigma), letters, st);
        if (sigma.through_count() != 2 || !is_non_mixing(sigma, labels, true)) continue;
        const double k4 = params.at(labels[sigma.through_strings().front().first - 1]).k4;
        if (k4 != 0.0) quartic += k4 * eval_phi_tilde_K(sigma, letters, st);
    }
    const cplx zero = 0.0;
    return plain.value() + zero + quartic.value() + zero;
}

/// Bilinear extension; degree-0 terms have identically zero centered trace.
inline cplx phi2_poly(const Polynomial& a, const Polynomial& b, const ParamsMap& params, const LimitState& st,
                      int cap = kDefaultPairingCap) {
    CompensatedSum<cplx> sum;
    for (const auto& s : a.terms())
        for (const auto& t : b.terms()) {
            if (s.mono.degree() == 0 || t.mono.degree() == 0) continue;
            sum += s.coeff * t.coeff * phi2(s.mono, t.mono, params, st, cap).total;
        }
    return sum.value();
}

/// Limit of E[z(p) conj(z(q))] = phi2(p, q*).
inline cplx phi2_conjugate(const Polynomial& a, const Polynomial& b, const ParamsMap& params, const LimitState& st,
                           int cap = kDefaultPairingCap) {
    return phi2_poly(a, b.adjoint(), params, st, cap);
}

} // namespace wigcov
