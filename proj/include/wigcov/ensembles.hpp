#pragma once

// Entry laws of Wigner matrices, their exact mixed moments, and a counter-based sampler.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "covariance.hpp"
#include "error.hpp"
#include "families.hpp"
#include "numeric.hpp"

namespace wigcov {

inline constexpr int kDefaultMomentCap = 12;

/// A centered, symmetric real law: Gaussian of a given variance or a finite discrete law.
struct ScalarLaw {
    bool gaussian = false;
    double variance = 0.0;       // Gaussian only
    std::vector<double> values;  // discrete only
    std::vector<double> probs;

    static ScalarLaw normal(double variance) { return {true, variance, {}, {}}; }
    static ScalarLaw discrete(std::vector<double> values, std::vector<double> probs) {
        require(values.size() == probs.size() && !values.empty(), "discrete law: support and weights differ in length");
        double total = 0.0;
        for (double p : probs) {
            require(p >= 0.0, "discrete law: negative weight");
            total += p;
        }
        require(std::abs(total - 1.0) < 1e-12, "discrete law: weights must sum to 1");
        return {false, 0.0, std::move(values), std::move(probs)};
    }
    static ScalarLaw constant_zero() { return discrete({0.0}, {1.0}); }

    /// Symmetric three-point law {0, +a, -a} with variance s and kurtosis kappa >= 1.
    static ScalarLaw three_point(double s, double kappa) {
        if (s == 0.0) return constant_zero();
        require(kappa >= 1.0 - 1e-12, "three-point law: kurtosis must be at least 1");
        const double w = std::min(1.0, 1.0 / kappa);
        const double a = std::sqrt(s / w);
        if (w >= 1.0) return discrete({a, -a}, {0.5, 0.5});
        return discrete({0.0, a, -a}, {1.0 - w, w / 2, w / 2});
    }

    double moment(int k) const {
        if (k == 0) return 1.0;
        if (gaussian) return gaussian_moment(k) * std::pow(variance, k / 2.0);
        CompensatedSum<double> s;
        for (std::size_t i = 0; i < values.size(); ++i) s += probs[i] * std::pow(values[i], k);
        return s.value();
    }
};

/// Law of an off-diagonal entry. Either x = u + i v with independent real parts, or a finite
/// complex discrete law.
struct EntryLaw {
    std::string kind;
    std::optional<ScalarLaw> re, im;
    std::vector<cplx> support;
    std::vector<double> weights;

    bool is_product() const noexcept { return re.has_value(); }
};

/// Law of a diagonal entry; its variance is eta.
using DiagonalLaw = ScalarLaw;

namespace laws {

inline EntryLaw from_parts(std::string kind, ScalarLaw u, ScalarLaw v) {
    EntryLaw l;
    l.kind = std::move(kind);
    l.re = std::move(u);
    l.im = std::move(v);
    return l;
}

inline EntryLaw gaussian_complex() { return from_parts("gaussian_complex", ScalarLaw::normal(0.5), ScalarLaw::normal(0.5)); }
inline EntryLaw gaussian_real() { return from_parts("gaussian_real", ScalarLaw::normal(1.0), ScalarLaw::constant_zero()); }
inline EntryLaw rademacher_real() {
    return from_parts("rademacher_real", ScalarLaw::discrete({1.0, -1.0}, {0.5, 0.5}), ScalarLaw::constant_zero());
}
inline EntryLaw rademacher_complex() {
    const double h = std::sqrt(0.5);
    return from_parts("rademacher_complex", ScalarLaw::discrete({h, -h}, {0.5, 0.5}), ScalarLaw::discrete({h, -h}, {0.5, 0.5}));
}

/// Var u = (1+theta)/2, Var v = (1-theta)/2, both parts three-point laws of kurtosis kappa.
inline EntryLaw two_point_mix(double theta, double kurtosis) {
    require(std::abs(theta) <= 1.0, "two_point_mix: |theta| must be at most 1");
    return from_parts("two_point_mix", ScalarLaw::three_point((1.0 + theta) / 2, kurtosis),
                      ScalarLaw::three_point((1.0 - theta) / 2, kurtosis));
}

inline EntryLaw custom_discrete(std::vector<cplx> support, std::vector<double> weights) {
    require(support.size() == weights.size() && !support.empty(), "custom_discrete: support and weights differ in length");
    double total = 0.0;
    for (double w : weights) {
        require(w >= 0.0, "custom_discrete: negative weight");
        total += w;
    }
    require(std::abs(total - 1.0) < 1e-12, "custom_discrete: weights must sum to 1");
    EntryLaw l;
    l.kind = "custom_discrete";
    l.support = std::move(support);
    l.weights = std::move(weights);
    return l;
}

inline DiagonalLaw diag_gaussian(double eta) { return ScalarLaw::normal(eta); }
inline DiagonalLaw diag_rademacher(double eta) {
    const double a = std::sqrt(eta);
    if (a == 0.0) return ScalarLaw::constant_zero();
    return ScalarLaw::discrete({a, -a}, {0.5, 0.5});
}
inline DiagonalLaw diag_zero() { return ScalarLaw::constant_zero(); }

} // namespace laws

/// E[x^p conj(x)^q], exact for discrete laws up to rounding.
inline cplx entry_moments(const EntryLaw& law, int p, int q, int cap = kDefaultMomentCap) {
    if (p < 0 || q < 0) throw Error("entry_moments: negative order");
    if (p + q > cap) throw CapExceeded("entry_moments: order exceeds the configured cap");
    if (!law.is_product()) {
        CompensatedSum<cplx> s;
        for (std::size_t k = 0; k < law.support.size(); ++k) {
            const cplx x = law.support[k];
            s += law.weights[k] * std::pow(x, p) * std::pow(std::conj(x), q);
        }
        return s.value();
    }
    const cplx i{0.0, 1.0};
    CompensatedSum<cplx> s;
    for (int a = 0; a <= p; ++a)
        for (int b = 0; b <= q; ++b) {
            const int ku = a + b, kv = p + q - a - b;
            if (ku % 2 || kv % 2) continue;
            const double c = static_cast<double>(binomial(p, a) * binomial(q, b)) * law.re->moment(ku) * law.im->moment(kv);
            if (c == 0.0) continue;
            s += c * std::pow(i, p - a) * std::pow(-i, q - b);
        }
    return s.value();
}

inline double diagonal_moments(const DiagonalLaw& law, int p, int cap = kDefaultMomentCap) {
    if (p < 0) throw Error("diagonal_moments: negative order");
    if (p > cap) throw CapExceeded("diagonal_moments: order exceeds the configured cap");
    return law.moment(p);
}

/// Checks E x = 0, E|x|^2 = 1 and conjugation invariance of the moments up to order 4.
inline void validate_law(const EntryLaw& law, const DiagonalLaw& diag) {
    constexpr double tol = 1e-10;
    if (std::abs(entry_moments(law, 1, 0)) > tol) throw Error("entry law: mean must be 0");
    if (std::abs(entry_moments(law, 1, 1) - 1.0) > tol) throw Error("entry law: E|x|^2 must be 1");
    for (int p = 0; p <= 4; ++p)
        for (int q = 0; p + q <= 4; ++q)
            if (std::abs(entry_moments(law, p, q) - entry_moments(law, q, p)) > tol)
                throw Error("entry law: law of x must equal law of conj(x)");
    if (std::abs(diag.moment(1)) > tol) throw Error("diagonal law: mean must be 0");
}

inline WignerParams params_of(const EntryLaw& law, const DiagonalLaw& diag) {
    validate_law(law, diag);
    const cplx theta = entry_moments(law, 2, 0);
    const double eta = diag.moment(2);
    const double k4 = entry_moments(law, 2, 2).real() - 2.0 - std::norm(theta);
    return {theta.imag() == 0.0 ? cplx{theta.real(), 0.0} : theta, eta, k4};
}

/// A discrete law with pseudo-variance theta and fourth cumulant k4.
inline EntryLaw solve_law(double theta, double k4) {
    if (!(std::abs(theta) <= 1.0)) throw Error("solve_law: |theta| must be at most 1");
    const double kappa = 3.0 + 2.0 * k4 / (1.0 + theta * theta);
    if (kappa < 1.0 - 1e-12) throw Error("solve_law: infeasible (theta, k4): need k4 >= -1 - theta^2");
    return laws::two_point_mix(theta, std::max(kappa, 1.0));
}

struct Ensemble {
    std::string name;
    EntryLaw law;
    DiagonalLaw diagonal;

    WignerParams params() const { return params_of(law, diagonal); }
};

namespace presets {
inline Ensemble gue() { return {"gue", laws::gaussian_complex(), laws::diag_gaussian(1.0)}; }
inline Ensemble goe() { return {"goe", laws::gaussian_real(), laws::diag_gaussian(2.0)}; }
inline Ensemble rademacher() { return {"rademacher", laws::rademacher_real(), laws::diag_rademacher(1.0)}; }
} // namespace presets

/// Stateless counter-based generator: every draw is a hash of a key and a counter.
class CounterRng {
public:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static std::uint64_t key(std::initializer_list<std::uint64_t> parts) {
        std::uint64_t h = 0x243f6a8885a308d3ULL;
        for (auto p : parts) h = mix(h ^ mix(p));
        return h;
    }

    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() { return mix(key_ + 0xd1b54a32d192ed03ULL * ++counter_); }
    /// Uniform in (0, 1).
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    /// Two independent standard normals (Marsaglia polar method).
    std::pair<double, double> normal_pair() {
        for (;;) {
            const double u = 2.0 * uniform() - 1.0, v = 2.0 * uniform() - 1.0;
            const double s = u * u + v * v;
            if (s >= 1.0 || s == 0.0) continue;
            const double f = std::sqrt(-2.0 * std::log(s) / s);
            return {u * f, v * f};
        }
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

namespace detail {

inline double draw_discrete(const std::vector<double>& probs, CounterRng& rng) {
    double u = rng.uniform(), acc = 0.0;
    for (std::size_t k = 0; k + 1 < probs.size(); ++k) {
        acc += probs[k];
        if (u < acc) return static_cast<double>(k);
    }
    return static_cast<double>(probs.size() - 1);
}

inline double draw_scalar(const ScalarLaw& l, CounterRng& rng) {
    if (l.gaussian) return std::sqrt(l.variance) * rng.normal_pair().first;
    if (l.values.size() == 1) return l.values[0];
    return l.values[static_cast<std::size_t>(draw_discrete(l.probs, rng))];
}

inline cplx draw_entry(const EntryLaw& law, CounterRng& rng) {
    if (!law.is_product()) return law.support[static_cast<std::size_t>(draw_discrete(law.weights, rng))];
    if (law.re->gaussian && law.im->gaussian) {
        const auto [a, b] = rng.normal_pair();
        return {std::sqrt(law.re->variance) * a, std::sqrt(law.im->variance) * b};
    }
    const double u = draw_scalar(*law.re, rng);
    const double v = draw_scalar(*law.im, rng);
    return {u, v};
}

} // namespace detail

/// Key of the stream that draws entry (i, j), i >= j.
inline std::uint64_t entry_key(std::uint64_t base, int i, int j) {
    return CounterRng::mix(base ^ CounterRng::mix((static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(j)));
}

/// Hermitian N x N Wigner matrix with entries divided by sqrt(N). Entry (i, j), i >= j, is drawn
/// from its own stream keyed by (seed, stream, i, j), so a sample is the corner of any larger one.
inline Matrix sample(int n, const EntryLaw& law, const DiagonalLaw& diag, std::uint64_t seed, std::uint64_t stream = 0) {
    require(n >= 1, "sample: N must be positive");
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const std::uint64_t base = CounterRng::key({seed, stream});
    Matrix x(n, n);
    for (int j = 0; j < n; ++j) {
        CounterRng d(entry_key(base, j, j));
        x(j, j) = cplx{detail::draw_scalar(diag, d) * scale, 0.0};
        for (int i = j + 1; i < n; ++i) {
            CounterRng rng(entry_key(base, i, j));
            x(i, j) = detail::draw_entry(law, rng) * scale;
        }
    }
    x.triangularView<Eigen::StrictlyUpper>() = x.adjoint();
    return x;
}

inline Matrix sample(int n, const Ensemble& e, std::uint64_t seed, std::uint64_t stream = 0) {
    return sample(n, e.law, e.diagonal, seed, stream);
}

} // namespace wigcov
