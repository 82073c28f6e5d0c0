#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <type_traits>
#include <vector>

namespace wigcov {

using cplx = std::complex<double>;

// Neumaier-compensated accumulator. Works for real and complex scalars
// (complex parts are compensated independently).
template <typename T>
class CompensatedSum {
public:
    void add(T x) {
        if constexpr (std::is_same_v<T, cplx>) {
            re_.add(x.real());
            im_.add(x.imag());
        } else {
            const T t = sum_ + x;
            if (std::abs(sum_) >= std::abs(x)) {
                comp_ += (sum_ - t) + x;
            } else {
                comp_ += (x - t) + sum_;
            }
            sum_ = t;
        }
    }

    T value() const {
        if constexpr (std::is_same_v<T, cplx>) {
            return {re_.value(), im_.value()};
        } else {
            return sum_ + comp_;
        }
    }

    CompensatedSum& operator+=(T x) {
        add(x);
        return *this;
    }

private:
    struct Part {
        double sum = 0.0, comp = 0.0;
        void add(double x) {
            const double t = sum + x;
            if (std::abs(sum) >= std::abs(x)) {
                comp += (sum - t) + x;
            } else {
                comp += (x - t) + sum;
            }
            sum = t;
        }
        double value() const { return sum + comp; }
    };
    // Only one of the two representations is used, depending on T.
    Part re_, im_;
    T sum_{}, comp_{};
};

inline bool close(cplx a, cplx b, double rel, double abs_tol = 1e-300) {
    return std::abs(a - b) <= std::max(abs_tol, rel * std::max(std::abs(a), std::abs(b)));
}

inline std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    std::uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    return r;
}

// (k-1)!! for even k, 0 for odd k; the k-th moment of a standard normal.
inline double gaussian_moment(int k) {
    if (k % 2 != 0) return 0.0;
    double r = 1.0;
    for (int j = k - 1; j > 1; j -= 2) r *= j;
    return r;
}

} // namespace wigcov
