#pragma once

// Concrete N x N deterministic families and the matrices of their words.

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "error.hpp"
#include "numeric.hpp"
#include "words.hpp"

namespace wigcov {

using Matrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

/// Dense matrix plus structure hints used to speed up products.
struct StructuredMatrix {
    Matrix dense;
    bool diagonal = false;
    std::optional<SparseMatrix> sparse;

    explicit StructuredMatrix(Matrix m) : dense(std::move(m)) {
        const Eigen::Index n = dense.rows();
        Eigen::Index nnz = 0;
        bool diag = true;
        for (Eigen::Index j = 0; j < dense.cols(); ++j)
            for (Eigen::Index i = 0; i < n; ++i)
                if (dense(i, j) != cplx{}) {
                    ++nnz;
                    if (i != j) diag = false;
                }
        diagonal = diag;
        if (!diag && nnz <= 4 * n) sparse = dense.sparseView();
    }

    /// left * this
    Matrix left_multiply(const Matrix& left) const {
        if (diagonal) return left * dense.diagonal().asDiagonal();
        if (sparse) return left * (*sparse);
        return left * dense;
    }
};

/// Largest singular value by power iteration on A*A (a lower estimate of the operator norm).
inline double operator_norm_estimate(const Matrix& a, int iterations = 300) {
    if (a.size() == 0) return 0.0;
    Eigen::VectorXcd v(a.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx{1.0 + 0.37 * std::sin(1.0 + i), 0.11 * std::cos(2.0 * i)};
    v.normalize();
    double est = 0.0;
    for (int it = 0; it < iterations; ++it) {
        Eigen::VectorXcd w = a.adjoint() * (a * v);
        const double nrm = w.norm();
        if (nrm == 0.0) return 0.0;
        const double next = std::sqrt(nrm);
        v = w / nrm;
        if (std::abs(next - est) <= 1e-13 * next) {
            est = next;
            break;
        }
        est = next;
    }
    return est;
}

inline constexpr double kDefaultNormBound = 1e3;

/// An immutable family (A_0, ..., A_{k-1}) of N x N matrices. Word matrices are computed lazily
/// and cached; copies share the cache.
class DetFamily {
public:
    DetFamily(int dim, std::vector<Matrix> matrices, double norm_bound = kDefaultNormBound)
        : dim_(dim), norm_bound_(norm_bound), cache_(std::make_shared<Cache>()) {
        require(dim >= 1, "DetFamily: dimension must be positive");
        for (auto& m : matrices) {
            if (m.rows() != dim || m.cols() != dim) throw Error("DetFamily: dimension mismatch");
            if (operator_norm_estimate(m) > norm_bound * (1.0 + 1e-9)) throw Error("DetFamily: operator norm exceeds bound");
            base_.emplace_back(std::move(m));
        }
    }

    int dim() const noexcept { return dim_; }
    int size() const noexcept { return static_cast<int>(base_.size()); }
    double norm_bound() const noexcept { return norm_bound_; }
    const Matrix& base(int k) const {
        check_index(k);
        return base_[k].dense;
    }

    Matrix letter_matrix(const DetLetter& l) const {
        check_index(l.base);
        const Matrix& a = base_[l.base].dense;
        if (l.star && l.transpose) return a.conjugate();
        if (l.star) return a.adjoint();
        if (l.transpose) return a.transpose();
        return a;
    }

    /// The matrix of a word with its structure hints; identity for the empty word.
    const StructuredMatrix& word(const DetWord& w) const {
        const std::string key = to_string(w);
        {
            std::lock_guard lock(cache_->mutex);
            if (auto it = cache_->words.find(key); it != cache_->words.end()) return it->second;
        }
        Matrix m = Matrix::Identity(dim_, dim_);
        for (const auto& l : w) m = m * letter_matrix(l);
        std::lock_guard lock(cache_->mutex);
        return cache_->words.try_emplace(key, std::move(m)).first->second;
    }

    const Matrix& word_matrix(const DetWord& w) const { return word(w).dense; }

    void check_index(int k) const {
        if (k < 0 || k >= size()) throw Error("DetFamily: letter index a" + std::to_string(k) + " out of range");
    }

private:
    struct Cache {
        std::mutex mutex;
        std::map<std::string, StructuredMatrix> words;
    };

    int dim_;
    double norm_bound_;
    std::vector<StructuredMatrix> base_;
    std::shared_ptr<Cache> cache_;
};

namespace families {

inline Matrix identity(int n) { return Matrix::Identity(n, n); }

/// diag(v_0, v_1, ..., v_{L-1}, v_0, ...).
inline Matrix diagonal_pattern(int n, const std::vector<cplx>& values) {
    require(!values.empty(), "diagonal_pattern: empty pattern");
    Matrix m = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = values[i % values.size()];
    return m;
}

/// C(i,j) = r[(j - i) mod N], with the first row r zero-padded to length N.
inline Matrix circulant(int n, const std::vector<cplx>& first_row) {
    require(!first_row.empty(), "circulant: empty first row");
    require(static_cast<int>(first_row.size()) <= n, "circulant: first row longer than N");
    Matrix m = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < static_cast<int>(first_row.size()); ++k) m(i, (i + k) % n) = first_row[k];
    return m;
}

/// Diagonal projection onto the first round(fraction * N) coordinates.
inline Matrix projection(int n, double rank_fraction) {
    require(rank_fraction >= 0.0 && rank_fraction <= 1.0, "projection: rank fraction outside [0,1]");
    const int rank = static_cast<int>(std::lround(rank_fraction * n));
    Matrix m = Matrix::Zero(n, n);
    for (int i = 0; i < rank; ++i) m(i, i) = 1.0;
    return m;
}

/// Complex Ginibre matrix scaled so its operator norm sits near norm_cap / 1.5.
/// Throws if the norm estimate exceeds the cap.
inline Matrix random_fixed(int n, std::uint64_t seed, double norm_cap) {
    require(norm_cap > 0.0, "random_fixed: norm cap must be positive");
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    Matrix m(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m(i, j) = cplx{g(gen), g(gen)};
    // ||G / sqrt(N)|| concentrates near 2.
    m *= norm_cap / (3.0 * std::sqrt(static_cast<double>(n)));
    if (operator_norm_estimate(m) > norm_cap) throw Error("random_fixed: norm cap violated");
    return m;
}

} // namespace families

} // namespace wigcov
