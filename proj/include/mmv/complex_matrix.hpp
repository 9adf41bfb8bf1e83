#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mmv {

using Complex = std::complex<double>;

// ===== ComplexMatrix =====

// Dense complex matrix with value semantics.  Row-major storage; rows of a
// multichannel signal matrix are therefore contiguous, which the row-sparse
// operations below rely on for speed.
class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(checked_size(rows, cols)) {}

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != checked_size(rows, cols))
            throw std::invalid_argument("ComplexMatrix: entry count does not match shape");
    }

    ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> init) {
        rows_ = init.size();
        if (rows_ == 0) throw std::invalid_argument("ComplexMatrix: empty initializer");
        cols_ = init.begin()->size();
        if (cols_ == 0) throw std::invalid_argument("ComplexMatrix: empty initializer row");
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_)
                throw std::invalid_argument("ComplexMatrix: ragged initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static ComplexMatrix zeros(std::size_t rows, std::size_t cols) {
        return ComplexMatrix(rows, cols);
    }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }

    Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    Complex* row_data(std::size_t i) { return data_.data() + i * cols_; }
    const Complex* row_data(std::size_t i) const { return data_.data() + i * cols_; }

    const std::vector<Complex>& data() const noexcept { return data_; }
    std::vector<Complex>& data() noexcept { return data_; }

    bool same_shape(const ComplexMatrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    bool is_finite() const noexcept {
        for (const Complex& z : data_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    bool is_zero() const noexcept {
        for (const Complex& z : data_)
            if (z != Complex(0.0, 0.0)) return false;
        return true;
    }

    double frobenius_norm_sq() const noexcept {
        double acc = 0.0;
        for (const Complex& z : data_) acc += std::norm(z);
        return acc;
    }

    double frobenius_norm() const noexcept { return std::sqrt(frobenius_norm_sq()); }

    ComplexMatrix& operator+=(const ComplexMatrix& other) {
        require_same_shape(other);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
        return *this;
    }

    ComplexMatrix& operator-=(const ComplexMatrix& other) {
        require_same_shape(other);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
        return *this;
    }

    ComplexMatrix& operator*=(Complex scalar) {
        for (Complex& z : data_) z *= scalar;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(Complex scalar, ComplexMatrix m) { return m *= scalar; }
    friend ComplexMatrix operator*(ComplexMatrix m, Complex scalar) { return m *= scalar; }

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    static std::size_t checked_size(std::size_t rows, std::size_t cols) {
        if (rows == 0 || cols == 0)
            throw std::invalid_argument("ComplexMatrix: dimensions must be positive");
        return rows * cols;
    }

    void require_same_shape(const ComplexMatrix& other) const {
        if (!same_shape(other))
            throw std::invalid_argument("ComplexMatrix: shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

// ===== SupportSet =====

// Sorted set of row indices.  Duplicates are rejected at construction.
class SupportSet {
public:
    SupportSet() = default;

    explicit SupportSet(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
        std::sort(indices_.begin(), indices_.end());
        if (std::adjacent_find(indices_.begin(), indices_.end()) != indices_.end())
            throw std::invalid_argument("SupportSet: duplicate index");
    }

    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }

    bool contains(std::size_t index) const noexcept {
        return std::binary_search(indices_.begin(), indices_.end(), index);
    }

    std::size_t max_index() const {
        if (indices_.empty()) throw std::out_of_range("SupportSet: empty");
        return indices_.back();
    }

    const std::vector<std::size_t>& indices() const noexcept { return indices_; }

    auto begin() const noexcept { return indices_.begin(); }
    auto end() const noexcept { return indices_.end(); }

    friend bool operator==(const SupportSet&, const SupportSet&) = default;

private:
    std::vector<std::size_t> indices_;
};

// ===== WeightMatrix =====

// Nonnegative real weights, same shape conventions as ComplexMatrix.
class WeightMatrix {
public:
    WeightMatrix(std::size_t rows, std::size_t cols, double fill = 1.0)
        : rows_(rows), cols_(cols), data_(checked_size(rows, cols), checked_weight(fill)) {}

    WeightMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != checked_size(rows, cols))
            throw std::invalid_argument("WeightMatrix: entry count does not match shape");
        for (double w : data_) checked_weight(w);
    }

    static WeightMatrix ones(std::size_t rows, std::size_t cols) {
        return WeightMatrix(rows, cols, 1.0);
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    void set(std::size_t i, std::size_t j, double w) { data_[i * cols_ + j] = checked_weight(w); }

private:
    static std::size_t checked_size(std::size_t rows, std::size_t cols) {
        if (rows == 0 || cols == 0)
            throw std::invalid_argument("WeightMatrix: dimensions must be positive");
        return rows * cols;
    }

    static double checked_weight(double w) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("WeightMatrix: weights must be finite and nonnegative");
        return w;
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// ===== row operations =====

// Euclidean norm of each row.
inline std::vector<double> row_norms(const ComplexMatrix& m) {
    std::vector<double> norms(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double acc = 0.0;
        const Complex* row = m.row_data(i);
        for (std::size_t j = 0; j < m.cols(); ++j) acc += std::norm(row[j]);
        norms[i] = std::sqrt(acc);
    }
    return norms;
}

// Row support: indices of rows whose norm exceeds `tol`.
inline SupportSet row_support(const ComplexMatrix& m, double tol = 0.0) {
    if (tol < 0.0) throw std::invalid_argument("row_support: tol must be nonnegative");
    std::vector<std::size_t> idx;
    const std::vector<double> norms = row_norms(m);
    for (std::size_t i = 0; i < norms.size(); ++i)
        if (norms[i] > tol) idx.push_back(i);
    return SupportSet(std::move(idx));
}

// Indices of the K largest values, ties broken towards the lower index.
// `values` is typically a vector of row norms.
inline std::vector<std::size_t> top_k_indices(const std::vector<double>& values, std::size_t k) {
    if (k > values.size())
        throw std::invalid_argument("top_k_indices: k exceeds the number of values");
    std::vector<std::size_t> order(values.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&values](std::size_t a, std::size_t b) {
                          if (values[a] != values[b]) return values[a] > values[b];
                          return a < b;
                      });
    order.resize(k);
    return order;
}

// Keep the K rows of largest Euclidean norm, zero the rest.  Returns the kept
// matrix together with the support of its nonzero rows (a kept row that is
// identically zero does not enter the support).
inline std::pair<ComplexMatrix, SupportSet> hard_threshold(const ComplexMatrix& m, std::size_t k) {
    if (k > m.rows()) throw std::invalid_argument("hard_threshold: k exceeds the row count");
    const std::vector<double> norms = row_norms(m);
    const std::vector<std::size_t> keep = top_k_indices(norms, k);
    ComplexMatrix out(m.rows(), m.cols());
    std::vector<std::size_t> nonzero;
    for (std::size_t r : keep) {
        std::copy(m.row_data(r), m.row_data(r) + m.cols(), out.row_data(r));
        if (norms[r] > 0.0) nonzero.push_back(r);
    }
    return {std::move(out), SupportSet(std::move(nonzero))};
}

// Zero every row outside `support`.
inline ComplexMatrix sparsify_to_support(const ComplexMatrix& m, const SupportSet& support) {
    if (!support.empty() && support.max_index() >= m.rows())
        throw std::invalid_argument("sparsify_to_support: index out of range");
    ComplexMatrix out(m.rows(), m.cols());
    for (std::size_t r : support)
        std::copy(m.row_data(r), m.row_data(r) + m.cols(), out.row_data(r));
    return out;
}

// ===== products =====

inline ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("multiply: inner dimensions differ");
    ComplexMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Complex* out_row = out.row_data(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex(0.0, 0.0)) continue;
            const Complex* b_row = b.row_data(k);
            for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
        }
    }
    return out;
}

// A^H * m without forming the adjoint.
inline ComplexMatrix hermitian_product(const ComplexMatrix& a, const ComplexMatrix& m) {
    if (a.rows() != m.rows()) throw std::invalid_argument("hermitian_product: row counts differ");
    ComplexMatrix out(a.cols(), m.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const Complex* a_row = a.row_data(i);
        const Complex* m_row = m.row_data(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Complex c = std::conj(a_row[k]);
            Complex* out_row = out.row_data(k);
            for (std::size_t j = 0; j < m.cols(); ++j) out_row[j] += c * m_row[j];
        }
    }
    return out;
}

// A_S * m_(S): product of the selected columns of `a` with the selected rows
// of `m`.  Equivalent to multiply(a, sparsify_to_support(m, support)) but only
// touches the rows in the support.
inline ComplexMatrix restricted_product(const ComplexMatrix& a, const ComplexMatrix& m,
                                        const SupportSet& support) {
    if (a.cols() != m.rows()) throw std::invalid_argument("restricted_product: inner dimensions differ");
    if (!support.empty() && support.max_index() >= m.rows())
        throw std::invalid_argument("restricted_product: index out of range");
    ComplexMatrix out(a.rows(), m.cols());
    for (std::size_t r : support) {
        const Complex* m_row = m.row_data(r);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const Complex air = a(i, r);
            Complex* out_row = out.row_data(i);
            for (std::size_t j = 0; j < m.cols(); ++j) out_row[j] += air * m_row[j];
        }
    }
    return out;
}

inline ComplexMatrix conj_transpose(const ComplexMatrix& m) {
    ComplexMatrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = std::conj(m(i, j));
    return out;
}

// Weighted inner product <a, b>_W = sum_ij w_ij a_ij conj(b_ij).
inline Complex weighted_inner_product(const ComplexMatrix& a, const ComplexMatrix& b,
                                      const WeightMatrix& w) {
    if (!a.same_shape(b) || a.rows() != w.rows() || a.cols() != w.cols())
        throw std::invalid_argument("weighted_inner_product: shape mismatch");
    Complex acc(0.0, 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) acc += w(i, j) * a(i, j) * std::conj(b(i, j));
    return acc;
}

}  // namespace mmv
