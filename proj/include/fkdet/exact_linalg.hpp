#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace fkdet {

/// Row-major dense matrix for exact scalar types (Eigen does not cooperate with
/// gmpxx expression templates, so exact work stays on this small container).
template <class S>
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, S(0)) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = S(1);
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    S& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const S& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
    }
    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
    }

    DenseMatrix transpose() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    friend bool operator==(const DenseMatrix& a, const DenseMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<S> data_;
};

using IntegerMatrix = DenseMatrix<mpz_class>;

/// Exact determinant by fraction-free (Bareiss) elimination with row pivoting.
mpz_class bareiss_determinant(IntegerMatrix a);

/// Rank over Z/p for a prime p < 2^62.
std::size_t modular_rank(const IntegerMatrix& a, std::uint64_t p);

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

/// U * A * V = D with U, V unimodular and D diagonal, d_1 | d_2 | ... (all
/// nonnegative; zeros trail when A is singular).
struct SmithForm {
    std::vector<mpz_class> diagonal;
    IntegerMatrix left;   // U
    IntegerMatrix right;  // V
};

SmithForm smith_normal_form(const IntegerMatrix& a);

/// Solves A x = b over Q; nullopt when A is singular.
std::optional<std::vector<mpq_class>> solve_rational(const IntegerMatrix& a, const std::vector<mpz_class>& b);

std::vector<mpz_class> multiply(const IntegerMatrix& a, const std::vector<mpz_class>& x);

}  // namespace fkdet
