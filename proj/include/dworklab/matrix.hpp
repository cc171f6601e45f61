#pragma once

#include "rational.hpp"

#include <cstddef>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace dworklab {

class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, Rational(0)) {}
    RationalMatrix(std::initializer_list<std::initializer_list<Rational>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        for (const auto& r : rows) {
            if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
            for (const auto& v : r) a_.push_back(v);
        }
    }

    static RationalMatrix identity(std::size_t n) {
        RationalMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Rational& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    friend bool operator==(const RationalMatrix& x, const RationalMatrix& y) {
        return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
    }

    friend RationalMatrix operator*(const RationalMatrix& x, const RationalMatrix& y) {
        if (x.cols_ != y.rows_) throw std::invalid_argument("matrix shape mismatch");
        RationalMatrix out(x.rows_, y.cols_);
        for (std::size_t i = 0; i < x.rows_; ++i)
            for (std::size_t k = 0; k < x.cols_; ++k) {
                if (x(i, k) == 0) continue;
                for (std::size_t j = 0; j < y.cols_; ++j) out(i, j) += x(i, k) * y(k, j);
            }
        return out;
    }
    friend RationalMatrix operator+(const RationalMatrix& x, const RationalMatrix& y) {
        if (x.rows_ != y.rows_ || x.cols_ != y.cols_) throw std::invalid_argument("matrix shape mismatch");
        RationalMatrix out = x;
        for (std::size_t i = 0; i < out.a_.size(); ++i) out.a_[i] += y.a_[i];
        return out;
    }
    friend RationalMatrix operator-(const RationalMatrix& x, const RationalMatrix& y) {
        if (x.rows_ != y.rows_ || x.cols_ != y.cols_) throw std::invalid_argument("matrix shape mismatch");
        RationalMatrix out = x;
        for (std::size_t i = 0; i < out.a_.size(); ++i) out.a_[i] -= y.a_[i];
        return out;
    }
    friend RationalMatrix operator*(const Rational& c, const RationalMatrix& x) {
        RationalMatrix out = x;
        for (auto& v : out.a_) v *= c;
        return out;
    }

    RationalMatrix transpose() const {
        RationalMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    bool is_zero() const {
        for (const auto& v : a_)
            if (v != 0) return false;
        return true;
    }

    // Reduced row echelon form in place; returns pivot columns.
    std::vector<std::size_t> rref() {
        std::vector<std::size_t> pivots;
        std::size_t row = 0;
        for (std::size_t col = 0; col < cols_ && row < rows_; ++col) {
            std::size_t p = row;
            while (p < rows_ && (*this)(p, col) == 0) ++p;
            if (p == rows_) continue;
            if (p != row)
                for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(p, j), (*this)(row, j));
            Rational inv = 1 / (*this)(row, col);
            for (std::size_t j = col; j < cols_; ++j) (*this)(row, j) *= inv;
            for (std::size_t i = 0; i < rows_; ++i) {
                if (i == row || (*this)(i, col) == 0) continue;
                Rational f = (*this)(i, col);
                for (std::size_t j = col; j < cols_; ++j) (*this)(i, j) -= f * (*this)(row, j);
            }
            pivots.push_back(col);
            ++row;
        }
        return pivots;
    }

    std::size_t rank() const {
        RationalMatrix c = *this;
        return c.rref().size();
    }

    // Basis of {v : A v = 0}; one vector per free column, that column set to 1.
    std::vector<std::vector<Rational>> nullspace() const {
        RationalMatrix c = *this;
        auto pivots = c.rref();
        std::vector<bool> is_pivot(cols_, false);
        for (auto p : pivots) is_pivot[p] = true;
        std::vector<std::vector<Rational>> basis;
        for (std::size_t f = 0; f < cols_; ++f) {
            if (is_pivot[f]) continue;
            std::vector<Rational> v(cols_, Rational(0));
            v[f] = 1;
            for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -c(r, f);
            basis.push_back(std::move(v));
        }
        return basis;
    }

    Rational det() const {
        if (rows_ != cols_) throw std::invalid_argument("det of non-square matrix");
        RationalMatrix c = *this;
        Rational d = 1;
        for (std::size_t col = 0; col < cols_; ++col) {
            std::size_t p = col;
            while (p < rows_ && c(p, col) == 0) ++p;
            if (p == rows_) return 0;
            if (p != col) {
                for (std::size_t j = 0; j < cols_; ++j) std::swap(c(p, j), c(col, j));
                d = -d;
            }
            d *= c(col, col);
            for (std::size_t i = col + 1; i < rows_; ++i) {
                if (c(i, col) == 0) continue;
                Rational f = c(i, col) / c(col, col);
                for (std::size_t j = col; j < cols_; ++j) c(i, j) -= f * c(col, j);
            }
        }
        return d;
    }

    RationalMatrix inverse() const {
        if (rows_ != cols_) throw std::invalid_argument("inverse of non-square matrix");
        std::size_t n = rows_;
        RationalMatrix aug(n, 2 * n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) aug(i, j) = (*this)(i, j);
            aug(i, n + i) = 1;
        }
        auto piv = aug.rref();
        if (piv.size() < n || piv[n - 1] != n - 1) throw std::domain_error("singular matrix");
        RationalMatrix out(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out(i, j) = aug(i, n + j);
        return out;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Rational> a_;
};

inline std::ostream& operator<<(std::ostream& os, const RationalMatrix& m) {
    os << '[';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        os << (i ? ", [" : "[");
        for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? ", " : "") << m(i, j).get_str();
        os << ']';
    }
    return os << ']';
}

}  // namespace dworklab
