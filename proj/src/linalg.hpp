#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace meanquad::linalg {

// Dense row-major matrix, sized for the small systems this library solves
// (never larger than a dozen rows/columns).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double max_abs() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// LU factorization with partial pivoting of a square matrix.
class LuFactorization {
public:
    static std::optional<LuFactorization> compute(const Matrix& a);

    std::vector<double> solve(std::vector<double> rhs) const;

    // ‖A‖∞ · ‖A⁻¹‖∞ computed from the explicit inverse; fine at these sizes.
    double condition_inf() const;

private:
    std::size_t n_ = 0;
    Matrix lu_;
    std::vector<std::size_t> perm_;
    double norm_inf_ = 0.0;
};

// Nontrivial solution of A·x = 0 for a rows×cols system with rank < cols,
// found by Gaussian elimination with column pivoting. The free variable is
// set to 1 and the result scaled to unit max-abs. Returns nullopt when every
// column carries a pivot above pivot_tol (numerically full column rank).
std::optional<std::vector<double>> null_vector(const Matrix& a, double pivot_tol);

// Numerical rank by pivoted elimination with an absolute pivot threshold.
std::size_t rank_estimate(Matrix a, double pivot_tol);

// Minimum-residual solution of an overdetermined rows×cols system (rows ≥ cols)
// via normal equations. Returns nullopt if AᵀA is singular.
std::optional<std::vector<double>> least_squares(const Matrix& a, const std::vector<double>& rhs);

}  // namespace meanquad::linalg
