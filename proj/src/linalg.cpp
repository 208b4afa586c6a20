#include "linalg.hpp"

#include <cmath>
#include <numeric>

namespace meanquad::linalg {

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

std::optional<LuFactorization> LuFactorization::compute(const Matrix& a) {
    const std::size_t n = a.rows();
    if (n == 0 || a.cols() != n) return std::nullopt;

    LuFactorization f;
    f.n_ = n;
    f.lu_ = a;
    f.perm_.resize(n);
    std::iota(f.perm_.begin(), f.perm_.end(), std::size_t{0});

    for (std::size_t r = 0; r < n; ++r) {
        double row_sum = 0.0;
        for (std::size_t c = 0; c < n; ++c) row_sum += std::abs(a.at(r, c));
        f.norm_inf_ = std::max(f.norm_inf_, row_sum);
    }

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot = k;
        double best = std::abs(f.lu_.at(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            const double v = std::abs(f.lu_.at(r, k));
            if (v > best) {
                best = v;
                pivot = r;
            }
        }
        if (!(best > 0.0) || !std::isfinite(best)) return std::nullopt;
        if (pivot != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(f.lu_.at(k, c), f.lu_.at(pivot, c));
            std::swap(f.perm_[k], f.perm_[pivot]);
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            const double m = f.lu_.at(r, k) / f.lu_.at(k, k);
            f.lu_.at(r, k) = m;
            for (std::size_t c = k + 1; c < n; ++c) f.lu_.at(r, c) -= m * f.lu_.at(k, c);
        }
    }
    return f;
}

std::vector<double> LuFactorization::solve(std::vector<double> rhs) const {
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = rhs[perm_[i]];
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < i; ++j) x[i] -= lu_.at(i, j) * x[j];
    }
    for (std::size_t ii = n_; ii-- > 0;) {
        for (std::size_t j = ii + 1; j < n_; ++j) x[ii] -= lu_.at(ii, j) * x[j];
        x[ii] /= lu_.at(ii, ii);
    }
    return x;
}

double LuFactorization::condition_inf() const {
    double inv_norm = 0.0;
    std::vector<double> unit(n_, 0.0);
    std::vector<double> row_sums(n_, 0.0);
    for (std::size_t c = 0; c < n_; ++c) {
        unit.assign(n_, 0.0);
        unit[c] = 1.0;
        const std::vector<double> col = solve(std::move(unit));
        for (std::size_t r = 0; r < n_; ++r) row_sums[r] += std::abs(col[r]);
    }
    for (double s : row_sums) inv_norm = std::max(inv_norm, s);
    return norm_inf_ * inv_norm;
}

std::optional<std::vector<double>> null_vector(const Matrix& a, double pivot_tol) {
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    Matrix m = a;

    // pivot_cols[k] = column eliminated at step k; col_used marks taken columns.
    std::vector<std::size_t> pivot_cols;
    std::vector<bool> col_used(cols, false);
    std::size_t rank = 0;

    for (std::size_t step = 0; step < rows && rank < cols; ++step) {
        // Column pivoting: pick the unused column holding the largest entry
        // among the remaining rows, then bring its largest row up.
        std::size_t best_col = cols;
        std::size_t best_row = rows;
        double best = pivot_tol;
        for (std::size_t c = 0; c < cols; ++c) {
            if (col_used[c]) continue;
            for (std::size_t r = rank; r < rows; ++r) {
                const double v = std::abs(m.at(r, c));
                if (v > best) {
                    best = v;
                    best_col = c;
                    best_row = r;
                }
            }
        }
        if (best_col == cols) break;  // no pivot above threshold remains

        col_used[best_col] = true;
        pivot_cols.push_back(best_col);
        if (best_row != rank) {
            for (std::size_t c = 0; c < cols; ++c) std::swap(m.at(rank, c), m.at(best_row, c));
        }
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rank) continue;
            const double factor = m.at(r, best_col) / m.at(rank, best_col);
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < cols; ++c) m.at(r, c) -= factor * m.at(rank, c);
            m.at(r, best_col) = 0.0;
        }
        ++rank;
    }

    // First free column (deterministic choice) gets coefficient 1.
    std::size_t free_col = cols;
    for (std::size_t c = 0; c < cols; ++c) {
        if (!col_used[c]) {
            free_col = c;
            break;
        }
    }
    if (free_col == cols) return std::nullopt;

    std::vector<double> x(cols, 0.0);
    x[free_col] = 1.0;
    for (std::size_t k = 0; k < pivot_cols.size(); ++k) {
        const std::size_t pc = pivot_cols[k];
        x[pc] = -m.at(k, free_col) / m.at(k, pc);
    }

    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    for (double& v : x) v /= scale;
    return x;
}

std::size_t rank_estimate(Matrix a, double pivot_tol) {
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    std::size_t rank = 0;
    std::vector<bool> col_used(cols, false);

    for (std::size_t step = 0; step < rows; ++step) {
        std::size_t best_col = cols;
        std::size_t best_row = rows;
        double best = pivot_tol;
        for (std::size_t c = 0; c < cols; ++c) {
            if (col_used[c]) continue;
            for (std::size_t r = rank; r < rows; ++r) {
                const double v = std::abs(a.at(r, c));
                if (v > best) {
                    best = v;
                    best_col = c;
                    best_row = r;
                }
            }
        }
        if (best_col == cols) break;
        col_used[best_col] = true;
        if (best_row != rank) {
            for (std::size_t c = 0; c < cols; ++c) std::swap(a.at(rank, c), a.at(best_row, c));
        }
        for (std::size_t r = rank + 1; r < rows; ++r) {
            const double factor = a.at(r, best_col) / a.at(rank, best_col);
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < cols; ++c) a.at(r, c) -= factor * a.at(rank, c);
            a.at(r, best_col) = 0.0;
        }
        ++rank;
        if (rank == cols) break;
    }
    return rank;
}

std::optional<std::vector<double>> least_squares(const Matrix& a, const std::vector<double>& rhs) {
    const std::size_t rows = a.rows();
    const std::size_t cols = a.cols();
    Matrix ata(cols, cols);
    std::vector<double> atb(cols, 0.0);
    for (std::size_t i = 0; i < cols; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < rows; ++r) s += a.at(r, i) * a.at(r, j);
            ata.at(i, j) = s;
        }
        double s = 0.0;
        for (std::size_t r = 0; r < rows; ++r) s += a.at(r, i) * rhs[r];
        atb[i] = s;
    }
    const auto lu = LuFactorization::compute(ata);
    if (!lu) return std::nullopt;
    return lu->solve(std::move(atb));
}

}  // namespace meanquad::linalg
