#pragma once

#include <cstddef>
#include <vector>

namespace fogsim::mot {

/// Dense rows x cols cost matrix, row-major.
class CostMatrix {
public:
    CostMatrix(int rows, int cols, double fill = 0.0);

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }
    double operator()(int r, int c) const noexcept { return data_[idx(r, c)]; }
    double& operator()(int r, int c) noexcept { return data_[idx(r, c)]; }

private:
    std::size_t idx(int r, int c) const noexcept {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
               static_cast<std::size_t>(c);
    }

    int rows_;
    int cols_;
    std::vector<double> data_;
};

/// Minimum total-cost assignment (Hungarian method, O(n^3) on the square
/// padding of the matrix). Returns the column assigned to each row, or -1 for
/// rows left over when rows > cols. Every row is assigned when rows <= cols.
std::vector<int> solve_assignment(const CostMatrix& cost);

}  // namespace fogsim::mot
