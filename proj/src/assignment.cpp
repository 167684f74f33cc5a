#include "fogsim/assignment.hpp"

#include <algorithm>
#include <limits>

#include "fogsim/error.hpp"

namespace fogsim::mot {

CostMatrix::CostMatrix(int rows, int cols, double fill) : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) {
        throw InvalidArgument("cost matrix dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
}

std::vector<int> solve_assignment(const CostMatrix& cost) {
    const auto rows = static_cast<std::size_t>(cost.rows());
    const auto cols = static_cast<std::size_t>(cost.cols());
    std::vector<int> result(rows, -1);
    if (rows == 0 || cols == 0) {
        return result;
    }
    const std::size_t n = std::max(rows, cols);
    const auto at = [&](std::size_t r, std::size_t c) {
        return (r < rows && c < cols) ? cost(static_cast<int>(r), static_cast<int>(c)) : 0.0;
    };

    // Row potentials u, column potentials v; match[j] is the row holding
    // column j. Index 0 is a sentinel; real rows and columns are 1-based.
    constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0);
    std::vector<std::size_t> way(n + 1, 0);
    std::vector<double> minv(n + 1);
    std::vector<char> used(n + 1);

    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) {
                    continue;
                }
                const double reduced = at(i0 - 1, j - 1) - u[i0] - v[j];
                if (reduced < minv[j]) {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        // Augment along the alternating path.
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t r = match[j] - 1;
        if (r < rows && j - 1 < cols) {
            result[r] = static_cast<int>(j - 1);
        }
    }
    return result;
}

}  // namespace fogsim::mot
