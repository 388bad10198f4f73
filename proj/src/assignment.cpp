#include "geodiag/assignment.hpp"

#include <algorithm>
#include <stdexcept>

namespace geodiag {

std::vector<int> hungarian_square(const std::vector<std::vector<double>>& a) {
    int n = static_cast<int>(a.size());
    for (const auto& row : a)
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("cost matrix not square");
    if (n == 0) return {};

    const double kInf = 1e18;
    // potentials and column matching, 1-based with a virtual column 0
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, kInf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            int i0 = p[j0], j1 = -1;
            double delta = kInf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = a[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

AssignmentResult assign_with_threshold(const std::vector<std::vector<double>>& cost,
                                       double threshold) {
    int n = static_cast<int>(cost.size());
    int m = n > 0 ? static_cast<int>(cost[0].size()) : 0;
    for (const auto& row : cost)
        if (static_cast<int>(row.size()) != m) throw std::invalid_argument("ragged cost matrix");

    AssignmentResult res;
    res.row_match.assign(n, -1);
    res.col_match.assign(m, -1);
    if (n == 0 || m == 0) return res;

    // Square padding: every row and column owns a private dummy partner.
    // The dummy price is high enough that an extra admissible match always
    // beats leaving two dummies in place, so cardinality wins over cost.
    int N = n + m;
    double pad = threshold * (std::max(n, m) + 1) + 1.0;
    double forbid = 3.0 * pad + 1.0;
    std::vector<std::vector<double>> sq(N, std::vector<double>(N, forbid));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (cost[i][j] <= threshold) sq[i][j] = cost[i][j];
    for (int i = 0; i < n; ++i) sq[i][m + i] = pad;
    for (int j = 0; j < m; ++j) sq[n + j][j] = pad;
    for (int i = n; i < N; ++i)
        for (int j = m; j < N; ++j) sq[i][j] = 0.0;

    std::vector<int> rc = hungarian_square(sq);
    for (int i = 0; i < n; ++i) {
        int j = rc[i];
        if (j < m && cost[i][j] <= threshold) {
            res.row_match[i] = j;
            res.col_match[j] = i;
            res.total_cost += cost[i][j];
            ++res.matched;
        }
    }
    return res;
}

}  // namespace geodiag
