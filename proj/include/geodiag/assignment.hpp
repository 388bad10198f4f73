#pragma once

// Optimal one-to-one matching between predicted and reference instances.

#include <vector>

namespace geodiag {

// Minimum-cost perfect assignment on a square cost matrix; returns the
// column chosen for each row. O(n^3), deterministic.
std::vector<int> hungarian_square(const std::vector<std::vector<double>>& cost);

struct AssignmentResult {
    std::vector<int> row_match;  // column index or -1
    std::vector<int> col_match;  // row index or -1
    double total_cost = 0.0;     // over matched pairs
    int matched = 0;
};

// Thresholded matching: only pairs with cost <= threshold may match; among
// those, cardinality is maximized first, then total cost minimized.
AssignmentResult assign_with_threshold(const std::vector<std::vector<double>>& cost,
                                       double threshold);

}  // namespace geodiag
