#pragma once

#include <vector>

namespace hjb {

inline constexpr int kMaxGllOrder = 32;

struct LegendreValue {
    double value;
    double derivative;
};

/// L_n(x) and L_n'(x) from the three-term recurrence. x may lie outside [-1,1].
LegendreValue legendre_eval(int n, double x);

/// Gauss-Lobatto-Legendre rule of order M on [-1,1]: M+1 nodes including
/// both endpoints, the interior ones being the zeros of L_M'.
struct GllRule {
    int order = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
    /// Barycentric Lagrange weights 1 / prod_{k != j} (eta_j - eta_k).
    std::vector<double> barycentric;

    int point_count() const { return order + 1; }
};

/// Builds the rule for 1 <= order <= kMaxGllOrder; throws ErrorCode::invalid_order otherwise.
GllRule gll_rule(int order);

}  // namespace hjb
