#include "dzp/metrics.hpp"

#include <algorithm>
#include <cstdlib>
#include <vector>

namespace dzp {

namespace {

// Costs live on a quarter-integer grid, so they are kept as integers scaled
// by 4: point-point = 2 * max coordinate delta (x2 units), diagonal =
// death_x2 - birth_x2.
struct Point {
    long b = 0;  // birth_x2
    long d = 0;  // death_x2
};

long pair_cost_x4(const Point& p, const Point& q) {
    return 2 * std::max(std::labs(p.b - q.b), std::labs(p.d - q.d));
}

long diag_cost_x4(const Point& p) { return p.d - p.b; }

std::vector<Point> points_of(const PersistenceDiagram& diagram, int dim) {
    std::vector<Point> pts;
    for (const auto& iv : diagram.intervals)
        if (iv.dim == dim) pts.push_back({iv.birth_x2, iv.death_x2});
    return pts;
}

// Perfect-matching feasibility at threshold c on the standard augmented
// bipartite graph: left = A-points plus |B| diagonal slots, right =
// B-points plus |A| diagonal slots; slot-slot edges are free.
bool feasible(const std::vector<Point>& a, const std::vector<Point>& b, long c) {
    const std::size_t na = a.size(), nb = b.size();
    const std::size_t total = na + nb;
    if (total == 0) return true;

    auto edge = [&](std::size_t left, std::size_t right) {
        const bool left_real = left < na;
        const bool right_real = right < nb;
        if (left_real && right_real) return pair_cost_x4(a[left], b[right]) <= c;
        if (left_real) return diag_cost_x4(a[left]) <= c;
        if (right_real) return diag_cost_x4(b[right]) <= c;
        return true;
    };

    std::vector<int> match_right(total, -1);
    std::vector<char> visited(total, 0);
    auto augment = [&](auto&& self, std::size_t left) -> bool {
        for (std::size_t right = 0; right < total; ++right) {
            if (visited[right] || !edge(left, right)) continue;
            visited[right] = 1;
            if (match_right[right] == -1 ||
                self(self, static_cast<std::size_t>(match_right[right]))) {
                match_right[right] = static_cast<int>(left);
                return true;
            }
        }
        return false;
    };

    for (std::size_t left = 0; left < total; ++left) {
        std::fill(visited.begin(), visited.end(), 0);
        if (!augment(augment, left)) return false;
    }
    return true;
}

}  // namespace

double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, int dim) {
    auto pa = points_of(a, dim);
    auto pb = points_of(b, dim);

    std::vector<long> candidates{0};
    for (const auto& p : pa) candidates.push_back(diag_cost_x4(p));
    for (const auto& q : pb) candidates.push_back(diag_cost_x4(q));
    for (const auto& p : pa)
        for (const auto& q : pb) candidates.push_back(pair_cost_x4(p, q));
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::size_t lo = 0, hi = candidates.size() - 1;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (feasible(pa, pb, candidates[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return static_cast<double>(candidates[lo]) / 4.0;
}

double bottleneck_distance_max(const PersistenceDiagram& a, const PersistenceDiagram& b,
                               int max_dim) {
    double best = 0.0;
    for (int k = 0; k <= max_dim; ++k) best = std::max(best, bottleneck_distance(a, b, k));
    return best;
}

}  // namespace dzp
