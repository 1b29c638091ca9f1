#pragma once

// Bottleneck distance between persistence diagrams.

#include "dzp/zigzag.hpp"

namespace dzp {

// Exact l-infinity bottleneck distance between the dim-k points of a and b.
// Unmatched points pay their diagonal cost (death - birth) / 2. Open
// intervals enter with their recorded finite coordinates. Computed by
// binary search over the finite candidate-cost set with a bipartite
// matching feasibility test.
double bottleneck_distance(const PersistenceDiagram& a, const PersistenceDiagram& b, int dim);

// Max over dimensions 0..max_dim.
double bottleneck_distance_max(const PersistenceDiagram& a, const PersistenceDiagram& b,
                               int max_dim);

}  // namespace dzp
