#pragma once

// Maximal epsilon-nets per snapshot and seed-consistent nets across a
// window. Landmarks drive the Dowker complex construction.

#include <vector>

#include "dzp/temporal_graph.hpp"

namespace dzp {

struct LandmarkPartition {
    int snapshot_index = 0;
    std::vector<NodeId> landmarks;  // sorted
    std::vector<NodeId> witnesses;  // sorted, = nodes \ landmarks
    int eps = 1;
};

// Greedy net: nodes ordered by (eps-degree descending, id ascending). When
// seeds are given, the highest-degree seed enters first unconditionally;
// remaining seeds and then all nodes are added subject to pairwise
// separation > eps. Seeds outside the snapshot are dropped.
LandmarkPartition epsilon_net(const Snapshot& s, int eps, const std::vector<NodeId>& seeds = {});

// First snapshot unseeded; each later one seeded with the previous
// snapshot's landmarks intersected with its own nodes.
std::vector<LandmarkPartition> seeded_epsilon_nets(const WindowSequence& window, int eps);

}  // namespace dzp
