#include "dzp/landmarks.hpp"

#include <algorithm>
#include <set>

#include "dzp/errors.hpp"

namespace dzp {

LandmarkPartition epsilon_net(const Snapshot& s, int eps, const std::vector<NodeId>& seeds) {
    if (eps < 1) throw ValidationError("eps must be >= 1");
    if (s.nodes.empty())
        throw ValidationError("snapshot " + std::to_string(s.index) + " is empty");

    const auto n = s.nodes.size();
    // within[i][j]: d(nodes[i], nodes[j]) <= eps. BFS truncated at eps makes
    // the test a simple reachability check.
    DistanceTable table = hop_distances(s, s.nodes, eps);
    auto within = [&](std::size_t i, std::size_t j) { return table.dist[i][j] != kUnreachable; };

    std::vector<std::size_t> degree(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && within(i, j)) ++degree[i];

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (degree[a] != degree[b]) return degree[a] > degree[b];
        return s.nodes[a] < s.nodes[b];
    });

    std::vector<std::size_t> picked;
    auto separated = [&](std::size_t cand) {
        for (std::size_t l : picked)
            if (within(cand, l)) return false;
        return true;
    };
    auto is_picked = [&](std::size_t cand) {
        return std::find(picked.begin(), picked.end(), cand) != picked.end();
    };

    std::set<NodeId> seed_set;
    for (NodeId v : seeds)
        if (s.has_node(v)) seed_set.insert(v);
    if (!seed_set.empty()) {
        // The best seed enters unconditionally; the rest follow degree order
        // under the separation rule.
        std::vector<std::size_t> seed_order;
        for (std::size_t i : order)
            if (seed_set.count(s.nodes[i])) seed_order.push_back(i);
        picked.push_back(seed_order.front());
        for (std::size_t i = 1; i < seed_order.size(); ++i)
            if (separated(seed_order[i])) picked.push_back(seed_order[i]);
    }

    for (std::size_t cand : order)
        if (!is_picked(cand) && separated(cand)) picked.push_back(cand);

    LandmarkPartition p;
    p.snapshot_index = s.index;
    p.eps = eps;
    for (std::size_t i : picked) p.landmarks.push_back(s.nodes[i]);
    std::sort(p.landmarks.begin(), p.landmarks.end());
    std::set_difference(s.nodes.begin(), s.nodes.end(), p.landmarks.begin(), p.landmarks.end(),
                        std::back_inserter(p.witnesses));
    return p;
}

std::vector<LandmarkPartition> seeded_epsilon_nets(const WindowSequence& window, int eps) {
    std::vector<LandmarkPartition> out;
    out.reserve(window.snapshots.size());
    for (const auto& s : window.snapshots) {
        std::vector<NodeId> seeds;
        if (!out.empty()) {
            for (NodeId l : out.back().landmarks)
                if (s.has_node(l)) seeds.push_back(l);
        }
        out.push_back(epsilon_net(s, eps, seeds));
    }
    return out;
}

}  // namespace dzp
