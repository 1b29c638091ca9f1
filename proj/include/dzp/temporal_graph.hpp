#pragma once

// Timestamped edge ingestion, snapshot partitioning, hop distances and
// edge-flip noise injection.

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace dzp {

using NodeId = int;

// Sentinel hop distance for unreachable pairs; compares greater than any
// finite threshold. Never used in arithmetic.
inline constexpr int kUnreachable = std::numeric_limits<int>::max();

struct TimedEdge {
    NodeId src = 0;
    NodeId dst = 0;
    std::int64_t timestamp = 0;
    double weight = 1.0;
};

struct TemporalGraph {
    std::vector<TimedEdge> edges;         // self-loops already filtered out
    std::vector<std::string> node_names;  // dense id -> label, first-appearance order
    std::size_t self_loops_dropped = 0;
};

// Undirected simple graph at one time step. nodes is strictly increasing,
// edges hold u < v and are strictly increasing lexicographically.
struct Snapshot {
    int index = 0;  // 1-based
    std::vector<NodeId> nodes;
    std::vector<std::pair<NodeId, NodeId>> edges;

    bool has_node(NodeId v) const;
    bool has_edge(NodeId u, NodeId v) const;
};

// Normalizes edge orientation, dedupes, derives nodes from endpoints plus
// extra_nodes. Rejects self-loops.
Snapshot make_snapshot(int index, std::vector<std::pair<NodeId, NodeId>> edges,
                       std::vector<NodeId> extra_nodes = {});

struct WindowSequence {
    std::vector<Snapshot> snapshots;
    int anchor = 0;  // index of the last snapshot
};

// Validates that snapshot indices are consecutive.
WindowSequence make_window(std::vector<Snapshot> snapshots);

enum class DirectedPolicy { symmetrize };

// CSV with header `src,dst,timestamp[,weight]`. Node labels are mapped to
// dense ids in first-appearance order over kept (non-self-loop) rows.
TemporalGraph ingest_edges(const std::string& path,
                           DirectedPolicy policy = DirectedPolicy::symmetrize);

struct Granularity {
    enum class Kind { seconds, count };
    Kind kind = Kind::seconds;
    std::int64_t value = 1;

    static Granularity seconds(std::int64_t s) { return {Kind::seconds, s}; }
    static Granularity count(std::int64_t c) { return {Kind::count, c}; }
};

std::vector<Snapshot> partition_snapshots(const TemporalGraph& g, Granularity granularity);

Snapshot union_graph(const Snapshot& a, const Snapshot& b);

struct DistanceTable {
    std::vector<NodeId> nodes;    // snapshot nodes, sorted
    std::vector<NodeId> sources;  // query order preserved
    std::vector<std::vector<int>> dist;  // dist[i][j] = hops sources[i] -> nodes[j]

    int at(NodeId source, NodeId target) const;
};

// BFS hop counts truncated at cutoff; entries beyond cutoff come back as
// kUnreachable.
DistanceTable hop_distances(const Snapshot& s, const std::vector<NodeId>& sources, int cutoff);

enum class NoiseMode { evasion, poisoning };

struct SnapshotSplit {
    std::vector<int> train_indices;
    std::vector<int> test_indices;
};

// Per affected snapshot, picks ceil(ratio * |V_t|) nodes by seed and
// complements the induced subgraph on the selected pairs. Evasion touches
// only test-index snapshots, poisoning touches all. Node sets are kept.
std::vector<Snapshot> inject_noise(const std::vector<Snapshot>& snapshots, NoiseMode mode,
                                   double ratio, const SnapshotSplit& split, std::uint64_t seed);

}  // namespace dzp
