#include "dzp/temporal_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include "dzp/errors.hpp"
#include "dzp/rng.hpp"

namespace dzp {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(trim(line.substr(start)));
            break;
        }
        out.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return out;
}

std::int64_t parse_timestamp(const std::string& path, const std::string& field,
                             std::size_t line_no) {
    std::size_t pos = 0;
    std::int64_t value = 0;
    try {
        value = std::stoll(field, &pos);
    } catch (const std::exception&) {
        throw ValidationError(path + ": line " + std::to_string(line_no) + ": bad timestamp '" + field + "'");
    }
    if (pos != field.size())
        throw ValidationError(path + ": line " + std::to_string(line_no) + ": bad timestamp '" + field + "'");
    if (value < 0)
        throw ValidationError(path + ": line " + std::to_string(line_no) + ": negative timestamp");
    return value;
}

double parse_weight(const std::string& path, const std::string& field, std::size_t line_no) {
    std::size_t pos = 0;
    double value = 0;
    try {
        value = std::stod(field, &pos);
    } catch (const std::exception&) {
        throw ValidationError(path + ": line " + std::to_string(line_no) + ": bad weight '" + field + "'");
    }
    if (pos != field.size() || !std::isfinite(value))
        throw ValidationError(path + ": line " + std::to_string(line_no) + ": bad weight '" + field + "'");
    return value;
}

}  // namespace

bool Snapshot::has_node(NodeId v) const {
    return std::binary_search(nodes.begin(), nodes.end(), v);
}

bool Snapshot::has_edge(NodeId u, NodeId v) const {
    if (u > v) std::swap(u, v);
    return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
}

Snapshot make_snapshot(int index, std::vector<std::pair<NodeId, NodeId>> edges,
                       std::vector<NodeId> extra_nodes) {
    Snapshot s;
    s.index = index;
    for (auto& [u, v] : edges) {
        if (u == v)
            throw ValidationError("snapshot " + std::to_string(index) + ": self-loop on node " +
                                  std::to_string(u));
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    s.edges = std::move(edges);

    std::vector<NodeId> nodes = std::move(extra_nodes);
    for (const auto& [u, v] : s.edges) {
        nodes.push_back(u);
        nodes.push_back(v);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    s.nodes = std::move(nodes);
    return s;
}

WindowSequence make_window(std::vector<Snapshot> snapshots) {
    if (snapshots.empty()) throw ValidationError("window must contain at least one snapshot");
    for (std::size_t i = 1; i < snapshots.size(); ++i)
        if (snapshots[i].index != snapshots[i - 1].index + 1)
            throw ValidationError("window snapshot indices must be consecutive");
    WindowSequence w;
    w.anchor = snapshots.back().index;
    w.snapshots = std::move(snapshots);
    return w;
}

TemporalGraph ingest_edges(const std::string& path, DirectedPolicy) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open edge file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw ValidationError(path + ": empty file");

    auto header = split_csv(line);
    bool has_weight;
    if (header.size() == 3 && header[0] == "src" && header[1] == "dst" && header[2] == "timestamp")
        has_weight = false;
    else if (header.size() == 4 && header[0] == "src" && header[1] == "dst" &&
             header[2] == "timestamp" && header[3] == "weight")
        has_weight = true;
    else
        throw ValidationError(path + ": line 1: expected header src,dst,timestamp[,weight]");

    TemporalGraph g;
    std::unordered_map<std::string, NodeId> ids;
    auto intern = [&](const std::string& name) {
        auto [it, inserted] = ids.emplace(name, static_cast<NodeId>(g.node_names.size()));
        if (inserted) g.node_names.push_back(name);
        return it->second;
    };

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv(line);
        if (fields.size() != header.size())
            throw ValidationError(path + ": line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(header.size()) + " fields, got " +
                                  std::to_string(fields.size()));
        if (fields[0].empty() || fields[1].empty())
            throw ValidationError(path + ": line " + std::to_string(line_no) + ": empty node id");
        if (fields[0] == fields[1]) {
            ++g.self_loops_dropped;
            continue;
        }
        TimedEdge e;
        e.timestamp = parse_timestamp(path, fields[2], line_no);
        e.weight = has_weight ? parse_weight(path, fields[3], line_no) : 1.0;
        e.src = intern(fields[0]);
        e.dst = intern(fields[1]);
        g.edges.push_back(e);
    }
    if (g.edges.empty()) throw ValidationError(path + ": no edges");
    return g;
}

std::vector<Snapshot> partition_snapshots(const TemporalGraph& g, Granularity granularity) {
    if (granularity.value <= 0) throw ValidationError("granularity must be positive");

    std::vector<std::vector<std::pair<NodeId, NodeId>>> buckets;
    if (granularity.kind == Granularity::Kind::seconds) {
        std::map<std::int64_t, std::vector<std::pair<NodeId, NodeId>>> by_bucket;
        for (const auto& e : g.edges)
            by_bucket[e.timestamp / granularity.value].push_back({e.src, e.dst});
        for (auto& [bucket, edges] : by_bucket) {
            (void)bucket;
            buckets.push_back(std::move(edges));
        }
    } else {
        std::vector<std::size_t> order(g.edges.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return g.edges[a].timestamp < g.edges[b].timestamp;
        });
        const auto chunk = static_cast<std::size_t>(granularity.value);
        for (std::size_t start = 0; start < order.size(); start += chunk) {
            std::vector<std::pair<NodeId, NodeId>> edges;
            for (std::size_t i = start; i < std::min(start + chunk, order.size()); ++i)
                edges.push_back({g.edges[order[i]].src, g.edges[order[i]].dst});
            buckets.push_back(std::move(edges));
        }
    }

    std::vector<Snapshot> out;
    for (auto& edges : buckets)
        out.push_back(make_snapshot(static_cast<int>(out.size()) + 1, std::move(edges)));
    if (out.empty()) throw ValidationError("partition produced zero snapshots");
    return out;
}

Snapshot union_graph(const Snapshot& a, const Snapshot& b) {
    Snapshot u;
    u.index = a.index;
    std::set_union(a.nodes.begin(), a.nodes.end(), b.nodes.begin(), b.nodes.end(),
                   std::back_inserter(u.nodes));
    std::set_union(a.edges.begin(), a.edges.end(), b.edges.begin(), b.edges.end(),
                   std::back_inserter(u.edges));
    return u;
}

int DistanceTable::at(NodeId source, NodeId target) const {
    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (sources[i] != source) continue;
        auto it = std::lower_bound(nodes.begin(), nodes.end(), target);
        if (it == nodes.end() || *it != target)
            throw ValidationError("distance query for node not in snapshot: " +
                                  std::to_string(target));
        return dist[i][static_cast<std::size_t>(it - nodes.begin())];
    }
    throw ValidationError("distance query for unknown source: " + std::to_string(source));
}

DistanceTable hop_distances(const Snapshot& s, const std::vector<NodeId>& sources, int cutoff) {
    if (cutoff < 0) throw ValidationError("cutoff must be non-negative");

    DistanceTable table;
    table.nodes = s.nodes;
    table.sources = sources;

    auto pos_of = [&](NodeId v) {
        auto it = std::lower_bound(s.nodes.begin(), s.nodes.end(), v);
        if (it == s.nodes.end() || *it != v)
            throw ValidationError("node not in snapshot: " + std::to_string(v));
        return static_cast<std::size_t>(it - s.nodes.begin());
    };

    std::vector<std::vector<std::size_t>> adj(s.nodes.size());
    for (const auto& [u, v] : s.edges) {
        auto pu = pos_of(u), pv = pos_of(v);
        adj[pu].push_back(pv);
        adj[pv].push_back(pu);
    }

    for (NodeId src : sources) {
        std::vector<int> dist(s.nodes.size(), kUnreachable);
        std::deque<std::size_t> queue;
        dist[pos_of(src)] = 0;
        queue.push_back(pos_of(src));
        while (!queue.empty()) {
            std::size_t u = queue.front();
            queue.pop_front();
            if (dist[u] == cutoff) continue;
            for (std::size_t v : adj[u]) {
                if (dist[v] != kUnreachable) continue;
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
        table.dist.push_back(std::move(dist));
    }
    return table;
}

std::vector<Snapshot> inject_noise(const std::vector<Snapshot>& snapshots, NoiseMode mode,
                                   double ratio, const SnapshotSplit& split, std::uint64_t seed) {
    if (ratio < 0.0 || ratio > 1.0) throw ValidationError("noise ratio must be in [0, 1]");

    std::set<int> train(split.train_indices.begin(), split.train_indices.end());
    std::set<int> test(split.test_indices.begin(), split.test_indices.end());
    std::set<int> all;
    for (const auto& s : snapshots) all.insert(s.index);
    for (int t : train)
        if (test.count(t)) throw ValidationError("split indices overlap at " + std::to_string(t));
    std::set<int> merged = train;
    merged.insert(test.begin(), test.end());
    if (merged != all) throw ValidationError("split must partition the snapshot indices");

    std::vector<Snapshot> out;
    out.reserve(snapshots.size());
    for (const auto& s : snapshots) {
        bool affected = mode == NoiseMode::poisoning || test.count(s.index) > 0;
        if (!affected || ratio == 0.0 || s.nodes.empty()) {
            out.push_back(s);
            continue;
        }
        // Epsilon guard absorbs FP noise in ratio * n (0.1 * 30 rounds above 3).
        auto n = static_cast<double>(s.nodes.size());
        auto want = static_cast<std::size_t>(std::ceil(ratio * n - 1e-9));
        want = std::min(want, s.nodes.size());

        std::vector<NodeId> pool = s.nodes;
        SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(s.index)));
        rng.partial_shuffle(pool, want);
        std::vector<NodeId> selected(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(want));
        std::sort(selected.begin(), selected.end());

        Snapshot flipped = s;
        std::set<std::pair<NodeId, NodeId>> edges(s.edges.begin(), s.edges.end());
        for (std::size_t i = 0; i < selected.size(); ++i)
            for (std::size_t j = i + 1; j < selected.size(); ++j) {
                auto pair = std::make_pair(selected[i], selected[j]);
                if (!edges.erase(pair)) edges.insert(pair);
            }
        flipped.edges.assign(edges.begin(), edges.end());
        out.push_back(std::move(flipped));
    }
    return out;
}

}  // namespace dzp
