#pragma once

// Shared helpers for the unit and acceptance suites: temp files, random
// graph generation, and brute-force oracles kept deliberately independent
// of the library's internals.

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <fstream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dzp/adaptor.hpp"
#include "dzp/complexes.hpp"
#include "dzp/rng.hpp"
#include "dzp/temporal_graph.hpp"

namespace testutil {

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        dir_ = std::filesystem::temp_directory_path() /
               ("dzp_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    std::string root() const { return dir_.string(); }

private:
    std::filesystem::path dir_;
};

inline std::string write_file(const TempDir& dir, const std::string& name,
                              const std::string& content) {
    const std::string path = dir.path(name);
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Erdos-Renyi-ish random snapshot on nodes 0..n-1 with edge probability p.
inline dzp::Snapshot random_snapshot(int index, int n, double p, dzp::SplitMix64& rng) {
    std::vector<std::pair<dzp::NodeId, dzp::NodeId>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.uniform01() < p) edges.emplace_back(u, v);
    std::vector<dzp::NodeId> all(n);
    for (int v = 0; v < n; ++v) all[v] = v;
    return dzp::make_snapshot(index, std::move(edges), std::move(all));
}

// A random window of `count` consecutive snapshots that share the node set
// 0..n-1 but vary in edges (each evolves from the last by random flips).
inline dzp::WindowSequence random_window(int count, int n, double p, double flip,
                                         dzp::SplitMix64& rng) {
    std::vector<dzp::Snapshot> snaps;
    std::set<std::pair<dzp::NodeId, dzp::NodeId>> current;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.uniform01() < p) current.insert({u, v});
    for (int t = 1; t <= count; ++t) {
        if (t > 1) {
            for (int u = 0; u < n; ++u)
                for (int v = u + 1; v < n; ++v)
                    if (rng.uniform01() < flip) {
                        auto e = std::make_pair(u, v);
                        if (current.count(e))
                            current.erase(e);
                        else
                            current.insert(e);
                    }
        }
        std::vector<std::pair<dzp::NodeId, dzp::NodeId>> edges(current.begin(), current.end());
        std::vector<dzp::NodeId> all(n);
        for (int v = 0; v < n; ++v) all[v] = v;
        snaps.push_back(dzp::make_snapshot(t, std::move(edges), std::move(all)));
    }
    return dzp::make_window(std::move(snaps));
}

// Builds the face-closed complex generated by the given top simplices.
inline dzp::SimplicialComplex from_tops(const std::vector<std::vector<dzp::NodeId>>& tops,
                                        int label_x2) {
    std::set<std::vector<dzp::NodeId>> all;
    for (auto top : tops) {
        std::sort(top.begin(), top.end());
        const unsigned full = (1u << top.size()) - 1;
        for (unsigned mask = 1; mask <= full; ++mask) {
            std::vector<dzp::NodeId> face;
            for (std::size_t i = 0; i < top.size(); ++i)
                if (mask & (1u << i)) face.push_back(top[i]);
            all.insert(face);
        }
    }
    dzp::SimplicialComplex c;
    c.label_x2 = label_x2;
    for (const auto& simplex : all) {
        int dim = static_cast<int>(simplex.size()) - 1;
        if (static_cast<int>(c.by_dim.size()) <= dim) c.by_dim.resize(dim + 1);
        c.by_dim[dim].push_back(simplex);
    }
    for (auto& level : c.by_dim) std::sort(level.begin(), level.end());
    return c;
}

inline dzp::ImageStack random_stack(int channels, int size, dzp::SplitMix64& rng) {
    dzp::ImageStack x;
    x.size = size;
    x.channels = channels;
    x.data.resize(static_cast<std::size_t>(channels) * size * size);
    for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
    return x;
}

inline dzp::AdaptorNetwork random_net(int channels, int size, dzp::SplitMix64& rng) {
    auto net = dzp::make_adaptor(channels, size, rng.next());
    auto flat = dzp::flatten_parameters(net);
    for (auto& v : flat) v = rng.uniform(-0.5, 0.5);
    dzp::set_parameters(net, flat);
    return net;
}

// Straightforward re-implementation of the forward pass, kept deliberately
// naive. Also reports the smallest |pre-activation| so tests can skip
// relu-kink-adjacent instances before finite differencing.
inline double naive_adaptor_forward(const dzp::AdaptorNetwork& net, const dzp::ImageStack& x, double* min_preact) {
    const int n = net.image_size;
    const int hid = net.hidden;
    const int in = net.in_channels;
    auto conv_at = [&](const std::vector<double>& w, const std::vector<double>& b,
                       const std::vector<double>& src, int src_ch, int o, int y, int c) {
        double acc = b[static_cast<std::size_t>(o)];
        for (int i = 0; i < src_ch; ++i)
            for (int ky = 0; ky < 3; ++ky)
                for (int kx = 0; kx < 3; ++kx) {
                    int yy = y + ky - 1, xx = c + kx - 1;
                    if (yy < 0 || yy >= n || xx < 0 || xx >= n) continue;
                    acc += w[((static_cast<std::size_t>(o) * src_ch + i) * 3 + ky) * 3 + kx] *
                           src[(static_cast<std::size_t>(i) * n + yy) * n + xx];
                }
        return acc;
    };
    double min_abs = 1e300;
    std::vector<double> a1(static_cast<std::size_t>(hid) * n * n);
    for (int o = 0; o < hid; ++o)
        for (int y = 0; y < n; ++y)
            for (int c = 0; c < n; ++c) {
                double z = conv_at(net.conv1_w, net.conv1_b, x.data, in, o, y, c);
                min_abs = std::min(min_abs, std::abs(z));
                a1[(static_cast<std::size_t>(o) * n + y) * n + c] = std::max(0.0, z);
            }
    double pooled_dot = 0;
    for (int o = 0; o < hid; ++o) {
        double acc = 0;
        for (int y = 0; y < n; ++y)
            for (int c = 0; c < n; ++c) {
                double z2 = conv_at(net.conv2_w, net.conv2_b, a1, hid, o, y, c);
                double res;
                if (net.has_projection) {
                    res = net.proj_b[static_cast<std::size_t>(o)];
                    for (int i = 0; i < in; ++i)
                        res += net.proj_w[static_cast<std::size_t>(o) * in + i] *
                               x.data[(static_cast<std::size_t>(i) * n + y) * n + c];
                } else {
                    res = x.data[(static_cast<std::size_t>(o) * n + y) * n + c];
                }
                double s = z2 + res;
                min_abs = std::min(min_abs, std::abs(s));
                acc += std::max(0.0, s);
            }
        pooled_dot += net.dense_w[static_cast<std::size_t>(o)] * (acc / (n * n));
    }
    double z = pooled_dot + net.dense_b;
    if (min_preact) *min_preact = min_abs;
    return 2.0 / (1.0 + std::exp(-z));
}

// Floyd-Warshall hop distances, independent of the library BFS.
inline std::vector<std::vector<int>> all_pairs_hops(const dzp::Snapshot& s) {
    const int n = static_cast<int>(s.nodes.size());
    const int inf = 1 << 28;
    std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
    auto pos = [&](dzp::NodeId v) {
        return static_cast<int>(std::lower_bound(s.nodes.begin(), s.nodes.end(), v) -
                                s.nodes.begin());
    };
    for (int i = 0; i < n; ++i) d[i][i] = 0;
    for (const auto& [u, v] : s.edges) d[pos(u)][pos(v)] = d[pos(v)][pos(u)] = 1;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    return d;
}

// Direct Dowker definition check: sigma over L is a simplex iff some witness
// w has d(l, w) <= delta for every l in sigma. Enumerates every subset.
inline dzp::SimplicialComplex brute_force_dowker(const std::vector<dzp::NodeId>& landmarks,
                                                 const std::vector<dzp::NodeId>& witnesses,
                                                 const dzp::Snapshot& s, int delta, int max_dim) {
    auto d = all_pairs_hops(s);
    auto pos = [&](dzp::NodeId v) {
        return static_cast<std::size_t>(
            std::lower_bound(s.nodes.begin(), s.nodes.end(), v) - s.nodes.begin());
    };
    dzp::SimplicialComplex out;
    const int ln = static_cast<int>(landmarks.size());
    const int inf = 1 << 28;
    for (unsigned mask = 1; mask < (1u << ln); ++mask) {
        std::vector<dzp::NodeId> sigma;
        for (int i = 0; i < ln; ++i)
            if (mask & (1u << i)) sigma.push_back(landmarks[i]);
        if (static_cast<int>(sigma.size()) > max_dim + 1) continue;
        bool witnessed = false;
        for (dzp::NodeId w : witnesses) {
            bool ok = true;
            for (dzp::NodeId l : sigma) {
                int dist = d[pos(l)][pos(w)];
                if (dist >= inf || dist > delta) ok = false;
            }
            if (ok) witnessed = true;
        }
        if (!witnessed) continue;
        int dim = static_cast<int>(sigma.size()) - 1;
        if (static_cast<int>(out.by_dim.size()) <= dim) out.by_dim.resize(dim + 1);
        out.by_dim[dim].push_back(sigma);
    }
    for (auto& level : out.by_dim) std::sort(level.begin(), level.end());
    while (!out.by_dim.empty() && out.by_dim.back().empty()) out.by_dim.pop_back();
    return out;
}

// Exhaustive minimum over all partial matchings between two diagrams given
// as (birth_x2, death_x2) lists, in x4 integer cost units.
inline long bottleneck_brute_force_x4(const std::vector<std::pair<int, int>>& a,
                                      const std::vector<std::pair<int, int>>& b) {
    const long kInf = 1L << 60;
    std::vector<bool> used(b.size(), false);
    long best = kInf;
    auto diag = [](const std::pair<int, int>& p) { return static_cast<long>(p.second - p.first); };
    auto pair_cost = [](const std::pair<int, int>& p, const std::pair<int, int>& q) {
        return 2L * std::max(std::labs(p.first - q.first), std::labs(p.second - q.second));
    };
    std::function<void(std::size_t, long)> rec = [&](std::size_t i, long cost) {
        if (cost >= best) return;
        if (i == a.size()) {
            long total = cost;
            for (std::size_t j = 0; j < b.size(); ++j)
                if (!used[j]) total = std::max(total, diag(b[j]));
            best = std::min(best, total);
            return;
        }
        rec(i + 1, std::max(cost, diag(a[i])));
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            used[j] = true;
            rec(i + 1, std::max(cost, pair_cost(a[i], b[j])));
            used[j] = false;
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace testutil
