#include "dzp/complexes.hpp"

#include <algorithm>
#include <set>

#include "dzp/errors.hpp"

namespace dzp {

namespace {

// Collects simplices per dimension with set semantics, then flattens into
// the canonical sorted form.
class ComplexBuilder {
public:
    void add_subsets(const std::vector<NodeId>& ball, int max_dim) {
        std::vector<NodeId> current;
        extend(ball, 0, current, max_dim);
    }

    void add_simplex(const std::vector<NodeId>& simplex) {
        auto dim = simplex.size() - 1;
        if (sets_.size() <= dim) sets_.resize(dim + 1);
        sets_[dim].insert(simplex);
    }

    SimplicialComplex finish(int label_x2) const {
        SimplicialComplex c;
        c.label_x2 = label_x2;
        for (const auto& dim_set : sets_)
            c.by_dim.emplace_back(dim_set.begin(), dim_set.end());
        while (!c.by_dim.empty() && c.by_dim.back().empty()) c.by_dim.pop_back();
        return c;
    }

private:
    void extend(const std::vector<NodeId>& ball, std::size_t from, std::vector<NodeId>& current,
                int max_dim) {
        if (!current.empty()) add_simplex(current);
        if (current.size() == static_cast<std::size_t>(max_dim) + 1) return;
        for (std::size_t i = from; i < ball.size(); ++i) {
            current.push_back(ball[i]);
            extend(ball, i + 1, current, max_dim);
            current.pop_back();
        }
    }

    std::vector<std::set<std::vector<NodeId>>> sets_;
};

}  // namespace

bool SimplicialComplex::contains(const std::vector<NodeId>& simplex) const {
    auto dim = simplex.size() - 1;
    if (dim >= by_dim.size()) return false;
    return std::binary_search(by_dim[dim].begin(), by_dim[dim].end(), simplex);
}

std::size_t SimplicialComplex::count(int dim) const {
    if (dim < 0 || static_cast<std::size_t>(dim) >= by_dim.size()) return 0;
    return by_dim[static_cast<std::size_t>(dim)].size();
}

int SimplicialComplex::max_dim() const { return static_cast<int>(by_dim.size()) - 1; }

bool is_subcomplex(const SimplicialComplex& small, const SimplicialComplex& big) {
    for (const auto& dim_list : small.by_dim)
        for (const auto& simplex : dim_list)
            if (!big.contains(simplex)) return false;
    return true;
}

SimplicialComplex complex_union(const SimplicialComplex& a, const SimplicialComplex& b) {
    SimplicialComplex u;
    u.label_x2 = a.label_x2;
    auto dims = std::max(a.by_dim.size(), b.by_dim.size());
    u.by_dim.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        const auto& lhs = d < a.by_dim.size() ? a.by_dim[d] : std::vector<std::vector<NodeId>>{};
        const auto& rhs = d < b.by_dim.size() ? b.by_dim[d] : std::vector<std::vector<NodeId>>{};
        std::set_union(lhs.begin(), lhs.end(), rhs.begin(), rhs.end(),
                       std::back_inserter(u.by_dim[d]));
    }
    while (!u.by_dim.empty() && u.by_dim.back().empty()) u.by_dim.pop_back();
    return u;
}

SimplicialComplex build_dowker_core(const std::vector<NodeId>& landmarks,
                                    const std::vector<NodeId>& witnesses,
                                    const Snapshot& metric_graph, int delta, int max_dim) {
    if (delta < 1) throw ValidationError("delta must be >= 1");
    if (max_dim < 0) throw ValidationError("max_dim must be >= 0");

    ComplexBuilder builder;
    if (!landmarks.empty() && !witnesses.empty()) {
        DistanceTable table = hop_distances(metric_graph, landmarks, delta);
        for (NodeId w : witnesses) {
            std::vector<NodeId> ball;
            for (NodeId l : landmarks)
                if (table.at(l, w) != kUnreachable) ball.push_back(l);
            builder.add_subsets(ball, max_dim);
        }
    }
    return builder.finish(2 * metric_graph.index);
}

SimplicialComplex build_dowker(const LandmarkPartition& p, const Snapshot& s, int delta,
                               int max_dim) {
    if (p.snapshot_index != s.index)
        throw ValidationError("landmark partition does not belong to snapshot " +
                              std::to_string(s.index));
    return build_dowker_core(p.landmarks, p.witnesses, s, delta, max_dim);
}

SimplicialComplex build_vietoris_rips(const Snapshot& s, int delta, int max_dim) {
    if (delta < 0) throw ValidationError("delta must be >= 0");
    if (max_dim < 0) throw ValidationError("max_dim must be >= 0");

    const auto n = s.nodes.size();
    std::vector<std::vector<bool>> close(n, std::vector<bool>(n, false));
    if (n > 0 && delta > 0) {
        DistanceTable table = hop_distances(s, s.nodes, delta);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && table.dist[i][j] != kUnreachable) close[i][j] = true;
    }

    ComplexBuilder builder;
    // Cliques of the delta-neighborhood graph, grown by ascending position
    // so each clique is found once.
    std::vector<std::size_t> clique;
    auto grow = [&](auto&& self, std::size_t from) -> void {
        if (!clique.empty()) {
            std::vector<NodeId> simplex;
            for (std::size_t i : clique) simplex.push_back(s.nodes[i]);
            builder.add_simplex(simplex);
        }
        if (clique.size() == static_cast<std::size_t>(max_dim) + 1) return;
        for (std::size_t cand = from; cand < n; ++cand) {
            bool ok = true;
            for (std::size_t member : clique)
                if (!close[member][cand]) {
                    ok = false;
                    break;
                }
            if (!ok) continue;
            clique.push_back(cand);
            self(self, cand + 1);
            clique.pop_back();
        }
    };
    grow(grow, 0);
    return builder.finish(2 * s.index);
}

}  // namespace dzp
