#pragma once

// Dowker and Vietoris-Rips complex construction over snapshots.

#include <vector>

#include "dzp/landmarks.hpp"
#include "dzp/temporal_graph.hpp"

namespace dzp {

// Simplices grouped by dimension. by_dim[k] holds the k-simplices as
// strictly sorted (k+1)-tuples, the list itself sorted lexicographically.
// label_x2 is the doubled filtration time (half-integers stay exact).
struct SimplicialComplex {
    std::vector<std::vector<std::vector<NodeId>>> by_dim;
    int label_x2 = 0;

    bool contains(const std::vector<NodeId>& simplex) const;
    std::size_t count(int dim) const;
    int max_dim() const;  // -1 when empty
    bool operator==(const SimplicialComplex& o) const { return by_dim == o.by_dim; }
};

bool is_subcomplex(const SimplicialComplex& small, const SimplicialComplex& big);

SimplicialComplex complex_union(const SimplicialComplex& a, const SimplicialComplex& b);

// Def-style Dowker complex: sigma over `landmarks` is a simplex iff some
// witness sits within delta of every vertex of sigma, distances taken in
// `metric_graph`. Built witness-by-witness so face closure is structural.
SimplicialComplex build_dowker_core(const std::vector<NodeId>& landmarks,
                                    const std::vector<NodeId>& witnesses,
                                    const Snapshot& metric_graph, int delta, int max_dim);

SimplicialComplex build_dowker(const LandmarkPartition& p, const Snapshot& s, int delta,
                               int max_dim);

// sigma is a simplex iff all pairwise hop distances are <= delta; clique
// enumeration on the delta-neighborhood graph.
SimplicialComplex build_vietoris_rips(const Snapshot& s, int delta, int max_dim);

}  // namespace dzp
