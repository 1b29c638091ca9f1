#pragma once

// Zigzag filtration assembly and interval decomposition over GF(2), plus a
// rank-based Betti oracle.

#include <tuple>
#include <vector>

#include "dzp/complexes.hpp"
#include "dzp/temporal_graph.hpp"

namespace dzp {

enum class ArrowDir { forward, backward };
enum class Backend { dowker, vr };

// Complexes at positions 1, 1.5, 2, ..., w (length 2w-1). arrows[i] links
// complexes[i] and complexes[i+1]: forward means complexes[i] includes into
// complexes[i+1], backward the reverse.
struct ZigzagFiltration {
    std::vector<SimplicialComplex> complexes;
    std::vector<ArrowDir> arrows;
    int built_max_dim = 0;  // top simplex dimension the complexes were built with
};

// Interval of the zigzag module. Half-integer endpoints are stored doubled:
// birth_x2 = 2b, death_x2 = 2d. Features alive at the last complex carry
// death = w and the open flag.
struct Interval {
    int dim = 0;
    int birth_x2 = 0;
    int death_x2 = 0;
    bool open = false;

    auto key() const { return std::tie(dim, birth_x2, death_x2, open); }
    bool operator==(const Interval& o) const { return key() == o.key(); }
    bool operator<(const Interval& o) const { return key() < o.key(); }
};

struct PersistenceDiagram {
    std::vector<Interval> intervals;  // sorted by (dim, birth, death, open)
};

// beta_k = #k-simplices - rank d_k - rank d_{k+1} over GF(2).
std::vector<int> betti_numbers(const SimplicialComplex& c, int max_hom_dim);

// Interleaves per-snapshot complexes with union complexes at half
// positions. For the dowker backend the union complex is the Dowker
// complex of the merged landmark set over the union graph, joined with the
// two endpoint complexes so the inclusion invariant holds by construction.
ZigzagFiltration assemble_zigzag(const WindowSequence& window, Backend backend, int eps, int delta,
                                 int max_dim);

// Same, but reuses precomputed landmark partitions (one per snapshot,
// ignored by the vr backend).
ZigzagFiltration assemble_zigzag_with(const WindowSequence& window,
                                      const std::vector<LandmarkPartition>& parts,
                                      Backend backend, int delta, int max_dim);

// Checks the alternating inclusion invariant; throws InternalError naming
// the violating position.
void validate_filtration(const ZigzagFiltration& f);

// Interval decomposition via generalized-rank inclusion-exclusion: for each
// span [i,j] the rank of the canonical map lim -> colim of the restricted
// diagram is computed from homology bases and induced maps; multiplicities
// follow from rk(i,j) - rk(i-1,j) - rk(i,j+1) + rk(i-1,j+1).
PersistenceDiagram compute_zigzag_diagram(const ZigzagFiltration& f, int max_hom_dim);

// Number of intervals of the given dimension alive at position p (1-based
// among the 2w-1 complexes). Equals the Betti number there.
int intervals_covering(const PersistenceDiagram& d, int dim, int position);

}  // namespace dzp
