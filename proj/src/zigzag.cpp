#include "dzp/zigzag.hpp"

#include <algorithm>
#include <string>

#include "dzp/errors.hpp"
#include "dzp/gf2.hpp"
#include "dzp/landmarks.hpp"

namespace dzp {

namespace {

std::string position_name(std::size_t pos_zero_based) {
    auto time_x2 = pos_zero_based + 2;
    std::string s = std::to_string(time_x2 / 2);
    if (time_x2 % 2) s += ".5";
    return s;
}

// Columns of the boundary map d_k, each over the (k-1)-simplices. d_0 has
// zero-width columns, matching its zero rank.
std::vector<Gf2Vec> boundary_columns(const SimplicialComplex& c, int k) {
    std::vector<Gf2Vec> cols;
    if (k < 0 || c.count(k) == 0) return cols;
    const auto& simplices = c.by_dim[static_cast<std::size_t>(k)];
    const std::size_t face_count = k == 0 ? 0 : c.count(k - 1);

    for (const auto& simplex : simplices) {
        Gf2Vec col(face_count);
        if (k > 0) {
            const auto& faces = c.by_dim[static_cast<std::size_t>(k) - 1];
            std::vector<NodeId> face(simplex.size() - 1);
            for (std::size_t drop = 0; drop < simplex.size(); ++drop) {
                std::size_t out = 0;
                for (std::size_t i = 0; i < simplex.size(); ++i)
                    if (i != drop) face[out++] = simplex[i];
                auto it = std::lower_bound(faces.begin(), faces.end(), face);
                if (it == faces.end() || *it != face)
                    throw InternalError("complex is not face-closed");
                col.set(static_cast<std::size_t>(it - faces.begin()));
            }
        }
        cols.push_back(std::move(col));
    }
    return cols;
}

// Homology basis of one complex in one dimension: representative cycles
// plus a span that expresses any cycle in those representatives modulo
// boundaries.
struct HomologyBasis {
    std::size_t space_dim = 0;  // number of k-simplices
    std::vector<Gf2Vec> reps;
    Gf2Span expr;

    Gf2Vec express(Gf2Vec cycle) const {
        Gf2Vec coords(reps.size());
        expr.reduce(cycle, coords);
        if (cycle.any()) throw InternalError("vector is not a cycle of the complex");
        return coords;
    }
};

HomologyBasis build_homology_basis(const SimplicialComplex& c, int k) {
    HomologyBasis basis;
    basis.space_dim = c.count(k);
    if (basis.space_dim == 0) return basis;

    auto boundaries = boundary_columns(c, k + 1);

    std::vector<Gf2Vec> cycle_basis;
    if (k == 0) {
        for (std::size_t i = 0; i < basis.space_dim; ++i) {
            Gf2Vec e(basis.space_dim);
            e.set(i);
            cycle_basis.push_back(std::move(e));
        }
    } else {
        cycle_basis = gf2_nullspace(boundary_columns(c, k));
    }

    Gf2Span picker;
    for (const auto& b : boundaries) picker.insert(b);
    for (const auto& z : cycle_basis)
        if (picker.insert(z)) basis.reps.push_back(z);

    for (const auto& b : boundaries) basis.expr.insert(b, Gf2Vec(basis.reps.size()));
    for (std::size_t i = 0; i < basis.reps.size(); ++i) {
        Gf2Vec aug(basis.reps.size());
        aug.set(i);
        basis.expr.insert(basis.reps[i], std::move(aug));
    }
    return basis;
}

// Re-indexes a cycle of the smaller complex into the bigger one.
Gf2Vec include_cycle(const Gf2Vec& cycle, const SimplicialComplex& small,
                     const SimplicialComplex& big, int k) {
    Gf2Vec out(big.count(k));
    if (cycle.size() == 0) return out;
    const auto& small_list = small.by_dim[static_cast<std::size_t>(k)];
    const auto& big_list = big.by_dim[static_cast<std::size_t>(k)];
    for (std::size_t i : cycle.set_bits()) {
        auto it = std::lower_bound(big_list.begin(), big_list.end(), small_list[i]);
        if (it == big_list.end() || *it != small_list[i])
            throw InternalError("inclusion target misses a simplex");
        out.set(static_cast<std::size_t>(it - big_list.begin()));
    }
    return out;
}

// The zigzag module in one homology dimension: space dims per position and
// induced-map columns per arrow (source basis vector -> target coordinates).
struct QuiverRep {
    std::vector<std::size_t> dims;
    std::vector<ArrowDir> arrows;
    std::vector<std::vector<Gf2Vec>> maps;
};

QuiverRep build_quiver(const ZigzagFiltration& f, int k) {
    QuiverRep q;
    q.arrows = f.arrows;
    std::vector<HomologyBasis> bases;
    for (const auto& c : f.complexes) bases.push_back(build_homology_basis(c, k));
    for (const auto& b : bases) q.dims.push_back(b.reps.size());

    for (std::size_t a = 0; a < f.arrows.size(); ++a) {
        const bool fwd = f.arrows[a] == ArrowDir::forward;
        const auto& small = f.complexes[fwd ? a : a + 1];
        const auto& big = f.complexes[fwd ? a + 1 : a];
        const auto& small_basis = bases[fwd ? a : a + 1];
        const auto& big_basis = bases[fwd ? a + 1 : a];
        std::vector<Gf2Vec> cols;
        for (const auto& rep : small_basis.reps)
            cols.push_back(big_basis.express(include_cycle(rep, small, big, k)));
        q.maps.push_back(std::move(cols));
    }
    return q;
}

// Rank of the canonical map lim -> colim of the diagram restricted to
// positions [i, j] (0-based, inclusive). lim is the null space of the
// arrow-compatibility constraints; colim quotients the direct sum by the
// arrow identifications.
std::size_t canonical_rank(const QuiverRep& q, std::size_t i, std::size_t j) {
    std::vector<std::size_t> offset(j - i + 1, 0);
    std::size_t total = 0;
    for (std::size_t p = i; p <= j; ++p) {
        offset[p - i] = total;
        total += q.dims[p];
    }
    if (total == 0) return 0;

    std::size_t rows = 0;
    std::vector<std::size_t> row_base;
    for (std::size_t a = i; a < j; ++a) {
        row_base.push_back(rows);
        rows += q.dims[q.arrows[a] == ArrowDir::forward ? a + 1 : a];
    }

    // One constraint-matrix column per direct-sum coordinate.
    std::vector<Gf2Vec> constraint(total, Gf2Vec(rows));
    for (std::size_t a = i; a < j; ++a) {
        const bool fwd = q.arrows[a] == ArrowDir::forward;
        const std::size_t src = fwd ? a : a + 1;
        const std::size_t dst = fwd ? a + 1 : a;
        const std::size_t rb = row_base[a - i];
        for (std::size_t s = 0; s < q.dims[src]; ++s)
            for (std::size_t t : q.maps[a][s].set_bits())
                constraint[offset[src - i] + s].set(rb + t);
        for (std::size_t t = 0; t < q.dims[dst]; ++t)
            constraint[offset[dst - i] + t].set(rb + t);
    }
    auto lim_basis = gf2_nullspace(constraint);

    Gf2Span colim;
    for (std::size_t a = i; a < j; ++a) {
        const bool fwd = q.arrows[a] == ArrowDir::forward;
        const std::size_t src = fwd ? a : a + 1;
        const std::size_t dst = fwd ? a + 1 : a;
        for (std::size_t s = 0; s < q.dims[src]; ++s) {
            Gf2Vec rel(total);
            rel.set(offset[src - i] + s);
            for (std::size_t t : q.maps[a][s].set_bits()) rel.set(offset[dst - i] + t);
            colim.insert(std::move(rel));
        }
    }

    std::size_t rank = 0;
    for (const auto& lim_vec : lim_basis) {
        Gf2Vec image(total);
        for (std::size_t s = 0; s < q.dims[i]; ++s)
            if (lim_vec.test(s)) image.set(s);
        if (colim.insert(std::move(image))) ++rank;
    }
    return rank;
}

}  // namespace

std::vector<int> betti_numbers(const SimplicialComplex& c, int max_hom_dim) {
    std::vector<int> betti;
    for (int k = 0; k <= max_hom_dim; ++k) {
        auto count = static_cast<long>(c.count(k));
        auto rank_k = static_cast<long>(gf2_rank(boundary_columns(c, k)));
        auto rank_k1 = static_cast<long>(gf2_rank(boundary_columns(c, k + 1)));
        betti.push_back(static_cast<int>(count - rank_k - rank_k1));
    }
    return betti;
}

void validate_filtration(const ZigzagFiltration& f) {
    if (f.complexes.empty()) throw InternalError("filtration has no complexes");
    if (f.complexes.size() % 2 == 0) throw InternalError("filtration length must be odd");
    if (f.arrows.size() + 1 != f.complexes.size())
        throw InternalError("filtration arrow count does not match complex count");
    for (std::size_t a = 0; a < f.arrows.size(); ++a) {
        const bool expect_fwd = a % 2 == 0;
        if ((f.arrows[a] == ArrowDir::forward) != expect_fwd)
            throw InternalError("arrow direction pattern broken at position " + position_name(a));
        const bool fwd = f.arrows[a] == ArrowDir::forward;
        const auto& small = f.complexes[fwd ? a : a + 1];
        const auto& big = f.complexes[fwd ? a + 1 : a];
        if (!is_subcomplex(small, big))
            throw InternalError("subcomplex violation at position " +
                                position_name(fwd ? a : a + 1) + " into position " +
                                position_name(fwd ? a + 1 : a));
    }
}

ZigzagFiltration assemble_zigzag(const WindowSequence& window, Backend backend, int eps,
                                 int delta, int max_dim) {
    std::vector<LandmarkPartition> parts;
    if (backend == Backend::dowker) parts = seeded_epsilon_nets(window, eps);
    return assemble_zigzag_with(window, parts, backend, delta, max_dim);
}

ZigzagFiltration assemble_zigzag_with(const WindowSequence& window,
                                      const std::vector<LandmarkPartition>& parts,
                                      Backend backend, int delta, int max_dim) {
    if (window.snapshots.empty())
        throw ValidationError("window must contain at least one snapshot");
    if (max_dim < 0) throw ValidationError("max_dim must be >= 0");

    const auto& snaps = window.snapshots;
    std::vector<SimplicialComplex> at_snapshot;
    if (backend == Backend::dowker) {
        if (parts.size() != snaps.size())
            throw ValidationError("need one landmark partition per snapshot");
        for (std::size_t i = 0; i < snaps.size(); ++i)
            at_snapshot.push_back(build_dowker(parts[i], snaps[i], delta, max_dim));
    } else {
        for (const auto& s : snaps) at_snapshot.push_back(build_vietoris_rips(s, delta, max_dim));
    }

    ZigzagFiltration f;
    f.built_max_dim = max_dim;
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        if (i > 0) {
            Snapshot u = union_graph(snaps[i - 1], snaps[i]);
            SimplicialComplex uc;
            if (backend == Backend::dowker) {
                std::vector<NodeId> lu;
                std::set_union(parts[i - 1].landmarks.begin(), parts[i - 1].landmarks.end(),
                               parts[i].landmarks.begin(), parts[i].landmarks.end(),
                               std::back_inserter(lu));
                std::vector<NodeId> wu;
                std::set_difference(u.nodes.begin(), u.nodes.end(), lu.begin(), lu.end(),
                                    std::back_inserter(wu));
                // Joining the endpoint complexes keeps the inclusion
                // invariant independent of how the merged net interacts
                // with the union metric.
                uc = build_dowker_core(lu, wu, u, delta, max_dim);
                uc = complex_union(uc, at_snapshot[i - 1]);
                uc = complex_union(uc, at_snapshot[i]);
            } else {
                uc = build_vietoris_rips(u, delta, max_dim);
            }
            uc.label_x2 = 2 * static_cast<int>(i) + 1;  // position i + 0.5, one-based
            f.complexes.push_back(std::move(uc));
            f.arrows.push_back(ArrowDir::forward);
            f.arrows.push_back(ArrowDir::backward);
        }
        SimplicialComplex ci = at_snapshot[i];
        ci.label_x2 = 2 * static_cast<int>(i + 1);
        f.complexes.push_back(std::move(ci));
    }
    // The two arrows around each union were appended before the right
    // endpoint, so the global pattern is forward, backward, forward, ...
    validate_filtration(f);
    return f;
}

PersistenceDiagram compute_zigzag_diagram(const ZigzagFiltration& f, int max_hom_dim) {
    if (max_hom_dim < 0) throw ValidationError("max_hom_dim must be >= 0");
    if (max_hom_dim > f.built_max_dim - 1)
        throw ValidationError("max_hom_dim " + std::to_string(max_hom_dim) +
                              " needs complexes built to dimension " +
                              std::to_string(max_hom_dim + 1));
    validate_filtration(f);

    const std::size_t m = f.complexes.size();
    PersistenceDiagram out;
    for (int k = 0; k <= max_hom_dim; ++k) {
        QuiverRep q = build_quiver(f, k);

        std::vector<std::vector<std::size_t>> rk(m, std::vector<std::size_t>(m, 0));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) rk[i][j] = canonical_rank(q, i, j);
        auto rank_at = [&](std::ptrdiff_t i, std::ptrdiff_t j) -> long {
            if (i < 0 || j >= static_cast<std::ptrdiff_t>(m)) return 0;
            return static_cast<long>(rk[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        };

        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j) {
                auto si = static_cast<std::ptrdiff_t>(i);
                auto sj = static_cast<std::ptrdiff_t>(j);
                long mult = rank_at(si, sj) - rank_at(si - 1, sj) - rank_at(si, sj + 1) +
                            rank_at(si - 1, sj + 1);
                if (mult < 0) throw InternalError("negative interval multiplicity");
                if (mult == 0) continue;
                Interval iv;
                iv.dim = k;
                iv.birth_x2 = static_cast<int>(i) + 2;
                iv.open = j + 1 == m;
                iv.death_x2 = iv.open ? static_cast<int>(m) + 1 : static_cast<int>(j) + 3;
                for (long c = 0; c < mult; ++c) out.intervals.push_back(iv);
            }
    }
    std::sort(out.intervals.begin(), out.intervals.end());
    return out;
}

int intervals_covering(const PersistenceDiagram& d, int dim, int position) {
    int count = 0;
    const int time_x2 = position + 1;
    for (const auto& iv : d.intervals) {
        if (iv.dim != dim) continue;
        if (iv.birth_x2 > time_x2) continue;
        if (iv.open ? time_x2 <= iv.death_x2 : time_x2 < iv.death_x2) ++count;
    }
    return count;
}

}  // namespace dzp
