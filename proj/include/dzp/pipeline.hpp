#pragma once

// End-to-end orchestration: ingest -> snapshots -> noise -> windows ->
// zigzag diagrams -> ZPIs -> deltas -> learning rates, plus the on-disk
// artifact bundle.

#include <string>
#include <vector>

#include "dzp/adaptor.hpp"
#include "dzp/config.hpp"
#include "dzp/landmarks.hpp"
#include "dzp/temporal_graph.hpp"
#include "dzp/vectorize.hpp"
#include "dzp/zigzag.hpp"

namespace dzp {

struct PreparedData {
    TemporalGraph graph;
    std::vector<Snapshot> clean_snapshots;
    std::vector<Snapshot> snapshots;  // noise applied when configured
    bool noise_applied = false;
    SnapshotSplit split;  // resolved, only meaningful when noise_applied
};

PreparedData prepare_data(const PipelineConfig& cfg);

// First floor(fraction * T) snapshot indices train, the rest test.
SnapshotSplit fraction_split(int snapshot_count, double train_fraction);

std::vector<WindowSequence> build_windows(const std::vector<Snapshot>& snapshots,
                                          const PipelineConfig& cfg);

struct AnchorResult {
    int anchor = 0;
    std::vector<LandmarkPartition> partitions;  // one per window snapshot
    ZigzagFiltration filtration;
    PersistenceDiagram diagram;
};

// In-memory pipeline products. zpis and deltas are indexed per anchor (the
// delta at index i compares anchors[i-1] to anchors[i]; index 0 is empty).
struct PipelineArtifacts {
    PreparedData data;
    std::vector<AnchorResult> anchors;
    std::vector<double> thetas;  // per homology dimension
    std::vector<std::vector<PersistenceImage>> zpis;
    std::vector<std::vector<DeltaImage>> deltas;
    std::vector<double> learning_rates;  // aligned with anchors[1..]
};

// Diagram computation fans out over a work pool sized by DZP_THREADS;
// results are deterministic regardless of the pool width.
PipelineArtifacts compute_pipeline(const PipelineConfig& cfg);

struct PipelineResult {
    std::vector<std::string> files;  // bundle-relative, sorted
    std::string manifest_path;
    std::uint64_t config_hash = 0;
};

PipelineResult run_pipeline(const PipelineConfig& cfg);

struct AdaptRow {
    std::string schedule;  // live | window
    int anchor = 0;
    double r = 1.0;
    double loss_before = 0;
    double loss_after = 0;
};

// Meta-update loop of the toy edge scorer under both schedules: live
// updates on every step, window trains on the first 70% of anchors and
// freezes for the rest.
std::vector<AdaptRow> run_meta_schedules(const PipelineArtifacts& art, const PipelineConfig& cfg,
                                         double eta);

}  // namespace dzp
