#include "dzp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "dzp/errors.hpp"
#include "dzp/io.hpp"
#include "dzp/rng.hpp"

namespace dzp {

namespace {

// Re-raises stage failures with the stage name and snapshot index so a
// deep error is attributable from the CLI.
template <typename F>
auto stage(const std::string& name, int anchor, F&& f) {
    const std::string where =
        anchor > 0 ? name + " (snapshot " + std::to_string(anchor) + ")" : name;
    try {
        return f();
    } catch (const ValidationError& e) {
        throw ValidationError("stage " + where + ": " + e.what());
    } catch (const InternalError& e) {
        throw InternalError("stage " + where + ": " + e.what());
    }
}

std::size_t pool_width(std::size_t jobs) {
    const char* env = std::getenv("DZP_THREADS");
    long width = 0;
    if (env) width = std::atol(env);
    if (width < 1) {
        width = static_cast<long>(std::thread::hardware_concurrency());
        if (width < 1) width = 1;
        width = std::min(width, 8L);
    }
    return std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(width), jobs));
}

int position_label_x2(const ZigzagFiltration& f, std::size_t i) { return f.complexes[i].label_x2; }

}  // namespace

SnapshotSplit fraction_split(int snapshot_count, double train_fraction) {
    SnapshotSplit split;
    const int train_count =
        static_cast<int>(std::floor(train_fraction * snapshot_count + 1e-9));
    for (int t = 1; t <= snapshot_count; ++t)
        (t <= train_count ? split.train_indices : split.test_indices).push_back(t);
    return split;
}

PreparedData prepare_data(const PipelineConfig& cfg) {
    PreparedData data;
    data.graph = stage("ingest", 0, [&] { return ingest_edges(cfg.input_path); });
    data.clean_snapshots =
        stage("partition", 0, [&] { return partition_snapshots(data.graph, cfg.granularity); });
    data.snapshots = data.clean_snapshots;
    if (cfg.noise && cfg.noise->ratio > 0) {
        const auto& n = *cfg.noise;
        data.split = n.explicit_split
                         ? SnapshotSplit{n.train_indices, n.test_indices}
                         : fraction_split(static_cast<int>(data.snapshots.size()),
                                          n.train_fraction);
        data.snapshots = stage("noise", 0, [&] {
            return inject_noise(data.clean_snapshots, n.mode, n.ratio, data.split, n.seed);
        });
        data.noise_applied = true;
    }
    return data;
}

std::vector<WindowSequence> build_windows(const std::vector<Snapshot>& snapshots,
                                          const PipelineConfig& cfg) {
    const int total = static_cast<int>(snapshots.size());
    const int w = cfg.window_full ? total : cfg.window;
    if (w > total)
        throw ValidationError("window " + std::to_string(w) + " exceeds snapshot count " +
                              std::to_string(total));
    std::vector<WindowSequence> windows;
    for (int anchor = w; anchor <= total; ++anchor) {
        std::vector<Snapshot> slice(snapshots.begin() + (anchor - w), snapshots.begin() + anchor);
        windows.push_back(make_window(std::move(slice)));
    }
    return windows;
}

PipelineArtifacts compute_pipeline(const PipelineConfig& cfg) {
    PipelineArtifacts art;
    art.data = prepare_data(cfg);
    auto windows = build_windows(art.data.snapshots, cfg);

    // Diagrams are independent per anchor; the writes stay ordered because
    // results land in preallocated slots.
    art.anchors.resize(windows.size());
    std::vector<std::exception_ptr> failures(windows.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= windows.size()) return;
            try {
                AnchorResult res;
                res.anchor = windows[i].anchor;
                res.partitions = stage("landmarks", res.anchor,
                                       [&] { return seeded_epsilon_nets(windows[i], cfg.eps); });
                res.filtration = stage("complexes", res.anchor, [&] {
                    return assemble_zigzag_with(windows[i], res.partitions, cfg.backend,
                                                cfg.delta, cfg.max_hom_dim + 1);
                });
                res.diagram = stage("zigzag", res.anchor, [&] {
                    return compute_zigzag_diagram(res.filtration, cfg.max_hom_dim);
                });
                art.anchors[i] = std::move(res);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const std::size_t width = pool_width(windows.size());
    if (width <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < width; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (const auto& failure : failures)
        if (failure) std::rethrow_exception(failure);

    // Bandwidth is resolved once per dimension over every anchor's points,
    // so images of different anchors stay comparable.
    for (int k = 0; k <= cfg.max_hom_dim; ++k) {
        if (!cfg.zpi.theta_auto) {
            art.thetas.push_back(cfg.zpi.theta);
            continue;
        }
        std::vector<BPPoint> all_points;
        for (const auto& a : art.anchors) {
            auto pts = transform_diagram(a.diagram, k);
            all_points.insert(all_points.end(), pts.begin(), pts.end());
        }
        art.thetas.push_back(default_theta(all_points));
    }

    for (const auto& a : art.anchors) {
        std::vector<PersistenceImage> per_dim;
        for (int k = 0; k <= cfg.max_hom_dim; ++k) {
            auto img = stage("zpi", a.anchor, [&] {
                return render_zpi(transform_diagram(a.diagram, k), cfg.zpi.size,
                                  art.thetas[static_cast<std::size_t>(k)], cfg.zpi.bounds);
            });
            img.dim = k;
            per_dim.push_back(std::move(img));
        }
        art.zpis.push_back(std::move(per_dim));
    }

    art.deltas.resize(art.anchors.size());
    for (std::size_t i = 1; i < art.anchors.size(); ++i)
        for (int k = 0; k <= cfg.max_hom_dim; ++k)
            art.deltas[i].push_back(stage("delta", art.anchors[i].anchor, [&] {
                return delta_zpi(art.zpis[i - 1][static_cast<std::size_t>(k)],
                                 art.zpis[i][static_cast<std::size_t>(k)]);
            }));

    if (art.anchors.size() > 1) {
        AdaptorNetwork net = make_adaptor(cfg.max_hom_dim + 1, cfg.zpi.size, cfg.seed);
        for (std::size_t i = 1; i < art.anchors.size(); ++i) {
            auto score = stage("adapt", art.anchors[i].anchor, [&] {
                return adaptor_forward(net, ImageStack::from_deltas(art.deltas[i]));
            });
            art.learning_rates.push_back(score);
        }
    }
    return art;
}

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    PipelineArtifacts art = compute_pipeline(cfg);

    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    auto path_of = [&](const std::string& name) {
        return (fs::path(cfg.output_dir) / name).string();
    };

    PipelineResult result;
    auto emit = [&](const std::string& name) { result.files.push_back(name); };

    {
        std::ofstream out(path_of("nodes.csv"));
        if (!out) throw ValidationError("cannot write file: " + path_of("nodes.csv"));
        out << "id,label\n";
        for (std::size_t i = 0; i < art.data.graph.node_names.size(); ++i)
            out << i << ',' << art.data.graph.node_names[i] << '\n';
        emit("nodes.csv");
    }
    {
        std::ofstream out(path_of("snapshots.csv"));
        if (!out) throw ValidationError("cannot write file: " + path_of("snapshots.csv"));
        out << "snapshot,nodes,edges\n";
        for (const auto& s : art.data.snapshots)
            out << s.index << ',' << s.nodes.size() << ',' << s.edges.size() << '\n';
        emit("snapshots.csv");
    }

    for (std::size_t i = 0; i < art.anchors.size(); ++i) {
        const auto& a = art.anchors[i];
        const std::string tag = "a" + std::to_string(a.anchor);

        write_landmarks_csv(path_of("landmarks_" + tag + ".csv"), a.partitions);
        emit("landmarks_" + tag + ".csv");

        for (std::size_t p = 0; p < a.filtration.complexes.size(); ++p) {
            const std::string name =
                "complex_" + tag + "_x2_" + std::to_string(position_label_x2(a.filtration, p)) +
                ".csv";
            write_complex_csv(path_of(name), a.filtration.complexes[p]);
            emit(name);
        }

        write_diagram_csv(path_of("diagram_" + tag + ".csv"), a.diagram);
        emit("diagram_" + tag + ".csv");

        for (int k = 0; k <= cfg.max_hom_dim; ++k) {
            const auto& img = art.zpis[i][static_cast<std::size_t>(k)];
            const std::string base = "zpi_" + tag + "_dim" + std::to_string(k);
            write_image_csv(path_of(base + ".csv"), img.size, img.pixels);
            emit(base + ".csv");
            write_image_pgm(path_of(base + ".pgm"), img);
            emit(base + ".pgm");
        }

        if (i > 0)
            for (int k = 0; k <= cfg.max_hom_dim; ++k) {
                const auto& d = art.deltas[i][static_cast<std::size_t>(k)];
                const std::string name = "delta_" + tag + "_dim" + std::to_string(k) + ".csv";
                write_image_csv(path_of(name), d.size, d.pixels);
                emit(name);
            }
    }

    {
        std::ofstream out(path_of("lr_log.csv"));
        if (!out) throw ValidationError("cannot write file: " + path_of("lr_log.csv"));
        out << "t,r\n";
        for (std::size_t i = 1; i < art.anchors.size(); ++i)
            out << art.anchors[i].anchor << ',' << format_double(art.learning_rates[i - 1])
                << '\n';
        emit("lr_log.csv");
    }

    std::sort(result.files.begin(), result.files.end());
    result.config_hash = config_hash(cfg);

    nlohmann::json manifest;
    char hash_hex[17];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(result.config_hash));
    manifest["config"] = nlohmann::json::parse(canonical_config_json(cfg));
    manifest["config_hash"] = hash_hex;
    manifest["snapshot_count"] = art.data.snapshots.size();
    manifest["noise_applied"] = art.data.noise_applied;
    nlohmann::json anchors = nlohmann::json::array();
    for (const auto& a : art.anchors) anchors.push_back(a.anchor);
    manifest["anchors"] = anchors;
    manifest["files"] = result.files;

    result.manifest_path = path_of("manifest.json");
    std::ofstream out(result.manifest_path);
    if (!out) throw ValidationError("cannot write file: " + result.manifest_path);
    out << manifest.dump(2) << '\n';
    return result;
}

std::vector<AdaptRow> run_meta_schedules(const PipelineArtifacts& art, const PipelineConfig& cfg,
                                         double eta) {
    if (art.anchors.size() < 2)
        throw ValidationError("adapt needs at least two window anchors");

    // Examples are regenerated per (schedule, anchor) from a fixed stream
    // so both schedules see identical data.
    auto examples_for = [&](std::size_t i) {
        const auto& a = art.anchors[i];
        const auto& snapshot = art.data.snapshots[static_cast<std::size_t>(a.anchor - 1)];
        SplitMix64 rng(mix_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(a.anchor)));
        return make_pair_examples(snapshot, a.partitions.back(), rng);
    };

    std::vector<AdaptRow> rows;
    const std::size_t steps = art.anchors.size() - 1;
    const auto train_steps =
        static_cast<std::size_t>(std::floor(0.7 * static_cast<double>(steps) + 1e-9));

    for (const std::string schedule : {"live", "window"}) {
        ToyModel model;
        for (std::size_t i = 1; i < art.anchors.size(); ++i) {
            auto examples = examples_for(i);
            if (examples.empty()) continue;
            AdaptRow row;
            row.schedule = schedule;
            row.anchor = art.anchors[i].anchor;
            row.r = art.learning_rates[i - 1];
            row.loss_before = toy_loss(model, examples);
            const bool update = schedule == "live" || i <= train_steps;
            if (update)
                model = meta_update(model, toy_gradient(model, examples), eta, row.r);
            row.loss_after = toy_loss(model, examples);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

}  // namespace dzp
