#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dzp/config.hpp"
#include "dzp/errors.hpp"
#include "dzp/io.hpp"
#include "dzp/metrics.hpp"
#include "dzp/pipeline.hpp"

namespace {

namespace fs = std::filesystem;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
};

dzp::PipelineConfig load_config(const CommonArgs& args) {
    dzp::PipelineConfig cfg;
    if (!args.config_path.empty()) cfg = dzp::parse_config(args.config_path);
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
    return cfg;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw dzp::ValidationError("cannot write file: " + path);
    return out;
}

std::string in_dir(const dzp::PipelineConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.output_dir);
    return (fs::path(cfg.output_dir) / name).string();
}

void write_snapshot_files(const dzp::PipelineConfig& cfg, const dzp::PreparedData& data,
                          const std::vector<dzp::Snapshot>& snapshots) {
    {
        auto out = open_out(in_dir(cfg, "nodes.csv"));
        out << "id,label\n";
        for (std::size_t i = 0; i < data.graph.node_names.size(); ++i)
            out << i << ',' << data.graph.node_names[i] << '\n';
    }
    {
        auto out = open_out(in_dir(cfg, "snapshots.csv"));
        out << "snapshot,nodes,edges\n";
        for (const auto& s : snapshots)
            out << s.index << ',' << s.nodes.size() << ',' << s.edges.size() << '\n';
    }
    for (const auto& s : snapshots) {
        auto out = open_out(in_dir(cfg, "snapshot_t" + std::to_string(s.index) + ".csv"));
        out << "src,dst\n";
        for (const auto& [u, v] : s.edges) out << u << ',' << v << '\n';
    }
}

// Shared theta resolution for file-based rendering: auto derives the
// bandwidth from the union of the given diagrams' points, per dimension.
double resolve_theta(const dzp::PipelineConfig& cfg,
                     const std::vector<const dzp::PersistenceDiagram*>& diagrams, int dim) {
    if (!cfg.zpi.theta_auto) return cfg.zpi.theta;
    std::vector<dzp::BPPoint> points;
    for (const auto* d : diagrams) {
        auto pts = dzp::transform_diagram(*d, dim);
        points.insert(points.end(), pts.begin(), pts.end());
    }
    return dzp::default_theta(points);
}

int run_snapshot(const CommonArgs& args, bool with_noise) {
    auto cfg = load_config(args);
    if (with_noise && !cfg.noise)
        throw dzp::ValidationError("config has no noise section");
    auto data = dzp::prepare_data(cfg);
    write_snapshot_files(cfg, data, with_noise ? data.snapshots : data.clean_snapshots);
    std::cout << "wrote " << (with_noise ? data.snapshots : data.clean_snapshots).size()
              << " snapshots to " << cfg.output_dir << '\n';
    return 0;
}

int run_landmarks(const CommonArgs& args) {
    auto cfg = load_config(args);
    auto data = dzp::prepare_data(cfg);
    auto window = dzp::make_window(data.snapshots);
    auto parts = dzp::seeded_epsilon_nets(window, cfg.eps);
    dzp::write_landmarks_csv(in_dir(cfg, "landmarks.csv"), parts);
    std::cout << "wrote landmarks.csv for " << parts.size() << " snapshots to " << cfg.output_dir
              << '\n';
    return 0;
}

int run_zigzag(const CommonArgs& args) {
    auto cfg = load_config(args);
    auto art = dzp::compute_pipeline(cfg);
    for (const auto& a : art.anchors) {
        const std::string tag = "a" + std::to_string(a.anchor);
        dzp::write_landmarks_csv(in_dir(cfg, "landmarks_" + tag + ".csv"), a.partitions);
        for (const auto& c : a.filtration.complexes)
            dzp::write_complex_csv(
                in_dir(cfg, "complex_" + tag + "_x2_" + std::to_string(c.label_x2) + ".csv"), c);
        dzp::write_diagram_csv(in_dir(cfg, "diagram_" + tag + ".csv"), a.diagram);
    }
    std::cout << "wrote diagrams for " << art.anchors.size() << " anchors to " << cfg.output_dir
              << '\n';
    return 0;
}

int run_zpi(const CommonArgs& args, const std::string& diagram_path) {
    auto cfg = load_config(args);
    auto diagram = dzp::read_diagram_csv(diagram_path);
    for (int k = 0; k <= cfg.max_hom_dim; ++k) {
        auto img = dzp::render_zpi(dzp::transform_diagram(diagram, k), cfg.zpi.size,
                                   resolve_theta(cfg, {&diagram}, k), cfg.zpi.bounds);
        img.dim = k;
        dzp::write_image_csv(in_dir(cfg, "zpi_dim" + std::to_string(k) + ".csv"), img.size,
                             img.pixels);
        dzp::write_image_pgm(in_dir(cfg, "zpi_dim" + std::to_string(k) + ".pgm"), img);
    }
    std::cout << "wrote ZPIs for dimensions 0.." << cfg.max_hom_dim << " to " << cfg.output_dir
              << '\n';
    return 0;
}

int run_delta(const CommonArgs& args, const std::string& a_path, const std::string& b_path) {
    auto cfg = load_config(args);
    auto da = dzp::read_diagram_csv(a_path);
    auto db = dzp::read_diagram_csv(b_path);
    for (int k = 0; k <= cfg.max_hom_dim; ++k) {
        const double theta = resolve_theta(cfg, {&da, &db}, k);
        auto ia = dzp::render_zpi(dzp::transform_diagram(da, k), cfg.zpi.size, theta,
                                  cfg.zpi.bounds);
        auto ib = dzp::render_zpi(dzp::transform_diagram(db, k), cfg.zpi.size, theta,
                                  cfg.zpi.bounds);
        auto d = dzp::delta_zpi(ia, ib);
        dzp::write_image_csv(in_dir(cfg, "delta_dim" + std::to_string(k) + ".csv"), d.size,
                             d.pixels);
    }
    std::cout << "wrote delta images for dimensions 0.." << cfg.max_hom_dim << " to "
              << cfg.output_dir << '\n';
    return 0;
}

int run_bottleneck(const CommonArgs& args, const std::string& a_path,
                   const std::string& b_path) {
    auto cfg = load_config(args);
    auto da = dzp::read_diagram_csv(a_path);
    auto db = dzp::read_diagram_csv(b_path);
    double best = 0;
    for (int k = 0; k <= cfg.max_hom_dim; ++k) {
        const double d = dzp::bottleneck_distance(da, db, k);
        best = std::max(best, d);
        std::cout << "dim " << k << ": " << dzp::format_double(d) << '\n';
    }
    std::cout << "max: " << dzp::format_double(best) << '\n';
    return 0;
}

int run_adapt(const CommonArgs& args, double eta) {
    auto cfg = load_config(args);
    auto art = dzp::compute_pipeline(cfg);
    auto rows = dzp::run_meta_schedules(art, cfg, eta);
    {
        auto out = open_out(in_dir(cfg, "adapt_log.csv"));
        out << "schedule,t,r,loss_before,loss_after\n";
        for (const auto& row : rows)
            out << row.schedule << ',' << row.anchor << ',' << dzp::format_double(row.r) << ','
                << dzp::format_double(row.loss_before) << ','
                << dzp::format_double(row.loss_after) << '\n';
    }
    auto net = dzp::make_adaptor(cfg.max_hom_dim + 1, cfg.zpi.size, cfg.seed);
    dzp::write_tensors_csv(in_dir(cfg, "adaptor_params.csv"), dzp::adaptor_tensors(net));
    std::cout << "wrote adapt_log.csv (" << rows.size() << " rows) to " << cfg.output_dir << '\n';
    return 0;
}

int run_full_pipeline(const CommonArgs& args) {
    auto cfg = load_config(args);
    auto result = dzp::run_pipeline(cfg);
    char hash_hex[17];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(result.config_hash));
    std::cout << "wrote " << result.files.size() << " files to " << cfg.output_dir
              << " (config hash " << hash_hex << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dowker zigzag persistence of dynamic graphs"};
    app.require_subcommand(1);

    CommonArgs common;
    std::string diagram_path, a_path, b_path;
    double eta = 0.1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "JSON config file (defaults apply when omitted)");
        sub->add_option("--out", common.out_dir, "output directory (overrides config)");
        return sub;
    };

    auto* snapshot_cmd = add_common(app.add_subcommand("snapshot", "partition edges into clean snapshots"));
    auto* noise_cmd = add_common(app.add_subcommand("noise", "partition and apply configured noise"));
    auto* landmarks_cmd = add_common(app.add_subcommand("landmarks", "seeded epsilon-nets per snapshot"));
    auto* zigzag_cmd = add_common(app.add_subcommand("zigzag", "complexes and zigzag diagrams per window"));
    auto* zpi_cmd = add_common(app.add_subcommand("zpi", "render persistence images from a diagram CSV"));
    zpi_cmd->add_option("--diagram", diagram_path, "diagram CSV")->required();
    auto* delta_cmd = add_common(app.add_subcommand("delta", "difference of two rendered diagrams"));
    delta_cmd->add_option("--a", a_path, "first diagram CSV")->required();
    delta_cmd->add_option("--b", b_path, "second diagram CSV")->required();
    auto* bottleneck_cmd =
        add_common(app.add_subcommand("bottleneck", "bottleneck distance between two diagram CSVs"));
    bottleneck_cmd->add_option("--a", a_path, "first diagram CSV")->required();
    bottleneck_cmd->add_option("--b", b_path, "second diagram CSV")->required();
    auto* adapt_cmd = add_common(app.add_subcommand("adapt", "meta-update schedules over the toy model"));
    adapt_cmd->add_option("--eta", eta, "base learning rate");
    auto* pipeline_cmd = add_common(app.add_subcommand("pipeline", "full artifact bundle"));

    try {
        app.parse(argc, argv);
        if (app.got_subcommand(snapshot_cmd)) return run_snapshot(common, false);
        if (app.got_subcommand(noise_cmd)) return run_snapshot(common, true);
        if (app.got_subcommand(landmarks_cmd)) return run_landmarks(common);
        if (app.got_subcommand(zigzag_cmd)) return run_zigzag(common);
        if (app.got_subcommand(zpi_cmd)) return run_zpi(common, diagram_path);
        if (app.got_subcommand(delta_cmd)) return run_delta(common, a_path, b_path);
        if (app.got_subcommand(bottleneck_cmd)) return run_bottleneck(common, a_path, b_path);
        if (app.got_subcommand(adapt_cmd)) return run_adapt(common, eta);
        if (app.got_subcommand(pipeline_cmd)) return run_full_pipeline(common);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const dzp::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const dzp::InternalError& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
}
