#include "dzp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dzp/errors.hpp"
#include "dzp/io.hpp"

namespace dzp {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& prefix,
                const std::set<std::string>& allowed) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!allowed.count(key))
            throw ValidationError("unknown config key: " + (prefix.empty() ? key : prefix + "." + key));
    }
}

std::string key_name(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

long long require_int(const json& v, const std::string& name) {
    if (!v.is_number_integer())
        throw ValidationError("config key " + name + ": expected an integer");
    return v.get<long long>();
}

double require_number(const json& v, const std::string& name) {
    if (!v.is_number()) throw ValidationError("config key " + name + ": expected a number");
    return v.get<double>();
}

std::string require_string(const json& v, const std::string& name) {
    if (!v.is_string()) throw ValidationError("config key " + name + ": expected a string");
    return v.get<std::string>();
}

NoiseConfig parse_noise(const json& v, const std::string& prefix) {
    if (!v.is_object()) throw ValidationError("config key " + prefix + ": expected an object");
    check_keys(v, prefix, {"mode", "ratio", "seed", "split", "train_fraction"});

    NoiseConfig noise;
    if (!v.contains("mode"))
        throw ValidationError("config key " + key_name(prefix, "mode") + ": required");
    auto mode = require_string(v["mode"], key_name(prefix, "mode"));
    if (mode == "evasion")
        noise.mode = NoiseMode::evasion;
    else if (mode == "poisoning")
        noise.mode = NoiseMode::poisoning;
    else
        throw ValidationError("config key " + key_name(prefix, "mode") +
                              ": must be \"evasion\" or \"poisoning\"");

    if (!v.contains("ratio"))
        throw ValidationError("config key " + key_name(prefix, "ratio") + ": required");
    noise.ratio = require_number(v["ratio"], key_name(prefix, "ratio"));
    if (noise.ratio < 0.0 || noise.ratio > 1.0)
        throw ValidationError("config key " + key_name(prefix, "ratio") + ": must be in [0, 1]");

    if (v.contains("seed")) {
        auto s = require_int(v["seed"], key_name(prefix, "seed"));
        if (s < 0)
            throw ValidationError("config key " + key_name(prefix, "seed") +
                                  ": must be non-negative");
        noise.seed = static_cast<std::uint64_t>(s);
    }

    if (v.contains("split") && v.contains("train_fraction"))
        throw ValidationError("config key " + prefix +
                              ": split and train_fraction are mutually exclusive");
    if (v.contains("split")) {
        const auto& split = v["split"];
        const auto split_name = key_name(prefix, "split");
        if (!split.is_object())
            throw ValidationError("config key " + split_name + ": expected an object");
        check_keys(split, split_name, {"train", "test"});
        auto read_indices = [&](const char* key) {
            std::vector<int> out;
            if (!split.contains(key)) return out;
            const auto& arr = split[key];
            if (!arr.is_array())
                throw ValidationError("config key " + key_name(split_name, key) +
                                      ": expected an array of integers");
            for (const auto& e : arr)
                out.push_back(static_cast<int>(require_int(e, key_name(split_name, key))));
            return out;
        };
        noise.explicit_split = true;
        noise.train_indices = read_indices("train");
        noise.test_indices = read_indices("test");
    } else if (v.contains("train_fraction")) {
        noise.train_fraction =
            require_number(v["train_fraction"], key_name(prefix, "train_fraction"));
        if (noise.train_fraction < 0.0 || noise.train_fraction > 1.0)
            throw ValidationError("config key " + key_name(prefix, "train_fraction") +
                                  ": must be in [0, 1]");
    }
    return noise;
}

ZpiSettings parse_zpi(const json& v, const std::string& prefix) {
    if (!v.is_object()) throw ValidationError("config key " + prefix + ": expected an object");
    check_keys(v, prefix, {"size", "theta", "bounds"});

    ZpiSettings zpi;
    if (v.contains("size")) {
        auto s = require_int(v["size"], key_name(prefix, "size"));
        if (s < 1)
            throw ValidationError("config key " + key_name(prefix, "size") + ": must be >= 1");
        zpi.size = static_cast<int>(s);
    }
    if (v.contains("theta")) {
        const auto& theta = v["theta"];
        const auto theta_name = key_name(prefix, "theta");
        if (theta.is_string()) {
            if (theta.get<std::string>() != "auto")
                throw ValidationError("config key " + theta_name +
                                      ": must be \"auto\" or a positive number");
        } else {
            zpi.theta = require_number(theta, theta_name);
            if (!(zpi.theta > 0))
                throw ValidationError("config key " + theta_name + ": must be positive");
            zpi.theta_auto = false;
        }
    }
    if (v.contains("bounds")) {
        const auto& bounds = v["bounds"];
        const auto bounds_name = key_name(prefix, "bounds");
        if (bounds.is_string()) {
            if (bounds.get<std::string>() != "auto")
                throw ValidationError("config key " + bounds_name +
                                      ": must be \"auto\" or [x_min, x_max, y_min, y_max]");
        } else if (bounds.is_array() && bounds.size() == 4) {
            double vals[4];
            for (std::size_t i = 0; i < 4; ++i)
                vals[i] = require_number(bounds[i], bounds_name);
            try {
                zpi.bounds = ZpiBounds::fixed(vals[0], vals[1], vals[2], vals[3]);
            } catch (const ValidationError&) {
                throw ValidationError("config key " + bounds_name +
                                      ": must satisfy x_min < x_max and y_min < y_max");
            }
        } else {
            throw ValidationError("config key " + bounds_name +
                                  ": must be \"auto\" or [x_min, x_max, y_min, y_max]");
        }
    }
    return zpi;
}

}  // namespace

PipelineConfig parse_config_text(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ValidationError(origin + ": invalid JSON: " + e.what());
    }
    if (!root.is_object()) throw ValidationError(origin + ": config must be a JSON object");

    check_keys(root, "", {"input_path", "granularity", "eps", "delta", "window", "max_hom_dim",
                          "zpi", "noise", "backend", "output_dir", "seed"});

    PipelineConfig cfg;
    if (root.contains("input_path"))
        cfg.input_path = require_string(root["input_path"], "input_path");

    if (root.contains("granularity")) {
        const auto& g = root["granularity"];
        if (!g.is_object())
            throw ValidationError("config key granularity: expected {\"seconds\": n} or {\"count\": n}");
        check_keys(g, "granularity", {"seconds", "count"});
        if (g.contains("seconds") == g.contains("count"))
            throw ValidationError("config key granularity: exactly one of seconds or count");
        if (g.contains("seconds")) {
            auto s = require_int(g["seconds"], "granularity.seconds");
            if (s < 1) throw ValidationError("config key granularity.seconds: must be >= 1");
            cfg.granularity = Granularity::seconds(s);
        } else {
            auto c = require_int(g["count"], "granularity.count");
            if (c < 1) throw ValidationError("config key granularity.count: must be >= 1");
            cfg.granularity = Granularity::count(c);
        }
    }

    if (root.contains("eps")) {
        cfg.eps = static_cast<int>(require_int(root["eps"], "eps"));
        if (cfg.eps < 1) throw ValidationError("config key eps: must be >= 1");
    }
    if (root.contains("delta")) {
        cfg.delta = static_cast<int>(require_int(root["delta"], "delta"));
        if (cfg.delta < 1) throw ValidationError("config key delta: must be >= 1");
    }

    if (root.contains("window")) {
        const auto& w = root["window"];
        if (w.is_string()) {
            if (w.get<std::string>() != "full")
                throw ValidationError("config key window: must be \"full\" or an integer >= 1");
        } else {
            auto val = require_int(w, "window");
            if (val < 1)
                throw ValidationError("config key window: must be \"full\" or an integer >= 1");
            cfg.window_full = false;
            cfg.window = static_cast<int>(val);
        }
    }

    if (root.contains("max_hom_dim")) {
        cfg.max_hom_dim = static_cast<int>(require_int(root["max_hom_dim"], "max_hom_dim"));
        if (cfg.max_hom_dim < 0 || cfg.max_hom_dim > 3)
            throw ValidationError("config key max_hom_dim: must be in [0, 3]");
    }

    if (root.contains("zpi")) cfg.zpi = parse_zpi(root["zpi"], "zpi");
    if (root.contains("noise")) cfg.noise = parse_noise(root["noise"], "noise");

    if (root.contains("backend")) {
        auto b = require_string(root["backend"], "backend");
        if (b == "dowker")
            cfg.backend = Backend::dowker;
        else if (b == "vr")
            cfg.backend = Backend::vr;
        else
            throw ValidationError("config key backend: must be \"dowker\" or \"vr\"");
    }

    if (root.contains("output_dir"))
        cfg.output_dir = require_string(root["output_dir"], "output_dir");

    if (root.contains("seed")) {
        auto s = require_int(root["seed"], "seed");
        if (s < 0) throw ValidationError("config key seed: must be non-negative");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    return cfg;
}

PipelineConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

std::string canonical_config_json(const PipelineConfig& cfg) {
    json j;
    j["input_path"] = cfg.input_path;
    j["granularity"] =
        json{{cfg.granularity.kind == Granularity::Kind::seconds ? "seconds" : "count",
              cfg.granularity.value}};
    j["eps"] = cfg.eps;
    j["delta"] = cfg.delta;
    if (cfg.window_full)
        j["window"] = "full";
    else
        j["window"] = cfg.window;
    j["max_hom_dim"] = cfg.max_hom_dim;
    j["zpi"]["size"] = cfg.zpi.size;
    if (cfg.zpi.theta_auto)
        j["zpi"]["theta"] = "auto";
    else
        j["zpi"]["theta"] = format_double(cfg.zpi.theta);
    if (cfg.zpi.bounds.auto_mode)
        j["zpi"]["bounds"] = "auto";
    else
        j["zpi"]["bounds"] = {format_double(cfg.zpi.bounds.x_min), format_double(cfg.zpi.bounds.x_max),
                              format_double(cfg.zpi.bounds.y_min), format_double(cfg.zpi.bounds.y_max)};
    if (cfg.noise) {
        j["noise"]["mode"] = cfg.noise->mode == NoiseMode::evasion ? "evasion" : "poisoning";
        j["noise"]["ratio"] = format_double(cfg.noise->ratio);
        j["noise"]["seed"] = cfg.noise->seed;
        if (cfg.noise->explicit_split) {
            j["noise"]["split"]["train"] = cfg.noise->train_indices;
            j["noise"]["split"]["test"] = cfg.noise->test_indices;
        } else {
            j["noise"]["train_fraction"] = format_double(cfg.noise->train_fraction);
        }
    } else {
        j["noise"] = nullptr;
    }
    j["backend"] = cfg.backend == Backend::dowker ? "dowker" : "vr";
    // output_dir is intentionally absent: it states where the bundle goes,
    // not what is computed, and bundles must be byte-identical across
    // output locations.
    j["seed"] = cfg.seed;
    return j.dump();
}

std::uint64_t config_hash(const PipelineConfig& cfg) {
    const std::string canon = canonical_config_json(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace dzp
