#include "dzp/adaptor.hpp"

#include <algorithm>
#include <cmath>

#include "dzp/errors.hpp"

namespace dzp {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// Channel-major planes with the same indexing as ImageStack.
struct Planes {
    int size = 0;
    int channels = 0;
    std::vector<double> data;

    Planes() = default;
    Planes(int channels, int size)
        : size(size),
          channels(channels),
          data(static_cast<std::size_t>(channels) * size * size, 0.0) {}

    double& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * size + y) * size + x];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * size + y) * size + x];
    }
};

// 3x3 convolution, stride 1, zero padding 1.
void conv3x3(const Planes& in, const std::vector<double>& w, const std::vector<double>& b,
             int out_channels, Planes& out) {
    const int n = in.size;
    out = Planes(out_channels, n);
    for (int o = 0; o < out_channels; ++o)
        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x) {
                double acc = b[static_cast<std::size_t>(o)];
                for (int i = 0; i < in.channels; ++i)
                    for (int ky = 0; ky < 3; ++ky) {
                        const int yy = y + ky - 1;
                        if (yy < 0 || yy >= n) continue;
                        for (int kx = 0; kx < 3; ++kx) {
                            const int xx = x + kx - 1;
                            if (xx < 0 || xx >= n) continue;
                            acc += w[((static_cast<std::size_t>(o) * in.channels + i) * 3 + ky) *
                                         3 +
                                     kx] *
                                   in.at(i, yy, xx);
                        }
                    }
                out.at(o, y, x) = acc;
            }
}

struct ForwardCache {
    Planes input;
    Planes z1, a1;    // conv1 pre/post relu
    Planes z2;        // conv2 output
    Planes res;       // residual branch
    Planes s, a2;     // sum pre/post relu
    std::vector<double> pooled;
    double z = 0;
    double r = 0;
};

ForwardCache run_forward(const AdaptorNetwork& net, const ImageStack& x) {
    if (x.size != net.image_size || x.channels != net.in_channels)
        throw ValidationError("adaptor input shape mismatch: expected " +
                              std::to_string(net.in_channels) + "x" +
                              std::to_string(net.image_size) + "x" +
                              std::to_string(net.image_size));

    ForwardCache f;
    f.input.size = x.size;
    f.input.channels = x.channels;
    f.input.data = x.data;

    conv3x3(f.input, net.conv1_w, net.conv1_b, net.hidden, f.z1);
    f.a1 = f.z1;
    for (auto& v : f.a1.data) v = std::max(0.0, v);

    conv3x3(f.a1, net.conv2_w, net.conv2_b, net.hidden, f.z2);

    const int n = net.image_size;
    if (net.has_projection) {
        f.res = Planes(net.hidden, n);
        for (int o = 0; o < net.hidden; ++o)
            for (int y = 0; y < n; ++y)
                for (int x2 = 0; x2 < n; ++x2) {
                    double acc = net.proj_b[static_cast<std::size_t>(o)];
                    for (int i = 0; i < net.in_channels; ++i)
                        acc += net.proj_w[static_cast<std::size_t>(o) * net.in_channels + i] *
                               f.input.at(i, y, x2);
                    f.res.at(o, y, x2) = acc;
                }
    } else {
        f.res = f.input;
    }

    f.s = f.z2;
    for (std::size_t i = 0; i < f.s.data.size(); ++i) f.s.data[i] += f.res.data[i];
    f.a2 = f.s;
    for (auto& v : f.a2.data) v = std::max(0.0, v);

    f.pooled.assign(static_cast<std::size_t>(net.hidden), 0.0);
    const double inv_area = 1.0 / (static_cast<double>(n) * n);
    for (int c = 0; c < net.hidden; ++c) {
        double acc = 0;
        for (int y = 0; y < n; ++y)
            for (int x2 = 0; x2 < n; ++x2) acc += f.a2.at(c, y, x2);
        f.pooled[static_cast<std::size_t>(c)] = acc * inv_area;
    }

    f.z = net.dense_b;
    for (int c = 0; c < net.hidden; ++c)
        f.z += net.dense_w[static_cast<std::size_t>(c)] * f.pooled[static_cast<std::size_t>(c)];
    f.r = 2.0 * logistic(f.z);
    return f;
}

}  // namespace

ImageStack ImageStack::from_deltas(const std::vector<DeltaImage>& deltas) {
    if (deltas.empty()) throw ValidationError("image stack needs at least one channel");
    ImageStack stack;
    stack.size = deltas[0].size;
    stack.channels = static_cast<int>(deltas.size());
    for (const auto& d : deltas) {
        if (d.size != stack.size) throw ValidationError("image stack channels differ in size");
        stack.data.insert(stack.data.end(), d.pixels.begin(), d.pixels.end());
    }
    return stack;
}

AdaptorNetwork make_adaptor(int in_channels, int image_size, std::uint64_t seed) {
    if (in_channels < 1) throw ValidationError("adaptor needs at least one input channel");
    if (image_size < 1) throw ValidationError("adaptor image size must be >= 1");

    AdaptorNetwork net;
    net.in_channels = in_channels;
    net.image_size = image_size;
    net.has_projection = in_channels != net.hidden;

    SplitMix64 rng(seed);
    auto fill_uniform = [&](std::vector<double>& v, std::size_t count, double scale) {
        v.resize(count);
        for (auto& x : v) x = rng.uniform(-scale, scale);
    };
    const auto h = static_cast<std::size_t>(net.hidden);
    const auto in = static_cast<std::size_t>(in_channels);
    fill_uniform(net.conv1_w, h * in * 9, 1.0 / std::sqrt(static_cast<double>(in) * 9));
    net.conv1_b.assign(h, 0.0);
    fill_uniform(net.conv2_w, h * h * 9, 1.0 / std::sqrt(static_cast<double>(h) * 9));
    net.conv2_b.assign(h, 0.0);
    if (net.has_projection) {
        fill_uniform(net.proj_w, h * in, 1.0 / std::sqrt(static_cast<double>(in)));
        net.proj_b.assign(h, 0.0);
    }
    net.dense_w.assign(h, 0.0);  // zero dense head makes r = 1 exactly at init
    net.dense_b = 0.0;
    return net;
}

double adaptor_forward(const AdaptorNetwork& net, const ImageStack& x) {
    return run_forward(net, x).r;
}

AdaptorGradients adaptor_gradients(const AdaptorNetwork& net, const ImageStack& x,
                                   double upstream) {
    ForwardCache f = run_forward(net, x);
    const int n = net.image_size;
    const int hidden = net.hidden;

    AdaptorGradients g;
    g.conv1_w.assign(net.conv1_w.size(), 0.0);
    g.conv1_b.assign(net.conv1_b.size(), 0.0);
    g.conv2_w.assign(net.conv2_w.size(), 0.0);
    g.conv2_b.assign(net.conv2_b.size(), 0.0);
    g.proj_w.assign(net.proj_w.size(), 0.0);
    g.proj_b.assign(net.proj_b.size(), 0.0);
    g.dense_w.assign(net.dense_w.size(), 0.0);

    const double sig = logistic(f.z);
    const double gz = upstream * 2.0 * sig * (1.0 - sig);

    g.dense_b = gz;
    std::vector<double> g_pooled(static_cast<std::size_t>(hidden));
    for (int c = 0; c < hidden; ++c) {
        g.dense_w[static_cast<std::size_t>(c)] = gz * f.pooled[static_cast<std::size_t>(c)];
        g_pooled[static_cast<std::size_t>(c)] = gz * net.dense_w[static_cast<std::size_t>(c)];
    }

    const double inv_area = 1.0 / (static_cast<double>(n) * n);
    Planes gs(hidden, n);  // gradient at s, after the relu mask
    for (int c = 0; c < hidden; ++c)
        for (int y = 0; y < n; ++y)
            for (int x2 = 0; x2 < n; ++x2)
                gs.at(c, y, x2) =
                    f.s.at(c, y, x2) > 0 ? g_pooled[static_cast<std::size_t>(c)] * inv_area : 0.0;

    // conv2 branch: weights, biases and the gradient flowing into a1.
    Planes ga1(hidden, n);
    for (int o = 0; o < hidden; ++o)
        for (int y = 0; y < n; ++y)
            for (int x2 = 0; x2 < n; ++x2) {
                const double go = gs.at(o, y, x2);
                if (go == 0) continue;
                g.conv2_b[static_cast<std::size_t>(o)] += go;
                for (int i = 0; i < hidden; ++i)
                    for (int ky = 0; ky < 3; ++ky) {
                        const int yy = y + ky - 1;
                        if (yy < 0 || yy >= n) continue;
                        for (int kx = 0; kx < 3; ++kx) {
                            const int xx = x2 + kx - 1;
                            if (xx < 0 || xx >= n) continue;
                            const std::size_t wi =
                                ((static_cast<std::size_t>(o) * hidden + i) * 3 + ky) * 3 + kx;
                            g.conv2_w[wi] += go * f.a1.at(i, yy, xx);
                            ga1.at(i, yy, xx) += go * net.conv2_w[wi];
                        }
                    }
            }

    // Residual branch.
    if (net.has_projection) {
        for (int o = 0; o < hidden; ++o)
            for (int y = 0; y < n; ++y)
                for (int x2 = 0; x2 < n; ++x2) {
                    const double go = gs.at(o, y, x2);
                    if (go == 0) continue;
                    g.proj_b[static_cast<std::size_t>(o)] += go;
                    for (int i = 0; i < net.in_channels; ++i)
                        g.proj_w[static_cast<std::size_t>(o) * net.in_channels + i] +=
                            go * f.input.at(i, y, x2);
                }
    }

    // conv1 branch through the first relu.
    for (int o = 0; o < hidden; ++o)
        for (int y = 0; y < n; ++y)
            for (int x2 = 0; x2 < n; ++x2) {
                if (f.z1.at(o, y, x2) <= 0) continue;
                const double go = ga1.at(o, y, x2);
                if (go == 0) continue;
                g.conv1_b[static_cast<std::size_t>(o)] += go;
                for (int i = 0; i < net.in_channels; ++i)
                    for (int ky = 0; ky < 3; ++ky) {
                        const int yy = y + ky - 1;
                        if (yy < 0 || yy >= n) continue;
                        for (int kx = 0; kx < 3; ++kx) {
                            const int xx = x2 + kx - 1;
                            if (xx < 0 || xx >= n) continue;
                            g.conv1_w[((static_cast<std::size_t>(o) * net.in_channels + i) * 3 +
                                       ky) *
                                          3 +
                                      kx] += go * f.input.at(i, yy, xx);
                        }
                    }
            }

    return g;
}

std::vector<double> flatten_parameters(const AdaptorNetwork& net) {
    std::vector<double> flat;
    for (const auto* v :
         {&net.conv1_w, &net.conv1_b, &net.conv2_w, &net.conv2_b, &net.proj_w, &net.proj_b,
          &net.dense_w})
        flat.insert(flat.end(), v->begin(), v->end());
    flat.push_back(net.dense_b);
    return flat;
}

void set_parameters(AdaptorNetwork& net, const std::vector<double>& flat) {
    std::size_t pos = 0;
    for (auto* v : {&net.conv1_w, &net.conv1_b, &net.conv2_w, &net.conv2_b, &net.proj_w,
                    &net.proj_b, &net.dense_w}) {
        if (pos + v->size() > flat.size()) throw ValidationError("parameter vector too short");
        std::copy(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                  flat.begin() + static_cast<std::ptrdiff_t>(pos + v->size()), v->begin());
        pos += v->size();
    }
    if (pos + 1 != flat.size()) throw ValidationError("parameter vector length mismatch");
    net.dense_b = flat[pos];
}

std::vector<double> flatten_gradients(const AdaptorNetwork&, const AdaptorGradients& g) {
    std::vector<double> flat;
    for (const auto* v : {&g.conv1_w, &g.conv1_b, &g.conv2_w, &g.conv2_b, &g.proj_w, &g.proj_b,
                          &g.dense_w})
        flat.insert(flat.end(), v->begin(), v->end());
    flat.push_back(g.dense_b);
    return flat;
}

std::vector<std::string> parameter_labels(const AdaptorNetwork& net) {
    std::vector<std::string> labels;
    auto append = [&](const char* name, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) labels.emplace_back(name);
    };
    append("conv1_w", net.conv1_w.size());
    append("conv1_b", net.conv1_b.size());
    append("conv2_w", net.conv2_w.size());
    append("conv2_b", net.conv2_b.size());
    append("proj_w", net.proj_w.size());
    append("proj_b", net.proj_b.size());
    append("dense_w", net.dense_w.size());
    append("dense_b", 1);
    return labels;
}

std::pair<AdaptorNetwork, double> train_adaptor_step(
    const AdaptorNetwork& net, const std::vector<std::pair<ImageStack, double>>& batch,
    double lr) {
    if (batch.empty()) throw ValidationError("training batch must be non-empty");
    if (!(lr > 0)) throw ValidationError("learning rate must be positive");

    double loss = 0;
    std::vector<double> total(flatten_parameters(net).size(), 0.0);
    for (const auto& [x, target] : batch) {
        const double r = adaptor_forward(net, x);
        const double err = r - target;
        loss += err * err;
        auto g = adaptor_gradients(net, x, 2.0 * err / static_cast<double>(batch.size()));
        auto flat = flatten_gradients(net, g);
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += flat[i];
    }
    loss /= static_cast<double>(batch.size());

    AdaptorNetwork updated = net;
    auto params = flatten_parameters(net);
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * total[i];
    set_parameters(updated, params);
    return {std::move(updated), loss};
}

std::vector<Tensor> adaptor_tensors(const AdaptorNetwork& net) {
    std::vector<Tensor> out;
    out.push_back({"conv1_w", {net.hidden, net.in_channels, 3, 3}, net.conv1_w});
    out.push_back({"conv1_b", {net.hidden}, net.conv1_b});
    out.push_back({"conv2_w", {net.hidden, net.hidden, 3, 3}, net.conv2_w});
    out.push_back({"conv2_b", {net.hidden}, net.conv2_b});
    if (net.has_projection) {
        out.push_back({"proj_w", {net.hidden, net.in_channels}, net.proj_w});
        out.push_back({"proj_b", {net.hidden}, net.proj_b});
    }
    out.push_back({"dense_w", {net.hidden}, net.dense_w});
    out.push_back({"dense_b", {1}, {net.dense_b}});
    return out;
}

std::vector<PairExample> make_pair_examples(const Snapshot& s, const LandmarkPartition& p,
                                            SplitMix64& rng) {
    const auto n = s.nodes.size();
    std::vector<PairExample> out;
    if (n < 2) return out;

    auto degree_of = [&](NodeId v) {
        std::size_t d = 0;
        for (const auto& [a, b] : s.edges)
            if (a == v || b == v) ++d;
        return static_cast<double>(d);
    };
    auto common_neighbors = [&](NodeId u, NodeId v) {
        double c = 0;
        for (NodeId w : s.nodes)
            if (w != u && w != v && s.has_edge(u, w) && s.has_edge(v, w)) ++c;
        return c;
    };
    auto is_landmark = [&](NodeId v) {
        return std::binary_search(p.landmarks.begin(), p.landmarks.end(), v);
    };
    auto features = [&](NodeId u, NodeId v) {
        return std::array<double, 3>{common_neighbors(u, v), degree_of(u) * degree_of(v),
                                     is_landmark(u) && is_landmark(v) ? 1.0 : 0.0};
    };

    for (const auto& [u, v] : s.edges) out.push_back({features(u, v), 1});

    const std::size_t max_pairs = n * (n - 1) / 2;
    std::size_t wanted = std::min(s.edges.size(), max_pairs - s.edges.size());
    for (std::size_t made = 0, attempts = 0; made < wanted && attempts < 64 * wanted;
         ++attempts) {
        NodeId u = s.nodes[static_cast<std::size_t>(rng.below(n))];
        NodeId v = s.nodes[static_cast<std::size_t>(rng.below(n))];
        if (u == v || s.has_edge(u, v)) continue;
        out.push_back({features(u, v), 0});
        ++made;
    }
    return out;
}

double toy_loss(const ToyModel& model, const std::vector<PairExample>& examples) {
    if (examples.empty()) throw ValidationError("toy loss needs at least one example");
    double loss = 0;
    for (const auto& ex : examples) {
        double z = model.w[3];
        for (int i = 0; i < 3; ++i) z += model.w[static_cast<std::size_t>(i)] * ex.features[static_cast<std::size_t>(i)];
        const double prob = logistic(z);
        const double eps = 1e-12;  // clamp keeps the log finite under saturation
        loss += ex.label ? -std::log(std::max(prob, eps)) : -std::log(std::max(1.0 - prob, eps));
    }
    return loss / static_cast<double>(examples.size());
}

std::array<double, 4> toy_gradient(const ToyModel& model,
                                   const std::vector<PairExample>& examples) {
    if (examples.empty()) throw ValidationError("toy gradient needs at least one example");
    std::array<double, 4> g{0, 0, 0, 0};
    for (const auto& ex : examples) {
        double z = model.w[3];
        for (int i = 0; i < 3; ++i) z += model.w[static_cast<std::size_t>(i)] * ex.features[static_cast<std::size_t>(i)];
        const double err = logistic(z) - ex.label;
        for (int i = 0; i < 3; ++i) g[static_cast<std::size_t>(i)] += err * ex.features[static_cast<std::size_t>(i)];
        g[3] += err;
    }
    for (auto& v : g) v /= static_cast<double>(examples.size());
    return g;
}

ToyModel meta_update(const ToyModel& model, const std::array<double, 4>& grad, double eta,
                     double r) {
    if (!(eta > 0)) throw ValidationError("eta must be positive");
    for (double g : grad)
        if (!std::isfinite(g)) throw ValidationError("meta_update received a non-finite gradient");
    ToyModel next = model;
    for (std::size_t i = 0; i < next.w.size(); ++i) next.w[i] -= eta * r * grad[i];
    return next;
}

}  // namespace dzp
