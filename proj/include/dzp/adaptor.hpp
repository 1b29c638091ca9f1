#pragma once

// Topological learning-rate adaptor: a small residual CNN mapping signed
// image stacks to a scalar r in (0, 2), with hand-written reverse-mode
// gradients, plus the meta-update applied to a toy logistic edge scorer.

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dzp/landmarks.hpp"
#include "dzp/rng.hpp"
#include "dzp/temporal_graph.hpp"
#include "dzp/vectorize.hpp"

namespace dzp {

struct ImageStack {
    int size = 0;      // spatial side length
    int channels = 0;
    std::vector<double> data;  // [channel][row][col], row-major

    double& at(int c, int y, int x) {
        return data[(static_cast<std::size_t>(c) * size + y) * size + x];
    }
    double at(int c, int y, int x) const {
        return data[(static_cast<std::size_t>(c) * size + y) * size + x];
    }

    static ImageStack from_deltas(const std::vector<DeltaImage>& deltas);
};

// conv1 (3x3, pad 1) -> relu -> conv2 (3x3, pad 1) -> + residual -> relu
// -> global average pool -> dense -> r = 2 * logistic. The residual is the
// raw input, routed through a 1x1 projection when channel counts differ.
// Dense weights and every bias start at zero, so r = 1 at initialization.
struct AdaptorNetwork {
    int in_channels = 1;
    int hidden = 4;
    int image_size = 50;
    bool has_projection = false;

    std::vector<double> conv1_w;  // [hidden][in][3][3]
    std::vector<double> conv1_b;  // [hidden]
    std::vector<double> conv2_w;  // [hidden][hidden][3][3]
    std::vector<double> conv2_b;  // [hidden]
    std::vector<double> proj_w;   // [hidden][in], empty without projection
    std::vector<double> proj_b;   // [hidden], empty without projection
    std::vector<double> dense_w;  // [hidden]
    double dense_b = 0;
};

struct AdaptorGradients {
    std::vector<double> conv1_w, conv1_b;
    std::vector<double> conv2_w, conv2_b;
    std::vector<double> proj_w, proj_b;
    std::vector<double> dense_w;
    double dense_b = 0;
};

AdaptorNetwork make_adaptor(int in_channels, int image_size, std::uint64_t seed);

double adaptor_forward(const AdaptorNetwork& net, const ImageStack& x);

// Gradients of upstream * r with respect to every parameter.
AdaptorGradients adaptor_gradients(const AdaptorNetwork& net, const ImageStack& x,
                                   double upstream);

// Flat views in a fixed parameter order, for optimization and checking.
std::vector<double> flatten_parameters(const AdaptorNetwork& net);
void set_parameters(AdaptorNetwork& net, const std::vector<double>& flat);
std::vector<double> flatten_gradients(const AdaptorNetwork& net, const AdaptorGradients& g);
// Parameter-class label (conv1_w, dense_b, ...) of each flat index.
std::vector<std::string> parameter_labels(const AdaptorNetwork& net);

// One SGD step on mean squared error between r and the targets; returns
// the updated network and the pre-step loss.
std::pair<AdaptorNetwork, double> train_adaptor_step(
    const AdaptorNetwork& net, const std::vector<std::pair<ImageStack, double>>& batch,
    double lr);

// Serialized named tensors: name,shape,values per row.
struct Tensor {
    std::string name;
    std::vector<int> shape;
    std::vector<double> values;
};
std::vector<Tensor> adaptor_tensors(const AdaptorNetwork& net);

// Logistic edge scorer over (common neighbors, degree product, landmark
// co-membership) plus bias.
struct ToyModel {
    std::array<double, 4> w{0, 0, 0, 0};
};

struct PairExample {
    std::array<double, 3> features{0, 0, 0};
    int label = 0;
};

// Positive examples from the snapshot's edges, one sampled non-edge per
// positive.
std::vector<PairExample> make_pair_examples(const Snapshot& s, const LandmarkPartition& p,
                                            SplitMix64& rng);

double toy_loss(const ToyModel& model, const std::vector<PairExample>& examples);
std::array<double, 4> toy_gradient(const ToyModel& model,
                                   const std::vector<PairExample>& examples);

// w - eta * r * grad.
ToyModel meta_update(const ToyModel& model, const std::array<double, 4>& grad, double eta,
                     double r);

}  // namespace dzp
