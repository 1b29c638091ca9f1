#pragma once

// Persistence diagram -> zigzag persistence image: birth-persistence
// transform, persistence-weighted Gaussian surface, exact per-cell
// integration; plus signed image differences.

#include <utility>
#include <vector>

#include "dzp/zigzag.hpp"

namespace dzp {

// (birth, persistence) point in the transformed plane.
using BPPoint = std::pair<double, double>;

struct ZpiBounds {
    bool auto_mode = true;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;

    static ZpiBounds automatic() { return {}; }
    static ZpiBounds fixed(double x_min, double x_max, double y_min, double y_max);
};

struct PersistenceImage {
    int size = 0;
    std::vector<double> pixels;  // row-major, row 0 = lowest persistence band
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    double theta = 0;
    int dim = 0;
    std::vector<BPPoint> points;  // source points, kept for re-rendering

    double& at(int row, int col) { return pixels[static_cast<std::size_t>(row * size + col)]; }
    double at(int row, int col) const { return pixels[static_cast<std::size_t>(row * size + col)]; }
    double sum() const;
};

// Signed difference of two images on shared bounds.
struct DeltaImage {
    int size = 0;
    std::vector<double> pixels;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;
    int dim = 0;
};

// {(birth, death - birth)} over the dim-k intervals; open intervals enter
// with their recorded death.
std::vector<BPPoint> transform_diagram(const PersistenceDiagram& d, int dim);

// Heuristic default bandwidth: 0.1 x the diagonal of the data bounding
// box, floored at 0.1 for degenerate point sets.
double default_theta(const std::vector<BPPoint>& points);

// Pixel = sum over points of g(mu) times the cell integral of N(mu,
// theta^2 I), computed per axis from Gaussian cumulative differences.
// g(mu) = persistence of mu scaled by the diagram's max persistence.
PersistenceImage render_zpi(const std::vector<BPPoint>& points, int size, double theta,
                            const ZpiBounds& bounds);

// b - a. When bounds differ, both images are re-rendered from their source
// points on the union bounding box first.
DeltaImage delta_zpi(const PersistenceImage& a, const PersistenceImage& b);

}  // namespace dzp
