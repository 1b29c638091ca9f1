#include "dzp/vectorize.hpp"

#include <algorithm>
#include <cmath>

#include "dzp/errors.hpp"

namespace dzp {

namespace {

// Standard normal CDF.
double phi(double z) { return 0.5 * (1.0 + std::erf(z / std::sqrt(2.0))); }

}  // namespace

ZpiBounds ZpiBounds::fixed(double x_min, double x_max, double y_min, double y_max) {
    if (!(x_min < x_max) || !(y_min < y_max))
        throw ValidationError("zpi bounds must satisfy x_min < x_max and y_min < y_max");
    ZpiBounds b;
    b.auto_mode = false;
    b.x_min = x_min;
    b.x_max = x_max;
    b.y_min = y_min;
    b.y_max = y_max;
    return b;
}

double PersistenceImage::sum() const {
    double total = 0;
    for (double p : pixels) total += p;
    return total;
}

std::vector<BPPoint> transform_diagram(const PersistenceDiagram& d, int dim) {
    std::vector<BPPoint> points;
    for (const auto& iv : d.intervals) {
        if (iv.dim != dim) continue;
        points.push_back({iv.birth_x2 / 2.0, (iv.death_x2 - iv.birth_x2) / 2.0});
    }
    return points;
}

double default_theta(const std::vector<BPPoint>& points) {
    if (points.empty()) return 0.1;
    double x_lo = points[0].first, x_hi = points[0].first;
    double y_lo = points[0].second, y_hi = points[0].second;
    for (const auto& [x, y] : points) {
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
        y_lo = std::min(y_lo, y);
        y_hi = std::max(y_hi, y);
    }
    double diag = std::hypot(x_hi - x_lo, y_hi - y_lo);
    return std::max(0.1 * diag, 0.1);
}

PersistenceImage render_zpi(const std::vector<BPPoint>& points, int size, double theta,
                            const ZpiBounds& bounds) {
    if (size < 1) throw ValidationError("zpi size must be >= 1");
    if (!(theta > 0)) throw ValidationError("zpi theta must be positive");

    PersistenceImage img;
    img.size = size;
    img.theta = theta;
    img.points = points;
    img.pixels.assign(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0);

    if (bounds.auto_mode) {
        if (points.empty()) {
            img.x_min = 0;
            img.x_max = 1;
            img.y_min = 0;
            img.y_max = 1;
            return img;
        }
        double x_lo = points[0].first, x_hi = points[0].first;
        double y_lo = points[0].second, y_hi = points[0].second;
        for (const auto& [x, y] : points) {
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, y);
            y_hi = std::max(y_hi, y);
        }
        img.x_min = x_lo - 3 * theta;
        img.x_max = x_hi + 3 * theta;
        img.y_min = y_lo - 3 * theta;
        img.y_max = y_hi + 3 * theta;
    } else {
        img.x_min = bounds.x_min;
        img.x_max = bounds.x_max;
        img.y_min = bounds.y_min;
        img.y_max = bounds.y_max;
    }
    if (points.empty()) return img;

    double max_persistence = 0;
    for (const auto& p : points) max_persistence = std::max(max_persistence, p.second);
    if (max_persistence == 0) return img;  // g vanishes on the whole diagram

    const double dx = (img.x_max - img.x_min) / size;
    const double dy = (img.y_max - img.y_min) / size;

    for (const auto& [mx, my] : points) {
        const double g = std::max(0.0, my) / max_persistence;
        if (g == 0) continue;
        // Separable cell integrals: one CDF difference per axis.
        std::vector<double> col_mass(static_cast<std::size_t>(size));
        std::vector<double> row_mass(static_cast<std::size_t>(size));
        for (int c = 0; c < size; ++c) {
            double lo = img.x_min + c * dx;
            double hi = c + 1 == size ? img.x_max : img.x_min + (c + 1) * dx;
            col_mass[static_cast<std::size_t>(c)] = phi((hi - mx) / theta) - phi((lo - mx) / theta);
        }
        for (int r = 0; r < size; ++r) {
            double lo = img.y_min + r * dy;
            double hi = r + 1 == size ? img.y_max : img.y_min + (r + 1) * dy;
            row_mass[static_cast<std::size_t>(r)] = phi((hi - my) / theta) - phi((lo - my) / theta);
        }
        for (int r = 0; r < size; ++r)
            for (int c = 0; c < size; ++c)
                img.at(r, c) += g * row_mass[static_cast<std::size_t>(r)] *
                                col_mass[static_cast<std::size_t>(c)];
    }
    return img;
}

DeltaImage delta_zpi(const PersistenceImage& a, const PersistenceImage& b) {
    if (a.size != b.size) throw ValidationError("delta_zpi images must share size");

    const bool same_bounds = a.x_min == b.x_min && a.x_max == b.x_max && a.y_min == b.y_min &&
                             a.y_max == b.y_max;
    if (!same_bounds) {
        if (a.theta != b.theta)
            throw ValidationError("delta_zpi cannot re-render images with different theta");
        auto box = ZpiBounds::fixed(std::min(a.x_min, b.x_min), std::max(a.x_max, b.x_max),
                                    std::min(a.y_min, b.y_min), std::max(a.y_max, b.y_max));
        PersistenceImage ra = render_zpi(a.points, a.size, a.theta, box);
        PersistenceImage rb = render_zpi(b.points, b.size, b.theta, box);
        ra.dim = a.dim;
        rb.dim = b.dim;
        return delta_zpi(ra, rb);
    }

    DeltaImage d;
    d.size = a.size;
    d.x_min = a.x_min;
    d.x_max = a.x_max;
    d.y_min = a.y_min;
    d.y_max = a.y_max;
    d.dim = a.dim;
    d.pixels.resize(a.pixels.size());
    for (std::size_t i = 0; i < a.pixels.size(); ++i) d.pixels[i] = b.pixels[i] - a.pixels[i];
    return d;
}

}  // namespace dzp
