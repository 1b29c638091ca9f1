#include "dzp/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "dzp/errors.hpp"

namespace dzp {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write file: " + path);
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_landmarks_csv(const std::string& path, const std::vector<LandmarkPartition>& parts) {
    auto out = open_out(path);
    out << "snapshot,node,role\n";
    for (const auto& p : parts) {
        std::size_t li = 0, wi = 0;
        // Merge the two sorted role lists so rows come out by node id.
        while (li < p.landmarks.size() || wi < p.witnesses.size()) {
            bool landmark = wi == p.witnesses.size() ||
                            (li < p.landmarks.size() && p.landmarks[li] < p.witnesses[wi]);
            if (landmark) {
                out << p.snapshot_index << ',' << p.landmarks[li++] << ",landmark\n";
            } else {
                out << p.snapshot_index << ',' << p.witnesses[wi++] << ",witness\n";
            }
        }
    }
}

void write_complex_csv(const std::string& path, const SimplicialComplex& c) {
    auto out = open_out(path);
    for (std::size_t d = 0; d < c.by_dim.size(); ++d)
        for (const auto& simplex : c.by_dim[d]) {
            out << d;
            for (NodeId v : simplex) out << ',' << v;
            out << '\n';
        }
}

void write_diagram_csv(const std::string& path, const PersistenceDiagram& d) {
    auto out = open_out(path);
    out << "dim,birth_x2,death_x2,open\n";
    for (const auto& iv : d.intervals)
        out << iv.dim << ',' << iv.birth_x2 << ',' << iv.death_x2 << ',' << (iv.open ? 1 : 0)
            << '\n';
}

PersistenceDiagram read_diagram_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open diagram file: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "dim,birth_x2,death_x2,open")
        throw ValidationError(path + ": expected header dim,birth_x2,death_x2,open");

    PersistenceDiagram d;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Interval iv;
        int open = 0;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%d", &iv.dim, &iv.birth_x2, &iv.death_x2,
                        &open) != 4)
            throw ValidationError(path + ": line " + std::to_string(line_no) +
                                  ": malformed interval row");
        if (iv.dim < 0 || iv.birth_x2 > iv.death_x2 || (open != 0 && open != 1))
            throw ValidationError(path + ": line " + std::to_string(line_no) +
                                  ": invalid interval");
        iv.open = open == 1;
        d.intervals.push_back(iv);
    }
    std::sort(d.intervals.begin(), d.intervals.end());
    return d;
}

void write_image_csv(const std::string& path, int size, const std::vector<double>& pixels) {
    auto out = open_out(path);
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            if (c) out << ',';
            out << format_double(pixels[static_cast<std::size_t>(r * size + c)]);
        }
        out << '\n';
    }
}

void write_image_pgm(const std::string& path, const PersistenceImage& img) {
    auto out = open_out(path);
    double max_pixel = 0;
    for (double p : img.pixels) max_pixel = std::max(max_pixel, p);

    out << "P2\n" << img.size << ' ' << img.size << "\n65535\n";
    for (int r = img.size - 1; r >= 0; --r) {
        for (int c = 0; c < img.size; ++c) {
            if (c) out << ' ';
            long v = max_pixel == 0
                         ? 0
                         : std::lround(img.at(r, c) / max_pixel * 65535.0);
            out << v;
        }
        out << '\n';
    }
}

void write_tensors_csv(const std::string& path, const std::vector<Tensor>& tensors) {
    auto out = open_out(path);
    out << "name,shape,values\n";
    for (const auto& t : tensors) {
        out << t.name << ',';
        for (std::size_t i = 0; i < t.shape.size(); ++i) {
            if (i) out << 'x';
            out << t.shape[i];
        }
        for (double v : t.values) out << ',' << format_double(v);
        out << '\n';
    }
}

}  // namespace dzp
