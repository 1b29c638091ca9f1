#pragma once

// Artifact readers and writers. All float output goes through
// format_double so files are byte-stable across runs.

#include <string>
#include <vector>

#include "dzp/adaptor.hpp"
#include "dzp/complexes.hpp"
#include "dzp/landmarks.hpp"
#include "dzp/vectorize.hpp"
#include "dzp/zigzag.hpp"

namespace dzp {

// %.17g: shortest form that always round-trips a double.
std::string format_double(double v);

void write_landmarks_csv(const std::string& path, const std::vector<LandmarkPartition>& parts);

// Rows `dim,v0,v1,...` in canonical order; no header because arity varies.
void write_complex_csv(const std::string& path, const SimplicialComplex& c);

void write_diagram_csv(const std::string& path, const PersistenceDiagram& d);
PersistenceDiagram read_diagram_csv(const std::string& path);

// Row-major pixel dump, row 0 (lowest persistence band) first.
void write_image_csv(const std::string& path, int size, const std::vector<double>& pixels);

// 16-bit ASCII graymap normalized to the max pixel, rows flipped so larger
// persistence sits at the top.
void write_image_pgm(const std::string& path, const PersistenceImage& img);

void write_tensors_csv(const std::string& path, const std::vector<Tensor>& tensors);

}  // namespace dzp
