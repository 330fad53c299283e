// io.hpp - JSON and CSV file formats for matrices, kernels, POVMs, states,
// CP maps and tomography problems.
//
//   complex  [re, im]
//   matrix   {"rows": r, "cols": c, "data": [[re, im], ...]}   (row-major)
//   kernel   {"dim": d, "labels": [...], "blocks": [[matrix, ...], ...]}
//   povm     {"dim": d, "effects": [matrix, ...]}
//   state    {"dim": d, "matrix": matrix}
//   cpmap    {"dim": n, "kraus": [matrix, ...], "unital": bool}
//   problem  {"kernel": kernel, "pairs": [[i, j], ...], "data": [[re, im], ...]}
//
// Doubles are written with 17 significant digits.

#pragma once

#include "opk/dilation.hpp"
#include "opk/gaussian.hpp"
#include "opk/kernels.hpp"
#include "opk/quantum.hpp"
#include "opk/tomography.hpp"

#include "json.hpp"

#include <filesystem>
#include <string>

namespace opk::io {

using json = nlohmann::json;

json to_json(Complex z);
json to_json(const ComplexMatrix& m);
json to_json(const OperatorKernel& k);
json to_json(const POVM& q);
json to_json(const DensityMatrix& rho);
json to_json(const CPMap& phi);
json to_json(const TomographyProblem& problem);

Complex complex_from_json(const json& j);
ComplexMatrix matrix_from_json(const json& j);
OperatorKernel kernel_from_json(const json& j);
POVM povm_from_json(const json& j);
DensityMatrix state_from_json(const json& j);
CPMap cpmap_from_json(const json& j);
TomographyProblem problem_from_json(const json& j);

/// Serializer with %.17g doubles; arrays of scalars stay on one line.
std::string dump(const json& j, int indent = 2);

/// Throws Error(Parse) on unreadable files or malformed JSON.
json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

std::string format_double(double x);

/// Header `label,re_0,im_0,...`, then one row per (draw, point), grouped by draw.
std::string batch_to_csv(const SampleBatch& batch);

} // namespace opk::io
