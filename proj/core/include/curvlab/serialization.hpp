#pragma once

#include <stdexcept>
#include <string>

#include "curvlab/field.hpp"
#include "curvlab/metric.hpp"
#include "curvlab/psh.hpp"
#include "curvlab/report.hpp"
#include "curvlab/sheaf.hpp"

namespace curvlab {

// Malformed input (JSON syntax, schema violations, bad values). The CLI maps
// this to the configuration-error exit code.
struct ParseError : std::runtime_error {
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Coefficient-table fields:
//   {rows, cols, coeffs: [{j, k, matrix: [[{re, im}, ...], ...]}, ...]}
std::string toJson(const MatrixPolyField& f);
MatrixPolyField fieldFromJson(const std::string& text);

// Grids: {center: {re, im}, half_width_re, half_width_im, resolution}
std::string toJson(const GridDomain& g);
GridDomain gridFromJson(const std::string& text);

// Weighted fiber sets: {fiber_points: [{weight, rho_coeffs}], a}
std::string toJson(const FiberedMetric& fm);
FiberedMetric fiberedFromJson(const std::string& text);

// Check outcome: {check, pass, residual, witness: {s, v, note}, samples,
// tolerance, seed} plus additive fields (inconclusive, details).
std::string toJson(const VerificationReport& rep);

// Mean-value verdict with the radius ladder and worst node.
std::string toJson(const PshReport& rep);

// CSV heatmaps, row-major (iy outer), %.17g values, fixed header line.
// Curvature columns: re_s, im_s, then R entries row-major re/im interleaved.
std::string curvatureMapCsv(const MetricField& m);
// Scalar columns: re_s, im_s, <valueName>; masked nodes emit nan.
std::string scalarFieldCsv(const ScalarSampleField& f, const std::string& valueName = "value");

std::string readTextFile(const std::string& path);
void writeTextFile(const std::string& path, const std::string& content);

}  // namespace curvlab
