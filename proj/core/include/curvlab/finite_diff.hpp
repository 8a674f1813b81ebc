#pragma once

#include <functional>
#include <optional>

#include "curvlab/field.hpp"

namespace curvlab {

struct StencilError : FieldError {
    using FieldError::FieldError;
};

enum class FdWhich { S, SBar, MixedSSBar };

// Central-difference Wirtinger derivatives of a matrix-valued function,
// used as the independent cross-check for the exact coefficient-table
// derivatives ("trust the algebra, verify with the stencil"):
//
//   d/ds      = ((F(s+h)-F(s-h)) - i(F(s+ih)-F(s-ih))) / 4h
//   d/dsbar   = ((F(s+h)-F(s-h)) + i(F(s+ih)-F(s-ih))) / 4h
//   d2/dsdsbar = (F(s+h)+F(s-h)+F(s+ih)+F(s-ih)-4F(s)) / 4h^2   (quarter Laplacian)
//
// All stencils are O(h^2). When `domain` is given, a stencil point falling
// outside it throws StencilError.
Matrix fdDerivative(const std::function<Matrix(Complex)>& f, Complex s, FdWhich which,
                    double step, const std::optional<Rect>& domain = std::nullopt);

Complex fdDerivativeScalar(const std::function<Complex(Complex)>& f, Complex s, FdWhich which,
                           double step, const std::optional<Rect>& domain = std::nullopt);

double fdDerivativeReal(const std::function<double(Complex)>& f, Complex s, FdWhich which,
                        double step, const std::optional<Rect>& domain = std::nullopt);

// Trapezoid average of u over the circle |z - z0| = r, on `nodes` equispaced
// points (periodic trapezoid; spectrally accurate for smooth u). Returns
// nullopt when any sample is invalid (non-finite, or interpolation failed).
// nodes must be >= 16, r > 0.
std::optional<double> circleAverage(const std::function<std::optional<double>(Complex)>& u,
                                    Complex z0, double r, int nodes = 64);

std::optional<double> circleAverage(const ScalarSampleField& u, Complex z0, double r,
                                    int nodes = 64);

std::optional<double> circleAverage(const std::function<double(Complex)>& u, Complex z0,
                                    double r, int nodes = 64);

}  // namespace curvlab
