#include "curvlab/finite_diff.hpp"

#include <cmath>
#include <numbers>

namespace curvlab {

namespace {

void checkStencil(Complex p, const std::optional<Rect>& domain) {
    if (domain && !domain->contains(p))
        throw StencilError("finite-difference stencil point (" + std::to_string(p.real()) + ", " +
                           std::to_string(p.imag()) + ") lies outside the declared domain");
}

}  // namespace

Matrix fdDerivative(const std::function<Matrix(Complex)>& f, Complex s, FdWhich which,
                    double step, const std::optional<Rect>& domain) {
    if (!(step > 0.0) || !std::isfinite(step)) throw FieldError("fd step must be positive");
    const Complex h(step, 0.0);
    const Complex ih(0.0, step);
    for (Complex p : {s + h, s - h, s + ih, s - ih}) checkStencil(p, domain);

    const Matrix dRe = f(s + h) - f(s - h);
    const Matrix dIm = f(s + ih) - f(s - ih);
    switch (which) {
        case FdWhich::S:
            return (dRe - Complex(0, 1) * dIm) / (4.0 * step);
        case FdWhich::SBar:
            return (dRe + Complex(0, 1) * dIm) / (4.0 * step);
        case FdWhich::MixedSSBar: {
            checkStencil(s, domain);
            return (f(s + h) + f(s - h) + f(s + ih) + f(s - ih) - 4.0 * f(s)) /
                   (4.0 * step * step);
        }
    }
    throw FieldError("unreachable fd mode");
}

Complex fdDerivativeScalar(const std::function<Complex(Complex)>& f, Complex s, FdWhich which,
                           double step, const std::optional<Rect>& domain) {
    auto wrap = [&f](Complex z) {
        Matrix m(1, 1);
        m(0, 0) = f(z);
        return m;
    };
    return fdDerivative(wrap, s, which, step, domain)(0, 0);
}

double fdDerivativeReal(const std::function<double(Complex)>& f, Complex s, FdWhich which,
                        double step, const std::optional<Rect>& domain) {
    auto wrap = [&f](Complex z) { return Complex(f(z), 0.0); };
    return fdDerivativeScalar(wrap, s, which, step, domain).real();
}

std::optional<double> circleAverage(const std::function<std::optional<double>(Complex)>& u,
                                    Complex z0, double r, int nodes) {
    if (!(r > 0.0) || !std::isfinite(r)) throw FieldError("circle radius must be positive");
    if (nodes < 16) throw FieldError("circle average needs at least 16 nodes");
    double acc = 0.0;
    for (int k = 0; k < nodes; ++k) {
        const double tau = 2.0 * std::numbers::pi * k / nodes;
        const auto v = u(z0 + Complex(r * std::cos(tau), r * std::sin(tau)));
        if (!v || !std::isfinite(*v)) return std::nullopt;
        acc += *v;
    }
    return acc / nodes;
}

std::optional<double> circleAverage(const ScalarSampleField& u, Complex z0, double r, int nodes) {
    return circleAverage([&u](Complex z) { return u.interpolate(z); }, z0, r, nodes);
}

std::optional<double> circleAverage(const std::function<double(Complex)>& u, Complex z0,
                                    double r, int nodes) {
    return circleAverage(
        [&u](Complex z) -> std::optional<double> { return u(z); }, z0, r, nodes);
}

}  // namespace curvlab
