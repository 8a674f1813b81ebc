#include "doctest.h"

#include <cmath>
#include <complex>

#include "curvlab/field.hpp"
#include "curvlab/finite_diff.hpp"
#include "curvlab/rng.hpp"
#include "curvlab/serialization.hpp"

using namespace curvlab;

namespace {

MatrixPolyField randomField(Prng& rng, int rows, int cols, int maxDeg) {
    MatrixPolyField f(rows, cols);
    for (int j = 0; j <= maxDeg; ++j)
        for (int k = 0; k + j <= maxDeg; ++k) {
            Matrix c(rows, cols);
            for (int r = 0; r < rows; ++r)
                for (int cc = 0; cc < cols; ++cc) c(r, cc) = rng.complexNormal();
            f.setCoeff(j, k, c);
        }
    return f;
}

double maxAbs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("coefficient table evaluates monomials in s and conj(s)") {
    MatrixPolyField f(1, 1);
    f.setCoeff(1, 1, scalarMatrix(1.0));
    const Complex s(1.0, 1.0);
    CHECK(std::abs(f.evalScalar(s) - Complex(2.0, 0.0)) < 1e-15);

    // 2 + 3 s sbar + (1+2i) s^2 at s = 0.5 - 0.25i
    MatrixPolyField g(1, 1);
    g.setCoeff(0, 0, scalarMatrix(2.0));
    g.setCoeff(1, 1, scalarMatrix(3.0));
    g.setCoeff(2, 0, scalarMatrix(Complex(1.0, 2.0)));
    const Complex t(0.5, -0.25);
    const Complex expected = 2.0 + 3.0 * std::norm(t) + Complex(1.0, 2.0) * t * t;
    CHECK(std::abs(g.evalScalar(t) - expected) < 1e-15);
}

TEST_CASE("table derivatives follow the power rule and match stencils") {
    // s^2 sbar: d/ds = 2 s sbar, d/dsbar = s^2, mixed = 2 s
    MatrixPolyField f(1, 1);
    f.setCoeff(2, 1, scalarMatrix(1.0));
    const Complex s(0.4, -0.7);

    const MatrixPolyField fs = f.derivative(Deriv::S);
    const MatrixPolyField fsb = f.derivative(Deriv::SBar);
    CHECK(std::abs(fs.evalScalar(s) - 2.0 * s * std::conj(s)) < 1e-15);
    CHECK(std::abs(fsb.evalScalar(s) - s * s) < 1e-15);
    CHECK(std::abs(fs.derivative(Deriv::SBar).evalScalar(s) - 2.0 * s) < 1e-15);

    Prng rng(7);
    const MatrixPolyField m = randomField(rng, 2, 2, 3);
    const auto fn = [&m](Complex z) { return m.eval(z); };
    const Complex z0(0.2, 0.1);
    CHECK(maxAbs(m.derivative(Deriv::S).eval(z0) - fdDerivative(fn, z0, FdWhich::S, 1e-5)) < 1e-7);
    CHECK(maxAbs(m.derivative(Deriv::SBar).eval(z0) - fdDerivative(fn, z0, FdWhich::SBar, 1e-5)) <
          1e-7);
    CHECK(maxAbs(m.derivative(Deriv::S).derivative(Deriv::SBar).eval(z0) -
                 fdDerivative(fn, z0, FdWhich::MixedSSBar, 1e-4)) < 1e-6);
}

TEST_CASE("holomorphy is absence of conj(s) coefficients") {
    MatrixPolyField f(1, 1);
    f.setCoeff(3, 0, scalarMatrix(2.0));
    CHECK(f.isHolomorphic());
    CHECK(f.derivative(Deriv::SBar).empty());
    f.setCoeff(0, 1, scalarMatrix(1e-3));
    CHECK_FALSE(f.isHolomorphic());
}

TEST_CASE("hermitian-symmetric tables are exactly the pointwise-hermitian fields") {
    MatrixPolyField f(1, 1);
    f.setCoeff(1, 1, scalarMatrix(1.0));
    f.setCoeff(1, 0, scalarMatrix(Complex(0.3, 0.4)));
    f.setCoeff(0, 1, scalarMatrix(Complex(0.3, -0.4)));
    CHECK(f.hasHermitianSymmetricTable());
    const Complex s(0.6, -0.2);
    CHECK(std::abs(f.evalScalar(s).imag()) < 1e-15);

    MatrixPolyField g(1, 1);
    g.setCoeff(1, 0, scalarMatrix(1.0));
    CHECK_FALSE(g.hasHermitianSymmetricTable());
}

TEST_CASE("conjugate transpose evaluates to the pointwise adjoint") {
    Prng rng(11);
    const MatrixPolyField f = randomField(rng, 2, 3, 2);
    const MatrixPolyField fh = f.conjugateTranspose();
    CHECK(fh.rows() == 3);
    CHECK(fh.cols() == 2);
    const Complex s(-0.4, 0.9);
    CHECK(maxAbs(fh.eval(s) - f.eval(s).adjoint()) < 1e-14);
}

TEST_CASE("shift recentres the table exactly") {
    Prng rng(13);
    const MatrixPolyField f = randomField(rng, 2, 2, 3);
    const Complex c(0.3, -0.8);
    const MatrixPolyField g = f.shiftedBy(c);
    for (const Complex t : {Complex(0.0, 0.0), Complex(0.5, 0.2), Complex(-1.0, 0.7)})
        CHECK(maxAbs(g.eval(t) - f.eval(t + c)) < 1e-12);
}

TEST_CASE("product, truncation, and truncated product agree") {
    Prng rng(17);
    const MatrixPolyField f = randomField(rng, 2, 2, 2);
    const MatrixPolyField g = randomField(rng, 2, 2, 2);
    const Complex s(0.25, 0.55);
    CHECK(maxAbs((f * g).eval(s) - f.eval(s) * g.eval(s)) < 1e-13);
    const MatrixPolyField t1 = (f * g).truncated(2);
    const MatrixPolyField t2 = f.mulTruncated(g, 2);
    CHECK(maxAbs(t1.eval(s) - t2.eval(s)) < 1e-13);
    CHECK(t1.maxTotalDegree() <= 2);

    const MatrixPolyField bad(1, 1);
    CHECK_THROWS_AS((void)(bad * f), FieldError);
}

TEST_CASE("exponential surrogate reproduces the exponential on its domain") {
    MatrixPolyField abs2(1, 1);
    abs2.setCoeff(1, 1, scalarMatrix(1.0));
    const MatrixPolyField e = expSurrogate(abs2, 20);
    CHECK(e.hasHermitianSymmetricTable(1e-10));
    CHECK(std::abs(e.evalScalar(Complex(1.0, 0.0)) - std::exp(1.0)) < 1e-13);
    CHECK(std::abs(e.evalScalar(Complex(1.0, 1.0)) - std::exp(2.0)) < 1e-12);

    const MatrixPolyField eneg = expSurrogate(abs2 * Complex(-1.0, 0.0), 20);
    CHECK(std::abs(eneg.evalScalar(Complex(1.0, 0.0)) - std::exp(-1.0)) < 1e-13);
}

TEST_CASE("grid domain forces odd resolution and centers a node") {
    GridDomain g(Complex(0.5, -0.5), 1.0, 2.0, 32);
    CHECK(g.resolution() == 33);
    CHECK(std::abs(g.node(16, 16) - g.center()) < 1e-15);
    CHECK(std::abs(g.node(0, 0) - Complex(-0.5, -2.5)) < 1e-15);
    CHECK(std::abs(g.node(32, 32) - Complex(1.5, 1.5)) < 1e-15);
    CHECK(g.spacingRe() == doctest::Approx(2.0 / 32));
    CHECK(g.spacingIm() == doctest::Approx(4.0 / 32));
    CHECK(g.contains(Complex(1.4, 1.0)));
    CHECK_FALSE(g.contains(Complex(1.6, 0.0)));
    CHECK(g.distanceToBoundary(g.center()) == doctest::Approx(1.0));
    CHECK(g.sameLayout(GridDomain(Complex(0.5, -0.5), 1.0, 2.0, 33)));
    CHECK_FALSE(g.sameLayout(GridDomain(Complex(0.5, -0.5), 1.0, 2.0, 65)));
}

TEST_CASE("scalar samples interpolate bilinearly and respect the mask") {
    GridDomain g(Complex(0.0, 0.0), 1.0, 1.0, 33);
    const auto affine = [](Complex s) { return 2.0 * s.real() + 3.0 * s.imag() + 1.0; };
    ScalarSampleField u = ScalarSampleField::sample(g, affine);
    CHECK(u.validCount() == g.nodeCount());
    CHECK(*u.minValue() == doctest::Approx(-4.0));
    CHECK(*u.maxValue() == doctest::Approx(6.0));

    Prng rng(23);
    for (int t = 0; t < 20; ++t) {
        const Complex s = rng.pointIn(g.rect());
        const auto v = u.interpolate(s);
        REQUIRE(v.has_value());
        CHECK(*v == doctest::Approx(affine(s)).epsilon(1e-12));
    }
    CHECK_FALSE(u.interpolate(Complex(1.5, 0.0)).has_value());

    u.setMasked(16, 16);
    CHECK_FALSE(u.valid(16, 16));
    CHECK_FALSE(u.interpolate(g.center() + Complex(1e-3, 1e-3)).has_value());
    CHECK(u.validCount() == g.nodeCount() - 1);
}

TEST_CASE("circle averages are exact for quadratic and harmonic integrands") {
    const Complex c(0.3, 0.2);
    const double r = 0.35;
    const std::function<double(Complex)> abs2 = [](Complex z) { return std::norm(z); };
    const auto avg = circleAverage(abs2, c, r, 64);
    REQUIRE(avg.has_value());
    CHECK(*avg == doctest::Approx(std::norm(c) + r * r).epsilon(1e-13));

    const std::function<double(Complex)> re = [](Complex z) { return z.real(); };
    CHECK(*circleAverage(re, c, r, 64) == doctest::Approx(c.real()).epsilon(1e-13));

    GridDomain g(Complex(0.0, 0.0), 1.0, 1.0, 129);
    const ScalarSampleField u = ScalarSampleField::sample(g, abs2);
    const auto sampled = circleAverage(u, Complex(0.0, 0.0), 0.25, 64);
    REQUIRE(sampled.has_value());
    CHECK(std::abs(*sampled - 0.0625) < 1e-3);

    CHECK_THROWS_AS((void)circleAverage(abs2, c, -1.0, 64), FieldError);
    CHECK_THROWS_AS((void)circleAverage(abs2, c, r, 8), FieldError);
}

TEST_CASE("stencil derivatives reject points whose stencil leaves the domain") {
    const auto fn = [](Complex s) { return scalarMatrix(s * s * std::conj(s)); };
    const Rect box{Complex(0.0, 0.0), 1.0, 1.0};
    CHECK_THROWS_AS((void)fdDerivative(fn, Complex(1.0, 0.0), FdWhich::S, 1e-3, box), StencilError);
    CHECK_NOTHROW((void)fdDerivative(fn, Complex(0.0, 0.0), FdWhich::S, 1e-3, box));
}

TEST_CASE("seeded generator is the reference engine with derived draws") {
    Prng a(42);
    std::mt19937_64 ref(42);
    CHECK(a.raw() == ref());
    CHECK(a.raw() == ref());
    CHECK(std::string(Prng::kAlgorithm) == "mt19937_64");

    Prng b(42);
    Prng c(42);
    for (int i = 0; i < 100; ++i) CHECK(b.uniform() == c.uniform());

    Prng d(5);
    for (int i = 0; i < 200; ++i) {
        const double u = d.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(d.uniformInt(6) <= 6);
    }
    CHECK(d.unitVector(5).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("field and grid JSON round-trips preserve every coefficient") {
    Prng rng(29);
    const MatrixPolyField f = randomField(rng, 2, 3, 2);
    const MatrixPolyField back = fieldFromJson(toJson(f));
    CHECK(back.rows() == f.rows());
    CHECK(back.cols() == f.cols());
    REQUIRE(back.coeffs().size() == f.coeffs().size());
    for (const auto& [b, m] : f.coeffs()) CHECK(maxAbs(back.coeff(b.j, b.k) - m) == 0.0);

    const GridDomain g(Complex(0.25, -0.75), 0.5, 1.5, 65);
    const GridDomain gb = gridFromJson(toJson(g));
    CHECK(gb.sameLayout(g));

    CHECK_THROWS_AS((void)fieldFromJson("not json"), ParseError);
    CHECK_THROWS_AS((void)fieldFromJson("{\"cols\": 1}"), ParseError);
    CHECK_THROWS_AS((void)gridFromJson("{\"resolution\": 9}"), ParseError);
}
