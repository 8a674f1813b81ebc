#include "doctest.h"

#include <cmath>
#include <complex>
#include <tuple>
#include <vector>

#include "curvlab/field.hpp"
#include "curvlab/metric.hpp"
#include "curvlab/rng.hpp"
#include "curvlab/serialization.hpp"
#include "curvlab/sheaf.hpp"

using namespace curvlab;

namespace {

MatrixPolyField scalarTable(std::initializer_list<std::tuple<int, int, Complex>> entries) {
    MatrixPolyField f(1, 1);
    for (const auto& [j, k, c] : entries) f.addCoeff(j, k, scalarMatrix(c));
    return f;
}

// Three fiber points: flat, gaussian growth, and a linear tilt.
FiberedMetric makeFm(double a) {
    std::vector<MatrixPolyField> rho;
    rho.emplace_back(1, 1);                                          // rho_0 = 0
    rho.push_back(scalarTable({{1, 1, 1.0}}));                       // rho_1 = |s|^2
    rho.push_back(scalarTable({{1, 0, 0.3}, {0, 1, 0.3}}));          // rho_2 = 0.6 Re s
    return FiberedMetric({1.0, 0.5, 2.0}, WeightField(std::move(rho)), a);
}

// Independent accumulation with plain pow/exp, no shared code with lpMetric.
double referenceNorm(double a, Complex s, const Vector& w) {
    const double rhos[3] = {0.0, std::norm(s), 0.6 * s.real()};
    const double mus[3] = {1.0, 0.5, 2.0};
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) acc += mus[i] * std::pow(std::abs(w[i]), a) * std::exp(rhos[i]);
    return std::pow(acc, 1.0 / a);
}

const GridDomain kGrid(Complex(0.0, 0.0), 0.7, 0.7, 17);

}  // namespace

TEST_CASE("weighted fiber norm matches an independent accumulation") {
    Prng rng(11);
    for (const double a : {2.0, 3.0, 4.0, 2.5}) {
        const FiberedMetric fm = makeFm(a);
        for (int t = 0; t < 10; ++t) {
            const Complex s = rng.pointIn(kGrid.rect());
            const Vector w = rng.gaussianVector(3);
            const double got = lpMetric(fm, s, w);
            const double want = referenceNorm(a, s, w);
            CHECK(std::abs(got - want) <= 1e-14 * (1.0 + want));
        }
    }
}

TEST_CASE("norm axioms hold for every packaged metric sample and fail when corrupted") {
    const FiberedMetric fm = makeFm(3.0);
    CHECK(metricAxiomsCheck(makeLpSheafSample(fm, kGrid), 6, 21).pass);
    CHECK(metricAxiomsCheck(makeDirectImageSheafSample(fm, kGrid), 6, 22).pass);

    const MetricField flat = MetricField::validate(MatrixPolyField::identity(2), kGrid);
    CHECK(metricAxiomsCheck(makeBundleSheafSample(flat), 6, 23).pass);

    const VerificationReport bad =
        metricAxiomsCheck(corruptHomogeneity(makeLpSheafSample(fm, kGrid)), 6, 24);
    CHECK_FALSE(bad.pass);
    CHECK(bad.residual > bad.tolerance);

    CHECK_THROWS_AS((void)metricAxiomsCheck(makeLpSheafSample(fm, kGrid), 1, 25), FieldError);
}

TEST_CASE("dual map closed form agrees with central finite differences") {
    const FiberedMetric fm = makeFm(3.0);
    Prng rng(31);
    for (int t = 0; t < 8; ++t) {
        const Complex s = rng.pointIn(kGrid.rect());
        const Vector w = rng.unitVector(3);
        const Vector probe = rng.unitVector(3);
        const Complex fd = dualMapGamma(fm, s, w, probe);
        const Complex cf = dualMapGammaClosedForm(fm, s, w, probe);
        CHECK(std::abs(fd - cf) < 5e-9);
    }
    CHECK_THROWS_AS((void)dualMapGammaClosedForm(fm, Complex(0.0, 0.0), Vector::Zero(3),
                                                 Vector::Ones(3)),
                    FieldError);
}

TEST_CASE("quadratic-exponent dual map is the conjugate diagonal pairing over twice the norm") {
    const FiberedMetric fm = makeFm(2.0);
    Prng rng(37);
    for (int t = 0; t < 6; ++t) {
        const Complex s = rng.pointIn(kGrid.rect());
        const Vector w = rng.gaussianVector(3);
        const Vector probe = rng.gaussianVector(3);
        const double q = lpMetric(fm, s, w);
        Complex pairing(0.0, 0.0);
        for (int i = 0; i < 3; ++i)
            pairing += fm.mu(i) * std::exp(fm.rho().value(i, s)) * std::conj(probe[i]) * w[i];
        const Complex want = std::conj(pairing / (2.0 * q));
        CHECK(std::abs(dualMapGammaClosedForm(fm, s, w, probe) - want) <= 1e-12 * (1.0 + q));
    }
}

TEST_CASE("dual map satisfies the Euler identity and ignores positive rescaling of the base") {
    Prng rng(41);
    for (const double a : {2.0, 3.0, 4.0}) {
        const FiberedMetric fm = makeFm(a);
        const Complex s = rng.pointIn(kGrid.rect());
        const Vector w = rng.gaussianVector(3);
        const double q = lpMetric(fm, s, w);
        CHECK(std::abs(dualMapGammaClosedForm(fm, s, w, w) - q / 2.0) <= 1e-12 * (1.0 + q));

        const Vector probe = rng.gaussianVector(3);
        const Complex g1 = dualMapGammaClosedForm(fm, s, w, probe);
        const Complex g2 = dualMapGammaClosedForm(fm, s, Vector(3.7 * w), probe);
        CHECK(std::abs(g1 - g2) <= 1e-12 * (1.0 + std::abs(g1)));
    }
}

TEST_CASE("stationary family interpolates the vector with the dual-flattening slope") {
    const double a = 3.0;
    const FiberedMetric fm = makeFm(a);
    const Complex s0(0.15, 0.1);
    Prng rng(47);
    const Vector w = rng.unitVector(3);

    const Section stat = lpSection(fm, s0, w, SectionFamily::Stationary);
    REQUIRE(stat.size() == 3);
    const Vector at0 = evalSection(stat, s0);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(at0[i] - w[i]) < 1e-14);
        CHECK(stat[static_cast<std::size_t>(i)].isHolomorphic());
        const Complex slope = stat[static_cast<std::size_t>(i)].coeff(1, 0)(0, 0);
        const Complex want = -(2.0 / a) * fm.rho().dS(i, s0) * w[i];
        CHECK(std::abs(slope - want) < 1e-14);
    }

    const Section cst = lpSection(fm, s0, w, SectionFamily::Constant);
    for (int i = 0; i < 3; ++i) {
        CHECK(cst[static_cast<std::size_t>(i)].coeffs().size() == 1);
        CHECK(std::abs(cst[static_cast<std::size_t>(i)].coeff(0, 0)(0, 0) - w[i]) == 0.0);
    }

    CHECK_THROWS_AS((void)lpSection(fm, s0, Vector::Zero(3)), FieldError);
}

TEST_CASE("stationarity residual is tiny and beats the constant family by an order of magnitude") {
    Prng rng(53);
    for (const double a : {2.0, 3.0, 4.0}) {
        const FiberedMetric fm = makeFm(a);
        const VerificationReport rep =
            stationarityCheck(fm, Complex(0.15, 0.1), rng.unitVector(3), 4, 59);
        CHECK(rep.pass);
        CHECK(rep.details.at("improvement_ratio") >= 10.0);
    }
}

TEST_CASE("quadratic exponent agrees with the honest diagonal bundle metric") {
    const FiberedMetric fm = makeFm(2.0);
    const GridDomain grid(Complex(0.0, 0.0), 0.6, 0.6, 17);
    const MetricField induced = inducedDiagonalMetric(fm, grid, 16);
    CHECK(induced.rank() == 3);

    Prng rng(61);
    for (int t = 0; t < 30; ++t) {
        const Complex s = rng.pointIn(grid.rect());
        const Vector w = rng.gaussianVector(3);
        const double q = lpMetric(fm, s, w);
        CHECK(std::abs(q - induced.norm(s, w)) <= 1e-10 * (1.0 + q));
    }

    // the stationary family coincides with the bundle-metric stationary section
    const Complex s0(0.1, -0.05);
    const Vector w = rng.unitVector(3);
    const Section viaSheaf = lpSection(fm, s0, w, SectionFamily::Stationary);
    const SectionField viaBundle = stationarySection(induced, s0, w);
    for (const Complex s : {Complex(0.3, 0.2), Complex(-0.2, 0.4), Complex(0.0, 0.0)}) {
        const Vector d = evalSection(viaSheaf, s) - viaBundle.eval(s);
        CHECK(d.norm() < 1e-8);
    }
}

TEST_CASE("direct image of a constant section under gaussian decay is the scaled half-gaussian") {
    std::vector<MatrixPolyField> rho;
    for (int i = 0; i < 3; ++i) rho.push_back(scalarTable({{1, 1, -1.0}}));
    const FiberedMetric fm({1.0, 1.0, 2.0}, WeightField(std::move(rho)), 2.0);

    Vector w(3);
    w << Complex(1.0, 0.0), Complex(0.0, 2.0), Complex(0.5, 0.0);
    const double amp = std::sqrt(1.0 + 4.0 + 2.0 * 0.25);

    const ScalarSampleField f = directImageMetric(fm, constantSection(w), kGrid);
    const int n = kGrid.resolution();
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            REQUIRE(f.valid(ix, iy));
            const double want = amp * std::exp(-0.5 * std::norm(kGrid.node(ix, iy)));
            CHECK(std::abs(f.value(ix, iy) - want) < 1e-12 * amp);
            CHECK(f.value(ix, iy) == doctest::Approx(f.value(n - 1 - ix, iy)).epsilon(1e-13));
        }

    CHECK_THROWS_AS((void)directImageMetric(fm, constantSection(Vector::Ones(2)), kGrid),
                    FieldError);
}

TEST_CASE("weight fields must be real-valued and report finite bounds") {
    CHECK_THROWS_AS(WeightField({scalarTable({{1, 0, 1.0}})}), FieldError);

    const WeightField wf({scalarTable({{1, 1, 1.0}})});
    const WeightField::Bounds b = wf.boundsOn(GridDomain(Complex(0.0, 0.0), 1.0, 1.0, 9));
    CHECK(b.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(b.firstDeriv == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(b.secondDeriv == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fibered metric construction rejects invalid exponents and weights") {
    auto gauss = [] {
        std::vector<MatrixPolyField> rho;
        rho.push_back(scalarTable({{1, 1, 1.0}}));
        return WeightField(std::move(rho));
    };
    CHECK_THROWS_AS(FiberedMetric({1.0}, gauss(), 1.5), FieldError);
    CHECK_THROWS_AS(FiberedMetric({0.0}, gauss(), 2.0), FieldError);
    CHECK_THROWS_AS(FiberedMetric({-1.0}, gauss(), 2.0), FieldError);
    CHECK_THROWS_AS(FiberedMetric({1.0, 1.0}, gauss(), 2.0), FieldError);
}

TEST_CASE("hom-family check passes under curvature ordering and abstains without it") {
    // The ladder policy reaches 16 grid spacings, so the grid must be fine
    // enough to leave testable interior nodes: 16 * (1.6/40) = 0.64 < 0.8.
    const GridDomain g(Complex(0.0, 0.0), 0.8, 0.8, 41);
    const MetricField flat = MetricField::validate(MatrixPolyField::identity(2), g);

    const MatrixPolyField growExp = expSurrogate(scalarTable({{1, 1, 1.0}}), 20);
    MatrixPolyField growth(2, 2);
    for (const auto& [b, m] : growExp.coeffs())
        growth.setCoeff(b.j, b.k, m(0, 0) * Matrix::Identity(2, 2));
    const MetricField grow = MetricField::validate(growth, g);

    const MatrixPolyField decayExp = expSurrogate(scalarTable({{1, 1, -1.0}}), 20);
    MatrixPolyField decayF(2, 2);
    for (const auto& [b, m] : decayExp.coeffs())
        decayF.setCoeff(b.j, b.k, m(0, 0) * Matrix::Identity(2, 2));
    const MetricField decay = MetricField::validate(decayF, g);

    const std::vector<MatrixPolyField> gens = {MatrixPolyField::identity(2)};

    const VerificationReport ok = homFamilyGriffithsCheck(flat, grow, gens, 3, 71);
    CHECK(ok.pass);
    // gap = max target curvature - min source curvature; ordering holds at <= 0
    CHECK(ok.details.at("ordering_gap") == doctest::Approx(-1.0).epsilon(1e-6));

    const VerificationReport na = homFamilyGriffithsCheck(flat, decay, gens, 3, 71);
    CHECK_FALSE(na.pass);
    CHECK(na.inconclusive);
    CHECK(na.details.at("ordering_gap") == doctest::Approx(1.0).epsilon(1e-6));

    CHECK_THROWS_AS((void)homFamilyGriffithsCheck(flat, grow, {}, 3, 71), FieldError);
}

TEST_CASE("weighted fiber sets serialize and parse back to the same norm") {
    const FiberedMetric fm = makeFm(3.0);
    const FiberedMetric back = fiberedFromJson(toJson(fm));
    CHECK(back.exponent() == fm.exponent());
    CHECK(back.fiberCount() == fm.fiberCount());
    for (int i = 0; i < 3; ++i) CHECK(back.mu(i) == fm.mu(i));
    Prng rng(83);
    for (int t = 0; t < 5; ++t) {
        const Complex s = rng.pointIn(kGrid.rect());
        const Vector w = rng.gaussianVector(3);
        CHECK(lpMetric(back, s, w) == lpMetric(fm, s, w));
    }
    CHECK_THROWS_AS((void)fiberedFromJson("{\"a\": 2}"), ParseError);
}

TEST_CASE("random holomorphic sections are reproducible and honestly holomorphic") {
    Prng a(97), b(97), c(98);
    const Section sa = randomHolomorphicSection(a, 3, 2);
    const Section sb = randomHolomorphicSection(b, 3, 2);
    const Section sc = randomHolomorphicSection(c, 3, 2);
    REQUIRE(sa.size() == 3);
    bool identical = true, differs = false;
    for (int i = 0; i < 3; ++i) {
        const auto& fi = sa[static_cast<std::size_t>(i)];
        CHECK(fi.isHolomorphic());
        CHECK(fi.maxDegreeS() <= 2);
        for (const Complex s : {Complex(0.4, -0.3), Complex(-0.1, 0.2)}) {
            identical = identical && (fi.evalScalar(s) == sb[static_cast<std::size_t>(i)].evalScalar(s));
            differs = differs || (fi.evalScalar(s) != sc[static_cast<std::size_t>(i)].evalScalar(s));
        }
    }
    CHECK(identical);
    CHECK(differs);
}
