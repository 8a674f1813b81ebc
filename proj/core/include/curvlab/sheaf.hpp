#pragma once

#include <functional>
#include <vector>

#include "curvlab/field.hpp"
#include "curvlab/metric.hpp"
#include "curvlab/report.hpp"
#include "curvlab/rng.hpp"

namespace curvlab {

// A section over a finite fiber set: one holomorphic 1x1 polynomial per fiber
// point. Sections form a module over holomorphic scalars.
using Section = std::vector<MatrixPolyField>;

Section sectionAdd(const Section& f, const Section& g);
Section sectionScale(const MatrixPolyField& scalar, const Section& f);
Vector evalSection(const Section& f, Complex s);
Section constantSection(const Vector& w);
Section randomHolomorphicSection(Prng& rng, int dim, int maxDegree, double scale = 1.0);
MatrixPolyField randomHolomorphicScalar(Prng& rng, int maxDegree, double scale = 1.0);

// Real-valued polynomial weight rho_i(s) per fiber point, with a bounds
// certificate (sup of the weight and its first two derivatives over a grid).
// Polynomial weights are automatically uniformly C^1 on compacts; the
// certificate records the constants instead of re-checking them dynamically.
class WeightField {
public:
    explicit WeightField(std::vector<MatrixPolyField> rho);

    int count() const { return static_cast<int>(rho_.size()); }
    const MatrixPolyField& rho(int i) const { return rho_.at(static_cast<std::size_t>(i)); }
    double value(int i, Complex s) const;
    Complex dS(int i, Complex s) const;

    struct Bounds {
        double value = 0.0;
        double firstDeriv = 0.0;
        double secondDeriv = 0.0;
    };
    Bounds boundsOn(const GridDomain& grid) const;

private:
    std::vector<MatrixPolyField> rho_;
    mutable std::vector<MatrixPolyField> rhoDs_;  // cached s-derivatives
};

// Weighted finite fiber set carrying the norm
//   q(s, w) = (sum_i mu_i |w_i|^a e^{rho_i(s)})^{1/a},  a in [2, inf).
class FiberedMetric {
public:
    FiberedMetric(std::vector<double> weights, WeightField rho, double a);

    int fiberCount() const { return static_cast<int>(mu_.size()); }
    double exponent() const { return a_; }
    double mu(int i) const { return mu_.at(static_cast<std::size_t>(i)); }
    const WeightField& rho() const { return rho_; }

private:
    std::vector<double> mu_;
    WeightField rho_;
    double a_;
};

double lpMetric(const FiberedMetric& fm, Complex s, const Vector& w);

// Holomorphic section families through w at s0 used by the stationarity test.
// Stationary is the family whose dual-map image is antiholomorphically flat
// at s0; Constant is the trivial extension used as the comparison baseline.
enum class SectionFamily { Stationary, Constant };

Section lpSection(const FiberedMetric& fm, Complex s0, const Vector& w,
                  SectionFamily family = SectionFamily::Stationary);

// gamma_w(probe): the complex-linear part of the norm differential at w,
// i.e. the Wirtinger d/dt of t -> q(s, w + t probe) at t = 0. The finite
// difference version uses central steps on both real axes of t; the closed
// form is exact. In this convention the a = 2 value is the conjugate of the
// diagonal-metric pairing <P w, probe>/(2 q); the certification test matches
// against that conjugate.
Complex dualMapGamma(const FiberedMetric& fm, Complex s, const Vector& w, const Vector& probe,
                     double step = 1e-5);
Complex dualMapGammaClosedForm(const FiberedMetric& fm, Complex s, const Vector& w,
                               const Vector& probe);

// max over probes of |d/dsbar gamma_{F(s)}(probe)| at s0 by central finite
// differences; the integrand uses the exact dual map. scaleOut reports the
// magnitude scale entering the tolerance.
double stationarityResidual(const FiberedMetric& fm, Complex s0, const Vector& w,
                            SectionFamily family, const std::vector<Vector>& probes,
                            double outerStep, double& scaleOut);

// Pass iff the stationary family's residual stays below 100 step^2 scale.
// Details carry the constant-family baseline for comparison.
VerificationReport stationarityCheck(const FiberedMetric& fm, Complex s0, const Vector& w,
                                     int probes, std::uint64_t seed, double outerStep = 1e-4);

// Direct image norm per node: sqrt(sum_i mu_i e^{rho_i(s)} |phi_i(s)|^2),
// the quadrature form of integrating the fiber metric against the section.
ScalarSampleField directImageMetric(const FiberedMetric& fm, const Section& phi,
                                    const GridDomain& grid);

// The a = 2 case as an honest diagonal hermitian metric, with the weight
// exponentials replaced by certified polynomial surrogates.
MetricField inducedDiagonalMetric(const FiberedMetric& fm, const GridDomain& grid,
                                  int expOrder = 16);

// A metric presented only through its evaluator, as the axioms check needs.
struct SheafMetricSample {
    GridDomain grid;
    int sectionDim;
    std::function<double(const Section&, Complex)> eval;
};

SheafMetricSample makeBundleSheafSample(const MetricField& m);
SheafMetricSample makeLpSheafSample(const FiberedMetric& fm, const GridDomain& grid);
SheafMetricSample makeDirectImageSheafSample(const FiberedMetric& fm, const GridDomain& grid);
// Deliberately broken evaluator (squared norm) for the designed failure case.
SheafMetricSample corruptHomogeneity(const SheafMetricSample& base);

// Triangle inequality, |f|-homogeneity under holomorphic scalars, and
// nondegeneracy of sampled sections, on every grid node.
VerificationReport metricAxiomsCheck(const SheafMetricSample& sample, int sectionSamples,
                                     std::uint64_t seed);

// Necessary condition for seminegative curvature of the homomorphism sheaf:
// under the curvature ordering precondition (inf of source curvature
// quotients >= sup of target ones, an exact per-node eigenvalue comparison),
// log ||alpha(s)|| must be psh for every sampled holomorphic family alpha in
// the span of the generators. A failed precondition reports not-applicable
// (inconclusive), never failure.
VerificationReport homFamilyGriffithsCheck(const MetricField& source, const MetricField& target,
                                           const std::vector<MatrixPolyField>& generators,
                                           int familySamples, std::uint64_t seed);

}  // namespace curvlab
