#pragma once

#include "curvlab/metric.hpp"
#include "curvlab/psh.hpp"
#include "curvlab/report.hpp"

namespace curvlab {

// A holomorphic bundle map A: (E, h) -> (E', h') between metrized trivial
// bundles over the same grid. The operator norm at s is the largest singular
// value of sqrt(P'(s)) A(s) invsqrt(P(s)), i.e. the metric operator norm
// sup p'(Av)/p(v).
class HomomorphismField {
public:
    HomomorphismField(MatrixPolyField a, MetricField source, MetricField target);

    const MatrixPolyField& field() const { return a_; }
    const MetricField& source() const { return source_; }
    const MetricField& target() const { return target_; }
    const GridDomain& domain() const { return source_.domain(); }

    Matrix value(Complex s) const { return a_.eval(s); }

    double normAt(Complex s) const;
    // Also reports the maximizing source vector (h-unit) when the norm is
    // positive; untouched otherwise.
    double normAt(Complex s, Vector& topSource) const;

private:
    MatrixPolyField a_;
    MetricField source_;
    MetricField target_;
};

// K_xi(v) = h(R(xi, xibar) v, v) / h(v, v); sesquilinear in xi, so the
// direction enters as |xi|^2 times the d/ds value.
double griffithsCurvature(const MetricField& m, Complex s, Complex xi, const Vector& v);

// Metric operator norm of A at every grid node (values >= 0, no masking).
ScalarSampleField operatorNormField(const HomomorphismField& h);

// log of the norm field, masked where the norm vanishes.
ScalarSampleField logNormField(const HomomorphismField& h);

enum class VectorSearchMode { Auto, Exhaustive, Sampled };

// Curvature-decrease hypothesis: K'_xi(Av) <= K_xi(v) wherever Av != 0,
// checked at every grid node with xi = d/ds. Reported residual is the largest
// K'(Av) - K(v) found; pass iff it stays below an absolute tolerance scaled
// by the curvature magnitude. Vectors with p'(Av) = 0 are vacuous: counted,
// never failed.
//
// Exhaustive mode (authoritative, rank <= 4): per node, first try the
// sufficient pencil certificate sup K' <= inf K (two hermitian generalized
// eigenproblems); when that is inconclusive, run seeded multistart projected
// ascent of the difference of Rayleigh quotients over the whitened sphere,
// started from both pencils' eigenvectors, the norm problem's singular
// vectors, and random points. Any positive value found is an exact
// counterexample; Auto selects Exhaustive for rank <= 4, Sampled above.
VerificationReport hypothesisCheck(const HomomorphismField& h, int vectorSamples,
                                   std::uint64_t seed,
                                   VectorSearchMode mode = VectorSearchMode::Auto,
                                   double tolerance = 1e-8);

// Conclusion of the decreasing-curvature theorem: log ||A|| is psh on the
// grid. Delegates to the mean-value verdict; pass iff psh, fail iff not-psh,
// and the margin-zero band stays inconclusive.
VerificationReport conclusionCheck(const HomomorphismField& h);
VerificationReport conclusionCheck(const HomomorphismField& h, const RadiiPolicy& policy);

// Fitted constants for the local bound on a stationary section phi through w:
//   max(|p(phi)(s) - p(phi)(s0)|, p(Dphi)(s)) <= C |s - s0| p(phi)(s0)
// for |s - s0| < epsilon. epsilon is half the distance from s0 to the domain
// boundary; C is fitted over radii {eps/2, eps/4, eps/8} and sampled angles.
// eps1 = min(epsilon, 1/(2C)) and C1 = 2 C^2 feed the circle-mean bound below.
struct ProofConstants {
    double epsilon = 0.0;
    double C = 0.0;
    double eps1 = 0.0;
    double C1 = 0.0;
    std::vector<double> perW;
    bool degenerate = false;  // all constants at floor (flat metric)
};

ProofConstants sectionBoundConstants(const MetricField& m, Complex s0, int trials,
                                     std::uint64_t seed);

// Pass iff the fitted constant is stable (within factor 2) across the
// sampled w, or everything sits at the degenerate floor.
VerificationReport sectionBoundCheck(const MetricField& m, Complex s0, int trials,
                                     std::uint64_t seed);

// Circle-mean lower bound at radius r < eps1:
//   avg_{tau} log||A||(s0 + r e^{2 pi i tau}) >= log(p'(A phi)(s0)/p(phi)(s0)) - C1 r^4
// with phi the stationary section through the norm-attaining vector at s0.
VerificationReport circleMeanLowerBoundCheck(const HomomorphismField& h, Complex s0, double r,
                                             const ProofConstants& pc);

}  // namespace curvlab
