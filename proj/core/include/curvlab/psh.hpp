#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "curvlab/field.hpp"
#include "curvlab/finite_diff.hpp"
#include "curvlab/report.hpp"
#include "curvlab/rng.hpp"

namespace curvlab {

class Prng;

// Holomorphic disk of degree <= 2 into C^m: f(z) = c0 + c1 z + c2 z^2,
// with f(0) the base point and f'(0) the prescribed direction.
struct DiskMap {
    DiskMap(std::vector<Complex> c0, std::vector<Complex> c1, std::vector<Complex> c2);

    std::size_t dim() const { return c0.size(); }
    std::vector<Complex> eval(Complex z) const;

    std::vector<Complex> c0, c1, c2;
};

// Radii ladder and tolerance for grid-based mean-value tests. The finite-radius
// surrogate for the limsup operator takes the max over the ladder; radii are
// tied to the grid spacing so refinement tightens everything together.
struct RadiiPolicy {
    std::vector<double> radii;
    int circleNodes = 64;
    double tolGrid = 0.0;

    static RadiiPolicy forGrid(const GridDomain& g);
};

// Finite-radius estimate of the mean-value Laplacian-type operator
//   r^{-2} (circle average at radius r - center value),
// maximized over the ladder. For C^2 functions this converges to
// d2u/dzdzbar as r -> 0; for |z|^2 it is exactly 1 at every radius.
// nullopt when no radius produced a valid average.
std::optional<double> lambdaEstimate(const std::function<std::optional<double>(Complex)>& u,
                                     Complex z0, std::span<const double> radii, int nodes = 64);

std::optional<double> lambdaEstimate(const std::function<double(Complex)>& u, Complex z0,
                                     std::span<const double> radii, int nodes = 64);

// Single-radius variant (one rung of the ladder).
std::optional<double> lambdaEstimateAt(const std::function<std::optional<double>(Complex)>& u,
                                       Complex z0, double r, int nodes = 64);

// Directional second-variation estimate: the inf over holomorphic disks
// f(z) = s + z xi + z^2 c of the lambda estimate of u o f at 0, with the
// affine disk always included and `diskSamples` random degree-2 perturbations.
double xiXiBarEstimate(const std::function<double(std::span<const Complex>)>& u,
                       std::span<const Complex> s, std::span<const Complex> xi, int diskSamples,
                       Prng& rng, std::span<const double> radii, int nodes = 64);

double xiXiBarEstimate(const std::function<double(Complex)>& u, Complex s, Complex xi,
                       int diskSamples, Prng& rng, std::span<const double> radii, int nodes = 64);

enum class PshVerdictKind { Psh, NotPsh, Inconclusive };

const char* toString(PshVerdictKind v);

struct PshReport {
    PshVerdictKind verdict = PshVerdictKind::Inconclusive;
    // min over testable interior nodes of the ladder estimate
    double worstEstimate = 0.0;
    std::optional<Complex> worstPoint;
    std::vector<double> worstPerRadius;  // per-radius estimates at the worst node (NaN = invalid)
    std::vector<double> radii;
    double tolerance = 0.0;
    int circleNodes = 0;
    long nodesTested = 0;
    long nodesSkipped = 0;
};

// Mean-value verdict over the grid. A node is testable when every ladder
// circle fits inside the domain and all its samples interpolate cleanly.
//   psh           : worst >= -tol
//   not-psh       : worst <  -2 tol  (i.e. misses the pass line by more than tol)
//   inconclusive  : the band between; margin-zero outcomes are never upgraded.
PshReport pshVerdict(const ScalarSampleField& u, const RadiiPolicy& policy);
PshReport pshVerdict(const ScalarSampleField& u);

// Sub-rectangle maximum principle on sampled data: max over interior nodes
// of U must not exceed max over boundary nodes of U plus tol_grid. The
// sub-rectangle is snapped to grid nodes and must leave a nonempty frame.
VerificationReport maxPrincipleCheck(const ScalarSampleField& u, const Rect& sub);

// Five-point finite-difference d2/dsdsbar of the sampled field (quarter
// Laplacian). Boundary ring and neighbors of masked nodes are masked.
ScalarSampleField leviField(const ScalarSampleField& u);

}  // namespace curvlab
