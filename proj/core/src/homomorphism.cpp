#include "curvlab/homomorphism.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "curvlab/finite_diff.hpp"
#include "curvlab/rng.hpp"

namespace curvlab {

namespace {

double hermForm(const Matrix& m, const Vector& u) {
    return std::real((u.adjoint() * (m * u))(0, 0));
}

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

HomomorphismField::HomomorphismField(MatrixPolyField a, MetricField source, MetricField target)
    : a_(std::move(a)), source_(std::move(source)), target_(std::move(target)) {
    if (!a_.isHolomorphic())
        throw FieldError("bundle map has antiholomorphic coefficients");
    if (a_.cols() != source_.rank() || a_.rows() != target_.rank()) {
        std::ostringstream os;
        os << "bundle map shape " << a_.rows() << "x" << a_.cols()
           << " does not match metrics of rank " << source_.rank() << " -> " << target_.rank();
        throw FieldError(os.str());
    }
    if (!source_.domain().sameLayout(target_.domain()))
        throw FieldError("source and target metrics live on different grids");
}

double HomomorphismField::normAt(Complex s) const {
    const Matrix t = target_.sqrtAt(s) * a_.eval(s) * source_.invSqrtAt(s);
    return t.jacobiSvd().singularValues()(0);
}

double HomomorphismField::normAt(Complex s, Vector& topSource) const {
    const Matrix t = target_.sqrtAt(s) * a_.eval(s) * source_.invSqrtAt(s);
    Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeThinV);
    const double sigma = svd.singularValues()(0);
    if (sigma > 0) {
        Vector w = source_.invSqrtAt(s) * svd.matrixV().col(0);
        const double p = source_.norm(s, w);
        if (p > 0) topSource = w / p;
    }
    return sigma;
}

double griffithsCurvature(const MetricField& m, Complex s, Complex xi, const Vector& v) {
    const double p2 = std::real(m.inner(s, v, v));
    if (!(p2 > 0)) throw MetricError("curvature quotient needs a nonzero vector", s);
    const Vector rv = m.curvatureAt(s) * v;
    return std::norm(xi) * std::real(m.inner(s, rv, v)) / p2;
}

ScalarSampleField operatorNormField(const HomomorphismField& h) {
    const GridDomain& g = h.domain();
    ScalarSampleField out(g);
    for (int iy = 0; iy < g.resolution(); ++iy)
        for (int ix = 0; ix < g.resolution(); ++ix) {
            const Complex s = g.node(ix, iy);
            const Matrix t =
                h.target().nodeSqrt(ix, iy) * h.field().eval(s) * h.source().nodeInvSqrt(ix, iy);
            out.set(ix, iy, t.jacobiSvd().singularValues()(0));
        }
    return out;
}

ScalarSampleField logNormField(const HomomorphismField& h) {
    const GridDomain& g = h.domain();
    ScalarSampleField norms = operatorNormField(h);
    ScalarSampleField out(g);
    for (int iy = 0; iy < g.resolution(); ++iy)
        for (int ix = 0; ix < g.resolution(); ++ix) {
            const double sigma = norms.value(ix, iy);
            if (sigma > 0)
                out.set(ix, iy, std::log(sigma));
            else
                out.setMasked(ix, iy);
        }
    return out;
}

namespace {

// Per-node whitened data for the hypothesis check. With u = sqrt(P) v the two
// curvature quotients become
//   K(v)      = u^H S u              with S  = invsqrt(P) (P R) invsqrt(P)
//   K'(Av)    = u^H M1 u / u^H M2 u  with M1 = invsqrt(P) A^H (P'R') A invsqrt(P)
//                                         M2 = invsqrt(P) A^H  P'    A invsqrt(P)
// so the hypothesis is D(u) = quotient - u^H S u <= 0 on the unit sphere
// minus the kernel of M2. S, M1 hermitian; M2 hermitian psd.
struct NodeProblem {
    Matrix s;   // whitened source curvature form
    Matrix m1;  // whitened pulled-back target curvature form
    Matrix m2;  // whitened pulled-back target metric (psd)
    double m2Scale = 0.0;
};

NodeProblem buildNodeProblem(const HomomorphismField& h, int ix, int iy) {
    const Complex s = h.domain().node(ix, iy);
    const Matrix winv = h.source().nodeInvSqrt(ix, iy);
    const Matrix p = h.source().nodeValue(ix, iy);
    const Matrix pPrime = h.target().nodeValue(ix, iy);
    const Matrix a = h.field().eval(s);
    const Matrix r = h.source().curvatureAt(s);
    const Matrix rPrime = h.target().curvatureAt(s);

    NodeProblem np;
    np.s = hermitize(winv * (p * r) * winv);
    np.m1 = hermitize(winv * (a.adjoint() * (pPrime * rPrime) * a) * winv);
    np.m2 = hermitize(winv * (a.adjoint() * pPrime * a) * winv);
    np.m2Scale = np.m2.operatorNorm();
    return np;
}

// D(u) for a unit vector u outside the kernel of M2.
double evalDifference(const NodeProblem& np, const Vector& u, double vacuousFloor) {
    const double b = hermForm(np.m2, u);
    if (b <= vacuousFloor) return -std::numeric_limits<double>::infinity();
    return hermForm(np.m1, u) / b - hermForm(np.s, u);
}

// Projected-gradient ascent of D on the unit sphere from one start. D is
// smooth away from ker M2; any positive value is an exact witness.
double ascentFromStart(const NodeProblem& np, Vector u, double vacuousFloor, Vector& best) {
    const double scale = np.s.operatorNorm() + np.m1.operatorNorm() + np.m2Scale + 1.0;
    double eta = 0.5 / scale;
    u.normalize();
    double d = evalDifference(np, u, vacuousFloor);
    if (!std::isfinite(d)) return d;
    for (int it = 0; it < 120; ++it) {
        const double a = hermForm(np.m1, u);
        const double b = hermForm(np.m2, u);
        if (b <= vacuousFloor) break;
        Vector grad = (np.m1 * u) / b - (a / (b * b)) * (np.m2 * u) - np.s * u;
        grad -= u * (u.adjoint() * grad)(0, 0);
        const double gnorm = grad.norm();
        if (gnorm < 1e-12 * scale) break;
        bool moved = false;
        for (int bt = 0; bt < 30; ++bt) {
            Vector cand = (u + eta * grad).normalized();
            const double dc = evalDifference(np, cand, vacuousFloor);
            if (std::isfinite(dc) && dc > d) {
                u = cand;
                d = dc;
                eta *= 1.5;
                moved = true;
                break;
            }
            eta *= 0.5;
        }
        if (!moved) break;
    }
    best = u;
    return d;
}

struct NodeResult {
    double maxDiff = -std::numeric_limits<double>::infinity();
    Vector witness;         // whitened coordinates
    bool vacuous = false;   // A vanishes at the node: nothing to test
    long vacuousHits = 0;   // sampled vectors that landed in ker M2
    long samples = 0;
    double kScale = 0.0;    // curvature magnitude entering the tolerance
};

NodeResult exhaustiveNode(const NodeProblem& np, Prng& rng, const Matrix& whitenedMap) {
    NodeResult res;
    const int n = static_cast<int>(np.s.rows());
    const double vacuousFloor = 1e-13 * std::max(np.m2Scale, 1e-300);

    Eigen::SelfAdjointEigenSolver<Matrix> es(np.s);
    const double kMin = es.eigenvalues()(0);
    res.kScale = std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(n - 1)));

    if (np.m2Scale <= 0) {
        res.vacuous = true;
        return res;
    }

    // Range restriction of the (M1, M2) pencil: sup K' over range(M2).
    Eigen::SelfAdjointEigenSolver<Matrix> em2(np.m2);
    const double mu0 = 1e-12 * em2.eigenvalues().maxCoeff();
    std::vector<int> kept;
    for (int i = 0; i < n; ++i)
        if (em2.eigenvalues()(i) > mu0) kept.push_back(i);
    if (kept.empty()) {
        res.vacuous = true;
        return res;
    }
    Matrix vr(n, static_cast<int>(kept.size()));
    Vector muInvSqrt(static_cast<int>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) {
        vr.col(static_cast<int>(i)) = em2.eigenvectors().col(kept[i]);
        muInvSqrt(static_cast<int>(i)) = 1.0 / std::sqrt(em2.eigenvalues()(kept[i]));
    }
    const Matrix pencil =
        hermitize(muInvSqrt.asDiagonal() * (vr.adjoint() * np.m1 * vr) * muInvSqrt.asDiagonal());
    Eigen::SelfAdjointEigenSolver<Matrix> ep(pencil);
    const double kPrimeMax = ep.eigenvalues().maxCoeff();

    std::vector<Vector> starts;
    for (int i = 0; i < n; ++i) starts.push_back(es.eigenvectors().col(i));
    for (int i = 0; i < static_cast<int>(kept.size()); ++i)
        starts.push_back((vr * (muInvSqrt.asDiagonal() * ep.eigenvectors().col(i))).normalized());
    {
        Eigen::JacobiSVD<Matrix> svd(whitenedMap, Eigen::ComputeThinV);
        for (int i = 0; i < std::min<int>(2, svd.matrixV().cols()); ++i)
            starts.push_back(svd.matrixV().col(i));
    }

    const bool certified = kPrimeMax <= kMin;
    const int randomStarts = certified ? 2 : 8 + 2 * n;
    for (int i = 0; i < randomStarts; ++i) starts.push_back(rng.unitVector(n));

    for (const Vector& s0 : starts) {
        Vector arg;
        const double d = ascentFromStart(np, s0, vacuousFloor, arg);
        ++res.samples;
        if (!std::isfinite(d)) {
            ++res.vacuousHits;
            continue;
        }
        if (d > res.maxDiff) {
            res.maxDiff = d;
            res.witness = arg;
        }
    }
    // The certificate bounds D from above even when ascent found less.
    if (certified && res.maxDiff > kPrimeMax - kMin) res.maxDiff = kPrimeMax - kMin;
    res.kScale = std::max(res.kScale, std::abs(kPrimeMax));
    return res;
}

NodeResult sampledNode(const NodeProblem& np, Prng& rng, const Matrix& whitenedMap,
                       int vectorSamples) {
    NodeResult res;
    const int n = static_cast<int>(np.s.rows());
    const double vacuousFloor = 1e-13 * std::max(np.m2Scale, 1e-300);
    if (np.m2Scale <= 0) {
        res.vacuous = true;
        return res;
    }
    res.kScale = np.s.operatorNorm();

    std::vector<Vector> probes;
    {
        Eigen::JacobiSVD<Matrix> svd(whitenedMap, Eigen::ComputeThinV);
        for (int i = 0; i < svd.matrixV().cols(); ++i) probes.push_back(svd.matrixV().col(i));
    }
    for (int i = 0; i < vectorSamples; ++i) probes.push_back(rng.unitVector(n));

    for (const Vector& u : probes) {
        ++res.samples;
        const double d = evalDifference(np, u, vacuousFloor);
        if (!std::isfinite(d)) {
            ++res.vacuousHits;
            continue;
        }
        if (d > res.maxDiff) {
            res.maxDiff = d;
            res.witness = u;
        }
    }
    return res;
}

}  // namespace

VerificationReport hypothesisCheck(const HomomorphismField& h, int vectorSamples,
                                   std::uint64_t seed, VectorSearchMode mode, double tolerance) {
    if (vectorSamples < 1) throw FieldError("hypothesis check needs at least one vector sample");
    const GridDomain& g = h.domain();
    const bool exhaustive = mode == VectorSearchMode::Exhaustive ||
                            (mode == VectorSearchMode::Auto && h.source().rank() <= 4);
    Prng rng(seed);

    VerificationReport rep;
    rep.check = "hypothesis";
    rep.seed = seed;
    rep.residual = -std::numeric_limits<double>::infinity();

    double kScale = 0.0;
    long vacuousNodes = 0;
    long vacuousHits = 0;
    bool any = false;

    for (int iy = 0; iy < g.resolution(); ++iy)
        for (int ix = 0; ix < g.resolution(); ++ix) {
            const NodeProblem np = buildNodeProblem(h, ix, iy);
            const Complex s = g.node(ix, iy);
            const Matrix whitenedMap =
                h.target().nodeSqrt(ix, iy) * h.field().eval(s) * h.source().nodeInvSqrt(ix, iy);
            const NodeResult nr = exhaustive ? exhaustiveNode(np, rng, whitenedMap)
                                             : sampledNode(np, rng, whitenedMap, vectorSamples);
            rep.samples += nr.samples;
            vacuousHits += nr.vacuousHits;
            kScale = std::max(kScale, nr.kScale);
            if (nr.vacuous) {
                ++vacuousNodes;
                continue;
            }
            if (std::isfinite(nr.maxDiff) && nr.maxDiff > rep.residual) {
                any = true;
                rep.residual = nr.maxDiff;
                Witness w;
                w.s = s;
                w.v = h.source().nodeInvSqrt(ix, iy) * nr.witness;
                w.note = "largest K'(Av) - K(v) over searched vectors";
                rep.witness = w;
            }
        }

    if (!any) throw FieldError("bundle map vanished at every grid node; hypothesis is vacuous");

    rep.tolerance = tolerance * (1.0 + kScale);
    rep.pass = rep.residual <= rep.tolerance;
    rep.details["curvature_scale"] = kScale;
    rep.details["vacuous_nodes"] = static_cast<double>(vacuousNodes);
    rep.details["vacuous_vectors"] = static_cast<double>(vacuousHits);
    rep.details["search_exhaustive"] = exhaustive ? 1.0 : 0.0;
    return rep;
}

VerificationReport conclusionCheck(const HomomorphismField& h) {
    return conclusionCheck(h, RadiiPolicy::forGrid(h.domain()));
}

VerificationReport conclusionCheck(const HomomorphismField& h, const RadiiPolicy& policy) {
    const ScalarSampleField lg = logNormField(h);
    const PshReport pr = pshVerdict(lg, policy);

    VerificationReport rep;
    rep.check = "conclusion";
    rep.tolerance = policy.tolGrid;
    rep.residual = -pr.worstEstimate;  // pass iff worst >= -tol, i.e. residual <= tol
    rep.pass = pr.verdict == PshVerdictKind::Psh;
    rep.inconclusive = pr.verdict == PshVerdictKind::Inconclusive;
    rep.samples = pr.nodesTested;
    Witness w;
    w.s = pr.worstPoint.value_or(Complex(0.0, 0.0));
    w.note = std::string("log-norm mean-value verdict: ") + toString(pr.verdict);
    rep.witness = w;
    rep.details["worst_estimate"] = pr.worstEstimate;
    rep.details["nodes_skipped"] = static_cast<double>(pr.nodesSkipped);
    for (std::size_t i = 0; i < pr.radii.size(); ++i)
        rep.details["radius_" + std::to_string(i)] = pr.radii[i];
    return rep;
}

ProofConstants sectionBoundConstants(const MetricField& m, Complex s0, int trials,
                                     std::uint64_t seed) {
    if (trials < 1) throw FieldError("constant fit needs at least one trial");
    const double dist = m.domain().distanceToBoundary(s0);
    if (!(dist > 0)) throw MetricError("base point must lie strictly inside the domain", s0);

    ProofConstants pc;
    pc.epsilon = 0.5 * dist;
    const double radii[] = {pc.epsilon / 2, pc.epsilon / 4, pc.epsilon / 8};
    const int angles = 16;
    const double floor = 1e-9;

    Prng rng(seed);
    for (int t = 0; t < trials; ++t) {
        const Vector w = rng.unitVector(m.rank());
        const SectionField phi = stationarySection(m, s0, w);
        const double p0 = m.norm(s0, phi.eval(s0));
        if (!(p0 > 0)) throw MetricError("stationary section vanished at the base point", s0);
        double cw = 0.0;
        for (double r : radii)
            for (int a = 0; a < angles; ++a) {
                const Complex s = s0 + r * std::polar(1.0, 2.0 * M_PI * a / angles);
                const double drift = std::abs(m.norm(s, phi.eval(s)) - p0);
                const double deriv = m.norm(s, covariantDerivative(m, phi, s));
                cw = std::max(cw, std::max(drift, deriv) / (r * p0));
            }
        pc.perW.push_back(cw);
    }

    const double cMax = *std::max_element(pc.perW.begin(), pc.perW.end());
    pc.degenerate = cMax <= floor;
    pc.C = cMax;
    pc.eps1 = pc.degenerate ? pc.epsilon : std::min(pc.epsilon, 1.0 / (2.0 * pc.C));
    pc.C1 = 2.0 * pc.C * pc.C;
    return pc;
}

VerificationReport sectionBoundCheck(const MetricField& m, Complex s0, int trials,
                                     std::uint64_t seed) {
    const ProofConstants pc = sectionBoundConstants(m, s0, trials, seed);

    VerificationReport rep;
    rep.check = "proof-trace";
    rep.seed = seed;
    rep.samples = static_cast<long>(pc.perW.size());
    rep.tolerance = 2.0;
    if (pc.degenerate) {
        rep.residual = 1.0;
        rep.pass = true;
    } else {
        const double cMin = *std::min_element(pc.perW.begin(), pc.perW.end());
        const double cMax = pc.C;
        rep.residual = cMin > 0 ? cMax / cMin : std::numeric_limits<double>::infinity();
        rep.pass = rep.residual <= rep.tolerance;
    }
    Witness w;
    w.s = s0;
    w.note = pc.degenerate ? "flat fit: all constants at floor" : "constant spread across sections";
    rep.witness = w;
    rep.details["epsilon"] = pc.epsilon;
    rep.details["C"] = pc.C;
    rep.details["eps1"] = pc.eps1;
    rep.details["C1"] = pc.C1;
    return rep;
}

VerificationReport circleMeanLowerBoundCheck(const HomomorphismField& h, Complex s0, double r,
                                             const ProofConstants& pc) {
    if (!(r > 0) || r >= pc.eps1)
        throw FieldError("circle radius must lie in (0, eps1)");

    Vector w;
    const double sigma0 = h.normAt(s0, w);
    if (!(sigma0 > 0))
        throw FieldError("bundle map vanishes at the base point; log-norm bound undefined");

    const SectionField phi = stationarySection(h.source(), s0, w);
    const Vector phi0 = phi.eval(s0);
    const double rhs = std::log(h.target().norm(s0, h.value(s0) * phi0) /
                                h.source().norm(s0, phi0)) -
                       pc.C1 * r * r * r * r;

    const int nodes = 256;
    const auto lhsOpt = circleAverage(
        [&](Complex s) -> std::optional<double> {
            const double sigma = h.normAt(s);
            if (!(sigma > 0)) return std::nullopt;
            return std::log(sigma);
        },
        s0, r, nodes);

    VerificationReport rep;
    rep.check = "proof-trace";
    rep.samples = nodes;
    rep.tolerance = 1e-8 * (1.0 + std::abs(rhs));
    if (!lhsOpt) {
        rep.inconclusive = true;
        rep.residual = std::numeric_limits<double>::quiet_NaN();
        Witness wit;
        wit.s = s0;
        wit.note = "norm vanished on the circle; mean of log undefined";
        rep.witness = wit;
        return rep;
    }
    const double lhs = *lhsOpt;
    rep.residual = std::max(0.0, rhs - lhs);
    rep.pass = rep.residual <= rep.tolerance;
    Witness wit;
    wit.s = s0;
    wit.v = w;
    wit.note = "circle mean of log-norm vs stationary-section bound";
    rep.witness = wit;
    rep.details["lhs_circle_mean"] = lhs;
    rep.details["rhs_bound"] = rhs;
    rep.details["radius"] = r;
    rep.details["C1"] = pc.C1;
    return rep;
}

}  // namespace curvlab
