#include "curvlab/sheaf.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "curvlab/homomorphism.hpp"
#include "curvlab/psh.hpp"

namespace curvlab {

Section sectionAdd(const Section& f, const Section& g) {
    if (f.size() != g.size()) throw FieldError("section dimensions differ");
    Section out;
    out.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out.push_back(f[i] + g[i]);
    return out;
}

Section sectionScale(const MatrixPolyField& scalar, const Section& f) {
    if (scalar.rows() != 1 || scalar.cols() != 1) throw FieldError("section scalar must be 1x1");
    Section out;
    out.reserve(f.size());
    for (const auto& c : f) out.push_back(scalar * c);
    return out;
}

Vector evalSection(const Section& f, Complex s) {
    Vector v(static_cast<int>(f.size()));
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i].rows() != 1 || f[i].cols() != 1)
            throw FieldError("section components must be 1x1");
        v(static_cast<int>(i)) = f[i].evalScalar(s);
    }
    return v;
}

Section constantSection(const Vector& w) {
    Section out;
    out.reserve(static_cast<std::size_t>(w.size()));
    for (int i = 0; i < w.size(); ++i) out.push_back(MatrixPolyField::constant(scalarMatrix(w(i))));
    return out;
}

MatrixPolyField randomHolomorphicScalar(Prng& rng, int maxDegree, double scale) {
    MatrixPolyField f(1, 1);
    for (int j = 0; j <= maxDegree; ++j) f.setCoeff(j, 0, scalarMatrix(scale * rng.complexNormal()));
    return f;
}

Section randomHolomorphicSection(Prng& rng, int dim, int maxDegree, double scale) {
    Section out;
    out.reserve(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) out.push_back(randomHolomorphicScalar(rng, maxDegree, scale));
    return out;
}

WeightField::WeightField(std::vector<MatrixPolyField> rho) : rho_(std::move(rho)) {
    if (rho_.empty()) throw FieldError("weight field needs at least one fiber point");
    for (const auto& r : rho_) {
        if (r.rows() != 1 || r.cols() != 1) throw FieldError("fiber weights must be 1x1 fields");
        if (!r.hasHermitianSymmetricTable())
            throw FieldError("fiber weight is not real-valued (table not hermitian-symmetric)");
    }
    rhoDs_.reserve(rho_.size());
    for (const auto& r : rho_) rhoDs_.push_back(r.derivative(Deriv::S));
}

double WeightField::value(int i, Complex s) const {
    return rho_.at(static_cast<std::size_t>(i)).evalScalar(s).real();
}

Complex WeightField::dS(int i, Complex s) const {
    return rhoDs_.at(static_cast<std::size_t>(i)).evalScalar(s);
}

WeightField::Bounds WeightField::boundsOn(const GridDomain& grid) const {
    Bounds b;
    for (std::size_t i = 0; i < rho_.size(); ++i) {
        const MatrixPolyField dss = rhoDs_[i].derivative(Deriv::S);
        const MatrixPolyField dssbar = rhoDs_[i].derivative(Deriv::SBar);
        for (int iy = 0; iy < grid.resolution(); ++iy)
            for (int ix = 0; ix < grid.resolution(); ++ix) {
                const Complex s = grid.node(ix, iy);
                b.value = std::max(b.value, std::abs(rho_[i].evalScalar(s)));
                b.firstDeriv = std::max(b.firstDeriv, std::abs(rhoDs_[i].evalScalar(s)));
                b.secondDeriv = std::max(
                    b.secondDeriv, std::abs(dss.evalScalar(s)) + std::abs(dssbar.evalScalar(s)));
            }
    }
    if (!std::isfinite(b.value) || !std::isfinite(b.firstDeriv) || !std::isfinite(b.secondDeriv))
        throw FieldError("weight bounds certificate is not finite");
    return b;
}

FiberedMetric::FiberedMetric(std::vector<double> weights, WeightField rho, double a)
    : mu_(std::move(weights)), rho_(std::move(rho)), a_(a) {
    if (mu_.empty()) throw FieldError("fibered metric needs at least one fiber point");
    if (static_cast<int>(mu_.size()) != rho_.count())
        throw FieldError("fiber weight count does not match weight field");
    for (double m : mu_)
        if (!(m > 0) || !std::isfinite(m)) throw FieldError("fiber weights must be finite and positive");
    if (!(a_ >= 2) || !std::isfinite(a_)) throw FieldError("exponent must lie in [2, inf)");
}

double lpMetric(const FiberedMetric& fm, Complex s, const Vector& w) {
    if (w.size() != fm.fiberCount()) throw FieldError("vector length does not match fiber count");
    const double a = fm.exponent();
    double q = 0.0;
    for (int i = 0; i < fm.fiberCount(); ++i)
        q += fm.mu(i) * std::pow(std::abs(w(i)), a) * std::exp(fm.rho().value(i, s));
    return std::pow(q, 1.0 / a);
}

Section lpSection(const FiberedMetric& fm, Complex s0, const Vector& w, SectionFamily family) {
    if (w.size() != fm.fiberCount()) throw FieldError("vector length does not match fiber count");
    if (w.norm() == 0) throw FieldError("section family needs a nonzero vector");
    Section out;
    out.reserve(static_cast<std::size_t>(fm.fiberCount()));
    for (int i = 0; i < fm.fiberCount(); ++i) {
        MatrixPolyField f(1, 1);
        if (family == SectionFamily::Constant) {
            f.setCoeff(0, 0, scalarMatrix(w(i)));
        } else {
            // F_i(s) = w_i (1 - (2/a) d_s rho_i(s0) (s - s0)): the dual-map
            // image of this family is antiholomorphically flat at s0. At
            // a = 2 it coincides with the covariantly stationary section of
            // the induced diagonal metric.
            const Complex lambda = -(2.0 / fm.exponent()) * fm.rho().dS(i, s0);
            f.setCoeff(0, 0, scalarMatrix(w(i) * (1.0 - lambda * s0)));
            f.setCoeff(1, 0, scalarMatrix(w(i) * lambda));
        }
        out.push_back(std::move(f));
    }
    return out;
}

Complex dualMapGamma(const FiberedMetric& fm, Complex s, const Vector& w, const Vector& probe,
                     double step) {
    if (w.norm() == 0) throw FieldError("dual map needs a nonzero base vector");
    if (!(lpMetric(fm, s, w) > 0)) throw FieldError("dual map needs a point of positive norm");
    const auto g = [&](Complex t) { return lpMetric(fm, s, w + t * probe); };
    const double dRe = (g(Complex(step, 0)) - g(Complex(-step, 0))) / (2 * step);
    const double dIm = (g(Complex(0, step)) - g(Complex(0, -step))) / (2 * step);
    return 0.5 * Complex(dRe, -dIm);
}

Complex dualMapGammaClosedForm(const FiberedMetric& fm, Complex s, const Vector& w,
                               const Vector& probe) {
    if (w.norm() == 0) throw FieldError("dual map needs a nonzero base vector");
    const double a = fm.exponent();
    double q = 0.0;
    Complex sum = 0.0;
    for (int i = 0; i < fm.fiberCount(); ++i) {
        const double e = fm.mu(i) * std::exp(fm.rho().value(i, s));
        const double mag = std::abs(w(i));
        q += e * std::pow(mag, a);
        if (mag > 0) sum += e * std::pow(mag, a - 2.0) * std::conj(w(i)) * probe(i);
    }
    if (!(q > 0)) throw FieldError("dual map needs a point of positive norm");
    return 0.5 * std::pow(q, 1.0 / a - 1.0) * sum;
}

double stationarityResidual(const FiberedMetric& fm, Complex s0, const Vector& w,
                            SectionFamily family, const std::vector<Vector>& probes,
                            double outerStep, double& scaleOut) {
    const Section fam = lpSection(fm, s0, w, family);
    const double h = outerStep;
    double worst = 0.0;
    double scale = 1.0;
    for (const Vector& p : probes) {
        const auto g = [&](Complex s) {
            return dualMapGammaClosedForm(fm, s, evalSection(fam, s), p);
        };
        const Complex gr = g(s0 + h) - g(s0 - h);
        const Complex gi = g(s0 + Complex(0, h)) - g(s0 - Complex(0, h));
        const Complex dbar = gr / (4 * h) + Complex(0, 1) * gi / (4 * h);
        worst = std::max(worst, std::abs(dbar));
        scale = std::max({scale, std::abs(g(s0 + h)), std::abs(g(s0 - h)),
                          std::abs(g(s0 + Complex(0, h))), std::abs(g(s0 - Complex(0, h)))});
    }
    scaleOut = scale;
    return worst;
}

VerificationReport stationarityCheck(const FiberedMetric& fm, Complex s0, const Vector& w,
                                     int probes, std::uint64_t seed, double outerStep) {
    if (probes < 1) throw FieldError("stationarity check needs at least one probe");
    Prng rng(seed);
    std::vector<Vector> dirs;
    dirs.push_back(w.normalized());
    for (int i = 1; i < probes; ++i) dirs.push_back(rng.unitVector(fm.fiberCount()));

    double scaleStat = 1.0, scaleConst = 1.0;
    const double rStat =
        stationarityResidual(fm, s0, w, SectionFamily::Stationary, dirs, outerStep, scaleStat);
    const double rConst =
        stationarityResidual(fm, s0, w, SectionFamily::Constant, dirs, outerStep, scaleConst);

    VerificationReport rep;
    rep.check = "lp-stationarity";
    rep.seed = seed;
    rep.samples = static_cast<long>(dirs.size());
    rep.tolerance = 100.0 * outerStep * outerStep * scaleStat;
    rep.residual = rStat;
    rep.pass = rStat < rep.tolerance;
    Witness wit;
    wit.s = s0;
    wit.v = w;
    wit.note = "gamma convention: d/dt of q(s, w + t probe); conjugate of the diagonal pairing";
    rep.witness = wit;
    rep.details["residual_constant_family"] = rConst;
    rep.details["improvement_ratio"] = rStat > 0 ? rConst / rStat : std::numeric_limits<double>::infinity();
    rep.details["scale"] = scaleStat;
    rep.details["outer_step"] = outerStep;
    return rep;
}

ScalarSampleField directImageMetric(const FiberedMetric& fm, const Section& phi,
                                    const GridDomain& grid) {
    if (static_cast<int>(phi.size()) != fm.fiberCount())
        throw FieldError("section length does not match fiber count");
    ScalarSampleField out(grid);
    for (int iy = 0; iy < grid.resolution(); ++iy)
        for (int ix = 0; ix < grid.resolution(); ++ix) {
            const Complex s = grid.node(ix, iy);
            double acc = 0.0;
            for (int i = 0; i < fm.fiberCount(); ++i) {
                const double integrand =
                    fm.mu(i) * std::exp(fm.rho().value(i, s)) * std::norm(phi[i].evalScalar(s));
                if (!(integrand >= 0) || !std::isfinite(integrand))
                    throw MetricError("direct image integrand is invalid", s);
                acc += integrand;
            }
            out.set(ix, iy, std::sqrt(acc));
        }
    return out;
}

MetricField inducedDiagonalMetric(const FiberedMetric& fm, const GridDomain& grid, int expOrder) {
    const int m = fm.fiberCount();
    MatrixPolyField p(m, m);
    for (int i = 0; i < m; ++i) {
        const MatrixPolyField e = expSurrogate(fm.rho().rho(i), expOrder);
        for (const auto& [deg, c] : e.coeffs()) {
            Matrix block = Matrix::Zero(m, m);
            block(i, i) = fm.mu(i) * c(0, 0);
            p.addCoeff(deg.j, deg.k, block);
        }
    }
    return MetricField::validate(p, grid);
}

SheafMetricSample makeBundleSheafSample(const MetricField& m) {
    SheafMetricSample sample{m.domain(), m.rank(), {}};
    sample.eval = [m](const Section& sec, Complex s) { return m.norm(s, evalSection(sec, s)); };
    return sample;
}

SheafMetricSample makeLpSheafSample(const FiberedMetric& fm, const GridDomain& grid) {
    SheafMetricSample sample{grid, fm.fiberCount(), {}};
    sample.eval = [fm](const Section& sec, Complex s) { return lpMetric(fm, s, evalSection(sec, s)); };
    return sample;
}

SheafMetricSample makeDirectImageSheafSample(const FiberedMetric& fm, const GridDomain& grid) {
    SheafMetricSample sample{grid, fm.fiberCount(), {}};
    sample.eval = [fm](const Section& sec, Complex s) {
        double acc = 0.0;
        for (int i = 0; i < fm.fiberCount(); ++i)
            acc += fm.mu(i) * std::exp(fm.rho().value(i, s)) * std::norm(sec[i].evalScalar(s));
        return std::sqrt(acc);
    };
    return sample;
}

SheafMetricSample corruptHomogeneity(const SheafMetricSample& base) {
    SheafMetricSample out = base;
    const auto inner = base.eval;
    out.eval = [inner](const Section& sec, Complex s) {
        const double v = inner(sec, s);
        return v * v;
    };
    return out;
}

VerificationReport metricAxiomsCheck(const SheafMetricSample& sample, int sectionSamples,
                                     std::uint64_t seed) {
    if (sectionSamples < 2) throw FieldError("axioms check needs at least two section samples");
    Prng rng(seed);
    const GridDomain& g = sample.grid;

    std::vector<Section> secs;
    for (int t = 0; t < sectionSamples; ++t)
        secs.push_back(randomHolomorphicSection(rng, sample.sectionDim, 2));

    VerificationReport rep;
    rep.check = "axioms";
    rep.seed = seed;
    rep.samples = sectionSamples;

    double worst = 0.0;
    double scale = 0.0;
    bool nondegenerate = true;
    std::optional<Witness> witness;

    const Section zero(static_cast<std::size_t>(sample.sectionDim), MatrixPolyField(1, 1));
    double zeroMax = 0.0;

    for (int t = 0; t < sectionSamples; ++t) {
        const Section& phi = secs[static_cast<std::size_t>(t)];
        const Section& psi = secs[static_cast<std::size_t>((t + 1) % sectionSamples)];
        const Section sum = sectionAdd(phi, psi);
        const MatrixPolyField f = randomHolomorphicScalar(rng, 2);
        const Section scaled = sectionScale(f, phi);

        double phiMax = 0.0;
        for (int iy = 0; iy < g.resolution(); ++iy)
            for (int ix = 0; ix < g.resolution(); ++ix) {
                const Complex s = g.node(ix, iy);
                const double pPhi = sample.eval(phi, s);
                const double pPsi = sample.eval(psi, s);
                const double pSum = sample.eval(sum, s);
                const double pScaled = sample.eval(scaled, s);
                const double fAbs = std::abs(f.evalScalar(s));
                if (pPhi < 0 || pPsi < 0 || pSum < 0 || pScaled < 0)
                    throw MetricError("metric evaluator returned a negative value", s);
                scale = std::max({scale, pPhi, pPsi, pSum, pScaled});
                phiMax = std::max(phiMax, pPhi);
                if (t == 0) zeroMax = std::max(zeroMax, sample.eval(zero, s));

                const double triangle = pSum - pPhi - pPsi;
                const double homogeneity = std::abs(pScaled - fAbs * pPhi);
                const double v = std::max(triangle, homogeneity);
                if (v > worst) {
                    worst = v;
                    Witness wit;
                    wit.s = s;
                    wit.note = triangle >= homogeneity ? "triangle inequality margin"
                                                       : "holomorphic-scalar homogeneity gap";
                    witness = wit;
                }
            }
        if (!(phiMax > 0)) nondegenerate = false;  // sampled nonzero section measured as 0
    }

    rep.tolerance = 1e-10 * (1.0 + scale);
    rep.residual = worst;
    rep.pass = worst <= rep.tolerance && nondegenerate && zeroMax <= rep.tolerance;
    rep.witness = witness;
    rep.details["scale"] = scale;
    rep.details["zero_section_max"] = zeroMax;
    rep.details["nondegenerate"] = nondegenerate ? 1.0 : 0.0;
    return rep;
}

namespace {

Matrix whitenedCurvatureForm(const MetricField& m, int ix, int iy) {
    const Complex s = m.domain().node(ix, iy);
    const Matrix winv = m.nodeInvSqrt(ix, iy);
    const Matrix form = winv * (m.nodeValue(ix, iy) * m.curvatureAt(s)) * winv;
    return 0.5 * (form + form.adjoint());
}

// (scalar 1x1 field) * (matrix field), convolving bidegree tables.
MatrixPolyField scalarTimesField(const MatrixPolyField& scalar, const MatrixPolyField& f) {
    MatrixPolyField out(f.rows(), f.cols());
    for (const auto& [db, dm] : scalar.coeffs())
        for (const auto& [fb, fm] : f.coeffs())
            out.addCoeff(db.j + fb.j, db.k + fb.k, dm(0, 0) * fm);
    return out;
}

}  // namespace

VerificationReport homFamilyGriffithsCheck(const MetricField& source, const MetricField& target,
                                           const std::vector<MatrixPolyField>& generators,
                                           int familySamples, std::uint64_t seed) {
    if (generators.empty()) throw FieldError("hom-family check needs at least one generator");
    if (!source.domain().sameLayout(target.domain()))
        throw FieldError("source and target metrics live on different grids");
    const GridDomain& g = source.domain();

    VerificationReport rep;
    rep.check = "hom-family";
    rep.seed = seed;

    // Ordering precondition: every source curvature quotient dominates every
    // target one. Over all vector pairs this is exactly a per-node comparison
    // of the extreme whitened eigenvalues.
    double orderingGap = -std::numeric_limits<double>::infinity();
    double kScale = 0.0;
    Complex worstOrderPoint = g.center();
    for (int iy = 0; iy < g.resolution(); ++iy)
        for (int ix = 0; ix < g.resolution(); ++ix) {
            Eigen::SelfAdjointEigenSolver<Matrix> esS(whitenedCurvatureForm(source, ix, iy));
            Eigen::SelfAdjointEigenSolver<Matrix> esT(whitenedCurvatureForm(target, ix, iy));
            const double kMinSource = esS.eigenvalues().minCoeff();
            const double kMaxTarget = esT.eigenvalues().maxCoeff();
            kScale = std::max({kScale, std::abs(kMinSource), std::abs(kMaxTarget)});
            const double gap = kMaxTarget - kMinSource;
            if (gap > orderingGap) {
                orderingGap = gap;
                worstOrderPoint = g.node(ix, iy);
            }
        }
    const double orderTol = 1e-8 * (1.0 + kScale);
    rep.details["ordering_gap"] = orderingGap;
    if (orderingGap > orderTol) {
        rep.inconclusive = true;
        rep.pass = false;
        rep.residual = orderingGap;
        rep.tolerance = orderTol;
        Witness wit;
        wit.s = worstOrderPoint;
        wit.note = "curvature ordering precondition failed; hom-family criterion not applicable";
        rep.witness = wit;
        return rep;
    }

    Prng rng(seed);
    std::vector<MatrixPolyField> families = generators;
    for (int t = 0; t < familySamples; ++t) {
        MatrixPolyField alpha(generators.front().rows(), generators.front().cols());
        for (const auto& gen : generators)
            alpha = alpha + scalarTimesField(randomHolomorphicScalar(rng, 2), gen);
        families.push_back(std::move(alpha));
    }

    const RadiiPolicy policy = RadiiPolicy::forGrid(g);
    rep.tolerance = policy.tolGrid;
    rep.residual = -std::numeric_limits<double>::infinity();
    bool anyFail = false, anyInconclusive = false;
    for (std::size_t t = 0; t < families.size(); ++t) {
        const HomomorphismField hom(families[t], source, target);
        const PshReport pr = pshVerdict(logNormField(hom), policy);
        rep.samples += pr.nodesTested;
        if (-pr.worstEstimate > rep.residual) {
            rep.residual = -pr.worstEstimate;
            Witness wit;
            wit.s = pr.worstPoint.value_or(Complex(0.0, 0.0));
            wit.note = "family " + std::to_string(t) + ": log-norm verdict " + toString(pr.verdict);
            rep.witness = wit;
        }
        if (pr.verdict == PshVerdictKind::NotPsh) anyFail = true;
        if (pr.verdict == PshVerdictKind::Inconclusive) anyInconclusive = true;
    }
    rep.pass = !anyFail && !anyInconclusive;
    rep.inconclusive = !anyFail && anyInconclusive;
    rep.details["families_tested"] = static_cast<double>(families.size());
    return rep;
}

}  // namespace curvlab
