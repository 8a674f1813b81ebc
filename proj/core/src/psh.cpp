#include "curvlab/psh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace curvlab {

DiskMap::DiskMap(std::vector<Complex> a0, std::vector<Complex> a1, std::vector<Complex> a2)
    : c0(std::move(a0)), c1(std::move(a1)), c2(std::move(a2)) {
    if (c0.empty() || c0.size() != c1.size() || c0.size() != c2.size())
        throw FieldError("disk map coefficient dimensions must match and be nonempty");
    for (const auto& v : {c0, c1, c2})
        for (Complex z : v)
            if (!isFinitePoint(z)) throw FieldError("disk map coefficient is not finite");
}

std::vector<Complex> DiskMap::eval(Complex z) const {
    std::vector<Complex> out(dim());
    for (std::size_t i = 0; i < dim(); ++i) out[i] = c0[i] + c1[i] * z + c2[i] * z * z;
    return out;
}

RadiiPolicy RadiiPolicy::forGrid(const GridDomain& g) {
    const double d = g.maxSpacing();
    RadiiPolicy p;
    p.radii = {4.0 * d, 8.0 * d, 16.0 * d};
    p.circleNodes = 64;
    p.tolGrid = 10.0 * d * d;
    return p;
}

std::optional<double> lambdaEstimateAt(const std::function<std::optional<double>(Complex)>& u,
                                       Complex z0, double r, int nodes) {
    const auto center = u(z0);
    if (!center || !std::isfinite(*center)) return std::nullopt;
    const auto avg = circleAverage(u, z0, r, nodes);
    if (!avg) return std::nullopt;
    return (*avg - *center) / (r * r);
}

std::optional<double> lambdaEstimate(const std::function<std::optional<double>(Complex)>& u,
                                     Complex z0, std::span<const double> radii, int nodes) {
    std::optional<double> best;
    for (double r : radii) {
        const auto e = lambdaEstimateAt(u, z0, r, nodes);
        if (e && (!best || *e > *best)) best = e;
    }
    return best;
}

std::optional<double> lambdaEstimate(const std::function<double(Complex)>& u, Complex z0,
                                     std::span<const double> radii, int nodes) {
    return lambdaEstimate(
        [&u](Complex z) -> std::optional<double> { return u(z); }, z0, radii, nodes);
}

double xiXiBarEstimate(const std::function<double(std::span<const Complex>)>& u,
                       std::span<const Complex> s, std::span<const Complex> xi, int diskSamples,
                       Prng& rng, std::span<const double> radii, int nodes) {
    if (s.size() != xi.size() || s.empty())
        throw FieldError("base point and direction dimensions must match");

    double xiScale = 0.0;
    for (Complex z : xi) xiScale = std::max(xiScale, std::abs(z));

    std::vector<DiskMap> disks;
    const std::vector<Complex> zero(s.size(), Complex(0, 0));
    disks.emplace_back(std::vector<Complex>(s.begin(), s.end()),
                       std::vector<Complex>(xi.begin(), xi.end()), zero);
    for (int d = 0; d < diskSamples; ++d) {
        std::vector<Complex> c2(s.size());
        for (auto& z : c2) z = rng.complexNormal() * xiScale;
        disks.emplace_back(std::vector<Complex>(s.begin(), s.end()),
                           std::vector<Complex>(xi.begin(), xi.end()), std::move(c2));
    }

    double best = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& f : disks) {
        auto restricted = [&](Complex z) -> std::optional<double> {
            const auto p = f.eval(z);
            const double v = u(std::span<const Complex>(p.data(), p.size()));
            if (!std::isfinite(v)) return std::nullopt;
            return v;
        };
        const auto e = lambdaEstimate(restricted, Complex(0, 0), radii, nodes);
        if (e) {
            best = std::min(best, *e);
            any = true;
        }
    }
    if (!any) throw FieldError("no disk produced a valid second-variation estimate");
    return best;
}

double xiXiBarEstimate(const std::function<double(Complex)>& u, Complex s, Complex xi,
                       int diskSamples, Prng& rng, std::span<const double> radii, int nodes) {
    auto lifted = [&u](std::span<const Complex> p) { return u(p[0]); };
    const Complex sArr[1] = {s};
    const Complex xiArr[1] = {xi};
    return xiXiBarEstimate(lifted, std::span<const Complex>(sArr, 1),
                           std::span<const Complex>(xiArr, 1), diskSamples, rng, radii, nodes);
}

const char* toString(PshVerdictKind v) {
    switch (v) {
        case PshVerdictKind::Psh: return "psh";
        case PshVerdictKind::NotPsh: return "not-psh";
        case PshVerdictKind::Inconclusive: return "inconclusive";
    }
    return "?";
}

PshReport pshVerdict(const ScalarSampleField& u, const RadiiPolicy& policy) {
    if (policy.radii.empty()) throw FieldError("radii ladder is empty");
    const GridDomain& g = u.domain();
    const double rMax = *std::max_element(policy.radii.begin(), policy.radii.end());
    const double rMin = *std::min_element(policy.radii.begin(), policy.radii.end());
    if (rMin >= std::min(g.halfWidthRe(), g.halfWidthIm()))
        throw FieldError("domain too small for the smallest ladder radius");

    PshReport rep;
    rep.radii = policy.radii;
    rep.tolerance = policy.tolGrid;
    rep.circleNodes = policy.circleNodes;
    rep.worstEstimate = std::numeric_limits<double>::infinity();

    auto interp = [&u](Complex z) { return u.interpolate(z); };

    for (int iy = 0; iy < g.resolution(); ++iy) {
        for (int ix = 0; ix < g.resolution(); ++ix) {
            const Complex z0 = g.node(ix, iy);
            if (g.distanceToBoundary(z0) < rMax) continue;  // ladder does not fit
            if (!u.valid(ix, iy)) {
                ++rep.nodesSkipped;
                continue;
            }
            std::vector<double> per;
            per.reserve(policy.radii.size());
            std::optional<double> ladder;
            bool allValid = true;
            for (double r : policy.radii) {
                const auto e = lambdaEstimateAt(interp, z0, r, policy.circleNodes);
                per.push_back(e ? *e : std::numeric_limits<double>::quiet_NaN());
                if (!e) {
                    allValid = false;
                    continue;
                }
                if (!ladder || *e > *ladder) ladder = e;
            }
            if (!ladder || !allValid) {
                // Partially tested nodes cannot support a not-psh witness and a
                // skipped node cannot support psh either, so they only count.
                ++rep.nodesSkipped;
                continue;
            }
            ++rep.nodesTested;
            if (*ladder < rep.worstEstimate) {
                rep.worstEstimate = *ladder;
                rep.worstPoint = z0;
                rep.worstPerRadius = per;
            }
        }
    }

    if (rep.nodesTested == 0) throw FieldError("no testable interior node for psh verdict");

    if (rep.worstEstimate >= -policy.tolGrid)
        rep.verdict = PshVerdictKind::Psh;
    else if (rep.worstEstimate < -2.0 * policy.tolGrid)
        rep.verdict = PshVerdictKind::NotPsh;
    else
        rep.verdict = PshVerdictKind::Inconclusive;
    return rep;
}

PshReport pshVerdict(const ScalarSampleField& u) {
    return pshVerdict(u, RadiiPolicy::forGrid(u.domain()));
}

VerificationReport maxPrincipleCheck(const ScalarSampleField& u, const Rect& sub) {
    const GridDomain& g = u.domain();
    VerificationReport rep;
    rep.check = "max-principle";

    if (sub.halfWidthRe <= 0.0 || sub.halfWidthIm <= 0.0)
        throw FieldError("sub-rectangle half-widths must be positive");
    const bool inside = sub.center.real() - sub.halfWidthRe > g.center().real() - g.halfWidthRe() &&
                        sub.center.real() + sub.halfWidthRe < g.center().real() + g.halfWidthRe() &&
                        sub.center.imag() - sub.halfWidthIm > g.center().imag() - g.halfWidthIm() &&
                        sub.center.imag() + sub.halfWidthIm < g.center().imag() + g.halfWidthIm();
    if (!inside)
        throw FieldError("sub-rectangle must lie strictly inside the field's domain");

    // Snap the sub-rectangle to node index ranges.
    auto toIx = [&](double x) {
        return static_cast<int>(std::lround((x - (g.center().real() - g.halfWidthRe())) / g.spacingRe()));
    };
    auto toIy = [&](double y) {
        return static_cast<int>(std::lround((y - (g.center().imag() - g.halfWidthIm())) / g.spacingIm()));
    };
    const int ix0 = std::clamp(toIx(sub.center.real() - sub.halfWidthRe), 0, g.resolution() - 1);
    const int ix1 = std::clamp(toIx(sub.center.real() + sub.halfWidthRe), 0, g.resolution() - 1);
    const int iy0 = std::clamp(toIy(sub.center.imag() - sub.halfWidthIm), 0, g.resolution() - 1);
    const int iy1 = std::clamp(toIy(sub.center.imag() + sub.halfWidthIm), 0, g.resolution() - 1);
    if (ix1 - ix0 < 2 || iy1 - iy0 < 2)
        throw FieldError("sub-rectangle too small: no interior nodes after snapping");

    const double tol = 10.0 * g.maxSpacing() * g.maxSpacing();
    double boundaryMax = -std::numeric_limits<double>::infinity();
    double interiorMax = -std::numeric_limits<double>::infinity();
    Complex interiorArg = g.center();
    long n = 0;
    for (int iy = iy0; iy <= iy1; ++iy) {
        for (int ix = ix0; ix <= ix1; ++ix) {
            if (!u.valid(ix, iy)) continue;
            ++n;
            const bool onFrame = (ix == ix0 || ix == ix1 || iy == iy0 || iy == iy1);
            const double v = u.value(ix, iy);
            if (onFrame) {
                boundaryMax = std::max(boundaryMax, v);
            } else if (v > interiorMax) {
                interiorMax = v;
                interiorArg = g.node(ix, iy);
            }
        }
    }
    if (!std::isfinite(boundaryMax) || !std::isfinite(interiorMax))
        throw FieldError("sub-rectangle has no usable boundary or interior nodes");

    rep.samples = n;
    rep.tolerance = tol;
    rep.residual = interiorMax - boundaryMax;
    rep.pass = rep.residual <= tol;
    rep.details["interior_max"] = interiorMax;
    rep.details["boundary_max"] = boundaryMax;
    if (!rep.pass) {
        Witness w;
        w.s = interiorArg;
        w.note = "interior node exceeding the boundary maximum";
        rep.witness = w;
    }
    return rep;
}

ScalarSampleField leviField(const ScalarSampleField& u) {
    const GridDomain& g = u.domain();
    ScalarSampleField out(g);
    const double dx = g.spacingRe();
    const double dy = g.spacingIm();
    for (int iy = 0; iy < g.resolution(); ++iy) {
        for (int ix = 0; ix < g.resolution(); ++ix) {
            const bool interior = ix > 0 && iy > 0 && ix + 1 < g.resolution() && iy + 1 < g.resolution();
            if (!interior || !u.valid(ix, iy) || !u.valid(ix - 1, iy) || !u.valid(ix + 1, iy) ||
                !u.valid(ix, iy - 1) || !u.valid(ix, iy + 1)) {
                out.setMasked(ix, iy);
                continue;
            }
            const double uxx = (u.value(ix + 1, iy) - 2.0 * u.value(ix, iy) + u.value(ix - 1, iy)) / (dx * dx);
            const double uyy = (u.value(ix, iy + 1) - 2.0 * u.value(ix, iy) + u.value(ix, iy - 1)) / (dy * dy);
            out.set(ix, iy, 0.25 * (uxx + uyy));
        }
    }
    return out;
}

}  // namespace curvlab
