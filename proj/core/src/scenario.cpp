#include "curvlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "curvlab/gallery.hpp"
#include "curvlab/homomorphism.hpp"
#include "curvlab/metric.hpp"
#include "curvlab/psh.hpp"
#include "curvlab/rng.hpp"
#include "curvlab/serialization.hpp"
#include "json.hpp"

namespace curvlab {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

const std::vector<std::string> kCheckTokens = {
    "validate",      "curvature-map", "hypothesis", "conclusion",      "max-principle",
    "proof-trace",   "eq23",          "axioms",     "lp-stationarity", "hom-family"};

std::string tokenList() {
    std::ostringstream os;
    for (std::size_t i = 0; i < kCheckTokens.size(); ++i)
        os << (i ? ", " : "") << kCheckTokens[i];
    return os.str();
}

Complex complexFrom(const json& j) {
    if (!j.is_object() || !j.contains("re") || !j.contains("im"))
        throw ParseError("complex values must be objects with re and im");
    return {j.at("re").get<double>(), j.at("im").get<double>()};
}

ordered_json complexJson(Complex c) { return ordered_json{{"re", c.real()}, {"im", c.imag()}}; }

// A metric slot holds either an inline coefficient table or a string
// "gallery:<entry>" resolving to the same slot of that entry.
std::optional<MatrixPolyField> metricSlot(const json& j, const char* slot) {
    if (!j.contains(slot)) return std::nullopt;
    const json& v = j.at(slot);
    if (v.is_string()) {
        const std::string ref = v.get<std::string>();
        const std::string prefix = "gallery:";
        if (ref.rfind(prefix, 0) != 0)
            throw ParseError(std::string(slot) + ": string value must look like gallery:<name>");
        const GalleryEntry entry = gallery(ref.substr(prefix.size()));
        const Scenario& base = entry.scenarios.front();
        const std::optional<MatrixPolyField>* field = nullptr;
        if (std::string(slot) == "source") field = &base.source;
        else if (std::string(slot) == "target") field = &base.target;
        else field = &base.hom;
        if (!field->has_value())
            throw ParseError(std::string(slot) + ": gallery entry has no such field");
        return **field;
    }
    return fieldFromJson(v.dump());
}

}  // namespace

const std::vector<std::string>& knownCheckTokens() { return kCheckTokens; }

Scenario scenarioFromJson(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("invalid JSON");
    try {
        if (!j.contains("name") || !j.at("name").is_string())
            throw ParseError("scenario needs a string name");
        if (!j.contains("domain")) throw ParseError("scenario needs a domain");
        Scenario sc(j.at("name").get<std::string>(), gridFromJson(j.at("domain").dump()));

        sc.source = metricSlot(j, "source");
        sc.target = metricSlot(j, "target");
        sc.hom = metricSlot(j, "hom");
        if (j.contains("fibered")) sc.fibered = fiberedFromJson(j.at("fibered").dump());

        if (!j.contains("checks") || !j.at("checks").is_array() || j.at("checks").empty())
            throw ParseError("scenario needs a nonempty checks array");
        for (const auto& c : j.at("checks")) {
            const std::string token = c.get<std::string>();
            if (std::find(kCheckTokens.begin(), kCheckTokens.end(), token) == kCheckTokens.end())
                throw ParseError("unknown check '" + token + "'; valid checks: " + tokenList());
            sc.checks.push_back(token);
        }

        if (j.contains("seed")) sc.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("base_point")) sc.basePoint = complexFrom(j.at("base_point"));
        if (j.contains("surrogate_degree")) sc.surrogateDegree = j.at("surrogate_degree").get<int>();
        if (j.contains("tolerances")) {
            const json& t = j.at("tolerances");
            if (t.contains("hermitian_rel")) sc.tol.hermitianRel = t.at("hermitian_rel").get<double>();
            if (t.contains("self_adjoint_rel"))
                sc.tol.selfAdjointRel = t.at("self_adjoint_rel").get<double>();
            if (t.contains("hypothesis")) sc.tol.hypothesis = t.at("hypothesis").get<double>();
            if (t.contains("identity_residual"))
                sc.tol.identityResidual = t.at("identity_residual").get<double>();
            if (t.contains("pointwise")) sc.tol.pointwise = t.at("pointwise").get<double>();
        }
        return sc;
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario schema: ") + e.what());
    }
}

std::string toJson(const Scenario& sc) {
    ordered_json j;
    j["name"] = sc.name;
    j["domain"] = json::parse(toJson(sc.domain));
    if (sc.source) j["source"] = json::parse(toJson(*sc.source));
    if (sc.target) j["target"] = json::parse(toJson(*sc.target));
    if (sc.hom) j["hom"] = json::parse(toJson(*sc.hom));
    if (sc.fibered) j["fibered"] = json::parse(toJson(*sc.fibered));
    j["checks"] = sc.checks;
    j["seed"] = sc.seed;
    if (sc.basePoint) j["base_point"] = complexJson(*sc.basePoint);
    j["surrogate_degree"] = sc.surrogateDegree;
    j["tolerances"] = ordered_json{{"hermitian_rel", sc.tol.hermitianRel},
                                   {"self_adjoint_rel", sc.tol.selfAdjointRel},
                                   {"hypothesis", sc.tol.hypothesis},
                                   {"identity_residual", sc.tol.identityResidual},
                                   {"pointwise", sc.tol.pointwise}};
    return j.dump(2);
}

int exitCodeFor(const std::vector<VerificationReport>& reports) {
    bool anyInconclusive = false;
    for (const auto& r : reports) {
        if (!r.pass && !r.inconclusive) return 1;
        if (r.inconclusive) anyInconclusive = true;
    }
    return anyInconclusive ? 3 : 0;
}

namespace {

// Inputs are parsed tables; checks need validated metric objects. Built
// lazily so a scenario listing only fibered checks never validates metrics.
struct Built {
    std::optional<MetricField> source;
    std::optional<MetricField> target;
    std::optional<HomomorphismField> hom;
};

const MetricField& needMetric(const Scenario& sc, Built& built, bool wantSource,
                              const std::string& check) {
    auto& slot = wantSource ? built.source : built.target;
    if (!slot) {
        const auto& poly = wantSource ? sc.source : sc.target;
        if (!poly)
            throw ParseError("check '" + check + "' needs a " +
                             (wantSource ? std::string("source") : std::string("target")) +
                             " metric");
        slot = MetricField::validate(*poly, sc.domain, sc.tol.hermitianRel);
    }
    return *slot;
}

const HomomorphismField& needHom(const Scenario& sc, Built& built, const std::string& check) {
    if (!built.hom) {
        const MetricField& src = needMetric(sc, built, true, check);
        const MetricField& tgt = needMetric(sc, built, false, check);
        MatrixPolyField a = sc.hom ? *sc.hom : MatrixPolyField::identity(src.rank());
        if (!sc.hom && src.rank() != tgt.rank())
            throw ParseError("check '" + check + "' needs a bundle map (ranks differ)");
        built.hom = HomomorphismField(std::move(a), src, tgt);
    }
    return *built.hom;
}

Complex basePointOf(const Scenario& sc) {
    const Complex s0 = sc.basePoint.value_or(sc.domain.center());
    if (!(sc.domain.distanceToBoundary(s0) > 0))
        throw ParseError("base point must lie strictly inside the domain");
    return s0;
}

VerificationReport runValidate(const Scenario& sc, Built& built) {
    VerificationReport rep;
    rep.check = "validate";
    rep.seed = sc.seed;
    rep.pass = true;
    try {
        if (sc.source) {
            const MetricField& m = needMetric(sc, built, true, "validate");
            rep.details["source_spd_margin"] = m.spdMargin();
            rep.details["source_rank"] = m.rank();
        }
        if (sc.target) {
            const MetricField& m = needMetric(sc, built, false, "validate");
            rep.details["target_spd_margin"] = m.spdMargin();
            rep.details["target_rank"] = m.rank();
        }
        if (sc.hom && sc.source && sc.target) needHom(sc, built, "validate");
        if (sc.fibered) rep.details["fiber_count"] = sc.fibered->fiberCount();
        rep.samples = static_cast<long>(sc.domain.nodeCount());
    } catch (const MetricError& e) {
        rep.pass = false;
        Witness w;
        w.s = e.witnessPoint;
        w.note = e.what();
        rep.witness = w;
    }
    return rep;
}

VerificationReport runCurvatureMap(const Scenario& sc, Built& built, ScenarioOutcome& out) {
    if (!sc.source && !sc.target)
        throw ParseError("check 'curvature-map' needs at least one metric");
    VerificationReport rep;
    rep.check = "curvature-map";
    rep.seed = sc.seed;
    rep.tolerance = sc.tol.selfAdjointRel;
    rep.residual = 0.0;

    const GridDomain& g = sc.domain;
    for (bool wantSource : {true, false}) {
        if ((wantSource && !sc.source) || (!wantSource && !sc.target)) continue;
        const MetricField& m = needMetric(sc, built, wantSource, "curvature-map");
        const std::string label = wantSource ? "source" : "target";
        out.artifacts[sc.name + "_" + label + "_curvature.csv"] = curvatureMapCsv(m);
        for (int iy = 0; iy < g.resolution(); ++iy)
            for (int ix = 0; ix < g.resolution(); ++ix) {
                const Complex s = g.node(ix, iy);
                const Matrix pr = m.nodeValue(ix, iy) * m.curvatureAt(s);
                const double denom = pr.norm();
                if (denom == 0) continue;
                const double rel = (pr - pr.adjoint()).norm() / denom;
                ++rep.samples;
                if (rel > rep.residual) {
                    rep.residual = rel;
                    Witness w;
                    w.s = s;
                    w.note = label + " metric: curvature self-adjointness defect";
                    rep.witness = w;
                }
            }
    }
    rep.pass = rep.residual <= rep.tolerance;
    return rep;
}

VerificationReport runIdentityResidual(const Scenario& sc, Built& built) {
    const MetricField& m = needMetric(sc, built, true, "eq23");
    const GridDomain& g = sc.domain;
    Prng rng(sc.seed);
    const Rect inner{g.center(), 0.8 * g.halfWidthRe(), 0.8 * g.halfWidthIm()};
    const double fdStep = 1e-4 * std::min(g.halfWidthRe(), g.halfWidthIm());

    VerificationReport rep;
    rep.check = "eq23";
    rep.seed = sc.seed;
    rep.tolerance = sc.tol.identityResidual;
    rep.residual = 0.0;

    const int sections = 4, points = 25;
    // Sections keep a dominant constant term: scaling the degree-d coefficient
    // to 0.2 / reach^d bounds the section norm below by 0.6 of its constant
    // term everywhere on the domain, so the finite-difference probe never
    // straddles a zero of the section, where the log is singular and stencil
    // error would swamp the identity.
    const double reach = std::abs(g.center()) + std::hypot(g.halfWidthRe(), g.halfWidthIm());
    long skipped = 0;
    for (int t = 0; t < sections; ++t) {
        MatrixPolyField f(m.rank(), 1);
        for (int d = 0; d <= 2; ++d) {
            Matrix c(m.rank(), 1);
            for (int r = 0; r < m.rank(); ++r) c(r, 0) = rng.complexNormal();
            c *= (d == 0 ? 1.0 : 0.2 / std::pow(reach, d)) / c.norm();
            f.addCoeff(d, 0, c);
        }
        const SectionField phi(std::move(f));
        for (int p = 0; p < points; ++p) {
            const Complex s = rng.pointIn(inner);
            const Vector v = phi.eval(s);
            if (std::real(m.inner(s, v, v)) < 1e-12) {
                ++skipped;
                continue;
            }
            const double resid = logNormIdentityResidual(m, phi, s, fdStep);
            ++rep.samples;
            if (resid > rep.residual) {
                rep.residual = resid;
                Witness w;
                w.s = s;
                w.v = v;
                w.note = "largest log-norm identity residual";
                rep.witness = w;
            }
        }
    }
    rep.pass = rep.residual <= rep.tolerance;
    rep.details["skipped_near_zero"] = static_cast<double>(skipped);
    rep.details["fd_step"] = fdStep;
    return rep;
}

VerificationReport runMaxPrinciple(const Scenario& sc, Built& built) {
    const HomomorphismField& h = needHom(sc, built, "max-principle");
    const ScalarSampleField lg = logNormField(h);
    const GridDomain& g = sc.domain;

    VerificationReport rep;
    rep.check = "max-principle";
    rep.seed = sc.seed;
    rep.tolerance = 10.0 * g.maxSpacing() * g.maxSpacing();
    rep.residual = -std::numeric_limits<double>::infinity();
    rep.pass = true;

    const double factors[] = {0.75, 0.5, 0.25};
    int idx = 0;
    for (double f : factors) {
        const Rect sub{g.center(), f * g.halfWidthRe(), f * g.halfWidthIm()};
        const VerificationReport part = maxPrincipleCheck(lg, sub);
        rep.samples += part.samples;
        rep.details["rect" + std::to_string(idx) + "_residual"] = part.residual;
        if (part.residual > rep.residual) {
            rep.residual = part.residual;
            rep.witness = part.witness;
        }
        rep.pass = rep.pass && part.pass;
        ++idx;
    }
    return rep;
}

VerificationReport runProofTrace(const Scenario& sc, Built& built) {
    const MetricField& src = needMetric(sc, built, true, "proof-trace");
    const HomomorphismField& h = needHom(sc, built, "proof-trace");
    const Complex s0 = basePointOf(sc);

    VerificationReport rep = sectionBoundCheck(src, s0, 10, sc.seed);
    const ProofConstants pc = sectionBoundConstants(src, s0, 10, sc.seed);
    const double radii[] = {pc.eps1 / 2, pc.eps1 / 4};
    int idx = 0;
    for (double r : radii) {
        const VerificationReport part = circleMeanLowerBoundCheck(h, s0, r, pc);
        const std::string key = "r" + std::to_string(idx);
        rep.details[key + "_radius"] = r;
        if (part.inconclusive) {
            rep.inconclusive = true;
        } else {
            rep.details[key + "_lhs"] = part.details.at("lhs_circle_mean");
            rep.details[key + "_rhs"] = part.details.at("rhs_bound");
            rep.pass = rep.pass && part.pass;
            if (!part.pass) rep.witness = part.witness;
        }
        rep.samples += part.samples;
        ++idx;
    }
    if (rep.inconclusive && !rep.pass) rep.pass = false;
    return rep;
}

VerificationReport runAxioms(const Scenario& sc, Built& built) {
    if (sc.fibered)
        return metricAxiomsCheck(makeLpSheafSample(*sc.fibered, sc.domain), 6, sc.seed);
    const MetricField& m = needMetric(sc, built, true, "axioms");
    return metricAxiomsCheck(makeBundleSheafSample(m), 6, sc.seed);
}

VerificationReport runLpStationarity(const Scenario& sc) {
    if (!sc.fibered) throw ParseError("check 'lp-stationarity' needs a fibered metric");
    Prng rng(sc.seed);
    const Vector w = rng.unitVector(sc.fibered->fiberCount());
    return stationarityCheck(*sc.fibered, basePointOf(sc), w, 4, sc.seed);
}

VerificationReport runHomFamily(const Scenario& sc, Built& built) {
    const MetricField& src = needMetric(sc, built, true, "hom-family");
    const MetricField& tgt = needMetric(sc, built, false, "hom-family");
    std::vector<MatrixPolyField> generators;
    if (sc.hom)
        generators.push_back(*sc.hom);
    else if (src.rank() == tgt.rank())
        generators.push_back(MatrixPolyField::identity(src.rank()));
    else
        throw ParseError("check 'hom-family' needs a bundle map (ranks differ)");
    return homFamilyGriffithsCheck(src, tgt, generators, 3, sc.seed);
}

}  // namespace

ScenarioOutcome runScenario(const Scenario& sc) {
    ScenarioOutcome out;
    Built built;
    for (const std::string& check : sc.checks) {
        if (std::find(kCheckTokens.begin(), kCheckTokens.end(), check) == kCheckTokens.end())
            throw ParseError("unknown check '" + check + "'; valid checks: " + tokenList());
        VerificationReport rep;
        if (check == "validate") rep = runValidate(sc, built);
        else if (check == "curvature-map") rep = runCurvatureMap(sc, built, out);
        else if (check == "hypothesis")
            rep = hypothesisCheck(needHom(sc, built, check), 24, sc.seed, VectorSearchMode::Auto,
                                  sc.tol.hypothesis);
        else if (check == "conclusion") rep = conclusionCheck(needHom(sc, built, check));
        else if (check == "max-principle") rep = runMaxPrinciple(sc, built);
        else if (check == "proof-trace") rep = runProofTrace(sc, built);
        else if (check == "eq23") rep = runIdentityResidual(sc, built);
        else if (check == "axioms") rep = runAxioms(sc, built);
        else if (check == "lp-stationarity") rep = runLpStationarity(sc);
        else rep = runHomFamily(sc, built);
        rep.seed = sc.seed;
        out.reports.push_back(std::move(rep));
    }
    return out;
}

}  // namespace curvlab
