#include "curvlab/falsify.hpp"

#include <cmath>

#include "curvlab/homomorphism.hpp"
#include "curvlab/psh.hpp"
#include "curvlab/rng.hpp"
#include "curvlab/serialization.hpp"
#include "json.hpp"

namespace curvlab {

namespace {

constexpr int kExpOrder = 14;  // exponents stay below ~1.5 on the trial domain

std::uint64_t trialSeed(std::uint64_t seed, std::uint64_t i) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (i + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

MatrixPolyField randomHolomorphicMatrix(Prng& rng, int rows, int cols, int maxDegree,
                                        double scale) {
    MatrixPolyField f(rows, cols);
    for (int d = 0; d <= maxDegree; ++d) {
        Matrix c(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int col = 0; col < cols; ++col) c(r, col) = scale * rng.complexNormal();
        f.addCoeff(d, 0, c);
    }
    return f;
}

// G(s)^H G(s) + m I: hermitian-symmetric table, uniformly positive.
MatrixPolyField randomSpdField(Prng& rng, int rank, int degree, double margin) {
    const MatrixPolyField g = randomHolomorphicMatrix(rng, rank, rank, degree, 0.5);
    MatrixPolyField p = g.conjugateTranspose() * g;
    p.addCoeff(0, 0, margin * Matrix::Identity(rank, rank));
    return p;
}

// Re(b1 s + b2 s^2): harmonic, so it shifts weights without moving curvature.
MatrixPolyField randomHarmonic(Prng& rng, double scale) {
    MatrixPolyField f(1, 1);
    const Complex b1 = scale * rng.complexNormal();
    const Complex b2 = scale * rng.complexNormal();
    f.addCoeff(1, 0, scalarMatrix(0.5 * b1));
    f.addCoeff(0, 1, scalarMatrix(0.5 * std::conj(b1)));
    f.addCoeff(2, 0, scalarMatrix(0.5 * b2));
    f.addCoeff(0, 2, scalarMatrix(0.5 * std::conj(b2)));
    return f;
}

// c |g(s)|^2 for holomorphic g: the building block with Laplacian of one sign.
MatrixPolyField holomorphicSquare(Prng& rng, double c, int degree) {
    const MatrixPolyField g = randomHolomorphicMatrix(rng, 1, 1, degree, 0.5);
    return (g.conjugateTranspose() * g) * Complex(c, 0.0);
}

// f tensor I_n: multiply a matrix table by a scalar weight table.
MatrixPolyField expandScalar(const MatrixPolyField& f, int n) {
    MatrixPolyField out(n, n);
    for (const auto& [deg, c] : f.coeffs())
        out.addCoeff(deg.j, deg.k, c(0, 0) * Matrix::Identity(n, n));
    return out;
}

struct Triple {
    MatrixPolyField source;
    MatrixPolyField target;
    MatrixPolyField hom;
    std::string family;
};

// h' = e^{-u} h with u superharmonic and A = id: the curvature quotients obey
// K' = K + Laplacian(u) <= K pointwise, so the hypothesis holds by scaling.
Triple conformalIdentityTriple(Prng& rng) {
    const int rank = 1 + rng.uniformInt(2);
    const MatrixPolyField p = randomSpdField(rng, rank, 1, 0.6);
    MatrixPolyField u(1, 1);
    u = u + holomorphicSquare(rng, -(0.10 + 0.15 * rng.uniform()), 2);
    u = u + holomorphicSquare(rng, -(0.10 + 0.15 * rng.uniform()), 2);
    u = u + randomHarmonic(rng, 0.2);
    const MatrixPolyField factor = expSurrogate(u * Complex(-1.0, 0.0), kExpOrder);
    return {p, expandScalar(factor, rank) * p, MatrixPolyField::identity(rank),
            "conformal-identity"};
}

// e^w H0 -> e^{w'} H0' with constant H0, H0' and w' - w subharmonic: both
// curvature quotients are scalar, ordered by construction, and the bundle
// map is an arbitrary holomorphic matrix.
Triple scalarOrderedTriple(Prng& rng) {
    const int n = 1 + rng.uniformInt(2);
    const int nPrime = 1 + rng.uniformInt(2);
    Prng sub(rng.raw());
    const MatrixPolyField h0 = randomSpdField(sub, n, 0, 0.6);
    const MatrixPolyField h0Prime = randomSpdField(sub, nPrime, 0, 0.6);
    MatrixPolyField w(1, 1);
    w = w + holomorphicSquare(rng, -(0.10 + 0.15 * rng.uniform()), 2);
    w = w + randomHarmonic(rng, 0.2);
    const MatrixPolyField wPrime = w + holomorphicSquare(rng, 0.10 + 0.15 * rng.uniform(), 2);
    const MatrixPolyField a = randomHolomorphicMatrix(rng, nPrime, n, 2, 0.7);
    return {expandScalar(expSurrogate(w, kExpOrder), n) * h0,
            expandScalar(expSurrogate(wPrime, kExpOrder), nPrime) * h0Prime, a, "scalar-ordered"};
}

// Unconstrained random pair plus map; hypothesisCheck is the filter.
Triple randomTriple(Prng& rng) {
    const int n = 1 + rng.uniformInt(2);
    const int nPrime = 1 + rng.uniformInt(2);
    return {randomSpdField(rng, n, 2, 0.6), randomSpdField(rng, nPrime, 2, 0.6),
            randomHolomorphicMatrix(rng, nPrime, n, 2, 0.7), "random-triple"};
}

}  // namespace

FalsifySummary falsify(const FalsifyOptions& opt) {
    if (opt.trials < 0) throw FieldError("trial count must be nonnegative");
    FalsifySummary sum;
    sum.options = opt;

    const GridDomain domain(0.0, 0.7, 0.7, opt.resolution);
    const RadiiPolicy policy = RadiiPolicy::forGrid(domain);
    const double rectFactors[] = {0.75, 0.5, 0.25};

    for (int i = 0; i < opt.trials; ++i) {
        const std::uint64_t seed = trialSeed(opt.seed, static_cast<std::uint64_t>(i));
        Prng rng(seed);
        Triple triple = i % 3 == 0   ? conformalIdentityTriple(rng)
                        : i % 3 == 1 ? scalarOrderedTriple(rng)
                                     : randomTriple(rng);

        TrialRecord rec;
        rec.index = i;
        rec.family = triple.family;

        const MetricField source = MetricField::validate(triple.source, domain);
        const MetricField target = MetricField::validate(triple.target, domain);
        const HomomorphismField hom(triple.hom, source, target);

        const VerificationReport hyp =
            hypothesisCheck(hom, opt.vectorSamples, seed, VectorSearchMode::Auto);
        rec.hypothesisResidual = hyp.residual;
        rec.hypothesis = hyp.pass ? "pass" : "fail";
        if (!hyp.pass) {
            ++sum.hypothesisFailed;
            rec.conclusion = "skipped";
            sum.trials.push_back(std::move(rec));
            continue;
        }
        ++sum.hypothesisPassed;

        const ScalarSampleField lg = logNormField(hom);
        const PshReport verdict = pshVerdict(lg, policy);
        rec.conclusionWorst = verdict.worstEstimate;
        rec.conclusion = toString(verdict.verdict);
        if (verdict.verdict == PshVerdictKind::Psh) ++sum.conclusionPsh;
        if (verdict.verdict == PshVerdictKind::Inconclusive) ++sum.conclusionInconclusive;
        if (verdict.verdict == PshVerdictKind::NotPsh) {
            ++sum.conclusionNotPsh;
            rec.counterexample = true;
            ++sum.counterexamples;
        }

        rec.leviMin = leviField(lg).minValue().value_or(std::numeric_limits<double>::quiet_NaN());

        rec.maxPrincipleResidual = -std::numeric_limits<double>::infinity();
        for (double f : rectFactors) {
            const Rect sub{domain.center(), f * domain.halfWidthRe(), f * domain.halfWidthIm()};
            const VerificationReport part = maxPrincipleCheck(lg, sub);
            rec.maxPrincipleResidual = std::max(rec.maxPrincipleResidual, part.residual);
            if (!part.pass) ++sum.maxPrincipleViolations;
        }

        if (rec.counterexample) {
            Scenario sc("falsify-trial-" + std::to_string(i), domain);
            sc.source = triple.source;
            sc.target = triple.target;
            sc.hom = triple.hom;
            sc.seed = seed;
            sc.checks = {"validate", "hypothesis", "conclusion", "max-principle"};
            sum.reproduction.push_back(toJson(sc));
        }
        sum.trials.push_back(std::move(rec));
    }
    return sum;
}

std::string toJson(const FalsifySummary& s) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["algorithm"] = Prng::kAlgorithm;
    j["seed"] = s.options.seed;
    j["trials"] = s.options.trials;
    j["resolution"] = s.options.resolution;
    j["counts"] = ordered_json{{"hypothesis_passed", s.hypothesisPassed},
                               {"hypothesis_failed", s.hypothesisFailed},
                               {"conclusion_psh", s.conclusionPsh},
                               {"conclusion_not_psh", s.conclusionNotPsh},
                               {"conclusion_inconclusive", s.conclusionInconclusive},
                               {"max_principle_violations", s.maxPrincipleViolations},
                               {"counterexamples", s.counterexamples}};
    ordered_json rows = ordered_json::array();
    for (const TrialRecord& r : s.trials) {
        ordered_json row{{"trial", r.index},
                         {"family", r.family},
                         {"hypothesis", r.hypothesis},
                         {"hypothesis_residual", r.hypothesisResidual},
                         {"conclusion", r.conclusion}};
        if (r.conclusion != "skipped") {
            row["conclusion_worst"] = r.conclusionWorst;
            if (std::isfinite(r.leviMin)) row["levi_min"] = r.leviMin;
            row["max_principle_residual"] = r.maxPrincipleResidual;
            row["counterexample"] = r.counterexample;
        }
        rows.push_back(std::move(row));
    }
    j["trial_rows"] = std::move(rows);
    ordered_json repro = ordered_json::array();
    for (const std::string& text : s.reproduction) repro.push_back(ordered_json::parse(text));
    j["reproduction"] = std::move(repro);
    return j.dump(2);
}

}  // namespace curvlab
